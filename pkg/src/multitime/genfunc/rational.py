"""
Multitime - Rational Generating Functions

This module builds the generating function F(x, y) = sum Y_mn x^m y^n of the
constant-coefficient Samuelson-Hicks recurrence

    Y(m+2, n+2) = (gamma + alpha) Y(m+1, n+1) - alpha Y(m, n)

as a quotient G / Q with Q = 1 - (gamma + alpha) xy + alpha x^2 y^2. The
numerator G depends on the boundary layers (rows and columns 0 and 1) and
is derived two independent ways. Coefficients are extracted by series
division and, independently, by the geometric expansion of 1/Q in xy.
"""

import logging
import math
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from multitime.core.errors import GeneratingFunctionError, NumericFailure, TruncationCapError
from multitime.genfunc.polynomial import BivariatePolynomial, Coefficient, format_coefficient
from multitime.genfunc.series import BivariateSeries
from multitime.models.hicks import HicksParams
from multitime.recurrence.boundary import BoundaryData

logger = logging.getLogger(__name__)

EXPANSION_CAP = 64
FLOAT_AGREEMENT = 1e-12


def parse_number(value: Any, exact: bool = True) -> Coefficient:
    """
    Convert a config value to a Fraction (exact) or float.

    Strings such as ``"3/7"`` or ``"0.1"`` and ints are exact; floats are
    taken through their shortest decimal representation.
    """
    if isinstance(value, bool):
        raise GeneratingFunctionError(f"Boolean is not a number: {value!r}")
    if not exact:
        return float(Fraction(value)) if isinstance(value, str) else float(value)
    try:
        if isinstance(value, float):
            return Fraction(repr(value))
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise GeneratingFunctionError(f"Cannot parse number {value!r}: {e}")


class BoundaryLayers:
    """
    Finite-support boundary sequences of a bivariate Samuelson-Hicks problem.

    Attributes:
        phi0: Y_m0 for m = 0, 1, ... (row n = 0)
        psi0: Y_0n for n = 0, 1, ... (column m = 0)
        phi1: Y_m1 for m = 1, 2, ... (row n = 1)
        psi1: Y_1n for n = 1, 2, ... (column m = 1)
    """

    def __init__(self, phi0: Sequence[Coefficient] = (), psi0: Sequence[Coefficient] = (),
                 phi1: Sequence[Coefficient] = (), psi1: Sequence[Coefficient] = ()):
        self.phi0 = list(phi0)
        self.psi0 = list(psi0)
        self.phi1 = list(phi1)
        self.psi1 = list(psi1)
        if self._at(self.phi0, 0) != self._at(self.psi0, 0):
            raise GeneratingFunctionError(
                f"corner inconsistency: phi0 starts with {self._at(self.phi0, 0)}, "
                f"psi0 starts with {self._at(self.psi0, 0)}"
            )
        if self._at(self.phi1, 0) != self._at(self.psi1, 0):
            raise GeneratingFunctionError(
                f"corner inconsistency: phi1 and psi1 disagree on Y11 "
                f"({self._at(self.phi1, 0)} != {self._at(self.psi1, 0)})"
            )

    @staticmethod
    def _at(sequence: List[Coefficient], index: int) -> Coefficient:
        return sequence[index] if index < len(sequence) else 0

    @property
    def y00(self) -> Coefficient:
        return self._at(self.phi0, 0)

    @property
    def y11(self) -> Coefficient:
        return self._at(self.phi1, 0)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.phi0 + self.psi0 + self.phi1 + self.psi1)

    def value(self, m: int, n: int) -> Coefficient:
        """Y_mn for min(m, n) <= 1."""
        if n == 0:
            return self._at(self.phi0, m)
        if m == 0:
            return self._at(self.psi0, n)
        if n == 1:
            return self._at(self.phi1, m - 1)
        if m == 1:
            return self._at(self.psi1, n - 1)
        raise GeneratingFunctionError(f"Y({m},{n}) is not boundary data")

    def to_boundary(self, window: Sequence[int]) -> BoundaryData:
        """Layer-0 and layer-1 boundary tables over a 2-D window."""
        return BoundaryData.from_function(2, 1, window, lambda t: [float(self.value(t[0], t[1]))], layers=(0, 1))

    @classmethod
    def from_dict(cls, data: Dict[str, Any], exact: bool = True) -> "BoundaryLayers":
        def sequence(name: str) -> List[Coefficient]:
            return [parse_number(v, exact) for v in data.get(name, [])]

        return cls(sequence("phi0"), sequence("psi0"), sequence("phi1"), sequence("psi1"))

    def to_dict(self) -> Dict[str, Any]:
        return {
            name: [format_coefficient(v) for v in getattr(self, name)]
            for name in ("phi0", "psi0", "phi1", "psi1")
        }


def particular_layers(y00: Coefficient = 1) -> BoundaryLayers:
    """Data with phi0 = psi0 = Y00, phi1 = x, psi1 = y (Y11 = 1)."""
    return BoundaryLayers([y00], [y00], [1], [1])


class RationalGF:
    """F = G / Q with Q(0, 0) = 1, plus the K - U split of G when known."""

    def __init__(self, numerator: BivariatePolynomial, denominator: BivariatePolynomial,
                 k_part: Optional[BivariatePolynomial] = None, u_part: Optional[BivariatePolynomial] = None,
                 variant: Optional[int] = None):
        if denominator.coefficient(0, 0) != 1:
            raise GeneratingFunctionError(
                f"Denominator constant term must be 1, got {denominator.coefficient(0, 0)}"
            )
        self.numerator = numerator
        self.denominator = denominator
        self.k_part = k_part
        self.u_part = u_part
        self.variant = variant

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "numerator": self.numerator.to_list(),
            "denominator": self.denominator.to_list(),
        }
        if self.variant is not None:
            result["variant"] = self.variant
        return result

    def __repr__(self) -> str:
        return f"RationalGF(({self.numerator}) / ({self.denominator}))"


def _numbers(p: HicksParams, exact: bool) -> Tuple[Coefficient, Coefficient]:
    gamma, alpha = p.gamma[0], p.alpha[0]
    if exact:
        return parse_number(gamma) + parse_number(alpha), parse_number(alpha)
    return float(gamma) + float(alpha), float(alpha)


def hicks_denominator(p: HicksParams, exact: bool = True) -> BivariatePolynomial:
    """Q = 1 - (gamma + alpha) xy + alpha x^2 y^2."""
    p.require_constant("hicks_denominator")
    trace, alpha = _numbers(p, exact)
    return BivariatePolynomial({(0, 0): 1, (1, 1): -trace, (2, 2): alpha})


def reversed_characteristic(p: HicksParams, exact: bool = True) -> BivariatePolynomial:
    """
    s^2 chi(1/s) in s = xy, chi(lambda) = lambda^2 - (gamma + alpha) lambda + alpha.

    Built by reversing chi's coefficient list, so it is an independent
    construction of Q.
    """
    trace, alpha = _numbers(p, exact)
    chi = [alpha, -trace, 1]
    degree = len(chi) - 1
    return BivariatePolynomial({(k, k): chi[degree - k] for k in range(degree + 1)})


def _layer_polynomials(layers: BoundaryLayers):
    phi0 = BivariatePolynomial.from_x(layers.phi0)
    psi0 = BivariatePolynomial.from_y(layers.psi0)
    phi1 = BivariatePolynomial.from_x(layers.phi1, start=1)
    psi1 = BivariatePolynomial.from_y(layers.psi1, start=1)
    return phi0, psi0, phi1, psi1


def build_gf_variant1(p: HicksParams, layers: BoundaryLayers) -> RationalGF:
    """
    Numerator from the functional equation Q F = G, with G = K - U:

        K = -(gamma+alpha) xy S - xy Y11
        U = -y phi1 - x psi1 - S,    S = phi0 + psi0 - Y00
    """
    p.require_constant("build_gf_variant1")
    exact = layers.exact
    trace, _ = _numbers(p, exact)
    phi0, psi0, phi1, psi1 = _layer_polynomials(layers)
    xy = BivariatePolynomial.monomial(1, 1)
    x = BivariatePolynomial.monomial(1, 0)
    y = BivariatePolynomial.monomial(0, 1)
    corner = phi0 + psi0 - BivariatePolynomial.constant(layers.y00)
    k_part = -(xy * corner * trace) - xy * layers.y11
    u_part = -(y * phi1) - x * psi1 - corner
    numerator = k_part - u_part
    logger.debug(f"Variant-1 numerator has {len(numerator.terms())} term(s)")
    return RationalGF(numerator, hicks_denominator(p, exact), k_part, u_part, variant=1)


def build_gf_variant2(p: HicksParams, layers: BoundaryLayers) -> RationalGF:
    """
    Numerator from the per-diagonal characteristic solution:

        G = sum_{k>=0} [Y_0k + (Y_1,k+1 - (alpha+gamma) Y_0k) xy] y^k
          + sum_{k>=1} [Y_k0 + (Y_k+1,1 - (alpha+gamma) Y_k0) xy] x^k
    """
    p.require_constant("build_gf_variant2")
    exact = layers.exact
    trace, _ = _numbers(p, exact)
    terms: Dict[Tuple[int, int], Coefficient] = {}

    def add(exponent: Tuple[int, int], value: Coefficient) -> None:
        terms[exponent] = terms.get(exponent, 0) + value

    for k in range(max(len(layers.psi0), len(layers.psi1))):
        y0k = layers.value(0, k)
        add((0, k), y0k)
        add((1, k + 1), layers.value(1, k + 1) - trace * y0k)
    for k in range(1, max(len(layers.phi0), len(layers.phi1))):
        yk0 = layers.value(k, 0)
        add((k, 0), yk0)
        add((k + 1, 1), layers.value(k + 1, 1) - trace * yk0)
    return RationalGF(BivariatePolynomial(terms), hicks_denominator(p, exact), variant=2)


def split_numerator(gf: RationalGF) -> Tuple[BivariatePolynomial, BivariatePolynomial]:
    """
    The (K, U) parts of G = K - U.

    Raises:
        GeneratingFunctionError: the GF was not built with its split
    """
    if gf.k_part is None or gf.u_part is None:
        raise GeneratingFunctionError("Generating function carries no K/U split")
    return gf.k_part, gf.u_part


def _diagonal_profile(denominator: BivariatePolynomial) -> Optional[Tuple[Coefficient, Coefficient]]:
    """(c, a) when Q = 1 - c xy + a x^2 y^2, else None."""
    allowed = {(0, 0), (1, 1), (2, 2)}
    if any(exponent not in allowed for exponent, _ in denominator.terms()):
        return None
    return -denominator.coefficient(1, 1), denominator.coefficient(2, 2)


def _geometric_weights(c: Coefficient, a: Coefficient, order: int) -> List[Coefficient]:
    """Coefficients h_j of sum_k (c s - a s^2)^k, s = xy, for j <= order."""
    weights: List[Coefficient] = [0] * (order + 1)
    for k in range(order + 1):
        for i in range(k + 1):
            j = k + i
            if j > order:
                break
            weights[j] = weights[j] + math.comb(k, i) * c ** (k - i) * (-a) ** i
    return weights


def _expand_geometric(gf: RationalGF, M: int, N: int, exact: bool) -> Optional[BivariateSeries]:
    profile = _diagonal_profile(gf.denominator)
    if profile is None:
        return None
    weights = _geometric_weights(profile[0], profile[1], min(M, N))
    if not exact:
        weights = [float(weight) for weight in weights]
    numerator = BivariateSeries.from_polynomial(gf.numerator, M, N).coefficients
    if not exact:
        numerator = numerator.astype(float)
    result = BivariateSeries.zeros(M, N, exact=exact).coefficients
    for j, weight in enumerate(weights):
        if weight == 0:
            continue
        result[j:, j:] = result[j:, j:] + weight * numerator[:M + 1 - j, :N + 1 - j]
    return BivariateSeries(result)


def expand(gf: RationalGF, M: int, N: int, cap: int = EXPANSION_CAP) -> BivariateSeries:
    """
    Taylor coefficients of G / Q for 0 <= m <= M, 0 <= n <= N.

    The grid is computed by series division and, when Q has the form
    1 - c xy + a x^2 y^2, again by geometric expansion of 1/Q; both must agree
    (exactly for exact inputs, within 1e-12 relative otherwise).

    Raises:
        TruncationCapError: M or N exceeds the cap
        NumericFailure: the two expansions disagree
    """
    if M < 0 or N < 0:
        raise TruncationCapError(f"Truncation orders must be non-negative, got {M}x{N}")
    if M > cap or N > cap:
        raise TruncationCapError(f"Truncation {M}x{N} exceeds the cap {cap}")
    exact = gf.numerator.exact and gf.denominator.exact
    numerator = BivariateSeries.from_polynomial(gf.numerator, M, N)
    denominator = BivariateSeries.from_polynomial(gf.denominator, M, N)
    if not exact:
        numerator = BivariateSeries(numerator.to_float())
        denominator = BivariateSeries(denominator.to_float())
    by_division = numerator.divide(denominator)

    by_geometry = _expand_geometric(gf, M, N, exact)
    if by_geometry is None:
        logger.debug("Denominator is not a quadratic in xy; geometric cross-check skipped")
    elif not by_division.equals(by_geometry, rtol=FLOAT_AGREEMENT):
        raise NumericFailure("Series division and geometric expansion disagree")
    return by_division


def functional_equation_residuals(gf: RationalGF, series: BivariateSeries) -> Dict[str, Optional[float]]:
    """
    Max-abs residuals of Q F - G and, when the split is known, of K - (Q F + U).

    Both are evaluated on the series grid, where truncation is exact.
    """
    M, N = series.orders
    denominator = BivariateSeries.from_polynomial(gf.denominator, M, N)
    product = denominator.multiply(series)
    numerator = BivariateSeries.from_polynomial(gf.numerator, M, N)
    result: Dict[str, Optional[float]] = {
        "numerator": product.subtract(numerator).max_abs(),
        "split": None,
    }
    if gf.k_part is not None and gf.u_part is not None:
        k_series = BivariateSeries.from_polynomial(gf.k_part, M, N)
        u_series = BivariateSeries.from_polynomial(gf.u_part, M, N)
        result["split"] = k_series.subtract(product.add(u_series)).max_abs()
    return result


def verify_functional_equation(gf: RationalGF, series: BivariateSeries) -> float:
    """Largest of the :func:`functional_equation_residuals`."""
    residuals = functional_equation_residuals(gf, series)
    return max(value for value in residuals.values() if value is not None)


class UnivariateGF:
    """F(x) = P(x) / R(x) with R(0) = 1; coefficients listed by ascending power."""

    def __init__(self, numerator: Sequence[Coefficient], denominator: Sequence[Coefficient]):
        if not denominator or denominator[0] != 1:
            raise GeneratingFunctionError("Univariate denominator must have constant term 1")
        self.numerator = list(numerator)
        self.denominator = list(denominator)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "numerator": [format_coefficient(v) for v in self.numerator],
            "denominator": [format_coefficient(v) for v in self.denominator],
        }


def build_gf_univariate(alpha: Coefficient, gamma: Coefficient, a0: Coefficient, a1: Coefficient) -> UnivariateGF:
    """F(x) = (a0 + (a1 - (alpha + gamma) a0) x) / (1 - (alpha + gamma) x + alpha x^2)."""
    trace = alpha + gamma
    return UnivariateGF([a0, a1 - trace * a0], [1, -trace, alpha])


def univariate_coefficients(gf: UnivariateGF, count: int) -> List[Coefficient]:
    """First ``count`` Taylor coefficients by power-series division."""
    result: List[Coefficient] = []
    for k in range(count):
        value = gf.numerator[k] if k < len(gf.numerator) else 0
        for i in range(1, min(k, len(gf.denominator) - 1) + 1):
            value = value - gf.denominator[i] * result[k - i]
        result.append(value)
    return result
