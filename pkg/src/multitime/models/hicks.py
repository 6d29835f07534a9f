"""
Multitime - Samuelson-Hicks Models

This module implements the discrete multitime Samuelson-Hicks business-cycle
model on N^m. National income Y obeys the second-order diagonal equation

    Y(t + 2) - (gamma(t+1) + alpha(t+1)) Y(t + 1) + alpha(t+1) Y(t) = 0,

with gamma the marginal propensity to consume and alpha the accelerator.
Three equivalent formulations are solved:

- the scalar second-order iteration, per diagonal
- the (Y, C) first-order system, C being consumption
- the (Y, Z) companion system, Z(t) = Y(t + 1)

Periodic parameters are sequences of phase values: gamma(t) and alpha(t)
depend only on mu(t) mod T. The (Y, C) matrix reads gamma at phase
mu(t) - 1, which wraps modulo T.
"""

import logging
from fractions import Fraction
from numbers import Real
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from multitime.core.algebra import Quadratic, solve_quadratic
from multitime.core.errors import ContractError, DimensionMismatchError, HicksParameterError, NumericFailure
from multitime.core.lattice import MultiIndex, diagonal_points, in_window, shift, window_bases
from multitime.floquet.decomposition import monodromy
from multitime.recurrence.boundary import BoundaryData, require_compatible
from multitime.recurrence.field import SolutionField
from multitime.recurrence.providers import FunctionProvider
from multitime.recurrence.solver import DiagonalRecurrence, solve_iterative

logger = logging.getLogger(__name__)

STABILITY_MARGIN = 1e-12
DOUBLE_ROOT_TOLERANCE = 1e-12
DETERMINANT_TOLERANCE = 1e-12

Number = Union[float, Fraction]


def _phase_values(name: str, value: Any) -> Tuple[Number, ...]:
    if isinstance(value, (Real, Fraction)):
        values = (value,)
    else:
        values = tuple(value)
    if not values:
        raise HicksParameterError(f"{name} needs at least one phase value")
    return tuple(v if isinstance(v, Fraction) else float(v) for v in values)


class HicksParams:
    """
    Samuelson-Hicks parameters, constant or diagonal-phase periodic.

    A length-1 sequence is broadcast to the length of the other one.
    """

    def __init__(self, gamma: Any, alpha: Any):
        gammas = _phase_values("gamma", gamma)
        alphas = _phase_values("alpha", alpha)
        if len(gammas) != len(alphas):
            if len(gammas) == 1:
                gammas = gammas * len(alphas)
            elif len(alphas) == 1:
                alphas = alphas * len(gammas)
            else:
                raise HicksParameterError(
                    f"phase sequence lengths disagree: gamma has {len(gammas)}, alpha has {len(alphas)}"
                )
        for value in gammas:
            if not 0 < value < 1:
                raise HicksParameterError(f"gamma out of (0,1): {value}")
        for value in alphas:
            if not value > 0:
                raise HicksParameterError(f"alpha must be positive: {value}")
        self.gamma = gammas
        self.alpha = alphas

    @property
    def period(self) -> int:
        return len(self.gamma)

    @property
    def is_constant(self) -> bool:
        return self.period == 1

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.gamma + self.alpha)

    def gamma_phase(self, phase: int) -> Number:
        return self.gamma[phase % self.period]

    def alpha_phase(self, phase: int) -> Number:
        return self.alpha[phase % self.period]

    def gamma_at(self, t: Sequence[int]) -> Number:
        return self.gamma_phase(min(t))

    def alpha_at(self, t: Sequence[int]) -> Number:
        return self.alpha_phase(min(t))

    def trace_phase(self, phase: int) -> Number:
        """gamma + alpha at one phase."""
        return self.gamma_phase(phase) + self.alpha_phase(phase)

    def require_constant(self, operation: str) -> None:
        if not self.is_constant:
            raise HicksParameterError(f"{operation} needs constant parameters, got period {self.period}")

    def accelerator_class(self, phase: int = 0) -> str:
        alpha = self.alpha_phase(phase)
        if alpha < 1:
            return "decelerator"
        if alpha == 1:
            return "keeper"
        return "accelerator"

    def alpha_product(self) -> Number:
        """Product of the alpha phase values: det of the monodromy matrix."""
        result: Number = 1
        for value in self.alpha:
            result = result * value
        return result

    def as_float(self) -> "HicksParams":
        return HicksParams([float(v) for v in self.gamma], [float(v) for v in self.alpha])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": [float(v) for v in self.gamma],
            "alpha": [float(v) for v in self.alpha],
            "period": self.period,
        }

    def __repr__(self) -> str:
        return f"HicksParams(gamma={list(self.gamma)}, alpha={list(self.alpha)})"


class HicksClassification:
    """Characteristic-equation analysis of the constant model."""

    def __init__(self, discriminant: float, root_kind: str, roots: Quadratic, stable: bool,
                 accelerator_class: str):
        self.discriminant = discriminant
        self.root_kind = root_kind
        self.roots = roots
        self.stable = stable
        self.accelerator_class = accelerator_class

    @property
    def spectral_radius(self) -> float:
        return max(self.roots.moduli)

    @property
    def roots_positive(self) -> Optional[bool]:
        """Whether both roots are positive reals; None for a complex pair."""
        if self.root_kind == "complex-pair":
            return None
        return all(z.real > 0 for z in self.roots.roots)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "discriminant": self.discriminant,
            "root_kind": self.root_kind,
            "roots": self.roots.to_dict()["roots"],
            "roots_positive": self.roots_positive,
            "spectral_radius": self.spectral_radius,
            "stable": self.stable,
            "accelerator_class": self.accelerator_class,
        }


def constant_system_matrix(p: HicksParams) -> np.ndarray:
    """The (Y, C) matrix [[gamma + alpha, -alpha/gamma], [gamma, 0]]."""
    p.require_constant("constant_system_matrix")
    gamma, alpha = float(p.gamma[0]), float(p.alpha[0])
    return np.array([[gamma + alpha, -alpha / gamma], [gamma, 0.0]])


def _system_matrix_at_phase(p: HicksParams, phase: int) -> np.ndarray:
    gamma = float(p.gamma_phase(phase))
    alpha = float(p.alpha_phase(phase))
    previous_gamma = float(p.gamma_phase(phase - 1))
    return np.array([[gamma + alpha, -alpha / previous_gamma], [gamma, 0.0]])


def _companion_at_phase(p: HicksParams, phase: int) -> np.ndarray:
    alpha = float(p.alpha_phase(phase + 1))
    return np.array([[0.0, 1.0], [-alpha, float(p.trace_phase(phase + 1))]])


def periodic_system_provider(p: HicksParams, m: int = 2) -> FunctionProvider:
    """
    (Y, C) coefficient provider [[gamma(t)+alpha(t), -alpha(t)/gamma(t-1)], [gamma(t), 0]].

    Args:
        p: Model parameters
        m: Lattice dimension

    Returns:
        T-diagonal-periodic provider, T = p.period
    """
    matrices = [_system_matrix_at_phase(p, phase) for phase in range(p.period)]
    return FunctionProvider(m, (2, 2), lambda t: matrices[min(t) % p.period],
                            period=p.period, label="hicks-system")


def companion_provider(p: HicksParams, m: int = 2) -> FunctionProvider:
    """(Y, Z) companion provider [[0, 1], [-alpha(t+1), gamma(t+1)+alpha(t+1)]]."""
    matrices = [_companion_at_phase(p, phase) for phase in range(p.period)]
    return FunctionProvider(m, (2, 2), lambda t: matrices[min(t) % p.period],
                            period=p.period, label="hicks-companion")


def classify(p: HicksParams) -> HicksClassification:
    """
    Classify the characteristic equation lambda^2 - (gamma+alpha) lambda + alpha = 0.

    Raises:
        HicksParameterError: parameters are not constant
    """
    p.require_constant("classify")
    gamma, alpha = float(p.gamma[0]), float(p.alpha[0])
    trace = gamma + alpha
    discriminant = trace * trace - 4.0 * alpha
    if abs(discriminant) <= DOUBLE_ROOT_TOLERANCE * max(1.0, trace * trace):
        root_kind = "real-double"
    elif discriminant > 0:
        root_kind = "real-distinct"
    else:
        root_kind = "complex-pair"
    roots = solve_quadratic(1.0, -trace, alpha)
    stable = max(roots.moduli) < 1.0 - STABILITY_MARGIN
    result = HicksClassification(discriminant, root_kind, roots, stable, p.accelerator_class())
    logger.debug(f"Hicks classification: delta={discriminant:.6g}, {root_kind}, stable={stable}")
    return result


def _require_layers(boundary: BoundaryData) -> None:
    if boundary.n != 1:
        raise DimensionMismatchError(f"Samuelson-Hicks boundary stores scalars, got n={boundary.n}")
    if not {0, 1}.issubset(boundary.layers):
        raise ContractError(f"Second-order solve needs boundary layers 0 and 1, got {boundary.layers}")


def solve_second_order(p: HicksParams, boundary: BoundaryData, window: Sequence[int]) -> SolutionField:
    """
    Fill a window by scalar iteration along each diagonal.

    Each diagonal b, b+1, b+2, ... is seeded with Y(b) (layer 0) and Y(b+1)
    (layer 1), then Y(b+k+2) = (gamma+alpha)(k+1) Y(b+k+1) - alpha(k+1) Y(b+k),
    parameters taken at phase k+1.

    Args:
        p: Model parameters
        boundary: Scalar boundary data with layers 0 and 1
        window: Per-axis bounds

    Returns:
        Scalar SolutionField of Y

    Raises:
        IncompatibleBoundaryError: layers disagree where faces meet
    """
    _require_layers(boundary)
    require_compatible(boundary)
    window = tuple(int(w) for w in window)
    if len(window) != boundary.m:
        raise DimensionMismatchError(f"Window {window} has {len(window)} axes, expected {boundary.m}")
    field = SolutionField.empty(window, 1)
    traces = [float(p.trace_phase(k)) for k in range(p.period)]
    alphas = [float(p.alpha_phase(k)) for k in range(p.period)]
    for base in window_bases(window):
        points = diagonal_points(base, window)
        values: List[float] = []
        for k, point in enumerate(points):
            if k < 2:
                value = float(np.real(boundary.value(point)[0]))
            else:
                phase = (k - 1) % p.period
                value = traces[phase] * values[k - 1] - alphas[phase] * values[k - 2]
            values.append(value)
            field[point] = value
    logger.debug(f"Scalar second-order solve filled window {window}")
    return field


def _layer_one_value(boundary: BoundaryData, base: MultiIndex, window: Sequence[int]) -> Optional[float]:
    following = shift(base, 1)
    if not in_window(following, window):
        return None
    return float(np.real(boundary.value(following)[0]))


def seed_consumption(p: HicksParams, y0: float, y1: float) -> float:
    """
    Consumption at a diagonal base consistent with the scalar equation.

    From Y(b+1) = (gamma(0)+alpha(0)) Y(b) - alpha(0)/gamma(-1) C(b):
    C(b) = gamma(-1) ((gamma(0)+alpha(0)) Y(b) - Y(b+1)) / alpha(0).
    """
    alpha = float(p.alpha_phase(0))
    return float(p.gamma_phase(-1)) * (float(p.trace_phase(0)) * y0 - y1) / alpha


def solve_companion(p: HicksParams, boundary: BoundaryData, window: Sequence[int],
                    jobs: int = 1) -> SolutionField:
    """
    Solve the (Y, Z) companion system seeded with Z(b) = Y(b+1).

    Returns:
        Two-component field (Y, Z)
    """
    _require_layers(boundary)
    require_compatible(boundary)

    def seed(t: MultiIndex):
        y1 = _layer_one_value(boundary, t, window)
        return [float(np.real(boundary.value(t)[0])), 0.0 if y1 is None else y1]

    seeded = BoundaryData.from_function(boundary.m, 2, window, seed)
    rec = DiagonalRecurrence(companion_provider(p, boundary.m), seeded)
    return solve_iterative(rec, window, order="diagonal", jobs=jobs)


def solve_yc_system(p: HicksParams, boundary: BoundaryData, window: Sequence[int],
                    consumption: Optional[BoundaryData] = None, jobs: int = 1) -> SolutionField:
    """
    Solve the (Y, C) first-order system.

    Args:
        p: Model parameters
        boundary: Scalar Y boundary data with layers 0 and 1
        window: Per-axis bounds
        consumption: Raw layer-0 C data; derived by :func:`seed_consumption`
            when omitted
        jobs: Worker threads for the diagonal sweep

    Returns:
        Two-component field (Y, C)
    """
    _require_layers(boundary)
    require_compatible(boundary)
    if consumption is not None and (consumption.n != 1 or consumption.m != boundary.m):
        raise DimensionMismatchError("Consumption boundary must be scalar on the same lattice")

    def seed(t: MultiIndex):
        y0 = float(np.real(boundary.value(t)[0]))
        if consumption is not None:
            return [y0, float(np.real(consumption.value(t)[0]))]
        y1 = _layer_one_value(boundary, t, window)
        return [y0, 0.0 if y1 is None else seed_consumption(p, y0, y1)]

    seeded = BoundaryData.from_function(boundary.m, 2, window, seed)
    rec = DiagonalRecurrence(periodic_system_provider(p, boundary.m), seeded)
    return solve_iterative(rec, window, order="diagonal", jobs=jobs)


class HicksState:
    """Income, consumption and companion fields of one solved model."""

    def __init__(self, income: SolutionField, consumption: SolutionField, companion: SolutionField):
        self.income = income
        self.consumption = consumption
        self.companion = companion

    def disagreement(self, yc: SolutionField, yz: SolutionField) -> float:
        """Max difference of Y between the scalar solve and the two systems."""
        return max(yc.component(0).max_difference(self.income),
                   yz.component(0).max_difference(self.income))


def solve_all(p: HicksParams, boundary: BoundaryData, window: Sequence[int],
              consumption: Optional[BoundaryData] = None, jobs: int = 1) -> Tuple[HicksState, float]:
    """
    Solve all three formulations.

    Returns:
        The state fields and the max Y disagreement between formulations
    """
    income = solve_second_order(p, boundary, window)
    yc = solve_yc_system(p, boundary, window, consumption=consumption, jobs=jobs)
    yz = solve_companion(p, boundary, window, jobs=jobs)
    state = HicksState(income, yc.component(1), yz.component(1))
    spread = state.disagreement(yc, yz)
    logger.info(f"Samuelson-Hicks formulations agree within {spread:.3e}")
    return state, spread


def negativity_warnings(field: SolutionField, label: str = "Y", tol: float = 0.0,
                        limit: int = 20) -> List[str]:
    """
    Describe points where a scalar field is negative.

    Negative income or consumption contradicts the model's economic
    assumption but not the recurrence, so callers report these instead of failing.
    """
    points = field.negative_points(0, tol)
    warnings = [
        f"{label} negative at ({point.to_string()}): {float(np.real(field[point][0])):.6g}"
        for point in points[:limit]
    ]
    if len(points) > limit:
        warnings.append(f"{label} negative at {len(points) - limit} further point(s)")
    return warnings


def hicks_floquet_multipliers(p: HicksParams, t: Sequence[int]) -> Quadratic:
    """
    Floquet multipliers as roots of z^2 - tr(D) z + det(D) = 0.

    D is the companion monodromy at t's diagonal base; det(D) is checked
    against the product of the alpha phase values.

    Args:
        p: Model parameters, T = p.period
        t: Lattice point

    Returns:
        Quadratic holding both multipliers

    Raises:
        NumericFailure: det(D) disagrees with the alpha product beyond rounding
    """
    D = monodromy(companion_provider(p, len(t)), p.period, t)
    trace = float(np.trace(D))
    determinant = float(np.linalg.det(D))
    expected = float(p.alpha_product())
    mismatch = abs(determinant - expected)
    # rounding in a 2x2 determinant scales with its two products
    scale = max(1.0, abs(expected), abs(D[0, 0] * D[1, 1]), abs(D[0, 1] * D[1, 0]))
    if mismatch > DETERMINANT_TOLERANCE * scale:
        raise NumericFailure(
            f"Monodromy determinant {determinant!r} differs from alpha product {expected!r} by {mismatch:.3e}"
        )
    return solve_quadratic(1.0, -trace, determinant)
