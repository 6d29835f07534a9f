"""
Multitime - Diagonal Closed Forms

On the main diagonal the generating function reduces to a univariate one in
s = xy,

    F(s) = (Y00 + (Y11 - (gamma+alpha) Y00) s) / (1 - (gamma+alpha) s + alpha s^2),

and partial fractions over the real roots r1 < r2 of the denominator give

    Y_nn = (1/alpha) (A / r1^(n+1) + B / r2^(n+1)).

Each diagonal also has the characteristic form Y = c1 l1^k + c2 l2^k in the
roots l1, l2 of lambda^2 - (gamma+alpha) lambda + alpha.
"""

import logging
from typing import Any, Dict, List, Optional

from multitime.core.algebra import solve_quadratic
from multitime.core.errors import DegenerateEquationError, GeneratingFunctionError
from multitime.models.hicks import HicksParams

logger = logging.getLogger(__name__)


class DiagonalClosedForm:
    """Roots and residue constants of the main-diagonal closed form."""

    def __init__(self, alpha: float, trace: float, r1: complex, r2: complex, A: Optional[float],
                 B: Optional[float], valid: bool):
        self.alpha = alpha
        self.trace = trace
        self.r1 = r1
        self.r2 = r2
        self.A = A
        self.B = B
        self.valid = valid

    def value(self, n: int) -> float:
        """
        Y_nn from the closed form.

        Raises:
            GeneratingFunctionError: roots are not real and distinct
        """
        if not self.valid:
            raise GeneratingFunctionError("Diagonal closed form needs real distinct roots")
        r1, r2 = self.r1.real, self.r2.real
        return (self.A / r1 ** (n + 1) + self.B / r2 ** (n + 1)) / self.alpha

    def sequence(self, count: int) -> List[float]:
        return [self.value(n) for n in range(count)]

    def vieta_residual(self) -> float:
        """Max deviation from r1 r2 = 1/alpha and r1 + r2 = (gamma+alpha)/alpha."""
        return max(abs(self.r1 * self.r2 - 1.0 / self.alpha), abs(self.r1 + self.r2 - self.trace / self.alpha))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "r1": {"re": self.r1.real, "im": self.r1.imag},
            "r2": {"re": self.r2.real, "im": self.r2.imag},
            "A": self.A,
            "B": self.B,
        }


def diagonal_closed_form(p: HicksParams, y00: float, y11: float) -> DiagonalClosedForm:
    """
    Build the closed form for the diagonal seeded by Y00 and Y11.

    r1 < r2 solve alpha s^2 - (gamma+alpha) s + 1 = 0; with
    N(s) = Y00 + (Y11 - (gamma+alpha) Y00) s the residue constants are
    A = N(r1) / (r2 - r1) and B = N(r2) / (r1 - r2).

    Returns:
        DiagonalClosedForm, flagged invalid when (gamma+alpha)^2 <= 4 alpha
    """
    p.require_constant("diagonal_closed_form")
    gamma, alpha = float(p.gamma[0]), float(p.alpha[0])
    trace = gamma + alpha
    roots = solve_quadratic(alpha, -trace, 1.0)
    r2, r1 = roots.roots
    valid = roots.discriminant.real > 0
    A = B = None
    if valid:
        r1, r2 = complex(r1.real, 0.0), complex(r2.real, 0.0)

        def numerator_at(s: float) -> float:
            return y00 + (y11 - trace * y00) * s

        A = numerator_at(r1.real) / (r2.real - r1.real)
        B = numerator_at(r2.real) / (r1.real - r2.real)
    else:
        logger.debug(f"Diagonal closed form invalid: discriminant {roots.discriminant.real:.6g} <= 0")
    return DiagonalClosedForm(alpha, trace, r1, r2, A, B, valid)


class CharacteristicConstants:
    """Y_k = c1 l1^k + c2 l2^k along one diagonal."""

    def __init__(self, roots, c1: complex, c2: complex):
        self.roots = roots
        self.c1 = c1
        self.c2 = c2

    def value(self, k: int) -> complex:
        l1, l2 = self.roots
        return self.c1 * l1 ** k + self.c2 * l2 ** k

    def sequence(self, count: int) -> List[complex]:
        return [self.value(k) for k in range(count)]


def characteristic_constants(p: HicksParams, seed0: float, seed1: float) -> CharacteristicConstants:
    """
    Constants c1, c2 matching Y_0 = seed0 and Y_1 = seed1 on one diagonal.

    Raises:
        DegenerateEquationError: the characteristic roots coincide
    """
    p.require_constant("characteristic_constants")
    trace, alpha = float(p.trace_phase(0)), float(p.alpha[0])
    quadratic = solve_quadratic(1.0, -trace, alpha)
    l1, l2 = quadratic.roots
    if abs(l1 - l2) <= 1e-12 * max(1.0, abs(l1)):
        raise DegenerateEquationError("Characteristic roots coincide; constants need the k l^k form")
    c1 = (seed1 - l2 * seed0) / (l1 - l2)
    c2 = seed0 - c1
    return CharacteristicConstants((l1, l2), c1, c2)
