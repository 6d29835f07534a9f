"""
Multitime - Floquet Decomposition

This module implements Floquet theory for T-diagonal-periodic recurrences
x(t + 1) = A(t) x(t), where A(t + T 1) = A(t):

- A~(t) = A(t + (T-1) 1) ... A(t + 1) A(t)
- monodromy D(t) = A~(t - mu(t) 1), constant along diagonals
- root B(t): the principal T-th root of D(t), so B(t)^T = D(t)
- periodic factor P(t) = Phi(t) B(t)^{-mu(t)}, with P(t + T 1) = P(t)
- Floquet multipliers: the eigenvalues of D(t)

Solutions of y(t + 1) = B(t) y(t) map to solutions of the original recurrence
through x(t) = P(t) y(t), and back through P(t)^{-1}.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from multitime.core.algebra import (
    Spectrum,
    eigenvalues,
    frobenius_residual,
    mat_inverse,
    mat_power,
    mat_product_chain,
    matrix_root,
)
from multitime.core.errors import ContractError, NumericFailure, PeriodicityError
from multitime.core.lattice import MultiIndex, check_dimension, diag_decompose, shift, window_bases, window_points
from multitime.recurrence.field import SolutionField
from multitime.recurrence.providers import FunctionProvider, LatticeProvider
from multitime.recurrence.solver import DiagonalRecurrence, transfer_matrix

logger = logging.getLogger(__name__)

PERIODICITY_TOLERANCE = 1e-12
FLOQUET_TOLERANCE = 1e-8


def _provider(source: Union[DiagonalRecurrence, LatticeProvider]) -> LatticeProvider:
    return source.coefficients if isinstance(source, DiagonalRecurrence) else source


class PeriodicityReport:
    """Outcome of a finite-window periodicity check."""

    def __init__(self, period: int, window: Sequence[int], checked: int,
                 counterexample: Optional[MultiIndex] = None):
        self.period = period
        self.window = tuple(window)
        self.checked = checked
        self.counterexample = counterexample

    @property
    def periodic(self) -> bool:
        return self.counterexample is None

    def __bool__(self) -> bool:
        return self.periodic

    def to_dict(self) -> Dict[str, Any]:
        return {
            "period": self.period,
            "window": list(self.window),
            "checked_points": self.checked,
            "periodic": self.periodic,
            "counterexample": list(self.counterexample) if self.counterexample is not None else None,
        }


def check_diagonal_periodicity(A: LatticeProvider, T: int, window: Sequence[int]) -> PeriodicityReport:
    """
    Verify A(t + T 1) = A(t) for every t in the window.

    Comparisons are exact for table-backed providers and use an absolute
    tolerance of 1e-12 otherwise.

    Args:
        A: Coefficient provider
        T: Candidate diagonal period
        window: Per-axis bounds of the sampled points t

    Returns:
        PeriodicityReport with the first counterexample, if any
    """
    if T < 1:
        raise ContractError(f"Period must be >= 1, got {T}")
    checked = 0
    for t in window_points(window):
        checked += 1
        here, there = A(t), A(shift(t, T))
        same = np.array_equal(here, there) if A.exact else np.allclose(here, there, rtol=0.0,
                                                                       atol=PERIODICITY_TOLERANCE)
        if not same:
            logger.warning(f"Provider is not {T}-diagonal-periodic: counterexample at ({t.to_string()})")
            return PeriodicityReport(T, window, checked, t)
    return PeriodicityReport(T, window, checked)


def tilde_A(A: LatticeProvider, T: int, t: Sequence[int]) -> np.ndarray:
    """One period of coefficients: A(t + (T-1) 1) ... A(t + 1) A(t)."""
    index = check_dimension(t, A.m)
    return mat_product_chain([A(shift(index, T - 1 - k)) for k in range(T)], n=A.n)


def monodromy(A: LatticeProvider, T: int, t: Sequence[int]) -> np.ndarray:
    """Monodromy matrix D(t) = A~(t - mu(t) 1)."""
    return tilde_A(A, T, diag_decompose(check_dimension(t, A.m)).base)


def floquet_B(A: LatticeProvider, T: int, t: Sequence[int]) -> np.ndarray:
    """
    Principal T-th root of the monodromy at t's diagonal base.

    Raises:
        SingularMatrixError, DefectiveMatrixError: A~ at the base is not
            invertible and diagonalizable
    """
    return matrix_root(monodromy(A, T, t), T)


def floquet_P(source: Union[DiagonalRecurrence, LatticeProvider], T: int, t: Sequence[int]) -> np.ndarray:
    """Periodic factor P(t) = Phi(t) B(t)^{-mu(t)}."""
    A = _provider(source)
    index = check_dimension(t, A.m)
    level = min(index)
    return transfer_matrix(A, index) @ mat_power(floquet_B(A, T, index), -level)


def floquet_multipliers(A: LatticeProvider, T: int, t: Sequence[int]) -> Spectrum:
    """Eigenvalues of D(t); they depend on t only through its diagonal base."""
    return eigenvalues(monodromy(A, T, t))


def verify_proposition_power(A: LatticeProvider, T: int, t: Sequence[int], k: int) -> float:
    """
    Residual of Phi(t + kT 1) = Phi(t) D(t)^k.

    The left side is a direct product chain, the right side uses the monodromy
    power, so the two sides share no intermediate results.

    Returns:
        Relative Frobenius residual
    """
    if k < 1:
        raise ContractError(f"Proposition check needs k >= 1, got {k}")
    index = check_dimension(t, A.m)
    left = transfer_matrix(A, shift(index, k * T))
    right = transfer_matrix(A, index) @ mat_power(monodromy(A, T, index), k)
    return frobenius_residual(left, right)


class FloquetRecord:
    """Per-diagonal-base Floquet data."""

    __slots__ = ("base", "monodromy", "root", "multipliers")

    def __init__(self, base: MultiIndex, monodromy: np.ndarray, root: np.ndarray, multipliers: Spectrum):
        self.base = base
        self.monodromy = monodromy
        self.root = root
        self.multipliers = multipliers

    def to_dict(self) -> Dict[str, Any]:
        return {
            "base": list(self.base),
            "monodromy": np.real(self.monodromy).tolist(),
            "multipliers": self.multipliers.to_dict(),
            "spectral_radius": self.multipliers.spectral_radius,
        }


class FloquetDecomposition:
    """
    Cached Floquet data of a T-diagonal-periodic coefficient provider.

    D, B and the multipliers are stored per diagonal base, so every point on a
    diagonal shares one record. Caches are filled by the constructing thread
    and only read afterwards.
    """

    def __init__(self, coefficients: LatticeProvider, period: int,
                 verify_window: Optional[Sequence[int]] = None):
        """
        Initialize the decomposition.

        Args:
            coefficients: Provider of invertible A(t)
            period: Diagonal period T
            verify_window: When given, periodicity is checked on this window

        Raises:
            PeriodicityError: the provider fails the periodicity check
        """
        if period < 1:
            raise ContractError(f"Period must be >= 1, got {period}")
        self.coefficients = coefficients
        self.period = period
        self.periodicity: Optional[PeriodicityReport] = None
        if verify_window is not None:
            self.periodicity = check_diagonal_periodicity(coefficients, period, verify_window)
            if not self.periodicity.periodic:
                point = self.periodicity.counterexample
                raise PeriodicityError(
                    f"Coefficients are not {period}-diagonal-periodic at ({point.to_string()})", point
                )
        self._records: Dict[MultiIndex, FloquetRecord] = {}
        self._periodic_factors: Dict[MultiIndex, np.ndarray] = {}

    @property
    def m(self) -> int:
        return self.coefficients.m

    @property
    def n(self) -> int:
        return self.coefficients.n

    def record(self, t: Sequence[int]) -> FloquetRecord:
        base = diag_decompose(check_dimension(t, self.m)).base
        if base not in self._records:
            D = tilde_A(self.coefficients, self.period, base)
            B = matrix_root(D, self.period)
            self._records[base] = FloquetRecord(base, D, B, eigenvalues(D))
            logger.debug(f"Floquet record built for base ({base.to_string()})")
        return self._records[base]

    @property
    def records(self) -> List[FloquetRecord]:
        return [self._records[base] for base in sorted(self._records)]

    def monodromy(self, t: Sequence[int]) -> np.ndarray:
        return self.record(t).monodromy

    def root(self, t: Sequence[int]) -> np.ndarray:
        return self.record(t).root

    def multipliers(self, t: Sequence[int]) -> Spectrum:
        return self.record(t).multipliers

    def is_stable(self, t: Sequence[int]) -> bool:
        """True when every multiplier on t's diagonal has modulus < 1."""
        return self.multipliers(t).is_stable()

    def periodic_factor(self, t: Sequence[int]) -> np.ndarray:
        index = check_dimension(t, self.m)
        if index not in self._periodic_factors:
            B = self.root(index)
            self._periodic_factors[index] = (
                transfer_matrix(self.coefficients, index) @ mat_power(B, -min(index))
            )
        return self._periodic_factors[index]

    def root_provider(self) -> FunctionProvider:
        """B(t) as a coefficient provider, for the reduced recurrence y(t+1) = B(t) y(t)."""
        return FunctionProvider(self.m, (self.n, self.n), self.root, period=1, label="floquet-root")

    def build(self, window: Sequence[int]) -> "FloquetDecomposition":
        """Fill the caches for every diagonal base and point of the window."""
        for base in window_bases(window):
            self.record(base)
        for t in window_points(window):
            self.periodic_factor(t)
        logger.info(f"Floquet decomposition built: {len(self._records)} diagonal base(s), window {tuple(window)}")
        return self

    def residuals(self, window: Sequence[int], powers: Sequence[int] = (1, 2, 3)) -> Dict[str, float]:
        """
        Max residuals of the decomposition identities on a window.

        Returns:
            Dictionary with ``root_power`` (B^T = D), ``reconstruction``
            (Phi = P B^mu), ``periodicity`` (P(t + T 1) = P(t)) and
            ``proposition`` (Phi(t + kT 1) = Phi(t) D^k)
        """
        result = {"root_power": 0.0, "reconstruction": 0.0, "periodicity": 0.0, "proposition": 0.0}
        for t in window_points(window):
            record = self.record(t)
            level = min(t)
            result["root_power"] = max(result["root_power"], frobenius_residual(
                mat_power(record.root, self.period), record.monodromy))
            P = self.periodic_factor(t)
            phi = transfer_matrix(self.coefficients, t)
            result["reconstruction"] = max(result["reconstruction"], frobenius_residual(
                P @ mat_power(record.root, level), phi))
            shifted = shift(t, self.period)
            shifted_P = transfer_matrix(self.coefficients, shifted) @ mat_power(self.root(shifted),
                                                                                -min(shifted))
            result["periodicity"] = max(result["periodicity"], frobenius_residual(shifted_P, P))
            for k in powers:
                result["proposition"] = max(result["proposition"],
                                            verify_proposition_power(self.coefficients, self.period, t, k))
        return result

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "period": self.period,
            "bases": [record.to_dict() for record in self.records],
        }
        if self.periodicity is not None:
            result["periodicity"] = self.periodicity.to_dict()
        return result


def transport_solution(rec_x: Union[DiagonalRecurrence, LatticeProvider], T: int, field: SolutionField,
                       direction: str = "forward", tol: float = FLOQUET_TOLERANCE,
                       decomposition: Optional[FloquetDecomposition] = None) -> SolutionField:
    """
    Map solutions between x(t+1) = A(t) x(t) and y(t+1) = B(t) y(t).

    Args:
        rec_x: The original recurrence (or its coefficient provider)
        T: Diagonal period
        field: A y-solution (forward) or an x-solution (inverse)
        direction: ``forward`` computes x = P y, ``inverse`` computes y = P^{-1} x
        tol: Residual tolerance for the input and output recurrence checks
        decomposition: Reuse cached Floquet data

    Returns:
        Transported field, verified against the target recurrence

    Raises:
        ContractError: the input field does not solve its own recurrence
        NumericFailure: the transported field misses the target recurrence by more than tol
    """
    A = _provider(rec_x)
    if direction not in ("forward", "inverse"):
        raise ContractError(f"Unknown transport direction {direction!r}")
    floquet = decomposition or FloquetDecomposition(A, T)
    B = floquet.root_provider()
    source, target = (B, A) if direction == "forward" else (A, B)

    residual = field.recurrence_residual(source)
    if residual > tol:
        raise ContractError(
            f"Input field violates its {'reduced' if direction == 'forward' else 'original'} recurrence "
            f"(residual {residual:.3e})"
        )
    if direction == "forward":
        result = field.map(lambda t, value: floquet.periodic_factor(t) @ value)
    else:
        result = field.map(lambda t, value: mat_inverse(floquet.periodic_factor(t)) @ value)
    output_residual = result.recurrence_residual(target)
    logger.debug(f"Transport {direction}: output residual {output_residual:.3e}")
    if output_residual > tol:
        raise NumericFailure(f"Transported field residual {output_residual:.3e} exceeds {tol:.1e}")
    return result
