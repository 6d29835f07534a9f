"""
Multitime - Diagonal Recurrence Solver

This module defines linear discrete multitime diagonal recurrences

    x(t + 1) = A(t) x(t) + b(t),   x(t)|_{t^beta = 0} = f_beta,

and solves them two independent ways: by the explicit product-plus-sum formula
(:func:`solve_explicit`) and by forward iteration over the lattice
(:func:`solve_iterative`). It also computes the fundamental (transfer) matrix
Phi(t) = A(t-1) A(t-2) ... A(t - mu(t) 1), with Phi = I on the faces.
"""

import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from multitime.core.algebra import frobenius_residual, identity, mat_product_chain
from multitime.core.errors import ContractError, DimensionMismatchError
from multitime.core.lattice import (
    MultiIndex,
    check_dimension,
    diag_decompose,
    diagonal_points,
    in_window,
    shift,
    window_bases,
    window_points,
)
from multitime.recurrence.boundary import BoundaryData
from multitime.recurrence.field import SolutionField
from multitime.recurrence.providers import LatticeProvider, zero_forcing

logger = logging.getLogger(__name__)

SWEEP_ORDERS = ("level", "lexicographic", "diagonal")


class DiagonalRecurrence:
    """A diagonal recurrence with coefficients, forcing and boundary data."""

    def __init__(self, coefficients: LatticeProvider, boundary: BoundaryData,
                 forcing: Optional[LatticeProvider] = None):
        """
        Initialize the recurrence.

        Args:
            coefficients: Provider of n x n matrices A(t)
            boundary: Face functions f_beta (layer 0)
            forcing: Provider of n-vectors b(t); zero when omitted
        """
        m = coefficients.m
        n = coefficients.n
        if m < 2:
            raise ContractError(f"Diagonal recurrences need m >= 2, got m={m}")
        if coefficients.value_shape != (n, n):
            raise DimensionMismatchError(f"Coefficients must be square, got {coefficients.value_shape}")
        forcing = forcing if forcing is not None else zero_forcing(m, n)
        if forcing.m != m or forcing.value_shape != (n,):
            raise DimensionMismatchError(
                f"Forcing has m={forcing.m}, shape {forcing.value_shape}; expected m={m}, shape ({n},)"
            )
        if boundary.m != m or boundary.n != n:
            raise DimensionMismatchError(
                f"Boundary has m={boundary.m}, n={boundary.n}; expected m={m}, n={n}"
            )
        self.m = m
        self.n = n
        self.coefficients = coefficients
        self.forcing = forcing
        self.boundary = boundary

    @property
    def homogeneous(self) -> bool:
        return self.forcing.is_zero

    @property
    def dtype(self):
        origin = MultiIndex([0] * self.m)
        samples = [self.coefficients(origin), self.forcing(origin)]
        samples.extend(table.values for table in self.boundary.tables)
        return np.result_type(*samples, np.float64)

    def __repr__(self) -> str:
        return f"DiagonalRecurrence(m={self.m}, n={self.n}, coefficients={self.coefficients.kind})"


def transfer_matrix(coefficients: LatticeProvider, t: Sequence[int]) -> np.ndarray:
    """
    Phi(t) = prod_{k=1}^{mu(t)} A(t - k 1) from a bare coefficient provider.

    Args:
        coefficients: Provider of A(t)
        t: Lattice point

    Returns:
        n x n matrix, the identity when mu(t) = 0
    """
    index = check_dimension(t, coefficients.m)
    level = min(index)
    factors = [coefficients(shift(index, -k)) for k in range(1, level + 1)]
    return mat_product_chain(factors, n=coefficients.n)


def fundamental_matrix(rec: DiagonalRecurrence, t: Sequence[int]) -> np.ndarray:
    """Fundamental matrix Phi(t) of the recurrence."""
    return transfer_matrix(rec.coefficients, t)


def solve_explicit(rec: DiagonalRecurrence, t: Sequence[int]) -> np.ndarray:
    """
    Evaluate x(t) by the closed product-plus-sum formula.

    For mu(t) = 0 the boundary is read directly. Otherwise, with base
    t - mu(t) 1 on face beta,

        x(t) = A(t-1) ... A(t - mu 1) f_beta(base)
               + sum_{k=1}^{mu} A(t-1) ... A(t-(k-1) 1) b(t - k 1),

    the prefix products being built incrementally (O(mu) multiplies).

    Raises:
        BoundaryUnavailableError: the base value is outside a strict table
    """
    index = check_dimension(t, rec.m)
    decomposition = diag_decompose(index)
    if decomposition.level == 0:
        return np.array(rec.boundary.value(index))

    initial = rec.boundary.value(decomposition.base)
    prefix = identity(rec.n, dtype=rec.dtype)
    accumulated = np.zeros(rec.n, dtype=rec.dtype)
    forced = not rec.homogeneous
    for k in range(1, decomposition.level + 1):
        point = shift(index, -k)
        if forced:
            accumulated = accumulated + prefix @ rec.forcing(point)
        prefix = prefix @ rec.coefficients(point)
    return prefix @ initial + accumulated


def solve_level_one(rec: DiagonalRecurrence, t: Sequence[int]) -> np.ndarray:
    """The single-factor formula x(t) = A(t-1) f_beta(t-1) + b(t-1) for mu(t) = 1."""
    index = check_dimension(t, rec.m)
    if min(index) != 1:
        raise ContractError(f"Level-one formula needs mu(t) = 1, got mu={min(index)} at ({index.to_string()})")
    previous = shift(index, -1)
    return rec.coefficients(previous) @ rec.boundary.value(previous) + rec.forcing(previous)


def solve_homogeneous_via_phi(rec: DiagonalRecurrence, t: Sequence[int]) -> np.ndarray:
    """
    x(t) = Phi(t) f_beta(base) for homogeneous recurrences.

    Raises:
        ContractError: when the forcing is not identically zero
    """
    if not rec.homogeneous:
        raise ContractError("Phi-representation applies to homogeneous recurrences only")
    index = check_dimension(t, rec.m)
    base = diag_decompose(index).base
    return fundamental_matrix(rec, index) @ rec.boundary.value(base)


def _step(rec: DiagonalRecurrence, field: SolutionField, t: MultiIndex) -> None:
    if min(t) == 0:
        field[t] = rec.boundary.value(t)
        return
    previous = shift(t, -1)
    value = rec.coefficients(previous) @ field[previous]
    if not rec.homogeneous:
        value = value + rec.forcing(previous)
    field[t] = value


def _sweep_diagonal(rec: DiagonalRecurrence, field: SolutionField, base: MultiIndex) -> int:
    points = diagonal_points(base, field.window)
    for point in points:
        _step(rec, field, point)
    return len(points)


def solve_iterative(rec: DiagonalRecurrence, window: Sequence[int], order: str = "level",
                    jobs: int = 1) -> SolutionField:
    """
    Fill a window by forward iteration.

    Args:
        rec: Recurrence to solve
        window: Per-axis exclusive bounds
        order: ``level`` sweeps mu = 0, 1, 2, ...; ``lexicographic`` visits
            points in lexicographic order; ``diagonal`` walks each diagonal
            from its base
        jobs: Worker threads for the ``diagonal`` order (diagonals are independent)

    Returns:
        SolutionField over the window
    """
    window = tuple(int(w) for w in window)
    if len(window) != rec.m:
        raise DimensionMismatchError(f"Window {window} has {len(window)} axes, expected {rec.m}")
    if order not in SWEEP_ORDERS:
        raise ContractError(f"Unknown sweep order {order!r}; expected one of {SWEEP_ORDERS}")
    field = SolutionField.empty(window, rec.n, dtype=rec.dtype)

    if order == "level":
        levels: Dict[int, List[MultiIndex]] = defaultdict(list)
        for point in window_points(window):
            levels[min(point)].append(point)
        for level in sorted(levels):
            for point in levels[level]:
                _step(rec, field, point)
    elif order == "lexicographic":
        for point in window_points(window):
            _step(rec, field, point)
    else:
        bases = window_bases(window)
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as executor:
                list(executor.map(lambda base: _sweep_diagonal(rec, field, base), bases))
        else:
            for base in bases:
                _sweep_diagonal(rec, field, base)
    logger.debug(f"Iterative solve filled window {window} ({order} order)")
    return field


def solve_explicit_field(rec: DiagonalRecurrence, window: Sequence[int]) -> SolutionField:
    """Evaluate :func:`solve_explicit` at every window point."""
    window = tuple(int(w) for w in window)
    field = SolutionField.empty(window, rec.n, dtype=rec.dtype)
    for point in window_points(window):
        field[point] = solve_explicit(rec, point)
    return field


def fundamental_residual(coefficients: LatticeProvider, window: Sequence[int]) -> float:
    """
    Check Phi against its defining problem on a window.

    Returns:
        Max relative residual of Phi(t+1) = A(t) Phi(t) and Phi = I on faces
    """
    window = tuple(int(w) for w in window)
    worst = 0.0
    eye = identity(coefficients.n)
    for point in window_points(window):
        phi = transfer_matrix(coefficients, point)
        if min(point) == 0:
            worst = max(worst, frobenius_residual(phi, eye))
        following = shift(point, 1)
        if in_window(following, window):
            worst = max(worst, frobenius_residual(transfer_matrix(coefficients, following),
                                                  coefficients(point) @ phi))
    return worst
