"""
Multitime - Way-Required Recurrences

A two-time recurrence of way required is evaluated along a fixed path: all
t^1 steps first (on the axis t^2 = 0), then all t^2 steps. For constant
linear steps the solution is x(t^1, t^2) = A2^{t^2} A1^{t^1} x0; the order of
the factors matters when A1 and A2 do not commute.
"""

import logging
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from multitime.core.algebra import as_matrix, mat_power
from multitime.core.errors import DimensionMismatchError
from multitime.core.lattice import MultiIndex, check_dimension

logger = logging.getLogger(__name__)


class AffineStep:
    """The step map x -> M x + c."""

    def __init__(self, matrix, offset=None):
        self.matrix = as_matrix(matrix)
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n):
            raise DimensionMismatchError(f"Step matrix must be square, got {self.matrix.shape}")
        self.offset = np.zeros(n) if offset is None else np.asarray(offset, dtype=float).reshape(n)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def linear(self) -> bool:
        return not np.any(self.offset)

    def __call__(self, t: MultiIndex, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x + self.offset


StepMap = Union[AffineStep, Callable[[MultiIndex, np.ndarray], np.ndarray]]


class PathRecurrence:
    """Step maps F1 (advance t^1 on t^2 = 0), F2 (advance t^2) and x(0, 0) = x0."""

    def __init__(self, step1: StepMap, step2: StepMap, x0):
        self.x0 = np.asarray(x0, dtype=float).reshape(-1)
        for step in (step1, step2):
            if isinstance(step, AffineStep) and step.n != self.x0.size:
                raise DimensionMismatchError(f"Step acts on {step.n}-vectors but x0 has {self.x0.size} entries")
        self.steps = (step1, step2)

    @property
    def n(self) -> int:
        return self.x0.size


def _walk(steps: Sequence[StepMap], x0: np.ndarray, t: MultiIndex) -> np.ndarray:
    state = np.array(x0)
    position = [0] * len(t)
    for axis, count in enumerate(t):
        for _ in range(count):
            state = steps[axis](MultiIndex(position), state)
            position[axis] += 1
    return state


def solve_path(rec: PathRecurrence, t: Sequence[int]) -> np.ndarray:
    """
    Apply F1 exactly t^1 times from x0, then F2 exactly t^2 times.

    Args:
        rec: Path recurrence
        t: Target point in N^2

    Returns:
        x(t) along the prescribed way
    """
    index = check_dimension(t, 2)
    return _walk(rec.steps, rec.x0, index)


def solve_path_chained(steps: Sequence[StepMap], x0, t: Sequence[int]) -> np.ndarray:
    """
    m-axis way-required evaluation: advance axis 1 fully, then axis 2, and so on.

    This extends the two-time definition to m >= 2 in axis index order.
    """
    index = check_dimension(t, len(steps))
    return _walk(steps, np.asarray(x0, dtype=float).reshape(-1), index)


def closed_form_constant(A1, A2, x0, t: Sequence[int]) -> np.ndarray:
    """
    x(t^1, t^2) = A2^{t^2} A1^{t^1} x0 by repeated squaring.

    Raises:
        DimensionMismatchError: matrices or x0 of incompatible sizes
    """
    first, second = as_matrix(A1), as_matrix(A2)
    vector = np.asarray(x0, dtype=float).reshape(-1)
    if first.shape != second.shape or first.shape != (vector.size, vector.size):
        raise DimensionMismatchError(
            f"Way-required sizes differ: A1 {first.shape}, A2 {second.shape}, x0 ({vector.size},)"
        )
    index = check_dimension(t, 2)
    return mat_power(second, index[1]) @ (mat_power(first, index[0]) @ vector)
