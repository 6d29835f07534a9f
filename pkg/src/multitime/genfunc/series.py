"""
Multitime - Truncated Bivariate Power Series

A BivariateSeries holds the coefficients c[m][n], 0 <= m <= M, 0 <= n <= N,
of a formal series in x, y. Coefficient grids are numpy arrays of dtype
``object`` (holding Fractions) for exact work, or float64.
"""

import logging
from fractions import Fraction
from typing import Any, List, Tuple

import numpy as np

from multitime.core.errors import DimensionMismatchError, GeneratingFunctionError
from multitime.genfunc.polynomial import BivariatePolynomial

logger = logging.getLogger(__name__)


class BivariateSeries:
    """Truncated formal power series in x and y."""

    def __init__(self, coefficients: np.ndarray):
        grid = np.asarray(coefficients)
        if grid.ndim != 2:
            raise DimensionMismatchError(f"Series grid must be 2-dimensional, got shape {grid.shape}")
        self.coefficients = grid

    @classmethod
    def zeros(cls, M: int, N: int, exact: bool = True) -> "BivariateSeries":
        if exact:
            grid = np.empty((M + 1, N + 1), dtype=object)
            grid[...] = Fraction(0)
        else:
            grid = np.zeros((M + 1, N + 1))
        return cls(grid)

    @classmethod
    def from_polynomial(cls, polynomial: BivariatePolynomial, M: int, N: int) -> "BivariateSeries":
        if polynomial.exact:
            return cls(polynomial.to_grid(M, N, dtype=object))
        return cls(polynomial.to_grid(M, N, dtype=float))

    @property
    def orders(self) -> Tuple[int, int]:
        return (self.coefficients.shape[0] - 1, self.coefficients.shape[1] - 1)

    @property
    def exact(self) -> bool:
        return self.coefficients.dtype == object

    def __getitem__(self, index: Tuple[int, int]) -> Any:
        return self.coefficients[index]

    def _check_orders(self, other: "BivariateSeries") -> None:
        if self.orders != other.orders:
            raise DimensionMismatchError(f"Series truncation orders differ: {self.orders} vs {other.orders}")

    def _promote(self, other: "BivariateSeries") -> Tuple[np.ndarray, np.ndarray]:
        if self.exact == other.exact:
            return self.coefficients, other.coefficients
        return self.coefficients.astype(float), other.coefficients.astype(float)

    def add(self, other: "BivariateSeries") -> "BivariateSeries":
        self._check_orders(other)
        a, b = self._promote(other)
        return BivariateSeries(a + b)

    def subtract(self, other: "BivariateSeries") -> "BivariateSeries":
        self._check_orders(other)
        a, b = self._promote(other)
        return BivariateSeries(a - b)

    def multiply(self, other: "BivariateSeries") -> "BivariateSeries":
        """Truncated Cauchy product."""
        self._check_orders(other)
        a, b = self._promote(other)
        if len(_nonzero(a)) < len(_nonzero(b)):
            a, b = b, a
        M, N = self.orders
        result = np.zeros_like(a)
        if result.dtype == object:
            result[...] = Fraction(0)
        for k, l in _nonzero(b):
            result[k:, l:] = result[k:, l:] + b[k, l] * a[:M + 1 - k, :N + 1 - l]
        return BivariateSeries(result)

    def divide(self, other: "BivariateSeries") -> "BivariateSeries":
        """
        Truncated quotient self / other.

        Raises:
            GeneratingFunctionError: the divisor's constant term is zero
        """
        self._check_orders(other)
        a, b = self._promote(other)
        constant = b[0, 0]
        if constant == 0:
            raise GeneratingFunctionError("Series division needs a nonzero constant term in the divisor")
        terms = [(k, l) for k, l in _nonzero(b) if (k, l) != (0, 0)]
        M, N = self.orders
        result = np.zeros_like(a)
        for i in range(M + 1):
            for j in range(N + 1):
                value = a[i, j]
                for k, l in terms:
                    if k <= i and l <= j:
                        value = value - b[k, l] * result[i - k, j - l]
                result[i, j] = value / constant
        return BivariateSeries(result)

    def diagonal(self) -> List[Any]:
        return [self.coefficients[k, k] for k in range(min(self.orders) + 1)]

    def to_float(self) -> np.ndarray:
        return self.coefficients.astype(float)

    def equals(self, other: "BivariateSeries", rtol: float = 1e-12) -> bool:
        """Exact cellwise equality for exact series, relative tolerance otherwise."""
        if self.orders != other.orders:
            return False
        if self.exact and other.exact:
            return bool(np.all(self.coefficients == other.coefficients))
        a, b = self.to_float(), other.to_float()
        scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
        return bool(np.max(np.abs(a - b)) <= rtol * scale)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.to_float()))) if self.coefficients.size else 0.0

    def __repr__(self) -> str:
        return f"BivariateSeries(orders={self.orders}, exact={self.exact})"


def _nonzero(grid: np.ndarray) -> List[Tuple[int, int]]:
    return [(k, l) for k in range(grid.shape[0]) for l in range(grid.shape[1]) if grid[k, l] != 0]
