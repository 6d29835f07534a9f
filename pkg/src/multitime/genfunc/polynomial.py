"""
Multitime - Bivariate Polynomials

Sparse polynomials in x, y with exact (Fraction) or float coefficients. Terms
are stored as a mapping (i, j) -> coefficient with zero coefficients pruned;
listings use graded lexicographic order on exponent pairs.
"""

import logging
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from multitime.core.errors import GeneratingFunctionError

logger = logging.getLogger(__name__)

Exponent = Tuple[int, int]
Coefficient = Union[int, float, Fraction]


def grlex_key(exponent: Exponent) -> Tuple[int, int, int]:
    """Total degree first, then the x exponent."""
    i, j = exponent
    return (i + j, i, j)


def format_coefficient(value: Coefficient) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


class BivariatePolynomial:
    """Sparse polynomial sum c_ij x^i y^j."""

    def __init__(self, terms: Optional[Mapping[Exponent, Coefficient]] = None):
        self._terms: Dict[Exponent, Coefficient] = {}
        for exponent, value in (terms or {}).items():
            i, j = int(exponent[0]), int(exponent[1])
            if i < 0 or j < 0:
                raise GeneratingFunctionError(f"Negative exponent ({i}, {j}) in polynomial")
            if value != 0:
                self._terms[(i, j)] = self._terms.get((i, j), 0) + value
        self._terms = {key: value for key, value in self._terms.items() if value != 0}

    @classmethod
    def constant(cls, value: Coefficient) -> "BivariatePolynomial":
        return cls({(0, 0): value})

    @classmethod
    def monomial(cls, i: int, j: int, value: Coefficient = 1) -> "BivariatePolynomial":
        return cls({(i, j): value})

    @classmethod
    def from_x(cls, coefficients: Iterable[Coefficient], start: int = 0) -> "BivariatePolynomial":
        """Univariate polynomial in x with the first coefficient at x^start."""
        return cls({(start + k, 0): value for k, value in enumerate(coefficients)})

    @classmethod
    def from_y(cls, coefficients: Iterable[Coefficient], start: int = 0) -> "BivariatePolynomial":
        return cls({(0, start + k): value for k, value in enumerate(coefficients)})

    def terms(self) -> List[Tuple[Exponent, Coefficient]]:
        """Nonzero terms in graded lexicographic order."""
        return [(exponent, self._terms[exponent]) for exponent in sorted(self._terms, key=grlex_key)]

    def coefficient(self, i: int, j: int) -> Coefficient:
        return self._terms.get((i, j), 0)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def exact(self) -> bool:
        return all(isinstance(value, (int, Fraction)) for value in self._terms.values())

    def degrees(self) -> Exponent:
        """Max x exponent and max y exponent."""
        if not self._terms:
            return (0, 0)
        return (max(i for i, _ in self._terms), max(j for _, j in self._terms))

    def __add__(self, other: "BivariatePolynomial") -> "BivariatePolynomial":
        result = dict(self._terms)
        for exponent, value in other._terms.items():
            result[exponent] = result.get(exponent, 0) + value
        return BivariatePolynomial(result)

    def __neg__(self) -> "BivariatePolynomial":
        return BivariatePolynomial({exponent: -value for exponent, value in self._terms.items()})

    def __sub__(self, other: "BivariatePolynomial") -> "BivariatePolynomial":
        return self + (-other)

    def __mul__(self, other: Union["BivariatePolynomial", Coefficient]) -> "BivariatePolynomial":
        if not isinstance(other, BivariatePolynomial):
            return BivariatePolynomial({exponent: value * other for exponent, value in self._terms.items()})
        result: Dict[Exponent, Coefficient] = {}
        for (i, j), a in self._terms.items():
            for (k, l), b in other._terms.items():
                key = (i + k, j + l)
                result[key] = result.get(key, 0) + a * b
        return BivariatePolynomial(result)

    __rmul__ = __mul__

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, BivariatePolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self.terms()))

    def evaluate(self, x: Any, y: Any) -> Any:
        return sum((value * x ** i * y ** j for (i, j), value in self._terms.items()), 0)

    def to_grid(self, M: int, N: int, dtype=object) -> np.ndarray:
        """Coefficients c_ij for 0 <= i <= M, 0 <= j <= N; higher terms are dropped."""
        grid = np.zeros((M + 1, N + 1), dtype=dtype)
        if dtype is object:
            grid[...] = Fraction(0)
        for (i, j), value in self._terms.items():
            if i <= M and j <= N:
                grid[i, j] = Fraction(value) if dtype is object else value
        return grid

    def to_list(self) -> List[Dict[str, Any]]:
        return [{"x": i, "y": j, "coeff": format_coefficient(value)} for (i, j), value in self.terms()]

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (i, j), value in self.terms():
            monomial = "*".join(
                factor for factor in (
                    "" if i == 0 else ("x" if i == 1 else f"x^{i}"),
                    "" if j == 0 else ("y" if j == 1 else f"y^{j}"),
                ) if factor
            )
            text = format_coefficient(value)
            parts.append(f"{text}*{monomial}" if monomial else text)
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"BivariatePolynomial({self})"
