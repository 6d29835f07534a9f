"""
Multitime - Lattice Geometry

This module provides the multi-index geometry of N^m used by diagonal
recurrences: the diagonal level mu(t), the decomposition of a point into its
diagonal base and level, diagonal shifts and window enumeration.
"""

import itertools
import logging
from typing import Iterable, Iterator, List, Sequence, Tuple

from multitime.core.errors import DimensionMismatchError, LatticeDomainError

logger = logging.getLogger(__name__)

UINT64_MAX = 2 ** 64 - 1


class MultiIndex(tuple):
    """
    A discrete multitime t = (t^1, ..., t^m) in N^m.

    Instances are immutable tuples of Python ints, so they hash, compare
    lexicographically and index numpy arrays directly.
    """

    def __new__(cls, components: Iterable[int]) -> "MultiIndex":
        values = tuple(components)
        if not values:
            raise LatticeDomainError("A multi-index needs at least one component", values)
        checked = []
        for value in values:
            if isinstance(value, bool) or int(value) != value:
                raise LatticeDomainError(f"Non-integer component {value!r}", values)
            value = int(value)
            if value < 0:
                raise LatticeDomainError(f"Negative component in {values}", values)
            if value > UINT64_MAX:
                raise LatticeDomainError(f"Component overflow in {values}", values)
            checked.append(value)
        return super().__new__(cls, checked)

    @property
    def m(self) -> int:
        """Number of time components."""
        return len(self)

    @classmethod
    def parse(cls, text: str) -> "MultiIndex":
        """
        Parse the comma-separated form used in CLI flags, e.g. ``"3,1,2"``.

        Args:
            text: Comma-separated non-negative integers

        Returns:
            MultiIndex instance
        """
        try:
            parts = [int(part.strip()) for part in text.split(",")]
        except ValueError:
            raise LatticeDomainError(f"Cannot parse multi-index from {text!r}")
        return cls(parts)

    def to_string(self) -> str:
        """Serialize as comma-separated integers."""
        return ",".join(str(value) for value in self)

    def __repr__(self) -> str:
        return f"MultiIndex({self.to_string()})"


class DiagonalDecomposition:
    """A point written as base + level * 1, where base has a zero component."""

    __slots__ = ("base", "level")

    def __init__(self, base: MultiIndex, level: int):
        self.base = base
        self.level = level

    def reconstruct(self) -> MultiIndex:
        """Return base + level * 1."""
        return shift(self.base, self.level)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiagonalDecomposition):
            return NotImplemented
        return self.base == other.base and self.level == other.level

    def __hash__(self) -> int:
        return hash((self.base, self.level))

    def __repr__(self) -> str:
        return f"DiagonalDecomposition(base={self.base.to_string()}, level={self.level})"


def as_index(t: Sequence[int]) -> MultiIndex:
    """Coerce any integer sequence to a validated MultiIndex."""
    if isinstance(t, MultiIndex):
        return t
    return MultiIndex(t)


def mu(t: Sequence[int]) -> int:
    """Diagonal level: the minimum component of t."""
    return min(as_index(t))


def diag_decompose(t: Sequence[int]) -> DiagonalDecomposition:
    """
    Split t into its diagonal base t - mu(t)*1 and level mu(t).

    Args:
        t: Lattice point

    Returns:
        DiagonalDecomposition with a base on the boundary of N^m
    """
    index = as_index(t)
    level = min(index)
    return DiagonalDecomposition(MultiIndex(value - level for value in index), level)


def diagonal_base(t: Sequence[int]) -> MultiIndex:
    """Shorthand for ``diag_decompose(t).base``."""
    return diag_decompose(t).base


def shift(t: Sequence[int], k: int) -> MultiIndex:
    """
    Compute t + k*1; k may be negative.

    Raises:
        LatticeDomainError: if a component leaves N^m or overflows 64 bits
    """
    index = as_index(t)
    moved = tuple(value + k for value in index)
    if any(value < 0 for value in moved):
        raise LatticeDomainError(f"Shift of {index.to_string()} by {k} leaves N^m", moved)
    if any(value > UINT64_MAX for value in moved):
        raise LatticeDomainError(f"Shift of {index.to_string()} by {k} overflows", moved)
    return MultiIndex(moved)


def same_diagonal(s: Sequence[int], t: Sequence[int]) -> bool:
    """True when s and t differ by an integer multiple of 1."""
    return diagonal_base(s) == diagonal_base(t)


def project(t: Sequence[int], face: int) -> Tuple[int, ...]:
    """Drop component ``face`` (0-based): the argument of a face function f_beta."""
    index = as_index(t)
    return tuple(index[:face]) + tuple(index[face + 1:])


def embed(coords: Sequence[int], face: int, layer: int) -> MultiIndex:
    """Inverse of :func:`project`: insert ``layer`` at position ``face``."""
    coords = tuple(coords)
    return MultiIndex(coords[:face] + (layer,) + coords[face:])


def check_dimension(t: Sequence[int], m: int) -> MultiIndex:
    """Validate that t has exactly m components."""
    index = as_index(t)
    if len(index) != m:
        raise DimensionMismatchError(f"Expected {m} components, got {len(index)} in {index.to_string()}")
    return index


def window_points(window: Sequence[int]) -> Iterator[MultiIndex]:
    """Enumerate [0, w1) x ... x [0, wm) in lexicographic order."""
    for point in itertools.product(*(range(int(bound)) for bound in window)):
        yield MultiIndex(point)


def in_window(t: Sequence[int], window: Sequence[int]) -> bool:
    """True when every component of t lies below the matching window bound."""
    return all(value < bound for value, bound in zip(t, window))


def window_bases(window: Sequence[int]) -> List[MultiIndex]:
    """Diagonal bases (points with a zero component) inside the window."""
    return [point for point in window_points(window) if min(point) == 0]


def diagonal_points(base: Sequence[int], window: Sequence[int]) -> List[MultiIndex]:
    """Points base, base+1, ... that stay inside the window."""
    base = as_index(base)
    steps = min(int(bound) - value for value, bound in zip(base, window))
    return [shift(base, k) for k in range(max(steps, 0))]
