"""
Shared fixtures for the multitime test suite.
"""

import json
from pathlib import Path
from typing import Any, Callable, Dict, Sequence

import numpy as np
import pytest

from multitime.recurrence.boundary import BoundaryData
from multitime.recurrence.providers import ConstantProvider, PeriodicTableProvider
from multitime.recurrence.solver import DiagonalRecurrence

SEED = 20140818


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(SEED)


@pytest.fixture
def make_recurrence(rng) -> Callable[..., DiagonalRecurrence]:
    """
    Factory for random recurrences with periodic-table coefficients.

    Boundaries are tabulated from one random array over the window, so they
    are compatible by construction.
    """

    def build(m: int, n: int, window: Sequence[int], periods: Sequence[int] = None,
              forced: bool = True) -> DiagonalRecurrence:
        periods = tuple(periods or (2,) * m)
        table = rng.uniform(-1.0, 1.0, size=periods + (n, n))
        coefficients = PeriodicTableProvider(table, periods)
        forcing = None
        if forced:
            forcing = PeriodicTableProvider(rng.uniform(-1.0, 1.0, size=periods + (n,)), periods)
        grid = rng.uniform(-1.0, 1.0, size=tuple(window) + (n,))
        boundary = BoundaryData.from_function(m, n, window, lambda t: grid[tuple(t)])
        return DiagonalRecurrence(coefficients, boundary, forcing)

    return build


@pytest.fixture
def constant_boundary() -> Callable[..., BoundaryData]:
    def build(m: int, n: int, window: Sequence[int], value: Any, layers=(0,)) -> BoundaryData:
        vector = np.reshape(np.asarray(value, dtype=float), (n,))
        return BoundaryData.from_function(m, n, window, lambda t: vector, layers=layers)

    return build


@pytest.fixture
def scalar_recurrence(constant_boundary) -> Callable[..., DiagonalRecurrence]:
    """x(t+1) = a x(t) + b with a constant boundary value."""

    def build(a: float, b: float, f: float, m: int = 2, window=(6, 6)) -> DiagonalRecurrence:
        return DiagonalRecurrence(ConstantProvider(m, [[a]]), constant_boundary(m, 1, window, f),
                                  ConstantProvider(m, [b]))

    return build


@pytest.fixture
def write_config(tmp_path) -> Callable[[Dict[str, Any], str], Path]:
    def write(data: Dict[str, Any], name: str = "job.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return write
