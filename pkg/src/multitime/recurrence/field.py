"""
Multitime - Solution Fields

A SolutionField is a dense grid of n-vectors over a window [0, w1) x ... x
[0, wm). Fields export to CSV with header ``t1,...,tm,component,value`` (plus
``imag`` for complex fields), rows in lexicographic t order.
"""

import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from multitime.core.errors import DimensionMismatchError
from multitime.core.lattice import MultiIndex, as_index, in_window, shift, window_points

logger = logging.getLogger(__name__)


def format_number(value) -> str:
    """Shortest round-trip decimal text for a real number."""
    return repr(float(value))


class SolutionField:
    """Materialized solution x(t) on a finite window."""

    def __init__(self, window: Sequence[int], values: np.ndarray):
        """
        Initialize a field.

        Args:
            window: Per-axis exclusive upper bounds
            values: Array of shape window + (n,)
        """
        self.window = tuple(int(w) for w in window)
        values = np.asarray(values)
        if values.shape[:-1] != self.window:
            raise DimensionMismatchError(f"Field values of shape {values.shape} do not match window {self.window}")
        self.values = values

    @classmethod
    def empty(cls, window: Sequence[int], n: int, dtype=float) -> "SolutionField":
        return cls(window, np.zeros(tuple(int(w) for w in window) + (n,), dtype=dtype))

    @property
    def m(self) -> int:
        return len(self.window)

    @property
    def n(self) -> int:
        return self.values.shape[-1]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def __getitem__(self, t: Sequence[int]) -> np.ndarray:
        return self.values[tuple(as_index(t))]

    def __setitem__(self, t: Sequence[int], value) -> None:
        self.values[tuple(as_index(t))] = value

    def points(self):
        return window_points(self.window)

    def component(self, index: int) -> "SolutionField":
        """Scalar field of one component, e.g. Y from a (Y, C) field."""
        return SolutionField(self.window, self.values[..., index:index + 1])

    def map(self, transform: Callable[[MultiIndex, np.ndarray], np.ndarray]) -> "SolutionField":
        """Apply a pointwise transformation t, x(t) -> x'(t)."""
        first = np.asarray(transform(MultiIndex([0] * self.m), self.values[(0,) * self.m]))
        dtype = np.result_type(first, self.values)
        result = np.zeros(self.window + first.shape, dtype=dtype)
        for t in self.points():
            result[tuple(t)] = transform(t, self.values[tuple(t)])
        return SolutionField(self.window, result)

    def max_difference(self, other: "SolutionField") -> float:
        """Max entrywise difference relative to max(1, |other|)."""
        if self.values.shape != other.values.shape:
            raise DimensionMismatchError(f"Field shapes differ: {self.values.shape} vs {other.values.shape}")
        if not self.values.size:
            return 0.0
        scale = np.maximum(np.abs(other.values), 1.0)
        return float(np.max(np.abs(self.values - other.values) / scale))

    def allclose(self, other: "SolutionField", rtol: float = 1e-9, atol: float = 1e-12) -> bool:
        return self.values.shape == other.values.shape and bool(
            np.allclose(self.values, other.values, rtol=rtol, atol=atol)
        )

    def recurrence_residual(self, coefficients, forcing=None) -> float:
        """
        Max residual of x(t+1) = A(t) x(t) + b(t) over interior window points.

        Residuals are relative to max(1, |x(t+1)|).
        """
        worst = 0.0
        for t in self.points():
            nxt = shift(t, 1)
            if not in_window(nxt, self.window):
                continue
            predicted = coefficients(t) @ self.values[tuple(t)]
            if forcing is not None:
                predicted = predicted + forcing(t)
            actual = self.values[tuple(nxt)]
            residual = float(np.max(np.abs(actual - predicted)) / max(1.0, float(np.max(np.abs(actual)))))
            worst = max(worst, residual)
        return worst

    def negative_points(self, component: int = 0, tol: float = 0.0) -> List[MultiIndex]:
        """Points where the real part of one component is below -tol."""
        return [t for t in self.points() if float(np.real(self.values[tuple(t)][component])) < -tol]

    def to_frame(self) -> pd.DataFrame:
        """Long-format table in lexicographic t order, values as round-trip text."""
        rows: List[Dict[str, str]] = []
        complex_values = self.is_complex
        for t in self.points():
            vector = self.values[tuple(t)]
            for component in range(self.n):
                row = {f"t{axis + 1}": str(value) for axis, value in enumerate(t)}
                row["component"] = str(component)
                row["value"] = format_number(np.real(vector[component]))
                if complex_values:
                    row["imag"] = format_number(np.imag(vector[component]))
                rows.append(row)
        columns = [f"t{axis + 1}" for axis in range(self.m)] + ["component", "value"]
        if complex_values:
            columns.append("imag")
        return pd.DataFrame(rows, columns=columns)

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False)
        logger.info(f"Wrote field CSV: {path}")
        return path

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "SolutionField":
        """Re-import a field written by :meth:`to_csv`."""
        frame = pd.read_csv(path, float_precision="round_trip")
        axes = [column for column in frame.columns if column.startswith("t") and column[1:].isdigit()]
        window = tuple(int(frame[axis].max()) + 1 for axis in axes)
        n = int(frame["component"].max()) + 1
        complex_values = "imag" in frame.columns
        values = np.zeros(window + (n,), dtype=complex if complex_values else float)
        for row in frame.itertuples(index=False):
            record = row._asdict()
            index = tuple(int(record[axis]) for axis in axes) + (int(record["component"]),)
            value = float(record["value"])
            if complex_values:
                value = complex(value, float(record["imag"]))
            values[index] = value
        return cls(window, values)

    def __repr__(self) -> str:
        return f"SolutionField(window={self.window}, n={self.n})"
