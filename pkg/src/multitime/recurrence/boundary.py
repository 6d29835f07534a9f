"""
Multitime - Boundary Data

This module provides the face functions f_beta that seed diagonal recurrences.
Each face function is stored as a finite table over a rectangular window of
N^(m-1) together with an extension policy:

- ``strict``: reading outside the table is an error (default)
- ``zero``: values outside the table are zero

First-order problems use tables on the faces t^beta = 0 (layer 0).
Second-order problems add layer-1 tables on the faces t^beta = 1.
"""

import itertools
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from multitime.core.errors import (
    BoundaryUnavailableError,
    ConfigValidationError,
    DimensionMismatchError,
    IncompatibleBoundaryError,
)
from multitime.core.lattice import MultiIndex, as_index, embed, project

logger = logging.getLogger(__name__)

POLICIES = ("strict", "zero")


class FaceTable:
    """Values of f_beta on one face and layer, over a window of N^(m-1)."""

    def __init__(self, face: int, layer: int, values):
        """
        Initialize a face table.

        Args:
            face: 0-based index beta of the fixed coordinate
            layer: Value of the fixed coordinate (0 or 1)
            values: Array of shape (w_1, ..., w_{m-1}, n)
        """
        array = np.array(values, dtype=complex if np.iscomplexobj(values) else float)
        if array.ndim < 2:
            raise DimensionMismatchError(f"Face table needs shape (window..., n), got {array.shape}")
        array.setflags(write=False)
        self.face = int(face)
        self.layer = int(layer)
        self.values = array

    @property
    def window(self) -> Tuple[int, ...]:
        return self.values.shape[:-1]

    @property
    def n(self) -> int:
        return self.values.shape[-1]

    def covers(self, coords: Sequence[int]) -> bool:
        return all(c < w for c, w in zip(coords, self.window))

    def lookup(self, coords: Sequence[int]) -> np.ndarray:
        return self.values[tuple(coords)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "face": self.face + 1,
            "layer": self.layer,
            "values": self.values.real.tolist(),
        }


class Violation:
    """One disagreement between two faces at a shared lattice point."""

    def __init__(self, first: Tuple[int, int], second: Tuple[int, int], point: MultiIndex,
                 first_value: np.ndarray, second_value: np.ndarray):
        self.first = first
        self.second = second
        self.point = point
        self.first_value = first_value
        self.second_value = second_value

    def describe(self) -> str:
        (fa, la), (fb, lb) = self.first, self.second
        return (f"face t{fa + 1}={la} and face t{fb + 1}={lb} disagree at "
                f"({self.point.to_string()}): {self.first_value.tolist()} != {self.second_value.tolist()}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "faces": [{"face": self.first[0] + 1, "layer": self.first[1]},
                      {"face": self.second[0] + 1, "layer": self.second[1]}],
            "point": list(self.point),
            "values": [np.real(self.first_value).tolist(), np.real(self.second_value).tolist()],
        }


class CompatibilityReport:
    """Result of :func:`check_compatibility`; violations are entries, not errors."""

    def __init__(self, violations: List[Violation], checked_points: int):
        self.violations = violations
        self.checked_points = checked_points

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "checked_points": self.checked_points,
            "violations": [v.to_dict() for v in self.violations],
        }


class BoundaryData:
    """The face functions f_1, ..., f_m (and optional layer-1 faces)."""

    def __init__(self, m: int, n: int, tables: Sequence[FaceTable], policy: str = "strict"):
        if policy not in POLICIES:
            raise ConfigValidationError(f"Unknown extension policy {policy!r}; expected one of {POLICIES}")
        for table in tables:
            if not 0 <= table.face < m:
                raise DimensionMismatchError(f"Face index {table.face + 1} outside 1..{m}")
            if len(table.window) != m - 1:
                raise DimensionMismatchError(
                    f"Face t{table.face + 1} table window has {len(table.window)} axes, expected {m - 1}"
                )
            if table.n != n:
                raise DimensionMismatchError(f"Face t{table.face + 1} stores {table.n}-vectors, expected {n}")
        self.m = m
        self.n = n
        self.policy = policy
        self.tables = sorted(tables, key=lambda table: (table.layer, table.face))

    @property
    def layers(self) -> Tuple[int, ...]:
        return tuple(sorted({table.layer for table in self.tables}))

    def table(self, face: int, layer: int = 0) -> Optional[FaceTable]:
        for table in self.tables:
            if table.face == face and table.layer == layer:
                return table
        return None

    def value(self, t: Sequence[int]) -> np.ndarray:
        """
        Read the boundary value at a point lying on some stored face.

        Raises:
            BoundaryUnavailableError: no table contains the point under the strict policy
        """
        index = as_index(t)
        covering = [table for table in self.tables if index[table.face] == table.layer]
        if not covering:
            raise BoundaryUnavailableError(f"({index.to_string()}) lies on no stored boundary face", index)
        for table in covering:
            coords = project(index, table.face)
            if table.covers(coords):
                return table.lookup(coords)
        if self.policy == "zero":
            return np.zeros(self.n)
        raise BoundaryUnavailableError(f"Boundary value at ({index.to_string()}) is outside the tables", index)

    def face_value(self, face: int, coords: Sequence[int], layer: int = 0) -> np.ndarray:
        """Evaluate f_face at the (m-1)-dimensional argument coords."""
        return self.value(embed(coords, face, layer))

    @classmethod
    def from_function(cls, m: int, n: int, window: Sequence[int], function: Callable[[MultiIndex], Any],
                      layers: Sequence[int] = (0,), policy: str = "strict") -> "BoundaryData":
        """
        Tabulate a function of the full lattice point on every face.

        Args:
            m: Lattice dimension
            n: Vector size
            window: Per-axis bounds in N^m; face tables cover the window faces
            function: Callable returning an n-vector (or scalar when n == 1)
            layers: Face layers to tabulate
            policy: Extension policy

        Returns:
            BoundaryData whose tables agree on shared points by construction
        """
        tables = []
        for layer in layers:
            for face in range(m):
                face_window = tuple(int(w) for i, w in enumerate(window) if i != face)
                values = np.zeros(face_window + (n,), dtype=complex)
                for coords in itertools.product(*(range(w) for w in face_window)):
                    values[coords] = np.reshape(np.asarray(function(embed(coords, face, layer))), (n,))
                if not np.any(values.imag):
                    values = values.real
                tables.append(FaceTable(face, layer, values))
        return cls(m, n, tables, policy)

    @classmethod
    def from_config(cls, spec: Dict[str, Any], m: int, n: int, window: Optional[Sequence[int]] = None) -> "BoundaryData":
        """
        Build boundary data from a config block.

        Supported forms::

            {"policy": "strict", "faces": [{"face": 1, "layer": 0, "values": [...]}, ...]}
            {"policy": "strict", "constant": [c1, ..., cn], "layers": [0]}
        """
        policy = spec.get("policy", "strict")
        if "constant" in spec:
            if window is None:
                raise ConfigValidationError("constant boundary requires a window")
            constant = np.reshape(np.asarray(spec["constant"], dtype=float), (n,))
            layers = spec.get("layers", [0])
            return cls.from_function(m, n, window, lambda t: constant, layers=layers, policy=policy)
        if "faces" not in spec:
            raise ConfigValidationError("boundary block requires 'faces' or 'constant'")
        tables = []
        for entry in spec["faces"]:
            try:
                face = int(entry["face"]) - 1
                layer = int(entry.get("layer", 0))
                values = np.asarray(entry["values"], dtype=float)
            except (KeyError, TypeError, ValueError) as e:
                raise ConfigValidationError(f"Malformed boundary face entry: {e}")
            if values.ndim == m - 1:
                values = values[..., np.newaxis]
            tables.append(FaceTable(face, layer, values))
        return cls(m, n, tables, policy)

    def to_dict(self) -> Dict[str, Any]:
        return {"policy": self.policy, "faces": [table.to_dict() for table in self.tables]}


def _shared_points(a: FaceTable, b: FaceTable, m: int):
    """Lattice points on both faces that lie inside both table windows."""
    full_a = list(embed(a.window, a.face, 0))
    full_b = list(embed(b.window, b.face, 0))
    ranges = []
    for axis in range(m):
        if axis == a.face:
            ranges.append([a.layer])
        elif axis == b.face:
            ranges.append([b.layer])
        else:
            ranges.append(range(min(full_a[axis], full_b[axis])))
    for point in itertools.product(*ranges):
        index = MultiIndex(point)
        if a.covers(project(index, a.face)) and b.covers(project(index, b.face)):
            yield index


def check_compatibility(boundary: BoundaryData, atol: float = 1e-12) -> CompatibilityReport:
    """
    Check that faces agree where they meet.

    For every pair of tables on distinct faces alpha, beta this compares
    f_alpha restricted to t^beta = layer_beta with f_beta restricted to
    t^alpha = layer_alpha, on the points both tables store. Layer-1 pairs
    cover the second-order conditions between layers.

    Args:
        boundary: Boundary data to check
        atol: Absolute tolerance for floating-point tables

    Returns:
        CompatibilityReport listing every offending point
    """
    violations: List[Violation] = []
    checked = 0
    for a, b in itertools.combinations(boundary.tables, 2):
        if a.face == b.face:
            continue
        for point in _shared_points(a, b, boundary.m):
            checked += 1
            va = a.lookup(project(point, a.face))
            vb = b.lookup(project(point, b.face))
            if not np.allclose(va, vb, rtol=0.0, atol=atol):
                violations.append(Violation((a.face, a.layer), (b.face, b.layer), point, va, vb))
    if violations:
        logger.warning(f"Boundary compatibility failed with {len(violations)} violation(s)")
    return CompatibilityReport(violations, checked)


def require_compatible(boundary: BoundaryData, atol: float = 1e-12) -> CompatibilityReport:
    """Like :func:`check_compatibility` but raise on the first failing report."""
    report = check_compatibility(boundary, atol=atol)
    if not report.passed:
        raise IncompatibleBoundaryError(report.violations[0].describe(), report)
    return report
