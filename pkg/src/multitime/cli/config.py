"""
Multitime - Job Configuration

This module parses and validates the JSON job configuration consumed by the
``multitime`` command. A configuration is one JSON document; blocks that
hold bulky data (boundary tables, generating-function layers) may instead be
given as a path to a separate JSON file, resolved relative to the
configuration file.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from multitime.core.errors import ConfigParseError, ConfigValidationError, GeneratingFunctionError
from multitime.genfunc.rational import EXPANSION_CAP, BoundaryLayers, parse_number
from multitime.models.hicks import HicksParams
from multitime.recurrence.boundary import BoundaryData, require_compatible
from multitime.recurrence.providers import LatticeProvider, provider_from_config
from multitime.recurrence.solver import SWEEP_ORDERS
from multitime.recurrence.way_required import AffineStep, PathRecurrence

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {"rtol": 1e-9, "atol": 1e-12}


def load_json(path: Union[str, Path]) -> Any:
    """
    Read a JSON document.

    Raises:
        ConfigValidationError: the file does not exist
        ConfigParseError: the file is not valid JSON (with line and column)
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigValidationError(f"Referenced file does not exist: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(f"{path}: {e.msg} at line {e.lineno}, column {e.colno}", e.lineno, e.colno)


def parse_window(value: Any) -> Tuple[int, ...]:
    """Accept ``[6, 6]`` or ``"6,6"``; every bound must be a positive integer."""
    if isinstance(value, str):
        parts = [part for part in value.replace("x", ",").split(",") if part.strip()]
    else:
        parts = list(value)
    try:
        window = tuple(int(part) for part in parts)
    except (TypeError, ValueError):
        raise ConfigValidationError(f"window must be a list of integers, got {value!r}")
    if not window or any(bound < 1 for bound in window):
        raise ConfigValidationError(f"window bounds must be positive integers, got {value!r}")
    return window


def _phase_parts(value: Any) -> List[Any]:
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def parse_phases(name: str, value: Any) -> List[float]:
    """A scalar, a list, or a comma-separated string of phase values (``"4/5"`` allowed)."""
    try:
        return [float(Fraction(part)) if isinstance(part, str) else float(part) for part in _phase_parts(value)]
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigValidationError(f"{name} must be numeric, got {value!r}")


def exact_phases(name: str, value: Any) -> List[Fraction]:
    """Like :func:`parse_phases` but keeps exact rationals for generating-function work."""
    try:
        return [parse_number(part) for part in _phase_parts(value)]
    except GeneratingFunctionError:
        raise ConfigValidationError(f"{name} must be numeric, got {value!r}")


def parse_expansion(value: Any) -> Tuple[int, int]:
    """Inclusive truncation orders from ``"15x15"`` or ``[15, 15]`` (a 16 x 16 grid)."""
    if isinstance(value, str):
        parts = value.lower().split("x")
    else:
        parts = list(value)
    try:
        M, N = (int(part) for part in parts)
    except (TypeError, ValueError):
        raise ConfigValidationError(f"expand must look like MxN, got {value!r}")
    if M < 0 or N < 0 or M > EXPANSION_CAP or N > EXPANSION_CAP:
        raise ConfigValidationError(f"expand orders must lie in 0..{EXPANSION_CAP}, got {M}x{N}")
    return M, N


class JobConfig:
    """A validated job configuration."""

    def __init__(self, data: Dict[str, Any], base_dir: Optional[Path] = None):
        """
        Initialize from a decoded JSON object; call :meth:`validate` before use.

        Args:
            data: Decoded configuration
            base_dir: Directory against which file references resolve
        """
        if not isinstance(data, dict):
            raise ConfigValidationError("configuration must be a JSON object")
        self.raw = data
        self.base_dir = base_dir or Path.cwd()
        self.m = int(data.get("m", 2))
        self.n = int(data.get("n", 1))
        self.window: Optional[Tuple[int, ...]] = parse_window(data["window"]) if "window" in data else None
        self.period: Optional[int] = int(data["period"]) if data.get("period") is not None else None
        self.order = data.get("order", "level")
        self.jobs = int(data.get("jobs", 1))
        self.tolerances = dict(DEFAULT_TOLERANCES)
        self.tolerances.update(data.get("tolerances", {}))
        self.coefficients_spec = data.get("coefficients")
        self.forcing_spec = data.get("forcing")
        self.boundary_spec = self._resolve(data.get("boundary"))
        self.hicks_spec: Dict[str, Any] = dict(data.get("hicks", {}))
        self.gf_spec: Dict[str, Any] = dict(data.get("gf", {}))
        self.way_spec = data.get("way")
        self._coefficients: Optional[LatticeProvider] = None
        self._forcing: Optional[LatticeProvider] = None
        self._boundary: Optional[BoundaryData] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> "JobConfig":
        return cls(data, base_dir)

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {"m": self.m, "n": self.n, "order": self.order, "jobs": self.jobs,
                                  "tolerances": self.tolerances}
        if self.window is not None:
            result["window"] = list(self.window)
        if self.period is not None:
            result["period"] = self.period
        for key, value in (("coefficients", self.coefficients_spec), ("forcing", self.forcing_spec),
                           ("boundary", self.boundary_spec), ("way", self.way_spec)):
            if value is not None:
                result[key] = value
        if self.hicks_spec:
            result["hicks"] = {key: value for key, value in self.hicks_spec.items()}
        if self.gf_spec:
            result["gf"] = {key: value for key, value in self.gf_spec.items()}
        return result

    def _resolve(self, block: Any) -> Any:
        """Load a block given as a file path."""
        if isinstance(block, str):
            path = Path(block)
            if not path.is_absolute():
                path = self.base_dir / path
            return load_json(path)
        return block

    @property
    def has_recurrence(self) -> bool:
        return self.coefficients_spec is not None

    @property
    def rtol(self) -> float:
        return float(self.tolerances["rtol"])

    def require_window(self, m: Optional[int] = None) -> Tuple[int, ...]:
        if self.window is None:
            raise ConfigValidationError("window is required for this command")
        if m is not None and len(self.window) != m:
            raise ConfigValidationError(f"window has {len(self.window)} axes, expected m={m}")
        return self.window

    def coefficients(self) -> LatticeProvider:
        if self._coefficients is None:
            if self.coefficients_spec is None:
                raise ConfigValidationError("coefficients block is required for this command")
            self._coefficients = provider_from_config(self.m, self.n, self.coefficients_spec)
        return self._coefficients

    def forcing(self) -> LatticeProvider:
        if self._forcing is None:
            self._forcing = provider_from_config(self.m, self.n, self.forcing_spec, vector=True)
        return self._forcing

    def boundary(self) -> BoundaryData:
        if self._boundary is None:
            if self.boundary_spec is None:
                raise ConfigValidationError("boundary block is required for this command")
            self._boundary = BoundaryData.from_config(self.boundary_spec, self.m, self.n, self.window)
        return self._boundary

    def hicks_params(self) -> HicksParams:
        if "gamma" not in self.hicks_spec or "alpha" not in self.hicks_spec:
            raise ConfigValidationError("hicks block requires gamma and alpha")
        return HicksParams(parse_phases("gamma", self.hicks_spec["gamma"]),
                           parse_phases("alpha", self.hicks_spec["alpha"]))

    def hicks_boundary(self) -> Optional[BoundaryData]:
        spec = self._resolve(self.hicks_spec.get("boundary"))
        if spec is None:
            return None
        spec = dict(spec)
        if "constant" in spec:
            spec.setdefault("layers", [0, 1])
        return BoundaryData.from_config(spec, self.m, 1, self.window)

    def hicks_consumption(self) -> Optional[BoundaryData]:
        spec = self._resolve(self.hicks_spec.get("consumption"))
        if spec is None:
            return None
        return BoundaryData.from_config(spec, self.m, 1, self.window)

    def gf_layers(self) -> BoundaryLayers:
        spec = self._resolve(self.gf_spec.get("layers"))
        if spec is None:
            raise ConfigValidationError("gf block requires layers")
        return BoundaryLayers.from_dict(spec, exact=True)

    def gf_variant(self) -> int:
        variant = int(self.gf_spec.get("variant", 1))
        if variant not in (1, 2):
            raise ConfigValidationError(f"gf variant must be 1 or 2, got {variant}")
        return variant

    def gf_expansion(self) -> Tuple[int, int]:
        return parse_expansion(self.gf_spec.get("expand", [15, 15]))

    def way_recurrence(self) -> PathRecurrence:
        if not self.way_spec:
            raise ConfigValidationError("way block is required for this command")
        try:
            step1 = AffineStep(self.way_spec["A1"], self.way_spec.get("b1"))
            step2 = AffineStep(self.way_spec["A2"], self.way_spec.get("b2"))
            return PathRecurrence(step1, step2, self.way_spec["x0"])
        except KeyError as e:
            raise ConfigValidationError(f"way block is missing {e}")

    def validate(self) -> "JobConfig":
        """
        Check every block that is present.

        Raises:
            ConfigValidationError, HicksParameterError, IncompatibleBoundaryError:
                an invariant of the referenced module is violated
        """
        if self.order not in SWEEP_ORDERS:
            raise ConfigValidationError(f"order must be one of {SWEEP_ORDERS}, got {self.order!r}")
        if self.jobs < 1:
            raise ConfigValidationError(f"jobs must be >= 1, got {self.jobs}")
        if self.period is not None and self.period < 1:
            raise ConfigValidationError(f"period must be >= 1, got {self.period}")
        for name, value in self.tolerances.items():
            if not isinstance(value, (int, float)) or value <= 0:
                raise ConfigValidationError(f"tolerance {name} must be a positive number, got {value!r}")
        if self.has_recurrence:
            if self.m < 2:
                raise ConfigValidationError(f"m must be >= 2 for recurrence jobs, got m={self.m}")
            if self.window is not None:
                self.require_window(self.m)
            self.coefficients()
            self.forcing()
            if self.boundary_spec is not None:
                require_compatible(self.boundary(), atol=self.tolerances["atol"])
        if self.hicks_spec:
            self.hicks_params()
            boundary = self.hicks_boundary()
            if boundary is not None:
                require_compatible(boundary, atol=self.tolerances["atol"])
        if self.gf_spec:
            if "layers" in self.gf_spec:
                self.gf_layers()
            self.gf_variant()
            self.gf_expansion()
        if self.way_spec:
            self.way_recurrence()
        logger.debug("Configuration validated")
        return self


def merge_overrides(data: Dict[str, Any], overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """
    Overlay command-line values on a decoded configuration.

    Nested blocks (``hicks``, ``gf``, ``tolerances``) are merged key by key;
    None values leave the configuration untouched.
    """
    merged = dict(data)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if isinstance(value, dict):
            block = dict(merged.get(key) or {})
            block.update({name: item for name, item in value.items() if item is not None})
            merged[key] = block
        else:
            merged[key] = value
    return merged


def parse_config(path: Optional[Union[str, Path]] = None,
                 overrides: Optional[Dict[str, Any]] = None) -> JobConfig:
    """
    Parse and validate a job configuration file.

    Args:
        path: Path to the JSON document; None starts from an empty configuration
        overrides: Command-line values merged over the file contents

    Returns:
        Validated JobConfig

    Raises:
        ConfigParseError: malformed JSON, with line and column
        ConfigValidationError: a field or referenced invariant is invalid
    """
    if path is not None:
        path = Path(path)
        data = load_json(path)
        if not isinstance(data, dict):
            raise ConfigValidationError("configuration must be a JSON object")
        base_dir = path.parent
        logger.info(f"Loaded configuration: {path}")
    else:
        data, base_dir = {}, Path.cwd()
    config = JobConfig(merge_overrides(data, overrides), base_dir=base_dir)
    return config.validate()
