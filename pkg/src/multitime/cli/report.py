"""
Multitime - Run Reports

A RunReport records one command invocation: the command, an echo of its
inputs, every file written, residual summaries and warnings. Reports are
written as JSON next to the CSV outputs.
"""

import json
import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays to JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


class RunReport:
    """Outcome of one ``multitime`` command."""

    def __init__(self, command: str, inputs: Optional[Dict[str, Any]] = None):
        self.command = command
        self.inputs = inputs or {}
        self.outputs: List[str] = []
        self.residuals: Dict[str, Any] = {}
        self.results: Dict[str, Any] = {}
        self.warnings: List[str] = []
        self.success = True
        self.error: Optional[Dict[str, Any]] = None
        self.exit_code = 0
        self.wall_time = 0.0
        self._started = time.perf_counter()

    def add_output(self, path: Union[str, Path]) -> None:
        text = str(path)
        if text not in self.outputs:
            self.outputs.append(text)

    def add_warnings(self, warnings: List[str]) -> None:
        self.warnings.extend(warnings)

    def fail(self, error: Dict[str, Any], exit_code: int) -> None:
        self.success = False
        self.error = error
        self.exit_code = exit_code

    def finish(self) -> "RunReport":
        self.wall_time = time.perf_counter() - self._started
        return self

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        result = {
            "command": self.command,
            "success": self.success,
            "exit_code": self.exit_code,
            "inputs": _plain(self.inputs),
            "outputs": list(self.outputs),
            "residuals": _plain(self.residuals),
            "results": _plain(self.results),
            "warnings": list(self.warnings),
        }
        if self.error is not None:
            result["error"] = _plain(self.error)
        if include_timing:
            result["wall_time"] = self.wall_time
        return result

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2)

    def write(self, out_dir: Union[str, Path]) -> Path:
        """Write ``<command>_report.json`` into out_dir and list it among the outputs."""
        path = Path(out_dir) / f"{self.command}_report.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        self.add_output(path)
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        logger.info(f"Wrote report: {path}")
        return path
