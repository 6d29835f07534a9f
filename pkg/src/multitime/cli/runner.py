"""
Multitime - Command Runner

This module dispatches ``multitime`` subcommands. Commands are registered in
a handler registry and executed asynchronously; numeric work runs on a
thread pool sized by ``--jobs`` so independent diagonal sweeps can proceed in
parallel. Every command produces a RunReport and an exit code:

- 0: success
- 1: validation error (bad input, incompatible boundary, non-periodic provider)
- 2: numeric failure (singular or defective matrix, no convergence)
"""

import asyncio
import functools
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Awaitable, Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from multitime.cli.config import JobConfig, exact_phases, parse_phases
from multitime.cli.report import RunReport
from multitime.core.errors import (
    ConfigParseError,
    ConfigValidationError,
    IncompatibleBoundaryError,
    LatticeDomainError,
    MultitimeError,
    PeriodicityError,
    SingularMatrixError,
    exit_code_for,
)
from multitime.core.lattice import MultiIndex, check_dimension, window_bases, window_points
from multitime.floquet.decomposition import FloquetDecomposition, check_diagonal_periodicity
from multitime.genfunc.closed_form import diagonal_closed_form
from multitime.genfunc.rational import (
    build_gf_variant1,
    build_gf_variant2,
    expand,
    functional_equation_residuals,
    reversed_characteristic,
)
from multitime.models.hicks import (
    HicksParams,
    classify,
    hicks_floquet_multipliers,
    negativity_warnings,
    solve_all,
    solve_second_order,
)
from multitime.recurrence.boundary import check_compatibility
from multitime.recurrence.field import SolutionField, format_number
from multitime.recurrence.solver import (
    DiagonalRecurrence,
    fundamental_residual,
    solve_explicit_field,
    solve_iterative,
    transfer_matrix,
)
from multitime.recurrence.way_required import closed_form_constant, solve_path

logger = logging.getLogger(__name__)

CommandHandler = Callable[[RunReport, Dict[str, Any]], Awaitable[None]]


def create_error_response(error: BaseException) -> Dict[str, Any]:
    """
    Describe a failed command.

    Args:
        error: The exception that ended the command

    Returns:
        Dictionary with success flag, message, error code, exit code and any
        offending values the exception carries
    """
    response: Dict[str, Any] = {
        "success": False,
        "error": str(error),
        "error_code": getattr(error, "error_code", type(error).__name__),
        "exit_code": 2 if isinstance(error, np.linalg.LinAlgError) else exit_code_for(error),
    }
    if isinstance(error, PeriodicityError) and error.counterexample is not None:
        response["counterexample"] = list(error.counterexample)
    if isinstance(error, IncompatibleBoundaryError) and error.report is not None:
        response["compatibility"] = error.report.to_dict()
    if isinstance(error, ConfigParseError):
        response["line"] = error.line
        response["column"] = error.column
    if isinstance(error, SingularMatrixError):
        response["pivot"] = error.pivot
    if isinstance(error, LatticeDomainError) and error.components is not None:
        response["components"] = list(error.components)
    return response


def report_failure(command: str, error: BaseException, out_dir: Union[str, Path]) -> RunReport:
    """Write a report for a command that failed before it could run."""
    response = create_error_response(error)
    report = RunReport(command)
    report.fail(response, response["exit_code"])
    report.finish()
    report.write(out_dir)
    return report


def _write_frame(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info(f"Wrote CSV: {path}")
    return path


def phi_frame(coefficients, window: Sequence[int]) -> pd.DataFrame:
    """Rows t1..tm,row,col,re,im of Phi(t) over a window."""
    m = len(window)
    rows: List[Dict[str, str]] = []
    for t in window_points(window):
        phi = transfer_matrix(coefficients, t)
        for (row, col), value in np.ndenumerate(phi):
            record = {f"t{axis + 1}": str(c) for axis, c in enumerate(t)}
            record.update(row=str(row), col=str(col), re=format_number(np.real(value)),
                          im=format_number(np.imag(value)))
            rows.append(record)
    columns = [f"t{axis + 1}" for axis in range(m)] + ["row", "col", "re", "im"]
    return pd.DataFrame(rows, columns=columns)


def multipliers_frame(entries: Sequence[tuple]) -> pd.DataFrame:
    """Rows base_t1..base_tm,re,im,modulus from (base, eigenvalues) pairs."""
    rows: List[Dict[str, str]] = []
    m = len(entries[0][0]) if entries else 0
    for base, values in entries:
        for value in values:
            value = complex(value)
            record = {f"base_t{axis + 1}": str(c) for axis, c in enumerate(base)}
            record.update(re=format_number(value.real), im=format_number(value.imag),
                          modulus=format_number(abs(value)))
            rows.append(record)
    columns = [f"base_t{axis + 1}" for axis in range(m)] + ["re", "im", "modulus"]
    return pd.DataFrame(rows, columns=columns)


def coefficients_frame(series) -> pd.DataFrame:
    """Rows m,n,coeff of a truncated generating-function expansion."""
    M, N = series.orders
    rows = [
        {"m": str(i), "n": str(j), "coeff": format_number(float(series[i, j]))}
        for i in range(M + 1) for j in range(N + 1)
    ]
    return pd.DataFrame(rows, columns=["m", "n", "coeff"])


class JobRunner:
    """Registry of ``multitime`` command handlers bound to one configuration."""

    def __init__(self, config: JobConfig, out_dir: Union[str, Path] = ".", jobs: int = 1):
        """
        Initialize the runner.

        Args:
            config: Validated job configuration
            out_dir: Directory receiving CSV files and the report
            jobs: Worker threads for numeric work
        """
        self.config = config
        self.out_dir = Path(out_dir)
        self.jobs = max(1, int(jobs))
        self.command_handlers: Dict[str, CommandHandler] = {}
        self._executor: Optional[ThreadPoolExecutor] = None

        self.register_command_handler("check", self._handle_check)
        self.register_command_handler("solve", self._handle_solve)
        self.register_command_handler("phi", self._handle_phi)
        self.register_command_handler("floquet", self._handle_floquet)
        self.register_command_handler("hicks", self._handle_hicks)
        self.register_command_handler("gf", self._handle_gf)
        self.register_command_handler("way", self._handle_way)

    def register_command_handler(self, command: str, handler: CommandHandler) -> None:
        """
        Register a handler for a command.

        Args:
            command: Command name
            handler: Async function taking the report and command parameters
        """
        self.command_handlers[command] = handler
        logger.debug(f"Registered handler for command: {command}")

    def unregister_command_handler(self, command: str) -> bool:
        if command in self.command_handlers:
            del self.command_handlers[command]
            logger.debug(f"Unregistered handler for command: {command}")
            return True
        return False

    @property
    def commands(self) -> List[str]:
        return sorted(self.command_handlers)

    async def _offload(self, function: Callable, *args, **kwargs) -> Any:
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(self._executor, functools.partial(function, *args, **kwargs))

    def _output(self, name: str) -> Path:
        return self.out_dir / name

    async def execute_command(self, command: str, params: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        Execute a command.

        Args:
            command: Command name
            params: Command parameters (subcommand flags)

        Returns:
            Result dictionary with ``success``, ``exit_code`` and the ``report``
        """
        params = params or {}
        if command not in self.command_handlers:
            return {
                "success": False,
                "error": f"Unsupported command: {command}",
                "error_code": "unsupported_command",
                "exit_code": 1,
            }
        report = RunReport(command, inputs={"config": self.config.to_dict(), "params": params})
        logger.info(f"Running command: {command}")
        try:
            with ThreadPoolExecutor(max_workers=self.jobs) as executor:
                self._executor = executor
                await self.command_handlers[command](report, params)
        except (MultitimeError, ArithmeticError, np.linalg.LinAlgError, ValueError, OSError) as e:
            logger.error(f"Error executing command {command}: {e}")
            response = create_error_response(e)
            report.fail(response, response["exit_code"])
        finally:
            self._executor = None
        report.finish()
        report.write(self.out_dir)
        logger.info(f"Command {command} finished with exit code {report.exit_code}")
        return {"success": report.success, "exit_code": report.exit_code, "report": report}

    async def run(self, command: str, params: Optional[Dict[str, Any]] = None) -> RunReport:
        result = await self.execute_command(command, params)
        if "report" not in result:
            report = RunReport(command)
            report.fail(result, result["exit_code"])
            return report.finish()
        return result["report"]

    async def _handle_check(self, report: RunReport, params: Dict[str, Any]) -> None:
        config = self.config
        if config.has_recurrence:
            if config.boundary_spec is not None:
                compatibility = check_compatibility(config.boundary(), atol=config.tolerances["atol"])
                report.results["compatibility"] = compatibility.to_dict()
                if not compatibility.passed:
                    raise IncompatibleBoundaryError(compatibility.violations[0].describe(), compatibility)
            period = params.get("period") or config.period
            if period:
                window = config.require_window(config.m)
                periodicity = check_diagonal_periodicity(config.coefficients(), period, window)
                report.results["periodicity"] = periodicity.to_dict()
                if not periodicity.periodic:
                    raise PeriodicityError(
                        f"Coefficients are not {period}-diagonal-periodic at "
                        f"({periodicity.counterexample.to_string()})",
                        periodicity.counterexample,
                    )
        if config.hicks_spec:
            report.results["hicks"] = config.hicks_params().to_dict()
            boundary = config.hicks_boundary()
            if boundary is not None:
                report.results["hicks_compatibility"] = check_compatibility(boundary).to_dict()
        if config.gf_spec and "layers" in config.gf_spec:
            report.results["gf_layers"] = config.gf_layers().to_dict()

    async def _handle_solve(self, report: RunReport, params: Dict[str, Any]) -> None:
        config = self.config
        window = config.require_window(config.m)
        rec = DiagonalRecurrence(config.coefficients(), config.boundary(), config.forcing())
        iterative = await self._offload(solve_iterative, rec, window, config.order, self.jobs)
        explicit = await self._offload(solve_explicit_field, rec, window)
        agreement = explicit.max_difference(iterative)
        report.residuals["explicit_vs_iterative"] = agreement
        report.residuals["recurrence"] = iterative.recurrence_residual(rec.coefficients, rec.forcing)
        if agreement > config.rtol:
            report.warnings.append(f"explicit and iterative solutions differ by {agreement:.3e}")
        report.add_output(iterative.to_csv(self._output("solution.csv")))

    async def _handle_phi(self, report: RunReport, params: Dict[str, Any]) -> None:
        config = self.config
        window = config.require_window(config.m)
        coefficients = config.coefficients()
        frame = await self._offload(phi_frame, coefficients, window)
        report.residuals["fundamental"] = await self._offload(fundamental_residual, coefficients, window)
        report.add_output(_write_frame(frame, self._output("phi.csv")))

    async def _handle_floquet(self, report: RunReport, params: Dict[str, Any]) -> None:
        config = self.config
        window = config.require_window(config.m)
        period = params.get("period") or config.period
        if not period:
            raise PeriodicityError("floquet needs a period (config 'period' or --period)")
        decomposition = await self._offload(FloquetDecomposition, config.coefficients(), int(period), window)
        await self._offload(decomposition.build, window)
        report.residuals.update(await self._offload(decomposition.residuals, window))
        report.results["floquet"] = decomposition.to_dict()
        report.results["stable"] = {
            record.base.to_string(): record.multipliers.is_stable() for record in decomposition.records
        }
        entries = [(record.base, record.multipliers.eigenvalues) for record in decomposition.records]
        report.add_output(_write_frame(multipliers_frame(entries), self._output("multipliers.csv")))

    def _hicks_params(self, prefer: str = "hicks", exact: bool = False) -> HicksParams:
        """Model parameters from the preferred block, falling back to the other one."""
        blocks = {"hicks": self.config.hicks_spec, "gf": self.config.gf_spec}
        order = [prefer] + [name for name in blocks if name != prefer]
        spec = next((blocks[name] for name in order if "gamma" in blocks[name]), {})
        if "gamma" not in spec or "alpha" not in spec:
            raise ConfigValidationError("gamma and alpha are required (hicks block, gf block or flags)")
        parse = exact_phases if exact else parse_phases
        return HicksParams(parse("gamma", spec["gamma"]), parse("alpha", spec["alpha"]))

    async def _handle_hicks(self, report: RunReport, params: Dict[str, Any]) -> None:
        config = self.config
        p = self._hicks_params()
        report.results["params"] = p.to_dict()
        boundary = config.hicks_boundary()
        wants_classify = params.get("classify") or (p.is_constant and not params.get("multipliers"))
        if wants_classify:
            report.results["classification"] = classify(p).to_dict()
        if params.get("multipliers"):
            window = config.require_window(config.m)
            entries = []
            for base in window_bases(window):
                quadratic = await self._offload(hicks_floquet_multipliers, p, base)
                entries.append((base, quadratic.roots))
            first = entries[0][1]
            report.results["multipliers"] = {
                "values": [complex(z) for z in first],
                "product": complex(first[0] * first[1]),
                "alpha_product": float(p.alpha_product()),
                "stable": max(abs(z) for z in first) < 1.0,
            }
            report.add_output(_write_frame(multipliers_frame(entries), self._output("multipliers.csv")))
        if boundary is not None:
            window = config.require_window(boundary.m)
            state, spread = await self._offload(solve_all, p, boundary, window, config.hicks_consumption(),
                                                self.jobs)
            report.residuals["formulation_agreement"] = spread
            if spread > config.rtol:
                report.warnings.append(f"Samuelson-Hicks formulations differ by {spread:.3e}")
            report.add_warnings(negativity_warnings(state.income, "Y"))
            report.add_warnings(negativity_warnings(state.consumption, "C"))
            report.add_output(state.income.to_csv(self._output("income.csv")))
            report.add_output(state.consumption.to_csv(self._output("consumption.csv")))

    async def _handle_gf(self, report: RunReport, params: Dict[str, Any]) -> None:
        config = self.config
        p = self._hicks_params("gf", exact=True)
        p.require_constant("gf")
        p_float = p.as_float()
        layers = config.gf_layers()
        variant = config.gf_variant()
        M, N = config.gf_expansion()
        gf = (build_gf_variant1 if variant == 1 else build_gf_variant2)(p, layers)
        series = await self._offload(expand, gf, M, N)

        report.results["generating_function"] = gf.to_dict()
        report.results["denominator_is_reversed_characteristic"] = gf.denominator == reversed_characteristic(p)
        residuals = functional_equation_residuals(gf, series)
        report.residuals["functional_equation"] = residuals["numerator"]
        if residuals["split"] is not None:
            report.residuals["split"] = residuals["split"]

        boundary = layers.to_boundary((M + 1, N + 1))
        field = await self._offload(solve_second_order, p_float, boundary, (M + 1, N + 1))
        report.residuals["field_agreement"] = float(np.max(np.abs(field.values[..., 0] - series.to_float())))

        closed = diagonal_closed_form(p_float, float(layers.y00), float(layers.y11))
        report.results["diagonal_closed_form"] = closed.to_dict()
        if closed.valid:
            diagonal = [float(value) for value in series.diagonal()]
            report.residuals["diagonal_closed_form"] = max(
                abs(closed.value(k) - value) for k, value in enumerate(diagonal)
            )
        report.add_output(_write_frame(coefficients_frame(series), self._output("gf_coefficients.csv")))

    async def _handle_way(self, report: RunReport, params: Dict[str, Any]) -> None:
        config = self.config
        rec = config.way_recurrence()
        step1, step2 = rec.steps
        linear = step1.linear and step2.linear

        def closed_form_gap(t: MultiIndex, value: np.ndarray) -> float:
            expected = closed_form_constant(step1.matrix, step2.matrix, rec.x0, t)
            return float(np.max(np.abs(value - expected)))

        point = params.get("point")
        if point is not None:
            t = check_dimension(MultiIndex.parse(point) if isinstance(point, str) else point, 2)
            value = solve_path(rec, t)
            report.results["point"] = list(t)
            report.results["value"] = value.tolist()
            if linear:
                report.residuals["closed_form_point"] = closed_form_gap(t, value)
        if config.window is None:
            if point is None:
                raise ConfigValidationError("way needs a window or --point")
            return

        window = config.require_window(2)

        def evaluate() -> SolutionField:
            field = SolutionField.empty(window, rec.n)
            for t in window_points(window):
                field[t] = solve_path(rec, t)
            return field

        field = await self._offload(evaluate)
        if linear:
            report.residuals["closed_form"] = max(closed_form_gap(t, field[t]) for t in window_points(window))
        report.add_output(field.to_csv(self._output("way.csv")))
