"""
Multitime - Command Line

Usage:
    multitime check --config job.json
    multitime solve --config job.json --out results/ --jobs 4
    multitime floquet --config job.json --period 2
    multitime hicks --gamma 0.5 --alpha 0.5 --classify
    multitime gf --gamma 0.8 --alpha 0.1 --layers layers.json --variant 2 --expand 15x15
    multitime way --config way.json --point 2,3
"""

import asyncio
import functools
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click

from multitime import __version__
from multitime.cli.config import parse_config
from multitime.cli.runner import JobRunner, report_failure
from multitime.core.errors import MultitimeError

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def configure_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT,
                        stream=sys.stderr, force=True)


def _absolute(path: Optional[str]) -> Optional[str]:
    return str(Path(path).resolve()) if path else None


def common_options(command: Callable) -> Callable:
    """Flags shared by every subcommand."""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                     help="JSON job configuration"),
        click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".", show_default=True,
                     help="Directory for CSV files and the report"),
        click.option("--format", "output_format", type=click.Choice(["csv"]), default="csv", show_default=True,
                     help="Output format"),
        click.option("--tol", type=float, default=None, help="Relative tolerance (overrides tolerances.rtol)"),
        click.option("--jobs", type=int, default=None, help="Worker threads for diagonal sweeps"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def execute(command: str, options: Dict[str, Any], params: Optional[Dict[str, Any]] = None,
            overrides: Optional[Dict[str, Any]] = None) -> int:
    """
    Parse the configuration, run one command and return its exit code.

    Args:
        command: Subcommand name
        options: Values of the shared flags
        params: Command-specific parameters passed to the handler
        overrides: Configuration values set by flags

    Returns:
        Exit code (0 success, 1 validation error, 2 numeric failure)
    """
    out_dir = Path(options["out_dir"])
    overrides = dict(overrides or {})
    if options.get("tol") is not None:
        overrides["tolerances"] = {"rtol": options["tol"]}
    if options.get("jobs") is not None:
        overrides["jobs"] = options["jobs"]
    try:
        config = parse_config(options.get("config_path"), overrides)
    except (MultitimeError, OSError) as e:
        logger.error(f"Invalid configuration for {command}: {e}")
        return report_failure(command, e, out_dir).exit_code

    runner = JobRunner(config, out_dir, jobs=config.jobs)
    report = asyncio.run(runner.run(command, params or {}))
    for warning in report.warnings:
        logger.warning(warning)
    if report.success:
        click.echo(f"{command}: ok ({len(report.outputs)} file(s) in {out_dir})")
    else:
        click.echo(f"{command}: {report.error['error']}", err=True)
    return report.exit_code


def _finish(command: str, options: Dict[str, Any], params: Optional[Dict[str, Any]] = None,
            overrides: Optional[Dict[str, Any]] = None) -> None:
    sys.exit(execute(command, options, params, overrides))


@click.group()
@click.version_option(__version__, prog_name="multitime")
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False),
              default=lambda: os.environ.get("MULTITIME_LOG_LEVEL", "INFO"), show_default="INFO",
              help="Logging level (env MULTITIME_LOG_LEVEL)")
def cli(log_level: str) -> None:
    """Discrete multitime recurrences, Floquet analysis and Samuelson-Hicks models."""
    configure_logging(log_level)


@cli.command()
@common_options
@click.option("--period", type=int, default=None, help="Also check T-diagonal periodicity")
def check(period: Optional[int], **options: Any) -> None:
    """Validate a configuration: boundary compatibility, periodicity, parameter ranges."""
    _finish("check", options, {"period": period})


@cli.command()
@common_options
def solve(**options: Any) -> None:
    """Solve a diagonal recurrence on the configured window (solution.csv)."""
    _finish("solve", options)


@cli.command()
@common_options
def phi(**options: Any) -> None:
    """Export the fundamental matrix on the configured window (phi.csv)."""
    _finish("phi", options)


@cli.command()
@common_options
@click.option("--period", type=int, default=None, help="Diagonal period T (overrides config)")
def floquet(period: Optional[int], **options: Any) -> None:
    """Monodromy, matrix roots, multipliers and decomposition residuals."""
    _finish("floquet", options, {"period": period}, {"period": period})


@cli.command()
@common_options
@click.option("--gamma", default=None, help="Scalar or comma-separated phase list")
@click.option("--alpha", default=None, help="Scalar or comma-separated phase list")
@click.option("--window", default=None, help="Window bounds, e.g. 6,6")
@click.option("--boundary", type=click.Path(dir_okay=False), default=None, help="Boundary JSON file")
@click.option("--classify", is_flag=True, help="Classify the characteristic roots")
@click.option("--multipliers", is_flag=True, help="Floquet multipliers per diagonal base")
def hicks(gamma: Optional[str], alpha: Optional[str], window: Optional[str], boundary: Optional[str],
          classify: bool, multipliers: bool, **options: Any) -> None:
    """Samuelson-Hicks model: classification, multipliers and income/consumption fields."""
    overrides = {
        "window": window,
        "hicks": {"gamma": gamma, "alpha": alpha, "boundary": _absolute(boundary)},
    }
    _finish("hicks", options, {"classify": classify, "multipliers": multipliers}, overrides)


@cli.command()
@common_options
@click.option("--gamma", default=None, help="Constant gamma")
@click.option("--alpha", default=None, help="Constant alpha")
@click.option("--layers", type=click.Path(dir_okay=False), default=None, help="Boundary layers JSON file")
@click.option("--variant", type=click.Choice(["1", "2"]), default=None, help="Construction variant")
@click.option("--expand", "expansion", default=None, help="Expansion orders MxN")
def gf(gamma: Optional[str], alpha: Optional[str], layers: Optional[str], variant: Optional[str],
       expansion: Optional[str], **options: Any) -> None:
    """Rational bivariate generating function of the constant model."""
    overrides = {
        "gf": {
            "gamma": gamma,
            "alpha": alpha,
            "layers": _absolute(layers),
            "variant": int(variant) if variant else None,
            "expand": expansion,
        },
    }
    _finish("gf", options, {}, overrides)


@cli.command()
@common_options
@click.option("--point", default=None, help="Evaluate x(t) at one point, e.g. 2,3")
def way(point: Optional[str], **options: Any) -> None:
    """Two-time recurrence of way required (way.csv)."""
    _finish("way", options, {"point": point})


main = functools.partial(cli, prog_name="multitime")


if __name__ == "__main__":
    main()
