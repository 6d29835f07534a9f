import json

import pytest
from click.testing import CliRunner

from multitime.cli.config import parse_config
from multitime.cli.main import cli, execute
from multitime.cli.runner import JobRunner
from multitime.recurrence.field import SolutionField

DISTINCT_TABLE = [[[[1.0]], [[2.0]], [[3.0]]], [[[4.0]], [[5.0]], [[6.0]]]]


def _report(out_dir, command):
    return json.loads((out_dir / f"{command}_report.json").read_text(encoding="utf-8"))


def _invoke(*args):
    return CliRunner().invoke(cli, ["--log-level", "ERROR", *args])


@pytest.fixture
def doubling_config(write_config):
    return write_config({
        "m": 2,
        "n": 1,
        "window": [4, 4],
        "coefficients": {"kind": "constant", "matrix": [[2.0]]},
        "boundary": {"constant": [1.0]},
    })


@pytest.fixture
def layers_file(write_config):
    return write_config({"phi0": [1], "psi0": [1], "phi1": [1], "psi1": [1]}, name="layers.json")


@pytest.mark.asyncio
async def test_runner_solve_writes_solution_and_report(doubling_config, tmp_path):
    out_dir = tmp_path / "out"
    runner = JobRunner(parse_config(doubling_config), out_dir)
    report = await runner.run("solve")
    assert report.success
    assert report.residuals["explicit_vs_iterative"] <= 1e-12
    solution = SolutionField.from_csv(out_dir / "solution.csv")
    assert solution[(3, 3)][0] == 8.0
    assert solution[(0, 2)][0] == 1.0
    assert _report(out_dir, "solve")["exit_code"] == 0


@pytest.mark.asyncio
async def test_runner_rejects_unknown_command(doubling_config, tmp_path):
    runner = JobRunner(parse_config(doubling_config), tmp_path)
    assert "solve" in runner.commands
    result = await runner.execute_command("plot")
    assert result["error_code"] == "unsupported_command"
    report = await runner.run("plot")
    assert report.exit_code == 1


@pytest.mark.asyncio
async def test_runner_handlers_can_be_unregistered(doubling_config, tmp_path):
    runner = JobRunner(parse_config(doubling_config), tmp_path)
    assert runner.unregister_command_handler("phi")
    assert not runner.unregister_command_handler("phi")
    report = await runner.run("phi")
    assert not report.success


def test_check_passes_for_compatible_boundary(doubling_config, tmp_path):
    out_dir = tmp_path / "out"
    result = _invoke("check", "--config", str(doubling_config), "--out", str(out_dir))
    assert result.exit_code == 0
    report = _report(out_dir, "check")
    assert report["results"]["compatibility"]["passed"]


def test_check_reports_incompatible_faces(write_config, tmp_path):
    path = write_config({
        "m": 2,
        "window": [3, 3],
        "coefficients": {"kind": "constant", "matrix": [[1.0]]},
        "boundary": {"faces": [{"face": 1, "values": [1.0, 0.0, 0.0]},
                               {"face": 2, "values": [0.0, 0.0, 0.0]}]},
    })
    out_dir = tmp_path / "out"
    result = _invoke("check", "--config", str(path), "--out", str(out_dir))
    assert result.exit_code == 1
    error = _report(out_dir, "check")["error"]
    assert error["error_code"] == "incompatible_boundary"
    assert not error["compatibility"]["passed"]
    assert "(0,0)" in error["error"]


def test_floquet_refuses_non_periodic_coefficients(write_config, tmp_path):
    path = write_config({
        "m": 2,
        "window": [4, 4],
        "coefficients": {"kind": "periodic", "periods": [2, 3], "table": DISTINCT_TABLE},
    })
    out_dir = tmp_path / "out"
    result = _invoke("floquet", "--config", str(path), "--period", "2", "--out", str(out_dir))
    assert result.exit_code == 1
    error = _report(out_dir, "floquet")["error"]
    assert error["counterexample"] == [0, 0]


def test_floquet_on_lcm_period_writes_multipliers(write_config, tmp_path):
    path = write_config({
        "m": 2,
        "window": [4, 4],
        "coefficients": {"kind": "periodic", "periods": [2, 3], "table": DISTINCT_TABLE},
    })
    out_dir = tmp_path / "out"
    result = _invoke("floquet", "--config", str(path), "--period", "6", "--out", str(out_dir))
    assert result.exit_code == 0
    assert (out_dir / "multipliers.csv").is_file()
    residuals = _report(out_dir, "floquet")["residuals"]
    assert max(residuals.values()) < 1e-8


def test_singular_monodromy_is_a_numeric_failure(write_config, tmp_path):
    path = write_config({
        "m": 2,
        "n": 2,
        "window": [3, 3],
        "period": 1,
        "coefficients": {"kind": "constant", "matrix": [[1.0, 1.0], [1.0, 1.0]]},
    })
    out_dir = tmp_path / "out"
    result = _invoke("floquet", "--config", str(path), "--out", str(out_dir))
    assert result.exit_code == 2
    assert "pivot" in _report(out_dir, "floquet")["error"]


def test_gf_variants_write_identical_coefficients(layers_file, tmp_path):
    outputs = []
    for variant in ("1", "2"):
        out_dir = tmp_path / f"variant{variant}"
        result = _invoke("gf", "--gamma", "0.8", "--alpha", "0.1", "--layers", str(layers_file),
                         "--variant", variant, "--expand", "7x7", "--out", str(out_dir))
        assert result.exit_code == 0
        outputs.append((out_dir / "gf_coefficients.csv").read_bytes())
        report = _report(out_dir, "gf")
        assert report["residuals"]["functional_equation"] == 0.0
        assert report["residuals"]["field_agreement"] <= 1e-10
        assert report["results"]["denominator_is_reversed_characteristic"]
    assert outputs[0] == outputs[1]
    assert outputs[0].splitlines()[0] == b"m,n,coeff"


def test_gf_refuses_periodic_parameters(layers_file, tmp_path):
    out_dir = tmp_path / "out"
    result = _invoke("gf", "--gamma", "0.8,0.7", "--alpha", "0.1", "--layers", str(layers_file),
                     "--out", str(out_dir))
    assert result.exit_code == 1
    assert "constant parameters" in _report(out_dir, "gf")["error"]["error"]


def test_hicks_rejects_gamma_out_of_range(tmp_path):
    out_dir = tmp_path / "out"
    result = _invoke("hicks", "--gamma", "1.2", "--alpha", "0.5", "--out", str(out_dir))
    assert result.exit_code == 1
    assert "gamma out of (0,1)" in _report(out_dir, "hicks")["error"]["error"]


def test_hicks_classify(tmp_path):
    out_dir = tmp_path / "out"
    result = _invoke("hicks", "--gamma", "0.5", "--alpha", "0.5", "--classify", "--out", str(out_dir))
    assert result.exit_code == 0
    classification = _report(out_dir, "hicks")["results"]["classification"]
    assert classification["root_kind"] == "complex-pair"
    assert classification["stable"] is True


def test_hicks_periodic_multipliers(tmp_path):
    out_dir = tmp_path / "out"
    result = _invoke("hicks", "--gamma", "0.5", "--alpha", "0.8,1.25", "--window", "4,4",
                     "--multipliers", "--out", str(out_dir))
    assert result.exit_code == 0
    multipliers = _report(out_dir, "hicks")["results"]["multipliers"]
    assert multipliers["product"]["re"] == pytest.approx(1.0)
    assert multipliers["alpha_product"] == pytest.approx(1.0)
    assert (out_dir / "multipliers.csv").is_file()


def test_hicks_fields_from_config(write_config, tmp_path):
    path = write_config({
        "window": [5, 5],
        "hicks": {"gamma": 0.5, "alpha": 0.5, "boundary": {"constant": [1.0]}},
    })
    out_dir = tmp_path / "out"
    assert execute("hicks", {"config_path": str(path), "out_dir": str(out_dir)}) == 0
    report = _report(out_dir, "hicks")
    assert report["residuals"]["formulation_agreement"] <= 1e-9
    assert (out_dir / "income.csv").is_file()
    assert (out_dir / "consumption.csv").is_file()


def test_way_at_a_point(write_config, tmp_path):
    path = write_config({"way": {"A1": [[2.0]], "A2": [[3.0]], "x0": [1.0]}})
    out_dir = tmp_path / "out"
    result = _invoke("way", "--config", str(path), "--point", "2,3", "--out", str(out_dir))
    assert result.exit_code == 0
    report = _report(out_dir, "way")
    assert report["results"]["value"] == [108.0]
    assert report["residuals"]["closed_form_point"] == 0.0


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "m": 2,\n  "window": [4, 4\n}\n', encoding="utf-8")
    out_dir = tmp_path / "out"
    result = _invoke("solve", "--config", str(path), "--out", str(out_dir))
    assert result.exit_code == 1
    error = _report(out_dir, "solve")["error"]
    assert (error["line"], error["column"]) == (4, 1)
    assert "line 4, column 1" in error["error"]


def test_tolerance_flag_overrides_config(doubling_config, tmp_path):
    config = parse_config(doubling_config, {"tolerances": {"rtol": 1e-6}})
    assert config.rtol == 1e-6
    assert config.tolerances["atol"] == 1e-12


def test_version_option():
    result = CliRunner().invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "multitime" in result.output


def test_phi_exports_fundamental_matrix(doubling_config, tmp_path):
    out_dir = tmp_path / "out"
    result = _invoke("phi", "--config", str(doubling_config), "--out", str(out_dir))
    assert result.exit_code == 0
    lines = (out_dir / "phi.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t1,t2,row,col,re,im"
    assert len(lines) == 1 + 16
    assert _report(out_dir, "phi")["residuals"]["fundamental"] <= 1e-12


def test_gf_expand_orders_are_inclusive(layers_file, tmp_path):
    out_dir = tmp_path / "out"
    result = _invoke("gf", "--gamma", "0.8", "--alpha", "0.1", "--layers", str(layers_file),
                     "--variant", "2", "--expand", "15x15", "--out", str(out_dir))
    assert result.exit_code == 0
    lines = (out_dir / "gf_coefficients.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1 + 16 * 16
    assert lines[-1].startswith("15,15,")
