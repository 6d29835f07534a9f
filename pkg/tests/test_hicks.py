import math
from fractions import Fraction

import numpy as np
import pytest

from multitime.core.errors import (
    ContractError,
    HicksParameterError,
    IncompatibleBoundaryError,
    NumericFailure,
    exit_code_for,
)
from multitime.core.lattice import shift
from multitime.genfunc.rational import particular_layers
from multitime.models.hicks import (
    HicksParams,
    classify,
    companion_provider,
    constant_system_matrix,
    hicks_floquet_multipliers,
    negativity_warnings,
    periodic_system_provider,
    seed_consumption,
    solve_all,
    solve_second_order,
)
from multitime.recurrence.boundary import BoundaryData, FaceTable


@pytest.mark.parametrize(
    "gamma, alpha, message",
    [
        (1.2, 0.5, "gamma out of (0,1): 1.2"),
        (0.0, 0.5, "gamma out of (0,1)"),
        (0.5, 0.0, "alpha must be positive"),
        ([0.5, 0.6], [0.1, 0.2, 0.3], "phase sequence lengths disagree"),
        ([], 0.5, "at least one phase value"),
    ],
)
def test_invalid_parameters(gamma, alpha, message):
    with pytest.raises(HicksParameterError) as excinfo:
        HicksParams(gamma, alpha)
    assert message in str(excinfo.value)


def test_scalar_phase_broadcasts():
    p = HicksParams(0.5, [0.8, 1.25])
    assert p.gamma == (0.5, 0.5)
    assert p.period == 2
    assert not p.is_constant
    assert p.alpha_product() == pytest.approx(1.0)
    assert p.gamma_at((3, 5)) == 0.5
    assert p.alpha_at((3, 5)) == 1.25


def test_exact_parameters_stay_rational():
    p = HicksParams(Fraction(4, 5), Fraction(1, 10))
    assert p.exact
    assert p.trace_phase(0) == Fraction(9, 10)
    assert not p.as_float().exact


@pytest.mark.parametrize("alpha, label", [(0.5, "decelerator"), (1.0, "keeper"), (1.5, "accelerator")])
def test_accelerator_class(alpha, label):
    assert HicksParams(0.5, alpha).accelerator_class() == label


def test_constant_system_matrix():
    assert np.array_equal(constant_system_matrix(HicksParams(0.5, 0.5)), [[1.0, -1.0], [0.5, 0.0]])
    matrix = constant_system_matrix(HicksParams(0.8, 0.1))
    assert np.allclose(matrix, [[0.9, -0.125], [0.8, 0.0]])
    assert np.linalg.det(matrix) == pytest.approx(0.1)


def test_system_matrix_needs_constant_parameters():
    with pytest.raises(HicksParameterError):
        constant_system_matrix(HicksParams([0.5, 0.6], 0.5))


def test_periodic_system_matrix_reads_previous_gamma():
    p = HicksParams([0.5, 0.25], [0.8, 1.25])
    provider = periodic_system_provider(p)
    assert np.allclose(provider((0, 3)), [[1.3, -0.8 / 0.25], [0.5, 0.0]])
    assert np.allclose(provider((1, 3)), [[1.5, -1.25 / 0.5], [0.25, 0.0]])
    assert provider.natural_period == 2


def test_companion_matrix():
    provider = companion_provider(HicksParams(0.8, 0.1))
    assert np.allclose(provider((2, 0)), [[0.0, 1.0], [-0.1, 0.9]])


def test_classify_complex_pair():
    result = classify(HicksParams(0.5, 0.5))
    assert result.discriminant == pytest.approx(-1.0)
    assert result.root_kind == "complex-pair"
    assert result.spectral_radius == pytest.approx(math.sqrt(0.5))
    assert result.stable
    assert result.roots_positive is None
    assert result.accelerator_class == "decelerator"


def test_classify_real_distinct():
    result = classify(HicksParams(0.8, 0.1))
    assert result.discriminant == pytest.approx(0.41)
    assert result.root_kind == "real-distinct"
    assert result.roots_positive
    assert result.stable
    moduli = sorted(abs(z) for z in result.roots.roots)
    assert moduli == pytest.approx([0.12984, 0.77016], abs=1e-5)


def test_classify_double_root_and_instability():
    assert classify(HicksParams(0.75, 0.25)).root_kind == "real-double"
    unit = classify(HicksParams(0.5, 1.0))
    assert unit.spectral_radius == pytest.approx(1.0)
    assert not unit.stable
    payload = unit.to_dict()
    assert payload["accelerator_class"] == "keeper"
    assert payload["stable"] is False


def test_particular_data_diagonal():
    window = (5, 5)
    field = solve_second_order(HicksParams(0.5, 0.5), particular_layers(1).to_boundary(window), window)
    diagonal = [field[(k, k)][0] for k in range(5)]
    assert diagonal == pytest.approx([1.0, 1.0, 0.5, 0.0, -0.25])
    for t in field.points():
        if t[0] != t[1]:
            assert field[t][0] == 0.0


def test_zero_boundary_gives_zero_field():
    boundary = BoundaryData.from_function(2, 1, (4, 6), lambda t: [0.0], layers=(0, 1))
    field = solve_second_order(HicksParams(0.3, 2.0), boundary, (4, 6))
    assert not np.any(field.values)


def test_second_order_solve_needs_both_layers():
    boundary = BoundaryData.from_function(2, 1, (4, 4), lambda t: [1.0])
    with pytest.raises(ContractError):
        solve_second_order(HicksParams(0.5, 0.5), boundary, (4, 4))


def test_incompatible_layers_are_refused():
    zeros = np.zeros((3, 1))
    tables = [
        FaceTable(0, 0, [[1.0], [0.0], [0.0]]),
        FaceTable(1, 0, [[2.0], [0.0], [0.0]]),
        FaceTable(0, 1, zeros),
        FaceTable(1, 1, zeros),
    ]
    with pytest.raises(IncompatibleBoundaryError):
        solve_second_order(HicksParams(0.5, 0.5), BoundaryData(2, 1, tables), (3, 3))


def test_seed_consumption_reproduces_first_step():
    p = HicksParams([0.6, 0.3], [0.9, 1.1])
    y0, y1 = 2.0, 1.5
    c0 = seed_consumption(p, y0, y1)
    ratio = float(p.alpha_phase(0)) / float(p.gamma_phase(-1))
    assert float(p.trace_phase(0)) * y0 - ratio * c0 == pytest.approx(y1)


def test_three_formulations_agree_on_random_models(rng):
    window = (6, 6)
    for _ in range(50):
        T = int(rng.integers(1, 4))
        p = HicksParams(list(rng.uniform(0.05, 0.95, size=T)), list(rng.uniform(0.05, 1.5, size=T)))
        grid = rng.uniform(-1.0, 1.0, size=window)
        boundary = BoundaryData.from_function(2, 1, window, lambda t: [grid[tuple(t)]], layers=(0, 1))
        state, spread = solve_all(p, boundary, window)
        assert spread <= 1e-9
        for t in state.income.points():
            if min(t) >= 1:
                expected = float(p.gamma_phase(min(t) - 1)) * state.income[shift(t, -1)][0]
                assert state.consumption[t][0] == pytest.approx(expected, rel=1e-9, abs=1e-10)


def test_threaded_solve_matches_serial(rng):
    window = (5, 7)
    grid = rng.uniform(0.0, 1.0, size=window)
    boundary = BoundaryData.from_function(2, 1, window, lambda t: [grid[tuple(t)]], layers=(0, 1))
    p = HicksParams([0.7, 0.4], [0.6, 1.2])
    serial, _ = solve_all(p, boundary, window)
    threaded, _ = solve_all(p, boundary, window, jobs=3)
    assert np.array_equal(serial.consumption.values, threaded.consumption.values)
    assert np.array_equal(serial.companion.values, threaded.companion.values)


def test_negativity_is_reported_not_raised():
    window = (5, 5)
    field = solve_second_order(HicksParams(0.5, 0.5), particular_layers(1).to_boundary(window), window)
    warnings = negativity_warnings(field, "Y")
    assert warnings == ["Y negative at (4,4): -0.25"]
    assert negativity_warnings(field, "Y", tol=0.5) == []


def test_negativity_warnings_are_capped():
    boundary = BoundaryData.from_function(2, 1, (6, 6), lambda t: [-1.0], layers=(0, 1))
    field = solve_second_order(HicksParams(0.5, 0.5), boundary, (6, 6))
    warnings = negativity_warnings(field, "Y", limit=3)
    assert len(warnings) == 4
    assert warnings[-1].endswith("further point(s)")


def test_constant_model_multipliers():
    quadratic = hicks_floquet_multipliers(HicksParams(0.5, 0.5), (0, 0))
    assert sorted(quadratic.roots, key=lambda z: z.imag) == pytest.approx([0.5 - 0.5j, 0.5 + 0.5j])


def test_periodic_model_multipliers_multiply_to_alpha_product():
    p = HicksParams([0.5, 0.5], [0.8, 1.25])
    for t in [(0, 0), (0, 3), (2, 0), (4, 5)]:
        quadratic = hicks_floquet_multipliers(p, t)
        product = quadratic.roots[0] * quadratic.roots[1]
        assert abs(product - 1.0) < 1e-12
        assert max(quadratic.moduli) == pytest.approx(1.0)


def test_monodromy_determinant_mismatch_is_a_numeric_failure(monkeypatch):
    monkeypatch.setattr("multitime.models.hicks.monodromy", lambda provider, T, t: np.diag([1.0, 2.0]))
    with pytest.raises(NumericFailure, match="alpha product") as excinfo:
        hicks_floquet_multipliers(HicksParams(0.5, 0.5), (0, 0))
    assert exit_code_for(excinfo.value) == 2
