import numpy as np
import pytest

from multitime.core.errors import (
    BoundaryUnavailableError,
    ConfigValidationError,
    ContractError,
    DimensionMismatchError,
    IncompatibleBoundaryError,
)
from multitime.core.lattice import MultiIndex, window_points
from multitime.recurrence.boundary import BoundaryData, FaceTable, check_compatibility, require_compatible
from multitime.recurrence.field import SolutionField
from multitime.recurrence.providers import ConstantProvider, PeriodicTableProvider, provider_from_config
from multitime.recurrence.solver import (
    SWEEP_ORDERS,
    DiagonalRecurrence,
    fundamental_matrix,
    fundamental_residual,
    solve_explicit,
    solve_explicit_field,
    solve_homogeneous_via_phi,
    solve_iterative,
    solve_level_one,
    transfer_matrix,
)


def _random_shape(rng):
    m = int(rng.integers(2, 4))
    n = int(rng.integers(1, 4))
    window = (6, 6) if m == 2 else (4, 4, 4)
    periods = tuple(int(p) for p in rng.integers(1, 4, size=m))
    return m, n, window, periods


def test_explicit_matches_iterative_on_random_instances(rng, make_recurrence):
    for _ in range(200):
        m, n, window, periods = _random_shape(rng)
        rec = make_recurrence(m, n, window, periods, forced=bool(rng.integers(0, 2)))
        iterative = solve_iterative(rec, window)
        explicit = solve_explicit_field(rec, window)
        assert explicit.max_difference(iterative) <= 1e-9
        assert iterative.recurrence_residual(rec.coefficients, rec.forcing) <= 1e-12


def test_sweep_orders_are_bit_identical(make_recurrence):
    rec = make_recurrence(3, 2, (4, 5, 3), (2, 3, 1))
    reference = solve_iterative(rec, (4, 5, 3), order="level")
    for order in SWEEP_ORDERS:
        assert np.array_equal(solve_iterative(rec, (4, 5, 3), order=order).values, reference.values)
    threaded = solve_iterative(rec, (4, 5, 3), order="diagonal", jobs=2)
    assert np.array_equal(threaded.values, reference.values)


def test_unknown_sweep_order(make_recurrence):
    rec = make_recurrence(2, 1, (3, 3))
    with pytest.raises(ContractError):
        solve_iterative(rec, (3, 3), order="spiral")


def test_level_one_formula(make_recurrence):
    rec = make_recurrence(2, 2, (5, 5))
    field = solve_iterative(rec, (5, 5))
    for t in [(1, 1), (1, 4), (3, 1)]:
        assert np.allclose(solve_level_one(rec, t), field[t], rtol=1e-12, atol=1e-14)
    with pytest.raises(ContractError):
        solve_level_one(rec, (2, 3))


def test_phi_representation_of_homogeneous_solutions(make_recurrence):
    rec = make_recurrence(3, 2, (4, 4, 4), forced=False)
    for t in window_points((4, 4, 4)):
        assert np.allclose(solve_homogeneous_via_phi(rec, t), solve_explicit(rec, t), rtol=1e-12, atol=1e-14)
    forced = make_recurrence(2, 1, (3, 3), forced=True)
    with pytest.raises(ContractError):
        solve_homogeneous_via_phi(forced, (1, 1))


def test_fundamental_matrix_properties(make_recurrence):
    rec = make_recurrence(2, 3, (6, 6), (2, 3))
    assert fundamental_residual(rec.coefficients, (6, 6)) <= 1e-10
    assert np.array_equal(fundamental_matrix(rec, (0, 4)), np.eye(3))


def test_constant_coefficients_give_matrix_powers():
    A = np.array([[1.0, 2.0], [0.0, 1.0]])
    provider = ConstantProvider(2, A)
    assert np.allclose(transfer_matrix(provider, (3, 5)), np.linalg.matrix_power(A, 3))


def test_periodic_fundamental_matrix_order():
    table = np.arange(16, dtype=float).reshape(2, 2, 2, 2) / 10.0
    provider = PeriodicTableProvider(table, (2, 2))
    expected = provider((2, 4)) @ provider((1, 3)) @ provider((0, 2))
    assert np.allclose(transfer_matrix(provider, (3, 5)), expected)
    assert provider.natural_period == 2


def test_scalar_doubling(scalar_recurrence):
    rec = scalar_recurrence(a=2.0, b=0.0, f=1.0)
    assert solve_explicit(rec, (3, 5))[0] == pytest.approx(8.0)
    assert solve_iterative(rec, (6, 6))[(3, 5)][0] == pytest.approx(8.0)


def test_unit_forcing_counts_levels(scalar_recurrence):
    rec = scalar_recurrence(a=1.0, b=1.0, f=0.0, m=3, window=(4, 5, 6))
    field = solve_iterative(rec, (4, 5, 6))
    for t in field.points():
        assert field[t][0] == pytest.approx(min(t))


def test_identity_keeps_boundary_value(constant_boundary):
    boundary = constant_boundary(2, 2, (5, 5), [3.0, -1.5])
    rec = DiagonalRecurrence(ConstantProvider(2, np.eye(2)), boundary)
    field = solve_iterative(rec, (5, 5))
    assert np.all(field.values == np.array([3.0, -1.5]))


def test_recurrence_requires_two_times():
    with pytest.raises(ContractError):
        DiagonalRecurrence(ConstantProvider(1, [[1.0]]), BoundaryData(1, 1, []))


def test_recurrence_rejects_mismatched_boundary(constant_boundary):
    with pytest.raises(DimensionMismatchError):
        DiagonalRecurrence(ConstantProvider(2, np.eye(2)), constant_boundary(2, 1, (3, 3), 1.0))


def test_incompatible_faces_are_reported():
    tables = [FaceTable(0, 0, np.ones((3, 1))), FaceTable(1, 0, np.zeros((3, 1)))]
    boundary = BoundaryData(2, 1, tables)
    report = check_compatibility(boundary)
    assert not report.passed
    assert report.violations[0].point == MultiIndex((0, 0))
    assert len(report.violations) == 1
    with pytest.raises(IncompatibleBoundaryError) as excinfo:
        require_compatible(boundary)
    assert not excinfo.value.report.passed
    assert "(0,0)" in str(excinfo.value)


def test_constant_faces_are_compatible(constant_boundary):
    report = check_compatibility(constant_boundary(3, 2, (3, 3, 3), [1.0, 2.0]))
    assert report.passed
    assert report.checked_points > 0


def test_strict_policy_refuses_points_outside_tables(constant_boundary):
    rec = DiagonalRecurrence(ConstantProvider(2, [[1.0]]), constant_boundary(2, 1, (3, 3), 1.0))
    with pytest.raises(BoundaryUnavailableError):
        solve_explicit(rec, (2, 6))


def test_zero_policy_extends_with_zeros():
    boundary = BoundaryData.from_function(2, 1, (3, 3), lambda t: [1.0], policy="zero")
    assert np.array_equal(boundary.value((0, 7)), [0.0])
    assert np.array_equal(boundary.value((0, 2)), [1.0])
    with pytest.raises(BoundaryUnavailableError):
        boundary.value((1, 1))


def test_boundary_from_config_uses_one_based_faces():
    spec = {
        "faces": [
            {"face": 1, "layer": 0, "values": [1.0, 2.0, 3.0]},
            {"face": 2, "layer": 0, "values": [1.0, 5.0, 6.0]},
        ]
    }
    boundary = BoundaryData.from_config(spec, 2, 1)
    assert boundary.face_value(0, (2,))[0] == 3.0
    assert boundary.value((2, 0))[0] == 6.0
    assert check_compatibility(boundary).passed
    with pytest.raises(ConfigValidationError):
        BoundaryData.from_config({"policy": "strict"}, 2, 1)


def test_field_csv_round_trip(tmp_path, make_recurrence):
    rec = make_recurrence(2, 2, (4, 5))
    field = solve_iterative(rec, (4, 5))
    path = field.to_csv(tmp_path / "solution.csv")
    restored = SolutionField.from_csv(path)
    assert restored.window == field.window
    assert restored.max_difference(field) <= 1e-15
    frame = field.to_frame()
    assert list(frame.columns) == ["t1", "t2", "component", "value"]
    assert len(frame) == 4 * 5 * 2


def test_complex_field_writes_imaginary_column(tmp_path):
    field = SolutionField.empty((2, 2), 1, dtype=complex)
    field[(1, 1)] = 1.0 + 2.0j
    assert "imag" in field.to_frame().columns
    restored = SolutionField.from_csv(field.to_csv(tmp_path / "complex.csv"))
    assert restored[(1, 1)][0] == 1.0 + 2.0j


def test_providers_from_config():
    constant = provider_from_config(2, 2, {"kind": "constant", "matrix": [[1, 0], [0, 2]]})
    assert constant.exact
    assert np.array_equal(constant((4, 1)), [[1.0, 0.0], [0.0, 2.0]])

    periodic = provider_from_config(2, 1, {"kind": "periodic", "periods": [2, 3],
                                           "table": [[[[1]], [[2]], [[3]]], [[[4]], [[5]], [[6]]]]})
    assert periodic((3, 4))[0, 0] == 5.0
    assert periodic.natural_period == 6

    forcing = provider_from_config(2, 2, None, vector=True)
    assert forcing.is_zero


@pytest.mark.parametrize(
    "spec",
    [
        {"kind": "spline", "matrix": [[1]]},
        {"kind": "constant"},
        {"kind": "constant", "matrix": [[1, 0], [0, 1]]},
        {"kind": "periodic", "periods": [2], "table": [[[1]], [[2]]]},
    ],
)
def test_invalid_provider_configs(spec):
    with pytest.raises(ConfigValidationError):
        provider_from_config(2, 1, spec)


def test_provider_validates_point_dimension():
    provider = ConstantProvider(2, [[1.0]])
    with pytest.raises(DimensionMismatchError):
        provider((1, 2, 3))
