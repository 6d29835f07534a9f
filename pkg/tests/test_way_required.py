import numpy as np
import pytest

from multitime.core.errors import DimensionMismatchError
from multitime.recurrence.way_required import (
    AffineStep,
    PathRecurrence,
    closed_form_constant,
    solve_path,
    solve_path_chained,
)


def _linear(A1, A2, x0) -> PathRecurrence:
    return PathRecurrence(AffineStep(A1), AffineStep(A2), x0)


def test_origin_returns_initial_value():
    rec = _linear([[2.0]], [[3.0]], [1.5])
    assert np.array_equal(solve_path(rec, (0, 0)), [1.5])


def test_scalar_example():
    rec = _linear([[2.0]], [[3.0]], [1.0])
    assert solve_path(rec, (2, 3))[0] == 108.0
    assert closed_form_constant([[2.0]], [[3.0]], [1.0], (2, 3))[0] == 108.0


def test_step_order_matters_for_non_commuting_matrices():
    A1 = np.array([[1.0, 1.0], [0.0, 1.0]])
    A2 = np.array([[1.0, 0.0], [1.0, 1.0]])
    rec = _linear(A1, A2, [1.0, 0.0])
    assert np.array_equal(solve_path(rec, (1, 2)), [1.0, 2.0])
    assert np.array_equal(solve_path(rec, (2, 1)), [1.0, 1.0])
    assert np.array_equal(solve_path(rec, (1, 1)), A2 @ A1 @ [1.0, 0.0])
    assert not np.array_equal(solve_path(rec, (1, 1)), A1 @ A2 @ [1.0, 0.0])
    assert np.array_equal(closed_form_constant(A1, A2, [1.0, 0.0], (1, 2)), [1.0, 2.0])


def test_affine_steps_with_zero_matrices():
    c1, c2 = [1.0, -1.0], [4.0, 2.0]
    rec = PathRecurrence(AffineStep(np.zeros((2, 2)), c1), AffineStep(np.zeros((2, 2)), c2), [9.0, 9.0])
    assert np.array_equal(solve_path(rec, (0, 0)), [9.0, 9.0])
    assert np.array_equal(solve_path(rec, (3, 0)), c1)
    assert np.array_equal(solve_path(rec, (3, 2)), c2)
    assert np.array_equal(solve_path(rec, (0, 1)), c2)
    assert not rec.steps[0].linear


def test_steps_may_depend_on_position():
    rec = PathRecurrence(AffineStep([[1.0]], [1.0]), lambda t, x: x + t[1], [0.0])
    # 2 unit steps along t^1, then adds 0 + 1 + 2 along t^2
    assert solve_path(rec, (2, 3))[0] == 5.0


def test_random_linear_instances_match_closed_form(rng):
    for _ in range(100):
        n = int(rng.integers(1, 4))
        A1 = rng.uniform(-1.0, 1.0, size=(n, n))
        A2 = rng.uniform(-1.0, 1.0, size=(n, n))
        x0 = rng.uniform(-1.0, 1.0, size=n)
        t = tuple(int(c) for c in rng.integers(0, 6, size=2))
        walked = solve_path(_linear(A1, A2, x0), t)
        closed = closed_form_constant(A1, A2, x0, t)
        bound = np.linalg.norm(A1, 2) ** t[0] * np.linalg.norm(A2, 2) ** t[1] * np.linalg.norm(x0)
        assert np.max(np.abs(walked - closed)) <= 1e-12 * max(1.0, bound)


def test_path_is_additive_along_the_second_axis(rng):
    A1 = rng.uniform(-1.0, 1.0, size=(2, 2))
    A2 = rng.uniform(-1.0, 1.0, size=(2, 2))
    rec = _linear(A1, A2, [1.0, 2.0])
    start = solve_path(rec, (3, 0))
    continued = PathRecurrence(AffineStep(A1), AffineStep(A2), start)
    assert np.allclose(solve_path(rec, (3, 4)), solve_path(continued, (0, 4)), rtol=1e-13, atol=1e-15)


def test_chained_evaluation_over_three_axes():
    steps = [AffineStep([[2.0]]), AffineStep([[3.0]]), AffineStep([[5.0]])]
    assert solve_path_chained(steps, [1.0], (1, 2, 1))[0] == 90.0
    with pytest.raises(DimensionMismatchError):
        solve_path_chained(steps, [1.0], (1, 2))


def test_size_mismatches():
    with pytest.raises(DimensionMismatchError):
        PathRecurrence(AffineStep(np.eye(2)), AffineStep(np.eye(2)), [1.0])
    with pytest.raises(DimensionMismatchError):
        closed_form_constant(np.eye(2), np.eye(3), [1.0, 1.0], (1, 1))
    with pytest.raises(DimensionMismatchError):
        solve_path(_linear([[1.0]], [[1.0]], [1.0]), (1, 1, 1))
