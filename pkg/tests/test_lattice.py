import pytest
from hypothesis import given, seed
from hypothesis import strategies as st

from multitime.core.errors import DimensionMismatchError, LatticeDomainError, exit_code_for
from multitime.core.lattice import (
    MultiIndex,
    check_dimension,
    diag_decompose,
    diagonal_points,
    embed,
    in_window,
    mu,
    project,
    same_diagonal,
    shift,
    window_bases,
    window_points,
)


@pytest.mark.parametrize("t, level", [((0, 0), 0), ((3, 1, 2), 1), ((5, 5), 5), ((7,), 7)])
def test_mu_is_minimum_component(t, level):
    assert mu(t) == level


@pytest.mark.parametrize(
    "t, base, level",
    [
        ((3, 1, 2), (2, 0, 1), 1),
        ((4, 4), (0, 0), 4),
        ((0, 7), (0, 7), 0),
    ],
)
def test_diag_decompose(t, base, level):
    decomposition = diag_decompose(t)
    assert decomposition.base == base
    assert decomposition.level == level
    assert min(decomposition.base) == 0
    assert decomposition.reconstruct() == t


def test_shift_moves_along_the_diagonal():
    assert shift((1, 2), 2) == (3, 4)
    assert shift((1, 2), -1) == (0, 1)


def test_shift_out_of_lattice_raises():
    with pytest.raises(LatticeDomainError) as excinfo:
        shift((0, 2), -1)
    assert excinfo.value.components == (-1, 1)
    assert exit_code_for(excinfo.value) == 1


@pytest.mark.parametrize("components", [(), (-1, 2), (1.5, 2), (True, 0)])
def test_multi_index_rejects_invalid_components(components):
    with pytest.raises(LatticeDomainError):
        MultiIndex(components)


def test_multi_index_parse_and_to_string():
    t = MultiIndex.parse("3, 1,2")
    assert t == (3, 1, 2)
    assert t.m == 3
    assert t.to_string() == "3,1,2"
    with pytest.raises(LatticeDomainError):
        MultiIndex.parse("3,a")


def test_check_dimension():
    assert check_dimension((1, 2), 2) == (1, 2)
    with pytest.raises(DimensionMismatchError):
        check_dimension((1, 2, 3), 2)


def test_project_and_embed_are_inverse():
    t = MultiIndex((4, 0, 2))
    assert project(t, 1) == (4, 2)
    assert embed((4, 2), 1, 0) == t


def test_same_diagonal():
    assert same_diagonal((1, 3), (4, 6))
    assert not same_diagonal((1, 3), (3, 1))


def test_window_enumeration():
    points = list(window_points((2, 3)))
    assert points == sorted(points)
    assert len(points) == 6
    assert in_window((1, 2), (2, 3))
    assert not in_window((2, 0), (2, 3))


def test_window_bases_and_diagonals():
    bases = window_bases((3, 3))
    assert bases == [(0, 0), (0, 1), (0, 2), (1, 0), (2, 0)]
    assert diagonal_points((0, 1), (3, 3)) == [(0, 1), (1, 2)]
    assert diagonal_points((0, 0), (3, 4)) == [(0, 0), (1, 1), (2, 2)]
    covered = sorted(point for base in bases for point in diagonal_points(base, (3, 3)))
    assert covered == list(window_points((3, 3)))


@seed(1)
@given(st.lists(st.integers(min_value=0, max_value=10 ** 6), min_size=1, max_size=6))
def test_decomposition_reconstructs_any_point(components):
    decomposition = diag_decompose(components)
    assert decomposition.reconstruct() == tuple(components)
    assert min(decomposition.base) == 0
    assert decomposition.level == min(components)
