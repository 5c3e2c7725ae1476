import numpy as np
import pytest

from lattice_cube.errors import BoxTooSmallError, CapacityError, LevelOutOfRangeError
from lattice_cube.lattice import GeneratingVector, nu_tilde
from lattice_cube.oracles import (
    box_points, check_admissible, count_dual_by_residue, default_order, direct_dft,
    direct_nu_tilde, dual_box_enumeration, explicit_kappa_map,
)


def test_direct_dft_examples():
    np.testing.assert_allclose(direct_dft(np.full(8, 3.0)), [3] + [0] * 7, atol=1e-15)
    np.testing.assert_allclose(direct_dft([1.0, 5.0]), [3.0, -2.0])
    assert direct_dft([7.0]).tolist() == [7.0]


def test_direct_dft_guards():
    with pytest.raises(CapacityError):
        direct_dft(np.zeros(2**15))
    with pytest.raises(ValueError):
        direct_dft(np.zeros(6))


def test_direct_dft_definition_small(rng):
    # literal triple loop over digits for m = 3
    y = rng.normal(size=8) + 1j * rng.normal(size=8)
    ref = np.zeros(8, complex)
    for nu in range(8):
        for i in range(8):
            digits = [(i >> ell) & 1 for ell in range(3)]
            phase = sum(digits[ell] * (nu % 2 ** (ell + 1)) / 2 ** (ell + 1) for ell in range(3))
            ref[nu] += y[i] * np.exp(-2j * np.pi * phase)
    np.testing.assert_allclose(direct_dft(y), ref / 8, atol=1e-14)


def test_dual_box(small_gv):
    box = dual_box_enumeration(small_gv, 6, 20)
    assert box.contains((0, 0))
    members = {tuple(k) for k in box.members.tolist()}
    assert all((-a, -b) in members for a, b in members)
    assert all(nu_tilde(small_gv, k, 6) == 0 for k in members)
    assert (-17, 3) in members and (17, 3) not in members
    assert len(box) == count_dual_by_residue(small_gv, 6, 20)
    assert nu_tilde(small_gv, (64, 0), 6) == 0


@pytest.mark.parametrize("d,m,radius", [(1, 3, 30), (2, 4, 9), (3, 5, 6), (3, 0, 2)])
def test_dual_counts_agree(shipped, d, m, radius):
    gv = shipped.project(d)
    assert len(dual_box_enumeration(gv, m, radius)) == count_dual_by_residue(gv, m, radius)


def test_box_guard():
    with pytest.raises(CapacityError):
        box_points(50, 5)
    assert box_points(1, 2).shape == (9, 2)


def test_default_order():
    pts = box_points(2, 2)
    ordered = pts[default_order(pts)]
    norms = np.abs(ordered).max(axis=1)
    assert np.all(np.diff(norms) >= 0)
    assert ordered[0].tolist() == [0, 0]
    assert ordered[1].tolist() == [-1, -1]


def test_explicit_map_examples(small_gv):
    km = explicit_kappa_map(small_gv, 6)
    assert km[0] == (0, 0)
    assert km[1] == (-1, 0)
    for m in range(7):
        check_admissible(small_gv, km, m)


def test_worked_assignment_is_admissible(small_gv):
    worked = [(0, 0), (-1, 0), (-1, 1), (1, 0), (-1, -1), (0, 1), (1, -1), (0, -1)]
    check_admissible(small_gv, worked, 3)
    bad = list(worked)
    bad[3], bad[7] = bad[7], bad[3]
    check_admissible(small_gv, bad, 3)  # both lie in the same level-2 coset
    bad[2], bad[3] = bad[3], bad[2]
    with pytest.raises(AssertionError):
        check_admissible(small_gv, bad, 3)


def test_explicit_map_box_growth(shipped):
    gv = shipped.project(2)
    km = explicit_kappa_map(gv, 10, radius=2)
    check_admissible(gv, km, 10)
    with pytest.raises(BoxTooSmallError):
        explicit_kappa_map(gv, 10, radius=2, max_radius=2)
    partial = explicit_kappa_map(gv, 10, radius=2, allow_outside=True)
    assert any(k is None for k in partial)
    assert all(k is None or max(map(abs, k)) <= 2 for k in partial)


def test_explicit_map_level_error(small_gv):
    with pytest.raises(LevelOutOfRangeError):
        explicit_kappa_map(small_gv, 7)


def test_direct_nu_tilde_agrees(rng):
    gv = GeneratingVector(3, 5, (1, 7, 100))
    for _ in range(50):
        k = rng.integers(-400, 400, size=3).tolist()
        for m in range(6):
            assert direct_nu_tilde(gv, k, m) == nu_tilde(gv, k, m)
