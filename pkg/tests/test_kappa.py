import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_cube.errors import LevelOutOfRangeError, MergeLevelError
from lattice_cube.integrands import FourierPolynomial
from lattice_cube.kappa import KappaNuMap, block_bounds, block_sums, extend, initial_map, s_tilde
from lattice_cube.lattice import Shift, nodes, nu_tilde, shifted_value
from lattice_cube.transform import SpectralArray, transform


def spectrum(values):
    return SpectralArray(np.asarray(values, dtype=complex), int(np.log2(len(values))))


def test_pure_append_on_equal_magnitudes():
    km = KappaNuMap(np.array([0, 3, 2, 1]), 2)
    out = extend(km, spectrum(np.ones(8)), r=4)
    assert out.perm.tolist() == [0, 3, 2, 1, 4, 7, 6, 5]


def test_hand_executed_swap():
    km = KappaNuMap.identity(1)
    out = extend(km, spectrum([1.0, 0.1, 0.5, 0.9]), r=4)
    assert out.perm.tolist() == [0, 3, 2, 1]


def test_ties_keep_incumbent():
    out = extend(KappaNuMap.identity(1), spectrum([1.0, 0.4, 0.0, 0.4]), r=2)
    assert out.perm.tolist() == [0, 1, 2, 3]


def test_zero_never_moves():
    out = extend(KappaNuMap.identity(1), spectrum([0.0, 0.0, 5.0, 0.0]), r=2)
    assert out.perm[0] == 0


def test_lag_limits_swaps():
    mag = np.zeros(16)
    mag[3] = 1.0  # beats perm[1] = 1 only in the level-1 comparison
    km = KappaNuMap.identity(3)
    assert extend(km, spectrum(mag), r=1).perm[1] == 1
    assert extend(km, spectrum(mag), r=3).perm[1] == 3


def test_level_mismatch():
    with pytest.raises(MergeLevelError):
        extend(KappaNuMap.identity(2), spectrum(np.ones(4)), r=2)
    with pytest.raises(ValueError):
        KappaNuMap(np.arange(5), 2)


def check_invariants(km):
    n = len(km.perm)
    assert sorted(km.perm.tolist()) == list(range(n))
    assert km.perm[0] == 0
    for ell in range(km.level + 1):
        mod = 2**ell
        res = km.perm % mod
        # residue mod b**l depends only on kappa mod b**l
        assert np.all(res.reshape(-1, mod) == res[:mod])
        assert sorted(res[:mod].tolist()) == list(range(mod))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.lists(st.integers(1, 6), min_size=1,
                                                                max_size=12))
def test_random_extension_sequences(seed, top, lags):
    rng = np.random.default_rng(seed)
    km = KappaNuMap.identity(0)
    for m in range(1, top + 1):
        mags = rng.exponential(size=2**m) * rng.choice([0.0, 1.0], p=[0.1, 0.9], size=2**m)
        km = extend(km, spectrum(mags), r=lags[m % len(lags)])
        check_invariants(km)


def test_initial_map_invariants(rng):
    for m in range(0, 10):
        km = initial_map(spectrum(rng.normal(size=2**m)))
        check_invariants(km)


def test_block_bounds():
    assert block_bounds(0, 2) == (0, 1)
    assert block_bounds(1, 2) == (1, 2)
    assert block_bounds(4, 2) == (8, 16)
    assert block_bounds(2, 3) == (3, 9)


def test_s_tilde_examples(rng):
    y = rng.normal(size=32)
    spec = transform(y)
    km = initial_map(spec)
    assert s_tilde(spec, km, 0) == pytest.approx(abs(y.mean()))
    assert sum(block_sums(spec, km)) == pytest.approx(np.abs(spec.coeffs).sum())
    with pytest.raises(LevelOutOfRangeError):
        s_tilde(spec, km, 6)
    const = transform(np.full(32, 2.0))
    assert all(s_tilde(const, km, ell) == 0 for ell in range(1, 6))


def test_s_tilde_single_character(small_gv):
    l = (2, 1)
    m = 6
    shift = Shift.draw(2, 11)
    f = FourierPolynomial([l], [1.0])
    spec = transform(f(shifted_value(nodes(small_gv, 0, 64), shift.delta)))
    km = initial_map(spec)
    kappa = int(np.nonzero(km.perm == nu_tilde(small_gv, l, m))[0][0])
    sums = block_sums(spec, km)
    block = int(np.ceil(np.log2(kappa + 1))) if kappa else 0
    assert sums[block] == pytest.approx(1.0, abs=1e-10)
    assert np.delete(sums, block) == pytest.approx(0.0, abs=1e-10)
