import numpy as np
import pytest

from lattice_cube.cone import (
    ConeSpec, GeometricInflation, GeometricOmega, OmegaInflation, cone_from_omegas,
    cone_membership_audit, default_cone, error_bound, guaranteed_level, oracle_s_tilde,
)
from lattice_cube.errors import PrematureCheckError
from lattice_cube.integrands import FourierPolynomial, PoissonProduct, constant, product_cosine
from lattice_cube.kappa import KappaNuMap, initial_map, s_tilde
from lattice_cube.lattice import Shift, nodes, shifted_value
from lattice_cube.oracles import explicit_kappa_map
from lattice_cube.transform import SpectralArray, transform


def audit_cone():
    return cone_from_omegas(4, 4, GeometricOmega(2.0, 0.7, 1.0), GeometricOmega(6.0, 0.6))


def test_default_cone():
    c = default_cone()
    assert (c.ell_star, c.r, c.initial_level) == (6, 4, 10)
    assert c.C(10) == pytest.approx(0.0048828125)
    for m in range(30):
        assert c.C(m + 1) / c.C(m) == pytest.approx(0.5)
    assert c.to_dict()["inflation"] == {"form": "geometric", "scale": 5.0, "ratio": 2.0}


def test_omega_form():
    oh, orr = GeometricOmega(2.0, 0.5), GeometricOmega(1.0, 0.5)
    c = cone_from_omegas(3, 2, oh, orr)
    prod = oh(2) * orr(2)
    for m in range(12):
        assert c.C(m) == pytest.approx(oh(m) * orr(2) / (1 - prod))
    assert c.to_dict()["inflation"]["form"] == "omega"
    ConeSpec(3, 2, OmegaInflation(oh, orr, 2), oh, orr)
    with pytest.raises(ValueError):
        ConeSpec(3, 2, GeometricInflation(), oh, orr)


def test_cone_validation():
    with pytest.raises(ValueError):
        ConeSpec(0, 4)
    with pytest.raises(ValueError):
        ConeSpec(2, 0)
    with pytest.raises(ValueError):
        ConeSpec(2, 2, omega_hat=GeometricOmega(1, 1))
    with pytest.raises(ValueError):
        cone_from_omegas(2, 2, GeometricOmega(2, 1), GeometricOmega(1, 1))
    with pytest.raises(ValueError):
        ConeSpec(2, 2, lambda m: -1.0).C(3)
    assert GeometricOmega(5, 0.5, cap=1)(0) == 1


def test_error_bound_examples():
    c = default_cone()
    spec = transform(np.full(1024, 4.0))
    km = initial_map(spec)
    rep = error_bound(c, spec, km, tolerance=1e-9)
    assert rep.bound == 0 and rep.satisfied and rep.ell == 6
    coeffs = np.zeros(1024, complex)
    coeffs[32] = 0.2  # block 6 holds kappa 32..63
    sp = SpectralArray(coeffs, 10)
    rep = error_bound(c, sp, KappaNuMap.identity(10), tolerance=1e-3)
    assert rep.s_tilde == pytest.approx(0.2)
    assert rep.bound == pytest.approx(5 * 2**-10 * 0.2)
    assert rep.satisfied
    with pytest.raises(PrematureCheckError):
        error_bound(c, transform(np.ones(512)), KappaNuMap.identity(9))


def test_audit_trivial_cases(shipped):
    cone = audit_cone()
    rep = cone_membership_audit(constant(1.0, 2), shipped, cone, 8, 8)
    assert rep.passed and np.all(rep.S[1:] == 0) and np.all(rep.S_check == 0)
    km = explicit_kappa_map(shipped.project(2), 8, 8)
    l = km[37]
    rep = cone_membership_audit(FourierPolynomial([l], [1.0]), shipped, cone, 8, 8, kmap=km)
    assert rep.S[6, 0] == pytest.approx(1.0) and rep.S[:, 1].sum() == pytest.approx(1.0)
    assert np.all(rep.S_check[6:, 1] == 0)


def test_audit_product_cosine(shipped):
    rep = cone_membership_audit(product_cosine(2, 0.3), shipped, audit_cone(), 12, 40)
    assert rep.passed, rep.message


def test_audit_rejects_out_of_cone(shipped):
    # all mass on one large wavenumber: blocks l >= ell_star are empty but the tail is not
    km = explicit_kappa_map(shipped.project(2), 10, 40)
    f = FourierPolynomial([(0, 0), km[900]], [1.0, 0.5])
    rep = cone_membership_audit(f, shipped, audit_cone(), 10, 40, kmap=km)
    assert rep.status == "fail" and rep.violations


def test_audit_inconclusive_truncation(shipped):
    rep = cone_membership_audit(PoissonProduct(1, 0.3), shipped, audit_cone(), 10, 15)
    assert 1e-10 < rep.tail < 1e-6
    assert rep.status == "inconclusive"


def test_audit_needs_omegas(shipped):
    with pytest.raises(ValueError):
        cone_membership_audit(constant(1.0, 1), shipped, default_cone(), 6, 4)


def test_bound_chain_on_audited_integrand(shipped):
    """true error <= S_hat_0 <= omega_hat S_check <= ... <= C(m) S~ for every checked level."""
    cone = audit_cone()
    f = PoissonProduct(1, 0.7)
    M = 14
    km = explicit_kappa_map(shipped.project(1), M, 3000, allow_outside=True)
    rep = cone_membership_audit(f, shipped, cone, M, 3000, kmap=km)
    assert rep.passed
    gv = shipped.project(1)
    shift = Shift.draw(1, 5)
    y = f(shifted_value(nodes(gv, 0, 2**M), shift.delta))
    for m in range(cone.initial_level, M + 1):
        spec = transform(y[:2**m])
        ell = m - cone.r
        err = abs(spec.coeffs[0].real - 1.0)
        s_hat0 = rep.S_hat[0, m, 1]
        chain = [err, s_hat0, cone.omega_hat(m) * rep.S_check[m, 1],
                 cone.omega_hat(m) * cone.omega_ring(cone.r) * rep.S[ell, 1],
                 cone.C(m) * oracle_s_tilde(spec, gv, km, ell)]
        for a, b in zip(chain, chain[1:]):
            assert a <= b + 1e-9
        # bracket S_l <= S~ / (1 - omega_hat omega_ring) for the explicit map
        prod = cone.omega_hat(cone.r) * cone.omega_ring(cone.r)
        assert rep.S[ell, 0] <= oracle_s_tilde(spec, gv, km, ell) / (1 - prod) + 1e-9
        # the adaptive map's sum is bounded by the same inflated bound
        assert cone.C(m) * s_tilde(spec, initial_map(spec), ell) >= err - 1e-12


def test_guaranteed_level(shipped):
    cone = audit_cone()
    rep = cone_membership_audit(product_cosine(2, 0.5), shipped, cone, 12, 20)
    ms = guaranteed_level(rep, cone, 1e-3)
    assert ms is not None and cone.initial_level <= ms <= 12
    assert guaranteed_level(rep, cone, 1e-300) in (None, 12) or ms <= 12
