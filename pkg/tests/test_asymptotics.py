import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from blochdisp import asymptotics as A
from blochdisp.media import ContractViolation, DomainError, Lattice, Materials, WaveContext
from presets import IDENTICAL, MERCURY_IN_WATER, MILD, RIGID, SOFT, WATER_IN_AIR

pos = st.floats(0.05, 20.0)


def test_alpha():
    assert A.alpha(IDENTICAL) == 0
    assert A.alpha(MERCURY_IN_WATER) == pytest.approx(0.862069, abs=1e-6)
    assert A.alpha(Materials(1.0, 1.0, 1e12, 1.0)) == pytest.approx(1.0, abs=1e-11)
    with pytest.raises(ContractViolation):
        A.alpha(RIGID)


@given(pos, pos)
def test_alpha_range(rp, rm):
    assert -1 < A.alpha(Materials(rp, 1.0, rm, 1.0)) < 1


def test_c1_values():
    assert A.c1_term(2, IDENTICAL, 0.3) == 0
    assert A.c1_term(3, IDENTICAL, 0.3) == 0
    assert A.c1_term(2, WATER_IN_AIR, 1.0) == pytest.approx(0.99527, abs=1e-5)
    assert A.c1_term(2, MERCURY_IN_WATER, 1.0) == pytest.approx(0.80131, abs=1e-5)
    assert A.c1_term(3, WATER_IN_AIR, 1.0) == pytest.approx(0.497366, abs=1e-6)
    assert A.c1_term(3, MERCURY_IN_WATER, 1.0) == pytest.approx(0.41646, abs=1e-5)
    with pytest.raises(ContractViolation):
        A.c1_term(3, RIGID, 0.1)
    with pytest.raises(DomainError):
        A.c1_term(4, MILD, 0.1)


def test_impedance_form_values():
    assert A.c1_impedance_form(2, IDENTICAL) == 0
    assert A.c1_impedance_form(2, WATER_IN_AIR) == pytest.approx(0.99527, abs=1e-5)
    # (1000 - 4.8)/2001.2 + 6.45e-5
    assert A.c1_impedance_form(3, WATER_IN_AIR) == pytest.approx(0.497366, abs=1e-6)
    with pytest.raises(DomainError):
        A.c1_impedance_form(2, Materials(1.0, 1.0, 2.0, 0.0))


@given(pos, pos, pos, pos, st.sampled_from([2, 3]))
def test_impedance_identity(rp, gp, rm, gm, dim):
    m = Materials(rp, gp, rm, gm)
    assert A.c1_impedance_form(dim, m) == pytest.approx(A.c1_term(dim, m, 1.0), rel=1e-12, abs=1e-14)


@given(pos, pos, pos, st.sampled_from([2, 3]))
def test_slow_scatterers_slow_the_wave(rp, rm, slow, dim):
    # c_- < c_+ means gamma_- rho_- > gamma_+ rho_+
    assume(slow > 1.0 + 1e-9)
    m = Materials(rp, 1.0, rm, slow * rp / rm)
    assert m.c_in < m.c_host
    assert A.c1_term(dim, m, 1.0) > 0


def test_c2_limits():
    assert A.c2_term(2, IDENTICAL, 1.0, 0.1, 1.0, 0.2) == 0
    assert A.c2_term(3, IDENTICAL, 1.0, 0.1, 1.0, 0.2) == pytest.approx(0, abs=1e-18)
    near_rigid = Materials(1.0, 1.0, 1e12, 0.0)
    wac, f = 0.2, 0.05
    assert A.c2_term(2, near_rigid, wac, 1.0, 1.0, f) == pytest.approx(1.5 * wac ** 2 * f, rel=1e-11)
    assert A.c2_term(3, near_rigid, wac, 1.0, 1.0, f) == pytest.approx(0.15 * wac ** 2 * f, rel=1e-11)


def test_quadrupole_rigid_limit():
    near_rigid = Materials(1.0, 1.0, 1e12, 0.0)
    assert A.quadrupole_term(near_rigid, 1.0, 0.1, 1.0, 0.01) == pytest.approx(
        A.quadrupole_term_neumann(1.0, 0.1, 1.0, 0.01), rel=1e-11)
    assert A.quadrupole_term(IDENTICAL, 1.0, 0.1, 1.0, 0.01) == 0


def test_ksq_examples():
    w = WaveContext(1.0, Lattice.orthorhombic().radius_for_fraction(0.3), (1.0, 0.0, 0.0))
    r = A.ksq(RIGID, Lattice.orthorhombic(), w, allow_overlap=True)
    a2 = (3 * 0.3 * 3 / (4 * math.pi)) ** (2 / 3)
    assert r.k_squared == pytest.approx(1 + 0.15 + 0.15 * a2 * 0.3, rel=1e-14)
    assert r.k_squared == pytest.approx(1.1661, abs=5e-5)
    assert r.remainder_order == "a^6"
    r = A.ksq(SOFT, Lattice.cubic(), WaveContext(1.0, 0.05, (1.0, 0.0, 0.0)))
    assert r.k_squared == pytest.approx(1 - 4 * math.pi * 0.05, rel=1e-14)
    assert r.remainder_order == "a^2"
    r = A.ksq(SOFT, Lattice.square(), WaveContext(1.0, 0.01, (1.0, 0.0)))
    assert r.k_squared == pytest.approx(1 - 2 * math.pi / math.log(0.01), rel=1e-14)
    assert r.k_squared == pytest.approx(2.36438, abs=1e-5)
    assert r.remainder_order == "ln^-2"


def test_ksq_overlap_guard():
    a = Lattice.orthorhombic().radius_for_fraction(0.3)
    with pytest.raises(DomainError):
        A.ksq(RIGID, Lattice.orthorhombic(), WaveContext(1.0, a, (1.0, 0.0, 0.0)))


def test_dirichlet_non_propagating_flag():
    r = A.ksq(SOFT, Lattice.cubic(), WaveContext(1.0, 0.1, (1.0, 0.0, 0.0)))
    assert not r.propagating
    with pytest.raises(DomainError):
        r.k


def test_log_regime_guard():
    with pytest.raises(DomainError, match="asymptotic regime"):
        A.ksq(MILD, Lattice.square(), WaveContext(25.0, 0.045, (1.0, 0.0)))
    with pytest.raises(DomainError):
        A.group_velocity_ratio(2, MILD, 0.01, 1.2)


def test_zero_frequency_rejected_for_dispersion():
    with pytest.raises(DomainError):
        A.ksq(MILD, Lattice.square(), WaveContext(0.0, 0.05, (1.0, 0.0)))


@pytest.mark.parametrize("m", [MILD, WATER_IN_AIR, RIGID, SOFT])
@pytest.mark.parametrize("dim", [2, 3])
def test_no_inclusion(m, dim):
    lat = Lattice.square() if dim == 2 else Lattice.cubic()
    omega = 0.7 * m.c_host
    r = A.ksq(m, lat, WaveContext.along(omega, 0.0, np.eye(dim)[0]))
    assert r.k_squared == pytest.approx(0.49, rel=1e-15)
    assert all(v == 0 for _, v in r.correction_terms)


@given(st.floats(0.01, 5.0), st.floats(0.0, 0.3), st.sampled_from([2, 3]),
       st.sampled_from([MILD, WATER_IN_AIR, MERCURY_IN_WATER, RIGID, SOFT]))
def test_ksq_is_base_plus_terms(woc, a, dim, m):
    lat = Lattice.square() if dim == 2 else Lattice.cubic()
    assume(woc * a < 1)
    r = A.ksq(m, lat, WaveContext.along(woc * m.c_host, a, np.eye(dim)[0]))
    assert r.base == pytest.approx(woc * woc, rel=1e-14)
    assert r.k_squared == r.base + sum(v for _, v in r.correction_terms)


@given(st.floats(0.01, 5.0), st.floats(0.0, 0.45), st.sampled_from([2, 3]))
def test_zero_contrast_fixed_point(woc, a, dim):
    lat = Lattice.square() if dim == 2 else Lattice.cubic()
    assume(woc * a < 1)
    w = WaveContext.along(woc, a, np.eye(dim)[0])
    assert A.ksq(IDENTICAL, lat, w).k_squared == woc * woc
    assert A.group_velocity(IDENTICAL, lat, w) == 1.0
    assert A.phase_velocity(IDENTICAL, lat, w) == 1.0


def test_velocity_examples():
    assert A.group_velocity_ratio(3, RIGID, 0.0, 0.5) == 1.0
    assert A.phase_velocity_ratio(2, MILD, 0.0, 0.5) == 1.0
    assert A.group_velocity_ratio(3, RIGID, 0.3, 0.0) == pytest.approx(0.925, rel=1e-15)
    assert A.phase_velocity_ratio(3, RIGID, 0.3, 0.0) == pytest.approx(0.925, rel=1e-15)
    lat = Lattice.orthorhombic()
    a = lat.radius_for_fraction(0.3)
    w = WaveContext(1.0, a, (1.0, 0.0, 0.0))
    assert A.group_velocity(RIGID, lat, w, allow_overlap=True) == pytest.approx(0.90078, abs=1e-5)
    assert A.phase_velocity(RIGID, lat, w, allow_overlap=True) == pytest.approx(0.91693, abs=1e-5)
    with pytest.raises(ContractViolation):
        A.group_velocity_ratio(3, SOFT, 0.1, 0.1)


@given(st.floats(0.0, 0.3), st.sampled_from([MILD, WATER_IN_AIR, MERCURY_IN_WATER]), st.sampled_from([2, 3]))
def test_long_wavelength_velocities_agree(f, m, dim):
    g = A.group_velocity_ratio(dim, m, f, 0.0)
    p = A.phase_velocity_ratio(dim, m, f, 0.0)
    assert g == p == pytest.approx(1 - 0.5 * A.c1_term(dim, m, f), rel=1e-15)


def test_neumann_limit_grid():
    trans = Materials(1.0, 1.0, 1e12, 0.0)
    for dim in (2, 3):
        for woc in (0.1, 0.5, 1.0, 2.0):
            for f in (1e-3, 1e-2, 0.05, 0.1):
                lat = Lattice.square() if dim == 2 else Lattice.cubic()
                a = lat.radius_for_fraction(f)
                w = WaveContext.along(woc, a, np.eye(dim)[0])
                assert A.ksq(trans, lat, w).k_squared == pytest.approx(A.ksq(RIGID, lat, w).k_squared, rel=1e-9)
                assert A.group_velocity(trans, lat, w) == pytest.approx(A.group_velocity(RIGID, lat, w), rel=1e-9)
                assert A.phase_velocity(trans, lat, w) == pytest.approx(A.phase_velocity(RIGID, lat, w), rel=1e-9)


@pytest.mark.parametrize("dim,m", [(2, MILD), (3, MILD), (2, RIGID), (3, WATER_IN_AIR)])
def test_smooth_in_frequency(dim, m):
    lat = Lattice.square() if dim == 2 else Lattice.cubic()
    omega0 = 0.8 * m.c_host

    def k2(om):
        return A.ksq(m, lat, WaveContext.along(om, 0.05, np.eye(dim)[0])).k_squared

    h = 0.05 * omega0
    d = [(k2(omega0 + s) - k2(omega0 - s)) / (2 * s) for s in (h, h / 2, h / 4)]
    ratio = (d[0] - d[1]) / (d[1] - d[2])
    assert ratio == pytest.approx(4.0, rel=0.05)


def test_group_velocity_matches_frequency_derivative():
    # c*/c from the formula equals (d|k|/d omega)^-1 * (1/c) up to higher order terms
    lat = Lattice.cubic()
    m = RIGID
    a = 0.1

    def k(om):
        return A.ksq(m, lat, WaveContext(om, a, (1.0, 0.0, 0.0))).k

    om, h = 1.0, 1e-5
    dk = (k(om + h) - k(om - h)) / (2 * h)
    f = 4 * math.pi * a ** 3 / 3
    assert 1 / dk == pytest.approx(A.group_velocity_ratio(3, m, f, om * a), abs=5 * f * f)


def test_c1_canary_hook():
    m = MILD
    ref = A.c1_term(2, m, 0.1)
    old = A._C1_PERTURBATION
    A._C1_PERTURBATION = 1e-6
    try:
        assert A.c1_term(2, m, 0.1) == pytest.approx(ref * (1 + 1e-6), rel=1e-15)
    finally:
        A._C1_PERTURBATION = old
