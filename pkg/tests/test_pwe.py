import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from blochdisp import asymptotics as A, dtn, pwe, specfun
from blochdisp.media import ContractViolation, DomainError, Lattice, Materials, WaveContext, filling_fraction
from presets import IDENTICAL, MILD, RIGID, SOFT

LATTICES = [Lattice.square(), Lattice.hexagonal(), Lattice.cubic(), Lattice.orthorhombic()]


@pytest.mark.parametrize("lat", LATTICES)
def test_reciprocal_basis(lat):
    b = pwe.ReciprocalBasis.build(lat, 3)
    assert np.allclose(b.g_vectors @ lat.matrix.T, 2 * math.pi * np.eye(lat.dim), atol=1e-12, rtol=0)
    idx = {tuple(i) for i in b.indices}
    assert all(tuple(-np.array(i)) in idx for i in idx)
    assert b.size == 7 ** lat.dim


def _disk_transform(Gnorm, a, cell_volume, n=400):
    # direct quadrature of the indicator over the disk: (1/|Pi|) int exp(-i G.r) dr
    r, wr = np.polynomial.legendre.leggauss(n)
    r = 0.5 * a * (r + 1)
    wr = 0.5 * a * wr
    th = 2 * math.pi * np.arange(n) / n
    vals = np.exp(-1j * Gnorm * np.outer(r, np.cos(th))).sum(axis=1) * (2 * math.pi / n)
    return float(np.real(np.sum(wr * r * vals))) / cell_volume


def _ball_transform(Gnorm, a, cell_volume, n=200):
    r, wr = np.polynomial.legendre.leggauss(n)
    r = 0.5 * a * (r + 1)
    wr = 0.5 * a * wr
    t, wt = np.polynomial.legendre.leggauss(n)
    inner = (wt[None, :] * np.cos(Gnorm * np.outer(r, t))).sum(axis=1) * 2 * math.pi
    return float(np.sum(wr * r * r * inner)) / cell_volume


@pytest.mark.parametrize("Gnorm", [0.5, 6.0, 25.0, 80.0])
def test_shape_factor_against_quadrature(Gnorm):
    a = 0.2
    assert pwe.inclusion_fourier_coeff(2, [Gnorm, 0.0], a, 1.0, 1.0, 0.0) == pytest.approx(
        _disk_transform(Gnorm, a, 1.0), rel=1e-10, abs=1e-14)
    assert pwe.inclusion_fourier_coeff(3, [0.0, Gnorm, 0.0], a, 1.0, 1.0, 0.0) == pytest.approx(
        _ball_transform(Gnorm, a, 1.0), rel=1e-10, abs=1e-14)


def test_fourier_coeff_examples():
    a, vol = 0.1, 1.0
    f2, f3 = math.pi * a * a, 4 * math.pi * a ** 3 / 3
    assert pwe.inclusion_fourier_coeff(2, [0.0, 0.0], a, vol, 3.0, 1.0) == pytest.approx(1.0 + 2.0 * f2)
    assert pwe.inclusion_fourier_coeff(3, [0.0, 0.0, 0.0], a, vol, 3.0, 1.0) == pytest.approx(1.0 + 2.0 * f3)
    # continuity at small |G| a
    for dim, f in ((2, f2), (3, f3)):
        G = [1e-7] + [0.0] * (dim - 1)
        assert pwe.inclusion_fourier_coeff(dim, G, a, vol, 3.0, 1.0) == pytest.approx(2.0 * f, rel=1e-12)
        G = [1e-2] + [0.0] * (dim - 1)
        assert pwe.inclusion_fourier_coeff(dim, G, a, vol, 3.0, 1.0) == pytest.approx(2.0 * f, rel=1e-6)
    x1 = specfun.bisect_root(lambda x: specfun.bessel_j(1, x), 3.0, 4.5)
    assert abs(pwe.inclusion_fourier_coeff(2, [x1 / a, 0.0], a, vol, 3.0, 1.0)) < 1e-14
    x3 = specfun.bisect_root(lambda x: math.sin(x) - x * math.cos(x), 4.0, 5.0)
    assert abs(pwe.inclusion_fourier_coeff(3, [x3 / a, 0.0, 0.0], a, vol, 3.0, 1.0)) < 1e-14
    with pytest.raises(DomainError):
        pwe.inclusion_fourier_coeff(2, [1.0, 0.0], -0.1, vol, 1.0, 1.0)


def test_band_problem_structure():
    s = pwe.PlaneWaveSolver(MILD, Lattice.hexagonal(), 0.15, 5)
    prob = s.problem([0.4, -0.2])
    assert prob.hermiticity_defect() < 1e-12
    assert np.linalg.eigvalsh(prob.B).min() > 0
    assert np.linalg.eigvalsh(prob.A).min() > -1e-12 * np.linalg.norm(prob.A)


@given(st.floats(0.01, 100.0), st.floats(0.0, 100.0), st.floats(0.01, 0.45))
def test_mass_matrix_positive_definite(gp, gm, a):
    s = pwe.PlaneWaveSolver(Materials(1.0, gp, 1.0, gm), Lattice.square(), a, 3)
    assert np.linalg.eigvalsh(s.gamma_hat).min() > 0


def test_indefinite_mass_matrix_rejected():
    m = Materials(1.0, 1.0, 1.0, 1.0)
    object.__setattr__(m, "gamma_minus", -5.0)  # bypass validation to reach the solver guard
    with pytest.raises(DomainError, match="positive definite"):
        pwe.PlaneWaveSolver(m, Lattice.square(), 0.45, 4)


@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_homogeneous_is_exact(kx, ky):
    k = math.hypot(kx, ky)
    w = pwe.lowest_band_omega(IDENTICAL, Lattice.square(), 0.2, [kx, ky], 3)
    assert w == pytest.approx(k, rel=1e-10, abs=1e-14)


def test_no_inclusion_equals_host():
    host = Materials(1.0, 2.0, 5.0, 0.1)
    assert pwe.lowest_band_omega(host, Lattice.cubic(), 0.0, [0.3, 0.1, 0.0], 3) == pytest.approx(
        math.hypot(0.3, 0.1) * host.c_host, rel=1e-12)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_time_reversal(kx, ky):
    s = pwe.PlaneWaveSolver(MILD, Lattice.hexagonal(), 0.1, 5)
    assert s.omega([kx, ky]) == pytest.approx(s.omega([-kx, -ky]), rel=1e-12, abs=1e-14)


def test_rayleigh_ritz_monotone():
    k = [0.3, 0.1]
    om = [pwe.lowest_band_omega(MILD, Lattice.square(), 0.15, k, M) for M in (2, 4, 6, 8, 10)]
    for lo, hi in zip(om[1:], om[:-1]):
        assert lo ** 2 <= hi ** 2 * (1 + 1e-12)


def test_self_convergence_m10_m14():
    w10 = pwe.lowest_band_omega(MILD, Lattice.square(), 0.05, [0.3, 0.0], 10)
    w14 = pwe.lowest_band_omega(MILD, Lattice.square(), 0.05, [0.3, 0.0], 14)
    assert abs(w10 - w14) / w14 < 1e-6


def test_hellmann_feynman_slope():
    s = pwe.PlaneWaveSolver(MILD, Lattice.square(), 0.1, 6)
    t, h = 0.7, 1e-5
    om, slope = s.omega_and_slope(t, [0.6, 0.8])
    fd = (s.omega((t + h) * np.array([0.6, 0.8])) - s.omega((t - h) * np.array([0.6, 0.8]))) / (2 * h)
    assert slope == pytest.approx(fd, rel=1e-7)


def test_invert_homogeneous():
    k = pwe.invert_dispersion(IDENTICAL, Lattice.square(), 0.1, 0.5, [1.0, 0.0], 4)
    assert k == pytest.approx(0.5, rel=1e-10)
    k = pwe.invert_dispersion(IDENTICAL, Lattice.cubic(), 0.1, 1.1, [0.6, 0.8, 0.0], 2)
    assert k == pytest.approx(1.1, rel=1e-10)


def test_invert_meets_frequency_tolerance():
    s = pwe.PlaneWaveSolver(MILD, Lattice.hexagonal(), 0.1, 6)
    khat = np.array([math.cos(0.3), math.sin(0.3)])
    k = s.invert(1.2, khat)
    assert abs(s.omega(k * khat) - 1.2) <= 1e-10 * 1.2


def test_invert_above_band_edge():
    with pytest.raises(pwe.BandFoldError):
        pwe.invert_dispersion(MILD, Lattice.square(), 0.1, 3.5, [1.0, 0.0], 4)


def test_oracle_reach():
    with pytest.raises(ContractViolation):
        pwe.PlaneWaveSolver(SOFT, Lattice.square(), 0.1, 3)
    with pytest.warns(UserWarning, match="contrast"):
        pwe.PlaneWaveSolver(RIGID, Lattice.square(), 0.1, 3)


def test_long_wavelength_group_velocity():
    lat = Lattice.square()
    for a in (0.05, 0.1, 0.12):
        s = pwe.PlaneWaveSolver(MILD, lat, a, 10)
        h = 1e-3
        cstar = (s.omega([2 * h, 0.0]) - s.omega([h, 0.0])) / h
        expected = 1 - 0.5 * A.c1_term(2, MILD, filling_fraction(lat, a))
        assert cstar == pytest.approx(expected, rel=0.01)


def test_pwe_approaches_semi_analytic_2d():
    lat, a = Lattice.square(), 0.05
    semi = dtn.semi_analytic_ksq(MILD, lat, WaveContext(0.5, a, (1.0, 0.0))).k_squared
    gaps = [abs(pwe.invert_dispersion(MILD, lat, a, 0.5, [1.0, 0.0], M) ** 2 - semi) for M in (6, 8, 12, 16)]
    assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))


def test_bands_are_sorted():
    s = pwe.PlaneWaveSolver(MILD, Lattice.square(), 0.1, 5)
    b = s.bands([1.0, 0.5], 5)
    assert np.all(np.diff(b) >= 0)
    assert b[0] == pytest.approx(s.omega([1.0, 0.5]), rel=1e-10)
