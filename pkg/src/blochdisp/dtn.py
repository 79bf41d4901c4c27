"""Exact per-harmonic Dirichlet-to-Neumann differences on an auxiliary sphere.

Inside the ball r < R that holds one inclusion, a boundary datum psi_n of
harmonic degree n extends to a solution built from Bessel functions; the
difference between the radial derivative with and without the inclusion is
diagonal in n:

    (N_a - N_0) psi_n = f_n / (d_n j_n(k R)) psi_n        (3D)
    (N_a - N_0) psi_n = F_n / (D_n J_n(k R)) psi_n        (2D)

Projecting the plane wave exp(-i k.r) on these harmonics gives the
quadratic form whose value, divided by 2 k |Pi|, is the first-order shift
of |k|.  With this sign convention the form is negative for inclusions that
slow the wave.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from . import specfun
from .asymptotics import DispersionResult
from .media import BC, DomainError, Lattice, Materials, WaveContext

DEFAULT_RADIUS = 0.35
RADIUS_STEP = 0.05
DEFAULT_MODES = 12


class ResonantRadiusError(DomainError):
    """j_n(kR) (or J_n(kR)) vanishes at the chosen auxiliary radius."""


@dataclass(frozen=True)
class ModeEigenvalue:
    n: int
    value: float
    parts: Tuple[float, float]


@dataclass(frozen=True)
class QuadraticForm:
    value: float
    n_modes: int
    mode_contributions: Tuple[float, ...]
    R: float
    retried: bool = False
    tail_estimate: float = 0.0


def _bessels(dim):
    if dim == 3:
        return (specfun.sph_bessel_j, specfun.sph_bessel_j_prime,
                specfun.sph_bessel_y, specfun.sph_bessel_y_prime)
    if dim == 2:
        return (specfun.bessel_j, specfun.bessel_j_prime,
                specfun.bessel_y, specfun.bessel_y_prime)
    raise DomainError(f"dim must be 2 or 3, got {dim!r}")


def _check_geometry(omega, a, R):
    if not omega > 0:
        raise DomainError("omega must be positive")
    if not 0 < a < R:
        raise DomainError(f"need 0 < a < R, got a={a!r}, R={R!r}")


def _resonance_guard(dim, n, kR):
    j, jp, _, _ = _bessels(dim)
    val = j(n, kR)
    if abs(val) < 1e-8 * abs(kR * jp(n, kR)):
        raise ResonantRadiusError(
            f"degree-{n} Bessel function vanishes at kR = {kR:.12g}; choose another auxiliary radius R")
    return val


def _mode_parts(dim, n, materials: Materials, omega, a, R):
    _check_geometry(omega, a, R)
    j, jp, y, yp = _bessels(dim)
    kp = materials.k_host(omega)
    xa, xR = kp * a, kp * R
    jR, yR = j(n, xR), y(n, xR)
    ja, jpa, ya, ypa = j(n, xa), jp(n, xa), y(n, xa), yp(n, xa)
    # prefactor turning the Wronskian-reduced C_n into the DtN jump
    pref = 1.0 / (kp * R * R) if dim == 3 else 2.0 / (math.pi * R)
    bc = materials.bc
    if bc is BC.TRANSMISSION:
        km = materials.k_in(omega)
        if km == 0:
            raise DomainError("DtN modes need gamma_minus > 0 (k_minus = 0 degenerates)")
        jm, jpm = j(n, km * a), jp(n, km * a)
        out_w = kp / materials.rho_plus
        in_w = km / materials.rho_minus
        bracket = in_w * (ja * jpm) - out_w * (jm * jpa)
        if dim == 3:
            d = out_w * jm * (jR * ypa - jpa * yR) + in_w * jpm * (ja * yR - jR * ya)
        else:
            d = yR * (in_w * jpm * ja - out_w * jpa * jm) - jR * (in_w * jpm * ya - out_w * jm * ypa)
        return d, pref * bracket
    if bc is BC.NEUMANN:
        # rho_minus -> infinity limit with the common factor (k/rho_+) j_n(k_- a) removed
        return jR * ypa - jpa * yR, -pref * jpa
    return jR * ya - ja * yR, -pref * ja


def mode_parts_3d(n: int, materials: Materials, omega: float, a: float, R: float):
    """(d_n, f_n) for the sphere; the eigenvalue is f_n / (d_n j_n(k_+ R))."""
    return _mode_parts(3, n, materials, omega, a, R)


def mode_parts_2d(n: int, materials: Materials, omega: float, a: float, R: float):
    """(D_n, F_n) for the disk; the eigenvalue is F_n / (D_n J_n(k_+ R))."""
    return _mode_parts(2, n, materials, omega, a, R)


def dtn_diff_eigenvalue(dim: int, n: int, materials: Materials, omega: float, a: float,
                        R: float) -> ModeEigenvalue:
    d, f = _mode_parts(dim, n, materials, omega, a, R)
    jR = _resonance_guard(dim, n, materials.k_host(omega) * R)
    if f == 0.0:
        return ModeEigenvalue(n, 0.0, (d, f))
    return ModeEigenvalue(n, f / (d * jR), (d, f))


def laplace_dtn_diff_eigenvalue(n: int, R: float) -> float:
    """(2n+1)/(R + R^{2n+2}): Laplace shell-minus-ball DtN difference, 0 < R < 1."""
    if not 0 < R < 1:
        raise DomainError(f"R must lie in (0, 1), got {R!r}")
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    return (2 * n + 1) / (R + R ** (2 * n + 2))


def mode_weights(dim: int, n: int, omega_over_c: float, R: float) -> float:
    """Squared L2 norm of the degree-n part of exp(-i k.r) on r = R."""
    x = omega_over_c * R
    if dim == 3:
        return 4.0 * math.pi * R * R * (2 * n + 1) * specfun.sph_bessel_j(n, x) ** 2
    if dim == 2:
        return 2.0 * math.pi * R * (1 if n == 0 else 2) * specfun.bessel_j(n, x) ** 2
    raise DomainError(f"dim must be 2 or 3, got {dim!r}")


def _form_at(dim, materials, omega, a, R, N):
    woc = materials.k_host(omega)
    contribs = []
    for n in range(N + 1):
        eig = dtn_diff_eigenvalue(dim, n, materials, omega, a, R).value
        contribs.append(eig * mode_weights(dim, n, woc, R))
    # geometric tail from the last two contributions
    tail = 0.0
    last, prev = abs(contribs[-1]), abs(contribs[-2])
    if last > 0 and prev > 0:
        r = last / prev
        tail = last * r / (1.0 - r) if r < 1 else float("inf")
    return math.fsum(contribs), tuple(contribs), tail


def candidate_radii(R: float, a: float, min_period: float = 1.0):
    """R itself, then R - step and R + step, restricted to a < R' < half period."""
    out = []
    for r in (R, R - RADIUS_STEP * min_period, R + RADIUS_STEP * min_period):
        if a < r < 0.5 * min_period and r not in out:
            out.append(r)
    return out


def quadratic_form(dim: int, materials: Materials, omega: float, a: float, R: Optional[float] = None,
                   N: int = DEFAULT_MODES, retry: bool = True, min_period: float = 1.0) -> QuadraticForm:
    """((N_a - N_0) psi_hat, psi_hat) summed over degrees 0..N."""
    if N < 2:
        raise DomainError("truncation degree N must be >= 2")
    R0 = DEFAULT_RADIUS * min_period if R is None else R
    radii = candidate_radii(R0, a, min_period) if retry else [R0]
    if not radii:
        raise DomainError(f"no admissible auxiliary radius for a = {a!r}")
    err = None
    for i, r in enumerate(radii):
        try:
            value, contribs, tail = _form_at(dim, materials, omega, a, r, N)
        except ResonantRadiusError as exc:
            err = exc
            continue
        return QuadraticForm(value, N, contribs, r, retried=i > 0, tail_estimate=tail)
    raise err


def detuning_constant(omega_over_c: float, cell_volume: float) -> float:
    """2 k |Pi|: slope of the projected exterior DtN difference in k_+ - |k|."""
    if not (omega_over_c > 0 and cell_volume > 0):
        raise DomainError("need positive omega/c and cell volume")
    return 2.0 * omega_over_c * cell_volume


def semi_analytic_ksq(materials: Materials, lattice: Lattice, wave: WaveContext,
                      R: Optional[float] = None, N: int = DEFAULT_MODES) -> DispersionResult:
    """|k|^2 from the exact quadratic form and first-order perturbation.

    |k| = k_+ - Q / (2 k_+ |Pi|).  Error is O(a^6) + O(eps^2) in 3D,
    O(a^4) in 2D.
    """
    wave.check_lattice(lattice)
    dim = lattice.dim
    kp = materials.k_host(wave.omega)
    if wave.a == 0:
        return DispersionResult.assemble(kp * kp, [("quadratic form", 0.0)], _semi_tag(dim))
    q = quadratic_form(dim, materials, wave.omega, wave.a, R, N, min_period=lattice.min_period)
    k = kp - q.value / detuning_constant(kp, lattice.cell_volume)
    return DispersionResult.assemble(kp * kp, [("quadratic form", k * k - kp * kp)], _semi_tag(dim))


def _semi_tag(dim):
    return "a^6+eps^2" if dim == 3 else "a^4+eps^2"
