"""Closed-form small-radius dispersion relations and effective velocities.

Two layers:

* dimensionless kernels that take the filling fraction ``f`` and
  ``wac = omega * a / c`` directly (``corrections``, ``group_velocity_ratio``,
  ``phase_velocity_ratio``);
* geometric wrappers (``ksq``, ``group_velocity``, ``phase_velocity``) that
  derive f and wac from a ``Lattice`` and ``WaveContext`` and enforce the
  geometric guards.

Neumann and Dirichlet inclusions have their own formulas; the transmission
formulas are never pushed to a numeric limit to get them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

from .media import BC, ContractViolation, DomainError, Lattice, Materials, WaveContext, filling_fraction

REMAINDER_ORDER = {
    (3, BC.TRANSMISSION): "a^6",
    (3, BC.NEUMANN): "a^6",
    (2, BC.TRANSMISSION): "a^4",
    (2, BC.NEUMANN): "a^4",
    (3, BC.DIRICHLET): "a^2",
    (2, BC.DIRICHLET): "ln^-2",
}

# relative perturbation applied to c1_term; only touched by the validate canary
_C1_PERTURBATION = 0.0


@dataclass(frozen=True)
class DispersionResult:
    k_squared: float
    base: float
    correction_terms: Tuple[Tuple[str, float], ...]
    remainder_order: str
    propagating: bool = True

    @property
    def k(self) -> float:
        if self.k_squared < 0:
            raise DomainError("k^2 < 0: wave is not propagating")
        return math.sqrt(self.k_squared)

    @property
    def terms(self) -> dict:
        return dict(self.correction_terms)

    @classmethod
    def assemble(cls, base, terms, remainder_order):
        terms = tuple((name, float(v)) for name, v in terms)
        k2 = base + sum(v for _, v in terms)
        return cls(k2, base, terms, remainder_order, propagating=k2 > 0)


@dataclass(frozen=True)
class CoefficientSet:
    alpha: float
    c1_term: float
    c2_term: float
    extras: dict = field(default_factory=dict)


def _dim(dim):
    if dim not in (2, 3):
        raise DomainError(f"dim must be 2 or 3, got {dim!r}")
    return dim


def _transmission(materials: Materials):
    if materials.bc is not BC.TRANSMISSION:
        raise ContractViolation(f"formula needs transmission materials, got {materials.bc.value}")


def alpha(materials: Materials) -> float:
    _transmission(materials)
    rm, rp = materials.rho_minus, materials.rho_plus
    return (rm - rp) / (rp + rm)


def c1_term(dim: int, materials: Materials, f: float) -> float:
    """Leading correction c1 a^d (dimensionless)."""
    _dim(dim)
    _transmission(materials)
    rm, rp = materials.rho_minus, materials.rho_plus
    g = materials.gamma_minus / materials.gamma_plus
    if dim == 3:
        val = ((rm - 4.0 * rp) / (rp + 2.0 * rm) + g) * f
    else:
        val = (2.0 * alpha(materials) - 1.0 + g) * f
    return val * (1.0 + _C1_PERTURBATION)


def c2_term(dim: int, materials: Materials, omega: float, a: float, c_host: float, f: float) -> float:
    """Second correction c2 a^{d+2}; in 2D the ln(omega a/c) factor is left out."""
    _dim(dim)
    _transmission(materials)
    wac2 = (omega * a / c_host) ** 2
    g = materials.gamma_minus / materials.gamma_plus
    rm, rp = materials.rho_minus, materials.rho_plus
    if dim == 2:
        return (0.5 * (1.0 - g) ** 2 + alpha(materials) ** 2) * wac2 * f
    # gamma ratio times density ratio kept as printed: (k_minus/k_plus)^2
    kk = g * rm / rp
    first = wac2 * f / 15.0 * ((1.0 - g) * (9.0 - 5.0 * g) - g * (1.0 - kk))
    second = 1.8 * wac2 * f / (rp + 2.0 * rm) ** 2 * (rp * rp - rm * rm - rm * rp * (1.0 - kk))
    return first + second


def quadrupole_term(materials: Materials, omega: float, a: float, c_host: float, f: float) -> float:
    """Degree-2 contribution to |k|^2/(omega/c)^2 at order a^5 in 3D.

    Not part of ``c2_term``.  It comes from the n = 2 DtN mode, whose
    eigenvalue is of order a^5 whenever the densities differ, and equals
    (2/3) (omega a/c)^2 f (rho_- - rho_+)/(2 rho_+ + 3 rho_-).
    """
    _transmission(materials)
    rm, rp = materials.rho_minus, materials.rho_plus
    return (2.0 / 3.0) * (omega * a / c_host) ** 2 * f * (rm - rp) / (2.0 * rp + 3.0 * rm)


def quadrupole_term_neumann(omega: float, a: float, c_host: float, f: float) -> float:
    """Rigid-inclusion limit of ``quadrupole_term``: (2/9) (omega a/c)^2 f."""
    return (2.0 / 9.0) * (omega * a / c_host) ** 2 * f


def c1_impedance_form(dim: int, materials: Materials) -> float:
    """c1 a^d / f written through impedances rho*c of the two media."""
    _dim(dim)
    _transmission(materials)
    if materials.gamma_minus == 0:
        raise DomainError("impedance form needs a finite inclusion sound speed (gamma_minus > 0)")
    rm, rp = materials.rho_minus, materials.rho_plus
    cm, cp = materials.c_in, materials.c_host
    mismatch = (rm * cm - rp * cp) ** 2
    if dim == 2:
        return (mismatch + rm * rp * (cp - cm) * (cp + 3.0 * cm)) / (rm * cm * cm * (rp + rm))
    return (mismatch + 2.0 * rm * rp * (cp - cm) * (cp + 2.0 * cm)) / (rm * cm * cm * (rp + 2.0 * rm))


def coefficients(dim: int, materials: Materials, omega: float, a: float, f: float) -> CoefficientSet:
    c = materials.c_host
    extras = {}
    if dim == 3:
        extras["quadrupole"] = quadrupole_term(materials, omega, a, c, f)
    return CoefficientSet(alpha(materials), c1_term(dim, materials, f),
                          c2_term(dim, materials, omega, a, c, f), extras)


# --------------------------------------------------------------------------
# dimensionless kernels
# --------------------------------------------------------------------------

def _xlogx2(wac: float, f: float) -> float:
    """(omega a/c)^2 f ln(omega a/c) with its zero limit."""
    if f == 0 or wac == 0:
        return 0.0
    return wac * wac * f * math.log(wac)


def _check_log_regime(dim, wac):
    if dim == 2 and wac >= 1.0:
        raise DomainError(
            f"asymptotic regime violated: omega*a/c = {wac:g} >= 1 makes ln(omega a/c) >= 0")


def corrections(dim: int, materials: Materials, f: float, wac: float, omega_over_c: float = 1.0,
                cell_volume: float = 1.0, a: float = 0.0):
    """Correction terms of |k|^2 in units where the base is omega^2/c^2.

    Returns a list of (name, value) with values already multiplied by
    ``omega_over_c**2`` for transmission/Neumann; Dirichlet terms are absolute.
    """
    _dim(dim)
    bc = materials.bc
    base = omega_over_c ** 2
    if bc is BC.DIRICHLET:
        if dim == 3:
            return [("-4 pi a/|Pi|", -4.0 * math.pi * a / cell_volume)]
        _check_log_regime(dim, wac)
        if a == 0:
            return [("-2 pi/(|Pi| ln(wa/c))", 0.0)]
        return [("-2 pi/(|Pi| ln(wa/c))", -2.0 * math.pi / (cell_volume * math.log(wac)))]
    _check_log_regime(dim, wac)
    if bc is BC.NEUMANN:
        if dim == 3:
            return [("f/2", base * 0.5 * f), ("(3/20)(wa/c)^2 f", base * 0.15 * wac * wac * f)]
        return [("f", base * f), ("-(3/2)(wa/c)^2 f ln(wa/c)", -base * 1.5 * _xlogx2(wac, f))]
    c1 = c1_term(dim, materials, f)
    # c2_term with omega a / c = wac
    c2 = c2_term(dim, materials, wac, 1.0, 1.0, f)
    if dim == 3:
        return [("c1 a^3", base * c1), ("c2 a^5", base * c2)]
    lg = math.log(wac) if c2 != 0 else 0.0
    return [("c1 a^2", base * c1), ("-c2 a^4 ln(wa/c)", -base * c2 * lg)]


def ksq_dimensionless(dim: int, materials: Materials, f: float, wac: float, omega_over_c: float,
                      cell_volume: float = 1.0, a: float = 0.0) -> DispersionResult:
    if not omega_over_c > 0:
        raise DomainError("dispersion relation needs omega > 0")
    terms = corrections(dim, materials, f, wac, omega_over_c, cell_volume, a)
    return DispersionResult.assemble(omega_over_c ** 2, terms, REMAINDER_ORDER[(dim, materials.bc)])


_VELOCITY = {
    # (dim, bc, kind): (coefficient of c1 term, coefficient of c2 term)
    (2, "group"): (-0.5, 1.5),
    (2, "phase"): (-0.5, 0.5),
    (3, "group"): (-0.5, -1.5),
    (3, "phase"): (-0.5, -0.5),
}


def _velocity_ratio(kind, dim, materials, f, wac):
    _dim(dim)
    bc = materials.bc
    if bc is BC.DIRICHLET:
        raise ContractViolation("no effective velocity formula for Dirichlet inclusions")
    _check_log_regime(dim, wac)
    k1, k2 = _VELOCITY[(dim, kind)]
    if bc is BC.NEUMANN:
        if dim == 3:
            return 1.0 + k1 * 0.5 * f + k2 * 0.15 * wac * wac * f
        return 1.0 + k1 * f + k2 * 1.5 * _xlogx2(wac, f)
    c1 = c1_term(dim, materials, f)
    c2 = c2_term(dim, materials, wac, 1.0, 1.0, f)
    if dim == 3:
        return 1.0 + k1 * c1 + k2 * c2
    lg = math.log(wac) if c2 != 0 else 0.0
    return 1.0 + k1 * c1 + k2 * c2 * lg


def group_velocity_ratio(dim: int, materials: Materials, f: float, wac: float) -> float:
    """c*/c from filling fraction and omega a / c."""
    return _velocity_ratio("group", dim, materials, f, wac)


def phase_velocity_ratio(dim: int, materials: Materials, f: float, wac: float) -> float:
    """c_ph/c from filling fraction and omega a / c."""
    return _velocity_ratio("phase", dim, materials, f, wac)


# --------------------------------------------------------------------------
# geometric wrappers
# --------------------------------------------------------------------------

def _groups(materials: Materials, lattice: Lattice, wave: WaveContext, allow_overlap: bool):
    wave.check_lattice(lattice, allow_overlap)
    f = filling_fraction(lattice, wave.a, allow_overlap=allow_overlap)
    c = materials.c_host
    return f, wave.omega * wave.a / c, wave.omega / c


def ksq(materials: Materials, lattice: Lattice, wave: WaveContext,
        allow_overlap: bool = False) -> DispersionResult:
    """|k|^2 for the boundary condition carried by ``materials``."""
    f, wac, woc = _groups(materials, lattice, wave, allow_overlap)
    return ksq_dimensionless(lattice.dim, materials, f, wac, woc, lattice.cell_volume, wave.a)


def group_velocity(materials: Materials, lattice: Lattice, wave: WaveContext,
                   allow_overlap: bool = False) -> float:
    f, wac, _ = _groups(materials, lattice, wave, allow_overlap)
    return group_velocity_ratio(lattice.dim, materials, f, wac)


def phase_velocity(materials: Materials, lattice: Lattice, wave: WaveContext,
                   allow_overlap: bool = False) -> float:
    f, wac, _ = _groups(materials, lattice, wave, allow_overlap)
    return phase_velocity_ratio(lattice.dim, materials, f, wac)
