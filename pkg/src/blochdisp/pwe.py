"""Plane-wave expansion of div((1/rho) grad u) + gamma omega^2 u = 0.

The Bloch field is expanded in exp(-i (k+G).r) over a full box of reciprocal
vectors G.  The Galerkin matrices are

    A[G, G'] = (k+G).(k+G') eta_hat(G-G'),    eta = 1/rho
    B[G, G'] = gamma_hat(G-G')

and the lowest eigenvalue of A u = omega^2 B u gives the first band.  The
inclusion is centred and symmetric, so both matrices are real symmetric.
Rayleigh-Ritz applies: enlarging the box can only lower omega^2.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import linalg, optimize, special

from .media import BC, ContractViolation, DomainError, Lattice, Materials, filling_fraction

DEFAULT_TRUNCATION = {2: 12, 3: 6}
RIGID_CONTRAST = 1e6


class NumericError(ArithmeticError):
    """Eigensolver or root-finder failed to converge."""


class BandFoldError(DomainError):
    """Target frequency is above the first band edge along the chosen direction."""


@dataclass(frozen=True)
class ReciprocalBasis:
    dim: int
    g_vectors: np.ndarray      # rows g_i with g_i . tau_j = 2 pi delta_ij
    truncation: int
    indices: np.ndarray        # (n_waves, dim) integer multi-indices

    @classmethod
    def build(cls, lattice: Lattice, M: int) -> "ReciprocalBasis":
        if int(M) != M or M < 0:
            raise DomainError(f"truncation must be a non-negative integer, got {M!r}")
        g = 2.0 * math.pi * np.linalg.inv(lattice.matrix).T
        rng = range(-M, M + 1)
        idx = np.array(list(itertools.product(rng, repeat=lattice.dim)), dtype=int)
        return cls(lattice.dim, g, int(M), idx)

    @property
    def G(self) -> np.ndarray:
        return self.indices @ self.g_vectors

    @property
    def size(self) -> int:
        return len(self.indices)


def _shape_factor(dim, Gnorm, a, cell_volume):
    """Fourier coefficient of the inclusion indicator (S(0) = f)."""
    Gnorm = np.asarray(Gnorm, dtype=float)
    if dim == 2:
        f = math.pi * a * a / cell_volume
        x = Gnorm * a
        small = x < 1e-6
        xs = np.where(small, 1.0, x)
        return np.where(small, f * (1.0 - x * x / 8.0), 2.0 * f * special.j1(xs) / xs)
    f = 4.0 * math.pi * a ** 3 / (3.0 * cell_volume)
    x = Gnorm * a
    small = x < 1e-3
    xs = np.where(small, 1.0, x)
    big = 3.0 * f * (np.sin(xs) - xs * np.cos(xs)) / xs ** 3
    return np.where(small, f * (1.0 - x * x / 10.0), big)


def inclusion_fourier_coeff(dim: int, G, a: float, cell_volume: float, v_in: float, v_out: float):
    """Fourier coefficient of a property equal to v_in inside the inclusion, v_out outside."""
    if not a >= 0:
        raise DomainError(f"radius must be >= 0, got {a!r}")
    G = np.atleast_2d(np.asarray(G, dtype=float))
    norm = np.linalg.norm(G, axis=1)
    out = (v_in - v_out) * _shape_factor(dim, norm, a, cell_volume)
    out = out + np.where(norm == 0.0, v_out, 0.0)
    return out if out.size > 1 else float(out[0])


def _oracle_constants(materials: Materials):
    """(rho_in, gamma_in) used by the oracle; rigid inclusions are a high-contrast stand-in."""
    if materials.bc is BC.DIRICHLET:
        raise ContractViolation("sound-soft inclusions have no plane-wave oracle")
    if materials.bc is BC.NEUMANN:
        warnings.warn("rigid inclusion approximated by density/compressibility contrast 1e6; "
                      "plane-wave convergence is slow", stacklevel=3)
        return materials.rho_plus * RIGID_CONTRAST, materials.gamma_plus / RIGID_CONTRAST
    return materials.rho_minus, materials.gamma_minus


@dataclass
class BandProblem:
    A: np.ndarray
    B: np.ndarray
    k: np.ndarray

    def hermiticity_defect(self) -> float:
        da = np.linalg.norm(self.A - self.A.T) / max(np.linalg.norm(self.A), 1e-300)
        db = np.linalg.norm(self.B - self.B.T) / np.linalg.norm(self.B)
        return float(max(da, db))


class PlaneWaveSolver:
    """Caches eta_hat, gamma_hat and the Cholesky factor of B for one geometry."""

    def __init__(self, materials: Materials, lattice: Lattice, a: float, truncation: Optional[int] = None):
        if not a >= 0:
            raise DomainError(f"radius must be >= 0, got {a!r}")
        filling_fraction(lattice, a)
        self.materials = materials
        self.lattice = lattice
        self.a = float(a)
        M = DEFAULT_TRUNCATION[lattice.dim] if truncation is None else truncation
        self.basis = ReciprocalBasis.build(lattice, M)
        rho_in, gamma_in = _oracle_constants(materials)
        dG = self.basis.G[:, None, :] - self.basis.G[None, :, :]
        norm = np.linalg.norm(dG, axis=2)
        S = _shape_factor(lattice.dim, norm, self.a, lattice.cell_volume)
        eye = norm == 0.0
        eta_out, eta_in = 1.0 / materials.rho_plus, 1.0 / rho_in
        self.eta_hat = eta_out * eye + (eta_in - eta_out) * S
        self.gamma_hat = materials.gamma_plus * eye + (gamma_in - materials.gamma_plus) * S
        try:
            self.chol = linalg.cholesky(self.gamma_hat, lower=True)
        except linalg.LinAlgError:
            raise DomainError("mass matrix B is not positive definite") from None

    def problem(self, k) -> BandProblem:
        P = np.asarray(k, dtype=float)[None, :] + self.basis.G
        return BandProblem(self.eta_hat * (P @ P.T), self.gamma_hat, np.asarray(k, dtype=float))

    def _lowest(self, k):
        """(omega^2, B-normalised eigenvector, P) for the first band."""
        P = np.asarray(k, dtype=float)[None, :] + self.basis.G
        A = self.eta_hat * (P @ P.T)
        L = self.chol
        C = linalg.solve_triangular(L, linalg.solve_triangular(L, A, lower=True).T, lower=True)
        try:
            w, v = linalg.eigh(C, subset_by_index=[0, 0])
        except linalg.LinAlgError:
            raise NumericError(f"eigensolver failed; try a different truncation "
                               f"(M = {self.basis.truncation})") from None
        x = linalg.solve_triangular(L, v[:, 0], lower=True, trans="T")
        # Rayleigh quotient in the original basis: x lives on small |G|, so this
        # is accurate relative to omega^2 rather than to the norm of A
        lam = float(x @ A @ x) / float(x @ self.gamma_hat @ x)
        x = x / math.sqrt(float(x @ self.gamma_hat @ x))
        return max(lam, 0.0), x, P

    def omega(self, k) -> float:
        return math.sqrt(self._lowest(k)[0])

    def omega_and_slope(self, t: float, k_hat) -> tuple:
        """omega(t k_hat) and d omega/dt by Hellmann-Feynman."""
        k_hat = np.asarray(k_hat, dtype=float)
        lam, x, P = self._lowest(t * k_hat)
        q = P @ k_hat
        dA = self.eta_hat * (q[:, None] + q[None, :])
        dlam = float(x @ dA @ x)
        om = math.sqrt(lam)
        return om, (dlam / (2.0 * om) if om > 0 else math.sqrt(max(dlam, 0.0)))

    def bands(self, k, n_bands: int = 4) -> np.ndarray:
        prob = self.problem(k)
        w = linalg.eigh(prob.A, prob.B, eigvals_only=True, subset_by_index=[0, n_bands - 1])
        return np.sqrt(np.clip(w, 0.0, None))

    def zone_edge(self, k_hat) -> float:
        """Distance from Gamma to the first Brillouin-zone face along k_hat."""
        k_hat = np.asarray(k_hat, dtype=float)
        g = self.basis.g_vectors
        best = math.inf
        for idx in itertools.product(range(-2, 3), repeat=self.lattice.dim):
            G = np.asarray(idx) @ g
            proj = float(G @ k_hat)
            if proj > 1e-12:
                best = min(best, float(G @ G) / (2.0 * proj))
        return best

    def invert(self, omega_target: float, k_hat, rtol: float = 1e-10) -> float:
        """|k| with omega(|k| k_hat) = omega_target on the first band."""
        if not omega_target > 0:
            raise DomainError("target frequency must be positive")
        k_hat = np.asarray(k_hat, dtype=float)
        if abs(np.linalg.norm(k_hat) - 1.0) > 1e-12:
            raise DomainError("k_hat must be a unit vector")
        edge = self.zone_edge(k_hat)
        if self.omega(edge * k_hat) <= omega_target:
            raise BandFoldError(f"omega = {omega_target:g} is at or above the first band edge "
                                f"along k_hat (band gap or fold)")
        lo, hi = 0.0, edge
        t = min(omega_target / self.materials.c_host, 0.99 * edge)
        for _ in range(50):
            om, slope = self.omega_and_slope(t, k_hat)
            r = om - omega_target
            if abs(r) <= rtol * omega_target:
                return t
            if r < 0:
                lo = t
            else:
                hi = t
            step = t - r / slope if slope > 0 else None
            t = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
            if hi - lo <= 1e-15 * edge:
                break
        # safeguarded Newton stalled: fall back to a bracketed solve
        f = lambda s: self.omega(s * k_hat) - omega_target
        try:
            return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        except ValueError:
            raise NumericError("dispersion inversion failed: lowest band not monotone on bracket") from None


def lowest_band_omega(materials: Materials, lattice: Lattice, a: float, k: Sequence[float],
                      truncation: Optional[int] = None) -> float:
    return PlaneWaveSolver(materials, lattice, a, truncation).omega(k)


def invert_dispersion(materials: Materials, lattice: Lattice, a: float, omega_target: float,
                      k_hat: Sequence[float], truncation: Optional[int] = None) -> float:
    return PlaneWaveSolver(materials, lattice, a, truncation).invert(omega_target, k_hat)
