"""Materials, lattices and wave context.

All three are frozen dataclasses.  The library is unit-agnostic: densities,
compressibilities and frequencies just have to be mutually consistent.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class DomainError(ValueError):
    """Input outside the region where a formula or constructor is defined."""


class ContractViolation(TypeError):
    """Operation called with the wrong kind of input (e.g. wrong bc mode)."""


class BC(str, enum.Enum):
    TRANSMISSION = "transmission"
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"

    @classmethod
    def parse(cls, value) -> "BC":
        if isinstance(value, BC):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown boundary condition {value!r}") from None


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")


def sound_speed(rho: float, gamma: float) -> float:
    """1/sqrt(rho * gamma)."""
    _positive("rho", rho)
    _positive("gamma", gamma)
    return 1.0 / math.sqrt(rho * gamma)


def wavenumber(omega: float, rho: float, gamma: float) -> float:
    """sqrt(rho * gamma) * omega."""
    if not omega >= 0:
        raise DomainError(f"omega must be >= 0, got {omega!r}")
    _positive("rho", rho)
    _positive("gamma", gamma)
    return math.sqrt(rho * gamma) * omega


def impedance(rho: float, c: float) -> float:
    _positive("rho", rho)
    _positive("c", c)
    return rho * c


@dataclass(frozen=True)
class Materials:
    """Host (plus) and inclusion (minus) constants and boundary condition.

    For Neumann/Dirichlet the inclusion values are placeholders and reading
    them through ``rho_in``/``gamma_in`` raises.  ``gamma_minus = 0`` is
    accepted for transmission (incompressible inclusion).
    """

    rho_plus: float
    gamma_plus: float
    rho_minus: Optional[float] = None
    gamma_minus: Optional[float] = None
    bc: BC = BC.TRANSMISSION

    def __post_init__(self):
        object.__setattr__(self, "bc", BC.parse(self.bc))
        _positive("rho_plus", self.rho_plus)
        _positive("gamma_plus", self.gamma_plus)
        if self.bc is BC.TRANSMISSION:
            if self.rho_minus is None or self.gamma_minus is None:
                raise DomainError("transmission materials need rho_minus and gamma_minus")
            _positive("rho_minus", self.rho_minus)
            if not (self.gamma_minus >= 0 and math.isfinite(self.gamma_minus)):
                raise DomainError(f"gamma_minus must be >= 0, got {self.gamma_minus!r}")

    @classmethod
    def from_speeds(cls, rho_plus, c_plus, rho_minus=None, c_minus=None, bc=BC.TRANSMISSION):
        """Build from densities and sound speeds, gamma = 1/(rho c^2)."""
        gm = None
        if rho_minus is not None and c_minus is not None:
            gm = 1.0 / (rho_minus * c_minus ** 2)
        return cls(rho_plus, 1.0 / (rho_plus * c_plus ** 2), rho_minus, gm, bc)

    @classmethod
    def from_dict(cls, data: dict) -> "Materials":
        allowed = {"rho_minus", "rho_plus", "gamma_minus", "gamma_plus", "bc"}
        extra = set(data) - allowed
        if extra:
            raise DomainError(f"unknown material keys: {sorted(extra)}")
        return cls(
            rho_plus=float(data["rho_plus"]),
            gamma_plus=float(data["gamma_plus"]),
            rho_minus=None if data.get("rho_minus") is None else float(data["rho_minus"]),
            gamma_minus=None if data.get("gamma_minus") is None else float(data["gamma_minus"]),
            bc=data.get("bc", "transmission"),
        )

    def to_dict(self) -> dict:
        return {
            "rho_minus": self.rho_minus,
            "rho_plus": self.rho_plus,
            "gamma_minus": self.gamma_minus,
            "gamma_plus": self.gamma_plus,
            "bc": self.bc.value,
        }

    def _require_transmission(self):
        if self.bc is not BC.TRANSMISSION:
            raise ContractViolation(
                f"inclusion constants are undefined for {self.bc.value} inclusions")

    @property
    def rho_in(self) -> float:
        self._require_transmission()
        return self.rho_minus

    @property
    def gamma_in(self) -> float:
        self._require_transmission()
        return self.gamma_minus

    @property
    def c_host(self) -> float:
        return sound_speed(self.rho_plus, self.gamma_plus)

    @property
    def c_in(self) -> float:
        return sound_speed(self.rho_in, self.gamma_in)

    @property
    def gamma_ratio(self) -> float:
        return self.gamma_in / self.gamma_plus

    @property
    def identical(self) -> bool:
        return (self.bc is BC.TRANSMISSION and self.rho_minus == self.rho_plus
                and self.gamma_minus == self.gamma_plus)

    def k_host(self, omega: float) -> float:
        return wavenumber(omega, self.rho_plus, self.gamma_plus)

    def k_in(self, omega: float) -> float:
        self._require_transmission()
        if not omega >= 0:
            raise DomainError(f"omega must be >= 0, got {omega!r}")
        return math.sqrt(self.rho_minus * self.gamma_minus) * omega


@dataclass(frozen=True)
class Lattice:
    """Bravais lattice given by d period vectors (rows of ``taus``).

    Normalised so the shortest period is 1.  ``scale`` records the factor the
    input was divided by (1.0 when it was already normalised).
    """

    taus: tuple
    scale: float = 1.0
    dim: int = field(init=False)
    cell_volume: float = field(init=False)

    def __post_init__(self):
        arr = np.array(self.taus, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] not in (2, 3):
            raise DomainError("taus must be 2 vectors in 2D or 3 vectors in 3D")
        vol = abs(float(np.linalg.det(arr)))
        lengths = np.linalg.norm(arr, axis=1)
        if not vol > 1e-12 * float(np.prod(lengths)):
            raise DomainError("period vectors are linearly dependent")
        if abs(lengths.min() - 1.0) > 1e-12:
            raise DomainError(
                "shortest period must be 1; build through Lattice.create() to rescale")
        object.__setattr__(self, "taus", tuple(tuple(float(v) for v in row) for row in arr))
        object.__setattr__(self, "dim", arr.shape[0])
        object.__setattr__(self, "cell_volume", vol)

    @classmethod
    def create(cls, taus: Sequence[Sequence[float]], warn: bool = True) -> "Lattice":
        """Normalise the shortest period to 1, warning when a rescale happens."""
        arr = np.array(taus, dtype=float)
        if arr.ndim != 2:
            raise DomainError("taus must be a list of vectors")
        s = float(np.linalg.norm(arr, axis=1).min())
        if not s > 0:
            raise DomainError("zero-length period vector")
        if abs(s - 1.0) > 1e-12:
            if warn:
                warnings.warn(f"lattice rescaled by 1/{s:g} so that min |tau| = 1", stacklevel=2)
            return cls(tuple(map(tuple, arr / s)), scale=s)
        return cls(tuple(map(tuple, arr)))

    @classmethod
    def square(cls):
        return cls(((1.0, 0.0), (0.0, 1.0)))

    @classmethod
    def hexagonal(cls):
        return cls(((1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0)))

    @classmethod
    def cubic(cls):
        return cls(((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)))

    @classmethod
    def orthorhombic(cls, ratios=(1.0, 1.5, 2.0)):
        r = [float(v) for v in ratios]
        return cls.create(((r[0], 0.0, 0.0), (0.0, r[1], 0.0), (0.0, 0.0, r[2])))

    @classmethod
    def from_dict(cls, data: dict) -> "Lattice":
        extra = set(data) - {"dim", "taus"}
        if extra:
            raise DomainError(f"unknown lattice keys: {sorted(extra)}")
        lat = cls.create(data["taus"])
        if "dim" in data and int(data["dim"]) != lat.dim:
            raise DomainError(f"dim={data['dim']} does not match {lat.dim} period vectors")
        return lat

    def to_dict(self) -> dict:
        return {"dim": self.dim, "taus": [list(t) for t in self.taus]}

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.taus)

    @property
    def min_period(self) -> float:
        return float(np.linalg.norm(self.matrix, axis=1).min())

    def radius_for_fraction(self, f: float) -> float:
        """Inclusion radius giving filling fraction f (no overlap check)."""
        if not 0 <= f < 1:
            raise DomainError(f"filling fraction must be in [0, 1), got {f!r}")
        if self.dim == 3:
            return (3.0 * f * self.cell_volume / (4.0 * math.pi)) ** (1.0 / 3.0)
        return math.sqrt(f * self.cell_volume / math.pi)


def filling_fraction(lattice: Lattice, a: float, allow_overlap: bool = False) -> float:
    """Volume (area) fraction of one sphere (disk) of radius a per cell."""
    if not a >= 0:
        raise DomainError(f"radius must be >= 0, got {a!r}")
    if not allow_overlap and a >= 0.5 * lattice.min_period:
        raise DomainError(
            f"inclusion radius {a:g} reaches the cell boundary (half period {0.5 * lattice.min_period:g})")
    if lattice.dim == 3:
        f = 4.0 * math.pi * a ** 3 / (3.0 * lattice.cell_volume)
    else:
        f = math.pi * a * a / lattice.cell_volume
    if f >= 1.0:
        raise DomainError(f"filling fraction {f:g} >= 1")
    return f


@dataclass(frozen=True)
class WaveContext:
    """Frequency, inclusion radius and propagation direction.

    ``omega = 0`` is allowed only as the long-wavelength limit used by the
    velocity formulas; dispersion formulas reject it.
    """

    omega: float
    a: float
    k_hat: tuple

    def __post_init__(self):
        if not (self.omega >= 0 and math.isfinite(self.omega)):
            raise DomainError(f"omega must be >= 0, got {self.omega!r}")
        if not (self.a >= 0 and math.isfinite(self.a)):
            raise DomainError(f"radius must be >= 0, got {self.a!r}")
        k = np.asarray(self.k_hat, dtype=float)
        if k.ndim != 1 or k.size not in (2, 3):
            raise DomainError("k_hat must have 2 or 3 components")
        if abs(float(np.linalg.norm(k)) - 1.0) > 1e-12:
            raise DomainError("k_hat must be a unit vector")
        object.__setattr__(self, "k_hat", tuple(float(v) for v in k))

    @classmethod
    def along(cls, omega: float, a: float, direction: Sequence[float]) -> "WaveContext":
        d = np.asarray(direction, dtype=float)
        return cls(omega, a, tuple(d / np.linalg.norm(d)))

    @property
    def dim(self) -> int:
        return len(self.k_hat)

    def check_lattice(self, lattice: Lattice, allow_overlap: bool = False):
        if self.dim != lattice.dim:
            raise DomainError(f"k_hat has {self.dim} components, lattice is {lattice.dim}D")
        if not allow_overlap and self.a >= 0.5 * lattice.min_period:
            raise DomainError("inclusion radius must be below half the minimal period")
