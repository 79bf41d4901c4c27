"""Sweep specifications, material and lattice presets, scenario presets."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .media import BC, DomainError, Lattice, Materials

MODES = ("dispersion", "velocity", "convergence", "band", "validate")
SWEEP_VARIABLES = ("f", "a", "omega_over_c", "k_mag")


class SpecError(ValueError):
    """Malformed sweep specification (usage error)."""


# standard-reference constants: density (kg/m^3), sound speed (m/s)
MEDIA = {
    "air": (1.2, 343.0),
    "water": (1000.0, 1480.0),
    "mercury": (13500.0, 1450.0),
}

# host / inclusion pairs, or explicit non-dimensional constants
MATERIAL_PRESETS = {
    "water-in-air": ("air", "water"),
    "mercury-in-water": ("water", "mercury"),
    "air-in-water": ("water", "air"),
    "mild": {"rho_plus": 1.0, "gamma_plus": 1.0, "rho_minus": 2.0, "gamma_minus": 0.5},
    "homogeneous": {"rho_plus": 1.0, "gamma_plus": 1.0, "rho_minus": 1.0, "gamma_minus": 1.0},
    "rigid": {"rho_plus": 1.0, "gamma_plus": 1.0, "bc": "neumann"},
    "soft": {"rho_plus": 1.0, "gamma_plus": 1.0, "bc": "dirichlet"},
}


def _medium(name):
    try:
        return MEDIA[name]
    except KeyError:
        raise SpecError(f"unknown medium {name!r}; choose from {sorted(MEDIA)}") from None


def resolve_materials(value, bc=None) -> Materials:
    """Preset name, {host, inclusion} media names, or explicit constants."""
    if isinstance(value, str):
        if value not in MATERIAL_PRESETS:
            raise SpecError(f"unknown material preset {value!r}; choose from {sorted(MATERIAL_PRESETS)}")
        value = MATERIAL_PRESETS[value]
    if isinstance(value, tuple):
        value = {"host": value[0], "inclusion": value[1]}
    if not isinstance(value, dict):
        raise SpecError("materials must be a preset name or a table")
    value = dict(value)
    if bc is not None:
        value["bc"] = bc
    if "host" in value:
        extra = set(value) - {"host", "inclusion", "bc"}
        if extra:
            raise SpecError(f"unknown material keys: {sorted(extra)}")
        rp, cp = _medium(value["host"])
        b = BC.parse(value.get("bc", "transmission"))
        if b is not BC.TRANSMISSION:
            return Materials.from_speeds(rp, cp, bc=b)
        if "inclusion" not in value:
            raise SpecError("transmission materials need an inclusion medium")
        rm, cm = _medium(value["inclusion"])
        return Materials.from_speeds(rp, cp, rm, cm)
    b = BC.parse(value.get("bc", "transmission"))
    if b is not BC.TRANSMISSION:
        value = {k: v for k, v in value.items() if k not in ("rho_minus", "gamma_minus")}
    try:
        return Materials.from_dict(value)
    except KeyError as exc:
        raise SpecError(f"missing material key {exc}") from None


def resolve_lattice(value, dim: int) -> Lattice:
    if isinstance(value, str):
        value = {"preset": value}
    if not isinstance(value, dict):
        raise SpecError("lattice must be a preset name or a table")
    value = dict(value)
    if "taus" in value:
        lat = Lattice.from_dict(value)
    else:
        extra = set(value) - {"preset", "ratios"}
        if extra:
            raise SpecError(f"unknown lattice keys: {sorted(extra)}")
        name = value.get("preset")
        if name == "square":
            lat = Lattice.square()
        elif name == "hexagonal":
            lat = Lattice.hexagonal()
        elif name == "cubic":
            lat = Lattice.cubic()
        elif name == "orthorhombic":
            lat = Lattice.orthorhombic(tuple(value.get("ratios", (1.0, 1.5, 2.0))))
        else:
            raise SpecError(f"unknown lattice preset {name!r}")
    if lat.dim != dim:
        raise SpecError(f"lattice is {lat.dim}D but dim = {dim}")
    return lat


@dataclass(frozen=True)
class Sweep:
    variable: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise SpecError(f"sweep variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        if int(self.count) != self.count or self.count < 1:
            raise SpecError("sweep count must be a positive integer")
        if self.count == 1 and self.start != self.stop:
            raise SpecError("a single-point sweep needs start == stop")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.count))


@dataclass(frozen=True)
class SweepSpec:
    mode: str
    dim: int
    materials: object = "mild"
    lattice: object = None
    bc: Optional[str] = None
    sweep: Optional[Sweep] = None
    omega_over_c: float = 0.0
    f: Optional[float] = None
    a: Optional[float] = None
    k_hat: Optional[tuple] = None
    allow_overlap: bool = False
    truncation: Optional[int] = None
    n_bands: int = 4
    pwe: Optional[bool] = None
    format: str = "csv"
    out: Optional[str] = None
    name: Optional[str] = None
    warnings: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise SpecError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.dim not in (2, 3):
            raise SpecError(f"dim must be 2 or 3, got {self.dim!r}")
        if self.format not in ("csv", "json"):
            raise SpecError(f"format must be csv or json, got {self.format!r}")
        if self.mode not in ("validate",) and self.sweep is None:
            raise SpecError(f"mode {self.mode!r} needs a [sweep] table")
        if self.f is not None and self.a is not None:
            raise SpecError("give at most one of f and a")
        if self.sweep is not None and self.sweep.variable in ("f", "a") and (self.f is not None or self.a is not None):
            raise SpecError("the swept variable must not also be fixed")
        if self.k_hat is not None:
            object.__setattr__(self, "k_hat", tuple(float(v) for v in self.k_hat))
            if len(self.k_hat) != self.dim:
                raise SpecError("k_hat length must equal dim")
        if self.lattice is None:
            object.__setattr__(self, "lattice", "square" if self.dim == 2 else "cubic")

    # resolution -----------------------------------------------------------
    def resolved_materials(self) -> Materials:
        return resolve_materials(self.materials, self.bc)

    def resolved_lattice(self) -> Lattice:
        return resolve_lattice(self.lattice, self.dim)

    def direction(self) -> tuple:
        if self.k_hat is None:
            return (1.0, 0.0) if self.dim == 2 else (1.0, 0.0, 0.0)
        n = math.sqrt(sum(v * v for v in self.k_hat))
        if n == 0:
            raise SpecError("k_hat must be nonzero")
        return tuple(v / n for v in self.k_hat)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("warnings")
        return {k: v for k, v in d.items() if v is not None}

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        data = dict(data)
        allowed = {f.name for f in cls.__dataclass_fields__.values()} - {"warnings"}
        extra = set(data) - allowed
        if extra:
            raise SpecError(f"unknown spec keys: {sorted(extra)}")
        for key in ("mode", "dim"):
            if key not in data:
                raise SpecError(f"spec needs {key!r}")
        sw = data.get("sweep")
        if sw is not None:
            if not isinstance(sw, dict):
                raise SpecError("sweep must be a table")
            extra = set(sw) - {"variable", "start", "stop", "count"}
            missing = {"variable", "start", "stop", "count"} - set(sw)
            if extra or missing:
                raise SpecError(f"sweep keys: unknown {sorted(extra)}, missing {sorted(missing)}")
            data["sweep"] = Sweep(str(sw["variable"]), float(sw["start"]), float(sw["stop"]), int(sw["count"]))
        try:
            return cls(**data)
        except TypeError as exc:
            raise SpecError(str(exc)) from None


def load_spec(path) -> SweepSpec:
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc}") from None
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from None
    else:
        import tomli
        try:
            data = tomli.loads(text.decode("utf-8"))
        except tomli.TOMLDecodeError as exc:
            raise SpecError(f"invalid TOML: {exc}") from None
    return SweepSpec.from_dict(data)


def _fig6_warning():
    lat = Lattice.orthorhombic()
    a = lat.radius_for_fraction(0.3)
    return (f"f = 0.3 on the 1:1.5:2 cell needs a = {a:.4f} > half the shortest period; "
            "neighbouring spheres overlap and the formula is used outside its proven range",)


def scenario(name: str) -> SweepSpec:
    """Named scenarios for the figure curves and convergence studies."""
    presets = {
        "fig4-left": dict(mode="velocity", dim=2, materials="water-in-air", lattice="hexagonal",
                          sweep=Sweep("f", 0.0, 0.3, 31)),
        "fig4-right": dict(mode="velocity", dim=3, materials="water-in-air", lattice="cubic",
                           sweep=Sweep("f", 0.0, 0.3, 31)),
        "fig5-left": dict(mode="dispersion", dim=2, materials="water-in-air", lattice="square",
                          omega_over_c=1.0, sweep=Sweep("f", 0.0, 0.2, 21)),
        "fig5-right": dict(mode="dispersion", dim=3, materials="water-in-air", lattice="cubic",
                           omega_over_c=1.0, sweep=Sweep("f", 0.0, 0.2, 21)),
        "fig6": dict(mode="velocity", dim=3, materials="rigid", bc="neumann", lattice="orthorhombic",
                     f=0.3, allow_overlap=True, sweep=Sweep("omega_over_c", 0.0, 3.0, 31),
                     warnings=_fig6_warning()),
        "mild2d": dict(mode="convergence", dim=2, materials="mild", lattice="square", omega_over_c=0.5,
                       sweep=Sweep("a", 0.02, 0.08, 4)),
        "mild3d": dict(mode="convergence", dim=3, materials="mild", lattice="cubic", omega_over_c=1.0,
                       sweep=Sweep("a", 0.005, 0.05, 8)),
        "homogeneous": dict(mode="convergence", dim=2, materials="homogeneous", lattice="square",
                            omega_over_c=0.5, sweep=Sweep("a", 0.02, 0.08, 4)),
    }
    if name not in presets:
        raise SpecError(f"unknown scenario {name!r}; choose from {sorted(presets)}")
    return SweepSpec(name=name, **presets[name])


SCENARIOS = ("fig4-left", "fig4-right", "fig5-left", "fig5-right", "fig6", "mild2d", "mild3d", "homogeneous")


def with_overrides(spec: SweepSpec, **kw) -> SweepSpec:
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(spec, **kw) if kw else spec
