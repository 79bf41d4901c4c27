"""`disp` command line: velocity/dispersion/band sweeps, convergence study, validation.

Exit codes: 0 ok, 1 validation or oracle failure, 2 usage/spec error,
3 domain guard violated.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from . import __version__, asymptotics, dtn, specfun
from .config import SCENARIOS, SpecError, SweepSpec, load_spec, scenario, with_overrides
from .media import BC, ContractViolation, DomainError, Materials, WaveContext, filling_fraction

SCHEMA = 1

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


@dataclass
class Table:
    columns: List[str]
    rows: List[tuple]
    warnings: List[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def fmt(v) -> str:
    """17 significant digits, fixed spelling of non-finite values."""
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == 0:
        return "0"
    return f"{v:.17g}"


def _map(fn: Callable, values, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, values))
    return [fn(v) for v in values]


# --------------------------------------------------------------------------
# point geometry
# --------------------------------------------------------------------------

def _geometry(spec: SweepSpec, lattice, value):
    """(f, a, omega_over_c) at one sweep point."""
    var = spec.sweep.variable
    woc = value if var == "omega_over_c" else spec.omega_over_c
    if var == "f":
        f = value
        a = lattice.radius_for_fraction(f)
    elif var == "a":
        a = value
        f = None
    elif spec.f is not None:
        f = spec.f
        a = lattice.radius_for_fraction(f)
    elif spec.a is not None:
        a, f = spec.a, None
    else:
        raise SpecError(f"sweep over {var} needs a fixed f or a")
    if not spec.allow_overlap and a >= 0.5 * lattice.min_period:
        raise DomainError(f"inclusion radius {a:.6g} reaches half the shortest period "
                          "(set allow_overlap = true to evaluate anyway)")
    if f is None:
        f = filling_fraction(lattice, a, allow_overlap=spec.allow_overlap)
    if not woc >= 0:
        raise DomainError("omega/c must be >= 0")
    return f, a, woc


def _term_names(dim, materials):
    return [name for name, _ in asymptotics.corrections(dim, materials, 0.0, 0.0, 1.0, 1.0, 0.0)]


def run_velocity_sweep(spec: SweepSpec, threads: int = 1) -> Table:
    mat, lat = spec.resolved_materials(), spec.resolved_lattice()
    if spec.sweep.variable == "k_mag":
        raise SpecError("velocity sweeps run over f, a or omega_over_c")
    names = _term_names(spec.dim, mat)

    def row(v):
        f, a, woc = _geometry(spec, lat, v)
        wac = woc * a
        cg = asymptotics.group_velocity_ratio(spec.dim, mat, f, wac)
        cp = asymptotics.phase_velocity_ratio(spec.dim, mat, f, wac)
        terms = asymptotics.corrections(spec.dim, mat, f, wac, woc, lat.cell_volume, a)
        k2 = woc * woc + math.fsum(t for _, t in terms)
        return (f, a, woc, cg, cp, k2) + tuple(t for _, t in terms)

    rows = _map(row, spec.sweep.values(), threads)
    cols = ["f", "a", "omega_over_c", "group_velocity_ratio",
            "phase_velocity_ratio", "k_squared"] + names
    return Table(cols, rows, list(spec.warnings))


def run_dispersion_sweep(spec: SweepSpec, threads: int = 1) -> Table:
    mat, lat = spec.resolved_materials(), spec.resolved_lattice()
    if spec.sweep.variable == "k_mag":
        raise SpecError("dispersion sweeps run over f, a or omega_over_c")
    names = _term_names(spec.dim, mat)

    def row(v):
        f, a, woc = _geometry(spec, lat, v)
        res = asymptotics.ksq_dimensionless(spec.dim, mat, f, woc * a, woc, lat.cell_volume, a)
        return (f, a, woc, res.k_squared, res.base) + tuple(t for _, t in res.correction_terms) + (
            res.remainder_order,)

    rows = _map(row, spec.sweep.values(), threads)
    cols = ["f", "a", "omega_over_c", "k_squared", "base"] + names + ["remainder"]
    return Table(cols, rows, list(spec.warnings))


def fit_slope(x, y):
    """Least-squares slope of log|y| against log x with a 95% half-width (nan below 4 points)."""
    x, y = np.log(np.asarray(x, float)), np.log(np.abs(np.asarray(y, float)))
    if len(x) >= 4:
        p, cov = np.polyfit(x, y, 1, cov=True)
        return float(p[0]), float(1.96 * math.sqrt(cov[0, 0]))
    return float(np.polyfit(x, y, 1)[0]), float("nan")


def run_convergence(spec: SweepSpec, threads: int = 1) -> Table:
    mat, lat = spec.resolved_materials(), spec.resolved_lattice()
    if spec.sweep.variable != "a":
        raise SpecError("convergence runs sweep the radius a")
    if not spec.omega_over_c > 0:
        raise SpecError("convergence runs need omega_over_c > 0")
    use_pwe = spec.pwe if spec.pwe is not None else spec.dim == 2
    warn = list(spec.warnings)
    if use_pwe and mat.bc is not BC.TRANSMISSION:
        warn.append("plane-wave oracle skipped: only transmission inclusions are oracled")
        use_pwe = False
    omega = spec.omega_over_c * mat.c_host
    k_hat = spec.direction()

    def row(a):
        wave = WaveContext(omega, a, k_hat)
        f = filling_fraction(lat, a)
        asym = asymptotics.ksq(mat, lat, wave).k_squared
        semi = dtn.semi_analytic_ksq(mat, lat, wave).k_squared
        if use_pwe:
            from .pwe import PlaneWaveSolver
            kp = PlaneWaveSolver(mat, lat, a, spec.truncation).invert(omega, k_hat)
            pw = kp * kp
        else:
            pw = float("nan")
        quad = float("nan")
        if spec.dim == 3 and mat.bc is not BC.DIRICHLET:
            q = (asymptotics.quadrupole_term(mat, omega, a, mat.c_host, f) if mat.bc is BC.TRANSMISSION
                 else asymptotics.quadrupole_term_neumann(omega, a, mat.c_host, f))
            quad = q * spec.omega_over_c ** 2
        return (a, f, asym, semi, pw, semi - asym, pw - asym, quad)

    rows = _map(row, spec.sweep.values(), threads)
    cols = ["a", "f", "k2_asymptotic", "k2_semi_analytic", "k2_pwe", "semi_minus_asym",
            "pwe_minus_asym", "quadrupole_a5"]
    summary = {}
    a_vals = [r[0] for r in rows]
    for key, idx in (("semi_minus_asym", 5), ("pwe_minus_asym", 6)):
        ys = [r[idx] for r in rows]
        if len(rows) >= 2 and all(math.isfinite(y) and y != 0 for y in ys):
            s, ci = fit_slope(a_vals, ys)
            summary[f"slope_{key}"] = s
            summary[f"slope_{key}_ci95"] = ci
        else:
            summary[f"max_abs_{key}"] = max((abs(y) for y in ys if math.isfinite(y)), default=float("nan"))
    return Table(cols, rows, warn, summary)


def run_band(spec: SweepSpec, threads: int = 1) -> Table:
    from .pwe import PlaneWaveSolver
    mat, lat = spec.resolved_materials(), spec.resolved_lattice()
    if spec.sweep.variable != "k_mag":
        raise SpecError("band runs sweep k_mag")
    if spec.a is not None:
        a = spec.a
    elif spec.f is not None:
        a = lat.radius_for_fraction(spec.f)
    else:
        raise SpecError("band runs need a fixed f or a")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        solver = PlaneWaveSolver(mat, lat, a, spec.truncation)
    k_hat = np.asarray(spec.direction())
    rows = _map(lambda t: (t,) + tuple(solver.bands(t * k_hat, spec.n_bands)), spec.sweep.values(), threads)
    cols = ["k_mag"] + [f"omega_{i + 1}" for i in range(spec.n_bands)]
    warn = list(spec.warnings) + ["only the lowest band is certified"]
    return Table(cols, rows, warn)


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

def _check(name, ok, detail):
    return {"check": name, "pass": bool(ok), "detail": detail}


def _impedance_identity(draws=10_000, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for dim in (2, 3):
        for p in rng.uniform(0.05, 20.0, size=(draws, 4)):
            m = Materials(p[0], p[1], p[2], p[3])
            ref = asymptotics.c1_term(dim, m, 1.0)
            alt = asymptotics.c1_impedance_form(dim, m)
            worst = max(worst, abs(alt - ref) / max(abs(ref), abs(alt), 1e-300))
    return worst


def _neumann_limit():
    trans = Materials(1.0, 1.0, 1e12, 0.0)
    rigid = Materials(1.0, 1.0, bc="neumann")
    worst = 0.0
    for dim in (2, 3):
        for f in (0.001, 0.01, 0.05, 0.1):
            for wac in (0.01, 0.05, 0.1, 0.3):
                pairs = [
                    (asymptotics.ksq_dimensionless(dim, trans, f, wac, 1.0).k_squared,
                     asymptotics.ksq_dimensionless(dim, rigid, f, wac, 1.0).k_squared),
                    (asymptotics.group_velocity_ratio(dim, trans, f, wac),
                     asymptotics.group_velocity_ratio(dim, rigid, f, wac)),
                    (asymptotics.phase_velocity_ratio(dim, trans, f, wac),
                     asymptotics.phase_velocity_ratio(dim, rigid, f, wac)),
                ]
                for x, y in pairs:
                    worst = max(worst, abs(x - y) / abs(y))
    return worst


def mode_decay_exponents(materials=None, omega=1.0, R=0.35, n_max=3, a_range=(5e-3, 5e-2), count=8):
    """Fitted log-log slopes of |(N_a - N_0) psi_n| against a for n = 0..n_max (3D)."""
    m = materials or Materials(1.0, 1.0, 2.0, 0.5)
    a_s = np.geomspace(*a_range, count)
    out = []
    for n in range(n_max + 1):
        vals = [dtn.dtn_diff_eigenvalue(3, n, m, omega, a, R).value for a in a_s]
        out.append(fit_slope(a_s, vals)[0])
    return out


def _wronskians():
    worst = 0.0
    xs = np.geomspace(1e-3, 50.0, 400)
    for n in range(0, 21):
        wc = specfun.cylindrical_wronskian(n, xs)
        ws = specfun.spherical_wronskian(n, xs)
        worst = max(worst, float(np.max(np.abs(wc * math.pi * xs / 2.0 - 1.0))),
                    float(np.max(np.abs(ws * xs * xs - 1.0))))
    return worst


def surface_quadrature(dim, kR, moment, R=1.0, n=512):
    """Direct quadrature of (k_hat . r)^moment exp(-i k.r) over r = R, k_hat along the axis."""
    k = kR / R
    if dim == 2:
        th = 2.0 * math.pi * np.arange(n) / n
        z = R * np.cos(th)
        return complex(np.sum(z ** moment * np.exp(-1j * k * z)) * 2.0 * math.pi * R / n)
    # product rule: Gauss-Legendre in cos(theta), the azimuth integrates to 2 pi
    t, w = np.polynomial.legendre.leggauss(n // 8 if n >= 64 else 64)
    z = R * t
    return complex(2.0 * math.pi * R * R * np.sum(w * z ** moment * np.exp(-1j * k * z)))


def _surface_integrals():
    worst = 0.0
    for dim in (2, 3):
        for moment in (0, 1):
            for kR in np.linspace(0.1, 10.0, 60):
                ref = specfun.plane_wave_surface_integral(dim, kR, moment).complex_value
                num = surface_quadrature(dim, kR, moment)
                worst = max(worst, abs(num - ref) / max(abs(ref), 1e-300 + 1e-3 * abs(num)))
    return worst


def _resonant_retry():
    m = Materials(1.0, 1.0, 2.0, 0.5)
    omega = math.pi / dtn.DEFAULT_RADIUS  # j_0(k R) = 0 at the default radius
    q = dtn.quadratic_form(3, m, omega, 0.01)
    return q


def run_validate(canary: bool = True) -> dict:
    checks = []
    worst = _impedance_identity()
    checks.append(_check("impedance identity", worst < 1e-12, f"max relative deviation {worst:.3e} (tol 1e-12)"))
    worst = _neumann_limit()
    checks.append(_check("neumann limit", worst < 1e-9, f"max relative deviation {worst:.3e} (tol 1e-9)"))
    expo = mode_decay_exponents()
    target = [3, 3, 5, 7]
    ok = all(abs(e - t) <= 0.2 for e, t in zip(expo, target))
    checks.append(_check("mode decay", ok, "exponents " + ", ".join(f"{e:.3f}" for e in expo) + " vs 3, 3, 5, 7"))
    worst = _wronskians()
    checks.append(_check("wronskians", worst < 1e-10, f"max relative deviation {worst:.3e} (tol 1e-10)"))
    worst = _surface_integrals()
    checks.append(_check("surface integrals", worst < 1e-9, f"max relative deviation {worst:.3e} (tol 1e-9)"))
    q = _resonant_retry()
    checks.append(_check("resonant radius retry", q.retried and math.isfinite(q.value),
                         f"retry engaged: {q.retried}, radius used {q.R:g}"))
    if canary:
        old = asymptotics._C1_PERTURBATION
        asymptotics._C1_PERTURBATION = 1e-6
        try:
            perturbed = _impedance_identity(draws=200)
        finally:
            asymptotics._C1_PERTURBATION = old
        checks.append(_check("c1 perturbation canary", perturbed >= 1e-12,
                             f"perturbed identity deviation {perturbed:.3e} is detected"))
    return {"schema": SCHEMA, "version": __version__, "pass": all(c["pass"] for c in checks), "checks": checks}


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

RUNNERS = {
    "velocity": run_velocity_sweep,
    "dispersion": run_dispersion_sweep,
    "convergence": run_convergence,
    "band": run_band,
}


def _json_value(v):
    if isinstance(v, str):
        return v
    v = float(v)
    return v if math.isfinite(v) else None


def render(table: Table, spec: SweepSpec, fmt_name: str) -> str:
    meta = json.dumps(spec.to_dict(), sort_keys=True, separators=(",", ":"))
    if fmt_name == "json":
        doc = {
            "schema": SCHEMA,
            "version": __version__,
            "spec": spec.to_dict(),
            "warnings": table.warnings,
            "columns": table.columns,
            "rows": [{c: _json_value(v) for c, v in zip(table.columns, r)} for r in table.rows],
            "summary": {k: _json_value(v) for k, v in table.summary.items()},
        }
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA}\n")
    buf.write(f"# version={__version__}\n")
    buf.write(f"# spec={meta}\n")
    for w in table.warnings:
        buf.write(f"# warning={w}\n")
    for k in sorted(table.summary):
        buf.write(f"# {k}={fmt(table.summary[k])}\n")
    buf.write(",".join(table.columns) + "\n")
    for r in table.rows:
        buf.write(",".join(fmt(v) for v in r) + "\n")
    return buf.getvalue()


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_spec(spec: SweepSpec, threads: int = 1) -> Table:
    if spec.mode == "validate":
        raise SpecError("use `disp validate` for validation runs")
    return RUNNERS[spec.mode](spec, threads)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="disp", description="Long-wavelength Bloch dispersion in lattices of small inclusions.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--threads", type=int, default=1)

    sw = sub.add_parser("sweep", help="run a sweep from a spec file or a scenario preset")
    src = sw.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", help="TOML or JSON sweep specification")
    src.add_argument("--preset", choices=SCENARIOS)
    common(sw)

    cv = sub.add_parser("convergence", help="asymptotic vs semi-analytic vs plane-wave remainder study")
    cv.add_argument("--preset", choices=("mild2d", "mild3d", "homogeneous"), default="mild2d")
    cv.add_argument("--truncation", type=int)
    common(cv)

    va = sub.add_parser("validate", help="run the invariant suites")
    va.add_argument("--format", choices=("json", "text"), default="text")
    va.add_argument("--out")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            report = run_validate()
            if args.format == "json":
                text = json.dumps(report, indent=1, sort_keys=True) + "\n"
            else:
                text = "".join(f"{'PASS' if c['pass'] else 'FAIL'}  {c['check']}: {c['detail']}\n"
                               for c in report["checks"])
            _emit(text, args.out)
            return EXIT_OK if report["pass"] else EXIT_FAIL
        if args.command == "sweep":
            spec = load_spec(args.spec) if args.spec else scenario(args.preset)
        else:
            spec = with_overrides(scenario(args.preset), truncation=args.truncation)
        spec = with_overrides(spec, format=args.format, out=args.out)
        if args.threads < 1:
            raise SpecError("--threads must be >= 1")
        table = run_spec(spec, args.threads)
        _emit(render(table, spec, spec.format), spec.out)
        return EXIT_OK
    except SpecError as exc:
        print(f"disp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ContractViolation) as exc:
        print(f"disp: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ArithmeticError, TypeError) as exc:
        print(f"disp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
