"""Plane-wave oracle convergence in the truncation M for the mild 2D preset."""
import argparse
import time

from blochdisp import asymptotics as A, dtn
from blochdisp.config import resolve_materials
from blochdisp.media import Lattice, WaveContext
from blochdisp.pwe import PlaneWaveSolver


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--a", type=float, default=0.05)
    p.add_argument("--omega-over-c", type=float, default=0.5)
    p.add_argument("--M", type=int, nargs="+", default=[6, 8, 12, 16, 20])
    args = p.parse_args()
    m, lat = resolve_materials("mild"), Lattice.square()
    w = WaveContext(args.omega_over_c * m.c_host, args.a, (1.0, 0.0))
    semi = dtn.semi_analytic_ksq(m, lat, w).k_squared
    asym = A.ksq(m, lat, w).k_squared
    print(f"semi-analytic |k|^2 = {semi:.10f}, closed form = {asym:.10f}")
    print(" M   |k|^2 (PWE)      PWE-semi    PWE-closed   seconds")
    for M in args.M:
        t0 = time.perf_counter()
        k = PlaneWaveSolver(m, lat, args.a, M).invert(w.omega, w.k_hat)
        dt = time.perf_counter() - t0
        print(f"{M:2d}   {k * k:.10f}  {k * k - semi:+.2e}   {k * k - asym:+.2e}   {dt:.2f}")


if __name__ == "__main__":
    main()
