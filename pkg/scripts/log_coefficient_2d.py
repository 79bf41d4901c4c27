"""Fit sigma in (|Q|/|Pi| - c1 a^2) / a^4 = sigma ln a + const for 2D inclusions."""
import argparse

import numpy as np

from blochdisp import asymptotics as A, dtn
from blochdisp.config import resolve_materials
from blochdisp.media import Lattice, filling_fraction


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--amin", type=float, default=1e-3)
    p.add_argument("--amax", type=float, default=2e-2)
    p.add_argument("--count", type=int, default=10)
    args = p.parse_args()
    lat = Lattice.square()
    a_s = np.geomspace(args.amin, args.amax, args.count)
    for name in ("mild", "water-in-air", "mercury-in-water"):
        m = resolve_materials(name)
        c = m.c_host
        y = [(-dtn.quadratic_form(2, m, c, a).value / lat.cell_volume - A.c1_term(2, m, filling_fraction(lat, a)))
             / a ** 4 for a in a_s]
        sigma = np.polyfit(np.log(a_s), y, 1)[0]
        expected = -A.c2_term(2, m, c, 1e-2, c, filling_fraction(lat, 1e-2)) / 1e-8
        print(f"{name:17s} sigma {sigma:+.6f}  closed form {expected:+.6f}  rel {sigma / expected - 1:+.2%}")


if __name__ == "__main__":
    main()
