"""Remainder of the exact 3D quadratic form after the closed-form terms.

Prints the fitted log-log slope of the remainder over a in [5e-3, 5e-2] with
and without the degree-2 (quadrupole) term, and the remainder scaled by a^5
and a^6.  A slope of 6 means nothing of order a^5 is missing.
"""
import argparse

import numpy as np

from blochdisp import asymptotics as A, dtn
from blochdisp.config import resolve_materials
from blochdisp.media import Lattice, filling_fraction


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--materials", nargs="+", default=["mild", "water-in-air", "mercury-in-water"])
    p.add_argument("--count", type=int, default=8)
    args = p.parse_args()
    lat = Lattice.cubic()
    a_s = np.geomspace(5e-3, 5e-2, args.count)
    for name in args.materials:
        m = resolve_materials(name)
        c = m.c_host
        plain, full = [], []
        for a in a_s:
            f = filling_fraction(lat, a)
            q = dtn.quadratic_form(3, m, c, a).value
            r = q + lat.cell_volume * (A.c1_term(3, m, f) + A.c2_term(3, m, c, a, c, f))
            plain.append(r)
            full.append(r + lat.cell_volume * A.quadrupole_term(m, c, a, c, f))
        plain, full = np.array(plain), np.array(full)
        s0 = np.polyfit(np.log(a_s), np.log(np.abs(plain)), 1)[0]
        s1 = np.polyfit(np.log(a_s), np.log(np.abs(full)), 1)[0]
        print(f"{name}: slope two-term {s0:.3f}, with quadrupole {s1:.3f}")
        print("  a          rem/a^5 (two-term)   rem/a^6 (with quadrupole)")
        for a, r0, r1 in zip(a_s, plain, full):
            print(f"  {a:.4e}  {r0 / a ** 5:+.6f}           {r1 / a ** 6:+.4f}")


if __name__ == "__main__":
    main()
