"""Group-velocity ratio for rigid spheres on the 1:1.5:2 cell at f = 0.3 versus omega/c.

At this filling the spheres overlap their neighbours; the formula is evaluated
anyway, as a curve shape rather than a certified value.
"""
import argparse

import numpy as np

from blochdisp.asymptotics import group_velocity
from blochdisp.config import resolve_materials
from blochdisp.media import Lattice, WaveContext


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--f", type=float, default=0.3)
    p.add_argument("--wmax", type=float, default=3.0)
    p.add_argument("--count", type=int, default=13)
    args = p.parse_args()
    m = resolve_materials("rigid")
    lat = Lattice.orthorhombic()
    a = lat.radius_for_fraction(args.f)
    print(f"a = {a:.6f}, a^2 = {a * a:.6f}")
    print("omega/c  c*/c")
    for w in np.linspace(0.0, args.wmax, args.count):
        v = group_velocity(m, lat, WaveContext(w, a, (1.0, 0.0, 0.0)), allow_overlap=True)
        print(f"{w:7.3f}  {v:.7f}")


if __name__ == "__main__":
    main()
