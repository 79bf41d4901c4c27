"""Low-frequency effective speed c*/c against filling fraction, with slopes at f -> 0."""
import argparse

import numpy as np

from blochdisp.asymptotics import group_velocity_ratio
from blochdisp.config import resolve_materials


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--fmax", type=float, default=0.3)
    p.add_argument("--count", type=int, default=7)
    args = p.parse_args()
    fs = np.linspace(0.0, args.fmax, args.count)
    for name in ("water-in-air", "mercury-in-water", "rigid"):
        m = resolve_materials(name)
        for dim in (2, 3):
            slope = (group_velocity_ratio(dim, m, 1e-6, 0.0) - 1.0) / 1e-6
            curve = " ".join(f"{group_velocity_ratio(dim, m, f, 0.0):.5f}" for f in fs)
            print(f"{name:17s} {dim}D  slope {slope:+.5f}  c*/c: {curve}")


if __name__ == "__main__":
    main()
