"""Deviation of |chi|^2 from the far-field superposition versus radius."""

import argparse
import math

from curvscatter import pwa, wavefield
from curvscatter.geometry import GaussianDent


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f0", type=float, default=1.0)
    ap.add_argument("--k", type=float, nargs="+", default=[1.0, 7.5])
    ap.add_argument("--multiples", type=float, nargs="+", default=[3, 6, 9, 18])
    args = ap.parse_args(argv)
    p = GaussianDent(args.f0, 1.0 / math.sqrt(2.0))
    for k in args.k:
        ch = pwa.channel_sweep(p, "full", k)
        r2 = pwa.Radii.default(p, k).r2
        for m in args.multiples:
            dev = wavefield.far_field_deviation(p, ch, m * r2)
            print(f"k = {k:g}: r = {m:g} r2 = {m * r2:7.2f}, max relative deviation {dev:.3e}")


if __name__ == "__main__":
    main()
