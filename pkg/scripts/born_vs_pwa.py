"""Relative deviation of the first Born cross length from the PWA result."""

import argparse
import math

from curvscatter import born, pwa
from curvscatter.geometry import GaussianDent

def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f0", type=float, nargs="+", default=[0.1, 0.25, 0.5, 1.0])
    ap.add_argument("--k", type=float, nargs="+", default=[0.05, 0.2, 1.0, 2.0, 5.0, 8.0])
    args = ap.parse_args(argv)
    print("f0      " + "".join(f"k={k:<9g}" for k in args.k))
    for f0 in args.f0:
        p = GaussianDent(f0, 1.0 / math.sqrt(2.0))
        row = []
        for k in args.k:
            s_pwa = pwa.cross_lengths(pwa.channel_sweep(p, "full", k)).sigma_tot
            s_born = born.born_sigma_tot(p, k)
            row.append((s_born - s_pwa) / s_pwa)
        print(f"{f0:<8g}" + "".join(f"{d:<+11.3%}" for d in row))
    print("entries: (sigma_Born - sigma_PWA) / sigma_PWA")

if __name__ == "__main__":
    main()
