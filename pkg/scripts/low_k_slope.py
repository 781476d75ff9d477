"""Low-energy behaviour of the total cross length.

Fits the log-log slope of sigma_tot over a k window for the PWA and Born
results, and the slope of cot(delta_0) against ln k, which the 2D s-wave
law predicts to be 2/pi.  Local slopes show the drift towards -1 as k -> 0.
"""

import argparse
import math

import numpy as np

from curvscatter import born, pwa
from curvscatter.geometry import GaussianDent


def main(argv=None):
    ap = argparse.ArgumentParser(description="low-k slope analysis")
    ap.add_argument("--f0", type=float, default=1.0)
    ap.add_argument("--kmin", type=float, default=0.02)
    ap.add_argument("--kmax", type=float, default=0.1)
    ap.add_argument("--count", type=int, default=9)
    args = ap.parse_args(argv)
    p = GaussianDent(args.f0, 1.0 / math.sqrt(2.0))
    k = np.geomspace(args.kmin, args.kmax, args.count)
    lk = np.log(k)
    print(f"k in [{args.kmin}, {args.kmax}], f0 = {args.f0}")
    for scenario in ("full", "potential-only"):
        sp = pwa.spectrum(p, scenario, k)
        cot = np.array([1.0 / math.tan(d[0]) for d in sp.phase_shifts])
        slope = np.polyfit(lk, np.log(sp.sigma_tot), 1)[0]
        cot_slope = np.polyfit(lk, cot, 1)[0]
        local = np.gradient(np.log(sp.sigma_tot), lk)
        print(f"{scenario:>15}: slope {slope:+.4f}, d cot(delta_0)/d ln k = {cot_slope:.4f} "
              f"(2/pi = {2 / math.pi:.4f}), local slopes {np.round(local[[0, -1]], 3)}")
    sb = born.born_spectrum(p, k)
    print(f"{'born':>15}: slope {np.polyfit(lk, np.log(sb), 1)[0]:+.4f}")


if __name__ == "__main__":
    main()
