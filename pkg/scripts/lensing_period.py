"""Compare the oscillation period of sigma_tot(k) with the 1D lens model."""

import argparse
import math

import numpy as np

from curvscatter import lens1d, pwa
from curvscatter.geometry import GaussianDent


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f0", type=float, nargs="+", default=[1.0, 2.0])
    ap.add_argument("--kmin", type=float, default=2.0)
    ap.add_argument("--kmax", type=float, default=10.0)
    ap.add_argument("--count", type=int, default=81)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)
    k = np.linspace(args.kmin, args.kmax, args.count)
    for f0 in args.f0:
        p = GaussianDent(f0, 1.0 / math.sqrt(2.0))
        model = lens1d.LensModel.of(p)
        s = pwa.spectrum(p, "full", k, jobs=args.jobs).sigma_tot
        est = lens1d.measured_period(k, s)
        dev = (est.period - model.k_period) / model.k_period
        print(f"f0 = {f0:g}: wp = {model.path_extension:.6f}, k_p = {model.k_period:.4f}, "
              f"measured = {est.period:.4f} ({dev:+.1%}), resolved = {est.resolved}, "
              f"sigma_tot range [{s.min():.3f}, {s.max():.3f}]")


if __name__ == "__main__":
    main()
