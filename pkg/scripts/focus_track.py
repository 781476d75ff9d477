"""Track the focal maximum of |chi|^2 behind the dent as k varies."""

import argparse
import math

import numpy as np

from curvscatter import wavefield
from curvscatter.geometry import GaussianDent


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f0", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--k", type=float, nargs="+", default=[4.0, 5.0, 6.0, 7.5, 9.0])
    ap.add_argument("--step", type=float, default=0.01, help="grid spacing near the axis (a0)")
    args = ap.parse_args(argv)
    for f0 in args.f0:
        p = GaussianDent(f0, 1.0 / math.sqrt(2.0))
        for k in args.k:
            coarse = wavefield.focus_metrics(wavefield.reconstruct(p, "full", k))
            # refine on a fine strip around the coarse maximum
            x0 = coarse.x_focus
            n = int(1.0 / args.step) + 1
            fine = wavefield.Grid(x0 - 0.5, x0 + 0.5, -0.25, 0.25, n, int(0.5 / args.step) + 1)
            fm = wavefield.focus_metrics(wavefield.reconstruct(p, "full", k, fine))
            print(f"f0 = {f0:g}, k = {k:g}: x_focus = {fm.x_focus:.3f}, y = {fm.y_focus:+.3f}, "
                  f"gain = {fm.peak_gain:.3f}, on axis = {coarse.on_forward_axis}")


if __name__ == "__main__":
    np.set_printoptions(precision=4)
    main()
