"""Write the datasets behind every figure for the three dent amplitudes.

    python scripts/reproduce_figures.py --out figures --jobs 1
"""

import argparse
import sys
from pathlib import Path

from curvscatter import cli


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--kcount", type=int, default=400)
    args = ap.parse_args(argv)
    runs = [("fig1", f0) for f0 in (0.5, 1.0, 2.0)]
    runs += [("fig2", 1.0), ("fig3", 1.0), ("fig4", 1.0), ("fig5", 1.0)]
    for fig, f0 in runs:
        out = args.out / f"{fig}_f0_{f0:g}"
        code = cli.main(["figure", fig, "--f0", str(f0), "--out", str(out),
                         "--jobs", str(args.jobs), "--kcount", str(args.kcount)])
        print(f"{fig} f0={f0:g}: exit {code} -> {out}")
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
