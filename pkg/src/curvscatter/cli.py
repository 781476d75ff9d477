"""Command-line driver.

    curvscatter [global flags] <command> [command flags]

Commands: geometry, born, pwa, angular, field, lens1d, figure, reproduce.
Global flags may also follow the command name.  Exit codes: 0 success,
2 configuration error, 3 numerical failure, 4 acceptance failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import platform
import sys
from importlib import metadata
from pathlib import Path

import numpy as np

from . import acceptance, born, lens1d, observables, pwa, wavefield
from .config import ConfigError, RunConfig, parse_config
from .geometry import ProfileError
from .numerics import BesselDomainError, OdeError, OdeSpec, QuadratureError, QuadratureSpec

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ACCEPTANCE = 0, 2, 3, 4
NUMERICAL_ERRORS = (pwa.PwaError, OdeError, QuadratureError, BesselDomainError,
                    wavefield.WaveFieldError, observables.ObservableError)
# length unit recorded in manifests; every computation is in reduced units
A0_NM_METADATA = 10.0
FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5")
_FIGURE_SCENARIO = {"fig1": pwa.Scenario.FULL, "fig2": pwa.Scenario.METRIC_ONLY,
                    "fig3": pwa.Scenario.POTENTIAL_ONLY}


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


class Outputs:
    """Serial CSV writer that records every file for the manifest."""

    def __init__(self, cfg: RunConfig, command: str, extra: dict | None = None):
        self.cfg = cfg
        self.dir = Path(cfg.output_dir)
        self.command = command
        self.extra = dict(extra or {})
        self.files = []

    def csv(self, name: str, header, rows) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        path = self.dir / name
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
        self.files.append(name)
        return path

    def json(self, name: str, payload: dict) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        path = self.dir / name
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
        self.files.append(name)
        return path

    def manifest(self) -> Path:
        cfg = self.cfg.as_dict()
        # the worker count never changes results, so it stays out of the manifest
        cfg.pop("jobs", None)
        payload = {
            "command": self.command,
            "config": cfg,
            "extra": self.extra,
            "files": sorted(self.files),
            "library": {"name": "curvscatter", "distribution": "artifact", "version": _version()},
            "units": {"length": "a0", "a0_nm": A0_NM_METADATA, "hbar2_over_2m": 1.0},
            "python": platform.python_version(),
            "numpy": np.__version__,
        }
        return self.json("manifest.json", payload)


# -- helpers ---------------------------------------------------------------------


def _ode_spec(cfg: RunConfig) -> OdeSpec:
    rel = cfg.tolerances.ode_rel
    return OdeSpec(rel_tol=rel, abs_tol=rel * 1e-4)


def _quad_spec(cfg: RunConfig) -> QuadratureSpec:
    return QuadratureSpec(rel_tol=cfg.tolerances.quad_rel, abs_tol=1e-15, max_subdivisions=4000)


def _policy(cfg: RunConfig) -> pwa.TruncationPolicy:
    return pwa.TruncationPolicy(delta_floor=cfg.tolerances.delta_floor)


def _spectrum(cfg: RunConfig, scenario=None):
    return pwa.spectrum(cfg.profile(), scenario or cfg.scenario, cfg.k_grid.values(),
                        policy=_policy(cfg), spec=_ode_spec(cfg), jobs=cfg.jobs)


def _write_pwa(out: Outputs, spec_data, prefix: str = "pwa"):
    rows_d, rows_p = [], []
    for k, deltas, parts in zip(spec_data.k, spec_data.phase_shifts, spec_data.partials):
        for m, (d, s) in enumerate(zip(deltas, parts)):
            rows_d.append((k, m, d))
            rows_p.append((k, m, s))
    out.csv(f"{prefix}_phases.csv", ["k_inv_a0", "m", "delta_rad"], rows_d)
    out.csv(f"{prefix}_partials.csv", ["k_inv_a0", "m", "sigma_m_a0"], rows_p)
    out.csv(f"{prefix}_spectrum.csv",
            ["k_inv_a0", "sigma_tot_a0", "sigma_M_a0", "m_max_used", "L_s_hbar"],
            zip(spec_data.k, spec_data.sigma_tot, spec_data.sigma_M, spec_data.m_max_used, spec_data.L_s))


def _geometry_rows(profile, r):
    for ri in r:
        e = profile.evaluate(float(ri))
        yield (e.r, e.f, e.df, e.F, e.g_rr, e.K, e.M, e.U_geo)


GEOMETRY_HEADER = ["r_a0", "f_a0", "df", "F", "g_rr", "K_inv_a0sq", "M_inv_a0", "U_geo_inv_a0sq"]


# -- commands --------------------------------------------------------------------


def cmd_geometry(cfg: RunConfig, args) -> int:
    p = cfg.profile()
    r_max = args.r_max if args.r_max is not None else p.r_cut
    out = Outputs(cfg, "geometry", {"r_max": r_max, "r_count": args.r_count})
    out.csv("geometry.csv", GEOMETRY_HEADER, _geometry_rows(p, np.linspace(0.0, r_max, args.r_count)))
    out.manifest()
    return EXIT_OK


def cmd_born(cfg: RunConfig, args) -> int:
    p = cfg.profile()
    k = cfg.k_grid.values()
    q = _quad_spec(cfg)
    out = Outputs(cfg, "born", {"angles": args.angles})
    out.csv("born_spectrum.csv", ["k_inv_a0", "sigma_tot_born_a0"],
            ((ki, born.born_sigma_tot(p, float(ki), q)) for ki in k))
    if args.angles:
        theta = np.linspace(0.0, math.pi, args.angles)
        rows = []
        for ki in k:
            a = born.born_amplitude(p, float(ki), theta, q)
            rows.extend((ki, t, ai.real, ai.imag) for t, ai in zip(theta, a))
        out.csv("born_amplitude.csv", ["k_inv_a0", "theta_rad", "re_a_sqrt_a0", "im_a_sqrt_a0"], rows)
    out.manifest()
    return EXIT_OK


def cmd_pwa(cfg: RunConfig, args) -> int:
    out = Outputs(cfg, "pwa")
    _write_pwa(out, _spectrum(cfg))
    out.manifest()
    return EXIT_OK


def _angular_rows(cfg: RunConfig, n_theta: int):
    p = cfg.profile()
    theta = observables.default_theta_grid(n_theta)
    for k in cfg.k_grid.values():
        ch = pwa.channel_sweep(p, cfg.scenario, float(k), _policy(cfg), _ode_spec(cfg))
        d = observables.directional_density(ch, theta)
        for t, w, ds in zip(d.theta, d.w, d.dsigma_dtheta):
            yield (k, t, w, ds)


def cmd_angular(cfg: RunConfig, args) -> int:
    out = Outputs(cfg, "angular", {"n_theta": args.n_theta})
    out.csv("angular.csv", ["k_inv_a0", "theta_rad", "w_inv_rad", "dsigma_dtheta_a0"],
            _angular_rows(cfg, args.n_theta))
    out.manifest()
    return EXIT_OK


def _field_outputs(cfg: RunConfig, out: Outputs, k: float, grid: wavefield.Grid, complex_out: bool):
    p = cfg.profile()
    ch = pwa.channel_sweep(p, cfg.scenario, k, _policy(cfg), _ode_spec(cfg))
    f = wavefield.reconstruct(p, cfg.scenario, k, grid, channels=ch)
    X, Y = np.meshgrid(f.x, f.y)
    dens = f.density
    header = ["x_a0", "y_a0", "abs_chi_sq_inv_a0sq"]
    cols = [X.ravel(), Y.ravel(), dens.ravel()]
    if complex_out:
        header += ["re_chi_inv_a0", "im_chi_inv_a0"]
        cols += [f.chi.real.ravel(), f.chi.imag.ravel()]
    out.csv("field.csv", header, zip(*cols))
    fm = wavefield.focus_metrics(f)
    out.json("field_header.json", {
        "k_inv_a0": k, "f0_a0": cfg.f0, "sigma_a0": cfg.sigma, "scenario": cfg.scenario.value,
        "grid": grid.__dict__, "m_max_used": f.m_max_used, "seam_radius_a0": f.seam_radius,
        "focus": {"x_a0": fm.x_focus, "y_a0": fm.y_focus, "peak_gain": fm.peak_gain,
                  "on_forward_axis": fm.on_forward_axis, "resolved": fm.resolved},
    })
    return fm


def _grid_from(args) -> wavefield.Grid:
    return wavefield.Grid(args.x_min, args.x_max, args.y_min, args.y_max, args.nx, args.ny)


def cmd_field(cfg: RunConfig, args) -> int:
    grid = _grid_from(args)
    out = Outputs(cfg, "field", {"k": args.k, "complex": args.complex})
    fm = _field_outputs(cfg, out, args.k, grid, args.complex)
    out.manifest()
    print(f"focus x = {fm.x_focus:.6g} a0, peak gain = {fm.peak_gain:.6g}, resolved = {fm.resolved}")
    return EXIT_OK


def cmd_lens1d(cfg: RunConfig, args) -> int:
    p = cfg.profile()
    model = lens1d.LensModel.of(p)
    out = Outputs(cfg, "lens1d", {"measure": args.measure})
    k = cfg.k_grid.values()
    out.csv("lens1d.csv", ["k_inv_a0", "sigma_tot_1d"], zip(k, lens1d.sigma_tot_1d(p, k, model.path_extension)))
    summary = {"path_extension_a0": model.path_extension, "k_period_inv_a0": model.k_period}
    if args.measure and model.path_extension > 0:
        kk = np.linspace(2.0, 10.0, 81)
        s = pwa.spectrum(p, cfg.scenario, kk, _policy(cfg), _ode_spec(cfg), jobs=cfg.jobs).sigma_tot
        est = lens1d.measured_period(kk, s)
        summary.update(measured_period_inv_a0=est.period, resolved=est.resolved,
                       relative_deviation=(est.period - model.k_period) / model.k_period)
    out.json("lens1d_summary.json", summary)
    out.manifest()
    print(" ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in summary.items()))
    return EXIT_OK


def cmd_figure(cfg: RunConfig, args) -> int:
    fig = args.figure
    out = Outputs(cfg, f"figure {fig}")
    if fig in _FIGURE_SCENARIO:
        _write_pwa(out, _spectrum(cfg, _FIGURE_SCENARIO[fig]), prefix=fig)
    elif fig == "fig4":
        _field_outputs(cfg, out, args.k, _grid_from(args), False)
    else:
        p = cfg.profile()
        out.csv("fig5_geometry.csv", GEOMETRY_HEADER, _geometry_rows(p, np.linspace(0.0, p.r_cut, 501)))
    out.manifest()
    return EXIT_OK


def cmd_reproduce(cfg: RunConfig, args) -> int:
    numbers = None
    if args.only:
        numbers = {int(x) for x in args.only.split(",")}
    results = acceptance.run_all(numbers, echo=print)
    out = Outputs(cfg, "reproduce")
    out.json("acceptance_report.json", {
        "criteria": [{"number": r.number, "title": r.title, "passed": r.passed,
                      "measured": {k: _jsonable(v) for k, v in r.measured.items()},
                      "seconds": r.seconds} for r in results]})
    out.manifest()
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failed: {failed}" if failed else ""))
    return EXIT_ACCEPTANCE if failed else EXIT_OK


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


# -- argument parsing --------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser):
    S = argparse.SUPPRESS
    g = parser.add_argument_group("global options")
    g.add_argument("--config", default=S, help="key = value configuration file")
    g.add_argument("--out", default=S, help="output directory")
    g.add_argument("--scenario", default=S, help="full | metric-only | potential-only | flat")
    g.add_argument("--f0", type=float, default=S, help="dent amplitude (a0)")
    g.add_argument("--sigma", type=float, default=S, help="dent width (a0)")
    g.add_argument("--r-cut", dest="r_cut", type=float, default=S, help="override the cutoff radius (a0)")
    g.add_argument("--kmin", type=float, default=S)
    g.add_argument("--kmax", type=float, default=S)
    g.add_argument("--kcount", type=int, default=S)
    g.add_argument("--log-k", dest="k_spacing", action="store_const", const="log", default=S,
                   help="log-spaced k-grid (default)")
    g.add_argument("--linear-k", dest="k_spacing", action="store_const", const="linear", default=S)
    g.add_argument("--ode-rel", dest="ode_rel", type=float, default=S)
    g.add_argument("--quad-rel", dest="quad_rel", type=float, default=S)
    g.add_argument("--delta-floor", dest="delta_floor", type=float, default=S)
    g.add_argument("--jobs", type=int, default=S, help="worker processes for k-sweeps")


def _grid_flags(p):
    d = wavefield.Grid()
    p.add_argument("--nx", type=int, default=d.nx)
    p.add_argument("--ny", type=int, default=d.ny)
    p.add_argument("--x-min", type=float, default=d.x_min)
    p.add_argument("--x-max", type=float, default=d.x_max)
    p.add_argument("--y-min", type=float, default=d.y_min)
    p.add_argument("--y-max", type=float, default=d.y_max)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curvscatter", description="Quantum scattering on a curved 2D surface.",
                     allow_abbrev=False)
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_, allow_abbrev=False)
        _global_flags(p)
        p.set_defaults(func=fn)
        return p

    p = add("geometry", cmd_geometry, "geometric quantities along r")
    p.add_argument("--r-max", type=float, default=None)
    p.add_argument("--r-count", type=int, default=501)
    p = add("born", cmd_born, "first Born cross length (and amplitudes)")
    p.add_argument("--angles", type=int, default=0, help="also write amplitudes on this many angles")
    add("pwa", cmd_pwa, "partial-wave phase shifts, partials and spectrum")
    p = add("angular", cmd_angular, "directional density w(theta) over the k-grid")
    p.add_argument("--n-theta", type=int, default=observables.N_THETA)
    p = add("field", cmd_field, "|chi|^2 on a Cartesian grid")
    p.add_argument("--k", type=float, default=7.5)
    p.add_argument("--complex", action="store_true", help="also write Re and Im of chi")
    _grid_flags(p)
    p = add("lens1d", cmd_lens1d, "1D lensing model and the measured 2D period")
    p.add_argument("--no-measure", dest="measure", action="store_false")
    p = add("figure", cmd_figure, "datasets behind one figure")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--k", type=float, default=7.5, help="wavenumber for fig4")
    _grid_flags(p)
    p = add("reproduce", cmd_reproduce, "run the acceptance suite")
    p.add_argument("--only", default=None, help="comma-separated criterion numbers")
    return parser


_FLAG_TO_KEY = {"out": "output_dir", "kmin": "k_min", "kmax": "k_max", "kcount": "k_count"}
_CONFIG_KEYS = ("scenario", "f0", "sigma", "r_cut", "k_spacing", "ode_rel", "quad_rel",
                "delta_floor", "jobs", "out", "kmin", "kmax", "kcount")


def config_from_args(args) -> RunConfig:
    overrides = {}
    for name in _CONFIG_KEYS:
        if hasattr(args, name):
            overrides[_FLAG_TO_KEY.get(name, name)] = getattr(args, name)
    return parse_config(getattr(args, "config", None), overrides)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return args.func(cfg, args)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ProfileError, ValueError) as exc:
        # remaining ValueErrors come from out-of-range command arguments
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
