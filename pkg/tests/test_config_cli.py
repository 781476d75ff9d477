import csv
import json
import math
from importlib import metadata

import pytest

from curvscatter import cli, pwa
from curvscatter.config import ConfigError, KGrid, RunConfig, build, parse_config, parse_text
from curvscatter.pwa import Scenario


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


# -- configuration -----------------------------------------------------------------


def test_minimal_config_fills_defaults(tmp_path):
    cfg = parse_config(write(tmp_path, "f0 = 1\nsigma = 0.70710678\nscenario = full\n"))
    assert cfg.f0 == 1.0 and cfg.sigma == 0.70710678
    assert cfg.scenario is Scenario.FULL
    assert cfg.k_grid == KGrid()
    assert cfg.deterministic


def test_comments_and_blank_lines(tmp_path):
    cfg = parse_config(write(tmp_path, "# header\n\nf0 = 2   # amplitude\nk_spacing = linear\n"))
    assert cfg.f0 == 2.0 and cfg.k_grid.spacing == "linear"


@pytest.mark.parametrize("text,fragment", [
    ("sigma = -1\n", "sigma"),
    ("sgima = 1\n", "sgima"),
    ("f0 = one\n", "f0"),
    ("k_count = 2.5\n", "k_count"),
    ("f0 = 1\nf0 = 2\n", "duplicate"),
    ("f0 1\n", "key = value"),
    ("k_min = 2\nk_max = 1\n", "k_max"),
    ("scenario = curvy\n", "scenario"),
    ("ode_rel = 0\n", "ode_rel"),
    ("jobs = 0\n", "jobs"),
    ("k_spacing = cubic\n", "k_spacing"),
])
def test_config_errors_name_the_problem(tmp_path, text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(write(tmp_path, text))


def test_missing_file():
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/run.cfg")


def test_flags_override_file(tmp_path):
    cfg = parse_config(write(tmp_path, "f0 = 1\nk_count = 10\n"), {"f0": 2.0, "k_count": 5})
    assert cfg.f0 == 2.0 and cfg.k_grid.count == 5


def test_k_grid_values():
    assert KGrid(1.0, 4.0, 4, "linear").values().tolist() == [1.0, 2.0, 3.0, 4.0]
    g = KGrid(0.1, 10.0, 3, "log").values()
    assert g[1] == pytest.approx(1.0, rel=1e-14)


def test_parse_text_and_build_roundtrip():
    raw = parse_text("f0 = 0.5\nscenario = metric-only\nr_cut = auto\n")
    cfg = build(raw)
    assert cfg.scenario is Scenario.METRIC_ONLY and cfg.r_cut is None
    d = cfg.as_dict()
    assert d["scenario"] == "metric-only" and d["f0"] == 0.5


def test_profile_errors_become_config_errors():
    with pytest.raises(ConfigError):
        RunConfig(r_cut=0.5).validate().profile()


# -- command line -------------------------------------------------------------------


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_console_script_registered():
    eps = metadata.entry_points(group="console_scripts")
    assert any(ep.name == "curvscatter" and ep.value == "curvscatter.cli:main" for ep in eps)


def test_geometry_csv(tmp_path):
    assert run("geometry", "--out", tmp_path, "--r-count", 11) == 0
    header, rows = read_csv(tmp_path / "geometry.csv")
    assert header == cli.GEOMETRY_HEADER
    assert len(rows) == 11
    assert float(rows[0][5]) == pytest.approx(4.0, rel=1e-12)   # K(0)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["files"] == ["geometry.csv"]
    assert manifest["units"]["a0_nm"] == 10.0
    assert manifest["config"]["sigma"] == pytest.approx(1 / math.sqrt(2))


def test_seventeen_significant_digits(tmp_path):
    run("geometry", "--out", tmp_path, "--r-count", 3)
    _, rows = read_csv(tmp_path / "geometry.csv")
    value = rows[1][1]
    assert float(value) == float(format(float(value), ".17g"))
    assert len(value.replace(".", "").replace("-", "").lstrip("0")) >= 15


def test_global_flags_before_or_after_command(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("--f0", 0.5, "--kcount", 3, "--out", a, "pwa") == 0
    assert run("pwa", "--f0", 0.5, "--kcount", 3, "--out", b) == 0
    for name in ("pwa_phases.csv", "pwa_partials.csv", "pwa_spectrum.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_pwa_outputs_deterministic_across_jobs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("pwa", "--kcount", 4, "--kmax", 3, "--out", a) == 0
    assert run("pwa", "--kcount", 4, "--kmax", 3, "--jobs", 2, "--out", b) == 0
    for name in ("pwa_phases.csv", "pwa_partials.csv", "pwa_spectrum.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ma, mb = (json.loads((d / "manifest.json").read_text()) for d in (a, b))
    for m in (ma, mb):
        m["config"].pop("output_dir")
    assert ma == mb
    header, rows = read_csv(a / "pwa_spectrum.csv")
    assert header == ["k_inv_a0", "sigma_tot_a0", "sigma_M_a0", "m_max_used", "L_s_hbar"]
    assert len(rows) == 4


def test_figure_one_three_tables(tmp_path):
    assert run("figure", "fig1", "--f0", 0.5, "--kcount", 3, "--out", tmp_path) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["fig1_partials.csv", "fig1_phases.csv", "fig1_spectrum.csv", "manifest.json"]


def test_figure_two_uses_metric_only(tmp_path):
    run("figure", "fig2", "--kcount", 2, "--kmin", 0.1, "--kmax", 0.2, "--out", tmp_path / "m")
    run("pwa", "--scenario", "metric-only", "--kcount", 2, "--kmin", 0.1, "--kmax", 0.2, "--out", tmp_path / "p")
    assert (tmp_path / "m" / "fig2_spectrum.csv").read_bytes() == (tmp_path / "p" / "pwa_spectrum.csv").read_bytes()


def test_figure_five_geometry(tmp_path):
    assert run("figure", "fig5", "--out", tmp_path) == 0
    header, _ = read_csv(tmp_path / "fig5_geometry.csv")
    assert {"U_geo_inv_a0sq", "K_inv_a0sq", "M_inv_a0"} <= set(header)


def test_field_csv_and_sidecar(tmp_path):
    assert run("field", "--k", 2.0, "--nx", 9, "--ny", 7, "--complex", "--out", tmp_path) == 0
    header, rows = read_csv(tmp_path / "field.csv")
    assert header[:3] == ["x_a0", "y_a0", "abs_chi_sq_inv_a0sq"] and len(header) == 5
    assert len(rows) == 63
    side = json.loads((tmp_path / "field_header.json").read_text())
    assert side["k_inv_a0"] == 2.0 and side["grid"]["nx"] == 9


def test_born_and_angular(tmp_path):
    assert run("born", "--kcount", 2, "--angles", 3, "--out", tmp_path) == 0
    header, rows = read_csv(tmp_path / "born_amplitude.csv")
    assert header == ["k_inv_a0", "theta_rad", "re_a_sqrt_a0", "im_a_sqrt_a0"] and len(rows) == 6
    assert run("angular", "--kcount", 2, "--n-theta", 8, "--out", tmp_path) == 0
    _, rows = read_csv(tmp_path / "angular.csv")
    assert len(rows) == 16


def test_lens1d_summary(tmp_path, capsys):
    assert run("lens1d", "--no-measure", "--kcount", 3, "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert "path_extension_a0=0.561762" in out and "k_period_inv_a0=11.1848" in out
    summary = json.loads((tmp_path / "lens1d_summary.json").read_text())
    assert summary["k_period_inv_a0"] * summary["path_extension_a0"] == pytest.approx(2 * math.pi)


def test_exit_code_config_errors(tmp_path):
    assert run("pwa", "--sigma", -1, "--out", tmp_path) == cli.EXIT_CONFIG
    cfg = write(tmp_path, "sgima = 1\n")
    assert run("--config", cfg, "pwa", "--out", tmp_path) == cli.EXIT_CONFIG
    assert run("field", "--k", -1, "--out", tmp_path) == cli.EXIT_CONFIG
    with pytest.raises(SystemExit) as exc:
        run("pwa", "--no-such-flag")
    assert exc.value.code == cli.EXIT_CONFIG


def test_exit_code_numerical_failure(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise pwa.PwaError("synthetic failure")
    monkeypatch.setattr(pwa, "spectrum", boom)
    assert run("pwa", "--kcount", 2, "--out", tmp_path) == cli.EXIT_NUMERIC


def test_reproduce_exit_codes(tmp_path):
    assert run("reproduce", "--only", 9, "--out", tmp_path / "ok") == 0
    report = json.loads((tmp_path / "ok" / "acceptance_report.json").read_text())
    assert [c["number"] for c in report["criteria"]] == [9]
    assert report["criteria"][0]["passed"]


def test_reproduce_reports_failure(tmp_path, monkeypatch):
    from curvscatter import acceptance

    def failing():
        return {"passed": False, "note": "synthetic"}
    patched = tuple((n, t, failing if n == 9 else fn) for n, t, fn in acceptance.CRITERIA)
    monkeypatch.setattr(acceptance, "CRITERIA", patched)
    assert run("reproduce", "--only", 9, "--out", tmp_path) == cli.EXIT_ACCEPTANCE
