"""Run configuration: a validated record built from a key = value file and flags.

File format: one ``key = value`` per line; ``#`` starts a comment; blank
lines are ignored.  Keys::

    f0, sigma, r_cut, scenario, k_min, k_max, k_count, k_spacing,
    ode_rel, quad_rel, delta_floor, output_dir, jobs

Flags given on the command line override values from the file.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .pwa import Scenario

SIGMA_DEFAULT = 1.0 / math.sqrt(2.0)


class ConfigError(ValueError):
    """Malformed, unknown or out-of-range configuration."""


@dataclass(frozen=True)
class KGrid:
    k_min: float = 0.02
    k_max: float = 10.0
    count: int = 400
    spacing: str = "log"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.k_min, self.k_max, self.count)
        return np.linspace(self.k_min, self.k_max, self.count)


@dataclass(frozen=True)
class Tolerances:
    ode_rel: float = 1e-10
    quad_rel: float = 1e-10
    delta_floor: float = 1e-8


@dataclass(frozen=True)
class RunConfig:
    f0: float = 1.0
    sigma: float = SIGMA_DEFAULT
    r_cut: float | None = None
    scenario: Scenario = Scenario.FULL
    k_grid: KGrid = field(default_factory=KGrid)
    tolerances: Tolerances = field(default_factory=Tolerances)
    output_dir: Path = Path("out")
    jobs: int = 1
    # outputs never depend on seeds or scheduling; recorded for the manifest
    deterministic: bool = True

    def validate(self) -> "RunConfig":
        if not math.isfinite(self.f0):
            raise ConfigError("f0 must be finite")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.r_cut is not None and not self.r_cut > 0:
            raise ConfigError(f"r_cut must be positive, got {self.r_cut}")
        g = self.k_grid
        if not g.k_min > 0:
            raise ConfigError(f"k_min must be positive, got {g.k_min}")
        if not g.k_max > g.k_min:
            raise ConfigError("k_max must exceed k_min")
        if g.count < 2:
            raise ConfigError("k_count must be at least 2")
        if g.spacing not in ("log", "linear"):
            raise ConfigError(f"k_spacing must be 'log' or 'linear', got {g.spacing!r}")
        t = self.tolerances
        for name in ("ode_rel", "quad_rel", "delta_floor"):
            if not getattr(t, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        return self

    def profile(self):
        from .geometry import GaussianDent, ProfileError

        try:
            return GaussianDent(self.f0, self.sigma, self.r_cut)
        except ProfileError as exc:
            raise ConfigError(str(exc)) from exc

    def as_dict(self) -> dict:
        d = asdict(self)
        d["scenario"] = self.scenario.value
        d["output_dir"] = str(self.output_dir)
        return d


def _to_float(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None


def _to_int(key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _to_scenario(key, text):
    try:
        return Scenario.parse(text)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _to_spacing(key, text):
    text = str(text).strip().lower()
    if text not in ("log", "linear"):
        raise ConfigError(f"{key}: expected 'log' or 'linear', got {text!r}")
    return text


def _to_r_cut(key, text):
    if text is None or str(text).strip().lower() in ("", "none", "auto"):
        return None
    return _to_float(key, text)


# key -> (converter, where it lives)
_KEYS = {
    "f0": (_to_float, None),
    "sigma": (_to_float, None),
    "r_cut": (_to_r_cut, None),
    "scenario": (_to_scenario, None),
    "k_min": (_to_float, "k_grid"),
    "k_max": (_to_float, "k_grid"),
    "k_count": (_to_int, "k_grid"),
    "k_spacing": (_to_spacing, "k_grid"),
    "ode_rel": (_to_float, "tolerances"),
    "quad_rel": (_to_float, "tolerances"),
    "delta_floor": (_to_float, "tolerances"),
    "output_dir": (lambda k, v: Path(v), None),
    "jobs": (_to_int, None),
}
_RENAMED = {"k_count": "count", "k_spacing": "spacing"}
KNOWN_KEYS = tuple(_KEYS)


def parse_text(text: str) -> dict:
    """Raw ``{key: value}`` from configuration text; rejects unknown keys."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def build(values: dict, base: RunConfig | None = None) -> RunConfig:
    """Apply ``values`` (strings or typed) on top of ``base`` and validate."""
    cfg = base or RunConfig()
    top, grid, tol = {}, {}, {}
    for key, value in values.items():
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}")
        conv, where = _KEYS[key]
        typed = conv(key, value) if isinstance(value, str) or value is None else value
        if key == "scenario":
            typed = _to_scenario(key, typed)
        name = _RENAMED.get(key, key)
        {None: top, "k_grid": grid, "tolerances": tol}[where][name] = typed
    cfg = replace(cfg, **top,
                  k_grid=replace(cfg.k_grid, **grid),
                  tolerances=replace(cfg.tolerances, **tol))
    return cfg.validate()


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Configuration from an optional file, then ``overrides`` (flags) on top."""
    values = {}
    if path is not None:
        try:
            values.update(parse_text(Path(path).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return build(values)
