"""Quantum scattering of a free particle on a smoothly dented 2D surface.

Reduced units throughout: hbar^2 / 2m = 1 and lengths in a0.
"""

from .born import born_amplitude, born_sigma_tot
from .config import ConfigError, RunConfig, parse_config
from .geometry import GaussianDent, ProfileError, SurfaceProfile
from .lens1d import LensModel, measured_period
from .observables import directional_density
from .pwa import Scenario, TruncationPolicy, channel_sweep, cross_lengths, spectrum
from .wavefield import Grid, focus_metrics, reconstruct

__version__ = "0.1.0"

__all__ = [
    "born_amplitude", "born_sigma_tot",
    "ConfigError", "RunConfig", "parse_config",
    "GaussianDent", "ProfileError", "SurfaceProfile",
    "LensModel", "measured_period",
    "directional_density",
    "Scenario", "TruncationPolicy", "channel_sweep", "cross_lengths", "spectrum",
    "Grid", "focus_metrics", "reconstruct",
    "__version__",
]
