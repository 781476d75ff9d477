from .bessel import BesselDomainError, bessel_j, bessel_y, j1_over_x, jy_table
from .ode import OdeError, OdeResult, OdeSpec, ode_solve
from .quadrature import QuadratureError, QuadratureSpec, integrate

__all__ = [
    "BesselDomainError", "bessel_j", "bessel_y", "j1_over_x", "jy_table",
    "OdeError", "OdeResult", "OdeSpec", "ode_solve",
    "QuadratureError", "QuadratureSpec", "integrate",
]
