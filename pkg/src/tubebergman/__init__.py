"""Numerical verification toolkit for weighted Bergman spaces on the tube over the parabolic base.

The tube is T_B = {x + iy in C^n : |y'|^2 < y_n}.  Modules:

- domain: points, the defect rho and sesquiholomorphic rho(z, w)
- ball: the Cayley transform to the unit ball, automorphisms, Bergman metric
- functions: test-function handles (rho-powers, log rho, bounded symbols)
- calculus: Cauchy-contour derivatives, L-operators, invariant gradient and Laplacian
- quadrature: seeded Monte Carlo over the tube and metric balls
- operators: kernels, projections, Berezin, Hankel, T-operators
- oscillation: mean oscillation, BMO and Bloch estimators, the BO + BA split
- suites / cli: verification suites and the tubeverify command
"""

from .domain import DomainConfig, TubePoint, base_point, rho, rho_self
from .errors import (BranchError, ConfigError, ContourEscapesDomain, DivergenceWarning, DomainError,
                     NonFinite, PoleError, StepTooSmall, TubeError)
from .quadrature import IntegralResult, QuadratureSpec
from .report import CheckReport

__version__ = "0.1.0"

__all__ = [
    "DomainConfig", "TubePoint", "base_point", "rho", "rho_self",
    "QuadratureSpec", "IntegralResult", "CheckReport",
    "TubeError", "DomainError", "PoleError", "BranchError", "ContourEscapesDomain",
    "NonFinite", "StepTooSmall", "ConfigError", "DivergenceWarning",
]
