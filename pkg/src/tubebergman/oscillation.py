"""Ball means, mean oscillation, Bloch and BMO estimators, and the BMO = BO + BA^p split.

Suprema over the tube are replaced by maxima over a grid.  Grids come from a
Halton sequence, so a grid of size 2N contains the grid of size N and every
grid-max is nondecreasing under refinement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from .calculus import invariant_gradient_norm
from .domain import DomainConfig, as_coords, rho_self
from .errors import DomainError
from .functions import FunctionHandle
from .quadrature import IntegralResult, QuadratureSpec, ball_sample

__all__ = [
    "OscillationParams",
    "make_grid",
    "boundary_sequences",
    "ball_mean",
    "ball_means",
    "mean_oscillation",
    "centered_oscillation",
    "oscillation_sup",
    "bmo_seminorm",
    "bloch_seminorm",
    "Decomposition",
    "bmo_decompose",
    "VMOTrend",
    "vmo_trend",
]


def make_grid(n: int, size: int, rho_range=(1e-2, 1e2), x_scale: float = 3.0,
              y_scale: float = 1.0, seed: int = 0) -> np.ndarray:
    """Quasi-uniform interior points with log-uniform defect over ``rho_range``.

    The first Halton coordinate sets log rho(z); the rest fill Re z in
    [-x_scale, x_scale]^n and Im z' in [-y_scale, y_scale]^(n-1).
    """
    if size < 1:
        raise ValueError("grid size must be positive")
    h = qmc.Halton(d=2 * n, scramble=True, seed=seed).random(size)
    lo, hi = np.log10(rho_range[0]), np.log10(rho_range[1])
    defect = 10 ** (lo + (hi - lo) * h[:, 0])
    x = x_scale * (2 * h[:, 1:n + 1] - 1)
    yp = y_scale * (2 * h[:, n + 1:] - 1)
    yn = defect + np.sum(yp**2, axis=1)
    return x + 1j * np.concatenate([yp, yn[:, None]], axis=1)


def boundary_sequences(n: int, steps: int = 5) -> dict:
    """Sequences leaving every compact set.

    rho -> 0 at Re z = 0; Re z_n -> infinity at rho = 1; Im z_n -> infinity
    along (0', i y).  The last one is where log rho(., i) fails to be little-Bloch.
    """
    k = np.arange(steps)
    to_boundary = np.zeros((steps, n), dtype=complex)
    to_boundary[:, -1] = 1j * 10.0 ** (-k)
    to_infinity = np.zeros((steps, n), dtype=complex)
    to_infinity[:, -1] = 10.0 ** (k + 1) + 1j
    upward = np.zeros((steps, n), dtype=complex)
    upward[:, -1] = 1j * 10.0 ** (k + 1)
    return {"rho->0": to_boundary, "Re z_n->inf": to_infinity, "Im z_n->inf": upward}


@dataclass(frozen=True)
class OscillationParams:
    r: float = 1.0
    p: float = 2.0
    grid: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError(f"metric radius must be positive, got {self.r!r}")
        if not self.p >= 1:
            raise DomainError(f"exponent p must be >= 1, got {self.p!r}")
        if self.grid is not None:
            g = as_coords(self.grid)
            if g.ndim != 2 or g.shape[0] == 0:
                raise DomainError("grid must be a nonempty (m, n) array")
            if np.any(rho_self(g) <= 0):
                raise DomainError("grid points must be interior")

    def with_grid(self, grid) -> "OscillationParams":
        return OscillationParams(self.r, self.p, grid)


def _cfg(z, cfg):
    return cfg if cfg is not None else DomainConfig(as_coords(z).shape[-1], 0.0)


def _ratio(x, w):
    # self-normalised mean sum(x w) / sum(w) with a delta-method standard error
    m = w.size
    wbar = w.mean()
    est = complex(np.sum(x * w) / np.sum(w))
    resid = (x - est) * w
    se = float(np.sqrt(np.sum(np.abs(resid) ** 2) / (m * (m - 1))) / wbar) if m > 1 else 0.0
    return est, se


def ball_mean(f, z, op: OscillationParams, spec: QuadratureSpec,
              cfg: Optional[DomainConfig] = None) -> IntegralResult:
    """f^_r(z): the dV_alpha-average of f over D(z, r)."""
    s = ball_sample(z, op.r, _cfg(z, cfg), spec)
    vals = np.asarray(f(s.points), dtype=complex)
    est, se = _ratio(vals, s.weights)
    return IntegralResult(est, se, vals.size)


def ball_means(f, points, op: OscillationParams, spec: QuadratureSpec,
               cfg: Optional[DomainConfig] = None, chunk: int = 64) -> np.ndarray:
    """Ball means at many centres at once (all centres share one eta sample)."""
    pts = as_coords(points).reshape(-1, as_coords(points).shape[-1])
    out = np.empty(len(pts), dtype=complex)
    for lo in range(0, len(pts), chunk):
        s = ball_sample(pts[lo:lo + chunk], op.r, _cfg(pts[0], cfg), spec)
        vals = np.asarray(f(s.points), dtype=complex)
        out[lo:lo + chunk] = np.sum(vals * s.weights, axis=1) / np.sum(s.weights, axis=1)
    return out


def centered_oscillation(f, z, op: OscillationParams, spec: QuadratureSpec, center=None,
                         cfg: Optional[DomainConfig] = None) -> float:
    """(|D|^-1 integral over D(z,r) of |f - lambda|^p)^(1/p), lambda = f^_r(z) unless given."""
    s = ball_sample(z, op.r, _cfg(z, cfg), spec)
    vals = np.asarray(f(s.points), dtype=complex)
    w = s.weights / s.weights.sum()
    lam = np.sum(vals * w) if center is None else center
    return float(np.sum(np.abs(vals - lam) ** op.p * w) ** (1 / op.p))


def mean_oscillation(f, z, op: OscillationParams, spec: QuadratureSpec,
                     cfg: Optional[DomainConfig] = None) -> float:
    """MO_r(f)(z) with exponent p."""
    return centered_oscillation(f, z, op, spec, None, cfg)


def oscillation_sup(f, z, op: OscillationParams, spec: QuadratureSpec,
                    cfg: Optional[DomainConfig] = None) -> float:
    """omega_r(f)(z) estimated as the max of |f(z) - f(w)| over ball samples (a lower bound)."""
    z = as_coords(z).reshape(-1)
    s = ball_sample(z, op.r, _cfg(z, cfg), spec)
    fz = complex(np.asarray(f(z[None, :]))[0])
    return float(np.max(np.abs(np.asarray(f(s.points)) - fz)))


def bmo_seminorm(f, op: OscillationParams, spec: QuadratureSpec,
                 cfg: Optional[DomainConfig] = None) -> float:
    """Grid-max of MO_r(f)."""
    if op.grid is None:
        raise DomainError("bmo_seminorm needs a grid")
    return float(max(mean_oscillation(f, z, op, spec, cfg) for z in as_coords(op.grid)))


def _real_params(z):
    return np.concatenate([z.real, z.imag])


def _from_params(v, n):
    return v[:n] + 1j * v[n:]


def bloch_seminorm(f: FunctionHandle, grid, exact: Optional[bool] = None,
                   polish: int = 0) -> float:
    """Grid-max of |grad~ f|.

    With ``polish`` > 0 the best grid points seed a local maximisation
    (Nelder-Mead), which moves the estimate towards the true supremum.
    """
    grid = as_coords(grid)
    if exact is None:
        exact = f.gradient is not None
    vals = invariant_gradient_norm(f, grid, exact=exact)
    best = float(np.max(vals))
    if polish <= 0:
        return best
    n = grid.shape[-1]

    def neg(v):
        z = _from_params(v, n)
        if rho_self(z) <= 1e-8:
            return 0.0
        return -float(invariant_gradient_norm(f, z[None, :], exact=exact)[0])

    for idx in np.argsort(vals)[::-1][:polish]:
        res = optimize.minimize(neg, _real_params(grid[idx]), method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        best = max(best, -float(res.fun))
    return best


@dataclass(frozen=True)
class Decomposition:
    """f = f1 + f2 with f1 = f^_r (the BO part) and f2 = f - f1 (the BA^p part)."""

    f1: FunctionHandle
    f2: FunctionHandle
    op: OscillationParams
    spec: QuadratureSpec
    cfg: Optional[DomainConfig] = None

    def bo_witness(self, grid=None, spec: Optional[QuadratureSpec] = None) -> float:
        """max over grid points of the sampled omega_r(f1)."""
        grid = self.op.grid if grid is None else grid
        spec = spec or self.spec
        return float(max(oscillation_sup(self.f1, z, self.op, spec, self.cfg) for z in as_coords(grid)))

    def ba_witness(self, grid=None, spec: Optional[QuadratureSpec] = None) -> float:
        """max over grid points of the ball mean of |f2|^p."""
        grid = self.op.grid if grid is None else grid
        spec = spec or self.spec
        g = lambda w: np.abs(self.f2(w)) ** self.op.p + 0j
        return float(max(ball_mean(g, z, self.op, spec, self.cfg).value.real for z in as_coords(grid)))


def bmo_decompose(f: FunctionHandle, op: OscillationParams, spec: QuadratureSpec,
                  cfg: Optional[DomainConfig] = None) -> Decomposition:
    """Split f into its ball mean f^_r and the remainder f - f^_r.

    f1 is evaluated with the fixed sample stream of ``spec``, so it is a
    deterministic function; f2 is f - f1 evaluated with the same stream.
    """

    def f1(w):
        w = as_coords(w)
        flat = w.reshape(-1, w.shape[-1])
        return ball_means(f, flat, op, spec, cfg).reshape(w.shape[:-1])

    h1 = FunctionHandle(evaluate=f1, name=f"mean_r({f.name})")
    h2 = FunctionHandle(evaluate=lambda w: f(w) - f1(w), name=f"{f.name} - mean_r")
    return Decomposition(h1, h2, op, spec, cfg)


@dataclass(frozen=True)
class VMOTrend:
    """MO_r along sequences leaving compact sets; diagnostic only."""

    sequences: dict
    values: dict

    def decreasing(self, name: str) -> bool:
        v = np.array(self.values[name])
        return bool(np.all(np.diff(v) <= 1e-12 + 0.05 * v[:-1]))


def vmo_trend(f, op: OscillationParams, spec: QuadratureSpec, steps: int = 5,
              cfg: Optional[DomainConfig] = None, sequences: Optional[dict] = None) -> VMOTrend:
    n = cfg.n if cfg is not None else (as_coords(op.grid).shape[-1] if op.grid is not None else 1)
    seqs = sequences or boundary_sequences(n, steps)
    vals = {k: [mean_oscillation(f, z, op, spec, cfg) for z in v] for k, v in seqs.items()}
    return VMOTrend(seqs, vals)
