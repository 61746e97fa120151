"""Analytically controlled test functions on the tube.

Holomorphic test functions are built from powers of rho(., u0): they are
integrable on the unbounded domain and their norms follow from the
Forelli-Rudin integrals, so they double as exact oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import poch

from .ball import cayley_inv
from .domain import as_coords, base_point, rho, rho_self
from .errors import DomainError

__all__ = [
    "FunctionHandle",
    "make_rho_power",
    "make_log_rho",
    "make_coordinate",
    "make_constant",
    "make_bounded_symbol",
    "linear_combination",
    "conjugate",
    "abs_power",
    "compose",
    "st_decay_check",
]


@dataclass(frozen=True)
class FunctionHandle:
    """A vectorised complex function on the tube plus optional exact data.

    ``evaluate`` maps an array of shape ``(..., n)`` to shape ``(...)``.
    ``gradient`` returns the holomorphic partials with shape ``(..., n)``.
    ``lop`` returns L^gamma f for the multi-indices it supports and raises
    NotImplementedError otherwise.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    name: str = "f"
    holomorphic: bool = False
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    lop: Optional[Callable[[np.ndarray, tuple], np.ndarray]] = None
    sup_bound: Optional[float] = None
    membership: Optional[Callable[[float, float, int], bool]] = None
    decay: Optional[float] = None

    def __call__(self, z):
        return np.asarray(self.evaluate(as_coords(z)), dtype=complex)

    def in_bergman(self, p: float, lam: float, n: int) -> bool:
        if self.membership is None:
            raise NotImplementedError(f"{self.name}: no A^p_lambda metadata")
        return bool(self.membership(p, lam, n))

    def __add__(self, other: "FunctionHandle") -> "FunctionHandle":
        return linear_combination([self, other], [1.0, 1.0])

    def __sub__(self, other: "FunctionHandle") -> "FunctionHandle":
        return linear_combination([self, other], [1.0, -1.0])

    def __rmul__(self, c) -> "FunctionHandle":
        return linear_combination([self], [c])

    def renamed(self, name: str) -> "FunctionHandle":
        return replace(self, name=name)


def _rho_partials(w, u0):
    # d rho(w, u0) / d w_j = (w_j - conj u0_j) / 2 for j < n, and -i/2 for j = n
    g = np.empty(w.shape, dtype=complex)
    g[..., :-1] = 0.5 * (w[..., :-1] - np.conj(u0[:-1]))
    g[..., -1] = -0.5j
    return g


def make_rho_power(u0, m: float, coef: complex = 1.0) -> FunctionHandle:
    """f(w) = coef * rho(w, u0)^(-m) with exact derivatives and membership metadata.

    f lies in A^p_lambda exactly when lambda > -1 and p m - lambda > n + 1.
    """
    u0 = as_coords(u0).copy()
    if not rho_self(u0) > 0:
        raise DomainError("rho-power centre must be an interior point")
    if not m > 0:
        raise DomainError(f"rho-power exponent must be positive, got {m!r}")
    m = float(m)
    n = u0.size

    def evaluate(w):
        return coef * rho(w, u0) ** (-m)

    def gradient(w):
        w = as_coords(w)
        r = rho(w, u0)
        return (-m * coef * r ** (-m - 1))[..., None] * _rho_partials(w, u0)

    def lop(w, gamma):
        w = as_coords(w)
        gamma = tuple(int(g) for g in gamma)
        if len(gamma) != n:
            raise ValueError("multi-index length must equal n")
        big_n, prime = gamma[-1], gamma[:-1]
        if sum(prime) > 1:
            raise NotImplementedError("exact L^gamma only for |gamma'| <= 1")
        r = rho(w, u0)
        if sum(prime) == 0:
            return coef * poch(m, big_n) * (0.5j) ** big_n * r ** (-m - big_n)
        j = prime.index(1)
        # L_j rho(w, u0) = (conj w_j - conj u0_j) / 2; L_j and L_n commute
        lj = 0.5 * (np.conj(w[..., j]) - np.conj(u0[j]))
        k = m + big_n
        return coef * poch(m, big_n) * (0.5j) ** big_n * (-k) * lj * r ** (-k - 1)

    return FunctionHandle(
        evaluate=evaluate,
        name=f"rho(.,u0)^-{m:g}",
        holomorphic=True,
        gradient=gradient,
        lop=lop,
        sup_bound=abs(coef) * (2.0 / rho_self(u0)) ** m,
        membership=lambda p, lam, dim: lam > -1 and p * m - lam > dim + 1,
        decay=m,
    )


def make_log_rho(u0=None, n: int = 1) -> FunctionHandle:
    """log rho(w, u0): Bloch but not little-Bloch (its invariant gradient tends to sqrt 2 at infinity)."""
    u0 = base_point(n) if u0 is None else as_coords(u0).copy()

    def gradient(w):
        w = as_coords(w)
        return _rho_partials(w, u0) / rho(w, u0)[..., None]

    return FunctionHandle(
        evaluate=lambda w: np.log(rho(w, u0)),
        name="log rho(.,u0)",
        holomorphic=True,
        gradient=gradient,
    )


def make_coordinate(k: int, n: int) -> FunctionHandle:
    """f(z) = z_k (0-based index; k = n - 1 is z_n)."""
    if not 0 <= k < n:
        raise ValueError("coordinate index out of range")

    def gradient(w):
        g = np.zeros(np.shape(w), dtype=complex)
        g[..., k] = 1
        return g

    return FunctionHandle(evaluate=lambda w: as_coords(w)[..., k], name=f"z_{k + 1}",
                          holomorphic=True, gradient=gradient)


def make_constant(c: complex = 1.0) -> FunctionHandle:
    return FunctionHandle(
        evaluate=lambda w: np.full(np.shape(w)[:-1], c, dtype=complex),
        name=f"const({c})",
        holomorphic=True,
        gradient=lambda w: np.zeros(np.shape(w), dtype=complex),
        sup_bound=abs(c),
    )


def _bump(w, radius=0.6):
    xi = cayley_inv(w)
    s = np.sum(np.abs(xi) ** 2, axis=-1) / radius**2
    out = np.zeros(s.shape)
    inside = s < 1
    out[inside] = np.exp(1 - 1 / (1 - s[inside]))
    return out


def make_bounded_symbol(kind: str) -> FunctionHandle:
    """Bounded symbols with sup-norm <= 1 by construction.

    constant: 1; phase: exp(i Re z_n); smoothstep: rho(z) / (1 + rho(z));
    bump: a smooth bump supported where |Phi^-1(z)| < 0.6 (compact in the tube).
    """
    if kind == "constant":
        return make_constant(1.0).renamed("constant")
    if kind == "phase":
        fn = lambda w: np.exp(1j * as_coords(w)[..., -1].real)
    elif kind == "smoothstep":
        def fn(w):
            r = rho_self(w)
            return r / (1 + r)
    elif kind == "bump":
        fn = _bump
    else:
        raise ValueError(f"unknown bounded symbol {kind!r}")
    return FunctionHandle(evaluate=lambda w: np.asarray(fn(w), dtype=complex),
                          name=kind, sup_bound=1.0)


def linear_combination(handles, coefs) -> FunctionHandle:
    handles = list(handles)
    coefs = [complex(c) for c in coefs]

    def evaluate(w):
        return sum(c * h.evaluate(w) for c, h in zip(coefs, handles))

    gradient = None
    if all(h.gradient is not None for h in handles):
        gradient = lambda w: sum(c * h.gradient(w) for c, h in zip(coefs, handles))
    lop = None
    if all(h.lop is not None for h in handles):
        lop = lambda w, g: sum(c * h.lop(w, g) for c, h in zip(coefs, handles))
    bound = None
    if all(h.sup_bound is not None for h in handles):
        bound = sum(abs(c) * h.sup_bound for c, h in zip(coefs, handles))
    membership = None
    if all(h.membership is not None for h in handles):
        membership = lambda p, lam, n: all(h.membership(p, lam, n) for h in handles)
    decays = [h.decay for h in handles]
    return FunctionHandle(
        evaluate=evaluate,
        name=" + ".join(f"{c:g}*{h.name}" for c, h in zip(coefs, handles)),
        holomorphic=all(h.holomorphic for h in handles),
        gradient=gradient,
        lop=lop,
        sup_bound=bound,
        membership=membership,
        decay=min(decays) if all(d is not None for d in decays) else None,
    )


def conjugate(f: FunctionHandle) -> FunctionHandle:
    return FunctionHandle(evaluate=lambda w: np.conj(f.evaluate(w)), name=f"conj({f.name})",
                          sup_bound=f.sup_bound)


def abs_power(f: FunctionHandle, p: float = 2.0) -> FunctionHandle:
    bound = None if f.sup_bound is None else f.sup_bound**p
    return FunctionHandle(evaluate=lambda w: np.abs(f.evaluate(w)) ** p + 0j,
                          name=f"|{f.name}|^{p:g}", sup_bound=bound)


def compose(f: FunctionHandle, mapping: Callable, holomorphic_map: bool = True,
            name: Optional[str] = None) -> FunctionHandle:
    """f o mapping, where mapping sends arrays of tube points to tube points."""
    return FunctionHandle(
        evaluate=lambda w: f.evaluate(mapping(as_coords(w))),
        name=name or f"{f.name} o map",
        holomorphic=f.holomorphic and holomorphic_map,
        sup_bound=f.sup_bound,
    )


def st_decay_check(f: FunctionHandle, t: float, grid) -> float:
    """sup over the grid of |rho(z, i)|^t |f(z)|."""
    grid = as_coords(grid)
    if grid.size == 0:
        return 0.0
    i = base_point(grid.shape[-1])
    return float(np.max(np.abs(rho(grid, i)) ** t * np.abs(f(grid))))
