"""Holomorphic differentiation, the operators L_j / L^gamma, and the invariant gradient and Laplacian.

Holomorphic partials come from trapezoidal Cauchy integrals on circles whose
polydisc stays inside the tube: radius rho(z)/4 in the z_n direction, and in a
z_j direction the radius r with (|y_j| + r)^2 - y_j^2 = rho(z) / (4 k), where k
counts the active z' directions.  Second-order Wirtinger derivatives of
non-holomorphic functions use central differences with one Richardson step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .ball import cayley
from .domain import as_coords, rho_self
from .errors import ContourEscapesDomain, NonFinite, StepTooSmall

__all__ = [
    "MultiIndex",
    "BergmanMatrix",
    "contour_radii",
    "holo_derivative",
    "holo_gradient",
    "lop",
    "lop_expansion",
    "invariant_gradient_norm",
    "gradient_norm_from_matrix",
    "invariant_laplacian",
    "invariant_laplacian_from_matrix",
    "wirtinger_hessian",
    "bergman_matrix",
    "ball_gradient_at_origin",
    "numerical_real_jacobian",
    "numerical_complex_jacobian",
]

NODES = 32


@dataclass(frozen=True)
class MultiIndex:
    gamma: tuple

    def __post_init__(self):
        g = tuple(int(v) for v in self.gamma)
        if not g or any(v < 0 for v in g):
            raise ValueError("multi-index entries must be non-negative integers")
        object.__setattr__(self, "gamma", g)

    @classmethod
    def unit(cls, k: int, n: int, power: int = 1) -> "MultiIndex":
        g = [0] * n
        g[k] = power
        return cls(tuple(g))

    @property
    def order(self) -> int:
        return sum(self.gamma)

    @property
    def prime(self) -> tuple:
        return self.gamma[:-1]

    @property
    def angle(self) -> float:
        """<gamma> = gamma_n + |gamma'| / 2."""
        return self.gamma[-1] + sum(self.prime) / 2


def _gamma(gamma, n):
    g = gamma.gamma if isinstance(gamma, MultiIndex) else tuple(int(v) for v in gamma)
    if len(g) != n:
        raise ValueError(f"multi-index length {len(g)} does not match n = {n}")
    return g


def contour_radii(z, axes) -> np.ndarray:
    """Admissible Cauchy radii for the given coordinate axes at points z (shape (..., len(axes)))."""
    z = as_coords(z)
    n = z.shape[-1]
    r = rho_self(z)
    if np.any(~(r > 0)):
        raise ContourEscapesDomain("contour centre is not an interior point")
    primes = [a for a in axes if a != n - 1]
    k = max(1, len(primes))
    out = []
    for a in axes:
        if a == n - 1:
            out.append(r / 4)
        else:
            y = np.abs(z[..., a].imag)
            out.append(np.sqrt(y**2 + r / (4 * k)) - y)
    radii = np.stack(out, axis=-1) if out else np.zeros(z.shape[:-1] + (0,))
    if np.any(~(radii > 0)) or np.any(~np.isfinite(radii)):
        raise ContourEscapesDomain("no admissible contour radius")
    return radii


def _taylor_block(f, z, axes, nodes):
    """Taylor coefficients of f at a single point z on the polydisc over ``axes``."""
    z = as_coords(z).reshape(-1)
    d = len(axes)
    radii = contour_radii(z, axes)
    theta = 2 * np.pi * np.arange(nodes) / nodes
    circle = np.exp(1j * theta)
    grids = np.meshgrid(*([circle] * d), indexing="ij")
    pts = np.broadcast_to(z, (nodes,) * d + (z.size,)).copy()
    for k, a in enumerate(axes):
        pts[..., a] += radii[k] * grids[k]
    vals = np.asarray(f(pts), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise NonFinite("function is not finite on the Cauchy contour")
    coeffs = np.fft.fftn(vals) / nodes**d
    for k in range(d):
        shape = [1] * d
        shape[k] = nodes
        coeffs = coeffs / radii[k] ** np.arange(nodes).reshape(shape)
    return coeffs


def holo_derivative(f, z, gamma, nodes: int = NODES) -> complex:
    """Mixed partial d^|gamma| f / dz^gamma at a single interior point."""
    z = as_coords(z).reshape(-1)
    g = _gamma(gamma, z.size)
    if sum(g) > 4:
        raise ValueError("derivatives above total order 4 are not supported")
    axes = [a for a, v in enumerate(g) if v > 0]
    if not axes:
        val = complex(np.asarray(f(z[None, :]))[0])
        if not np.isfinite(val):
            raise NonFinite("function value is not finite")
        return val
    coeffs = _taylor_block(f, z, axes, nodes)
    idx = tuple(g[a] for a in axes)
    return complex(coeffs[idx] * math.prod(math.factorial(v) for v in idx))


def holo_gradient(f, z, nodes: int = NODES) -> np.ndarray:
    """All first holomorphic partials at a batch of points; shape (..., n)."""
    z = as_coords(z)
    n = z.shape[-1]
    theta = 2 * np.pi * np.arange(nodes) / nodes
    circle = np.exp(1j * theta)
    out = np.empty(z.shape, dtype=complex)
    for a in range(n):
        r = contour_radii(z, [a])[..., 0]
        pts = np.repeat(z[..., None, :], nodes, axis=-2)
        pts[..., a] += r[..., None] * circle
        vals = np.asarray(f(pts), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise NonFinite("function is not finite on the Cauchy contour")
        out[..., a] = np.mean(vals * np.conj(circle), axis=-1) / r
    return out


# L^gamma as a differential polynomial: {alpha: {y'-exponent: coefficient}}


def _apply_ln(expr, n):
    out = {}
    for alpha, poly in expr.items():
        beta = list(alpha)
        beta[-1] += 1
        _merge(out, tuple(beta), poly)
    return out


def _apply_lj(expr, j, n):
    out = {}
    for alpha, poly in expr.items():
        # d/dz_j of y_j^k is k y_j^(k-1) / (2i)
        dpoly = {}
        for expo, c in poly.items():
            if expo[j] > 0:
                e = list(expo)
                e[j] -= 1
                dpoly[tuple(e)] = dpoly.get(tuple(e), 0) + c * expo[j] / 2j
        _merge(out, alpha, dpoly)
        beta = list(alpha)
        beta[j] += 1
        _merge(out, tuple(beta), poly)
        beta = list(alpha)
        beta[-1] += 1
        ypoly = {}
        for expo, c in poly.items():
            e = list(expo)
            e[j] += 1
            ypoly[tuple(e)] = 2 * c
        _merge(out, tuple(beta), ypoly)
    return out


def _merge(out, alpha, poly):
    tgt = out.setdefault(alpha, {})
    for expo, c in poly.items():
        tgt[expo] = tgt.get(expo, 0) + c
        if tgt[expo] == 0:
            del tgt[expo]
    if not tgt:
        del out[alpha]


def lop_expansion(gamma) -> dict:
    """Expand L_1^g1 ... L_n^gn into sum_alpha c_alpha(y') d^alpha.

    The rightmost factor acts first, so L_n is applied gamma_n times before any L_j.
    """
    g = gamma.gamma if isinstance(gamma, MultiIndex) else tuple(int(v) for v in gamma)
    n = len(g)
    expr = {(0,) * n: {(0,) * (n - 1): 1 + 0j}}
    for _ in range(g[-1]):
        expr = _apply_ln(expr, n)
    for j in reversed(range(n - 1)):
        for _ in range(g[j]):
            expr = _apply_lj(expr, j, n)
    return expr


def lop(f, z, gamma, nodes: int = NODES) -> complex:
    """L^gamma f(z) with L_n = d/dz_n and L_j = d/dz_j + 2 y_j d/dz_n."""
    z = as_coords(z).reshape(-1)
    n = z.size
    g = _gamma(gamma, n)
    if sum(g) > 4:
        raise ValueError("derivatives above total order 4 are not supported")
    expr = lop_expansion(g)
    axes = sorted({a for alpha in expr for a, v in enumerate(alpha) if v > 0})
    y = z[:-1].imag
    if not axes:
        return complex(np.asarray(f(z[None, :]))[0])
    coeffs = _taylor_block(f, z, axes, nodes)
    total = 0j
    for alpha, poly in expr.items():
        c = sum(coef * np.prod(y ** np.array(expo)) for expo, coef in poly.items())
        idx = tuple(alpha[a] for a in axes)
        fact = math.prod(math.factorial(alpha[a]) for a in axes)
        total += c * coeffs[idx] * fact
    return complex(total)


def _grad(f, z, exact):
    if exact:
        if f.gradient is None:
            raise ValueError(f"{getattr(f, 'name', 'f')} has no exact gradient")
        return f.gradient(z)
    return holo_gradient(f, z)


def invariant_gradient_norm(f, z, exact: bool = False) -> np.ndarray:
    """|grad~ f(z)| = sqrt(4 rho (2 rho |f_n|^2 + sum_j |f_j + 2 y_j f_n|^2)) for holomorphic f."""
    z = as_coords(z)
    d = _grad(f, z, exact)
    r = rho_self(z)
    fn = d[..., -1]
    lj = d[..., :-1] + 2 * z[..., :-1].imag * fn[..., None]
    sq = 4 * r * (2 * r * np.abs(fn) ** 2 + np.sum(np.abs(lj) ** 2, axis=-1))
    return np.sqrt(sq)


@dataclass(frozen=True)
class BergmanMatrix:
    """b_ij(z), its inverse b^ij(z) and b(z) = det b_ij(z)."""

    forward: np.ndarray
    inverse: np.ndarray

    @cached_property
    def det(self) -> float:
        return float(np.linalg.det(self.forward).real)


def bergman_matrix(z) -> BergmanMatrix:
    z = as_coords(z).reshape(-1)
    n = z.size
    y = z.imag
    r = rho_self(z)
    yp = y[:-1]
    big_y = np.concatenate([yp, [-0.5]])
    iprime = np.eye(n)
    iprime[-1, -1] = 0
    fwd = (0.5 * r * iprime + np.outer(big_y, big_y)) / r**2
    inv = np.empty((n, n))
    inv[:-1, :-1] = 2 * np.eye(n - 1)
    inv[:-1, -1] = 4 * yp
    inv[-1, :-1] = 4 * yp
    inv[-1, -1] = 4 * (y[-1] + yp @ yp)
    return BergmanMatrix(forward=fwd.astype(complex), inverse=(r * inv).astype(complex))


def gradient_norm_from_matrix(f, z, exact: bool = False) -> float:
    """sqrt(2 sum_ij b^ij conj(f_i) f_j), the same quantity through the Bergman matrix."""
    z = as_coords(z).reshape(-1)
    d = _grad(f, z[None, :], exact)[0]
    b = bergman_matrix(z).inverse
    return float(np.sqrt(max(0.0, 2 * np.real(np.conj(d) @ b @ d))))


def _step(z):
    return np.maximum(1e-5, 1e-3 * rho_self(z))


def _hessian_fd(g, z, h):
    """Real Hessian of g at a single point in coordinates (x_1..x_n, y_1..y_n)."""
    n = z.size
    m = 2 * n
    e = np.zeros((m, n), dtype=complex)
    e[:n] = np.eye(n)
    e[n:] = 1j * np.eye(n)
    pts = [z]
    for a in range(m):
        pts += [z + h * e[a], z - h * e[a]]
    pairs = [(a, b) for a in range(m) for b in range(a + 1, m)]
    for a, b in pairs:
        pts += [z + h * (e[a] + e[b]), z + h * (e[a] - e[b]),
                z - h * (e[a] - e[b]), z - h * (e[a] + e[b])]
    pts = np.array(pts)
    if np.any(rho_self(pts) <= 0):
        raise StepTooSmall("finite-difference stencil leaves the tube")
    v = np.asarray(g(pts), dtype=complex)
    if not np.all(np.isfinite(v)):
        raise NonFinite("function is not finite on the stencil")
    hess = np.empty((m, m), dtype=complex)
    for a in range(m):
        hess[a, a] = (v[1 + 2 * a] - 2 * v[0] + v[2 + 2 * a]) / h**2
    base = 1 + 2 * m
    for k, (a, b) in enumerate(pairs):
        pp, pm, mp, mm = v[base + 4 * k: base + 4 * k + 4]
        hess[a, b] = hess[b, a] = (pp - pm - mp + mm) / (4 * h**2)
    return hess


def wirtinger_hessian(g, z) -> np.ndarray:
    """M[a, b] = d^2 g / dz_a d conj(z_b) at one point, by Richardson-extrapolated central differences."""
    z = as_coords(z).reshape(-1)
    n = z.size
    h = float(_step(z))
    if h > rho_self(z) / 8:
        raise StepTooSmall(f"step {h:g} too large for defect {rho_self(z):g}")
    hs = [_hessian_fd(g, z, h), _hessian_fd(g, z, h / 2)]
    hess = (4 * hs[1] - hs[0]) / 3
    xx, yy = hess[:n, :n], hess[n:, n:]
    xy = hess[:n, n:]
    return 0.25 * (xx + yy + 1j * (xy - xy.T))


def _maybe_real(val, g, z):
    v = np.asarray(g(as_coords(z).reshape(1, -1)))
    return float(val.real) if np.all(np.isreal(v)) else complex(val)


def invariant_laplacian(g, z):
    """Invariant Laplacian in the explicit tube form.

    8 rho { sum_j d_j dbar_j + sum_j 2 y_j d_n dbar_j + sum_j 2 y_j dbar_n d_j
            + 2 (y_n + |y'|^2) dbar_n d_n }.
    """
    z = as_coords(z).reshape(-1)
    y = z.imag
    mat = wirtinger_hessian(g, z)
    yp = y[:-1]
    val = (np.trace(mat[:-1, :-1])
           + np.sum(2 * yp * mat[-1, :-1])
           + np.sum(2 * yp * mat[:-1, -1])
           + 2 * (y[-1] + yp @ yp) * mat[-1, -1])
    return _maybe_real(8 * rho_self(z) * val, g, z)


def invariant_laplacian_from_matrix(g, z):
    """4 sum_ij b^ij d^2 g / dconj(z_i) dz_j, for cross-checking the explicit form."""
    z = as_coords(z).reshape(-1)
    mat = wirtinger_hessian(g, z)
    b = bergman_matrix(z).inverse
    return _maybe_real(4 * np.sum(b * mat.T), g, z)


def ball_gradient_at_origin(f, n: int, radius: float = 0.25, nodes: int = NODES) -> float:
    """|grad (f o Phi)(0)|, differentiated on the ball side."""
    theta = 2 * np.pi * np.arange(nodes) / nodes
    circle = np.exp(1j * theta)
    total = 0.0
    for a in range(n):
        xi = np.zeros((nodes, n), dtype=complex)
        xi[:, a] = radius * circle
        vals = np.asarray(f(cayley(xi)), dtype=complex)
        total += abs(np.mean(vals * np.conj(circle)) / radius) ** 2
    return float(np.sqrt(total))


def _fd4(fn, x, step):
    # fourth-order central difference of a vector map along each real coordinate of x
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = step
        cols.append((-fn(x + 2 * e) + 8 * fn(x + e) - 8 * fn(x - e) + fn(x - 2 * e)) / (12 * step))
    return np.stack(cols, axis=1)


def numerical_real_jacobian(mapping, p, step: float) -> float:
    """det of the 2n x 2n real derivative of a map C^n -> C^n at one point, by finite differences."""
    p = np.asarray(p, dtype=complex).reshape(-1)
    n = p.size

    def real_map(v):
        out = np.asarray(mapping(v[:n] + 1j * v[n:]), dtype=complex).reshape(-1)
        return np.concatenate([out.real, out.imag])

    jac = _fd4(real_map, np.concatenate([p.real, p.imag]), step)
    return float(np.linalg.det(jac))


def numerical_complex_jacobian(mapping, p, step: float) -> complex:
    """det of the complex derivative of a holomorphic map, differentiating along real directions."""
    p = np.asarray(p, dtype=complex).reshape(-1)
    n = p.size
    cols = []
    for k in range(n):
        e = np.zeros(n, dtype=complex)
        e[k] = step
        m = lambda t: np.asarray(mapping(p + t * e), dtype=complex).reshape(-1)
        cols.append((-m(2) + 8 * m(1) - 8 * m(-1) + m(-2)) / (12 * step))
    return complex(np.linalg.det(np.stack(cols, axis=1)))
