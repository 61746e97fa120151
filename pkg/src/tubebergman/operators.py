"""Bergman kernels and the integral operators built from them.

Every operator is evaluated pointwise: fix z, integrate over w with the
seeded sampler from ``quadrature``.  The kernel peaks at w = z, so callers
usually give the QuadratureSpec a ``center_weight`` and let the operator
place a mixture component there.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .calculus import invariant_gradient_norm
from .domain import DomainConfig, as_coords, base_point, rho, rho_self
from .errors import DomainError
from .functions import FunctionHandle
from .quadrature import IntegralResult, QuadratureSpec, integrate_tube, tube_sample
from .report import REL_TOL, CheckReport, tolerance

__all__ = [
    "KernelParams",
    "OperatorParams",
    "forelli_rudin_constant",
    "forelli_rudin_single",
    "kernel",
    "modified_kernel",
    "project",
    "modified_project",
    "FrozenModifiedProjection",
    "modified_projection_gradients",
    "projection_gradient_bound",
    "berezin",
    "hankel",
    "t_general",
    "t_alpha",
    "representation_check",
    "RepresentationResult",
    "representation_constants",
    "kernel_lp_norm",
    "kernel_lp_norm_exact",
    "mean_oscillation_lambda",
    "DivergenceReport",
    "kernel_l1_divergence",
]


def forelli_rudin_constant(n: int, r: float, s: float, t: float) -> float:
    """C_1(n, r, s, t) = 2^(n+1) pi^n Gamma(1+t) Gamma(r+s-t-n-1) / (Gamma(r) Gamma(s)).

    The integral of rho(w)^t / (rho(z,w)^r rho(w,u)^s) over the tube equals
    C_1 / rho(z,u)^(r+s-t-n-1) when r, s > 0, t > -1 and r + s - t > n + 1.
    """
    if not (r > 0 and s > 0 and t > -1 and r + s - t > n + 1):
        raise DomainError(f"Forelli-Rudin integral diverges for (n,r,s,t)=({n},{r},{s},{t})")
    return float(np.exp((n + 1) * math.log(2) + n * math.log(math.pi) + gammaln(1 + t)
                        + gammaln(r + s - t - n - 1) - gammaln(r) - gammaln(s)))


def forelli_rudin_single(n: int, s: float, t: float) -> float:
    """Integral of rho(w)^t / |rho(z,w)|^s dV(w) times rho(z)^(s-t-n-1); equals C_1(n, s/2, s/2, t)."""
    return forelli_rudin_constant(n, s / 2, s / 2, t)


@dataclass(frozen=True)
class KernelParams:
    cfg: DomainConfig = field(default_factory=DomainConfig)

    @property
    def n(self) -> int:
        return self.cfg.n

    @property
    def alpha(self) -> float:
        return self.cfg.alpha

    @property
    def exponent(self) -> float:
        return self.n + 1 + self.alpha

    @property
    def c_alpha(self) -> float:
        n, a = self.n, self.alpha
        return float(np.exp(gammaln(n + 1 + a) - (n + 1) * math.log(2) - n * math.log(math.pi)
                            - gammaln(a + 1)))


@dataclass(frozen=True)
class OperatorParams:
    """Parameters of T_{a,b,gamma'} and of the L^p_s norm-ratio experiments."""

    a: float = 0.0
    b: float = 0.0
    gamma_prime: tuple = ()
    p: float = 2.0
    s: float = 0.0
    lam: float = 0.0
    t: float = 0.0
    N: int = 0

    def in_window(self) -> bool:
        """-p a < s + 1 < p (b + 1), the boundedness window of T_{a,b,gamma'} on L^p_s."""
        return -self.p * self.a < self.s + 1 < self.p * (self.b + 1)


def kernel(z, w, kp: KernelParams) -> np.ndarray:
    """K_alpha(z, w) = c_alpha / rho(z, w)^(n+1+alpha)."""
    return kp.c_alpha * rho(z, w) ** (-kp.exponent)


def modified_kernel(z, w, kp: KernelParams) -> np.ndarray:
    """K_alpha(z, w) - K_alpha(i, w)."""
    z = as_coords(z)
    return kernel(z, w, kp) - kernel(base_point(z.shape[-1]), w, kp)


def _centers(spec, *pts):
    return [as_coords(p).reshape(-1) for p in pts] if spec.center_weight > 0 else None


def _weighted(fn, cfg, spec, centers):
    return integrate_tube(fn, cfg, spec, centers=centers)


def project(f, z, kp: KernelParams, spec: QuadratureSpec, extra_centers=()) -> IntegralResult:
    """P_alpha f(z) = integral of K_alpha(z, w) f(w) dV_alpha(w).

    ``extra_centers`` adds mixture components, e.g. at the pole of a rho-power f.
    """
    z = as_coords(z).reshape(-1)
    return _weighted(lambda w: kernel(z, w, kp) * f(w), kp.cfg, spec,
                     _centers(spec, z, *extra_centers))


def modified_project(f, z, kp: KernelParams, spec: QuadratureSpec) -> IntegralResult:
    """P~_alpha f(z) = integral of (K_alpha(z, w) - K_alpha(i, w)) f(w) dV_alpha(w)."""
    z = as_coords(z).reshape(-1)
    i = base_point(kp.n)
    return _weighted(lambda w: modified_kernel(z, w, kp) * f(w), kp.cfg, spec,
                     _centers(spec, z, i))


class FrozenModifiedProjection:
    """z -> P~_alpha f(z) on one fixed sample.

    With the samples frozen the estimate is a finite sum of kernels, hence an
    honest holomorphic function of z that the calculus module can
    differentiate.  ``majorant`` gives the per-sample triangle-inequality bound
    on the invariant gradient of that finite sum.
    """

    def __init__(self, f, kp: KernelParams, spec: QuadratureSpec, centers=None):
        s = tube_sample(kp.cfg, spec, centers=centers)
        self.kp = kp
        self.points = s.points
        self.fw = np.asarray(f(s.points), dtype=complex) * s.weights / s.points.shape[0]
        self.abs_fw = np.abs(self.fw)
        self.k_base = kernel(base_point(kp.n), s.points, kp)

    def __call__(self, z, chunk: int = 64):
        z = as_coords(z)
        flat = z.reshape(-1, z.shape[-1])
        out = np.empty(flat.shape[0], dtype=complex)
        for lo in range(0, flat.shape[0], chunk):
            zz = flat[lo:lo + chunk]
            k = kernel(zz[:, None, :], self.points[None, :, :], self.kp)
            out[lo:lo + chunk] = (k - self.k_base[None, :]) @ self.fw
        return out.reshape(z.shape[:-1])

    def as_handle(self) -> FunctionHandle:
        return FunctionHandle(evaluate=self, name="P~f (frozen sample)", holomorphic=True)

    def gradient_norm(self, z) -> np.ndarray:
        return invariant_gradient_norm(self.as_handle(), z)

    def majorant(self, z) -> np.ndarray:
        """sqrt(4 rho (2 rho A_n^2 + sum_j A_j^2)) with A the sample sums of |L K| |f|."""
        z = as_coords(z).reshape(-1, self.kp.n)
        m = self.kp.exponent
        c = self.kp.c_alpha
        out = np.empty(z.shape[0])
        for k, zz in enumerate(z):
            r = rho(zz, self.points)
            base = m * c * np.abs(r) ** (-m - 1) * self.abs_fw
            a_n = 0.5 * np.sum(base)
            # |L_j rho(z, w)| = |z_j - w_j| / 2
            a_j = 0.5 * np.abs(zz[:-1][None, :] - self.points[:, :-1]).T @ base
            rz = rho_self(zz)
            out[k] = math.sqrt(4 * rz * (2 * rz * a_n**2 + np.sum(a_j**2)))
        return out


def modified_projection_gradients(f, points, kp: KernelParams, spec: QuadratureSpec):
    """|grad~ P~_alpha f| at each point, each from a sample frozen around that point.

    Returns (gradient norms, sample majorants).  The contour nodes of the
    Cauchy derivative all lie near z, so a sample with mixture components at z
    and at i resolves the kernel there.
    """
    pts = as_coords(points).reshape(-1, kp.n)
    i = base_point(kp.n)
    grads, majs = np.empty(len(pts)), np.empty(len(pts))
    for k, z in enumerate(pts):
        frozen = FrozenModifiedProjection(f, kp, spec, centers=[z, i])
        grads[k] = frozen.gradient_norm(z[None, :])[0]
        majs[k] = frozen.majorant(z)[0]
    return grads, majs


def projection_gradient_bound(kp: KernelParams, sup_f: float = 1.0) -> float:
    """A z-independent bound on |grad~ P~_alpha f| for |f| <= sup_f.

    |L_n K(z,w)| = c m |rho(z,w)|^-(m+1) / 2 and |L_j K(z,w)| <= c m |rho(z,w)|^-(m+1/2)
    (from |z'-w'| <= 2 |rho(z,w)|^(1/2)); integrating with the single-point
    Forelli-Rudin formula makes rho A_n and rho^(1/2) A_j constants.
    """
    n, a, m, c = kp.n, kp.alpha, kp.exponent, kp.c_alpha
    an = 0.5 * c * m * forelli_rudin_single(n, m + 1, a)
    aj = c * m * forelli_rudin_single(n, m + 0.5, a)
    return sup_f * math.sqrt(4 * (2 * an**2 + (n - 1) * aj**2))


def berezin(f, z, kp: KernelParams, spec: QuadratureSpec) -> IntegralResult:
    """B_alpha f(z) = integral of f(w) |K_alpha(w, z)|^2 / K_alpha(z, z) dV_alpha(w)."""
    z = as_coords(z).reshape(-1)
    kzz = float(np.real(kernel(z, z, kp)))
    return _weighted(lambda w: f(w) * np.abs(kernel(w, z, kp)) ** 2 / kzz, kp.cfg, spec,
                     _centers(spec, z))


def hankel(f, g, z, kp: KernelParams, spec: QuadratureSpec) -> IntegralResult:
    """H_f g(z) = f(z) g(z) - P_alpha(f g)(z) for holomorphic g."""
    z = as_coords(z).reshape(-1)
    fg = lambda w: f(w) * g(w)
    pr = project(fg, z, kp, spec)
    val = complex(np.asarray(fg(z[None, :]))[0])
    return IntegralResult(val - pr.value, pr.stderr, pr.samples_used)


def t_general(f, z, op: OperatorParams, cfg: DomainConfig, spec: QuadratureSpec) -> IntegralResult:
    """T_{a,b,gamma'} f(z) = rho(z)^a * integral of |(z'-w')^gamma'| rho(w)^b f(w) / |rho(z,w)|^e dV_alpha(w).

    e = n + 1 + a + b + |gamma'|/2.
    """
    z = as_coords(z).reshape(-1)
    n = cfg.n
    gp = tuple(op.gamma_prime) or (0,) * (n - 1)
    if len(gp) != n - 1:
        raise ValueError("gamma' must have n - 1 entries")
    gp_arr = np.array(gp, dtype=float)
    e = n + 1 + op.a + op.b + sum(gp) / 2

    def integrand(w):
        mono = np.prod(np.abs(z[:-1] - w[..., :-1]) ** gp_arr, axis=-1) if n > 1 else 1.0
        return mono * rho_self(w) ** op.b * f(w) / np.abs(rho(z, w)) ** e

    res = _weighted(integrand, cfg, spec, _centers(spec, z))
    return res.scaled(rho_self(z) ** op.a)


def t_alpha(f, z, kp: KernelParams, spec: QuadratureSpec, extra_centers=()) -> IntegralResult:
    """T_alpha f(z) = c_alpha * integral of rho(w)^alpha f(w) / rho(z, w)^(n+1+alpha) dV(w)."""
    return project(f, z, kp, spec, extra_centers)


def representation_constants(N: int, alpha: float) -> dict:
    """The two candidate constants (+-2i)^N Gamma(1+alpha) / Gamma(1+alpha+N)."""
    g = math.exp(gammaln(1 + alpha) - gammaln(1 + alpha + N))
    return {"+2i": (2j) ** N * g, "-2i": (-2j) ** N * g}


@dataclass(frozen=True)
class RepresentationResult:
    """Outcome of comparing f(z) with c * T_alpha(rho^N L_n^N f)(z) for both candidate c."""

    N: int
    f_value: complex
    t_value: IntegralResult
    candidates: dict
    matches: dict
    distinct_matches: int

    @property
    def winners(self) -> tuple:
        return tuple(k for k, ok in self.matches.items() if ok)


def representation_check(f: FunctionHandle, z, N: int, kp: KernelParams, spec: QuadratureSpec,
                         rel_tol: float = REL_TOL, check_id: Optional[str] = None,
                         extra_centers=()):
    """Test f = c_N T_alpha(rho^N L_n^N f) with both sign conventions for c_N.

    Returns (CheckReport, RepresentationResult).  The check passes when exactly
    one distinct candidate constant reproduces f(z); for even N the two
    candidates coincide and count once.
    """
    t0 = time.perf_counter()
    z = as_coords(z).reshape(-1)
    n = kp.n
    if f.lop is None:
        raise ValueError("representation_check needs an exact L_n^N evaluator")
    gamma = (0,) * (n - 1) + (int(N),)
    g = lambda w: rho_self(w) ** N * f.lop(w, gamma)
    tv = t_alpha(g, z, kp, spec, extra_centers)
    fz = complex(np.asarray(f(z[None, :]))[0])
    consts = representation_constants(N, kp.alpha)
    cands = {k: c * tv.value for k, c in consts.items()}
    tols = {k: tolerance(fz, abs(consts[k]) * tv.stderr, rel_tol) for k in consts}
    matches = {k: bool(abs(cands[k] - fz) <= tols[k]) for k in consts}
    distinct = {complex(np.round(consts[k], 12)) for k, ok in matches.items() if ok}
    res = RepresentationResult(N=int(N), f_value=fz, t_value=tv, candidates=cands,
                               matches=matches, distinct_matches=len(distinct))
    best = min(consts, key=lambda k: abs(cands[k] - fz))
    winners = ",".join(res.winners) or "none"
    report = CheckReport(
        id=check_id or f"representation.N{N}",
        anchor="f = c_N Gamma(1+alpha)/Gamma(1+alpha+N) T_alpha(rho^N L_n^N f)",
        expected=fz, provenance="PAPER", observed=cands[best],
        stderr=abs(consts[best]) * tv.stderr, tol=tols[best],
        passed=len(distinct) == 1, seconds=time.perf_counter() - t0,
        note=f"matching constants: {winners}")
    return report, res


def kernel_lp_norm_exact(z, p: float, lam: float, kp: KernelParams) -> float:
    """||K_lam(z, .)||^p in L^p_lam, in closed form from the single-point Forelli-Rudin formula.

    Here kp.alpha plays the role of lam for the kernel; the value scales like
    rho(z)^((1-p)(n+1+lam)).
    """
    n = kp.n
    m = n + 1 + lam
    c = KernelParams(DomainConfig(n, lam)).c_alpha
    s = p * m
    return c**p * forelli_rudin_single(n, s, lam) / rho_self(z) ** (s - lam - n - 1)


def kernel_lp_norm(z, p: float, lam: float, n: int, spec: QuadratureSpec) -> IntegralResult:
    """Monte-Carlo estimate of ||K_lam(z, .)||^p in L^p_lam."""
    z = as_coords(z).reshape(-1)
    kp = KernelParams(DomainConfig(n, lam))
    return _weighted(lambda w: np.abs(kernel(z, w, kp)) ** p, kp.cfg, spec, _centers(spec, z))


def mean_oscillation_lambda(f, z, p: float, kp: KernelParams, spec: QuadratureSpec) -> float:
    """MO_lam f(z) = || f h_z - B_lam f(z) h_z ||_{L^p_lam}, h_z = K_lam(z,.) / ||K_lam(z,.)||.

    Diagnostic only; kp.alpha is used as lam.
    """
    z = as_coords(z).reshape(-1)
    norm = kernel_lp_norm_exact(z, p, kp.alpha, kp) ** (1 / p)
    bf = berezin(f, z, kp, spec).value
    h = lambda w: kernel(z, w, kp) / norm
    res = _weighted(lambda w: np.abs((f(w) - bf) * h(w)) ** p, kp.cfg, spec, _centers(spec, z))
    return float(max(res.value.real, 0.0) ** (1 / p))


@dataclass(frozen=True)
class DivergenceReport:
    radii: tuple
    values: tuple
    stderrs: tuple
    increments: tuple
    increment_stderrs: tuple

    def diverges(self, min_ratio: float = 0.5, sigmas: float = 3.0) -> bool:
        """Strictly increasing increments, each significant, none collapsing towards 0."""
        inc = np.array(self.increments)
        se = np.array(self.increment_stderrs)
        if not np.all(inc > sigmas * se):
            return False
        return bool(inc.min() / inc.max() >= min_ratio)

    def plateaus(self, max_ratio: float = 0.25) -> bool:
        """Cauchy behaviour: the last increment is small compared with the first."""
        inc = np.array(self.increments)
        return bool(abs(inc[-1]) <= max_ratio * abs(inc[0]))


def kernel_l1_divergence(kp: KernelParams, radii: Sequence[float], spec: QuadratureSpec,
                         contrast: Optional[np.ndarray] = None) -> DivergenceReport:
    """Truncated L^1_alpha masses over {|w| < R, rho(w) > 1/R} on one common sample.

    Without ``contrast`` the integrand is |K_alpha(i, w)|; with a contrast
    point z it is |K_alpha(z, w) - K_alpha(i, w)|, which is integrable.
    Increments between consecutive truncations are estimated from paired
    samples, so their standard errors are honest.
    """
    n = kp.n
    s = tube_sample(kp.cfg, spec)
    w = s.points
    i = base_point(n)
    if contrast is None:
        vals = np.abs(kernel(i, w, kp))
    else:
        vals = np.abs(modified_kernel(as_coords(contrast).reshape(-1), w, kp))
    vals = vals * s.weights
    norm = np.linalg.norm(w, axis=-1)
    defect = rho_self(w)
    cols = np.array([np.where((norm < R) & (defect > 1 / R), vals, 0.0) for R in radii])
    m = w.shape[0]
    means = cols.mean(axis=1)
    ses = cols.std(axis=1, ddof=1) / math.sqrt(m)
    diffs = np.diff(cols, axis=0)
    return DivergenceReport(
        radii=tuple(float(R) for R in radii),
        values=tuple(means.tolist()),
        stderrs=tuple(ses.tolist()),
        increments=tuple(diffs.mean(axis=1).tolist()),
        increment_stderrs=tuple((diffs.std(axis=1, ddof=1) / math.sqrt(m)).tolist()),
    )
