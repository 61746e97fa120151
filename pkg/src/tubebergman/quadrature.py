"""Seeded Monte-Carlo integration over the tube and over Bergman metric balls.

Everything is pulled back to the unit ball through the Cayley map.  A sample
xi is drawn from a density q on the ball, mapped to w = Phi(xi), and given the
weight

    rho(w)^alpha * J_Phi(xi) / q(xi),   rho(Phi(xi)) = (1 - |xi|^2) / |1 + xi_n|^2,

so that mean(f(w) * weight) estimates the integral of f against dV_alpha.

The base density is proportional to (1 - |xi|^2)^kappa.  Optionally q is a
mixture of that density transported by ball automorphisms phi_a: components
centred at Phi^-1 of given tube points (where kernels peak) and "tail"
components centred at -(1 - 2^-k) e_n (towards the point at infinity).  Since
phi_a is an involution, drawing eta from the base and setting xi = phi_a(eta)
gives the density p(phi_a(xi)) J_{phi_a}(xi).

Samples are generated in fixed-size blocks, block k using the substream
SeedSequence(seed, spawn_key=(k,)).  Block results are reduced in index
order, so the estimate does not depend on the number of worker threads.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats
from scipy.special import gammaln, logsumexp

from .ball import ball_automorphism, ball_defect_after_automorphism, cayley, cayley_inv
from .domain import DomainConfig, as_coords, rho_self
from .errors import ConfigError, DivergenceWarning, DomainError, NonFinite

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "TubeSample",
    "BallSample",
    "tube_sample",
    "integrate_tube",
    "ball_sample",
    "integrate_ball",
    "ball_volume",
    "ball_volume_base_n1",
    "truncated_mass",
]

BLOCK = 1 << 14


@dataclass(frozen=True)
class QuadratureSpec:
    """Sampling contract for every integral.

    kappa=None means kappa = alpha of the domain.  ``center_weight`` and
    ``tail_weight`` are mixture probabilities for the automorphism components;
    with both zero the sampler is the plain (1 - |xi|^2)^kappa pullback.
    """

    samples: int = 100_000
    seed: int = 0
    kappa: Optional[float] = None
    stratified: bool = False
    strata: int = 16
    jobs: int = 1
    center_weight: float = 0.0
    tail_weight: float = 0.0
    tail_scales: tuple = ()
    check_divergence: bool = True

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise ConfigError(f"samples must be a positive integer, got {self.samples!r}")
        if self.kappa is not None and not self.kappa > -1:
            raise ConfigError(f"kappa must be > -1, got {self.kappa!r}")
        if self.jobs < 1 or self.strata < 1:
            raise ConfigError("jobs and strata must be >= 1")
        if not (0 <= self.center_weight and 0 <= self.tail_weight
                and self.center_weight + self.tail_weight < 1):
            raise ConfigError("mixture weights must be >= 0 and sum to < 1")
        if self.tail_weight > 0 and not self.tail_scales:
            raise ConfigError("tail_weight > 0 needs tail_scales")
        if self.stratified and (self.center_weight > 0 or self.tail_weight > 0):
            raise ConfigError("stratification and mixture sampling are exclusive")
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "seed", int(self.seed) % 2**64)
        object.__setattr__(self, "tail_scales", tuple(int(k) for k in self.tail_scales))

    def kappa_for(self, cfg: DomainConfig) -> float:
        return cfg.alpha if self.kappa is None else float(self.kappa)

    def replace(self, **kw) -> "QuadratureSpec":
        from dataclasses import replace
        return replace(self, **kw)


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    stderr: float
    samples_used: int

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        return IntegralResult(self.value + other.value, math.hypot(self.stderr, other.stderr),
                              self.samples_used + other.samples_used)

    def scaled(self, c) -> "IntegralResult":
        return IntegralResult(c * self.value, abs(c) * self.stderr, self.samples_used)


def _rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def _blocks(total: int):
    return [(k, min(BLOCK, total - k * BLOCK)) for k in range(-(-total // BLOCK))]


def _directions(rng, m, n):
    g = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _log_ball_norm(n, kappa):
    # log of the integral of (1 - |xi|^2)^kappa over the unit ball of C^n
    return n * math.log(math.pi) + gammaln(kappa + 1) - gammaln(n + kappa + 1)


@dataclass(frozen=True)
class TubeSample:
    """Tube points with importance weights: mean(f(points) * weights) ~ integral."""

    points: np.ndarray
    weights: np.ndarray
    strata: Optional[np.ndarray] = None


def _mixture(cfg, spec, centers):
    n = cfg.n
    comps = [np.zeros(n, dtype=complex)]
    probs = [1.0 - spec.center_weight - spec.tail_weight]
    if spec.center_weight > 0:
        if centers is None or len(centers) == 0:
            raise ConfigError("center_weight > 0 needs centre points")
        cs = [cayley_inv(as_coords(c).reshape(-1)) for c in centers]
        comps += cs
        probs += [spec.center_weight / len(cs)] * len(cs)
    if spec.tail_weight > 0:
        for k in spec.tail_scales:
            a = np.zeros(n, dtype=complex)
            a[-1] = -(1 - 2.0**-k)
            comps.append(a)
            probs.append(spec.tail_weight / len(spec.tail_scales))
    return np.array(comps), np.array(probs)


def _draw_block(cfg, spec, block, size, comps, probs):
    n = cfg.n
    kappa = spec.kappa_for(cfg)
    rng = _rng(spec.seed, block)
    strata = None
    if spec.stratified:
        idx = block * BLOCK + np.arange(size)
        strata = idx % spec.strata
        u = (strata + rng.uniform(size=size)) / spec.strata
        defect = stats.beta.ppf(u, kappa + 1, n)
    else:
        defect = rng.beta(kappa + 1, n, size=size)
    defect = np.maximum(defect, np.finfo(float).tiny)
    eta = np.sqrt(1 - defect)[:, None] * _directions(rng, size, n)
    if len(comps) == 1:
        xi, dxi = -eta, defect
    else:
        which = rng.choice(len(comps), size=size, p=probs)
        a = comps[which]
        xi = ball_automorphism(a, eta)
        dxi = ball_defect_after_automorphism(a, eta, defect)
    # mixture density q(xi), in logs
    aa = np.sum(np.abs(comps) ** 2, axis=1)
    lin = np.abs(1 - xi @ np.conj(comps).T) ** 2
    log_ratio = np.log(1 - aa)[None, :] - np.log(lin)
    log_q = logsumexp(np.log(probs)[None, :] + kappa * (np.log(dxi)[:, None] + log_ratio)
                      + (n + 1) * log_ratio, axis=1) - _log_ball_norm(n, kappa)
    d1 = np.abs(1 + xi[:, -1]) ** 2
    log_rho = np.log(dxi) - np.log(d1)
    log_jac = (n + 1) * (math.log(2) - np.log(d1))
    weights = np.exp(cfg.alpha * log_rho + log_jac - log_q)
    return cayley(xi), weights, strata


def _block_samples(cfg, spec, centers):
    comps, probs = _mixture(cfg, spec, centers)
    for k, size in _blocks(spec.samples):
        yield _draw_block(cfg, spec, k, size, comps, probs)


def tube_sample(cfg: DomainConfig, spec: QuadratureSpec, centers=None) -> TubeSample:
    """Materialise the full sample stream (used for frozen-sample operator handles)."""
    pts, wts, sts = [], [], []
    for w, wt, st in _block_samples(cfg, spec, centers):
        pts.append(w)
        wts.append(wt)
        sts.append(st)
    strata = np.concatenate(sts) if spec.stratified else None
    return TubeSample(np.concatenate(pts), np.concatenate(wts), strata)


def _moments(x, strata, k):
    # per-stratum (count, sum, sum |x|^2); a single stratum when unstratified
    if strata is None:
        return np.array([[x.size, x.sum(), np.sum(np.abs(x) ** 2)]], dtype=complex)
    out = np.zeros((k, 3), dtype=complex)
    out[:, 0] = np.bincount(strata, minlength=k)
    out[:, 1] = np.bincount(strata, weights=x.real, minlength=k) + 1j * np.bincount(
        strata, weights=x.imag, minlength=k)
    out[:, 2] = np.bincount(strata, weights=np.abs(x) ** 2, minlength=k)
    return out


def _estimate(mom):
    cnt = mom[:, 0].real
    if np.any(cnt == 0):
        raise ConfigError("empty stratum; increase samples")
    means = mom[:, 1] / cnt
    var = np.maximum(mom[:, 2].real - cnt * np.abs(means) ** 2, 0) / np.maximum(cnt - 1, 1)
    k = len(cnt)
    if k == 1:
        return complex(means[0]), float(np.sqrt(var[0] / cnt[0])), int(cnt[0])
    return complex(means.mean()), float(np.sqrt(np.sum(var / cnt)) / k), int(cnt.sum())


DOMINANCE = 0.25


def _check_halves(moms, name):
    if len(moms) < 2:
        return
    h = len(moms) // 2
    (m1, s1, _), (m2, s2, _) = _estimate(sum(moms[:h])), _estimate(sum(moms[h:]))
    spread = math.hypot(s1, s2)
    if abs(m1 - m2) > 4 * spread and abs(m1 - m2) > 1e-12 * max(abs(m1), abs(m2)):
        warnings.warn(f"{name}: half-sample means {m1:.6g} and {m2:.6g} differ by more than "
                      f"4 standard errors; the integral may diverge", DivergenceWarning,
                      stacklevel=3)


def _check_dominance(biggest, total, samples, name):
    # with finite variance no single term carries a fixed share of sum |x| as samples grow
    if samples >= 1000 and total > 0 and biggest > DOMINANCE * total:
        warnings.warn(f"{name}: one sample carries {biggest / total:.0%} of the absolute sum; "
                      f"the integrand is too heavy-tailed for this sampler", DivergenceWarning,
                      stacklevel=3)


def _integrate(fn, cfg, spec, centers, name):
    comps, probs = _mixture(cfg, spec, centers)
    k = spec.strata if spec.stratified else 1

    def one(block):
        idx, size = block
        w, wt, st = _draw_block(cfg, spec, idx, size, comps, probs)
        vals = np.asarray(fn(w), dtype=complex)
        with np.errstate(invalid="ignore", over="ignore"):
            x = vals * wt
        if not np.all(np.isfinite(x)):
            raise NonFinite(f"{name}: non-finite integrand at {np.sum(~np.isfinite(x))} samples")
        ax = np.abs(x)
        return _moments(x, st, k), float(ax.max(initial=0.0)), float(ax.sum())

    blocks = _blocks(spec.samples)
    if spec.jobs > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(spec.jobs) as pool:
            parts = list(pool.map(one, blocks))
    else:
        parts = [one(b) for b in blocks]
    moms = [p[0] for p in parts]
    if spec.check_divergence:
        if not spec.stratified:
            _check_halves(moms, name)
        _check_dominance(max(p[1] for p in parts), sum(p[2] for p in parts), spec.samples, name)
    value, se, used = _estimate(sum(moms))
    return IntegralResult(value, se, used)


def integrate_tube(f, cfg: DomainConfig, spec: QuadratureSpec, centers=None) -> IntegralResult:
    """Unbiased estimate of the integral of f against dV_alpha over the whole tube."""
    return _integrate(f, cfg, spec, centers, getattr(f, "name", "integrand"))


@dataclass(frozen=True)
class BallSample:
    points: np.ndarray
    weights: np.ndarray
    eta: np.ndarray


def _ball_eta(n, r, spec):
    t = math.tanh(r)
    etas, defects = [], []
    for k, size in _blocks(spec.samples):
        rng = _rng(spec.seed, k)
        rad = t * rng.uniform(size=size) ** (1 / (2 * n))
        etas.append(rad[:, None] * _directions(rng, size, n))
        defects.append(1 - rad**2)
    log_vol = n * math.log(math.pi) + 2 * n * math.log(t) - gammaln(n + 1)
    return np.concatenate(etas), np.concatenate(defects), log_vol


def ball_sample(z, r: float, cfg: DomainConfig, spec: QuadratureSpec) -> BallSample:
    """Uniform sample of the Euclidean ball of radius tanh r, transported to D(z, r).

    The weights carry |B_t| * J_{phi_zeta} * J_Phi * rho^alpha, so their mean is
    V_alpha(D(z, r)) in expectation.  ``z`` may be a batch of shape (k, n); every
    centre then shares the same eta sample, which makes ball means smooth in z.
    """
    z = as_coords(z)
    single = z.ndim == 1
    zb = z.reshape(-1, z.shape[-1])
    if np.any(~(rho_self(zb) > 0)):
        raise DomainError("metric ball centre must be interior")
    if not r > 0:
        raise DomainError(f"metric radius must be positive, got {r!r}")
    n = zb.shape[-1]
    eta, d_eta, log_vol = _ball_eta(n, r, spec)
    zeta = cayley_inv(zb)[:, None, :]
    zz = np.sum(np.abs(zeta) ** 2, axis=-1)
    xi = ball_automorphism(zeta, eta[None, :, :])
    lin = np.abs(1 - np.sum(eta[None, :, :] * np.conj(zeta), axis=-1)) ** 2
    dxi = (1 - zz) * d_eta[None, :] / lin
    d1 = np.abs(1 + xi[..., -1]) ** 2
    log_w = (log_vol + (n + 1) * (np.log1p(-zz) - np.log(lin))
             + (n + 1) * (math.log(2) - np.log(d1))
             + cfg.alpha * (np.log(dxi) - np.log(d1)))
    pts, wts = cayley(xi), np.exp(log_w)
    if single:
        pts, wts = pts[0], wts[0]
    return BallSample(pts, wts, eta)


def _weighted_mean(x):
    m = x.size
    mean = complex(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(m)) if m > 1 else 0.0
    return mean, se


def integrate_ball(f, z, r: float, cfg: DomainConfig, spec: QuadratureSpec) -> IntegralResult:
    """Estimate of the integral of f over D(z, r) against dV_alpha."""
    s = ball_sample(z, r, cfg, spec)
    x = np.asarray(f(s.points), dtype=complex) * s.weights
    if not np.all(np.isfinite(x)):
        raise NonFinite("non-finite integrand on the metric ball")
    mean, se = _weighted_mean(x)
    return IntegralResult(mean, se, x.size)


def ball_volume(z, r: float, cfg: DomainConfig, spec: QuadratureSpec) -> float:
    return float(integrate_ball(lambda w: np.ones(w.shape[:-1]), z, r, cfg, spec).value.real)


def ball_volume_base_n1(r: float) -> float:
    """V_0(D(i, r)) for n = 1: pi sinh^2(2r)."""
    return math.pi * math.sinh(2 * r) ** 2


def truncated_mass(f, R: float, cfg: DomainConfig, spec: QuadratureSpec) -> IntegralResult:
    """Integral of |f| over {|w| < R, rho(w) > 1/R} against dV_alpha."""

    def g(w):
        inside = (np.linalg.norm(w, axis=-1) < R) & (rho_self(w) > 1 / R)
        out = np.zeros(w.shape[:-1], dtype=complex)
        out[inside] = np.abs(f(w[inside]))
        return out

    name = f"truncated |{getattr(f, 'name', 'f')}| (R={R:g})"
    return _integrate(g, cfg, spec.replace(check_divergence=False), None, name)
