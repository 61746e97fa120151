"""Verification suites: each one is a list of named checks producing CheckReports.

A check is a zero-argument callable returning a list of reports.  ``run_suite``
runs them in order (or on a thread pool with ``jobs`` > 1, keeping the order)
and turns any exception into a failed report.
"""

from __future__ import annotations

import math
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import ball as B
from .calculus import (ball_gradient_at_origin, bergman_matrix, gradient_norm_from_matrix,
                       invariant_gradient_norm, invariant_laplacian, numerical_complex_jacobian,
                       numerical_real_jacobian)
from .domain import DomainConfig, base_point, random_points, rho, rho_self
from .errors import ConfigError
from .functions import (FunctionHandle, abs_power, compose, conjugate, make_bounded_symbol,
                        make_constant, make_log_rho, make_rho_power)
from .operators import (KernelParams, berezin, forelli_rudin_constant, hankel, kernel,
                        kernel_l1_divergence, kernel_lp_norm, kernel_lp_norm_exact,
                        modified_kernel, modified_project, modified_projection_gradients,
                        representation_check, t_alpha, projection_gradient_bound)
from .oscillation import (OscillationParams, bloch_seminorm, bmo_decompose, bmo_seminorm,
                          centered_oscillation, make_grid, mean_oscillation, oscillation_sup,
                          vmo_trend)
from .quadrature import QuadratureSpec, ball_volume, ball_volume_base_n1, integrate_tube
from .report import REL_TOL, CheckReport, make_check

__all__ = ["SUITES", "SuiteConfig", "run_suite", "suite_names"]


@dataclass(frozen=True)
class SuiteConfig:
    """Suite name plus overrides; None means "use the suite's own default"."""

    suite: str
    n: Optional[int] = None
    alpha: Optional[float] = None
    samples: Optional[int] = None
    seed: int = 20240917
    kappa: Optional[float] = None
    rel_tol: float = REL_TOL
    jobs: int = 1
    out: Optional[str] = None
    fmt: str = "json"

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.n is not None and (int(self.n) != self.n or self.n < 1):
            raise ConfigError("--n must be a positive integer")
        if self.alpha is not None and not self.alpha > -1:
            raise ConfigError("--alpha must be > -1")
        if self.samples is not None and self.samples < 1:
            raise ConfigError("--samples must be positive")
        if self.kappa is not None and not self.kappa > -1:
            raise ConfigError("--kappa must be > -1")
        if not self.rel_tol > 0:
            raise ConfigError("--rel-tol must be positive")
        if self.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if self.fmt not in ("json", "csv"):
            raise ConfigError("--format must be json or csv")

    def dims(self, default=(1, 2, 3)):
        return (self.n,) if self.n is not None else tuple(default)

    def dim(self, default: int = 1) -> int:
        return self.n if self.n is not None else default

    def weight(self, default: float = 0.0) -> float:
        return self.alpha if self.alpha is not None else default

    def nsamples(self, default: int) -> int:
        return self.samples if self.samples is not None else default

    def sub_seed(self, k: int) -> int:
        ss = np.random.SeedSequence(self.seed, spawn_key=(1000 + k,))
        return int(ss.generate_state(1, dtype=np.uint64)[0])

    def spec(self, samples: int, k: int, **kw) -> QuadratureSpec:
        return QuadratureSpec(samples=samples, seed=self.sub_seed(k), kappa=self.kappa, **kw)

    def rng(self, k: int) -> np.random.Generator:
        return np.random.default_rng(self.sub_seed(k))

    def as_dict(self) -> dict:
        return {"n": self.n, "alpha": self.alpha, "samples": self.samples, "seed": self.seed,
                "kappa": self.kappa}


Check = Callable[[], list]

TAILS = tuple(range(1, 16))


def _max_abs(a):
    a = np.abs(np.asarray(a))
    return float(a.max()) if a.size else 0.0


def _ball_points(rng, n, m, max_radius=0.95):
    g = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * rng.uniform(0, max_radius, size=(m, 1))


def _printed_inverse(z):
    zp, zn = z[..., :-1], z[..., -1]
    q = np.sum(zp * zp, axis=-1)
    d = 1j + zn + 0.5j * q
    return np.concatenate([2j * zp / d[..., None], ((1j - zn - 0.5j * q) / d)[..., None]], axis=-1)


# ---------------------------------------------------------------- identities


def suite_identities(cfg: SuiteConfig) -> list:
    checks = []
    for n in cfg.dims():
        def run(n=n):
            rng = cfg.rng(n)
            z = random_points(rng, n, 10_000)
            w = random_points(rng, n, 10_000)
            i = base_point(n)
            xi, eta = B.cayley_inv(z), B.cayley_inv(w)
            out = []
            lhs = 1 - B.inner(xi, eta)
            rhs = rho(z, w) / (rho(z, i) * rho(i, w))
            out.append(make_check(f"identities.iii.pairing.n{n}", "1 - <Phi^-1 z, Phi^-1 w> = rho(z,w)/(rho(z,i) rho(i,w))",
                                  0.0, _max_abs(lhs - rhs), "PAPER", abs_tol=1e-10, rel_tol=0))
            lhs = 1 - np.sum(np.abs(xi) ** 2, axis=-1)
            rhs = rho_self(z) / np.abs(rho(z, i)) ** 2
            out.append(make_check(f"identities.iii.defect.n{n}", "1 - |Phi^-1 z|^2 = rho(z)/|rho(z,i)|^2",
                                  0.0, _max_abs(lhs - rhs), "PAPER", abs_tol=1e-10, rel_tol=0))
            out.append(make_check(f"identities.iii.last.n{n}", "1 + [Phi^-1 z]_n = 1/rho(z,i)",
                                  0.0, _max_abs(1 + xi[:, -1] - 1 / rho(z, i)), "PAPER",
                                  abs_tol=1e-10, rel_tol=0))
            rhs = (1 - B.inner(xi, eta)) / ((1 + xi[:, -1]) * np.conj(1 + eta[:, -1]))
            out.append(make_check(f"identities.iv.n{n}", "rho(z,w) = (1 - <xi,eta>)/((1+xi_n) conj(1+eta_n))",
                                  0.0, _max_abs(rho(z, w) - rhs), "PAPER", abs_tol=1e-10, rel_tol=0,
                                  note="denominator (1+xi_n) conj(1+eta_n)"))
            printed = (1 - B.inner(xi, eta)) / ((1 + xi[:, -1]) * (1 + eta[:, -1]))
            out.append(make_check(f"identities.iv.printed.n{n}", "rho(z,w) = (1 - <xi,eta>)/((1+xi_n)(1+eta_n))",
                                  0.0, _max_abs(rho(z, w) - printed), "PAPER", abs_tol=1e-10,
                                  rel_tol=0, diagnostic=True,
                                  note="denominator without conjugate on (1+eta_n)"))
            back = B.cayley(xi)
            out.append(make_check(f"identities.roundtrip.n{n}", "Phi o Phi^-1 = id", 0.0,
                                  _max_abs(back - z), "TRIVIAL", abs_tol=1e-10, rel_tol=0))
            bp = _ball_points(rng, n, 10_000)
            out.append(make_check(f"identities.roundtrip-ball.n{n}", "Phi^-1 o Phi = id", 0.0,
                                  _max_abs(B.cayley_inv(B.cayley(bp)) - bp), "TRIVIAL",
                                  abs_tol=1e-10, rel_tol=0))
            out.append(make_check(f"identities.printed-inverse.n{n}", "Phi^-1 as printed (2i w')",
                                  0.0, _max_abs(_printed_inverse(B.cayley(bp)) - bp), "PAPER",
                                  abs_tol=1e-10, rel_tol=0, diagnostic=True,
                                  note="printed first block 2i w' instead of sqrt(2) i w'"))
            return out
        checks.append((f"identities.n{n}", run))
    return checks


# ---------------------------------------------------------------- jacobians


def suite_jacobians(cfg: SuiteConfig) -> list:
    checks = []
    for n in cfg.dims():
        def run(n=n):
            rng = cfg.rng(10 + n)
            xi = _ball_points(rng, n, 100)
            z = random_points(rng, n, 100)
            fwd = [abs(numerical_real_jacobian(B.cayley, p, 1e-3 * abs(1 + p[-1]))
                       / B.cayley_jacobian("forward", p) - 1) for p in xi]
            steps = 1e-3 * np.minimum(rho_self(z), 1.0)
            num_inv = np.array([numerical_real_jacobian(B.cayley_inv, p, h) for p, h in zip(z, steps)])
            inv = np.abs(num_inv / B.cayley_jacobian("inverse", z) - 1)
            printed = np.abs(num_inv / B.printed_inverse_jacobian(z) - 1)
            num_sigma = np.array([numerical_complex_jacobian(lambda u, p=p: B.sigma(p, u), p, 1e-3)
                                  for p in z])
            sig = np.abs(num_sigma / rho_self(z) ** (-(n + 1) / 2) - 1)
            return [
                make_check(f"jacobians.forward.n{n}", "J_R Phi(xi) = 2^(n+1)/|1+xi_n|^(2(n+1))",
                           0.0, max(fwd), "PAPER", abs_tol=1e-6, rel_tol=0),
                make_check(f"jacobians.inverse.n{n}", "J_R Phi^-1(z) = 1/(2^(n+1)|rho(z,i)|^(2(n+1)))", 0.0, float(inv.max()),
                           "DERIVED", abs_tol=1e-6, rel_tol=0,
                           note="closed form 1/(2^(n+1)|rho(z,i)|^(2(n+1)))"),
                make_check(f"jacobians.inverse.printed.n{n}", "J_R Phi^-1(z) = 1/(4|rho(z,i)|^(2(n+1)))", 0.0,
                           float(printed.max()), "PAPER", abs_tol=1e-6, rel_tol=0,
                           diagnostic=n > 1, note="printed 1/(4|rho(z,i)|^(2(n+1))); "
                           "agrees with the true Jacobian only when n = 1"),
                make_check(f"jacobians.sigma.n{n}", "J_C sigma_z = rho(z)^(-(n+1)/2)", 0.0,
                           float(sig.max()), "PAPER", abs_tol=1e-6, rel_tol=0),
            ]
        checks.append((f"jacobians.n{n}", run))
    return checks


# ---------------------------------------------------------------- forelli-rudin


def suite_forelli_rudin(cfg: SuiteConfig) -> list:
    n, alpha = cfg.dim(1), cfg.weight(0.0)
    dom = DomainConfig(n, alpha)
    i = base_point(n)
    m = cfg.nsamples(1_000_000)
    cases = [(2, 2, 0), (3, 4, 2)] if n == 1 else [(n + 1, n + 1, 0), (n + 2, n + 3, 2)]
    checks = []
    for k, (r, s, t) in enumerate(cases):
        def run(r=r, s=s, t=t, k=k):
            f = lambda w: rho_self(w) ** (t - alpha) / (rho(i, w) ** r * rho(w, i) ** s)
            res = integrate_tube(f, dom, cfg.spec(m, 20 + k))
            exp = forelli_rudin_constant(n, r, s, t)
            return [make_check(f"forelli-rudin.{r}-{s}-{t}", "int rho(w)^t dV(w)/(rho(z,w)^r rho(w,u)^s) = C_1 rho(z,u)^(n+1+t-r-s)",
                               exp, res.value, "PAPER", stderr=res.stderr, rel_tol=cfg.rel_tol,
                               note=f"C_1(n={n},r={r},s={s},t={t}) at z=u=i")]
        checks.append((f"forelli-rudin.{r}-{s}-{t}", run))
    return checks


# ---------------------------------------------------------------- metric


def suite_metric(cfg: SuiteConfig) -> list:
    checks = []
    for n in cfg.dims():
        def run(n=n):
            rng = cfg.rng(30 + n)
            z, w, v = (random_points(rng, n, 1000) for _ in range(3))
            out = [
                make_check(f"metric.zero.n{n}", "beta(z,z) = 0", 0.0, _max_abs(B.beta(z, z)),
                           "TRIVIAL", abs_tol=1e-8, rel_tol=0),
                make_check(f"metric.symmetry.n{n}", "beta(z,w) = beta(w,z)", 0.0,
                           _max_abs(B.beta(z, w) - B.beta(w, z)), "TRIVIAL", abs_tol=1e-8, rel_tol=0),
                make_check(f"metric.tau-invariance.n{n}", "beta(tau_v z, tau_v w) = beta(z,w)", 0.0,
                           _max_abs(B.beta(B.tau(v, z), B.tau(v, w)) - B.beta(z, w)), "PAPER",
                           abs_tol=1e-8, rel_tol=0),
            ]
            return out
        checks.append((f"metric.n{n}", run))

    def closed():
        out = []
        i = base_point(1)
        for y in (2.0, 5.0, 10.0):
            val = float(B.beta(i, np.array([1j * y]))[()])
            out.append(make_check(f"metric.closed-n1.y{y:g}", "beta(i, iy) = |log y| / 2",
                                  0.5 * abs(math.log(y)), val, "DERIVED", abs_tol=1e-8, rel_tol=0))
        return out
    checks.append(("metric.closed", closed))

    n, alpha = cfg.dim(1), cfg.weight(0.0)
    m = cfg.nsamples(200_000)

    def volumes():
        dom = DomainConfig(n, alpha)
        spec = cfg.spec(m, 39)
        ratios = []
        for k in range(-2, 3):
            z = base_point(n) * 10.0**k
            ratios.append(ball_volume(z, 1.0, dom, spec) / rho_self(z) ** (n + 1 + alpha))
        spread = max(ratios) / min(ratios) - 1
        out = [make_check("metric.volume-ratio", "V_alpha(D(z,r)) comparable to rho(z)^(n+1+alpha)", 0.0,
                          spread, "PAPER", abs_tol=0.05, rel_tol=0,
                          note="max/min - 1 of V_alpha(D(z,1))/rho(z)^(n+1+alpha), rho(z)=1e-2..1e2")]
        if n == 1 and alpha == 0:
            r = ball_volume(base_point(1), 1.0, dom, cfg.spec(m, 38))
            out.append(make_check("metric.volume-n1", "V(D(i,r)) = pi sinh^2(2r) for n=1", ball_volume_base_n1(1.0),
                                  r, "DERIVED", rel_tol=cfg.rel_tol))
        return out
    checks.append(("metric.volume", volumes))
    return checks


# ---------------------------------------------------------------- gradient / laplacian


def suite_gradient_laplacian(cfg: SuiteConfig) -> list:
    checks = []
    for n in cfg.dims((1, 2, 3)):
        def run(n=n):
            rng = cfg.rng(40 + n)
            i = base_point(n)
            u0 = random_points(rng, n, (), rho_range=(0.5, 2.0), x_scale=0.5, y_scale=0.3)
            f = make_rho_power(u0, 3.0)
            f_num = FunctionHandle(evaluate=f.evaluate, name=f.name, holomorphic=True)
            tube_side = float(invariant_gradient_norm(f_num, i[None, :])[0])
            ball_side = math.sqrt(2) * ball_gradient_at_origin(f, n)
            out = [make_check(f"gradient.ball-side.n{n}", "|grad~ f(i)| = sqrt2 |grad(f o Phi)(0)|",
                              ball_side, tube_side, "PAPER", abs_tol=0, rel_tol=1e-6)]

            zs = random_points(rng, n, 50, rho_range=(0.3, 3.0), x_scale=0.5, y_scale=0.3)
            vs = random_points(rng, n, 50, rho_range=(0.3, 3.0), x_scale=0.5, y_scale=0.3)
            g = abs_power(f, 2.0)
            inv_err, lg_err, hol_err, grad_inv, mat_err = [], [], [], [], []
            for z, v in zip(zs, vs):
                gt = compose(g, lambda u, v=v: B.tau(v, u), holomorphic_map=False)
                lhs = invariant_laplacian(gt, z)
                rhs = invariant_laplacian(g, B.tau(v, z))
                inv_err.append(abs(lhs - rhs) / abs(rhs))
                grad = float(invariant_gradient_norm(f, z[None, :], exact=True)[0])
                lg_err.append(abs(invariant_laplacian(g, z) - 2 * grad**2) / (2 * grad**2))
                hol_err.append(abs(invariant_laplacian(f, z)))
                ft = compose(f, lambda u, v=v: B.tau(v, u))
                a = float(invariant_gradient_norm(ft, z[None, :])[0])
                b = float(invariant_gradient_norm(f, B.tau(v, z)[None, :], exact=True)[0])
                grad_inv.append(abs(a - b) / b)
                mat_err.append(abs(gradient_norm_from_matrix(f, z, exact=True) - grad) / grad)
            out += [
                make_check(f"laplacian.invariance.n{n}", "Delta~(g o tau_v) = (Delta~ g) o tau_v",
                           0.0, max(inv_err), "PAPER", abs_tol=1e-4, rel_tol=0,
                           note="max relative error over 50 (v, z), g = |rho-power|^2"),
                make_check(f"laplacian.abs-square.n{n}", "Delta~|f|^2 = 2|grad~ f|^2", 0.0,
                           max(lg_err), "PAPER", abs_tol=1e-4, rel_tol=0),
                make_check(f"laplacian.holomorphic.n{n}", "Delta~ f = 0 for holomorphic f", 0.0,
                           max(hol_err), "TRIVIAL", abs_tol=1e-6, rel_tol=0),
                make_check(f"gradient.invariance.n{n}", "|grad~(f o tau_v)| = |grad~ f| o tau_v", 0.0,
                           max(grad_inv), "PAPER", abs_tol=1e-6, rel_tol=0),
                make_check(f"gradient.bergman-matrix.n{n}", "|grad~ f|^2 = 2 sum b^ij conj(d_i f) d_j f", 0.0,
                           max(mat_err), "DERIVED", abs_tol=1e-8, rel_tol=0),
            ]
            dets = [abs(bergman_matrix(z).det * (2 * rho_self(z)) ** (n + 1) - 1) for z in zs]
            out.append(make_check(f"bergman-matrix.det.n{n}", "det b(z) = (2 rho(z))^-(n+1)", 0.0,
                                  max(dets), "PAPER", abs_tol=1e-10, rel_tol=0))
            return out
        checks.append((f"gradient-laplacian.n{n}", run))
    return checks


# ---------------------------------------------------------------- kernels


def suite_kernels(cfg: SuiteConfig) -> list:
    n, alpha = cfg.dim(1), cfg.weight(0.0)
    kp = KernelParams(DomainConfig(n, alpha))
    m = cfg.nsamples(200_000)
    checks = []
    rng = cfg.rng(50)
    centres = random_points(rng, n, 3, rho_range=(0.5, 2.0), x_scale=0.5, y_scale=0.3)
    exps = [n + 1 + alpha, n + 2 + alpha, n + 3 + alpha]
    points = random_points(rng, n, 5, rho_range=(0.3, 3.0), x_scale=1.0, y_scale=0.3)

    for k, (u0, mm) in enumerate(zip(centres, exps)):
        def run(u0=u0, mm=mm, k=k):
            f = make_rho_power(u0, mm)
            out = []
            for j, z in enumerate(points):
                res = t_alpha(f, z, kp, cfg.spec(m, 51 + 10 * k + j, center_weight=0.3),
                              extra_centers=[u0])
                out.append(make_check(f"kernels.reproduce.f{k}.z{j}", "f(z) = int K_alpha(z,w) f(w) dV_alpha(w)",
                                      complex(f(z)), res.value, "PAPER", stderr=res.stderr,
                                      rel_tol=cfg.rel_tol, note=f"f = rho(., u0)^-{mm:g}"))
            return out
        checks.append((f"kernels.reproduce.f{k}", run))

    def berezin_one():
        out = []
        for j, z in enumerate(points[:3]):
            res = berezin(make_constant(1.0), z, kp, cfg.spec(m, 90 + j, center_weight=0.3))
            out.append(make_check(f"kernels.berezin-one.z{j}", "Berezin transform of 1", 1.0, res.value,
                                  "DERIVED", stderr=res.stderr, rel_tol=cfg.rel_tol))
        return out
    checks.append(("kernels.berezin", berezin_one))

    def pointwise():
        r = cfg.rng(95)
        z = random_points(r, n, 10_000)
        w = random_points(r, n, 10_000)
        lhs = np.abs(kernel(z, w, kp))
        rhs = 2 ** (n + 1 + alpha) * np.real(kernel(z, z, kp))
        herm = _max_abs((kernel(z, w, kp) - np.conj(kernel(w, z, kp))) / lhs)
        at_i = _max_abs(modified_kernel(base_point(n), w, kp))
        return [
            make_check("kernels.pointwise-bound", "|K(z,w)| <= 2^(n+1+alpha) K(z,z)", 0,
                       int(np.sum(lhs > rhs)), "PAPER", tol=0, note="violations on 10^4 pairs"),
            make_check("kernels.hermitian", "K(z,w) = conj K(w,z)", 0.0, herm, "TRIVIAL",
                       abs_tol=1e-12, rel_tol=0),
            make_check("kernels.modified-at-i", "K~(i, w) = 0", 0.0, at_i, "TRIVIAL", tol=0),
        ]
    checks.append(("kernels.pointwise", pointwise))

    def scaling():
        p, lam = 2.0, 0.0
        rhos = (0.25, 1.0, 4.0)
        vals, out = [], []
        for j, r in enumerate(rhos):
            z = base_point(1) * r
            res = kernel_lp_norm(z, p, lam, 1, cfg.spec(m, 96 + j, center_weight=0.3))
            vals.append(res.value.real)
            exact = kernel_lp_norm_exact(z, p, lam, KernelParams(DomainConfig(1, lam)))
            out.append(make_check(f"kernels.norm.rho{r:g}", "||K_lambda(z,.)||^p closed form", exact,
                                  res.value, "DERIVED", stderr=res.stderr, rel_tol=cfg.rel_tol))
        slope = np.polyfit(np.log(rhos), np.log(vals), 1)[0]
        expected = (1 - p) * (1 + 1 + lam)
        out.insert(0, make_check("kernels.norm-scaling", "norm ~ rho(z)^((1-p)(n+1+lambda))",
                                 expected, slope, "PAPER", rel_tol=0.10,
                                 note="n=1, p=2, lambda=0; least-squares slope over rho in {1/4,1,4}"))
        return out
    checks.append(("kernels.norm-scaling", scaling))

    def hankel_zero():
        i = base_point(n)
        f = make_rho_power(i, n + 1 + alpha)
        z = points[0]
        res = hankel(f, make_rho_power(i, 1.0), z, kp, cfg.spec(m, 99, center_weight=0.3))
        return [make_check("kernels.hankel-holomorphic", "H_f g = (I - P_alpha)(fg) = 0 for holomorphic fg",
                           0.0, res.value, "TRIVIAL", stderr=res.stderr, rel_tol=0,
                           abs_tol=cfg.rel_tol * abs(complex(f(z)) * complex(make_rho_power(i, 1.0)(z))))]
    checks.append(("kernels.hankel", hankel_zero))
    return checks


# ---------------------------------------------------------------- representation


def suite_representation(cfg: SuiteConfig) -> list:
    n, alpha = cfg.dim(1), cfg.weight(1.0)
    lam, p = 0.0, 2.0
    kp = KernelParams(DomainConfig(n, alpha))
    i = base_point(n)
    f = make_rho_power(i, 3.0)
    m = cfg.nsamples(200_000)
    rng = cfg.rng(60)
    zs = [i] + list(random_points(rng, n, 2, rho_range=(0.5, 2.0), x_scale=1.0, y_scale=0.3))
    results = {}

    def run_all():
        out = [make_check("representation.window", "alpha > (lambda+1)/p - 1", 0,
                          int(not alpha > (lam + 1) / p - 1), "PAPER", tol=0,
                          note=f"alpha={alpha:g}, lambda={lam:g}, p={p:g}")]
        for N in (0, 1, 2, 3):
            for j, z in enumerate(zs):
                rep, res = representation_check(f, z, N, kp, cfg.spec(m, 61 + 10 * N + j, center_weight=0.3),
                                                rel_tol=cfg.rel_tol,
                                                check_id=f"representation.N{N}.z{j}",
                                                extra_centers=[i])
                if N == 3:
                    rep.diagnostic = True
                results[(N, j)] = res
                out.append(rep)
        label_sets = [set(r.winners) for (N, _), r in results.items() if N >= 1]
        common = set.intersection(*label_sets) if label_sets else set()
        out.append(make_check("representation.same-winner", "one constant c_N reproduces f for every N and z",
                              1, len(common), "DERIVED", tol=0,
                              note="numerics support " + (",".join(sorted(common)) or "no constant")
                              + " i.e. f = (" + (",".join(sorted(common)) or "?")
                              + ")^N Gamma(1+alpha)/Gamma(1+alpha+N) T_alpha(rho^N L_n^N f)"))
        printed_ok = all("+2i" in s for s in label_sets)
        out.append(make_check("representation.printed-constant", "printed constant (2i)^N", 1,
                              int(printed_ok), "PAPER", tol=0, diagnostic=True,
                              note="printed (2i)^N reproduces f at every N" if printed_ok
                              else "printed (2i)^N fails for odd N; (-2i)^N is supported"))
        if n == 1 and alpha == 1.0:
            res = results[(1, 0)].t_value
            out.append(make_check("representation.semi-analytic", "T_1(rho L_n f)(i) = i f(i)",
                                  1j * complex(f(i)), res.value, "DERIVED", stderr=res.stderr,
                                  rel_tol=cfg.rel_tol))
        return out
    return [("representation", run_all)]


# ---------------------------------------------------------------- oscillation


def suite_oscillation(cfg: SuiteConfig) -> list:
    n, alpha = cfg.dim(1), cfg.weight(0.0)
    dom = DomainConfig(n, alpha)
    i = base_point(n)
    m = cfg.nsamples(4000)
    spec = cfg.spec(m, 70)
    checks = []

    def constants():
        op = OscillationParams(1.0, 2.0, make_grid(n, 20))
        vals = [mean_oscillation(make_constant(2.5 - 1j), z, op, spec, dom) for z in op.grid]
        return [make_check("oscillation.mo-constant", "MO_r(constant) = 0", 0.0, max(vals), "TRIVIAL",
                           abs_tol=1e-12, rel_tol=0, note="zero up to floating-point rounding")]
    checks.append(("oscillation.constant", constants))

    def centre():
        op = OscillationParams(1.0, 2.0, make_grid(n, 50))
        out = []
        for name, f in (("rho-power", make_rho_power(i, 2.0)), ("log-rho", make_log_rho(i, n))):
            bad = 0
            worst = 0.0
            for z in op.grid:
                mo = mean_oscillation(f, z, op, spec, dom)
                alt = centered_oscillation(f, z, op, spec, center=complex(f(z)), cfg=dom)
                bad += mo > 2 * alt
                worst = max(worst, mo / alt if alt > 0 else 0.0)
            out.append(make_check(f"oscillation.centre-robust.{name}", "MO_r(f)(z) <= 2 (avg_D |f - c|^p)^(1/p) for every c", 0,
                                  int(bad), "PAPER", tol=0,
                                  note=f"violations of MO <= 2 MO(centre f(z)) at 50 points; max ratio {worst:.4f}"))
        return out
    checks.append(("oscillation.centre", centre))

    def lipschitz():
        f = make_rho_power(i, 2.0)
        grid = make_grid(n, 400, rho_range=(1e-2, 1e2))
        norm = bloch_seminorm(f, grid, polish=3)
        rng = cfg.rng(71)
        z = random_points(rng, n, 1000, rho_range=(0.05, 20.0))
        scale = np.where(rng.uniform(size=(1000, 1)) < 0.5, 0.01, 1.0) * np.sqrt(rho_self(z))[:, None]
        w = z + scale * (rng.standard_normal((1000, n)) + 1j * rng.standard_normal((1000, n)))
        w = np.where(rho_self(w)[:, None] > 0, w, z + 0.001j * rho_self(z)[:, None] * (np.arange(n) == n - 1))
        lhs = np.abs(f(z) - f(w))
        rhs = norm * B.beta(z, w) / math.sqrt(2)
        return [make_check("oscillation.bloch-lipschitz", "||f||_B beta(z,w)/sqrt2", 0,
                           int(np.sum(lhs > rhs)), "PAPER", tol=0,
                           note=f"violations on 10^3 pairs; ||f||_B ~ {norm:.6f}; max ratio "
                                f"{float(np.max(lhs / np.where(rhs > 0, rhs, np.inf))):.4f}")]
    checks.append(("oscillation.lipschitz", lipschitz))

    def omega_beta():
        op = OscillationParams(0.5, 2.0, make_grid(n, 20))
        f = FunctionHandle(evaluate=lambda w: B.beta(w, i) + 0j, name="beta(., i)")
        bad = sum(oscillation_sup(f, z, op, spec, dom) > op.r + 1e-9 for z in op.grid)
        return [make_check("oscillation.omega-beta", "omega_r(beta(., i)) <= r", 0, int(bad),
                           "DERIVED", tol=0)]
    checks.append(("oscillation.omega", omega_beta))

    reps = (("log-rho", make_log_rho(i, n)), ("rho-power-1", make_rho_power(i, 1.0)),
            ("rho-power-2", make_rho_power(i * 1.0 + (1.0 if n == 1 else 0), 2.0)))
    for name, f in reps:
        def ratio(name=name, f=f):
            vals = []
            for size in (40, 80, 160):
                op = OscillationParams(1.0, 2.0, make_grid(n, size))
                vals.append(bmo_seminorm(f, op, spec, dom) / bloch_seminorm(f, op.grid))
            spread = max(vals) / min(vals)
            return [make_check(f"oscillation.bmo-bloch.{name}", "bmo seminorm comparable to Bloch seminorm on holomorphic f",
                               1.0, spread, "DERIVED", tol=1.0,
                               note="max/min of bmo/bloch over grids 40, 80, 160: "
                                    + ", ".join(f"{v:.4f}" for v in vals))]
        checks.append((f"oscillation.ratio.{name}", ratio))

    def trend():
        op = OscillationParams(1.0, 2.0, make_grid(n, 5))
        out = []
        for name, f in (("bump", make_bounded_symbol("bump")), ("log-rho", make_log_rho(i, n))):
            tr = vmo_trend(f, op, spec, cfg=dom)
            for seq, vals in tr.values.items():
                out.append(make_check(f"oscillation.vmo-trend.{name}.{seq}", "MO_r(f) along sequences leaving compact sets",
                                      0.0, vals[-1], "DERIVED", tol=float("inf"), diagnostic=True,
                                      note="MO_r along the sequence: " + ", ".join(f"{v:.3g}" for v in vals)))
        return out
    checks.append(("oscillation.vmo", trend))
    return checks


# ---------------------------------------------------------------- decomposition


LEVELS = ((10, 500, 100), (20, 1000, 200), (40, 1000, 400))


def suite_decomposition(cfg: SuiteConfig) -> list:
    n, alpha = cfg.dim(1), cfg.weight(0.0)
    i = base_point(n)
    checks = []
    symbols = (("phase", make_bounded_symbol("phase"), False),
               ("smoothstep", make_bounded_symbol("smoothstep"), False),
               ("conj-rho-power", conjugate(make_rho_power(i, 2.0)), True))
    dom = DomainConfig(n, alpha)
    for k, (name, f, diag) in enumerate(symbols):
        def run(name=name, f=f, diag=diag, k=k):
            bo, ba, exact = [], [], []
            for level, (size, mean_samples, ball_samples) in enumerate(LEVELS):
                op = OscillationParams(1.0, 2.0, make_grid(n, size))
                d = bmo_decompose(f, op, cfg.spec(cfg.nsamples(mean_samples), 80 + k), dom)
                bo.append(d.bo_witness(spec=cfg.spec(ball_samples, 83 + k + 10 * level)))
                ba.append(d.ba_witness(spec=cfg.spec(ball_samples, 86 + k + 10 * level)))
                pts = op.grid
                exact.append(_max_abs(d.f1(pts) + d.f2(pts) - f(pts)))
            fin = all(math.isfinite(v) for v in bo + ba)
            return [
                make_check(f"decomposition.sum.{name}", "f = f^_r + (f - f^_r)", 0.0, max(exact),
                           "TRIVIAL", abs_tol=1e-14, rel_tol=0, diagnostic=diag),
                make_check(f"decomposition.bo.{name}", "|f(z)-f(w)| <= C(beta(z,w)+1)", 1.0,
                           max(bo) / min(bo) if fin and min(bo) > 0 else float("inf"), "DERIVED",
                           tol=1.0, diagnostic=diag,
                           note="omega_r(f1) grid-max over 3 refinements: " + ", ".join(f"{v:.4f}" for v in bo)),
                make_check(f"decomposition.ba.{name}", "|f|^p_r(z) in L^infinity", 1.0,
                           max(ba) / min(ba) if fin and min(ba) > 0 else float("inf"), "DERIVED",
                           tol=1.0, diagnostic=diag,
                           note="ball means of |f2|^p grid-max over 3 refinements: "
                                + ", ".join(f"{v:.4f}" for v in ba)),
            ]
        checks.append((f"decomposition.{name}", run))
    return checks


# ---------------------------------------------------------------- divergence


def suite_divergence(cfg: SuiteConfig) -> list:
    n, alpha = cfg.dim(1), cfg.weight(0.0)
    kp = KernelParams(DomainConfig(n, alpha))
    i = base_point(n)
    checks = []
    radii = [8.0 * 2**k for k in range(5)]

    def l1():
        spec = cfg.spec(cfg.nsamples(400_000), 100, tail_weight=0.5, tail_scales=TAILS)
        d = kernel_l1_divergence(kp, radii, spec)
        contrast = i.copy()
        contrast[-1] = 0.5 + 2j
        c = kernel_l1_divergence(kp, radii, spec, contrast=contrast)
        inc = np.array(d.increments)
        se = np.array(d.increment_stderrs)
        fmt = lambda xs: ", ".join(f"{x:.4f}" for x in xs)
        return [
            make_check("divergence.kernel-l1.increasing", "int_{Phi(|xi|<1-1/R)} |K_alpha(i,w)| dV_alpha grows without bound", 0,
                       int(np.sum(inc <= 3 * se)), "PAPER", tol=0,
                       note=f"masses {fmt(d.values)}; increments {fmt(inc)}"),
            make_check("divergence.kernel-l1.no-plateau", "int_{Phi(|xi|<1-1/R)} |K_alpha(i,w)| dV_alpha grows without bound", 1.0,
                       float(inc.min() / inc.max()), "DERIVED", tol=0.5,
                       note="min/max of increments over 4 doublings; a plateau drives this to 0"),
            make_check("divergence.modified-kernel.cauchy", "truncated mass of |K~_alpha(z0,.)| converges", 0.0,
                       float(c.increments[-1] / c.increments[0]), "DERIVED", tol=0.25,
                       note=f"|K~(z0,.)| masses {fmt(c.values)}"),
        ]
    checks.append(("divergence.l1", l1))

    for k, kind in enumerate(("phase", "smoothstep")):
        def bounded_projection(kind=kind, k=k):
            f = make_bounded_symbol(kind)
            spec = cfg.spec(cfg.nsamples(20_000), 110 + k, center_weight=0.4, tail_weight=0.2,
                            tail_scales=TAILS[:10])
            at_i = modified_project(f, i, kp, spec)
            pts = make_grid(n, 50, seed=k)
            grads, majs = modified_projection_gradients(f, pts, kp, spec)
            bound = projection_gradient_bound(kp, f.sup_bound or 1.0)
            return [
                make_check(f"divergence.ptilde-at-i.{kind}", "P~_alpha f(i) = 0", 0.0, at_i.value,
                           "TRIVIAL", stderr=at_i.stderr, rel_tol=0),
                make_check(f"divergence.ptilde-gradient.{kind}", "sup |grad~ P~_alpha f| <= C sup |f|",
                           0, int(np.sum(~(grads <= bound))), "DERIVED", tol=0,
                           note=f"max |grad~ P~f| over 50 points {grads.max():.4f} <= bound "
                                f"{bound:.4f} (sample majorant max {majs.max():.4f})"),
            ]
        checks.append((f"divergence.ptilde.{kind}", bounded_projection))
    return checks


SUITES = {
    "identities": suite_identities,
    "jacobians": suite_jacobians,
    "forelli-rudin": suite_forelli_rudin,
    "metric": suite_metric,
    "gradient-laplacian": suite_gradient_laplacian,
    "kernels": suite_kernels,
    "representation": suite_representation,
    "oscillation": suite_oscillation,
    "decomposition": suite_decomposition,
    "divergence": suite_divergence,
}


def suite_names() -> list:
    return list(SUITES)


def _guarded(name: str, fn: Check) -> list:
    t0 = time.perf_counter()
    try:
        reports = list(fn())
    except Exception as exc:  # a failing module becomes a failed check, never a crash
        detail = traceback.format_exception_only(type(exc), exc)[-1].strip()
        return [CheckReport(id=name, anchor="", expected=0.0, provenance="TRIVIAL",
                            observed=float("nan"), passed=False,
                            seconds=time.perf_counter() - t0, note=f"error: {detail}")]
    dt = (time.perf_counter() - t0) / max(1, len(reports))
    for r in reports:
        r.seconds = dt
    return reports


def _raiser(exc):
    def fn():
        raise exc
    return fn


def run_suite(config: SuiteConfig) -> list:
    """Run every check of the configured suite; order is fixed regardless of ``jobs``."""
    try:
        checks = SUITES[config.suite](config)
    except Exception as exc:
        checks = [(config.suite, _raiser(exc))]
    if config.jobs > 1 and len(checks) > 1:
        with ThreadPoolExecutor(config.jobs) as pool:
            groups = list(pool.map(lambda c: _guarded(*c), checks))
    else:
        groups = [_guarded(*c) for c in checks]
    return [r for g in groups for r in g]
