"""Cayley transform between the unit ball and the tube, automorphisms, and the Bergman metric.

Conventions:

* ``<xi, eta> = sum xi_k conj(eta_k)``.
* ``phi_a`` is the unit-ball involution with ``phi_a(0) = a``, ``phi_a(a) = 0``
  and ``phi_0 = -id``.
* ``beta_B(xi, eta) = artanh |phi_xi(eta)|``; the tube metric is its pullback,
  ``beta(z, w) = beta_B(Phi^-1 z, Phi^-1 w)``.
* ``delta_t(u) = (t u', t^2 u_n)`` is the anisotropic dilation of the tube.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import as_coords, base_point, rho, rho_self
from .errors import DomainError, PoleError

__all__ = [
    "BallPoint",
    "inner",
    "cayley",
    "cayley_inv",
    "cayley_jacobian",
    "printed_inverse_jacobian",
    "ball_automorphism",
    "automorphism_jacobian",
    "ball_defect_after_automorphism",
    "h_map",
    "dilation",
    "sigma",
    "tau",
    "beta",
    "beta_ball",
]

POLE_TOL = 1e-14


@dataclass(frozen=True)
class BallPoint:
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=complex).reshape(-1)
        if np.sum(np.abs(c) ** 2) >= 1 - 1e-12:
            raise DomainError("ball point must satisfy |xi|^2 < 1")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


def _c(x) -> np.ndarray:
    if isinstance(x, BallPoint):
        return x.coords
    return as_coords(x)


def inner(xi, eta) -> np.ndarray:
    xi, eta = _c(xi), _c(eta)
    return np.sum(xi * np.conj(eta), axis=-1)


def cayley(xi) -> np.ndarray:
    """Phi(xi) = (sqrt2 xi' / (1 + xi_n), i (1 - xi_n)/(1 + xi_n) - i xi'.xi' / (1 + xi_n)^2)."""
    xi = _c(xi)
    xp, xn = xi[..., :-1], xi[..., -1]
    d = 1 + xn
    if np.any(np.abs(d) < POLE_TOL):
        raise PoleError("Cayley transform evaluated at its pole xi_n = -1")
    last = 1j * (1 - xn) / d - 1j * np.sum(xp * xp, axis=-1) / d**2
    return np.concatenate([np.sqrt(2) * xp / d[..., None], last[..., None]], axis=-1)


def cayley_inv(z) -> np.ndarray:
    """Inverse Cayley map.

    The denominator ``i + z_n + (i/2) z'.z'`` equals ``2i rho(z, i)``.  The first
    block carries ``sqrt(2) i z'``; that factor is forced by ``Phi^-1(Phi(xi)) = xi``.
    """
    z = as_coords(z)
    zp, zn = z[..., :-1], z[..., -1]
    q = np.sum(zp * zp, axis=-1)
    d = 1j + zn + 0.5j * q
    if np.any(np.abs(d) < 2 * POLE_TOL):
        raise PoleError("inverse Cayley transform evaluated where rho(z, i) = 0")
    first = np.sqrt(2) * 1j * zp / d[..., None]
    last = (1j - zn - 0.5j * q) / d
    return np.concatenate([first, last[..., None]], axis=-1)


def cayley_jacobian(direction: str, p) -> np.ndarray:
    """Real Jacobian determinant of Phi at a ball point, or of Phi^-1 at a tube point."""
    p = _c(p)
    n = p.shape[-1]
    if direction == "forward":
        d = np.abs(1 + p[..., -1])
        if np.any(d < POLE_TOL):
            raise PoleError("Cayley transform evaluated at its pole xi_n = -1")
        return 2.0 ** (n + 1) / d ** (2 * (n + 1))
    if direction == "inverse":
        r = np.abs(rho(p, base_point(n)))
        if np.any(r < POLE_TOL):
            raise PoleError("inverse Cayley transform evaluated where rho(z, i) = 0")
        return 1.0 / (2.0 ** (n + 1) * r ** (2 * (n + 1)))
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def printed_inverse_jacobian(z) -> np.ndarray:
    """The closed form 1 / (4 |rho(z, i)|^(2(n+1))); equals the true value only for n = 1."""
    z = as_coords(z)
    n = z.shape[-1]
    return 1.0 / (4.0 * np.abs(rho(z, base_point(n))) ** (2 * (n + 1)))


def ball_automorphism(a, w) -> np.ndarray:
    """phi_a(w) = (a - P_a w - s_a Q_a w) / (1 - <w, a>), with s_a = sqrt(1 - |a|^2).

    Written as ``(a - s w - <w,a> a / (1 + s)) / (1 - <w,a>)`` so that a = 0 needs
    no special case.
    """
    a, w = _c(a), _c(w)
    aa = np.sum(np.abs(a) ** 2, axis=-1)
    if np.any(aa >= 1):
        raise DomainError("automorphism centre must lie in the open ball")
    s = np.sqrt(1 - aa)
    wa = inner(w, a)
    den = 1 - wa
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleError("ball automorphism evaluated at 1 - <w, a> = 0")
    num = a - s[..., None] * w - (wa / (1 + s))[..., None] * a
    return num / den[..., None]


def automorphism_jacobian(a, w) -> np.ndarray:
    """Real Jacobian of phi_a at w: ((1 - |a|^2) / |1 - <w, a>|^2)^(n+1)."""
    a, w = _c(a), _c(w)
    n = w.shape[-1]
    aa = np.sum(np.abs(a) ** 2, axis=-1)
    return ((1 - aa) / np.abs(1 - inner(w, a)) ** 2) ** (n + 1)


def ball_defect_after_automorphism(a, w, w_defect=None) -> np.ndarray:
    """1 - |phi_a(w)|^2 without cancellation, optionally from a known 1 - |w|^2."""
    a, w = _c(a), _c(w)
    aa = np.sum(np.abs(a) ** 2, axis=-1)
    if w_defect is None:
        w_defect = 1 - np.sum(np.abs(w) ** 2, axis=-1)
    return (1 - aa) * w_defect / np.abs(1 - inner(w, a)) ** 2


def h_map(z, u) -> np.ndarray:
    """Affine automorphism of the tube with h_z(z) = rho(z) i and rho(h_z u, h_z v) = rho(u, v).

    Real translation by -Re z followed by the Heisenberg-type shift
    ``u -> (u' - i y', u_n - 2 y'.u' + i |y'|^2)`` with y' = Im z'.
    """
    z, u = as_coords(z), as_coords(u)
    xp, yp = z[..., :-1].real, z[..., :-1].imag
    up = u[..., :-1]
    last = (u[..., -1] - z[..., -1].real
            - 2 * np.sum(yp * (up - xp), axis=-1)
            + 1j * np.sum(yp**2, axis=-1))
    return np.concatenate([up - z[..., :-1], last[..., None]], axis=-1)


def dilation(t, u) -> np.ndarray:
    u = as_coords(u)
    t = np.asarray(t, dtype=float)
    return np.concatenate([t[..., None] * u[..., :-1], (t**2 * u[..., -1])[..., None]], axis=-1)


def sigma(z, u) -> np.ndarray:
    """sigma_z = delta_{rho(z)^{-1/2}} o h_z; sends z to (0', i)."""
    r = rho_self(z)
    if np.any(r <= 0):
        raise DomainError("sigma_z needs an interior centre z")
    return dilation(r ** -0.5, h_map(z, u))


def tau(z, u) -> np.ndarray:
    """tau_z = Phi o phi_{Phi^-1(z)} o Phi^-1; sends z to (0', i)."""
    return cayley(ball_automorphism(cayley_inv(z), cayley_inv(u)))


def _artanh_from_defect(q):
    # artanh(sqrt(1 - q)) for q in (0, 1], stable as q -> 0
    q = np.clip(q, 0.0, 1.0)
    x = np.sqrt(1 - q)
    with np.errstate(divide="ignore"):
        return np.log1p(x) - 0.5 * np.log(q)


def beta(z, w) -> np.ndarray:
    """Bergman distance, via 1 - |phi_xi(eta)|^2 = rho(z) rho(w) / |rho(z, w)|^2."""
    z, w = as_coords(z), as_coords(w)
    q = rho_self(z) * rho_self(w) / np.abs(rho(z, w)) ** 2
    return _artanh_from_defect(q)


def beta_ball(xi, eta) -> np.ndarray:
    """Unit-ball Bergman distance artanh |phi_xi(eta)|, computed through the automorphism."""
    r = np.sqrt(np.sum(np.abs(ball_automorphism(xi, eta)) ** 2, axis=-1))
    return np.arctanh(np.minimum(r, 1.0))
