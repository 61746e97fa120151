"""Points of the tube domain over the parabolic base and the pairing rho(z, w).

Points are stored as complex arrays whose last axis holds the n coordinates
``(z_1, ..., z_{n-1}, z_n)``.  Every function here broadcasts over leading
axes, so a batch of points is just an array of shape ``(..., n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BranchError, DomainError

__all__ = [
    "TubePoint",
    "DomainConfig",
    "as_coords",
    "base_point",
    "rho",
    "rho_self",
    "contains",
    "rho_power",
    "random_points",
]


@dataclass(frozen=True)
class DomainConfig:
    """Dimension ``n`` and weight exponent ``alpha`` of dV_alpha = rho(z)^alpha dV."""

    n: int = 1
    alpha: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension must be an integer >= 1, got {self.n!r}")
        if not self.alpha > -1:
            raise DomainError(f"weight alpha must be > -1, got {self.alpha!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "alpha", float(self.alpha))


@dataclass(frozen=True)
class TubePoint:
    """A single point of C^n with its base defect cached."""

    coords: np.ndarray
    defect: float = field(init=False, repr=False)

    def __post_init__(self):
        c = np.array(self.coords, dtype=complex).reshape(-1)
        if c.size < 1:
            raise DomainError("a tube point needs at least one coordinate")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "defect", float(rho_self(c)))

    @classmethod
    def from_parts(cls, prime, last) -> "TubePoint":
        return cls(np.concatenate([np.asarray(prime, dtype=complex).reshape(-1), [complex(last)]]))

    @property
    def n(self) -> int:
        return self.coords.size

    @property
    def prime(self) -> np.ndarray:
        return self.coords[:-1]

    @property
    def last(self) -> complex:
        return complex(self.coords[-1])

    @property
    def interior(self) -> bool:
        return self.defect > 0

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


def as_coords(z) -> np.ndarray:
    """Return ``z`` as a complex ndarray with coordinates on the last axis."""
    if isinstance(z, TubePoint):
        return z.coords
    return np.asarray(z, dtype=complex)


def base_point(n: int) -> np.ndarray:
    """The point (0', i), image of the ball's origin under the Cayley map."""
    p = np.zeros(n, dtype=complex)
    p[-1] = 1j
    return p


def _rho_halfplane(z, w):
    # n = 1: the tube is the upper half-plane and rho(z, w) = -i (z - conj w) / 2
    return -0.5j * (z[..., 0] - np.conj(w[..., 0]))


def rho(z, w) -> np.ndarray:
    """Sesquiholomorphic pairing rho(z, w) = ((z' - conj w')^2 - 2i (z_n - conj w_n)) / 4."""
    z = as_coords(z)
    w = as_coords(w)
    if z.shape[-1] != w.shape[-1]:
        raise DomainError("points of different dimension")
    if z.shape[-1] == 1:
        return _rho_halfplane(z, w)
    d = z[..., :-1] - np.conj(w[..., :-1])
    return 0.25 * (np.sum(d * d, axis=-1) - 2j * (z[..., -1] - np.conj(w[..., -1])))


def rho_general(z, w) -> np.ndarray:
    """The general-n formula with no half-plane shortcut (used to cross-check n = 1)."""
    z = as_coords(z)
    w = as_coords(w)
    d = z[..., :-1] - np.conj(w[..., :-1])
    return 0.25 * (np.sum(d * d, axis=-1) - 2j * (z[..., -1] - np.conj(w[..., -1])))


def rho_self(z) -> np.ndarray:
    """Base defect rho(z) = Im z_n - |Im z'|^2; positive exactly on the tube."""
    z = as_coords(z)
    y = z.imag
    return y[..., -1] - np.sum(y[..., :-1] ** 2, axis=-1)


def contains(z) -> np.ndarray:
    return rho_self(z) > 0


def rho_power(z, w, s) -> np.ndarray:
    """rho(z, w) ** s on the principal branch.

    Re rho(z, w) >= (rho(z) + rho(w)) / 2 > 0 on the tube, so the principal branch
    is continuous there.  Non-integer powers refuse arguments with Re rho <= 0.
    """
    r = rho(z, w)
    if float(s) != int(s) and np.any(r.real <= 0):
        raise BranchError("non-integer power of rho with Re rho <= 0")
    return r ** s


def random_points(rng: np.random.Generator, n: int, size, rho_range=(0.1, 10.0),
                  x_scale: float = 1.0, y_scale: float = 1.0) -> np.ndarray:
    """Random interior points with log-uniform defect in ``rho_range``."""
    size = (size,) if np.isscalar(size) else tuple(size)
    lo, hi = np.log(rho_range[0]), np.log(rho_range[1])
    defect = np.exp(rng.uniform(lo, hi, size=size))
    x = x_scale * rng.standard_normal(size + (n,))
    yp = y_scale * rng.standard_normal(size + (n - 1,))
    yn = defect + np.sum(yp**2, axis=-1)
    y = np.concatenate([yp, yn[..., None]], axis=-1)
    return x + 1j * y
