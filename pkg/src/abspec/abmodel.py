"""Standard Aharonov-Bohm Hamiltonian in a homogeneous magnetic field.

Radial solutions, the explicit point spectrum with its eigenfunctions and
the sector Green function (Laguerre series and closed F*G form).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .specfun import gamma_complex, kummer_F, laguerre, rgamma, tricomi_G

__all__ = [
    "ModelParams",
    "RadialPoint",
    "NearEigenvalueError",
    "beta_index",
    "gamma_index",
    "radial_solutions",
    "ab_eigenvalue",
    "ab_eigenfunction",
    "green_series",
    "green_closed",
    "enumerate_ab_spectrum",
]


class NearEigenvalueError(ValueError):
    """The spectral parameter sits on (or too close to) an eigenvalue."""


@dataclass(frozen=True)
class ModelParams:
    """Flux fraction ``alpha`` in ]0, 1[ and field strength ``B`` > 0."""

    alpha: float
    B: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in ]0,1[, got {self.alpha}")
        if not self.B > 0.0:
            raise ValueError(f"B must be positive, got {self.B}")


@dataclass(frozen=True)
class RadialPoint:
    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.r > 0.0:
            raise ValueError("r must be positive")


def gamma_index(m: int, p: ModelParams) -> float:
    return 1.0 + abs(m + p.alpha)


def beta_index(m: int, lam, p: ModelParams):
    """beta(m, lambda) = (1 + m + alpha + |m + alpha| - lambda/B) / 2.

    ``lam`` may be complex (deficiency-subspace evaluations at +-i).
    """
    a = m + p.alpha
    return 0.5 * (1.0 + a + abs(a) - lam / p.B)


def radial_solutions(m: int, lam, p: ModelParams, r: float):
    """The two solutions (g1, g2) of the radial equation in sector ``m``.

    g1 is regular at the origin, g2 is the one decaying at infinity.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    sigma = abs(m + p.alpha)
    beta = beta_index(m, lam, p)
    gam = 1.0 + sigma
    x = 0.5 * p.B * r * r
    envelope = r**sigma * math.exp(-0.5 * x)
    return envelope * kummer_F(beta, gam, x), envelope * tricomi_G(beta, gam, x)


def ab_eigenvalue(m: int, n: int, p: ModelParams) -> float:
    if n < 0:
        raise ValueError("n must be non-negative")
    a = m + p.alpha
    return p.B * (a + abs(a) + 2 * n + 1)


def _norm_constant(m: int, n: int, p: ModelParams) -> float:
    sigma = abs(m + p.alpha)
    log_c = 0.5 * (sigma + 1.0) * math.log(0.5 * p.B) + 0.5 * (
        math.lgamma(n + 1.0) - math.log(math.pi) - math.lgamma(n + sigma + 1.0)
    )
    return math.exp(log_c)


def ab_eigenfunction(m: int, n: int, p: ModelParams, x: RadialPoint) -> complex:
    """Normalized eigenfunction f_{m,n}(r, theta) of the standard Hamiltonian."""
    sigma = abs(m + p.alpha)
    y = 0.5 * p.B * x.r * x.r
    radial = _norm_constant(m, n, p) * x.r**sigma * laguerre(n, sigma, y) * math.exp(-0.5 * y)
    return radial * cmath.exp(1j * m * x.theta)


def _check_resolvent_point(m: int, z: complex, p: ModelParams, n_max: int | None = None):
    a = m + p.alpha
    base = p.B * (a + abs(a) + 1)
    if z.imag == 0.0 and z.real >= base:
        n = round((z.real - base) / (2 * p.B))
        if (n_max is None or n < n_max) and abs(z - (base + 2 * p.B * n)) <= 1e-8:
            raise NearEigenvalueError(f"z={z} is an eigenvalue of sector m={m}")


def green_series(m: int, z: complex, r1: float, r2: float, p: ModelParams, n_terms: int) -> complex:
    """Partial sum of the sector Green function over n < n_terms."""
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    z = complex(z)
    _check_resolvent_point(m, z, p)
    a = m + p.alpha
    sigma = abs(a)
    y1 = 0.5 * p.B * r1 * r1
    y2 = 0.5 * p.B * r2 * r2
    pref = 2.0 * (0.5 * p.B) ** (sigma + 1.0) * (r1 * r2) ** sigma * math.exp(-0.5 * (y1 + y2))
    # n!/Gamma(n+sigma+1) updated multiplicatively
    weight = rgamma(sigma + 1.0)
    l1_prev, l1 = 0.0, 1.0
    l2_prev, l2 = 0.0, 1.0
    total = 0.0j
    for n in range(n_terms):
        total += weight * l1 * l2 / (p.B * (a + sigma + 2 * n + 1) - z)
        weight *= (n + 1) / (n + sigma + 1.0)
        l1_prev, l1 = l1, ((2 * n + 1 + sigma - y1) * l1 - (n + sigma) * l1_prev) / (n + 1)
        l2_prev, l2 = l2, ((2 * n + 1 + sigma - y2) * l2 - (n + sigma) * l2_prev) / (n + 1)
    return pref * total


def w_index(m: int, z: complex, p: ModelParams) -> complex:
    a = m + p.alpha
    return z / (2 * p.B) - 0.5 * (a + abs(a) + 1)


def green_closed(m: int, z: complex, r1: float, r2: float, p: ModelParams) -> complex:
    """Sector Green function in closed form, Gamma(-w) F(-w, .., u<) G(-w, .., u>).

    The Kummer/Tricomi arguments are the dimensionless u = B r^2 / 2, and
    the prefactor carries 1/B so the result is the same kernel as
    ``green_series`` for every field strength.
    """
    z = complex(z)
    sigma = abs(m + p.alpha)
    w = w_index(m, z, p)
    if w.imag == 0.0:
        if rgamma(-w.real) == 0.0:
            raise NearEigenvalueError(f"z={z} is an eigenvalue of sector m={m}")
        neg_w = -w.real
        gamma_w = 1.0 / rgamma(neg_w)
    else:
        neg_w = -w
        gamma_w = gamma_complex(neg_w)
    u1 = 0.5 * p.B * r1 * r1
    u2 = 0.5 * p.B * r2 * r2
    u_lo, u_hi = min(u1, u2), max(u1, u2)
    pref = 0.5 * (0.5 * p.B) ** sigma * (r1 * r2) ** sigma * math.exp(-0.5 * (u1 + u2))
    val = (
        pref
        * gamma_w
        * rgamma(sigma + 1.0)
        * kummer_F(neg_w, 1.0 + sigma, u_lo)
        * tricomi_G(neg_w, 1.0 + sigma, u_hi)
    )
    return complex(val)


def enumerate_ab_spectrum(p: ModelParams, lambda_max: float, m_min: int, m_max: int):
    """All (m, n, lambda_{m,n}) with m_min <= m <= m_max and lambda <= lambda_max."""
    out = []
    for m in range(m_min, m_max + 1):
        n = 0
        while True:
            lam = ab_eigenvalue(m, n, p)
            if lam > lambda_max + 1e-9 * p.B:
                break
            out.append((m, n, lam))
            n += 1
    out.sort(key=lambda t: (t[2], t[0], t[1]))
    return out
