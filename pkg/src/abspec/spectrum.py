"""Spectrum of the extension H^Lambda: stable sectors plus critical roots.

Sectors m <= -2 contribute the Landau levels B(2k+1) with infinite
multiplicity; sectors m >= 1 contribute B(2k+2a+1) with multiplicity k.
The critical sectors m = -1, 0 contribute the roots of the secular equation.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .abmodel import ModelParams
from .extensions import BoundaryCondition, RescaledBC, rescale
from .secular import (
    CountMismatchError,
    Origin,
    Root,
    SecularParams,
    find_roots,
    hinf_roots,
)
from .specfun import PoleError, gamma_ratio

log = logging.getLogger(__name__)

__all__ = [
    "Source",
    "HInfinity",
    "HINF",
    "EigenvalueRecord",
    "CriticalEigenfunction",
    "KernelError",
    "boundary_matrix",
    "critical_eigenfunction",
    "full_spectrum",
    "stable_spectrum",
    "SweepBranch",
    "SweepTable",
    "sweep",
]

MERGE_TOL = 1e-9
SECTOR_TOL = 1e-6
LARGE_X = 20.0
CANCEL_TOL = 1e-9
KERNEL_TOL = 1e-7
LATTICE_TOL = 1e-12


class Source(enum.Enum):
    STABLE_LANDAU = "StableLandau"
    STABLE_SHIFTED = "StableShifted"
    CRITICAL = "Critical"
    CRITICAL_ENDPOINT = "CriticalEndpoint"


class HInfinity:
    """The extension with boundary condition Phi_2(psi) = 0.

    It has no Lambda matrix, so it gets its own marker type.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "HINF"


HINF = HInfinity()

BCLike = Union[BoundaryCondition, RescaledBC, HInfinity]


@dataclass
class EigenvalueRecord:
    lam: float
    z: float | None
    sectors: tuple[int, ...]
    multiplicity: int
    sources: tuple[Source, ...]
    truncated: bool = False

    @property
    def source(self) -> Source:
        return self.sources[0]


class KernelError(ArithmeticError):
    """The boundary matrix has no kernel at the supposed root."""


@dataclass(frozen=True)
class CriticalEigenfunction:
    """Coefficients of the decaying solutions in sectors m = -1 and m = 0."""

    mu: complex
    nu: complex
    lam: float


# -- boundary matrix ------------------------------------------------------------


def _log_rgamma(x: float, lattice: bool = False) -> tuple[float, float]:
    """(log|1/Gamma(x)|, sign); -inf at the poles of Gamma.

    With ``lattice`` set, arguments within rounding of a pole count as the pole.
    """
    if lattice and x < 0.5 and abs(x - round(x)) <= LATTICE_TOL * max(1.0, abs(x)):
        x = float(round(x))
    if x <= 0 and x == math.floor(x):
        return -math.inf, 0.0
    if x > 0 or math.floor(x) % 2 == 0:
        return -math.lgamma(x), 1.0
    return -math.lgamma(x), -1.0


def _boundary_terms(x: float, bc, p: ModelParams, lattice: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """The rescaled boundary matrix at z = x and, entrywise, the summed
    magnitudes of the terms forming it (to tell a cancellation from a small
    entry)."""
    if isinstance(bc, RescaledBC):
        raise TypeError("boundary_matrix needs the unscaled (u, v, w)")
    a, half_b = p.alpha, 0.5 * p.B
    lm = bc.matrix(a)
    c_a_m1 = math.gamma(1.0 - a) * half_b ** (a - 1.0)
    c_b_m1 = math.gamma(a - 1.0)
    c_a_0 = math.gamma(a) * half_b ** (-a)
    c_b_0 = math.gamma(-a)

    if x > LARGE_X:
        # lgamma differences lose absolute accuracy here; divide by
        # 1/Gamma(x-1+a), the largest factor, using accurate gamma ratios
        f1 = gamma_ratio(x, a - 1.0)
        r1 = r2 = {"x-1+a": 1.0, "x": f1, "x+a": 1.0 / (x - 1.0 + a)}
    else:
        g = {
            "x": _log_rgamma(x, lattice),
            "x-1+a": _log_rgamma(x - 1.0 + a, lattice),
            "x+a": _log_rgamma(x + a, lattice),
        }

        def scaled(keys):
            top = max(g[k][0] for k in keys)
            if top == -math.inf:
                return {k: 0.0 for k in keys}
            return {k: g[k][1] * math.exp(g[k][0] - top) for k in keys}

        r1 = scaled(("x", "x-1+a"))
        r2 = scaled(("x", "x-1+a", "x+a"))
    t11a, t11b = c_a_m1 * r1["x"], lm[0, 0] * c_b_m1 * r1["x-1+a"]
    t12 = lm[0, 1] * c_b_0 * r1["x"]
    t21 = lm[1, 0] * c_b_m1 * r2["x-1+a"]
    t22a, t22b = c_a_0 * r2["x+a"], lm[1, 1] * c_b_0 * r2["x"]
    A = np.array([[t11a - t11b, -t12], [-t21, t22a - t22b]], dtype=complex)
    S = np.array([[abs(t11a) + abs(t11b), abs(t12)], [abs(t21), abs(t22a) + abs(t22b)]])
    return A, S


def boundary_matrix(lam: float, bc: BoundaryCondition, p: ModelParams) -> np.ndarray:
    """A = diag(a_{-1}, a_0) - Lambda diag(b_{-1}, b_0), rows rescaled.

    Each row is divided by its largest reciprocal-gamma factor, which leaves
    the kernel unchanged and keeps the entries finite for roots far out in
    the top interval.
    """
    return _boundary_terms(0.5 - lam / (2.0 * p.B), bc, p)[0]


def _kernel(A: np.ndarray, S: np.ndarray) -> list[np.ndarray]:
    """Kernel of the 2x2 boundary matrix at a root.

    Rows whose entries cancel to rounding (relative to the terms forming
    them, ``S``) impose nothing. Of the others, the row with the least
    cancellation defines the kernel vector and the remaining row is checked
    against it.
    """
    live = []
    for row, scale in zip(A, S):
        top = float(np.max(scale))
        if top == 0.0:
            continue
        rho = float(np.max(np.abs(row))) / top
        if rho > CANCEL_TOL:
            live.append((rho, row, scale))
    if not live:
        return [np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex)]
    live.sort(key=lambda item: -item[0])
    p, q = live[0][1]
    v = np.array([-q, p])
    v = v / np.linalg.norm(v)
    if len(live) == 2:
        _, row, scale = live[1]
        res = abs(complex(row @ v)) / float(scale @ np.abs(v))
        if res > KERNEL_TOL:
            raise KernelError(f"boundary matrix is regular at this point (residual {res:.3g})")
    # fix the phase so the largest component is real positive
    k = int(np.argmax(np.abs(v)))
    return [v * (abs(v[k]) / v[k])]


def critical_eigenfunction(root: Root, bc: BoundaryCondition, p: ModelParams) -> list[CriticalEigenfunction]:
    """Kernel vectors (mu, nu) of the boundary matrix at a critical root.

    A one-dimensional kernel gives one vector. A matrix whose rows both
    cancel (both sectors satisfied independently) gives the two unit vectors.
    """
    # work in z directly; lambda -> z would add rounding at the lattice zeros
    vecs = _kernel(*_boundary_terms(root.z, bc, p, lattice=root.origin is Origin.ENDPOINT))
    return [CriticalEigenfunction(complex(v[0]), complex(v[1]), root.lam) for v in vecs]


def _sectors_of(vecs) -> tuple[int, ...]:
    out = set()
    for ef in vecs:
        if abs(ef.mu) > SECTOR_TOL:
            out.add(-1)
        if abs(ef.nu) > SECTOR_TOL:
            out.add(0)
    return tuple(sorted(out))


# -- full spectrum ---------------------------------------------------------------


def stable_spectrum(p: ModelParams, lambda_max: float, m_cap: int) -> list[EigenvalueRecord]:
    """Eigenvalues from the sectors m <= -2 and m >= 1 up to lambda_max."""
    if m_cap < 1:
        raise ValueError("m_cap must be >= 1")
    out = []
    k = 0
    while p.B * (2 * k + 1) <= lambda_max * (1 + 1e-15):
        sectors = tuple(range(-2, -2 - m_cap, -1))
        out.append(EigenvalueRecord(p.B * (2 * k + 1), None, sectors, m_cap,
                                    (Source.STABLE_LANDAU,), truncated=True))
        k += 1
    k = 1
    while p.B * (2 * k + 2 * p.alpha + 1) <= lambda_max * (1 + 1e-15):
        out.append(EigenvalueRecord(p.B * (2 * k + 2 * p.alpha + 1), None, tuple(range(1, k + 1)),
                                    k, (Source.STABLE_SHIFTED,)))
        k += 1
    return out


def _critical_records(bc: BCLike, p: ModelParams, z_min: float) -> list[EigenvalueRecord]:
    if isinstance(bc, HInfinity):
        out = []
        for r in hinf_roots(p.alpha, z_min, p.B):
            # b_0 ~ 1/Gamma(z) vanishes at -m, b_{-1} ~ 1/Gamma(z-1+a) at 1-a-m
            sector = 0 if r.z == math.floor(r.z) else -1
            out.append(EigenvalueRecord(r.lam, r.z, (sector,), 1, (Source.CRITICAL_ENDPOINT,)))
        return out
    if isinstance(bc, RescaledBC):
        rbc = bc
        bc_full = _unscale(bc, p)
    else:
        rbc = rescale(bc, p)
        bc_full = bc
    sp = SecularParams(rbc, p.alpha)
    if sp.rbc != rbc:
        # parameters snapped onto an endpoint-root condition; follow suit
        snapped = _unscale(sp.rbc, p)
        bc_full = BoundaryCondition(snapped.u, snapped.v, bc_full.w)
    out = []
    for r in find_roots(sp, p, z_min):
        try:
            sectors = _sectors_of(critical_eigenfunction(r, bc_full, p))
        except KernelError as exc:
            log.warning("no kernel vector at z=%r: %s", r.z, exc)
            sectors = (-1, 0)
        src = Source.CRITICAL_ENDPOINT if r.origin is Origin.ENDPOINT else Source.CRITICAL
        out.append(EigenvalueRecord(r.lam, r.z, sectors, r.multiplicity_hint, (src,)))
    return out


def _unscale(rbc: RescaledBC, p: ModelParams) -> BoundaryCondition:
    a, half_b = p.alpha, 0.5 * p.B
    u = rbc.xi / (half_b ** (1.0 - a) * math.gamma(a) / math.gamma(2.0 - a))
    v = rbc.eta / (half_b**a * math.gamma(1.0 - a) / math.gamma(1.0 + a))
    # only |w| enters the spectrum; take w real
    return BoundaryCondition(u, v, rbc.zeta / math.sqrt(half_b))


def _merge(records: list[EigenvalueRecord], tol: float) -> list[EigenvalueRecord]:
    records = sorted(records, key=lambda r: r.lam)
    out: list[EigenvalueRecord] = []
    for r in records:
        if out and abs(r.lam - out[-1].lam) <= tol:
            prev = out[-1]
            stable_first = sorted(prev.sources + r.sources, key=lambda s: s.name.startswith("CRIT"))
            out[-1] = EigenvalueRecord(
                prev.lam if prev.z is None else r.lam if r.z is None else prev.lam,
                prev.z if prev.z is not None else r.z,
                tuple(sorted(set(prev.sectors) | set(r.sectors))),
                prev.multiplicity + r.multiplicity,
                tuple(dict.fromkeys(stable_first)),
                prev.truncated or r.truncated,
            )
        else:
            out.append(r)
    return out


def full_spectrum(bc: BCLike, p: ModelParams, lambda_max: float, m_cap: int) -> list[EigenvalueRecord]:
    """Spectrum of the extension below lambda_max, sorted by lambda.

    ``bc`` is a BoundaryCondition (u, v, w), its rescaled form, or ``HINF``.
    Landau levels carry multiplicity m_cap and ``truncated=True``.
    Coincident stable and critical eigenvalues are merged with summed
    multiplicity.
    """
    if not lambda_max > p.B:
        raise ValueError("lambda_max must exceed B")
    z_min = 0.5 - lambda_max / (2.0 * p.B)
    records = stable_spectrum(p, lambda_max, m_cap) + _critical_records(bc, p, z_min)
    return _merge(records, MERGE_TOL * p.B)


# -- sweeps ----------------------------------------------------------------------


@dataclass
class SweepBranch:
    branch_id: int
    t_index: list[int] = field(default_factory=list)
    lam: list[float] = field(default_factory=list)
    sectors: list[tuple[int, ...]] = field(default_factory=list)

    def predict(self, t_values, i: int) -> float:
        if len(self.lam) >= 2:
            i0, i1 = self.t_index[-2], self.t_index[-1]
            slope = (self.lam[-1] - self.lam[-2]) / (t_values[i1] - t_values[i0])
            return self.lam[-1] + slope * (t_values[i] - t_values[i1])
        return self.lam[-1]


@dataclass
class SweepTable:
    t_values: list[float]
    branches: list[SweepBranch]
    direction: tuple[float, float, float]
    stable_levels: list[float]
    failures: list[tuple[float, str]] = field(default_factory=list)
    roots: list[list[EigenvalueRecord]] = field(default_factory=list)


def _t_grid(lo: float, hi: float, n: int) -> list[float]:
    if n < 2:
        raise ValueError("n_steps must be >= 2")
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def sweep(
    direction: tuple[float, float, float],
    t_range: tuple[float, float, int],
    p: ModelParams,
    lambda_window: tuple[float, float],
) -> SweepTable:
    """Critical eigenvalues along (xi, eta, zeta) = t * direction.

    Roots at consecutive t are linked by an assignment that minimizes the
    distance to each branch's linear extrapolation, which carries branches
    through crossings. Failed t values are recorded and skipped.
    """
    lam_lo, lam_hi = lambda_window
    if not lam_lo < lam_hi:
        raise ValueError("empty lambda window")
    t_values = _t_grid(*t_range)
    z_min = min(0.5 - lam_hi / (2.0 * p.B), 1.0 - p.alpha - 1e-9)
    table = SweepTable(t_values, [], tuple(direction), [], [])
    table.stable_levels = sorted(
        {r.lam for r in stable_spectrum(p, lam_hi, 1) if r.lam >= lam_lo}
    )
    per_t: list[list[EigenvalueRecord]] = []
    for t in t_values:
        rbc = RescaledBC(direction[0] * t, direction[1] * t, abs(direction[2] * t))
        try:
            recs = [r for r in _critical_records(rbc, p, z_min) if lam_lo <= r.lam <= lam_hi]
        except (CountMismatchError, PoleError, ArithmeticError) as exc:
            table.failures.append((t, str(exc)))
            recs = None
        per_t.append(recs)
    table.roots = per_t
    table.branches = _link(per_t, t_values, gate=0.25 * (lam_hi - lam_lo))
    return table


def _expand(recs: list[EigenvalueRecord]):
    out = []
    for r in recs:
        out.extend([(r.lam, r.sectors)] * r.multiplicity)
    return out


def _link_cost(b: SweepBranch, t_values, i: int, lam: float, sectors, gate: float) -> float:
    cost = abs(b.predict(t_values, i) - lam)
    last = b.sectors[-1]
    # a root living in one sector cannot continue into the other one
    if len(last) == 1 and len(sectors) == 1 and last != sectors:
        cost += 2.0 * gate
    return cost


def _link(per_t, t_values, gate: float) -> list[SweepBranch]:
    branches: list[SweepBranch] = []
    active: list[SweepBranch] = []
    for i, recs in enumerate(per_t):
        if recs is None:
            continue
        pts = _expand(recs)
        matched_pts = set()
        still_active = []
        if active and pts:
            cost = np.array([[_link_cost(b, t_values, i, lam, sec, gate) for lam, sec in pts] for b in active])
            rows, cols = linear_sum_assignment(cost)
            for r, c in zip(rows, cols):
                if cost[r, c] <= gate:
                    b = active[r]
                    b.t_index.append(i)
                    b.lam.append(pts[c][0])
                    b.sectors.append(pts[c][1])
                    matched_pts.add(c)
                    still_active.append(b)
        for c, (lam, sectors) in enumerate(pts):
            if c not in matched_pts:
                b = SweepBranch(len(branches), [i], [lam], [sectors])
                branches.append(b)
                still_active.append(b)
        active = sorted(still_active, key=lambda b: b.branch_id)
    return branches
