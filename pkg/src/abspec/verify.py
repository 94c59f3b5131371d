"""Self-check suites behind ``abspec verify``.

Each suite returns a list of ``Check`` records with the measured residual
and the tolerance it was held to.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .abmodel import ModelParams, beta_index, green_closed, green_series
from .extensions import (
    BoundaryCondition,
    ExtensionUnitary,
    ab_unitary,
    det_relation_residuals,
    j_identity_residual,
    lambda_from_unitary,
    norm_constants,
    random_unitary,
    unitary_from_lambda,
)
from .secular import (
    Branch,
    CountMismatchError,
    IntervalKind,
    SecularParams,
    find_roots,
    hinf_roots,
    interval_root_count,
    localize,
    series_root,
)
from .specfun import gamma_ratio, log_gamma, kummer_F, polygamma, rgamma, tricomi_G

__all__ = ["Check", "SUITES", "run_suites", "TABLE_ROWS", "table_samples", "gap_counts"]


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


def _check(suite, name, measured, tol, detail="", upper=True) -> Check:
    ok = measured <= tol if upper else measured >= tol
    if math.isnan(measured):
        ok = False
    return Check(suite, name, ok, measured, tol, detail)


# -- localization tables ----------------------------------------------------------

# (table kind, row label, predicate(xi, eta, det, g1), predicted count); det = xi*eta - zeta^2
TABLE_ROWS = [
    (IntervalKind.TOP, "xi>=0 eta>=0 z2>xe", lambda x, e, d, g: x >= 0 and e >= 0 and d < 0, 1),
    (IntervalKind.TOP, "xi>=0 eta>=0 z2<=xe", lambda x, e, d, g: x >= 0 and e >= 0 and d >= 0, 0),
    (IntervalKind.TOP, "xi>=0 -G<eta<0", lambda x, e, d, g: x >= 0 and -g < e < 0, 1),
    (IntervalKind.TOP, "xi>=0 eta<=-G", lambda x, e, d, g: x >= 0 and e <= -g, 0),
    (IntervalKind.TOP, "xi<0 eta>=0", lambda x, e, d, g: x < 0 and e >= 0, 1),
    (IntervalKind.TOP, "xi<0 -G<eta<0 z2>=xe", lambda x, e, d, g: x < 0 and -g < e < 0 and d <= 0, 1),
    (IntervalKind.TOP, "xi<0 -G<eta<0 z2<xe", lambda x, e, d, g: x < 0 and -g < e < 0 and d > 0, 2),
    (IntervalKind.TOP, "xi<0 eta<=-G z2>=xe", lambda x, e, d, g: x < 0 and e <= -g and d <= 0, 0),
    (IntervalKind.TOP, "xi<0 eta<=-G z2<xe", lambda x, e, d, g: x < 0 and e <= -g and d > 0, 1),
    (IntervalKind.UPPER_GAP, "xi<=0 eta>=-G", lambda x, e, d, g: x <= 0 and e >= -g, 0),
    (IntervalKind.UPPER_GAP, "xi<=0 eta<-G", lambda x, e, d, g: x <= 0 and e < -g, 1),
    (IntervalKind.UPPER_GAP, "xi>0 eta>=-G", lambda x, e, d, g: x > 0 and e >= -g, 1),
    (IntervalKind.UPPER_GAP, "xi>0 eta<-G", lambda x, e, d, g: x > 0 and e < -g, 2),
    (IntervalKind.LOWER_GAP_A, "xi>=0 eta<=0", lambda x, e, d, g: x >= 0 and e <= 0, 0),
    (IntervalKind.LOWER_GAP_A, "xi>=0 eta>0", lambda x, e, d, g: x >= 0 and e > 0, 1),
    (IntervalKind.LOWER_GAP_A, "xi<0 eta<=0", lambda x, e, d, g: x < 0 and e <= 0, 1),
    (IntervalKind.LOWER_GAP_A, "xi<0 eta>0", lambda x, e, d, g: x < 0 and e > 0, 2),
    (IntervalKind.LOWER_GAP_B, "xi<=0 eta>=0", lambda x, e, d, g: x <= 0 and e >= 0, 0),
    (IntervalKind.LOWER_GAP_B, "xi<=0 eta<0", lambda x, e, d, g: x <= 0 and e < 0, 1),
    (IntervalKind.LOWER_GAP_B, "xi>0 eta>=0", lambda x, e, d, g: x > 0 and e >= 0, 1),
    (IntervalKind.LOWER_GAP_B, "xi>0 eta<0", lambda x, e, d, g: x > 0 and e < 0, 2),
]

TABLE_Z_MIN = -10.5


def _sample_pool(alpha: float) -> list[SecularParams]:
    g1 = math.gamma(1.0 - alpha)
    xis = [-3.0, -0.7, -0.05, 0.0, 0.05, 0.7, 3.0]
    etas = [-2.5 * g1, -g1, -0.5 * g1, -0.05, 0.0, 0.05, 0.8, 3.0]
    pool = []
    for xi in xis:
        for eta in etas:
            zetas = [0.0, 0.1, 0.6, 1.5, 3.0]
            if xi * eta > 0:
                zetas.append(math.sqrt(xi * eta))
            for zeta in zetas:
                pool.append(SecularParams.of(xi, eta, zeta, alpha))
    return pool


def table_samples(alpha: float, per_row: int = 12):
    """Deterministic parameter samples inside each table row's region."""
    g1 = math.gamma(1.0 - alpha)
    pool = _sample_pool(alpha)
    out = []
    for kind, label, pred, count in TABLE_ROWS:
        inside = [sp for sp in pool if pred(sp.xi, sp.eta, sp.det, g1)]
        if len(inside) > per_row:
            step = len(inside) / per_row
            inside = [inside[int(k * step)] for k in range(per_row)]
        out.append((kind, label, count, inside))
    return out


def suite_tables(alpha: float = 0.3, B: float = 1.0) -> list[Check]:
    checks = []
    t0 = time.perf_counter()
    cache: dict[tuple, object] = {}
    for kind, label, count, samples in table_samples(alpha):
        mismatches = 0
        notes = []
        for sp in samples:
            key = (sp.xi, sp.eta, sp.zeta)
            if key not in cache:
                try:
                    cache[key] = localize(sp, TABLE_Z_MIN)
                except CountMismatchError as exc:
                    cache[key] = exc
            res = cache[key]
            if isinstance(res, CountMismatchError):
                if res.interval.kind is kind:
                    mismatches += 1
                    notes.append(str(res))
                continue
            for r in res:
                if r.interval.kind is not kind or not r.complete:
                    continue
                if kind is IntervalKind.UPPER_GAP and r.interval.m != 0:
                    continue
                if r.found != count or interval_root_count(kind, sp, r.interval.m) != count:
                    mismatches += 1
                    notes.append(f"{key}: m={r.interval.m} found {r.found}")
        detail = f"{len(samples)} samples" + ("; " + "; ".join(notes[:3]) if notes else "")
        ok = mismatches == 0 and len(samples) >= 3
        checks.append(Check("tables", f"{kind.value} [{label}] -> {count}", ok, float(mismatches), 0.0, detail))
    checks.append(_check("tables", "runtime seconds", time.perf_counter() - t0, 60.0))
    return checks


# -- series truncations ---------------------------------------------------------------


def series_error(branch: Branch, m: int, scale: float, alpha: float,
                 direction=(1.0, 1.0, 1.0)) -> float:
    """|series_root - bracketed root| at (xi, eta, zeta) = scale * direction."""
    lead, other, zeta = direction
    if branch is Branch.Z1:
        sp = SecularParams.of(scale * lead, scale * other, abs(scale * zeta), alpha)
        base = float(-m)
    else:
        sp = SecularParams.of(scale * other, scale * lead, abs(scale * zeta), alpha)
        base = -alpha - m
    p = ModelParams(alpha, 1.0)
    roots = find_roots(sp, p, base - 0.9)
    z = min((r.z for r in roots), key=lambda v: abs(v - base))
    return abs(series_root(branch, m, sp) - z)


def suite_series(alpha: float = 0.3, B: float = 1.0) -> list[Check]:
    checks = []
    for branch in Branch:
        for m in range(3):
            e1 = series_error(branch, m, 0.02, alpha)
            e2 = series_error(branch, m, 0.01, alpha)
            ratio = e1 / e2 if e2 > 0 else math.inf
            ok = 16.0 <= ratio <= 64.0
            checks.append(Check("series", f"{branch.value} m={m} error ratio", ok, ratio, 32.0,
                                f"errors {e1:.3e} -> {e2:.3e}; accepted range [16, 64]"))
    return checks


# -- Green function ----------------------------------------------------------------------

GREEN_POINTS = [(0.3, 0.9, 0.5), (0.6, 1.4, 2.0), (1.0, 2.0, 1.0), (0.5, 0.5, 3.0), (1.5, 2.5, 0.25)]


def suite_green(alpha: float = 0.3, B: float = 1.0, n_terms: int = 2000) -> list[Check]:
    p = ModelParams(alpha, B)
    checks = []
    for m in (-1, 0, 1):
        a = m + alpha
        bottom = B * (a + abs(a) + 1.0)
        for r1, r2, depth in GREEN_POINTS:
            z = bottom - depth * B
            s = green_series(m, z, r1, r2, p, n_terms)
            c = green_closed(m, z, r1, r2, p)
            rel = abs(s - c) / abs(c)
            checks.append(_check("green", f"m={m} r=({r1},{r2}) z={z:.3g}", rel, 1e-6,
                                 f"{n_terms}-term Laguerre sum vs closed form"))
    return checks


# -- extension algebra -----------------------------------------------------------------------


def _radial_norm_quadrature(m: int, p: ModelParams) -> float:
    """N_m from integrating |g2_m(i; r)|^2 r dr numerically."""
    sigma = abs(m + p.alpha)
    beta = beta_index(m, 1j, p)
    gam = 1.0 + sigma

    # in x = B r^2 / 2: r dr = dx / B and r^(2 sigma) = (2x/B)^sigma
    def integrand(x):
        return (2.0 * x / p.B) ** sigma * abs(tricomi_G(beta, gam, x)) ** 2 * math.exp(-x) / p.B

    total = 0.0
    for lo, hi in ((0.0, 1.0), (1.0, 10.0), (10.0, 60.0)):
        total += quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-11, limit=200)[0]
    return total**-0.5


def suite_unitary(alpha: float = 0.3, B: float = 1.0, seed: int = 0, n: int = 50) -> list[Check]:
    p = ModelParams(alpha, B)
    rng = np.random.default_rng(seed)
    worst = 0.0
    skipped = 0
    for _ in range(n):
        ext = random_unitary(rng)
        try:
            bc = lambda_from_unitary(ext, p)
        except ArithmeticError:
            skipped += 1
            continue
        back = unitary_from_lambda(bc, p)
        worst = max(worst, float(np.max(np.abs(back.U - ext.U))))
    checks = [_check("unitary", f"{n} random round trips U -> Lambda -> U", worst, 1e-9,
                     f"{skipped} outside the Lambda chart")]
    u0 = unitary_from_lambda(BoundaryCondition(), p).U
    checks.append(_check("unitary", "Lambda=0 gives the diagonal unitary",
                         float(np.max(np.abs(u0 - ab_unitary(p).U))), 1e-10))
    checks.append(_check("unitary", "J identity", j_identity_residual(p), 1e-10))
    d1, d0 = det_relation_residuals(p)
    checks.append(_check("unitary", "det M_-1 relation", d1, 1e-10))
    checks.append(_check("unitary", "det M_0 relation", d0, 1e-10))
    for m, n_closed in zip((-1, 0), norm_constants(p)):
        n_quad = _radial_norm_quadrature(m, p)
        checks.append(_check("unitary", f"N_{m} against quadrature", abs(n_quad / n_closed - 1.0), 1e-6))
    return checks


# -- special functions ----------------------------------------------------------------------------


def _digamma_integral(alpha: float, z: float) -> float:
    # integrand decays like exp(-(1-z) t); cut where that drops below 1e-14
    T = math.log(1e14) / (1.0 - z)

    def f(t):
        if t == 0.0:
            return 1.0 - alpha
        return math.exp(-(1.0 - z) * t) * math.expm1(-(1.0 - alpha) * t) / math.expm1(-t)

    return quad(f, 0.0, T, epsabs=0.0, epsrel=1e-12, limit=400)[0]


def digamma_identity_residual(alpha: float, z: float) -> float:
    lhs = polygamma(0, z - 1.0 + alpha) - polygamma(0, z)
    rhs = math.pi * math.sin(math.pi * alpha) / (math.sin(math.pi * z) * math.sin(math.pi * (z + alpha)))
    rhs += _digamma_integral(alpha, z)
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def suite_digamma(alpha: float = 0.3, B: float = 1.0) -> list[Check]:
    checks = []
    for a in (0.1, 0.3, 0.5, 0.7, 0.9):
        worst = 0.0
        for z in (0.5, 0.25, -0.35, -1.6, -2.45, -4.8):
            if abs(math.sin(math.pi * z)) < 1e-3 or abs(math.sin(math.pi * (z + a))) < 1e-3:
                continue
            worst = max(worst, digamma_identity_residual(a, z))
        checks.append(_check("digamma", f"difference identity alpha={a}", worst, 1e-8))
    return checks


def suite_specfun(alpha: float = 0.3, B: float = 1.0) -> list[Check]:
    checks = []
    xs = [x / 7.0 for x in range(-69, 70) if x % 7]
    refl = max(abs(rgamma(x) * rgamma(1.0 - x) - math.sin(math.pi * x) / math.pi) for x in xs)
    checks.append(_check("specfun", "reflection 1/G(x) 1/G(1-x) = sin(pi x)/pi", refl, 1e-12))
    grid = [float(x) for x in np.linspace(0.5, 30.0, 120)]
    rec = max(abs(gamma_ratio(x, 1.0) / x - 1.0) for x in grid)
    rec = max(rec, max(abs(log_gamma(x + 1.0).value() / (x * log_gamma(x).value()) - 1.0) for x in grid))
    checks.append(_check("specfun", "recurrence G(x+1) = x G(x)", rec, 1e-13))
    kexp = max(abs(kummer_F(g, g, z) / math.exp(z) - 1.0) for g in (0.3, 1.3, 2.7) for z in np.linspace(0, 20, 41))
    checks.append(_check("specfun", "F(g, g, z) = exp(z)", kexp, 1e-12))
    # two-term small-z form: z^(g-1) G = G(g-1)/G(b) + G(1-g)/G(b-g+1) z^(g-1) + O(z)
    b, g = 0.8, 1.3
    worst = 0.0
    for z in (1e-6, 1e-7, 1e-8):
        lead = math.gamma(g - 1.0) / math.gamma(b) + math.gamma(1.0 - g) * rgamma(b - g + 1.0) * z ** (g - 1.0)
        worst = max(worst, abs(z ** (g - 1.0) * tricomi_G(b, g, z) / lead - 1.0))
    checks.append(_check("specfun", "small-z behaviour of G", worst, 1e-4))
    # large z: the 1/z correction of F ~ G(g)/G(b) e^z z^(b-g) has coefficient (1-b)(g-b)
    b, g = 0.6, 1.7
    worst = 0.0
    for z in (100.0, 200.0, 400.0):
        lead = math.exp(math.lgamma(g) - math.lgamma(b) + z + (b - g) * math.log(z))
        coeff = z * (kummer_F(b, g, z) / lead - 1.0)
        worst = max(worst, abs(coeff - (1.0 - b) * (g - b)) * z / 10.0)
    checks.append(_check("specfun", "large-z behaviour of F", worst, 1.0))
    worst = 0.0
    for z in (100.0, 200.0, 400.0):
        coeff = z * (z**b * tricomi_G(b, g, z) - 1.0)
        worst = max(worst, abs(coeff + b * (b - g + 1.0)) * z / 10.0)
    checks.append(_check("specfun", "large-z behaviour of G", worst, 1.0))
    return checks


# -- gap bound -------------------------------------------------------------------------------------


def gap_counts(sp: SecularParams, p: ModelParams, lambda_max: float) -> list[int]:
    """Critical eigenvalues (with multiplicity) in each open gap of the H^inf spectrum."""
    z_min = 0.5 - lambda_max / (2.0 * p.B)
    edges = sorted(r.z for r in hinf_roots(p.alpha, z_min, p.B))
    edges.append(math.inf)
    roots = find_roots(sp, p, z_min)
    counts = []
    for lo, hi in zip(edges, edges[1:]):
        counts.append(sum(r.multiplicity_hint for r in roots if lo + 1e-12 < r.z < hi - 1e-12))
    return counts


def suite_gaps(alpha: float = 0.3, B: float = 1.0, seed: int = 0, n: int = 100) -> list[Check]:
    p = ModelParams(alpha, B)
    rng = np.random.default_rng(seed)
    worst = 0
    failures = 0
    for _ in range(n):
        xi, eta, zeta = rng.uniform(-5.0, 5.0, 3)
        sp = SecularParams.of(float(xi), float(eta), abs(float(zeta)), alpha)
        try:
            worst = max(worst, max(gap_counts(sp, p, 15.0 * B)))
        except CountMismatchError:
            failures += 1
    return [
        _check("gaps", f"max eigenvalues per H-inf gap over {n} samples", float(worst), 2.0),
        _check("gaps", "root searches failed", float(failures), 0.0),
    ]


SUITES: dict[str, Callable[..., list[Check]]] = {
    "tables": suite_tables,
    "series": suite_series,
    "green": suite_green,
    "unitary": suite_unitary,
    "digamma": suite_digamma,
    "specfun": suite_specfun,
    "gaps": suite_gaps,
}


def run_suites(names: list[str], alpha: float = 0.3, B: float = 1.0) -> list[Check]:
    if "all" in names:
        names = list(SUITES)
    out = []
    for name in names:
        out.extend(SUITES[name](alpha=alpha, B=B))
    return out
