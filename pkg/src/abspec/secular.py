"""Secular equation of the two critical sectors.

In the variable z = 1/2 - lambda/(2B) the critical-sector eigenvalues are the
roots of

    1/(G(z)G(z+a)) + xi/(G(z+a-1)G(z+a)) + eta/G(z)^2
        + (xi*eta - zeta^2)/(G(z)G(z+a-1)) = 0,

with G the gamma function. The roots of the extension with Phi_2(psi) = 0
(``hinf_roots``) split the real line into intervals, and the number of
roots in each interval is known in closed form from the signs of
(xi, eta, zeta^2 - xi*eta). ``find_roots`` brackets the roots interval by
interval and checks the count against that table.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

from scipy.optimize import brentq, minimize_scalar

from .abmodel import ModelParams
from .extensions import RescaledBC
from .specfun import EULER_GAMMA, ZETA3, gamma_ratio, polygamma, rgamma

log = logging.getLogger(__name__)

__all__ = [
    "SecularParams",
    "IntervalKind",
    "RootInterval",
    "Origin",
    "Root",
    "CountMismatchError",
    "RootOutOfRangeError",
    "DeterminantZeroError",
    "f_ratio",
    "secular_eval",
    "secular_factored",
    "secular_eval_inverted",
    "interval_root_count",
    "root_intervals",
    "endpoint_roots",
    "find_roots",
    "hinf_roots",
    "invert_params",
    "series_root",
    "Branch",
]

SCAN_POINTS_PER_UNIT = 64
SCAN_REFINEMENTS = 3
DOUBLE_ROOT_TOL = 1e-7
ENDPOINT_TOL = 1e-12
BOUNDARY_TOL = 1e-12
TOP_CAP = 1e300


class CountMismatchError(RuntimeError):
    """Bracketing found a different number of roots than the table predicts."""

    def __init__(self, message: str, interval: "RootInterval", found: int):
        super().__init__(message)
        self.interval = interval
        self.found = found


class RootOutOfRangeError(CountMismatchError):
    """A top-interval root lies beyond TOP_CAP, outside double range."""


class DeterminantZeroError(ZeroDivisionError):
    """xi*eta - zeta^2 vanishes, so the parameters cannot be inverted."""


@dataclass(frozen=True)
class SecularParams:
    rbc: RescaledBC
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in ]0,1[")
        # parameters within ENDPOINT_TOL of an endpoint-root condition are put
        # exactly on it, so the tables, the evaluation and endpoint_roots agree
        xi, eta = self.rbc.xi, self.rbc.eta
        g1 = math.gamma(1.0 - self.alpha)
        if abs(xi) <= ENDPOINT_TOL:
            xi = 0.0
        if abs(eta) <= ENDPOINT_TOL:
            eta = 0.0
        elif abs(eta + g1) <= ENDPOINT_TOL * max(1.0, abs(eta)):
            eta = -g1
        if (xi, eta) != (self.rbc.xi, self.rbc.eta):
            object.__setattr__(self, "rbc", RescaledBC(xi, eta, self.rbc.zeta))

    @classmethod
    def of(cls, xi: float, eta: float, zeta: float, alpha: float) -> "SecularParams":
        return cls(RescaledBC(xi, eta, zeta), alpha)

    @property
    def xi(self) -> float:
        return self.rbc.xi

    @property
    def eta(self) -> float:
        return self.rbc.eta

    @property
    def zeta(self) -> float:
        return self.rbc.zeta

    @property
    def det(self) -> float:
        """xi*eta - zeta^2, snapped to 0 when it is rounding noise."""
        prod, z2 = self.xi * self.eta, self.zeta * self.zeta
        d = prod - z2
        if abs(d) <= BOUNDARY_TOL * max(abs(prod), z2):
            return 0.0
        return d


class IntervalKind(enum.Enum):
    TOP = "top"                # ]1-a, inf[
    UPPER_GAP = "upper_gap"    # ]-m, 1-a-m[
    LOWER_GAP_A = "lower_gap_a"  # ]-a-m, -m[
    LOWER_GAP_B = "lower_gap_b"  # ]-1-m, -a-m[


@dataclass(frozen=True)
class RootInterval:
    kind: IntervalKind
    m: int
    lo: float
    hi: float
    predicted_count: int

    @staticmethod
    def bounds(kind: IntervalKind, m: int, alpha: float) -> tuple[float, float]:
        if kind is IntervalKind.TOP:
            return 1.0 - alpha, math.inf
        if kind is IntervalKind.UPPER_GAP:
            return float(-m), 1.0 - alpha - m
        if kind is IntervalKind.LOWER_GAP_A:
            return -alpha - m, float(-m)
        return -1.0 - m, -alpha - m


class Origin(enum.Enum):
    INTERIOR = "interior"
    ENDPOINT = "endpoint"


@dataclass(frozen=True)
class Root:
    z: float
    lam: float
    multiplicity_hint: int = 1
    origin: Origin = Origin.INTERIOR

    @classmethod
    def at(cls, z: float, B: float, **kw) -> "Root":
        return cls(z, B * (1.0 - 2.0 * z), **kw)


# -- function evaluation ----------------------------------------------------


def f_ratio(alpha: float, z: float) -> float:
    """Gamma(z - 1 + alpha) / Gamma(z); exact zero at z = 0, -1, -2, ..."""
    return gamma_ratio(z, alpha - 1.0)


def _f_tilde(alpha: float, z: float) -> float:
    # Gamma(z)/Gamma(z + alpha); zero at z = -alpha - m
    return f_ratio(1.0 - alpha, z + alpha)


def secular_eval(z: float, sp: SecularParams) -> float:
    """Left-hand side of the secular equation; entire in z."""
    a = sp.alpha
    r0 = rgamma(z)
    ra = rgamma(z + a)
    ra1 = rgamma(z + a - 1.0)
    xi, eta = sp.xi, sp.eta
    return r0 * ra + xi * ra1 * ra + eta * r0 * r0 + sp.det * r0 * ra1


def secular_factored(z: float, sp: SecularParams) -> float:
    """(F_a(z) + xi)(F_{1-a}(z + a) + eta) - zeta^2.

    Equals ``secular_eval`` times Gamma(z)Gamma(z+a-1), so the two share
    their zeros away from the lattice -Z+ and 1 - a - Z+, where this form
    has poles.
    """
    a = sp.alpha
    f1 = f_ratio(a, z)
    f2 = _f_tilde(a, z)
    # expanded so the constant term is the snapped determinant
    return f1 * f2 + sp.xi * f2 + sp.eta * f1 + sp.det


def secular_eval_inverted(z: float, primed: RescaledBC, alpha: float) -> float:
    """Secular equation rewritten for the inverted parameters (xi', eta', zeta')."""
    r0 = rgamma(z)
    ra = rgamma(z + alpha)
    ra1 = rgamma(z + alpha - 1.0)
    det = primed.xi * primed.eta - primed.zeta**2
    return det * r0 * ra + primed.xi * ra1 * ra + primed.eta * r0 * r0 + r0 * ra1


def invert_params(rbc: RescaledBC) -> RescaledBC:
    det = rbc.xi * rbc.eta - rbc.zeta**2
    if abs(det) <= 1e-13:
        raise DeterminantZeroError("xi*eta - zeta^2 = 0")
    zeta = rbc.zeta / det
    # zeta enters only squared; keep the modulus
    return RescaledBC(rbc.xi / det, rbc.eta / det, abs(zeta))


# -- localization tables ----------------------------------------------------


def interval_root_count(kind: IntervalKind, sp: SecularParams, m: int = 0) -> int:
    """Number of roots strictly inside the interval of the given kind."""
    xi, eta = sp.xi, sp.eta
    det = sp.det  # xi*eta - zeta^2
    g1 = math.gamma(1.0 - sp.alpha)
    if kind is IntervalKind.TOP:
        if xi >= 0:
            if eta >= 0:
                return 1 if det < 0 else 0
            return 1 if eta > -g1 else 0
        if eta >= 0:
            return 1
        if eta > -g1:
            return 1 if det <= 0 else 2
        return 0 if det <= 0 else 1
    if kind is IntervalKind.UPPER_GAP:
        if m > 0:
            # ]-m, 1-a-m[ is the interval ]-1-(m-1), -a-(m-1)[
            return interval_root_count(IntervalKind.LOWER_GAP_B, sp, m - 1)
        if xi <= 0:
            return 0 if eta >= -g1 else 1
        return 1 if eta >= -g1 else 2
    if kind is IntervalKind.LOWER_GAP_A:
        if xi >= 0:
            return 0 if eta <= 0 else 1
        return 1 if eta <= 0 else 2
    if xi <= 0:
        return 0 if eta >= 0 else 1
    return 1 if eta >= 0 else 2


def root_intervals(sp: SecularParams, z_min: float) -> list[RootInterval]:
    """Localization intervals that reach above z_min, top first."""
    a = sp.alpha
    out = []

    def add(kind, m):
        lo, hi = RootInterval.bounds(kind, m, a)
        out.append(RootInterval(kind, m, lo, hi, interval_root_count(kind, sp, m)))

    add(IntervalKind.TOP, 0)
    add(IntervalKind.UPPER_GAP, 0)
    m = 0
    while True:
        if -float(m) <= z_min:
            break
        add(IntervalKind.LOWER_GAP_A, m)
        if -a - m <= z_min:
            break
        add(IntervalKind.LOWER_GAP_B, m)
        m += 1
    return out


def endpoint_roots(sp: SecularParams, p: ModelParams, z_min: float) -> list[Root]:
    """Roots sitting exactly on the interval lattice."""
    a = sp.alpha
    out = []
    if abs(sp.eta + math.gamma(1.0 - a)) <= ENDPOINT_TOL * max(1.0, abs(sp.eta)):
        if 1.0 - a >= z_min:
            out.append(Root.at(1.0 - a, p.B, origin=Origin.ENDPOINT))
    m = 0
    while -m >= z_min or -a - m >= z_min:
        if abs(sp.xi) <= ENDPOINT_TOL and -m >= z_min:
            out.append(Root.at(float(-m), p.B, origin=Origin.ENDPOINT))
        if abs(sp.eta) <= ENDPOINT_TOL and -a - m >= z_min:
            out.append(Root.at(-a - m, p.B, origin=Origin.ENDPOINT))
        m += 1
    return out


# -- bracketing ---------------------------------------------------------------


def _interior_grid(lo: float, hi: float, density: int) -> list[float]:
    length = hi - lo
    n = max(16, int(math.ceil(density * length)))
    pts = [lo + 0.5 * length * (1.0 - math.cos(math.pi * k / n)) for k in range(1, n)]
    for j in range(2, 13):
        d = length * 10.0**-j
        pts.append(lo + d)
        pts.append(hi - d)
    return sorted(p for p in set(pts) if lo < p < hi)


def _top_log_scale(sp: SecularParams) -> float:
    """Log of the largest scale at which a top-interval root can sit.

    For large z the factored form behaves like
    1/z + xi z^-a + eta z^(a-1) + (xi eta - zeta^2); beyond every scale at
    which two of these terms balance one of them dominates, so no sign
    change is left. Scales are compared in log space since small
    parameters push them far out (z ~ |eta|^(-1/a)).
    """
    a = sp.alpha
    lx = math.log(abs(sp.xi)) if sp.xi else None
    le = math.log(abs(sp.eta)) if sp.eta else None
    det = abs(sp.det)
    ld = math.log(det) if det else None
    logs = [math.log(1.0 - a + 10.0)]
    if sp.zeta:
        logs.append(math.log(2.0) - 2.0 * math.log(sp.zeta))
    if lx is not None:
        logs.append(-lx / (1.0 - a))
        if ld is not None:
            logs.append((lx - ld) / a)
    if le is not None:
        logs.append(-le / a)
        if ld is not None:
            logs.append((le - ld) / (1.0 - a))
    if ld is not None:
        logs.append(-ld)
    if lx is not None and le is not None and a != 0.5:
        logs.append((le - lx) / (1.0 - 2.0 * a))
    return max(logs)


def _top_upper_start(sp: SecularParams) -> float:
    return math.exp(min(_top_log_scale(sp) + math.log(100.0), math.log(TOP_CAP)))


def _top_grid(lo: float, z_hi: float, density: int) -> list[float]:
    pts = [lo + 10.0**-j for j in range(1, 13)]
    linear_end = min(z_hi, lo + 10.0)
    n = int(math.ceil(density * (linear_end - lo)))
    pts += [lo + (linear_end - lo) * k / n for k in range(1, n + 1)]
    if z_hi > linear_end:
        decades = math.log10(z_hi / linear_end)
        n_log = max(1, int(math.ceil(density * decades)))
        pts += [linear_end * 10.0 ** (decades * k / n_log) for k in range(1, n_log + 1)]
    return sorted(p for p in set(pts) if p > lo)


def _pole_weight(e: float, sp: SecularParams) -> float:
    """K with secular_factored(z) ~ K/(z - e) near the lattice point e.

    Poles of F_a sit at 1-a-n with residue (-1)^n/(n! G(1-a-n)) and
    coefficient F~(e) + eta; poles of F~ sit at -n with residue
    (-1)^n/(n! G(a-n)) and coefficient F_a(-n) + xi = xi. K = 0 means h is
    regular there (an endpoint root).
    """
    a = sp.alpha
    n = round(-e)
    if abs(e + n) < 0.5 * min(a, 1.0 - a):
        res = (-1.0) ** n / math.factorial(n) * rgamma(a - n)
        return sp.xi * res
    n = round(1.0 - a - e)
    res = (-1.0) ** n / math.factorial(n) * rgamma(1.0 - a - n)
    return (sp.eta + (math.gamma(1.0 - a) if n == 0 else 0.0)) * res


def _edge_roots(f, sp: SecularParams, edge: float, inner: float, side: int) -> list[float]:
    """Root between the pole ``edge`` and the first grid point ``inner``.

    ``side`` is +1 when the interval lies above the edge. The one-sided sign
    of f at the pole comes from the residue; when the root sits closer to the
    pole than one ulp it is reported at the adjacent float.
    """
    k = _pole_weight(edge, sp)
    f_in = f(inner)
    if k == 0.0 or math.isnan(f_in) or f_in == 0.0:
        return []
    s_edge = math.copysign(1.0, k) * side
    if not _opposite(s_edge, f_in):
        return []
    near = math.nextafter(edge, inner)
    f_near = f(near)
    if math.isnan(f_near) or _opposite(s_edge, f_near):
        return [near]
    if f_near == 0.0:
        return [near]
    return [brentq(f, near, inner, xtol=1e-15, rtol=1e-15, maxiter=200)]


def _safe_factored(z: float, sp: SecularParams) -> float:
    try:
        return secular_factored(z, sp)
    except (ArithmeticError, OverflowError):
        return math.nan


def _opposite(a: float, b: float) -> bool:
    # compare signs directly; a*b underflows for tiny values at large z
    return (a < 0.0 < b) or (b < 0.0 < a)


def _bracket(f, pts: list[float]) -> tuple[list[float], list[tuple[float, float]]]:
    roots = []
    vals = [f(x) for x in pts]
    for (x0, f0), (x1, f1) in zip(zip(pts, vals), zip(pts[1:], vals[1:])):
        if math.isnan(f0) or math.isnan(f1):
            continue
        if f0 == 0.0:
            roots.append(x0)
        elif _opposite(f0, f1):
            roots.append(brentq(f, x0, x1, xtol=1e-15, rtol=1e-15, maxiter=200))
    if vals and vals[-1] == 0.0:
        roots.append(pts[-1])
    # candidate tangent pairs: interior local minima of |f| without a sign change
    minima = []
    for i in range(1, len(vals) - 1):
        v0, v1, v2 = abs(vals[i - 1]), abs(vals[i]), abs(vals[i + 1])
        if v1 < v0 and v1 < v2 and vals[i] != 0.0 and not _opposite(vals[i - 1], vals[i]) \
                and not _opposite(vals[i], vals[i + 1]):
            minima.append((pts[i - 1], pts[i + 1]))
    return roots, minima


def _tangent_roots(f, minima) -> list[float]:
    """Roots hidden between grid points where f dips toward zero.

    The extremum of f inside each bracket either crosses zero (two close
    simple roots, bracketed on each side) or touches it (a double root,
    returned twice).
    """
    out = []
    for a, b in minima:
        fa, fb = f(a), f(b)
        s = 1.0 if fa > 0 else -1.0
        res = minimize_scalar(lambda x: s * f(x), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-15 * max(1.0, abs(a))})
        x = float(res.x)
        fx = f(x)
        if s * fx < 0:
            out.append(brentq(f, a, x, xtol=1e-15, rtol=1e-15))
            out.append(brentq(f, x, b, xtol=1e-15, rtol=1e-15))
        elif abs(fx) <= 1e-10 * max(abs(fa), abs(fb)):
            out.extend([x, x])
    return out


def _merge(roots: list[float]) -> list[tuple[float, int]]:
    roots = sorted(roots)
    merged: list[tuple[float, int]] = []
    for r in roots:
        if merged and abs(r - merged[-1][0]) <= DOUBLE_ROOT_TOL:
            z0, k = merged[-1]
            merged[-1] = ((z0 * k + r) / (k + 1), k + 1)
        else:
            merged.append((r, 1))
    return merged


@dataclass
class IntervalResult:
    interval: RootInterval
    roots: list[tuple[float, int]] = field(default_factory=list)
    complete: bool = True  # False when z_min truncates the interval

    @property
    def found(self) -> int:
        return sum(k for _, k in self.roots)


def _solve_interval(iv: RootInterval, sp: SecularParams, z_min: float) -> IntervalResult:
    f = lambda z: _safe_factored(z, sp)  # noqa: E731
    lo = iv.lo
    complete = lo >= z_min
    if iv.kind is IntervalKind.TOP:
        z_hi = _top_upper_start(sp)
    else:
        z_hi = iv.hi
    found: list[tuple[float, int]] = []
    for attempt in range(SCAN_REFINEMENTS + 1):
        density = SCAN_POINTS_PER_UNIT * 4**attempt
        if iv.kind is IntervalKind.TOP:
            pts = _top_grid(lo, z_hi, density)
        else:
            pts = _interior_grid(max(lo, z_min) if not complete else lo, iv.hi, density)
            if not complete:
                pts = [z_min] + pts
        roots, minima = _bracket(f, pts)
        if complete and pts:
            roots += _edge_roots(f, sp, lo, pts[0], +1)
        if iv.kind is not IntervalKind.TOP and pts:
            roots += _edge_roots(f, sp, iv.hi, pts[-1], -1)
        if complete and sum(1 for _ in roots) < iv.predicted_count and minima:
            roots += _tangent_roots(f, minima)
        found = _merge([r for r in roots if r >= z_min])
        if not complete or sum(k for _, k in found) == iv.predicted_count:
            return IntervalResult(iv, found, complete)
        log.debug("interval %s: found %d of %d roots, refining", iv, len(found), iv.predicted_count)
        if iv.kind is IntervalKind.TOP:
            z_hi = min(z_hi * 1e4, TOP_CAP)
    if iv.kind is IntervalKind.TOP and _top_log_scale(sp) > math.log(TOP_CAP):
        raise RootOutOfRangeError(
            f"top interval: table predicts {iv.predicted_count} roots but the balance scale "
            f"z ~ 1e{_top_log_scale(sp) / math.log(10.0):.0f} exceeds {TOP_CAP:g}",
            iv,
            sum(k for _, k in found),
        )
    raise CountMismatchError(
        f"{iv.kind.value}(m={iv.m}) ]{iv.lo}, {iv.hi}[: found "
        f"{sum(k for _, k in found)} roots, table predicts {iv.predicted_count}",
        iv,
        sum(k for _, k in found),
    )


def localize(sp: SecularParams, z_min: float) -> list[IntervalResult]:
    """Roots of every localization interval reaching above z_min."""
    return [_solve_interval(iv, sp, z_min) for iv in root_intervals(sp, z_min)]


def find_roots(sp: SecularParams, p: ModelParams, z_min: float) -> list[Root]:
    """All roots z >= z_min of the secular equation, sorted by decreasing z.

    Interior roots come from bracketing inside the localization intervals
    and are checked against the table counts; lattice roots are appended
    from their closed-form conditions.
    """
    if not z_min < 1.0 - sp.alpha:
        raise ValueError("z_min must lie below 1 - alpha")
    roots = []
    for res in localize(sp, z_min):
        for z, k in res.roots:
            roots.append(Root.at(z, p.B, multiplicity_hint=k))
    roots.extend(endpoint_roots(sp, p, z_min))
    roots.sort(key=lambda r: -r.z)
    return roots


def hinf_roots(alpha: float, z_min: float, B: float = 1.0) -> list[Root]:
    """Roots of 1/(Gamma(z)Gamma(z+alpha-1)) = 0 above z_min."""
    zs = []
    m = 0
    while 1.0 - alpha - m >= z_min:
        zs.append(1.0 - alpha - m)
        if -m >= z_min:
            zs.append(float(-m))
        m += 1
    zs.sort(reverse=True)
    return [Root.at(z, B, origin=Origin.ENDPOINT) for z in zs]


# -- perturbative branches ---------------------------------------------------


class Branch(enum.Enum):
    Z1 = "z1"  # through -m, driven by xi
    Z2 = "z2"  # through -alpha-m, driven by eta


def _harmonic(m: int, power: int) -> float:
    return math.fsum(1.0 / j**power for j in range(1, m + 1))


def _h0(m: int, x: float) -> float:
    return _harmonic(m, 1) - EULER_GAMMA - polygamma(0, x)


def _h1(m: int, x: float) -> float:
    return math.pi**2 / 6.0 + _harmonic(m, 2) - polygamma(1, x)


def _h2(m: int, x: float) -> float:
    return -2.0 * ZETA3 + 2.0 * _harmonic(m, 3) - polygamma(2, x)


def series_root(branch: Branch, m: int, sp: SecularParams) -> float:
    """Degree-4 Taylor polynomial of the root branch through -m or -alpha-m.

    The quartic coefficient is (4 h0 (4 h0^2 + 3 h1) + h2) / (6 c^4), which
    is what inverting z -> (z+m) exp(-h0 e - h1 e^2/2 - h2 e^3/6) gives.
    """
    a = sp.alpha
    zeta2 = sp.zeta**2
    if branch is Branch.Z1:
        x = -1.0 - m + a
        base = float(-m)
        t = sp.xi
        mixed_lin = 1.0 + m - a
        mixed_const = 3.0
        h0_mixed = _h0(m, -m + a)
    else:
        x = -m - a
        base = -a - m
        t = sp.eta
        mixed_lin = m + 1.0
        mixed_const = 1.0
        h0_mixed = _h0(m, -m - a)
    c = math.factorial(m) / rgamma(x)  # m! Gamma(x)
    sign = -1.0 if m % 2 == 0 else 1.0  # (-1)^(m+1)
    h0, h1, h2 = _h0(m, x), _h1(m, x), _h2(m, x)
    return (
        base
        + sign / c * t
        + h0 / c**2 * t**2
        + sign * (3.0 * h0**2 + h1) / (2.0 * c**3) * t**3
        - sign * mixed_lin / c * t * zeta2
        + (4.0 * h0 * (4.0 * h0**2 + 3.0 * h1) + h2) / (6.0 * c**4) * t**4
        + (mixed_const - 2.0 * mixed_lin * h0_mixed) / c**2 * t**2 * zeta2
    )
