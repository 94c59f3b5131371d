"""Gamma-family functions, confluent hypergeometric functions and Laguerre
polynomials restricted to the argument ranges the flux model needs.

Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = [
    "PoleError",
    "SeriesCapError",
    "SignedLogGamma",
    "log_gamma",
    "rgamma",
    "rgamma_complex",
    "gamma_complex",
    "gamma_ratio",
    "polygamma",
    "kummer_F",
    "tricomi_G",
    "laguerre",
    "EULER_GAMMA",
    "ZETA3",
]

EULER_GAMMA = 0.57721566490153286061
ZETA3 = 1.2020569031595942854

KUMMER_MAX_TERMS = 10000
TRICOMI_ASYMPTOTIC_Z = 50.0


class PoleError(ArithmeticError):
    """Raised when a function is evaluated at one of its poles."""


class SeriesCapError(ArithmeticError):
    """Raised when a power series fails to converge within the term cap."""

    def __init__(self, message: str, tail: float):
        super().__init__(message)
        self.tail = tail


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _sinpi(x: float) -> float:
    # sin(pi x) with exact zeros at integers
    r = math.fmod(x, 2.0)
    if r == 0.0 or r == 1.0 or r == -1.0:
        return 0.0
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r > 0.5:
        return math.sin(math.pi * (1.0 - r))
    if r < -0.5:
        return -math.sin(math.pi * (1.0 + r))
    return math.sin(math.pi * r)


@dataclass(frozen=True)
class SignedLogGamma:
    """Gamma(x) stored as ``sign * exp(log_abs)``."""

    log_abs: float
    sign: int

    def value(self) -> float:
        return self.sign * math.exp(self.log_abs)


def log_gamma(x: float) -> SignedLogGamma:
    if _is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at x={x}")
    if x > 0 or math.floor(x) % 2 == 0:
        sign = 1
    else:
        sign = -1
    return SignedLogGamma(math.lgamma(x), sign)


def rgamma(x: float) -> float:
    """Reciprocal gamma function 1/Gamma(x).

    Entire in ``x``: returns exactly 0.0 at the non-positive integers and
    uses the reflection formula for negative arguments.
    """
    if x > 0:
        if x < 171.0:
            return 1.0 / math.gamma(x)
        lg = math.lgamma(x)
        return math.exp(-lg)
    if x == math.floor(x):
        return 0.0
    # 1/Gamma(x) = Gamma(1-x) sin(pi x)/pi
    y = 1.0 - x
    s = _sinpi(x)
    if y < 171.0:
        return math.gamma(y) * s / math.pi
    return math.copysign(math.exp(math.lgamma(y) + math.log(abs(s) / math.pi)), s)


# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_log_gamma(z: complex) -> complex:
    # valid for Re z >= 0.5
    z = z - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def gamma_complex(z: complex) -> complex:
    """Gamma(z) for complex z via the Lanczos approximation.

    Reflection handles Re z < 0.5. Raises PoleError at non-positive integers.
    """
    z = complex(z)
    if z.imag == 0.0 and _is_nonpositive_integer(z.real):
        raise PoleError(f"Gamma has a pole at z={z}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma_complex(1.0 - z))
    return cmath.exp(_lanczos_log_gamma(z))


def rgamma_complex(z: complex) -> complex:
    """1/Gamma(z) for complex z; exact zero at the non-positive integers."""
    z = complex(z)
    if z.imag == 0.0:
        return complex(rgamma(z.real))
    if z.real < 0.5:
        return cmath.sin(math.pi * z) / math.pi * gamma_complex(1.0 - z)
    return cmath.exp(-_lanczos_log_gamma(z))


_STIRLING_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)


def _stirling_tail(x: float) -> float:
    # log Gamma(x) - [(x - 1/2) log x - x + log sqrt(2 pi)] for x >= 10
    inv2 = 1.0 / (x * x)
    acc = 0.0
    for c in reversed(_STIRLING_COEF):
        acc = acc * inv2 + c
    return acc / x


def gamma_ratio(x: float, shift: float) -> float:
    """Gamma(x + shift) / Gamma(x) for real arguments.

    Poles of the numerator raise PoleError; poles of the denominator give
    an exact zero. Large positive ``x`` uses a Stirling difference so the
    ratio keeps full relative precision.
    """
    y = x + shift
    if _is_nonpositive_integer(y):
        raise PoleError(f"Gamma has a pole at {y}")
    if _is_nonpositive_integer(x):
        return 0.0
    if x >= 10.0 and y >= 10.0:
        log_ratio = (
            (y - 0.5) * math.log1p(shift / x)
            + shift * math.log(x)
            - shift
            + _stirling_tail(y)
            - _stirling_tail(x)
        )
        return math.exp(log_ratio)
    if 0 < x < 170.0 and 0 < y < 170.0:
        return math.gamma(y) / math.gamma(x)
    num = log_gamma(y)
    den = log_gamma(x)
    return num.sign * den.sign * math.exp(num.log_abs - den.log_abs)


# Bernoulli numbers B_2 ... B_16
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)
_POLYGAMMA_SHIFT = 12.0


def polygamma(k: int, x: float) -> float:
    """psi(x), psi'(x) or psi''(x) for k = 0, 1, 2.

    Recurrence moves the argument above 12, then the asymptotic expansion
    is summed. Works for negative non-integer arguments without reflection.
    """
    if k not in (0, 1, 2):
        raise ValueError("polygamma supports k in {0, 1, 2}")
    if _is_nonpositive_integer(x):
        raise PoleError(f"polygamma has a pole at x={x}")
    acc = 0.0
    while x < _POLYGAMMA_SHIFT:
        if k == 0:
            acc -= 1.0 / x
        elif k == 1:
            acc += 1.0 / (x * x)
        else:
            acc -= 2.0 / (x * x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    if k == 0:
        series = 0.0
        p = inv2
        for j, b in enumerate(_BERNOULLI, start=1):
            series += b / (2 * j) * p
            p *= inv2
        return acc + math.log(x) - 0.5 * inv - series
    if k == 1:
        series = 0.0
        p = inv2 * inv
        for b in _BERNOULLI:
            series += b * p
            p *= inv2
        return acc + inv + 0.5 * inv2 + series
    series = 0.0
    p = inv2 * inv2
    for j, b in enumerate(_BERNOULLI, start=1):
        series += (2 * j + 1) * b * p
        p *= inv2
    return acc - inv2 - inv2 * inv - series


def kummer_F(beta, gamma: float, z: float, max_terms: int = KUMMER_MAX_TERMS):
    """Kummer's confluent hypergeometric function F(beta, gamma, z) = 1F1.

    ``beta`` may be complex; ``z`` is real and non-negative. The series is
    summed until the tail falls below 1e-16 relative to the partial sum and
    terminates exactly when beta is a non-positive integer.
    """
    if _is_nonpositive_integer(gamma):
        raise PoleError(f"F is undefined for gamma={gamma}")
    if z < 0:
        raise ValueError("kummer_F requires z >= 0")
    is_complex = isinstance(beta, complex)
    total = 1.0 + 0.0j if is_complex else 1.0
    if z == 0.0:
        return total
    term = total
    for n in range(max_terms):
        term = term * (beta + n) * z / ((gamma + n) * (n + 1))
        total += term
        if term == 0:
            return total
        # tail check once terms are monotonically shrinking
        if abs(beta + n + 1) * z < abs(gamma + n + 1) * (n + 2) and abs(term) <= 1e-16 * abs(total):
            return total
    raise SeriesCapError(
        f"kummer_F({beta}, {gamma}, {z}) did not converge in {max_terms} terms",
        tail=abs(term) / max(abs(total), 1e-300),
    )


def _tricomi_asymptotic(beta, gamma: float, z: float, tol: float):
    # z^-beta * sum (beta)_n (beta-gamma+1)_n / n! (-z)^-n, stopped at the smallest term;
    # returns (value, relative size of the last retained term)
    a2 = beta - gamma + 1.0
    term = 1.0 + 0.0j if isinstance(beta, complex) else 1.0
    total = term
    last = abs(term)
    for n in range(400):
        nxt = term * (beta + n) * (a2 + n) / ((n + 1) * -z)
        if nxt == 0:
            return total * z ** (-beta), 0.0
        if abs(nxt) > last:
            break
        term = nxt
        total += term
        last = abs(term)
        if last <= tol * abs(total):
            break
    return total * z ** (-beta), last / abs(total)


def tricomi_G(beta, gamma: float, z: float):
    """Tricomi's confluent hypergeometric function G(beta, gamma, z) = U.

    Assembled from two Kummer series with reciprocal-gamma prefactors so
    non-positive integer ``beta`` gives a finite result. For z > 50 the
    asymptotic series in 1/z is used. Below that the asymptotic series is
    still preferred whenever its truncation error beats the cancellation
    error of the two-term combination.
    """
    if z <= 0:
        raise ValueError("tricomi_G requires z > 0")
    asym, asym_err = _tricomi_asymptotic(beta, gamma, z, 1e-16)
    if z > TRICOMI_ASYMPTOTIC_Z or asym_err <= 1e-15:
        return asym
    rg = rgamma_complex if isinstance(beta, complex) else rgamma
    first = 0.0
    c1 = rg(beta - gamma + 1.0)
    if c1 != 0:
        first = math.gamma(1.0 - gamma) * c1 * kummer_F(beta, gamma, z)
    second = 0.0
    c2 = rg(beta)
    if c2 != 0:
        second = (
            math.gamma(gamma - 1.0)
            * c2
            * z ** (1.0 - gamma)
            * kummer_F(beta - gamma + 1.0, 2.0 - gamma, z)
        )
    total = first + second
    if total == 0:
        return total
    cancel_err = 1e-16 * max(abs(first), abs(second)) / abs(total)
    if asym_err < cancel_err:
        return asym
    return total


def laguerre(n: int, sigma: float, z: float) -> float:
    """Generalized Laguerre polynomial L_n^sigma(z) by three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    prev = 1.0
    if n == 0:
        return prev
    cur = 1.0 + sigma - z
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + sigma - z) * cur - (k + sigma) * prev) / (k + 1)
    return cur
