"""Self-adjoint extensions of the minimal operator.

Extensions on the dense chart are labelled by a 2x2 matrix
``Lambda = [[u, alpha conj(w)], [(1 - alpha) w, v]]`` acting in the boundary
condition Phi_1(psi) = Lambda Phi_2(psi); the full family is labelled by a
2x2 unitary U in the orthonormal deficiency bases. This module converts
between the two and provides the coefficients both pictures are built from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .abmodel import ModelParams
from .specfun import rgamma_complex

__all__ = [
    "BoundaryCondition",
    "RescaledBC",
    "ExtensionUnitary",
    "ChartBoundaryError",
    "ConditioningError",
    "rescale",
    "norm_constants",
    "boundary_coeffs",
    "deficiency_coeffs",
    "DeficiencyCoeffs",
    "phi_blocks",
    "j_matrix",
    "lambda_from_unitary",
    "unitary_from_lambda",
    "ab_unitary",
    "random_unitary",
    "CONDITION_LIMIT",
    "j_identity_residual",
    "det_relation_residuals",
]

CONDITION_LIMIT = 1e12


class ChartBoundaryError(ArithmeticError):
    """The extension has no Lambda description (singular Phi_2 combination)."""


class ConditioningError(ArithmeticError):
    """A matrix that must be inverted is numerically singular."""


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary-condition parameters u, v real and w complex."""

    u: float = 0.0
    v: float = 0.0
    w: complex = 0j

    def matrix(self, alpha: float) -> np.ndarray:
        w = complex(self.w)
        return np.array(
            [[self.u, alpha * w.conjugate()], [(1.0 - alpha) * w, self.v]], dtype=complex
        )

    @classmethod
    def from_matrix(cls, lam: np.ndarray, alpha: float) -> "BoundaryCondition":
        # Lambda_21 = (1-alpha) w fixes w; diagonal entries are real up to rounding
        return cls(float(lam[0, 0].real), float(lam[1, 1].real), complex(lam[1, 0]) / (1.0 - alpha))

    def d_residual(self, alpha: float) -> float:
        """max |D Lambda - Lambda^* D| for D = diag(1 - alpha, alpha)."""
        lam = self.matrix(alpha)
        d = np.diag([1.0 - alpha, alpha])
        return float(np.max(np.abs(d @ lam - lam.conj().T @ d)))


@dataclass(frozen=True)
class RescaledBC:
    """Dimensionless secular-equation parameters (xi, eta, zeta)."""

    xi: float
    eta: float
    zeta: float

    def __post_init__(self):
        if self.zeta < 0:
            raise ValueError("zeta is a modulus and must be non-negative")


@dataclass(frozen=True, eq=False)
class ExtensionUnitary:
    U: np.ndarray

    def unitarity_residual(self) -> float:
        return float(np.max(np.abs(self.U.conj().T @ self.U - np.eye(2))))


def rescale(bc: BoundaryCondition, p: ModelParams) -> RescaledBC:
    a, half_b = p.alpha, 0.5 * p.B
    xi = half_b ** (1.0 - a) * math.gamma(a) / math.gamma(2.0 - a) * bc.u
    eta = half_b**a * math.gamma(1.0 - a) / math.gamma(1.0 + a) * bc.v
    return RescaledBC(xi, eta, math.sqrt(half_b) * abs(complex(bc.w)))


def norm_constants(p: ModelParams) -> tuple[float, float]:
    """Normalization constants (N_{-1}, N_0) of the deficiency basis."""
    a, B = p.alpha, p.B
    s = 0.5j / B
    common = math.sqrt(math.sin(math.pi * a) / (2.0 * math.pi))
    im_m1 = (rgamma_complex(-0.5 + a + s) * rgamma_complex(0.5 - s)).imag
    im_0 = (rgamma_complex(0.5 + s) * rgamma_complex(0.5 + a - s)).imag
    if im_m1 <= 0 or im_0 <= 0:
        raise ArithmeticError(f"non-positive normalization integral ({im_m1}, {im_0})")
    n_m1 = (0.5 * B) ** (0.5 * (1.0 - a)) * common / math.sqrt(im_m1)
    n_0 = (0.5 * B) ** (0.5 * a) * common / math.sqrt(im_0)
    return n_m1, n_0


def boundary_coeffs(lam, p: ModelParams):
    """Origin coefficients (a_{-1}, b_{-1}, a_0, b_0) of the decaying solutions.

    For real ``lam`` the results are real floats; complex ``lam`` (e.g.
    +-i for the deficiency subspaces) gives complex values.
    """
    a, half_b = p.alpha, 0.5 * p.B
    x = 0.5 - lam / (2.0 * p.B)
    r_half = rgamma_complex(x)
    a_m1 = math.gamma(1.0 - a) * r_half * half_b ** (-1.0 + a)
    b_m1 = math.gamma(-1.0 + a) * rgamma_complex(x - 1.0 + a)
    a_0 = math.gamma(a) * rgamma_complex(x + a) * half_b ** (-a)
    b_0 = math.gamma(-a) * r_half
    out = (a_m1, b_m1, a_0, b_0)
    if isinstance(lam, complex):
        return out
    return tuple(float(c.real) for c in out)


@dataclass(frozen=True)
class DeficiencyCoeffs:
    """a_{m,+-}, b_{m,+-} for m = -1, 0 with the matrices M_m."""

    a_m1: tuple[complex, complex]
    b_m1: tuple[complex, complex]
    a_0: tuple[complex, complex]
    b_0: tuple[complex, complex]

    def M(self, m: int) -> np.ndarray:
        if m == -1:
            a, b = self.a_m1, self.b_m1
        elif m == 0:
            a, b = self.a_0, self.b_0
        else:
            raise ValueError("only the critical sectors m = -1, 0 carry M_m")
        return np.array([[a[0], b[0]], [a[1], b[1]]], dtype=complex)

    @property
    def det_M_m1(self) -> complex:
        return complex(np.linalg.det(self.M(-1)))

    @property
    def det_M_0(self) -> complex:
        return complex(np.linalg.det(self.M(0)))


def deficiency_coeffs(p: ModelParams) -> DeficiencyCoeffs:
    plus = boundary_coeffs(1j, p)
    minus = boundary_coeffs(-1j, p)
    return DeficiencyCoeffs(
        a_m1=(plus[0], minus[0]),
        b_m1=(plus[1], minus[1]),
        a_0=(plus[2], minus[2]),
        b_0=(plus[3], minus[3]),
    )


def phi_blocks(p: ModelParams):
    """The diagonal matrices Phi_{1,+}, Phi_{1,-}, Phi_{2,+}, Phi_{2,-}."""
    n_m1, n_0 = norm_constants(p)
    c = deficiency_coeffs(p)
    phi1p = np.diag([n_m1 * c.a_m1[0], n_0 * c.a_0[0]])
    phi1m = np.diag([n_m1 * c.a_m1[1], n_0 * c.a_0[1]])
    phi2p = np.diag([n_m1 * c.b_m1[0], n_0 * c.b_0[0]])
    phi2m = np.diag([n_m1 * c.b_m1[1], n_0 * c.b_0[1]])
    return phi1p, phi1m, phi2p, phi2m


def j_matrix(p: ModelParams) -> np.ndarray:
    phi1p, phi1m, phi2p, phi2m = phi_blocks(p)
    return np.block([[phi1p, phi1m], [phi2p, phi2m]])


def _cond(mat: np.ndarray) -> float:
    try:
        return float(np.linalg.cond(mat))
    except np.linalg.LinAlgError:
        return math.inf


def lambda_from_unitary(ext: ExtensionUnitary, p: ModelParams) -> BoundaryCondition:
    """Lambda = (Phi_{1,+} + Phi_{1,-} U)(Phi_{2,+} + Phi_{2,-} U)^{-1}."""
    phi1p, phi1m, phi2p, phi2m = phi_blocks(p)
    U = np.asarray(ext.U, dtype=complex)
    lower = phi2p + phi2m @ U
    if _cond(lower) > CONDITION_LIMIT:
        raise ChartBoundaryError("U lies outside the Lambda chart")
    lam = (phi1p + phi1m @ U) @ np.linalg.inv(lower)
    return BoundaryCondition.from_matrix(lam, p.alpha)


def unitary_from_lambda(bc: BoundaryCondition, p: ModelParams) -> ExtensionUnitary:
    """U = V_+ V_-^{-1} with V_+- = -+ i D (Phi_{2,+-} Lambda - Phi_{1,+-})."""
    phi1p, phi1m, phi2p, phi2m = phi_blocks(p)
    d = np.diag([1.0 - p.alpha, p.alpha])
    lam = bc.matrix(p.alpha)
    v_plus = -1j * d @ (phi2p @ lam - phi1p)
    v_minus = 1j * d @ (phi2m @ lam - phi1m)
    if _cond(v_minus) > CONDITION_LIMIT:
        raise ConditioningError("V_- is numerically singular")
    return ExtensionUnitary(v_plus @ np.linalg.inv(v_minus))


def ab_unitary(p: ModelParams) -> ExtensionUnitary:
    """The diagonal unitary of the standard Hamiltonian (Lambda = 0)."""
    s = 0.5j / p.B
    a = p.alpha
    # -Gamma(x + s)/Gamma(x - s) written with reciprocal gammas
    d1 = -rgamma_complex(0.5 - s) / rgamma_complex(0.5 + s)
    d2 = -rgamma_complex(0.5 + a - s) / rgamma_complex(0.5 + a + s)
    return ExtensionUnitary(np.diag([d1, d2]))


def random_unitary(rng: np.random.Generator) -> ExtensionUnitary:
    """Haar-distributed 2x2 unitary from a QR factorization."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return ExtensionUnitary(q * phases)


def j_identity_residual(p: ModelParams) -> float:
    """max |J^* [[0, D], [-D, 0]] J - i diag(I, -I)|."""
    J = j_matrix(p)
    d = np.diag([1.0 - p.alpha, p.alpha])
    z = np.zeros((2, 2))
    form = np.block([[z, d], [-d, z]])
    target = 1j * np.diag([1.0, 1.0, -1.0, -1.0])
    return float(np.max(np.abs(J.conj().T @ form @ J - target)))


def det_relation_residuals(p: ModelParams) -> tuple[float, float]:
    """Relative deviations of det M_{-1}, det M_0 from -i N^-2 / (1-alpha), -i N^-2 / alpha."""
    n_m1, n_0 = norm_constants(p)
    c = deficiency_coeffs(p)
    t_m1 = -1j / (n_m1**2 * (1.0 - p.alpha))
    t_0 = -1j / (n_0**2 * p.alpha)
    return abs(c.det_M_m1 - t_m1) / abs(t_m1), abs(c.det_M_0 - t_0) / abs(t_0)
