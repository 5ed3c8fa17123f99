"""Existence of a left factorization given the data of a right one.

Let ``Q`` be the stabilizing solution of ``ricc1`` with closed-loop operators
``ap_c`` (stable) and ``am_c`` (stable and, with ``R(0)`` invertible,
invertible).  In the coordinates of :func:`stable_to_dichotomous`,
``[[I, Q], [0, I]]`` brings ``Ax`` to lower block triangular form

    ``[[am_c^{-1}, 0], [bp R(0)^{-1} gm am^{-1}, ap_c]]``

and the Sylvester equation ``Z am_c^{-1} - ap_c Z = -bp R(0)^{-1} gm am^{-1}``
removes the off-diagonal block.  The anti-stable subspace of ``Ax`` is then
``Im [I - Q Z; -Z]``, and a left factorization exists iff ``I - Q Z`` is
invertible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_TOL,
    Tolerances,
    WienerHopfError,
    norm2,
    rcond,
    solve_sylvester,
)
from .representation import StableRepresentation, a_cross, stable_to_dichotomous
from .riccati import (
    RiccatiCertificate,
    alpha_minus_circ_inv_formula,
    r0_invertible,
    r0_matrix,
)

__all__ = [
    "LeftRightPreconditionError",
    "LeftRightReport",
    "BlockDiagonalization",
    "MARGINAL_FACTOR",
    "lyapunov_z",
    "lyapunov_residual",
    "left_exists_given_right",
    "block_diagonalize",
    "angular_identity_residual",
    "upper_triangular_residual",
]

# rcond within this factor of the threshold is reported as marginal
MARGINAL_FACTOR = 100.0


class LeftRightPreconditionError(WienerHopfError):
    """``R(0)`` is not invertible or the certificate is not a stabilizing ``ricc1`` solution."""


@dataclass
class LeftRightReport:
    Z: np.ndarray
    i_minus_qz: np.ndarray
    left_exists: bool
    rcond_iqz: float
    x_minus_cross_basis: np.ndarray
    normalized_basis: np.ndarray | None
    lyapunov_residual: float
    x_plus_basis: np.ndarray | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "left_exists": self.left_exists,
            "rcond_iqz": self.rcond_iqz,
            "lyapunov_residual": self.lyapunov_residual,
            "Z": self.Z,
            "i_minus_qz": self.i_minus_qz,
            "x_minus_cross_basis": self.x_minus_cross_basis,
            "x_plus_basis": self.x_plus_basis,
            "normalized_basis": self.normalized_basis,
            "notes": list(self.notes),
        }


@dataclass
class BlockDiagonalization:
    """``S^{-1} Ax S = diag(am_c^{-1}, ap_c)`` with ``S = [[I, Q], [0, I]] [[I, 0], [-Z, I]]``."""

    similarity: np.ndarray
    a_cross: np.ndarray
    blocks: tuple[np.ndarray, np.ndarray]
    residual: float


def _check_preconditions(rep: StableRepresentation, cert: RiccatiCertificate, tol: Tolerances) -> None:
    rep.check_dimensions()
    if not r0_invertible(rep, tol):
        raise LeftRightPreconditionError("R(0) not invertible")
    if cert.equation != "ricc1" or not cert.stabilizing:
        raise LeftRightPreconditionError("certificate is not a stabilizing ricc1 solution")
    if cert.Q.shape != (rep.p_minus, rep.p_plus):
        raise LeftRightPreconditionError("certificate does not match the representation's dimensions")


def _coupling_block(rep: StableRepresentation, tol: Tolerances) -> np.ndarray:
    """``bp R(0)^{-1} gm am^{-1}``."""
    R0, _ = r0_matrix(rep, tol)
    gm_am_inv = np.linalg.solve(rep.alpha_minus.T, rep.gamma_minus.T).T if rep.p_minus else rep.gamma_minus
    return rep.beta_plus @ np.linalg.solve(R0, gm_am_inv)


def _sylvester_data(rep, cert, tol):
    am_c_inv = alpha_minus_circ_inv_formula(rep, cert.Q, tol)
    return am_c_inv, cert.alpha_plus_circ, -_coupling_block(rep, tol)


def lyapunov_z(rep: StableRepresentation, cert: RiccatiCertificate,
               tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Solve ``Z am_c^{-1} - ap_c Z = -bp R(0)^{-1} gm am^{-1}`` (``Z`` is ``p+ x p-``).

    Raises
    ------
    LeftRightPreconditionError
        If ``R(0)`` is singular or ``cert`` is not stabilizing.
    SpectraOverlapError
        If the spectra of ``am_c^{-1}`` and ``ap_c`` meet, which a genuine
        stabilizing certificate rules out.
    """
    _check_preconditions(rep, cert, tol)
    am_c_inv, ap_c, rhs = _sylvester_data(rep, cert, tol)
    return solve_sylvester(am_c_inv, ap_c, rhs, tol)


def lyapunov_residual(rep: StableRepresentation, cert: RiccatiCertificate, Z,
                      tol: Tolerances = DEFAULT_TOL) -> float:
    am_c_inv, ap_c, rhs = _sylvester_data(rep, cert, tol)
    return norm2(Z @ am_c_inv - ap_c @ Z - rhs)


def left_exists_given_right(rep: StableRepresentation, cert: RiccatiCertificate,
                            tol: Tolerances = DEFAULT_TOL) -> LeftRightReport:
    """Decide existence of a left factorization from ``I - Q Z``.

    The verdict is ``rcond(I - QZ) >= tol.inversion_rcond``, with the
    condition number measured against ``max(1, ||QZ||)``.  Values within
    :data:`MARGINAL_FACTOR` of the threshold are flagged in ``notes``.
    """
    Z = lyapunov_z(rep, cert, tol)
    Q = cert.Q
    pm, pp = rep.p_minus, rep.p_plus
    QZ = Q @ Z
    iqz = np.eye(pm, dtype=np.complex128) - QZ
    r = rcond(iqz, max(1.0, norm2(QZ)))
    exists = bool(r >= tol.inversion_rcond)
    notes: list[str] = []
    if tol.inversion_rcond / MARGINAL_FACTOR <= r < tol.inversion_rcond * MARGINAL_FACTOR:
        notes.append(f"marginal: rcond(I - QZ) = {r:.3e} is near the threshold {tol.inversion_rcond:.1e}")
    x_minus = np.vstack([iqz, -Z])
    x_plus = np.vstack([np.zeros((pm, pp), dtype=np.complex128), np.eye(pp, dtype=np.complex128)])
    normalized = None
    if exists:
        normalized = np.vstack([np.eye(pm, dtype=np.complex128), -Z @ np.linalg.inv(iqz)])
    res = lyapunov_residual(rep, cert, Z, tol)
    if res > tol.residual_tol:
        notes.append(f"Sylvester residual {res:.3e} exceeds {tol.residual_tol:.1e}")
    return LeftRightReport(Z, iqz, exists, r, x_minus, normalized, res, x_plus, notes)


def _cross(rep: StableRepresentation, tol: Tolerances) -> np.ndarray:
    return a_cross(stable_to_dichotomous(rep, tol), tol)


def _upper(Q: np.ndarray) -> np.ndarray:
    pm, pp = Q.shape
    T = np.eye(pm + pp, dtype=np.complex128)
    T[:pm, pm:] = Q
    return T


def block_diagonalize(rep: StableRepresentation, cert: RiccatiCertificate, Z=None,
                      tol: Tolerances = DEFAULT_TOL) -> BlockDiagonalization:
    """Conjugate ``Ax`` to ``diag(am_c^{-1}, ap_c)`` and report the off-block residual."""
    _check_preconditions(rep, cert, tol)
    if Z is None:
        Z = lyapunov_z(rep, cert, tol)
    pm, pp = rep.p_minus, rep.p_plus
    L = np.eye(pm + pp, dtype=np.complex128)
    L[pm:, :pm] = -Z
    L_inv = np.eye(pm + pp, dtype=np.complex128)
    L_inv[pm:, :pm] = Z
    T, T_inv = _upper(cert.Q), _upper(-cert.Q)
    Ax = _cross(rep, tol)
    M = L_inv @ T_inv @ Ax @ T @ L
    am_c_inv = alpha_minus_circ_inv_formula(rep, cert.Q, tol)
    target = np.zeros_like(M)
    target[:pm, :pm] = am_c_inv
    target[pm:, pm:] = cert.alpha_plus_circ
    return BlockDiagonalization(T @ L, Ax, (M[:pm, :pm], M[pm:, pm:]), norm2(M - target))


def angular_identity_residual(rep: StableRepresentation, cert: RiccatiCertificate,
                              tol: Tolerances = DEFAULT_TOL) -> float:
    """``|| Ax [Q; I] - [Q; I] ap_c ||``."""
    G = np.vstack([cert.Q, np.eye(rep.p_plus, dtype=np.complex128)])
    return norm2(_cross(rep, tol) @ G - G @ cert.alpha_plus_circ)


def upper_triangular_residual(rep: StableRepresentation, cert: RiccatiCertificate,
                              tol: Tolerances = DEFAULT_TOL) -> float:
    """``|| Ax T - T [[am_c^{-1}, 0], [bp R(0)^{-1} gm am^{-1}, ap_c]] ||`` with ``T = [[I, Q], [0, I]]``."""
    _check_preconditions(rep, cert, tol)
    pm = rep.p_minus
    T = _upper(cert.Q)
    N = np.zeros_like(T)
    N[:pm, :pm] = alpha_minus_circ_inv_formula(rep, cert.Q, tol)
    N[pm:, :pm] = _coupling_block(rep, tol)
    N[pm:, pm:] = cert.alpha_plus_circ
    return norm2(_cross(rep, tol) @ T - T @ N)
