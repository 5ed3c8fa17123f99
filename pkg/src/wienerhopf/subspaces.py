"""Spectral subspaces relative to the unit circle and matching decompositions.

For a dichotomous realization with state matrix ``A`` and associate
matrix ``Ax = A - B D^{-1} C`` the state space splits in two ways, by the
spectrum of ``A`` and by that of ``Ax``.  A right factorization exists when
the anti-stable subspace of ``A`` complements the stable subspace of
``Ax``; a left factorization when the anti-stable subspace of ``Ax``
complements the stable subspace of ``A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .core import (
    DEFAULT_TOL,
    NotDichotomousError,
    SingularMatrixError,
    Tolerances,
    as_matrix,
    norm2,
    rcond,
    require_invertible,
    spectral_radius,
)
from .representation import DichotomousRealization, a_cross

__all__ = [
    "SpectralSplit",
    "MatchingDecomposition",
    "spectral_split_unit_circle",
    "riesz_projector",
    "normalize_dichotomous",
    "matching_right",
    "matching_left",
    "riccati_dichot_residual",
    "dichot_stability_operators",
]


@dataclass
class SpectralSplit:
    """Invariant subspaces of a matrix for the eigenvalues inside and outside the unit circle.

    ``basis_inside`` and ``basis_outside`` have orthonormal columns.
    ``projector`` is the spectral projector onto the inside part along
    the outside part.
    """

    projector: np.ndarray
    dim_inside: int
    basis_inside: np.ndarray
    basis_outside: np.ndarray
    eigenvalues: np.ndarray
    circle_gap: float

    @property
    def dim_outside(self) -> int:
        return self.basis_outside.shape[1]


@dataclass
class MatchingDecomposition:
    """Result of a matching test.

    Attributes
    ----------
    exists : bool
    projection : ndarray
        Right case: projection onto the stable subspace of ``Ax`` along the
        anti-stable subspace of ``A``.  Left case: projection onto the
        anti-stable subspace of ``Ax`` along the stable subspace of ``A``.
    angular : ndarray
        Right case: ``Qhat`` (``dim_minus x dim_plus``) with the stable
        subspace of ``Ax`` equal to ``Im [Qhat; I]``.  Left case: ``W``
        (``dim_plus x dim_minus``) with the anti-stable subspace of ``Ax``
        equal to ``Im [I; W]``.
    condition : float
        Condition number of the basis matrix built from the two subspaces.
    basis : ndarray
        The invertible basis matrix ``[[I, Qhat], [0, I]]`` (right) or
        ``[[I, 0], [W, I]]`` (left) adapted to the decomposition.
    """

    side: str
    exists: bool
    projection: np.ndarray | None
    angular: np.ndarray | None
    condition: float
    basis: np.ndarray | None = None
    a_cross: np.ndarray | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "exists": self.exists,
            "condition": self.condition,
            "projection": self.projection,
            "angular": self.angular,
            "notes": list(self.notes),
        }


def _eigs_circle_gap(M: np.ndarray) -> tuple[np.ndarray, float]:
    if M.shape[0] == 0:
        return np.zeros(0, dtype=np.complex128), np.inf
    ev = linalg.eigvals(M)
    return ev, float(np.min(np.abs(np.abs(ev) - 1.0)))


def spectral_split_unit_circle(M, tol: Tolerances = DEFAULT_TOL) -> SpectralSplit:
    """Split ``M`` along the unit circle with two ordered Schur decompositions.

    Raises
    ------
    NotDichotomousError
        If an eigenvalue lies within ``tol.spectral_margin`` of the circle.
    """
    M = as_matrix(M, name="M")
    n = M.shape[0]
    if M.shape[1] != n:
        raise ValueError("M must be square")
    ev, gap = _eigs_circle_gap(M)
    if gap <= tol.spectral_margin:
        raise NotDichotomousError(f"eigenvalue within {gap:.3e} of the unit circle")
    if n == 0:
        e = np.zeros((0, 0), dtype=np.complex128)
        return SpectralSplit(e, 0, e, e, ev, gap)

    _, Z_in, k_in = linalg.schur(M, output="complex", sort="iuc")
    _, Z_out, k_out = linalg.schur(M, output="complex", sort="ouc")
    if k_in + k_out != n:
        raise NotDichotomousError("Schur reordering could not separate the spectrum")
    inside = Z_in[:, :k_in]
    outside = Z_out[:, :k_out]
    S = np.hstack([inside, outside])
    require_invertible(S, tol, "spectral basis")
    sel = np.zeros(n)
    sel[:k_in] = 1.0
    P = (S * sel) @ np.linalg.inv(S)
    return SpectralSplit(P, k_in, inside, outside, ev, gap)


def riesz_projector(M, n_points: int = 256) -> np.ndarray:
    """Trapezoid-rule approximation of ``(1/2 pi i) \\oint_T (zI - M)^{-1} dz``."""
    M = as_matrix(M, name="M")
    n = M.shape[0]
    z = np.exp(2j * np.pi * np.arange(n_points) / n_points)
    R = np.linalg.inv(z[:, None, None] * np.eye(n)[None] - M[None])
    # dz = i z dtheta cancels the 1/(2 pi i) up to the 1/n_points weight
    return np.tensordot(z, R, axes=1) / n_points


def normalize_dichotomous(A, B, C, D, tol: Tolerances = DEFAULT_TOL) -> DichotomousRealization:
    """Change state coordinates so that ``A`` becomes block diagonal, anti-stable block first."""
    A = as_matrix(A, name="A")
    split = spectral_split_unit_circle(A, tol)
    S = np.hstack([split.basis_outside, split.basis_inside])
    require_invertible(S, tol, "state coordinate change")
    Sinv = np.linalg.inv(S)
    An = Sinv @ A @ S
    k = split.dim_outside
    An[:k, k:] = 0.0
    An[k:, :k] = 0.0
    return DichotomousRealization(An, Sinv @ as_matrix(B, name="B"), as_matrix(C, name="C") @ S,
                                  as_matrix(D, name="D"), k, split.dim_inside)


def _graph_coordinate(top: np.ndarray, bottom: np.ndarray) -> tuple[np.ndarray, float]:
    """Solve ``X @ bottom = top`` in least squares; return ``X`` and the relative residual."""
    X = np.linalg.lstsq(bottom.conj().T, top.conj().T, rcond=None)[0].conj().T
    res = norm2(X @ bottom - top) / max(1.0, norm2(top))
    return X, res


def matching_right(real: DichotomousRealization, tol: Tolerances = DEFAULT_TOL) -> MatchingDecomposition:
    """Test whether the anti-stable subspace of ``A`` complements the stable subspace of ``Ax``."""
    n, km, kp = real.n, real.dim_minus, real.dim_plus
    Ax = a_cross(real, tol)
    try:
        split = spectral_split_unit_circle(Ax, tol)
    except NotDichotomousError as exc:
        return MatchingDecomposition("right", False, None, None, np.inf, a_cross=Ax,
                                     notes=[f"A-cross not dichotomous: {exc}"])
    if split.dim_inside != kp:
        return MatchingDecomposition(
            "right", False, None, None, np.inf, a_cross=Ax,
            notes=[f"stable subspace of A-cross has dimension {split.dim_inside}, expected {kp}"],
        )
    top, bottom = split.basis_inside[:km], split.basis_inside[km:]
    M = np.zeros((n, n), dtype=np.complex128)
    M[:km, :km] = np.eye(km)
    M[:, km:] = split.basis_inside
    r = rcond(M)
    if r < tol.inversion_rcond:
        return MatchingDecomposition("right", False, None, None, np.inf if r == 0 else 1 / r, a_cross=Ax,
                                     notes=[f"subspaces do not match (rcond {r:.3e})"])
    Qhat, res = _graph_coordinate(top, bottom)
    notes = []
    if res > tol.residual_tol:
        notes.append(f"graph coordinate residual {res:.3e}")
    basis = np.eye(n, dtype=np.complex128)
    basis[:km, km:] = Qhat
    P = np.zeros((n, n), dtype=np.complex128)
    P[:km, km:] = Qhat
    P[km:, km:] = np.eye(kp)
    return MatchingDecomposition("right", True, P, Qhat, 1 / r, basis, Ax, notes)


def matching_left(real: DichotomousRealization, tol: Tolerances = DEFAULT_TOL) -> MatchingDecomposition:
    """Test whether the anti-stable subspace of ``Ax`` complements the stable subspace of ``A``."""
    n, km, kp = real.n, real.dim_minus, real.dim_plus
    Ax = a_cross(real, tol)
    try:
        split = spectral_split_unit_circle(Ax, tol)
    except NotDichotomousError as exc:
        return MatchingDecomposition("left", False, None, None, np.inf, a_cross=Ax,
                                     notes=[f"A-cross not dichotomous: {exc}"])
    if split.dim_outside != km:
        return MatchingDecomposition(
            "left", False, None, None, np.inf, a_cross=Ax,
            notes=[f"anti-stable subspace of A-cross has dimension {split.dim_outside}, expected {km}"],
        )
    top, bottom = split.basis_outside[:km], split.basis_outside[km:]
    M = np.zeros((n, n), dtype=np.complex128)
    M[:, :km] = split.basis_outside
    M[km:, km:] = np.eye(kp)
    r = rcond(M)
    if r < tol.inversion_rcond:
        return MatchingDecomposition("left", False, None, None, np.inf if r == 0 else 1 / r, a_cross=Ax,
                                     notes=[f"subspaces do not match (rcond {r:.3e})"])
    # Im [top; bottom] = Im [I; W] with W = bottom top^{-1}
    W = np.linalg.solve(top.T, bottom.T).T
    notes: list[str] = []
    basis = np.eye(n, dtype=np.complex128)
    basis[km:, :km] = W
    P = np.zeros((n, n), dtype=np.complex128)
    P[:km, :km] = np.eye(km)
    P[km:, :km] = W
    return MatchingDecomposition("left", True, P, W, 1 / r, basis, Ax, notes)


def riccati_dichot_residual(real: DichotomousRealization, Qhat, tol: Tolerances = DEFAULT_TOL) -> float:
    """``|| A_- Qhat - Qhat A_+ + (Qhat B_+ - B_-) D^{-1} (C_- Qhat + C_+) ||``."""
    Qhat = as_matrix(Qhat, real.dim_minus, real.dim_plus, name="Qhat")
    require_invertible(real.D, tol, "D")
    rhs = np.linalg.solve(real.D, real.C_minus @ Qhat + real.C_plus)
    E = real.A_minus @ Qhat - Qhat @ real.A_plus + (Qhat @ real.B_plus - real.B_minus) @ rhs
    return norm2(E)


def dichot_stability_operators(real: DichotomousRealization, Qhat, tol: Tolerances = DEFAULT_TOL):
    """The two closed-loop operators attached to ``Qhat`` and their spectral radii.

    Returns
    -------
    F_plus : ndarray
        ``A_+ - B_+ D^{-1} (C_+ + C_- Qhat)``, stable at a stabilizing solution.
    F_minus : ndarray
        ``A_- - (B_- - Qhat B_+) D^{-1} C_-``, anti-stable at a stabilizing solution.
    radii : tuple of float
        ``rho(F_plus)`` and ``rho(F_minus^{-1})`` (``inf`` if ``F_minus`` is singular).
    """
    Qhat = as_matrix(Qhat, real.dim_minus, real.dim_plus, name="Qhat")
    require_invertible(real.D, tol, "D")
    F_plus = real.A_plus - real.B_plus @ np.linalg.solve(real.D, real.C_plus + real.C_minus @ Qhat)
    F_minus = real.A_minus - (real.B_minus - Qhat @ real.B_plus) @ np.linalg.solve(real.D, real.C_minus)
    try:
        require_invertible(F_minus, tol, "F_minus")
        rho_minus = spectral_radius(np.linalg.inv(F_minus)) if F_minus.size else 0.0
    except SingularMatrixError:
        rho_minus = np.inf
    return F_plus, F_minus, (spectral_radius(F_plus), rho_minus)
