"""Factors of canonical Wiener-Hopf factorizations and their inverses.

Right factorizations are ``R = V_- V_+`` and left ones ``R = W_+ W_-``.
The ``plus`` factors and their inverses are analytic and invertible on
the closed unit disc; the ``minus`` ones on the closed exterior,
including infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_TOL,
    DimensionError,
    SingularMatrixError,
    Tolerances,
    Verdict,
    as_matrix,
    is_invertible,
    norm2,
    require_invertible,
    spectral_radius,
    unit_circle_points,
)
from .representation import (
    DichotomousRealization,
    StableRepresentation,
    a_cross,
    eval_R_many,
    eval_transfer_many,
)
from .riccati import RiccatiCertificate
from .subspaces import MatchingDecomposition

__all__ = [
    "Realization",
    "FactorPair",
    "FactorizationError",
    "right_factors",
    "left_factors",
    "dichot_left_factors",
    "dichot_right_factors",
    "verify_factorization",
]


class FactorizationError(SingularMatrixError):
    """Factors cannot be built from the given data."""


@dataclass
class Realization:
    """State-space data of one factor.

    ``form == "transfer"`` means ``F(z) = D + z C (I - z A)^{-1} B``;
    ``form == "resolvent"`` means ``F(z) = D + C (z I - A)^{-1} B``.
    ``side`` is ``"plus"`` (analytic on the closed disc), ``"minus"``
    (analytic on the closed exterior) or ``None`` when the realization
    only makes sense on the circle.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    form: str
    role: str
    side: str | None
    inverse: bool = False

    def __post_init__(self):
        if self.form not in ("transfer", "resolvent"):
            raise ValueError(f"unknown form {self.form!r}")

    def evaluate(self, z: complex) -> np.ndarray:
        return self.evaluate_many([z])[0]

    def evaluate_many(self, zs) -> np.ndarray:
        zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
        m = self.D.shape[0]
        out = np.broadcast_to(self.D, (zs.size, m, m)).copy()
        n = self.A.shape[0]
        if n == 0:
            return out
        eye = np.eye(n)[None]
        if self.form == "transfer":
            M = eye - zs[:, None, None] * self.A[None]
            w = zs[:, None, None]
        else:
            M = zs[:, None, None] * eye - self.A[None]
            w = 1.0
        X = np.linalg.solve(M, np.broadcast_to(self.B, (zs.size, n, m)))
        return out + w * (self.C @ X)

    def domain_radius(self) -> float:
        """Spectral quantity that must be ``< 1`` for analyticity on the factor's side.

        ``rho(A)`` for plus-side transfer forms and minus-side resolvent
        forms, ``rho(A^{-1})`` for minus-side transfer forms (``inf`` if
        ``A`` is singular), ``nan`` when ``side`` is ``None``.
        """
        if self.side is None:
            return float("nan")
        if self.A.shape[0] == 0:
            return 0.0
        if self.side == "plus" or self.form == "resolvent":
            return spectral_radius(self.A)
        if not is_invertible(self.A).ok:
            return float("inf")
        return spectral_radius(np.linalg.inv(self.A))

    @property
    def tag(self) -> str:
        return "inv" if self.inverse else self.role

    def to_dict(self) -> dict:
        return {
            "role": self.tag,
            "of": self.role,
            "form": self.form,
            "side": self.side,
            "A": self.A,
            "B": self.B,
            "C": self.C,
            "D": self.D,
        }


@dataclass
class FactorPair:
    """Both factors of a canonical factorization with their inverses.

    ``delta_split`` holds the two constant matrices whose product is the
    constant that was split, in product order: ``(d_minus, d_plus)`` for a
    right factorization and ``(d_plus, d_minus)`` for a left one.
    """

    side: str
    minus: Realization
    plus: Realization
    minus_inv: Realization
    plus_inv: Realization
    delta_split: tuple[np.ndarray, np.ndarray]
    extras: dict = field(default_factory=dict)

    def product_many(self, zs) -> np.ndarray:
        a, b = self.minus.evaluate_many(zs), self.plus.evaluate_many(zs)
        return a @ b if self.side == "right" else b @ a

    def realizations(self) -> list[Realization]:
        return [self.minus, self.plus, self.minus_inv, self.plus_inv]

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "delta_split": list(self.delta_split),
            "factors": [r.to_dict() for r in self.realizations()],
        }


def _check_split(split, target: np.ndarray, tol: Tolerances, what: str):
    first, second = (as_matrix(s, *target.shape, name=what) for s in split)
    for s, name in ((first, "first"), (second, "second")):
        if not is_invertible(s, tol).ok:
            raise FactorizationError(f"{what}: {name} factor is singular")
    err = norm2(first @ second - target)
    if err > tol.residual_tol * (1 + norm2(target)):
        raise FactorizationError(f"{what}: split does not reproduce the constant (error {err:.3e})")
    return first, second


def right_factors(rep: StableRepresentation, cert: RiccatiCertificate,
                  tol: Tolerances = DEFAULT_TOL, split=None) -> FactorPair:
    """``V_-`` and ``V_+`` from a stabilizing solution of ``ricc1``.

    Parameters
    ----------
    split : pair of arrays, optional
        ``(d_minus, d_plus)`` with ``d_minus @ d_plus == delta - gm Q bp``.
        Defaults to ``(I, delta - gm Q bp)``.
    """
    if cert.equation != "ricc1" or not cert.stabilizing:
        raise FactorizationError("right factors need a stabilizing ricc1 certificate")
    Q = cert.Q
    K = rep.delta - rep.gamma_minus @ Q @ rep.beta_plus
    if split is None:
        split = (np.eye(rep.m, dtype=np.complex128), K)
    d_minus, d_plus = _check_split(split, K, tol, "delta split")
    dm_inv, dp_inv = np.linalg.inv(d_minus), np.linalg.inv(d_plus)
    gp_circ = dm_inv @ (rep.gamma_plus - rep.gamma_minus @ Q @ rep.alpha_plus)
    bm_circ = (rep.beta_minus - rep.alpha_minus @ Q @ rep.beta_plus) @ dp_inv
    if cert.alpha_minus_circ is None:
        raise FactorizationError("certificate lacks alpha_minus_circ")

    V_minus = Realization(rep.alpha_minus, bm_circ, rep.gamma_minus, d_minus, "resolvent", "V-", "minus")
    V_plus = Realization(rep.alpha_plus, rep.beta_plus, gp_circ, d_plus, "transfer", "V+", "plus")
    V_plus_inv = Realization(cert.alpha_plus_circ, rep.beta_plus @ dp_inv, -dp_inv @ gp_circ, dp_inv,
                             "transfer", "V+", "plus", inverse=True)
    V_minus_inv = Realization(cert.alpha_minus_circ, bm_circ @ dm_inv, -dm_inv @ rep.gamma_minus, dm_inv,
                              "resolvent", "V-", "minus", inverse=True)
    return FactorPair("right", V_minus, V_plus, V_minus_inv, V_plus_inv, (d_minus, d_plus))


def left_factors(rep: StableRepresentation, cert: RiccatiCertificate,
                 tol: Tolerances = DEFAULT_TOL, split=None) -> FactorPair:
    """``W_+`` and ``W_-`` from a stabilizing solution of the left equation.

    Parameters
    ----------
    split : pair of arrays, optional
        ``(d_plus, d_minus)`` with ``d_plus @ d_minus == delta - gp Qt bm``.
        Defaults to ``(delta - gp Qt bm, I)``.
    """
    if cert.equation != "left" or not cert.stabilizing:
        raise FactorizationError("left factors need a stabilizing left certificate")
    Qt = cert.Q
    Kt = rep.delta - rep.gamma_plus @ Qt @ rep.beta_minus
    if split is None:
        split = (Kt, np.eye(rep.m, dtype=np.complex128))
    d_plus, d_minus = _check_split(split, Kt, tol, "delta split")
    dp_inv, dm_inv = np.linalg.inv(d_plus), np.linalg.inv(d_minus)
    bp_circ = (rep.beta_plus - rep.alpha_plus @ Qt @ rep.beta_minus) @ dm_inv
    gm_circ = dp_inv @ (rep.gamma_minus - rep.gamma_plus @ Qt @ rep.alpha_minus)
    if cert.alpha_minus_circ is None:
        raise FactorizationError("certificate lacks alpha_minus_circ")

    W_plus = Realization(rep.alpha_plus, bp_circ, rep.gamma_plus, d_plus, "transfer", "W+", "plus")
    W_minus = Realization(rep.alpha_minus, rep.beta_minus, gm_circ, d_minus, "resolvent", "W-", "minus")
    W_plus_inv = Realization(cert.alpha_plus_circ, bp_circ @ dp_inv, -dp_inv @ rep.gamma_plus, dp_inv,
                             "transfer", "W+", "plus", inverse=True)
    # the state matrix here is the minus closed-loop operator
    W_minus_inv = Realization(cert.alpha_minus_circ, rep.beta_minus @ dm_inv, -dm_inv @ gm_circ, dm_inv,
                              "resolvent", "W-", "minus", inverse=True)
    return FactorPair("left", W_minus, W_plus, W_minus_inv, W_plus_inv, (d_plus, d_minus))


def _matched_coordinates(real: DichotomousRealization, match: MatchingDecomposition, tol: Tolerances):
    S = match.basis
    Sinv = np.linalg.inv(S)
    Ax = a_cross(real, tol)
    return Sinv @ real.A @ S, Sinv @ Ax @ S, Sinv @ real.B, real.C @ S, Ax


def dichot_left_factors(real: DichotomousRealization, match: MatchingDecomposition, d_split=None,
                        tol: Tolerances = DEFAULT_TOL) -> FactorPair:
    """Left factors from the matching ``X = X_-^x + X_+``.

    ``d_split = (D_plus, D_minus)`` with ``D_plus @ D_minus == D``; default ``(D, I)``.
    The primary realizations are the compressed ones on the matched
    subspaces; ``extras`` holds the projection-based forms on the full
    state space.
    """
    if match.side != "left" or not match.exists:
        raise FactorizationError("left matching decomposition required")
    require_invertible(real.D, tol, "D")
    if d_split is None:
        d_split = (real.D, np.eye(real.m, dtype=np.complex128))
    Dp, Dm = _check_split(d_split, real.D, tol, "D split")
    Dp_inv, Dm_inv, D_inv = np.linalg.inv(Dp), np.linalg.inv(Dm), np.linalg.inv(real.D)
    k = real.dim_minus
    A_, Ax_, B_, C_, Ax = _matched_coordinates(real, match, tol)

    W_plus = Realization(A_[k:, k:], B_[k:] @ Dm_inv, C_[:, k:], Dp, "transfer", "W+", "plus")
    W_plus_inv = Realization(Ax_[k:, k:], B_[k:] @ D_inv, -Dp_inv @ C_[:, k:], Dp_inv,
                             "transfer", "W+", "plus", inverse=True)
    W_minus = Realization(A_[:k, :k], B_[:k], Dp_inv @ C_[:, :k], Dm, "transfer", "W-", "minus")
    W_minus_inv = Realization(Ax_[:k, :k], B_[:k] @ Dm_inv, -D_inv @ C_[:, :k], Dm_inv,
                              "transfer", "W-", "minus", inverse=True)

    P = match.projection
    I_n = np.eye(real.n)
    extras = {
        "full": {
            "W+": Realization(real.A, (I_n - P) @ real.B @ Dm_inv, real.C, Dp, "transfer", "W+", None),
            "W-": Realization(real.A, real.B, Dp_inv @ real.C @ P, Dm, "transfer", "W-", None),
            "W+inv": Realization(Ax, real.B @ D_inv, -Dp_inv @ real.C @ (I_n - P), Dp_inv,
                                 "transfer", "W+", None, inverse=True),
            "W-inv": Realization(Ax, P @ real.B @ Dm_inv, -D_inv @ real.C, Dm_inv,
                                 "transfer", "W-", None, inverse=True),
        }
    }
    return FactorPair("left", W_minus, W_plus, W_minus_inv, W_plus_inv, (Dp, Dm), extras)


def dichot_right_factors(real: DichotomousRealization, match: MatchingDecomposition, d_split=None,
                         tol: Tolerances = DEFAULT_TOL) -> FactorPair:
    """Right factors from the matching ``X = X_- + X_+^x``.

    ``d_split = (D_minus, D_plus)`` with ``D_minus @ D_plus == D``; default ``(D, I)``.
    """
    if match.side != "right" or not match.exists:
        raise FactorizationError("right matching decomposition required")
    require_invertible(real.D, tol, "D")
    if d_split is None:
        d_split = (real.D, np.eye(real.m, dtype=np.complex128))
    Dm, Dp = _check_split(d_split, real.D, tol, "D split")
    Dp_inv, Dm_inv, D_inv = np.linalg.inv(Dp), np.linalg.inv(Dm), np.linalg.inv(real.D)
    k = real.dim_minus
    A_, Ax_, B_, C_, Ax = _matched_coordinates(real, match, tol)

    # A_ is block upper and Ax_ block lower triangular in these coordinates
    V_minus = Realization(A_[:k, :k], B_[:k] @ Dp_inv, C_[:, :k], Dm, "transfer", "V-", "minus")
    V_minus_inv = Realization(Ax_[:k, :k], B_[:k] @ D_inv, -Dm_inv @ C_[:, :k], Dm_inv,
                              "transfer", "V-", "minus", inverse=True)
    V_plus = Realization(A_[k:, k:], B_[k:], Dm_inv @ C_[:, k:], Dp, "transfer", "V+", "plus")
    V_plus_inv = Realization(Ax_[k:, k:], B_[k:] @ Dp_inv, -D_inv @ C_[:, k:], Dp_inv,
                             "transfer", "V+", "plus", inverse=True)

    P = match.projection
    I_n = np.eye(real.n)
    extras = {
        "full": {
            "V-": Realization(real.A, (I_n - P) @ real.B @ Dp_inv, real.C, Dm, "transfer", "V-", None),
            "V+": Realization(real.A, real.B, Dm_inv @ real.C @ P, Dp, "transfer", "V+", None),
            "V-inv": Realization(Ax, real.B @ D_inv, -Dm_inv @ real.C @ (I_n - P), Dm_inv,
                                 "transfer", "V-", None, inverse=True),
            "V+inv": Realization(Ax, P @ real.B @ Dp_inv, -D_inv @ real.C, Dp_inv,
                                 "transfer", "V+", None, inverse=True),
        }
    }
    return FactorPair("right", V_minus, V_plus, V_minus_inv, V_plus_inv, (Dm, Dp), extras)


def _target_values(target, zs) -> np.ndarray:
    if isinstance(target, StableRepresentation):
        return eval_R_many(target, zs)
    if isinstance(target, DichotomousRealization):
        return eval_transfer_many(target, zs)
    raise TypeError(f"cannot evaluate {type(target).__name__}")


def verify_factorization(target, pair: FactorPair, tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Check a factorization at the ``circle_samples`` roots of unity.

    Measures
    --------
    product_residual
        ``max ||R(z) - product(z)||``.
    inverse_residual
        ``max ||F(z) F^{-1}(z) - I||`` and ``||F^{-1}(z) F(z) - I||`` over both factors.
    radius:<role>
        Domain radius of each realization (must be ``< 1``).

    ``ok`` requires both residuals to be at most ``residual_tol * (1 + sup ||R||)``
    and every radius below ``1 - spectral_margin``.
    """
    zs = unit_circle_points(tol.circle_samples)
    try:
        Rz = _target_values(target, zs)
    except DimensionError as exc:
        return Verdict(False, {}, [str(exc)])
    if Rz.shape[1] != pair.plus.D.shape[0]:
        return Verdict(False, {}, ["factor size does not match the function"])
    scale = 1.0 + max(norm2(v) for v in Rz)
    prod = pair.product_many(zs)
    product_residual = max(norm2(a - b) for a, b in zip(Rz, prod))
    m = Rz.shape[1]
    I = np.eye(m)
    inv_res = 0.0
    for f, finv in ((pair.minus, pair.minus_inv), (pair.plus, pair.plus_inv)):
        F, G = f.evaluate_many(zs), finv.evaluate_many(zs)
        inv_res = max(inv_res, max(norm2(x @ y - I) for x, y in zip(F, G)),
                      max(norm2(y @ x - I) for x, y in zip(F, G)))
    measures: dict[str, float] = {"product_residual": product_residual, "inverse_residual": inv_res}
    notes = []
    limit = tol.residual_tol * scale
    if product_residual > limit:
        notes.append(f"product residual {product_residual:.3e} exceeds {limit:.1e}")
    if inv_res > limit:
        notes.append(f"inverse residual {inv_res:.3e} exceeds {limit:.1e}")
    for r in pair.realizations():
        rad = r.domain_radius()
        key = f"radius:{r.role}{'inv' if r.inverse else ''}"
        measures[key] = rad
        if not rad < tol.stable_bound:
            notes.append(f"{key} = {rad:.6g}: not analytic on the {r.side} side")
    return Verdict(not notes, measures, notes)
