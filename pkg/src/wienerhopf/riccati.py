"""Riccati equations attached to a stable representation.

Three equations are handled, all for a ``p- x p+`` unknown ``Q`` (or a
``p+ x p-`` unknown for the left equation):

``ricc1``
    ``Q = am Q ap + (bm - am Q bp) K^{-1} (gp - gm Q ap)`` with
    ``K = delta - gm Q bp``.
``ricc2``
    ``Q = am Q ap + (bm - am Q bp) R(0)^{-1} (gp - gm am^{-1} Q)``, the form
    obtained when ``R(0)`` is invertible.
``left``
    ``Qt = ap Qt am + (bp - ap Qt bm) Kt^{-1} (gm - gp Qt am)`` with
    ``Kt = delta - gp Qt bm``; this is ``ricc1`` for the representation with
    plus and minus data exchanged.

(``gp, ap, bp`` = ``gamma_plus, alpha_plus, beta_plus``; likewise for the
minus side.)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import (
    DEFAULT_TOL,
    InvalidRepresentationError,
    SingularMatrixError,
    Tolerances,
    Verdict,
    WienerHopfError,
    as_matrix,
    is_invertible,
    norm2,
    rcond,
    require_invertible,
    spectral_radius,
    unit_circle_points,
)
from .representation import (
    StableRepresentation,
    eval_R_many,
    stable_to_dichotomous,
    swap_sides,
    validate_stable,
)

__all__ = [
    "RiccatiCertificate",
    "NoStabilizingSolution",
    "InadmissibleSolutionError",
    "EQUATIONS",
    "METHODS",
    "residual_ricc1",
    "residual_ricc2",
    "residual_left",
    "alpha_plus_circ_r0",
    "alpha_minus_circ_inv_formula",
    "quad_identity_gap",
    "circ_operators",
    "k_matrix",
    "kt_matrix",
    "r0_matrix",
    "r0_invertible",
    "check_invertible_on_circle",
    "solve_right_stabilizing",
    "solve_left_stabilizing",
]

EQUATIONS = ("ricc1", "ricc2", "left")
METHODS = ("auto", "subspace", "toeplitz", "iterate")

ITERATE_MAX = 10_000
ITERATE_STEP = 1e-12


class InadmissibleSolutionError(SingularMatrixError):
    """The matrix that must be inverted for this equation is singular at ``Q``."""


class NoStabilizingSolution(WienerHopfError):
    """No stabilizing solution was found; ``verdict`` carries the diagnosis."""

    def __init__(self, message: str, verdict: Verdict | None = None, certificate=None):
        super().__init__(message)
        self.verdict = verdict if verdict is not None else Verdict(False, {}, [message])
        self.certificate = certificate


@dataclass
class RiccatiCertificate:
    """A candidate solution together with its closed-loop operators.

    For ``ricc1`` and ``left``, ``margins`` holds the spectral radii of
    ``alpha_plus_circ`` and ``alpha_minus_circ``; both must be below
    ``1 - spectral_margin``.  For ``ricc2`` the second operator is
    anti-stable at a stabilizing solution and is stored in
    ``alpha_minus_circ_inv``; ``margins[1]`` is the radius of its inverse.
    """

    Q: np.ndarray
    alpha_plus_circ: np.ndarray
    alpha_minus_circ: np.ndarray | None
    alpha_minus_circ_inv: np.ndarray | None
    equation: str
    residual_norm: float
    stabilizing: bool
    margins: tuple[float, float]
    method: str = "given"
    notes: list[str] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "equation": self.equation,
            "method": self.method,
            "stabilizing": self.stabilizing,
            "residual_norm": self.residual_norm,
            "margins": list(self.margins),
            "Q": self.Q,
            "alpha_plus_circ": self.alpha_plus_circ,
            "alpha_minus_circ": self.alpha_minus_circ,
            "alpha_minus_circ_inv": self.alpha_minus_circ_inv,
            "notes": list(self.notes),
            "diagnostics": dict(self.diagnostics),
        }


def _check_Q(rep: StableRepresentation, Q, rows: int, cols: int) -> np.ndarray:
    rep.check_dimensions()
    return as_matrix(Q, rows, cols, name="Q")


def k_matrix(rep: StableRepresentation, Q: np.ndarray) -> tuple[np.ndarray, float]:
    """``K = delta - gm Q bp`` and the size of the two terms it is formed from."""
    cross = rep.gamma_minus @ Q @ rep.beta_plus
    return rep.delta - cross, norm2(rep.delta) + norm2(cross)


def kt_matrix(rep: StableRepresentation, Qt: np.ndarray) -> tuple[np.ndarray, float]:
    """``Kt = delta - gp Qt bm`` and the size of the two terms it is formed from."""
    cross = rep.gamma_plus @ Qt @ rep.beta_minus
    return rep.delta - cross, norm2(rep.delta) + norm2(cross)


def r0_matrix(rep: StableRepresentation, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """``R(0) = delta - gm am^{-1} bm`` and the size of the two terms it is formed from.

    Raises
    ------
    SingularMatrixError
        If ``alpha_minus`` is singular.
    """
    if rep.p_minus:
        require_invertible(rep.alpha_minus, tol, "alpha_minus")
        cross = rep.gamma_minus @ np.linalg.solve(rep.alpha_minus, rep.beta_minus)
    else:
        cross = np.zeros_like(rep.delta)
    return rep.delta - cross, norm2(rep.delta) + norm2(cross)


def r0_invertible(rep: StableRepresentation, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether ``alpha_minus`` and ``R(0)`` are both invertible."""
    if rep.p_minus and not is_invertible(rep.alpha_minus, tol).ok:
        return False
    R0, scale = r0_matrix(rep, tol)
    return is_invertible(R0, tol, scale).ok


def _require_admissible(K: np.ndarray, tol: Tolerances, what: str, scale: float) -> None:
    v = is_invertible(K, tol, scale)
    if not v.ok:
        raise InadmissibleSolutionError(f"{what} is singular (rcond={v.measures['rcond']:.3e})")


def _ricc1_parts(rep: StableRepresentation, Q: np.ndarray, tol: Tolerances):
    K, scale = k_matrix(rep, Q)
    _require_admissible(K, tol, "delta - gamma_minus Q beta_plus", scale)
    left = rep.beta_minus - rep.alpha_minus @ Q @ rep.beta_plus
    right = rep.gamma_plus - rep.gamma_minus @ Q @ rep.alpha_plus
    return K, left, right


def residual_ricc1(rep: StableRepresentation, Q, tol: Tolerances = DEFAULT_TOL) -> float:
    """Norm of ``Q - am Q ap - (bm - am Q bp) K^{-1} (gp - gm Q ap)``.

    Raises
    ------
    InadmissibleSolutionError
        If ``K = delta - gm Q bp`` is singular.
    """
    Q = _check_Q(rep, Q, rep.p_minus, rep.p_plus)
    K, left, right = _ricc1_parts(rep, Q, tol)
    E = Q - rep.alpha_minus @ Q @ rep.alpha_plus - left @ np.linalg.solve(K, right)
    return norm2(E)


def _r0_inverse_data(rep: StableRepresentation, tol: Tolerances):
    if rep.p_minus:
        require_invertible(rep.alpha_minus, tol, "alpha_minus")
    am_inv = np.linalg.inv(rep.alpha_minus) if rep.p_minus else np.zeros((0, 0), np.complex128)
    R0, scale = r0_matrix(rep, tol)
    if not is_invertible(R0, tol, scale).ok:
        raise InadmissibleSolutionError("R(0) is singular")
    return am_inv, R0


def residual_ricc2(rep: StableRepresentation, Q, tol: Tolerances = DEFAULT_TOL) -> float:
    """Norm of ``Q - am Q ap - (bm - am Q bp) R(0)^{-1} (gp - gm am^{-1} Q)``.

    Raises
    ------
    InadmissibleSolutionError
        If ``R(0)`` is singular (the equation then has no admissible instance).
    """
    Q = _check_Q(rep, Q, rep.p_minus, rep.p_plus)
    am_inv, R0 = _r0_inverse_data(rep, tol)
    left = rep.beta_minus - rep.alpha_minus @ Q @ rep.beta_plus
    right = rep.gamma_plus - rep.gamma_minus @ am_inv @ Q
    E = Q - rep.alpha_minus @ Q @ rep.alpha_plus - left @ np.linalg.solve(R0, right)
    return norm2(E)


def residual_left(rep: StableRepresentation, Qt, tol: Tolerances = DEFAULT_TOL) -> float:
    """Norm of ``Qt - ap Qt am - (bp - ap Qt bm) Kt^{-1} (gm - gp Qt am)``.

    Raises
    ------
    InadmissibleSolutionError
        If ``Kt = delta - gp Qt bm`` is singular.
    """
    Qt = _check_Q(rep, Qt, rep.p_plus, rep.p_minus)
    Kt, scale = kt_matrix(rep, Qt)
    _require_admissible(Kt, tol, "delta - gamma_plus Qt beta_minus", scale)
    left = rep.beta_plus - rep.alpha_plus @ Qt @ rep.beta_minus
    right = rep.gamma_minus - rep.gamma_plus @ Qt @ rep.alpha_minus
    E = Qt - rep.alpha_plus @ Qt @ rep.alpha_minus - left @ np.linalg.solve(Kt, right)
    return norm2(E)


def alpha_plus_circ_r0(rep: StableRepresentation, Q, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``ap - bp R(0)^{-1} (gp - gm am^{-1} Q)``, the stable operator of ``ricc2``."""
    Q = _check_Q(rep, Q, rep.p_minus, rep.p_plus)
    am_inv, R0 = _r0_inverse_data(rep, tol)
    return rep.alpha_plus - rep.beta_plus @ np.linalg.solve(R0, rep.gamma_plus - rep.gamma_minus @ am_inv @ Q)


def alpha_minus_circ_inv_formula(rep: StableRepresentation, Q, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``am^{-1} + am^{-1} (bm - am Q bp) R(0)^{-1} gm am^{-1}``.

    When ``K`` is also invertible this is the inverse of ``alpha_minus_circ``;
    it is the anti-stable operator of ``ricc2``.
    """
    Q = _check_Q(rep, Q, rep.p_minus, rep.p_plus)
    am_inv, R0 = _r0_inverse_data(rep, tol)
    left = rep.beta_minus - rep.alpha_minus @ Q @ rep.beta_plus
    return am_inv + am_inv @ left @ np.linalg.solve(R0, rep.gamma_minus @ am_inv)


def quad_identity_gap(rep: StableRepresentation, Q, tol: Tolerances = DEFAULT_TOL) -> float:
    """``|| K^{-1} (gp - gm Q ap) - R(0)^{-1} (gp - gm am^{-1} Q) ||``.

    Vanishes at every common solution of the two right equations.
    """
    Q = _check_Q(rep, Q, rep.p_minus, rep.p_plus)
    K, _, right1 = _ricc1_parts(rep, Q, tol)
    am_inv, R0 = _r0_inverse_data(rep, tol)
    right2 = rep.gamma_plus - rep.gamma_minus @ am_inv @ Q
    return norm2(np.linalg.solve(K, right1) - np.linalg.solve(R0, right2))


def _inverse_or_none(M: np.ndarray, tol: Tolerances) -> np.ndarray | None:
    if M.shape[0] == 0:
        return M.copy()
    return np.linalg.inv(M) if is_invertible(M, tol).ok else None


def circ_operators(rep: StableRepresentation, Q, equation: str = "ricc1",
                   tol: Tolerances = DEFAULT_TOL) -> RiccatiCertificate:
    """Closed-loop operators, residual and stabilizing verdict for a candidate ``Q``.

    Raises
    ------
    InadmissibleSolutionError
        If the inverse the chosen equation needs does not exist.
    """
    if equation not in EQUATIONS:
        raise ValueError(f"equation must be one of {EQUATIONS}, got {equation!r}")
    bound = tol.stable_bound
    notes: list[str] = []

    if equation == "ricc1":
        Q = _check_Q(rep, Q, rep.p_minus, rep.p_plus)
        K, left, right = _ricc1_parts(rep, Q, tol)
        a_plus = rep.alpha_plus - rep.beta_plus @ np.linalg.solve(K, right)
        a_minus = rep.alpha_minus - left @ np.linalg.solve(K, rep.gamma_minus)
        a_minus_inv = _inverse_or_none(a_minus, tol)
        residual = residual_ricc1(rep, Q, tol)
        margins = (spectral_radius(a_plus), spectral_radius(a_minus))
    elif equation == "ricc2":
        Q = _check_Q(rep, Q, rep.p_minus, rep.p_plus)
        a_plus = alpha_plus_circ_r0(rep, Q, tol)
        a_minus_inv = alpha_minus_circ_inv_formula(rep, Q, tol)
        a_minus = _inverse_or_none(a_minus_inv, tol)
        residual = residual_ricc2(rep, Q, tol)
        if a_minus is None:
            notes.append("second operator is singular, hence not anti-stable")
            rho_inv = np.inf
        else:
            rho_inv = spectral_radius(a_minus)
        margins = (spectral_radius(a_plus), rho_inv)
    else:
        Q = _check_Q(rep, Q, rep.p_plus, rep.p_minus)
        Kt, scale = kt_matrix(rep, Q)
        _require_admissible(Kt, tol, "delta - gamma_plus Qt beta_minus", scale)
        left = rep.beta_plus - rep.alpha_plus @ Q @ rep.beta_minus
        right = rep.gamma_minus - rep.gamma_plus @ Q @ rep.alpha_minus
        a_minus = rep.alpha_minus - rep.beta_minus @ np.linalg.solve(Kt, right)
        a_plus = rep.alpha_plus - left @ np.linalg.solve(Kt, rep.gamma_plus)
        a_minus_inv = _inverse_or_none(a_minus, tol)
        residual = residual_left(rep, Q, tol)
        margins = (spectral_radius(a_plus), spectral_radius(a_minus))

    if residual > tol.residual_tol:
        notes.append(f"residual {residual:.3e} exceeds {tol.residual_tol:.1e}")
    if margins[0] >= bound:
        notes.append(f"plus operator not stable (radius {margins[0]:.6g})")
    if margins[1] >= bound:
        kind = "anti-stable" if equation == "ricc2" else "stable"
        notes.append(f"minus operator not {kind} (radius {margins[1]:.6g})")
    stabilizing = residual <= tol.residual_tol and margins[0] < bound and margins[1] < bound
    return RiccatiCertificate(
        Q=Q,
        alpha_plus_circ=a_plus,
        alpha_minus_circ=a_minus,
        alpha_minus_circ_inv=a_minus_inv,
        equation=equation,
        residual_norm=residual,
        stabilizing=bool(stabilizing),
        margins=(float(margins[0]), float(margins[1])),
        notes=notes,
    )


def check_invertible_on_circle(rep: StableRepresentation, tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Sample ``R`` at the ``circle_samples`` roots of unity and test invertibility."""
    zs = unit_circle_points(tol.circle_samples)
    vals = eval_R_many(rep, zs)
    worst = min(rcond(v) for v in vals) if rep.m else 1.0
    ok = worst >= tol.inversion_rcond
    notes = [] if ok else [f"R(z) numerically singular on the unit circle (min rcond {worst:.3e})"]
    return Verdict(ok, {"min_rcond_on_circle": worst}, notes)


def _r0_available(rep: StableRepresentation, tol: Tolerances) -> tuple[bool, str]:
    if rep.p_minus and not is_invertible(rep.alpha_minus, tol).ok:
        return False, "alpha_minus singular: R not analytic at 0"
    if not r0_invertible(rep, tol):
        return False, "R(0) singular"
    return True, ""


def _certify(rep: StableRepresentation, Q: np.ndarray, method: str, tol: Tolerances,
             diagnostics: dict | None = None, notes: list[str] | None = None) -> RiccatiCertificate:
    try:
        cert = circ_operators(rep, Q, "ricc1", tol)
    except InadmissibleSolutionError as exc:
        raise NoStabilizingSolution(f"{method}: candidate inadmissible ({exc})") from exc
    cert.method = method
    cert.notes = list(notes or []) + cert.notes
    cert.diagnostics.update(diagnostics or {})
    if not cert.stabilizing:
        raise NoStabilizingSolution(
            f"{method}: candidate is not a stabilizing solution",
            Verdict(False, {"residual_norm": cert.residual_norm, "rho_plus": cert.margins[0],
                            "rho_minus": cert.margins[1]}, cert.notes),
            cert,
        )
    return cert


def _solve_subspace(rep, tol, notes):
    from .subspaces import matching_right

    ok, why = _r0_available(rep, tol)
    if not ok:
        raise NoStabilizingSolution(f"{why}: subspace route unavailable")
    real = stable_to_dichotomous(rep, tol)
    match = matching_right(real, tol)
    if not match.exists:
        raise NoStabilizingSolution(
            "no matching decomposition: no canonical factorization on this side",
            Verdict(False, {"condition": match.condition}, match.notes),
        )
    return _certify(rep, match.angular, "subspace", tol, {"matching_condition": match.condition},
                    notes + match.notes)


def _solve_toeplitz(rep, tol, notes):
    from .toeplitz import toeplitz_q_oracle

    cert = toeplitz_q_oracle(rep, tol)
    cert.notes = notes + cert.notes
    if not cert.stabilizing or cert.equation != "ricc1":
        raise NoStabilizingSolution(
            "toeplitz: truncations did not yield a stabilizing solution",
            Verdict(False, {"residual_norm": cert.residual_norm}, cert.notes),
            cert,
        )
    return cert


def _solve_iterate(rep, tol, notes):
    Q0 = np.zeros((rep.p_minus, rep.p_plus), dtype=np.complex128)
    Q, its, status, step = kernels.riccati_iterate(
        rep.delta, rep.gamma_plus, rep.alpha_plus, rep.beta_plus,
        rep.gamma_minus, rep.alpha_minus, rep.beta_minus, Q0, ITERATE_MAX, ITERATE_STEP,
    )
    diag = {"iterations": int(its), "status": kernels.STATUS_NAMES[status], "last_step": float(step),
            "backend": kernels.BACKEND}
    if status != kernels.CONVERGED:
        raise NoStabilizingSolution(
            f"iterate: fixed-point sweep stopped ({diag['status']} after {its} iterations)",
            Verdict(False, {"iterations": float(its), "last_step": float(step)}, notes),
        )
    return _certify(rep, Q, "iterate", tol, diag, notes)


def solve_right_stabilizing(rep: StableRepresentation, method: str = "auto",
                            tol: Tolerances = DEFAULT_TOL) -> RiccatiCertificate:
    """Find the stabilizing solution of ``ricc1``.

    Parameters
    ----------
    method : {"auto", "subspace", "toeplitz", "iterate"}
        ``auto`` uses ``subspace`` when ``R(0)`` is invertible and
        ``toeplitz`` otherwise.

    Raises
    ------
    InvalidRepresentationError
        If ``rep`` fails :func:`validate_stable`.
    NoStabilizingSolution
        If the chosen method does not produce a certified solution.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    v = validate_stable(rep, tol)
    if not v.ok:
        raise InvalidRepresentationError("; ".join(v.notes))
    circle = check_invertible_on_circle(rep, tol)
    if not circle.ok:
        raise NoStabilizingSolution(circle.notes[0], circle)
    notes: list[str] = []
    if method == "auto":
        ok, why = _r0_available(rep, tol)
        method = "subspace" if ok else "toeplitz"
        if not ok:
            notes.append(f"{why}: subspace route unavailable, used toeplitz")
    if method == "subspace":
        return _solve_subspace(rep, tol, notes)
    if method == "toeplitz":
        return _solve_toeplitz(rep, tol, notes)
    return _solve_iterate(rep, tol, notes)


def solve_left_stabilizing(rep: StableRepresentation, method: str = "auto",
                           tol: Tolerances = DEFAULT_TOL) -> RiccatiCertificate:
    """Stabilizing solution ``Qt`` of the left equation, via the side-swapped representation."""
    swapped = swap_sides(rep)
    right = solve_right_stabilizing(swapped, method, tol)
    cert = circ_operators(rep, right.Q, "left", tol)
    cert.method = right.method
    cert.notes = right.notes + cert.notes
    cert.diagnostics.update(right.diagnostics)
    if not cert.stabilizing:
        raise NoStabilizingSolution("left certificate failed re-verification", Verdict(False, {}, cert.notes), cert)
    return cert
