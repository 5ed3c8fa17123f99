"""Solution sets of the right Riccati equations and related invertibility tests.

Three sets of candidate solutions are distinguished: solutions of
``ricc1``, solutions of ``ricc2``, and the subset ``ricc2'`` of the latter
at which ``delta - gm Q bp`` is invertible.  With ``R(0)`` invertible the
first and last coincide.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .core import (
    DEFAULT_TOL,
    InvalidRepresentationError,
    Tolerances,
    Verdict,
    as_matrix,
    is_invertible,
    norm2,
    rcond,
)
from .representation import StableRepresentation
from .riccati import (
    alpha_minus_circ_inv_formula,
    circ_operators,
    k_matrix,
    r0_invertible,
    residual_ricc1,
    residual_ricc2,
)

__all__ = [
    "SolutionClassification",
    "ScalarSolutionSets",
    "classify",
    "scalar_solution_sets",
    "check_r0_lemma",
    "find_invertibilizing_q",
]

# interpolation nodes for the cleared scalar equations (degree <= 3)
_MIN_NODES = 16
_COEF_RTOL = 1e-11


@dataclass
class SolutionClassification:
    Q: np.ndarray
    in_ricc1: bool
    in_ricc2: bool
    in_ricc2_prime: bool
    admissible_ricc1: bool
    r0_invertible: bool
    residual_ricc1: float | None = None
    residual_ricc2: float | None = None

    def to_dict(self) -> dict:
        return {
            "Q": self.Q,
            "in_ricc1": self.in_ricc1,
            "in_ricc2": self.in_ricc2,
            "in_ricc2_prime": self.in_ricc2_prime,
            "admissible_ricc1": self.admissible_ricc1,
            "r0_invertible": self.r0_invertible,
            "residual_ricc1": self.residual_ricc1,
            "residual_ricc2": self.residual_ricc2,
        }


def classify(rep: StableRepresentation, Q, tol: Tolerances = DEFAULT_TOL) -> SolutionClassification:
    """Membership of ``Q`` in each solution set, judged against ``residual_tol``."""
    Q = as_matrix(Q, rep.p_minus, rep.p_plus, name="Q")
    r0_ok = r0_invertible(rep, tol)
    K, scale = k_matrix(rep, Q)
    admissible = is_invertible(K, tol, scale).ok
    res1 = residual_ricc1(rep, Q, tol) if admissible else None
    res2 = residual_ricc2(rep, Q, tol) if r0_ok else None
    in1 = res1 is not None and res1 <= tol.residual_tol
    in2 = res2 is not None and res2 <= tol.residual_tol
    return SolutionClassification(Q, in1, in2, in2 and admissible, admissible, r0_ok, res1, res2)


def _adjugate(M: np.ndarray) -> np.ndarray:
    """Classical adjoint from cofactors; exact polynomial behaviour even for singular ``M``."""
    m = M.shape[0]
    if m == 1:
        return np.ones((1, 1), dtype=np.complex128)
    adj = np.empty((m, m), dtype=np.complex128)
    idx = np.arange(m)
    for i, j in itertools.product(range(m), range(m)):
        minor = M[np.ix_(idx != j, idx != i)]
        adj[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


def _interpolate(fn, degree_bound: int, radius: float) -> np.ndarray:
    """Monomial coefficients (ascending) of a polynomial known by its values, trailing noise removed.

    ``fn(q)`` returns the value and the size of the terms that were summed
    to produce it.  A coefficient counts as zero when its contribution on
    the node circle is below ``_COEF_RTOL`` times the largest term size, so
    a polynomial that cancels identically yields an empty array.
    """
    n = max(_MIN_NODES, degree_bound + 1)
    nodes = radius * np.exp(2j * np.pi * np.arange(n) / n)
    pairs = [fn(q) for q in nodes]
    vals = np.array([v for v, _ in pairs])
    size = max(s for _, s in pairs)
    scaled = np.fft.fft(vals) / n
    keep = np.nonzero(np.abs(scaled) > _COEF_RTOL * size)[0]
    if keep.size == 0:
        return np.zeros(0, dtype=np.complex128)
    return scaled[: keep[-1] + 1] / radius ** np.arange(keep[-1] + 1)


def _roots(coef: np.ndarray) -> np.ndarray:
    if coef.size <= 1:
        return np.zeros(0, dtype=np.complex128)
    return np.roots(coef[::-1])


def _dedupe(values, rtol: float = 1e-7) -> list[complex]:
    out: list[complex] = []
    for v in sorted(values, key=lambda c: (c.real, c.imag)):
        if not any(abs(v - w) <= rtol * max(1.0, abs(w)) for w in out):
            out.append(complex(v))
    return out


@dataclass
class ScalarSolutionSets:
    """All solutions of the two right equations for one-dimensional state spaces.

    ``ricc1_all`` / ``ricc2_all`` mark the degenerate case in which the
    cleared equation vanishes identically, so every admissible ``q`` is a
    solution; the corresponding lists are then empty.
    """

    r0_invertible: bool
    ricc1: list[SolutionClassification]
    ricc2: list[SolutionClassification]
    ricc1_all: bool = False
    ricc2_all: bool = False
    rejected: list[complex] = field(default_factory=list)
    ricc1_polynomial: np.ndarray | None = None
    ricc2_polynomial: np.ndarray | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ricc1_roots(self) -> list[complex]:
        return [complex(c.Q[0, 0]) for c in self.ricc1]

    @property
    def ricc2_roots(self) -> list[complex]:
        return [complex(c.Q[0, 0]) for c in self.ricc2]

    @property
    def ricc2_prime_roots(self) -> list[complex]:
        return [complex(c.Q[0, 0]) for c in self.ricc2 if c.in_ricc2_prime]

    def to_dict(self) -> dict:
        return {
            "r0_invertible": self.r0_invertible,
            "ricc1": {"all_solve": self.ricc1_all, "roots": self.ricc1_roots,
                      "members": self.ricc1, "polynomial": self.ricc1_polynomial},
            "ricc2": {"all_solve": self.ricc2_all, "roots": self.ricc2_roots,
                      "members": self.ricc2, "polynomial": self.ricc2_polynomial},
            "ricc2_prime_roots": self.ricc2_prime_roots,
            "rejected_spurious": self.rejected,
            "notes": list(self.notes),
        }


def _data_radius(rep: StableRepresentation) -> float:
    mats = rep.matrices().values()
    return max(1.0, max(float(np.max(np.abs(M))) if M.size else 0.0 for M in mats))


def scalar_solution_sets(rep: StableRepresentation, tol: Tolerances = DEFAULT_TOL) -> ScalarSolutionSets:
    """Enumerate the solutions of both right equations when ``p+ == p- == 1``.

    ``ricc1`` is cleared of its denominator by multiplying with
    ``det K(q)`` and replacing ``K(q)^{-1}`` by the adjugate; the resulting
    polynomial is recovered by interpolation on a circle and its roots are
    filtered for admissibility.  ``ricc2`` is polynomial in ``q`` already.
    """
    rep.check_dimensions()
    if rep.p_plus != 1 or rep.p_minus != 1:
        raise InvalidRepresentationError("scalar enumeration needs one-dimensional state spaces")
    m = rep.m
    ap, am = rep.alpha_plus[0, 0], rep.alpha_minus[0, 0]
    gp, bp, gm, bm, d = rep.gamma_plus, rep.beta_plus, rep.gamma_minus, rep.beta_minus, rep.delta
    r0_ok = r0_invertible(rep, tol)
    radius = _data_radius(rep)
    notes: list[str] = []

    def K(q):
        return d - q * (gm @ bp)

    def det_bound(M):
        # Hadamard: |det M| <= product of column norms
        return float(np.prod(np.linalg.norm(M, axis=0)))

    def cleared1(q):
        Kq = K(q)
        left, right = bm - am * q * bp, gp - gm * q * ap
        first = np.linalg.det(Kq) * q * (1 - am * ap)
        second = (left @ _adjugate(Kq) @ right)[0, 0]
        size = det_bound(Kq) * abs(q * (1 - am * ap)) + norm2(left) * norm2(_adjugate(Kq)) * norm2(right)
        return first - second, size

    def det_k(q):
        Kq = K(q)
        return np.linalg.det(Kq), det_bound(Kq)

    # det K and adj K are affine in q (rank-one dependence), so the degree is at most 3
    p1 = _interpolate(cleared1, 3, radius)
    detK = _interpolate(det_k, m, radius)

    ricc1: list[SolutionClassification] = []
    rejected: list[complex] = []
    ricc1_all = False
    if detK.size == 0:
        notes.append("delta - gamma_minus q beta_plus is singular for every q: ricc1 has no admissible q")
    elif p1.size == 0:
        ricc1_all = True
        notes.append("ricc1 vanishes identically: every admissible q solves it")
    else:
        for q in _dedupe(_roots(p1)):
            Q = np.array([[q]])
            Kq, scale = k_matrix(rep, Q)
            if not is_invertible(Kq, tol, scale).ok:
                rejected.append(q)
                continue
            c = classify(rep, Q, tol)
            if c.in_ricc1:
                ricc1.append(c)
            else:
                notes.append(f"root {q:.6g} of the cleared ricc1 failed the residual check")

    ricc2: list[SolutionClassification] = []
    ricc2_all = False
    p2 = None
    if r0_ok:
        am_inv = 1.0 / am
        R0 = d - gm @ bm * am_inv

        def poly2(q):
            left, right = bm - am * q * bp, np.linalg.solve(R0, gp - gm * am_inv * q)
            value = q - am * q * ap - (left @ right)[0, 0]
            return value, abs(q) * (1 + abs(am * ap)) + norm2(left) * norm2(right)

        p2 = _interpolate(poly2, 2, radius)
        if p2.size == 0:
            ricc2_all = True
            notes.append("ricc2 vanishes identically: every q solves it")
        else:
            for q in _dedupe(_roots(p2)):
                c = classify(rep, np.array([[q]]), tol)
                if c.in_ricc2:
                    ricc2.append(c)
                else:
                    notes.append(f"root {q:.6g} of ricc2 failed the residual check")
    else:
        notes.append("R(0) not invertible: ricc2 has no solutions")
    return ScalarSolutionSets(r0_ok, ricc1, ricc2, ricc1_all, ricc2_all, rejected, p1, p2, notes)


def check_r0_lemma(rep: StableRepresentation, Q, tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Check the invertibility relations between ``K``, ``R(0)`` and the closed-loop operators at ``Q``.

    (a) ``K`` and ``R(0)`` invertible: ``alpha_minus_circ`` is invertible and its
        inverse equals :func:`alpha_minus_circ_inv_formula`.
    (b) ``K`` invertible, ``R(0)`` singular: ``alpha_minus_circ`` is singular.
    (c) ``R(0)`` invertible: ``K`` invertible iff the formula's value is invertible.

    Raises
    ------
    InvalidRepresentationError
        If ``alpha_minus`` is singular.
    """
    Q = as_matrix(Q, rep.p_minus, rep.p_plus, name="Q")
    if rep.p_minus and not is_invertible(rep.alpha_minus, tol).ok:
        raise InvalidRepresentationError("alpha_minus must be invertible")
    K, scale = k_matrix(rep, Q)
    k_ok = is_invertible(K, tol, scale).ok
    r0_ok = r0_invertible(rep, tol)
    measures: dict[str, float] = {"rcond_K": rcond(K, scale)}
    notes: list[str] = []
    ok = True

    rhs = None
    if r0_ok:
        rhs = alpha_minus_circ_inv_formula(rep, Q, tol)
        rhs_ok = is_invertible(rhs, tol).ok
        measures["rcond_formula"] = rcond(rhs)
        measures["formula_norm"] = norm2(rhs)
        if k_ok != rhs_ok:
            ok = False
            notes.append("(c) failed: invertibility of K and of the formula disagree")
        else:
            notes.append("(c) holds")
    if k_ok:
        cert = circ_operators(rep, Q, "ricc1", tol)
        measures["rcond_alpha_minus_circ"] = rcond(cert.alpha_minus_circ)
        amc_ok = is_invertible(cert.alpha_minus_circ, tol).ok
        if r0_ok:
            if not amc_ok:
                ok = False
                notes.append("(a) failed: alpha_minus_circ is singular")
            else:
                gap = norm2(np.linalg.inv(cert.alpha_minus_circ) - rhs) / max(1.0, norm2(rhs))
                measures["inverse_formula_gap"] = gap
                if gap > 1e-9:
                    ok = False
                    notes.append(f"(a) failed: inverse differs from the formula by {gap:.3e}")
                else:
                    notes.append("(a) holds")
        elif amc_ok:
            ok = False
            notes.append("(b) failed: alpha_minus_circ invertible although R(0) is singular")
        else:
            notes.append("(b) holds")
    return Verdict(ok, measures, notes)


def _orth_split(M: np.ndarray, thresh: float):
    """Orthonormal bases of range(M) and its complement, and of ker(M) and its complement."""
    U, s, Vh = linalg.svd(M, full_matrices=True) if M.size else (
        np.eye(M.shape[0]), np.zeros(0), np.eye(M.shape[1]))
    r = int(np.sum(s > thresh))
    V = Vh.conj().T
    return U[:, :r], U[:, r:], V[:, :r], V[:, r:], r


def find_invertibilizing_q(U, V, W, tol: Tolerances = DEFAULT_TOL) -> np.ndarray | None:
    """Some ``Q`` making ``U - V Q W`` invertible, or ``None`` if no such ``Q`` exists.

    Such a ``Q`` exists iff ``U`` maps onto the orthogonal complement of
    ``Im V`` after projection and ``U`` is injective on ``Ker W``.  The
    construction replaces the block of ``U`` that ``V Q W`` can reach by a
    completion making the whole matrix invertible.
    """
    U = as_matrix(U, name="U")
    n = U.shape[0]
    V = as_matrix(V, rows=n, name="V")
    W = as_matrix(W, cols=n, name="W")
    k, l = V.shape[1], W.shape[0]
    scale = max(norm2(U), norm2(V), norm2(W), 1.0)
    thresh = scale * tol.inversion_rcond

    # codomain: V^perp (+) V ; domain: ker W (+) ker W^perp
    Y2, Y1, _, _, _ = _orth_split(V, thresh)
    _, _, X2, X1, _ = _orth_split(W, thresh)
    if Y1.shape[1] and np.linalg.matrix_rank(Y1.conj().T @ U, tol=thresh) != Y1.shape[1]:
        return None
    if X1.shape[1] and np.linalg.matrix_rank(U @ X1, tol=thresh) != X1.shape[1]:
        return None

    U11 = Y1.conj().T @ U @ X1
    U12 = Y1.conj().T @ U @ X2
    U21 = Y2.conj().T @ U @ X1
    U22 = Y2.conj().T @ U @ X2

    L_r, L_perp, R_r, R_ker, r = _orth_split(U11, thresh)
    s = np.diag(L_r.conj().T @ U11 @ R_r) if r else np.zeros(0)
    G1, G2, _, _, _ = _orth_split(U21 @ R_ker, thresh)
    _, _, H1, H2, _ = _orth_split(L_perp.conj().T @ U12, thresh)
    if G2.shape[1] != H2.shape[1]:
        return None
    G = np.hstack([G1, G2])
    H = np.hstack([H1, H2])
    Tb = (G.conj().T @ U21 @ R_r / s) @ (L_r.conj().T @ U12 @ H) if r else np.zeros((G.shape[1], H.shape[1]))
    t0 = G2.shape[1]
    if t0:
        Tb[-t0:, -t0:] += (norm2(U) + 1.0) * np.eye(t0)
    T = G @ Tb @ H.conj().T

    V2 = Y2.conj().T @ V
    W2 = W @ X2
    Q = np.linalg.pinv(V2) @ (U22 - T) @ np.linalg.pinv(W2) if (k and l) else np.zeros((k, l), np.complex128)
    return Q
