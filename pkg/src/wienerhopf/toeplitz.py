"""Finite sections of the block Toeplitz operator of a stable representation.

With ``T_N`` the ``N x N`` block matrix whose ``(i, j)`` block is the
Fourier coefficient ``R_{i-j}``, ``C_N = [bm, am bm, ..., am^{N-1} bm]`` and
``O_N = [gp; gp ap; ...; gp ap^{N-1}]``, the matrices
``Q_N = C_N T_N^{-1} O_N`` approach the stabilizing solution of the right
Riccati equation when ``R`` admits a right canonical factorization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from . import kernels
from .core import DEFAULT_TOL, Tolerances, norm2
from .representation import StableRepresentation
from .riccati import (
    InadmissibleSolutionError,
    NoStabilizingSolution,
    RiccatiCertificate,
    circ_operators,
)

__all__ = [
    "ToeplitzTruncation",
    "ToeplitzInconclusive",
    "ProfileRow",
    "MAX_ORDER",
    "coefficient_sequence",
    "build_truncation",
    "q_truncated",
    "toeplitz_q_oracle",
    "toeplitz_invertibility_profile",
]

# upper bound on m*N, the order of the assembled matrix
MAX_ORDER = 4096
_UNDERFLOW = 1e-300


class ToeplitzInconclusive(NoStabilizingSolution):
    """Truncations were singular or did not settle within the size cap."""


@dataclass
class ToeplitzTruncation:
    N: int
    T: np.ndarray
    C_trunc: np.ndarray
    O_trunc: np.ndarray
    tail_estimate: float


@dataclass
class ProfileRow:
    N: int
    rcond: float
    q_delta: float | None = None

    def to_dict(self) -> dict:
        return {"N": self.N, "rcond": self.rcond, "q_delta": self.q_delta}


def _powers_times(alpha: np.ndarray, right: np.ndarray, count: int) -> list[np.ndarray]:
    """``[right, alpha right, ..., alpha^{count-1} right]`` with underflow flushed to zero."""
    out = []
    acc = right.copy()
    dead = False
    for k in range(count):
        if k:
            if dead:
                out.append(np.zeros_like(right))
                continue
            acc = alpha @ acc
            if acc.size == 0 or np.max(np.abs(acc)) < _UNDERFLOW:
                dead = True
                out.append(np.zeros_like(right))
                continue
        out.append(acc)
    return out


def coefficient_sequence(rep: StableRepresentation, N: int) -> np.ndarray:
    """Fourier coefficients ``R_{-(N-1)}, ..., R_{N-1}`` stacked as ``(2N-1, m, m)``."""
    rep.check_dimensions()
    plus = _powers_times(rep.alpha_plus, rep.beta_plus, N - 1)
    minus = _powers_times(rep.alpha_minus, rep.beta_minus, N - 1)
    m = rep.m
    out = np.empty((2 * N - 1, m, m), dtype=np.complex128)
    out[N - 1] = rep.delta
    for k in range(1, N):
        out[N - 1 + k] = rep.gamma_plus @ plus[k - 1]
        out[N - 1 - k] = rep.gamma_minus @ minus[k - 1]
    return out


def build_truncation(rep: StableRepresentation, N: int) -> ToeplitzTruncation:
    """Assemble ``T_N``, ``C_N`` and ``O_N``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    T = kernels.block_toeplitz(coefficient_sequence(rep, N), N)
    cols = _powers_times(rep.alpha_minus, rep.beta_minus, N + 1)
    C_trunc = np.hstack(cols[:N]) if rep.m else np.zeros((rep.p_minus, 0), np.complex128)
    rows = _powers_times(rep.alpha_plus.T, rep.gamma_plus.T, N + 1)
    O_trunc = np.vstack([r.T for r in rows[:N]]) if rep.m else np.zeros((0, rep.p_plus), np.complex128)
    tail = norm2(cols[N]) + norm2(rows[N])
    return ToeplitzTruncation(N, T, C_trunc, O_trunc, tail)


def _lu_rcond(T: np.ndarray):
    if T.shape[0] == 0:
        return None, 1.0
    with warnings.catch_warnings():
        # exact singularity is reported through rcond == 0
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(T, check_finite=False)
    anorm = float(np.max(np.sum(np.abs(T), axis=0)))
    if anorm == 0.0:
        return (lu, piv), 0.0
    rc, info = linalg.lapack.zgecon(lu, anorm, norm="1")
    return (lu, piv), float(rc) if info == 0 else 0.0


def q_truncated(rep: StableRepresentation, N: int) -> tuple[np.ndarray | None, float]:
    """``Q_N = C_N T_N^{-1} O_N`` and the 1-norm reciprocal condition estimate of ``T_N``.

    ``Q_N`` is ``None`` when ``T_N`` is exactly singular.
    """
    tr = build_truncation(rep, N)
    lu, rc = _lu_rcond(tr.T)
    if rc == 0.0:
        return None, 0.0
    if lu is None:
        return np.zeros((rep.p_minus, rep.p_plus), np.complex128), rc
    return tr.C_trunc @ linalg.lu_solve(lu, tr.O_trunc, check_finite=False), rc


def _max_blocks(rep: StableRepresentation) -> int:
    return max(1, MAX_ORDER // max(rep.m, 1))


def toeplitz_q_oracle(rep: StableRepresentation, tol: Tolerances = DEFAULT_TOL,
                      start: int = 8) -> RiccatiCertificate:
    """Double ``N`` from ``start`` until ``||Q_{2N} - Q_N|| <= residual_tol`` and certify the limit.

    The certificate is for ``ricc1`` when ``delta - gm Q bp`` is invertible at
    the limit, otherwise for ``ricc2`` when ``R(0)`` is invertible.

    Raises
    ------
    ToeplitzInconclusive
        If no two consecutive admissible truncations agree before ``m*N``
        exceeds :data:`MAX_ORDER`, or neither equation is admissible at the limit.
    """
    history: list[dict] = []
    N, N_cap = start, _max_blocks(rep)
    prev = None
    converged = None
    while N <= N_cap:
        Q, rc = q_truncated(rep, N)
        entry = {"N": N, "rcond": rc, "q_delta": None}
        history.append(entry)
        if Q is not None and rc >= tol.inversion_rcond:
            if prev is not None:
                entry["q_delta"] = norm2(Q - prev)
                if entry["q_delta"] <= tol.residual_tol:
                    converged = Q
                    break
            prev = Q
        else:
            prev = None
        N *= 2
    diagnostics = {"history": history, "backend": kernels.BACKEND}
    if converged is None:
        raise ToeplitzInconclusive(
            "toeplitz: truncations did not settle; factorization existence inconclusive",
        )
    cert = None
    for equation in ("ricc1", "ricc2"):
        try:
            cert = circ_operators(rep, converged, equation, tol)
            break
        except InadmissibleSolutionError:
            continue
    if cert is None:
        raise ToeplitzInconclusive("toeplitz: limit is admissible for neither right equation")
    cert.method = "toeplitz"
    cert.diagnostics.update(diagnostics)
    return cert


def toeplitz_invertibility_profile(rep: StableRepresentation, N_list) -> list[ProfileRow]:
    """Condition estimates of ``T_N`` for each ``N``; ``q_delta`` filled where ``2N`` is also listed."""
    N_list = [int(n) for n in N_list]
    if any(n < 1 for n in N_list):
        raise ValueError("sizes must be positive")
    Qs: dict[int, np.ndarray | None] = {}
    rows = []
    for N in N_list:
        Q, rc = q_truncated(rep, N)
        Qs[N] = Q
        rows.append(ProfileRow(N, rc))
    for row in rows:
        a, b = Qs.get(row.N), Qs.get(2 * row.N)
        if a is not None and b is not None:
            row.q_delta = norm2(b - a)
    return rows
