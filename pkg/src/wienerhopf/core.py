"""Numeric foundations shared by every module.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; the
helpers here coerce and validate them.  Invertibility is always a
thresholded numerical predicate driven by :class:`Tolerances`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

__all__ = [
    "WienerHopfError",
    "DimensionError",
    "SingularMatrixError",
    "NotDichotomousError",
    "SpectraOverlapError",
    "InvalidRepresentationError",
    "Tolerances",
    "Verdict",
    "as_matrix",
    "norm2",
    "spectral_radius",
    "rcond",
    "is_invertible",
    "require_invertible",
    "solve_sylvester",
    "unit_circle_points",
]


class WienerHopfError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(WienerHopfError, ValueError):
    """Operands have incompatible shapes."""


class SingularMatrixError(WienerHopfError, ArithmeticError):
    """A matrix that must be inverted is singular at the working tolerance."""


class NotDichotomousError(WienerHopfError):
    """A spectrum meets the unit circle within the spectral margin."""


class SpectraOverlapError(WienerHopfError):
    """A Sylvester equation has no unique solution."""


class InvalidRepresentationError(WienerHopfError, ValueError):
    """Input data violate the hypotheses of the representation type."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used to turn exact statements into predicates.

    Parameters
    ----------
    spectral_margin : float
        How far inside (or outside) the unit circle a spectral radius must
        lie to count as stable (anti-stable).
    inversion_rcond : float
        Reciprocal condition number below which a matrix is treated as
        singular.
    residual_tol : float
        Acceptance threshold for equation and factorization residuals.
    circle_samples : int
        Number of roots of unity used for verification on the circle.
    """

    spectral_margin: float = 1e-9
    inversion_rcond: float = 1e-10
    residual_tol: float = 1e-8
    circle_samples: int = 64

    def __post_init__(self):
        for name in ("spectral_margin", "inversion_rcond", "residual_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")
        if self.spectral_margin >= 1:
            raise ValueError("spectral_margin must be < 1")
        if int(self.circle_samples) != self.circle_samples or self.circle_samples <= 0:
            raise ValueError("circle_samples must be a positive integer")

    @property
    def stable_bound(self) -> float:
        return 1.0 - self.spectral_margin


DEFAULT_TOL = Tolerances()


@dataclass
class Verdict:
    """Outcome of a check: a flag, the numbers behind it, and free-text notes."""

    ok: bool
    measures: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.ok)

    def to_dict(self) -> dict:
        return {"ok": bool(self.ok), "measures": dict(self.measures), "notes": list(self.notes)}


def as_matrix(x, rows: int | None = None, cols: int | None = None, name: str = "matrix") -> np.ndarray:
    """Coerce ``x`` to a finite 2-D complex array, optionally checking its shape.

    Scalars become 1x1 matrices.  A 1-D input is rejected because the
    row/column orientation would be a guess.
    """
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if rows is not None and a.shape[0] != rows:
        raise DimensionError(f"{name} must have {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise DimensionError(f"{name} must have {cols} columns, got {a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf")
    return a


def _require_square(M: np.ndarray, name: str = "matrix") -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")


def norm2(M) -> float:
    """Operator 2-norm (largest singular value); 0 for empty matrices."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def spectral_radius(M) -> float:
    """Largest eigenvalue modulus of a square matrix (0 for the 0x0 matrix)."""
    M = np.asarray(M, dtype=np.complex128)
    _require_square(M)
    if M.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(linalg.eigvals(M))))


def rcond(M, scale: float | None = None) -> float:
    """Reciprocal 2-norm condition number, ``s_min / s_max``.

    With ``scale`` given, ``s_min / max(s_max, scale)`` instead, so that a
    matrix formed by cancellation between terms of size ``scale`` is judged
    against that size.  The zero matrix has ``rcond == 0``; the empty
    matrix counts as perfectly conditioned.
    """
    M = np.asarray(M, dtype=np.complex128)
    _require_square(M)
    if M.shape[0] == 0:
        return 1.0
    s = linalg.svdvals(M)
    top = s[0] if scale is None else max(s[0], float(scale))
    if top == 0.0:
        return 0.0
    return float(s[-1] / top)


def is_invertible(M, tol: Tolerances = DEFAULT_TOL, scale: float | None = None) -> Verdict:
    """Decide invertibility by comparing :func:`rcond` with ``tol.inversion_rcond``."""
    r = rcond(M, scale)
    ok = r >= tol.inversion_rcond
    notes = [] if ok else [f"rcond {r:.3e} below {tol.inversion_rcond:.1e}"]
    return Verdict(ok, {"rcond": r}, notes)


def require_invertible(M, tol: Tolerances, what: str, scale: float | None = None) -> np.ndarray:
    """Return ``M`` unchanged, raising :class:`SingularMatrixError` if it is singular."""
    v = is_invertible(M, tol, scale)
    if not v.ok:
        raise SingularMatrixError(f"{what} is not invertible (rcond={v.measures['rcond']:.3e})")
    return M


def solve_sylvester(A, B, C, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Solve ``Z A - B Z = C`` by Schur-form back substitution.

    Parameters
    ----------
    A : (m, m) array_like
    B : (n, n) array_like
    C : (n, m) array_like

    Returns
    -------
    Z : (n, m) ndarray

    Raises
    ------
    SpectraOverlapError
        If an eigenvalue of ``A`` and one of ``B`` are closer than
        ``tol.spectral_margin`` (relative to the spectra's scale).
    """
    A = as_matrix(A, name="A")
    B = as_matrix(B, name="B")
    _require_square(A, "A")
    _require_square(B, "B")
    m, n = A.shape[0], B.shape[0]
    C = as_matrix(C, n, m, name="C")
    if m == 0 or n == 0:
        return np.zeros((n, m), dtype=np.complex128)

    SA, UA = linalg.schur(A, output="complex")
    SB, UB = linalg.schur(B, output="complex")
    la, lb = np.diag(SA), np.diag(SB)
    gap = float(np.min(np.abs(la[None, :] - lb[:, None])))
    scale = max(1.0, float(np.max(np.abs(la))), float(np.max(np.abs(lb))))
    if gap <= tol.spectral_margin * scale:
        raise SpectraOverlapError(f"spectra of A and B overlap (gap {gap:.3e})")

    # with Y = UB^H Z UA and F = UB^H C UA:  Y SA - SB Y = F, column by column
    F = UB.conj().T @ C @ UA
    Y = np.zeros((n, m), dtype=np.complex128)
    eye = np.eye(n)
    for k in range(m):
        rhs = F[:, k] - Y[:, :k] @ SA[:k, k]
        Y[:, k] = linalg.solve_triangular(SA[k, k] * eye - SB, rhs, lower=False)
    return UB @ Y @ UA.conj().T


def unit_circle_points(n: int) -> np.ndarray:
    """The ``n``-th roots of unity, starting at 1."""
    return np.exp(2j * np.pi * np.arange(n) / n)
