"""Input data models: stable representations and dichotomous realizations.

A stable representation describes

    R(z) = delta + z gamma_plus (I - z alpha_plus)^{-1} beta_plus
                 + gamma_minus (z I - alpha_minus)^{-1} beta_minus

with both ``alpha_plus`` and ``alpha_minus`` stable.  A dichotomous
realization describes ``R(z) = D + z C (I - z A)^{-1} B`` where ``A`` has no
spectrum on the unit circle; it is stored in coordinates in which ``A`` is
block diagonal, anti-stable block first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOL,
    DimensionError,
    Tolerances,
    Verdict,
    as_matrix,
    is_invertible,
    norm2,
    require_invertible,
    spectral_radius,
)

__all__ = [
    "StableRepresentation",
    "DichotomousRealization",
    "FourierCoefficient",
    "validate_stable",
    "validate_dichotomous",
    "eval_R",
    "eval_R_many",
    "eval_R0",
    "eval_transfer",
    "eval_transfer_many",
    "fourier_coefficient",
    "stable_to_dichotomous",
    "dichotomous_to_stable",
    "a_cross",
    "sharp_dual",
    "swap_sides",
]

_STABLE_FIELDS = (
    "delta",
    "gamma_plus",
    "alpha_plus",
    "beta_plus",
    "gamma_minus",
    "alpha_minus",
    "beta_minus",
)


@dataclass(frozen=True, eq=False)
class StableRepresentation:
    """The seven matrices of a stable representation.

    Shapes (``m`` = dim U, ``p+`` = dim X+, ``p-`` = dim X-)::

        delta        m  x m
        gamma_plus   m  x p+     alpha_plus  p+ x p+    beta_plus  p+ x m
        gamma_minus  m  x p-     alpha_minus p- x p-    beta_minus p- x m

    Construction only coerces to finite complex matrices; shape and
    stability checks live in :func:`validate_stable`, which reports rather
    than raises.
    """

    delta: np.ndarray
    gamma_plus: np.ndarray
    alpha_plus: np.ndarray
    beta_plus: np.ndarray
    gamma_minus: np.ndarray
    alpha_minus: np.ndarray
    beta_minus: np.ndarray

    def __post_init__(self):
        for name in _STABLE_FIELDS:
            object.__setattr__(self, name, as_matrix(getattr(self, name), name=name))

    @property
    def m(self) -> int:
        return self.delta.shape[0]

    @property
    def p_plus(self) -> int:
        return self.alpha_plus.shape[0]

    @property
    def p_minus(self) -> int:
        return self.alpha_minus.shape[0]

    def dimension_problems(self) -> list[str]:
        m, pp, pm = self.delta.shape[0], self.alpha_plus.shape[0], self.alpha_minus.shape[0]
        expected = {
            "delta": (m, m),
            "gamma_plus": (m, pp),
            "alpha_plus": (pp, pp),
            "beta_plus": (pp, m),
            "gamma_minus": (m, pm),
            "alpha_minus": (pm, pm),
            "beta_minus": (pm, m),
        }
        return [
            f"{name} has shape {getattr(self, name).shape}, expected {shape}"
            for name, shape in expected.items()
            if getattr(self, name).shape != shape
        ]

    def check_dimensions(self) -> None:
        problems = self.dimension_problems()
        if problems:
            raise DimensionError("; ".join(problems))

    def matrices(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in _STABLE_FIELDS}

    def allclose(self, other: "StableRepresentation", atol: float = 1e-12) -> bool:
        return all(
            a.shape == b.shape and np.allclose(a, b, rtol=0, atol=atol)
            for a, b in zip(self.matrices().values(), other.matrices().values())
        )

    @classmethod
    def constant(cls, delta) -> "StableRepresentation":
        """A representation of the constant function ``delta`` with empty state spaces."""
        delta = as_matrix(delta, name="delta")
        m = delta.shape[0]
        z = np.zeros
        return cls(delta, z((m, 0)), z((0, 0)), z((0, m)), z((m, 0)), z((0, 0)), z((0, m)))


@dataclass(frozen=True, eq=False)
class DichotomousRealization:
    """``R(z) = D + z C (I - z A)^{-1} B`` with ``A = diag(A_minus, A_plus)``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    dim_minus: int
    dim_plus: int

    def __post_init__(self):
        for name in ("A", "B", "C", "D"):
            object.__setattr__(self, name, as_matrix(getattr(self, name), name=name))
        n = self.dim_minus + self.dim_plus
        m = self.D.shape[0]
        if self.dim_minus < 0 or self.dim_plus < 0:
            raise DimensionError("state dimensions must be non-negative")
        for name, shape in (("A", (n, n)), ("B", (n, m)), ("C", (m, n)), ("D", (m, m))):
            if getattr(self, name).shape != shape:
                raise DimensionError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def n(self) -> int:
        return self.dim_minus + self.dim_plus

    @property
    def m(self) -> int:
        return self.D.shape[0]

    @property
    def A_minus(self) -> np.ndarray:
        k = self.dim_minus
        return self.A[:k, :k]

    @property
    def A_plus(self) -> np.ndarray:
        k = self.dim_minus
        return self.A[k:, k:]

    @property
    def B_minus(self) -> np.ndarray:
        return self.B[: self.dim_minus]

    @property
    def B_plus(self) -> np.ndarray:
        return self.B[self.dim_minus :]

    @property
    def C_minus(self) -> np.ndarray:
        return self.C[:, : self.dim_minus]

    @property
    def C_plus(self) -> np.ndarray:
        return self.C[:, self.dim_minus :]

    def allclose(self, other: "DichotomousRealization", atol: float = 1e-12) -> bool:
        if (self.dim_minus, self.dim_plus) != (other.dim_minus, other.dim_plus):
            return False
        return all(
            np.allclose(getattr(self, k), getattr(other, k), rtol=0, atol=atol) for k in "ABCD"
        )


@dataclass(frozen=True)
class FourierCoefficient:
    index: int
    value: np.ndarray


def validate_stable(rep: StableRepresentation, tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Check shapes and that both ``alpha`` blocks are stable with margin."""
    problems = rep.dimension_problems()
    if problems:
        return Verdict(False, {}, problems)
    rho_p = spectral_radius(rep.alpha_plus)
    rho_m = spectral_radius(rep.alpha_minus)
    notes = []
    if rho_p >= tol.stable_bound:
        notes.append(f"alpha_plus not stable: spectral radius {rho_p:.6g}")
    if rho_m >= tol.stable_bound:
        notes.append(f"alpha_minus not stable: spectral radius {rho_m:.6g}")
    return Verdict(not notes, {"rho_alpha_plus": rho_p, "rho_alpha_minus": rho_m}, notes)


def validate_dichotomous(real: DichotomousRealization, tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Check the block-diagonal form of ``A`` and the dichotomy of its blocks."""
    k = real.dim_minus
    notes = []
    measures: dict[str, float] = {}
    off = max(norm2(real.A[:k, k:]), norm2(real.A[k:, :k]))
    measures["off_diagonal_norm"] = off
    if off != 0.0:
        notes.append("A is not block diagonal with respect to the state split")
    rho_plus = spectral_radius(real.A_plus)
    measures["rho_A_plus"] = rho_plus
    if rho_plus >= tol.stable_bound:
        notes.append(f"A_plus not stable: spectral radius {rho_plus:.6g}")
    inv = is_invertible(real.A_minus, tol)
    measures["rcond_A_minus"] = inv.measures["rcond"]
    if not inv.ok:
        notes.append("A_minus is not invertible")
    else:
        rho_inv = spectral_radius(np.linalg.inv(real.A_minus)) if k else 0.0
        measures["rho_A_minus_inv"] = rho_inv
        if rho_inv >= tol.stable_bound:
            notes.append(f"A_minus not anti-stable: spectral radius of inverse {rho_inv:.6g}")
    return Verdict(not notes, measures, notes)


def eval_R(rep: StableRepresentation, z: complex, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Evaluate the represented function at a single point ``z``."""
    rep.check_dimensions()
    pp, pm = rep.p_plus, rep.p_minus
    val = rep.delta.copy()
    if pp:
        M = np.eye(pp) - z * rep.alpha_plus
        require_invertible(M, tol, f"I - z alpha_plus at z={z}")
        val += z * rep.gamma_plus @ np.linalg.solve(M, rep.beta_plus)
    if pm:
        M = z * np.eye(pm) - rep.alpha_minus
        require_invertible(M, tol, f"z I - alpha_minus at z={z}")
        val += rep.gamma_minus @ np.linalg.solve(M, rep.beta_minus)
    return val


def eval_R_many(rep: StableRepresentation, zs) -> np.ndarray:
    """Evaluate at every point of ``zs``; returns an array of shape ``(len(zs), m, m)``.

    No singularity screening is done; intended for points on or near the
    unit circle where both resolvents are well defined.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
    out = np.broadcast_to(rep.delta, (zs.size, rep.m, rep.m)).copy()
    pp, pm = rep.p_plus, rep.p_minus
    if pp:
        M = np.eye(pp)[None] - zs[:, None, None] * rep.alpha_plus[None]
        X = np.linalg.solve(M, np.broadcast_to(rep.beta_plus, (zs.size, pp, rep.m)))
        out += zs[:, None, None] * (rep.gamma_plus @ X)
    if pm:
        M = zs[:, None, None] * np.eye(pm)[None] - rep.alpha_minus[None]
        X = np.linalg.solve(M, np.broadcast_to(rep.beta_minus, (zs.size, pm, rep.m)))
        out += rep.gamma_minus @ X
    return out


def eval_R0(rep: StableRepresentation, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``R(0) = delta - gamma_minus alpha_minus^{-1} beta_minus``."""
    rep.check_dimensions()
    if rep.p_minus == 0:
        return rep.delta.copy()
    require_invertible(rep.alpha_minus, tol, "alpha_minus")
    return rep.delta - rep.gamma_minus @ np.linalg.solve(rep.alpha_minus, rep.beta_minus)


def eval_transfer(real: DichotomousRealization, z: complex, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Evaluate ``D + z C (I - z A)^{-1} B`` at ``z``."""
    if real.n == 0:
        return real.D.copy()
    M = np.eye(real.n) - z * real.A
    require_invertible(M, tol, f"I - z A at z={z}")
    return real.D + z * real.C @ np.linalg.solve(M, real.B)


def eval_transfer_many(real: DichotomousRealization, zs) -> np.ndarray:
    zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
    out = np.broadcast_to(real.D, (zs.size, real.m, real.m)).copy()
    if real.n:
        M = np.eye(real.n)[None] - zs[:, None, None] * real.A[None]
        X = np.linalg.solve(M, np.broadcast_to(real.B, (zs.size, real.n, real.m)))
        out += zs[:, None, None] * (real.C @ X)
    return out


def _power_times(alpha: np.ndarray, right: np.ndarray, k: int) -> np.ndarray:
    """``alpha**k @ right`` by repeated multiplication, stopping once the power underflows."""
    acc = right.copy()
    for _ in range(k):
        acc = alpha @ acc
        if acc.size == 0 or np.max(np.abs(acc)) < 1e-300:
            return np.zeros_like(right)
    return acc


def fourier_coefficient(rep: StableRepresentation, j: int) -> FourierCoefficient:
    """Coefficient ``R_j`` of ``z**j`` in the Laurent expansion on the unit circle."""
    rep.check_dimensions()
    j = int(j)
    if j == 0:
        value = rep.delta.copy()
    elif j > 0:
        value = rep.gamma_plus @ _power_times(rep.alpha_plus, rep.beta_plus, j - 1)
    else:
        value = rep.gamma_minus @ _power_times(rep.alpha_minus, rep.beta_minus, -j - 1)
    return FourierCoefficient(j, value)


def stable_to_dichotomous(rep: StableRepresentation, tol: Tolerances = DEFAULT_TOL) -> DichotomousRealization:
    """Rewrite a stable representation with invertible ``alpha_minus`` as a dichotomous realization."""
    rep.check_dimensions()
    pm, pp, m = rep.p_minus, rep.p_plus, rep.m
    if pm:
        require_invertible(rep.alpha_minus, tol, "alpha_minus")
    am_inv = np.linalg.inv(rep.alpha_minus) if pm else np.zeros((0, 0), dtype=np.complex128)
    A = np.zeros((pm + pp, pm + pp), dtype=np.complex128)
    A[:pm, :pm] = am_inv
    A[pm:, pm:] = rep.alpha_plus
    B = np.vstack([am_inv @ rep.beta_minus, rep.beta_plus]).reshape(pm + pp, m)
    C_minus = -rep.gamma_minus @ am_inv
    C = np.hstack([C_minus, rep.gamma_plus]).reshape(m, pm + pp)
    D = rep.delta + C_minus @ rep.beta_minus
    return DichotomousRealization(A, B, C, D, pm, pp)


def dichotomous_to_stable(real: DichotomousRealization, tol: Tolerances = DEFAULT_TOL) -> StableRepresentation:
    """Inverse of :func:`stable_to_dichotomous`."""
    k = real.dim_minus
    if k:
        require_invertible(real.A_minus, tol, "A_minus")
        Am_inv = np.linalg.inv(real.A_minus)
    else:
        Am_inv = np.zeros((0, 0), dtype=np.complex128)
    gamma_minus = -real.C_minus @ Am_inv
    return StableRepresentation(
        delta=real.D + gamma_minus @ real.B_minus,
        gamma_plus=real.C_plus,
        alpha_plus=real.A_plus,
        beta_plus=real.B_plus,
        gamma_minus=gamma_minus,
        alpha_minus=Am_inv,
        beta_minus=Am_inv @ real.B_minus,
    )


def a_cross(real: DichotomousRealization, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """The associate state matrix ``A - B D^{-1} C``."""
    require_invertible(real.D, tol, "D")
    return real.A - real.B @ np.linalg.solve(real.D, real.C)


def sharp_dual(rep: StableRepresentation) -> StableRepresentation:
    """Representation of ``z -> R(1/conj(z))^*``.

    Plus and minus data trade places and every block is replaced by its
    adjoint, with the roles of input and output maps exchanged.
    """
    H = lambda M: M.conj().T  # noqa: E731
    return StableRepresentation(
        delta=H(rep.delta),
        gamma_plus=H(rep.beta_minus),
        alpha_plus=H(rep.alpha_minus),
        beta_plus=H(rep.gamma_minus),
        gamma_minus=H(rep.beta_plus),
        alpha_minus=H(rep.alpha_plus),
        beta_minus=H(rep.gamma_plus),
    )


def swap_sides(rep: StableRepresentation) -> StableRepresentation:
    """Representation of ``z -> R(1/z)``: all plus and minus data exchanged."""
    return StableRepresentation(
        delta=rep.delta,
        gamma_plus=rep.gamma_minus,
        alpha_plus=rep.alpha_minus,
        beta_plus=rep.beta_minus,
        gamma_minus=rep.gamma_plus,
        alpha_minus=rep.alpha_plus,
        beta_minus=rep.beta_plus,
    )
