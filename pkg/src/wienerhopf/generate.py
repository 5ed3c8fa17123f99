"""Seeded random instances for tests, benchmarks and the ``gen`` command."""

from __future__ import annotations

import numpy as np
from scipy import linalg

from .representation import StableRepresentation, eval_R_many

__all__ = [
    "rng_from_seed",
    "random_stable",
    "instance_from_seed",
    "blaschke_obstruction",
    "direct_sum",
    "mix_constant",
]

# circle points used to estimate sup ||R - delta||
_SUP_SAMPLES = 512


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def _cnormal(rng: np.random.Generator, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _scaled_square(rng, n: int, radius: float) -> np.ndarray:
    A = _cnormal(rng, n, n)
    if n == 0:
        return A
    # norm scaling also bounds the transient growth of powers
    return A * (radius / np.linalg.norm(A, 2))


def random_stable(rng: np.random.Generator, p_minus: int, p_plus: int, m: int,
                  coupling: float = 0.3, radius: tuple[float, float] = (0.2, 0.8),
                  delta: np.ndarray | None = None) -> StableRepresentation:
    """Random representation with ``sup_{|z|=1} ||R(z) - delta|| == coupling`` (estimated on a grid).

    ``alpha_plus`` and ``alpha_minus`` have 2-norm drawn uniformly from ``radius``.
    ``delta`` defaults to the identity.
    """
    if delta is None:
        delta = np.eye(m, dtype=np.complex128)
    ap = _scaled_square(rng, p_plus, rng.uniform(*radius))
    am = _scaled_square(rng, p_minus, rng.uniform(*radius))
    gp, bp = _cnormal(rng, m, p_plus), _cnormal(rng, p_plus, m)
    gm, bm = _cnormal(rng, m, p_minus), _cnormal(rng, p_minus, m)
    rep = StableRepresentation(np.zeros((m, m)), gp, ap, bp, gm, am, bm)
    zs = np.exp(2j * np.pi * np.arange(_SUP_SAMPLES) / _SUP_SAMPLES)
    sup = max((np.linalg.norm(v, 2) for v in eval_R_many(rep, zs)), default=0.0)
    scale = coupling / sup if sup > 0 else 0.0
    return StableRepresentation(delta, scale * gp, ap, bp, scale * gm, am, bm)


def instance_from_seed(seed: int, dims: tuple[int, int, int] = (2, 2, 2),
                       coupling: float = 0.3) -> StableRepresentation:
    """Reproducible near-identity instance; ``dims`` is ``(p_minus, p_plus, m)``."""
    p_minus, p_plus, m = dims
    return random_stable(rng_from_seed(seed), p_minus, p_plus, m, coupling)


def blaschke_obstruction(c: complex) -> StableRepresentation:
    """``[[b(z), 1], [0, 1/b(z)]]`` with ``b(z) = (z - c) / (1 - conj(c) z)``, ``0 < |c| < 1``.

    This function has a right canonical factorization but no left one.
    """
    c = complex(c)
    if not 0 < abs(c) < 1:
        raise ValueError("need 0 < |c| < 1")
    s = np.sqrt(1 - abs(c) ** 2)
    return StableRepresentation(
        delta=np.array([[-c, 1], [0, -np.conj(c)]]),
        gamma_plus=np.array([[s], [0]]),
        alpha_plus=np.array([[np.conj(c)]]),
        beta_plus=np.array([[s, 0]]),
        gamma_minus=np.array([[0], [s]]),
        alpha_minus=np.array([[c]]),
        beta_minus=np.array([[0, s]]),
    )


def mix_constant(rep: StableRepresentation, E: np.ndarray, F: np.ndarray) -> StableRepresentation:
    """Representation of ``E R(z) F`` for constant matrices ``E`` and ``F``."""
    return StableRepresentation(
        E @ rep.delta @ F, E @ rep.gamma_plus, rep.alpha_plus, rep.beta_plus @ F,
        E @ rep.gamma_minus, rep.alpha_minus, rep.beta_minus @ F,
    )


def direct_sum(a: StableRepresentation, b: StableRepresentation) -> StableRepresentation:
    """Representation of ``diag(R_a(z), R_b(z))``."""
    bd = linalg.block_diag
    return StableRepresentation(*(bd(x, y) for x, y in zip(a.matrices().values(), b.matrices().values())))
