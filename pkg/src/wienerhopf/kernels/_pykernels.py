"""Reference numpy implementations of the compiled kernels."""

from __future__ import annotations

import numpy as np

# status codes shared with the compiled module
CONVERGED = 0
MAX_ITER = 1
SINGULAR = 2
DIVERGED = 3

_BLOWUP = 1e150


def riccati_iterate(delta, gamma_plus, alpha_plus, beta_plus, gamma_minus, alpha_minus, beta_minus,
                    Q0, max_iter: int, step_tol: float):
    """Fixed-point sweep ``Q <- alpha_minus Q alpha_plus + (beta_minus - alpha_minus Q beta_plus) K^{-1} (gamma_plus - gamma_minus Q alpha_plus)``.

    ``K = delta - gamma_minus Q beta_plus``.  Stops when
    ``||Q_new - Q||_max <= step_tol * max(1, ||Q_new||_max)``.

    Returns
    -------
    Q : ndarray
    iterations : int
    status : int
        One of ``CONVERGED``, ``MAX_ITER``, ``SINGULAR``, ``DIVERGED``.
    last_step : float
    """
    Q = np.array(Q0, dtype=np.complex128, copy=True)
    last_step = np.inf
    for it in range(1, max_iter + 1):
        K = delta - gamma_minus @ Q @ beta_plus
        try:
            lu_rhs = np.linalg.solve(K, gamma_plus - gamma_minus @ Q @ alpha_plus)
        except np.linalg.LinAlgError:
            return Q, it, SINGULAR, last_step
        Q_new = alpha_minus @ Q @ alpha_plus + (beta_minus - alpha_minus @ Q @ beta_plus) @ lu_rhs
        if not np.all(np.isfinite(Q_new)):
            return Q, it, DIVERGED, last_step
        scale = max(1.0, float(np.max(np.abs(Q_new)))) if Q_new.size else 1.0
        last_step = float(np.max(np.abs(Q_new - Q))) if Q_new.size else 0.0
        Q = Q_new
        if scale > _BLOWUP:
            return Q, it, DIVERGED, last_step
        if last_step <= step_tol * scale:
            return Q, it, CONVERGED, last_step
    return Q, max_iter, MAX_ITER, last_step


def block_toeplitz(coeffs, N: int):
    """Assemble the ``mN x mN`` matrix with block ``(i, j)`` equal to ``coeffs[i - j + N - 1]``.

    ``coeffs`` has shape ``(2N - 1, m, m)`` and holds ``R_{-(N-1)}, ..., R_{N-1}``.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    m = coeffs.shape[1]
    idx = np.arange(N)[:, None] - np.arange(N)[None, :] + N - 1
    # (N, N, m, m) -> (N, m, N, m)
    return coeffs[idx].transpose(0, 2, 1, 3).reshape(N * m, N * m)
