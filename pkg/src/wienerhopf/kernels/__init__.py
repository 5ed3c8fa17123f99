"""Hot loops with a compiled implementation and a numpy fallback.

The compiled module is used when it was built and importable, unless the
environment variable ``WIENERHOPF_PURE_PYTHON`` is set to a non-empty value
other than ``0``.  ``BACKEND`` names the active choice.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels
from ._pykernels import CONVERGED, DIVERGED, MAX_ITER, SINGULAR

try:
    from . import _ckernels  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _ckernels = None


def _select() -> tuple[ModuleType, str]:
    forced = os.environ.get("WIENERHOPF_PURE_PYTHON", "")
    if _ckernels is not None and forced in ("", "0"):
        return _ckernels, "cython"
    return _pykernels, "python"


_impl, BACKEND = _select()


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module ``"cython"`` or ``"python"``, or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not available")
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def compiled_available() -> bool:
    return _ckernels is not None


def riccati_iterate(*args, **kwargs):
    return _impl.riccati_iterate(*args, **kwargs)


def block_toeplitz(coeffs, N):
    return _impl.block_toeplitz(coeffs, N)


STATUS_NAMES = {CONVERGED: "converged", MAX_ITER: "max_iter", SINGULAR: "singular", DIVERGED: "diverged"}

__all__ = [
    "BACKEND",
    "CONVERGED",
    "DIVERGED",
    "MAX_ITER",
    "SINGULAR",
    "STATUS_NAMES",
    "block_toeplitz",
    "compiled_available",
    "get_backend",
    "riccati_iterate",
]
