"""JSON encoding of matrices, representations and reports.

Matrices are objects ``{"rows": r, "cols": c, "data": [[re, im], ...]}`` in
row-major order.  Output is deterministic: keys keep insertion order,
floats are printed with 17 significant digits, non-finite floats become
``null``.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .core import DimensionError, WienerHopfError
from .representation import DichotomousRealization, StableRepresentation

SCHEMA_VERSION = 1


class InputFormatError(WienerHopfError, ValueError):
    """A file does not follow the expected JSON layout."""


def encode_matrix(M) -> dict:
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise DimensionError(f"cannot encode array of shape {M.shape} as a matrix")
    flat = M.ravel()
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [[float(v.real), float(v.imag)] for v in flat],
    }


def decode_matrix(obj, name: str = "matrix") -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"{name}: expected object with rows, cols, data") from exc
    if rows < 0 or cols < 0:
        raise InputFormatError(f"{name}: negative dimension")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise InputFormatError(f"{name}: data must hold rows*cols = {rows * cols} entries")
    out = np.empty(rows * cols, dtype=np.complex128)
    for k, entry in enumerate(data):
        if isinstance(entry, (int, float)) and not isinstance(entry, bool):
            re, im = float(entry), 0.0
        elif isinstance(entry, list) and len(entry) == 2:
            re, im = entry
            if re is None or im is None:
                raise InputFormatError(f"{name}: non-finite entry at position {k}")
            re, im = float(re), float(im)
        else:
            raise InputFormatError(f"{name}: entry {k} must be [re, im]")
        if not (math.isfinite(re) and math.isfinite(im)):
            raise InputFormatError(f"{name}: non-finite entry at position {k}")
        out[k] = complex(re, im)
    return out.reshape(rows, cols)


_STABLE_KEYS = (
    "delta",
    "gamma_plus",
    "alpha_plus",
    "beta_plus",
    "gamma_minus",
    "alpha_minus",
    "beta_minus",
)


def encode_representation(obj: StableRepresentation | DichotomousRealization) -> dict:
    if isinstance(obj, StableRepresentation):
        out: dict[str, Any] = {"kind": "stable"}
        out.update({k: encode_matrix(getattr(obj, k)) for k in _STABLE_KEYS})
        return out
    if isinstance(obj, DichotomousRealization):
        out = {"kind": "dichotomous"}
        out.update({k: encode_matrix(getattr(obj, k)) for k in "ABCD"})
        out["dim_minus"] = obj.dim_minus
        out["dim_plus"] = obj.dim_plus
        return out
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode_representation(obj) -> StableRepresentation | DichotomousRealization:
    if not isinstance(obj, dict):
        raise InputFormatError("top level must be a JSON object")
    kind = obj.get("kind")
    try:
        if kind == "stable":
            mats = {k: decode_matrix(obj[k], k) for k in _STABLE_KEYS}
            return StableRepresentation(**mats)
        if kind == "dichotomous":
            mats = {k: decode_matrix(obj[k], k) for k in "ABCD"}
            return DichotomousRealization(
                dim_minus=int(obj["dim_minus"]), dim_plus=int(obj["dim_plus"]), **mats
            )
    except KeyError as exc:
        raise InputFormatError(f"missing key {exc.args[0]!r}") from exc
    except DimensionError as exc:
        raise InputFormatError(str(exc)) from exc
    raise InputFormatError(f"unknown kind {kind!r}; expected 'stable' or 'dichotomous'")


def load_representation(path: str) -> StableRepresentation | DichotomousRealization:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: invalid JSON ({exc})") from exc
    return decode_representation(obj)


def to_jsonable(x):
    """Recursively convert arrays, dataclass-like records and numpy scalars."""
    if isinstance(x, np.ndarray):
        if x.ndim == 2:
            return encode_matrix(x)
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, (StableRepresentation, DichotomousRealization)):
        return encode_representation(x)
    if hasattr(x, "to_dict"):
        return to_jsonable(x.to_dict())
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return x


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x + 0.0, ".17g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _write(x, indent: int | None, level: int, out: list[str]) -> None:
    # json.dumps has no hook for float formatting, hence this small writer
    if x is None or isinstance(x, bool):
        out.append(json.dumps(x))
    elif isinstance(x, float):
        out.append(_fmt_float(x))
    elif isinstance(x, (int, str)):
        out.append(json.dumps(x))
    elif isinstance(x, (dict, list)):
        items = list(x.items()) if isinstance(x, dict) else list(enumerate(x))
        opening, closing = ("{", "}") if isinstance(x, dict) else ("[", "]")
        if not items:
            out.append(opening + closing)
            return
        # matrix entries stay on one line
        compact = indent is None or (
            isinstance(x, list) and all(not isinstance(v, (dict, list)) for _, v in items)
        )
        pad = "" if compact else "\n" + " " * (indent * (level + 1))
        out.append(opening)
        for k, (key, value) in enumerate(items):
            if k:
                out.append(", " if compact else ",")
            out.append(pad)
            if isinstance(x, dict):
                out.append(json.dumps(str(key)) + ": ")
            _write(value, indent, level + 1, out)
        if not compact:
            out.append("\n" + " " * (indent * level))
        out.append(closing)
    else:
        raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(payload, indent: int | None = 2) -> str:
    """Serialize with fixed 17-significant-digit floats and ``null`` for NaN/Inf."""
    out: list[str] = []
    _write(to_jsonable(payload), indent, 0, out)
    return "".join(out)


def report(kind: str, body: dict) -> dict:
    """Wrap a report body with the schema version and kind tag."""
    out: dict[str, Any] = {"schema": SCHEMA_VERSION, "report": kind}
    out.update(body)
    return out
