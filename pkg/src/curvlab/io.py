"""JSON serialization of tensors, certificates and reports.

Floats are written with 17 significant digits so every 64-bit value
round-trips exactly.  Tensor files look like::

    {"format": "curvlab-tensor/1", "dim": 4, "lambda2_matrix": [[...], ...]}

An import-only variant replaces ``lambda2_matrix`` with
``"components": [[i, j, k, l, value], ...]`` using one-based indices; the
remaining components follow from the pair symmetries.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .curvature import CurvatureTensor, bianchi_project, validate
from .spaces import dim_lambda2, pairs

FORMAT_VERSION = "curvlab-tensor/1"


class TensorFormatError(ValueError):
    """Malformed tensor file, or a tensor that fails the Bianchi check."""

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    if x == 0.0:
        return "0.0" if math.copysign(1.0, x) > 0 else "-0.0"
    text = format(x, ".17g")
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def dumps(obj: Any, indent: int | None = 2) -> str:
    """``json.dumps`` with fixed 17-digit floats and insertion-ordered keys."""
    return "".join(_encode(obj, indent, 0))


def _encode(obj, indent, level):
    if isinstance(obj, (bool, np.bool_)):
        yield "true" if obj else "false"
    elif obj is None:
        yield "null"
    elif isinstance(obj, (int, np.integer)):
        yield str(int(obj))
    elif isinstance(obj, (float, np.floating)):
        yield format_float(obj)
    elif isinstance(obj, str):
        yield json.dumps(obj)
    elif isinstance(obj, np.ndarray):
        yield from _encode(obj.tolist(), indent, level)
    elif isinstance(obj, dict):
        if not obj:
            yield "{}"
            return
        pad, inner = _pads(indent, level)
        yield "{"
        for i, (key, value) in enumerate(obj.items()):
            yield ("," if i else "") + inner + json.dumps(str(key)) + ": "
            yield from _encode(value, indent, level + 1)
        yield pad + "}"
    elif isinstance(obj, (list, tuple)):
        if not obj:
            yield "[]"
            return
        flat = all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj)
        if flat:
            yield "[" + ", ".join("".join(_encode(v, indent, level + 1)) for v in obj) + "]"
            return
        pad, inner = _pads(indent, level)
        yield "["
        for i, value in enumerate(obj):
            yield ("," if i else "") + inner
            yield from _encode(value, indent, level + 1)
        yield pad + "]"
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _pads(indent, level):
    if indent is None:
        return "", ""
    return "\n" + " " * (indent * level), "\n" + " " * (indent * (level + 1))


def tensor_to_dict(R: CurvatureTensor) -> dict[str, Any]:
    out: dict[str, Any] = {"format": FORMAT_VERSION, "dim": R.n, "lambda2_matrix": R.lambda2}
    if R.origin is not None:
        out["model"] = R.origin
    return out


def write_tensor(path: str | Path, R: CurvatureTensor) -> None:
    Path(path).write_text(dumps(tensor_to_dict(R)) + "\n")


def tensor_from_dict(data: dict[str, Any], project: bool = False, tol: float = 1e-10) -> CurvatureTensor:
    """Parse a tensor object; reject Bianchi violations unless ``project``."""
    if not isinstance(data, dict):
        raise TensorFormatError("tensor file must hold a JSON object")
    fmt = data.get("format", FORMAT_VERSION)
    if fmt != FORMAT_VERSION:
        raise TensorFormatError(f"unsupported format {fmt!r}; expected {FORMAT_VERSION!r}")
    try:
        n = int(data["dim"])
    except (KeyError, TypeError, ValueError):
        raise TensorFormatError("missing or invalid 'dim'") from None
    if n < 1:
        raise TensorFormatError(f"'dim' must be >= 1, got {n}")

    if "lambda2_matrix" in data:
        try:
            m = np.array(data["lambda2_matrix"], dtype=np.float64).reshape(-1)
        except (TypeError, ValueError):
            raise TensorFormatError("'lambda2_matrix' must be a numeric matrix") from None
        big = dim_lambda2(n)
        if m.size != big * big:
            raise TensorFormatError(f"'lambda2_matrix' must be {big}x{big} for dim {n}")
        m = m.reshape(big, big)
    elif "components" in data:
        m = _from_component_list(n, data["components"])
    else:
        raise TensorFormatError("expected 'lambda2_matrix' or 'components'")

    if not np.all(np.isfinite(m)):
        raise TensorFormatError("tensor has non-finite components")
    report = validate(m, tol)
    if not report.passed:
        if not project:
            raise TensorFormatError(
                f"tensor violates curvature symmetries (Bianchi {report.bianchi:.3e}, "
                f"pair {report.pair_symmetry:.3e})",
                {"bianchi": report.bianchi, "pair_symmetry": report.pair_symmetry, "tol": tol},
            )
        return bianchi_project(m)
    try:
        return CurvatureTensor(n, m, data.get("model"))
    except ValueError as exc:
        raise TensorFormatError(str(exc)) from None


def _from_component_list(n: int, entries) -> np.ndarray:
    comps = np.zeros((n, n, n, n))
    try:
        rows = [(int(e[0]), int(e[1]), int(e[2]), int(e[3]), float(e[4])) for e in entries]
    except (TypeError, ValueError, IndexError):
        raise TensorFormatError("'components' must be a list of [i, j, k, l, value]") from None
    for i, j, k, l, v in rows:
        if not all(1 <= x <= n for x in (i, j, k, l)):
            raise TensorFormatError(f"component index out of range: {(i, j, k, l)}")
        i, j, k, l = i - 1, j - 1, k - 1, l - 1
        if (i == j or k == l) and v != 0.0:
            raise TensorFormatError(f"component {(i + 1, j + 1, k + 1, l + 1)} must vanish")
        for a, b, c, d, s in ((i, j, k, l, 1), (j, i, k, l, -1), (i, j, l, k, -1), (j, i, l, k, 1)):
            comps[a, b, c, d] = s * v
            comps[c, d, a, b] = s * v
    big = dim_lambda2(n)
    m = np.zeros((big, big))
    for a, (i, j) in enumerate(pairs(n)):
        for b, (k, l) in enumerate(pairs(n)):
            m[a, b] = comps[i, j, k, l]
    return m


def read_tensor(path: str | Path, project: bool = False, tol: float = 1e-10) -> CurvatureTensor:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise TensorFormatError(f"{path}: invalid JSON ({exc})") from None
    return tensor_from_dict(data, project=project, tol=tol)


__all__ = [
    "FORMAT_VERSION",
    "TensorFormatError",
    "dumps",
    "format_float",
    "tensor_to_dict",
    "tensor_from_dict",
    "write_tensor",
    "read_tensor",
]
