"""JSON documents for matrices, axis coefficients, frames, decompositions and diagonals.

Floats are written with Python's shortest round-trip ``repr``, so a
write/read cycle reproduces every value bit for bit.
"""

import json
import math
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .diag_stream import DiagSpec
from .errors import FrameError, InvalidInput
from .frames import Frame
from .operator_core import DEFAULT_TOL

KINDS = ("matrix", "axes", "frame", "decomposition", "diag")


class DocumentError(FrameError):
    """A file could not be read or does not match its declared kind."""


def _metadata(cfg):
    return {"tool": "tightframes", "version": __version__, "tolerances": asdict(cfg)}


def _floats(values):
    return [float(v) for v in values]


def matrix_doc(A, cfg=DEFAULT_TOL):
    A = np.asarray(A, dtype=float)
    return {"kind": "matrix", "dim": int(A.shape[0]), "data": [_floats(r) for r in A],
            "metadata": _metadata(cfg)}


def axes_doc(coeffs, cfg=DEFAULT_TOL):
    return {"kind": "axes", "coeffs": _floats(np.ravel(coeffs)), "metadata": _metadata(cfg)}


def frame_doc(vectors, kind="frame", target=None, cfg=DEFAULT_TOL):
    vectors = np.asarray(vectors, dtype=float)
    doc = {"kind": kind, "dim": int(vectors.shape[1]),
           "vectors": [_floats(v) for v in vectors]}
    if target is not None:
        doc["target"] = [_floats(r) for r in np.asarray(target, dtype=float)]
    doc["metadata"] = _metadata(cfg)
    return doc


def diag_doc(spec, cfg=DEFAULT_TOL):
    return {"kind": "diag", "entries": _floats(spec.entries), "alpha": float(spec.alpha),
            "metadata": _metadata(cfg)}


def write_document(path, doc):
    text = json.dumps(doc, indent=2, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def read_document(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("kind") not in KINDS:
        raise DocumentError(f"{path}: expected an object with kind in {KINDS}")
    return doc


def _real_array(value, what, ndim):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{what} is not numeric") from exc
    if arr.ndim != ndim or arr.size == 0 or not np.all(np.isfinite(arr)):
        raise DocumentError(f"{what} must be a non-empty finite {ndim}-d array")
    return arr


def _expect(doc, *kinds):
    if doc.get("kind") not in kinds:
        raise DocumentError(f"expected a {' or '.join(kinds)} document, got {doc.get('kind')!r}")


def load_matrix(doc, cfg=DEFAULT_TOL):
    """Square matrix from a matrix document; asymmetric data is rejected."""
    _expect(doc, "matrix")
    A = _real_array(doc.get("data"), "matrix data", 2)
    n = doc.get("dim", A.shape[0])
    if A.shape != (n, n):
        raise DocumentError(f"matrix data has shape {A.shape}, dim says {n}")
    if np.max(np.abs(A - A.T)) > cfg.tol_recon * max(1.0, float(np.max(np.abs(A)))):
        raise DocumentError("matrix is not symmetric")
    return A


def load_axes(doc):
    _expect(doc, "axes")
    a = _real_array(doc.get("coeffs"), "axis coefficients", 1)
    if np.any(a < 0) or a.sum() <= 0:
        raise DocumentError("axis coefficients must be >= 0 with a positive sum")
    return a


def load_frame(doc):
    _expect(doc, "frame", "decomposition")
    V = _real_array(doc.get("vectors"), "frame vectors", 2)
    n = doc.get("dim", V.shape[1])
    if V.shape[1] != n:
        raise DocumentError(f"frame vectors have length {V.shape[1]}, dim says {n}")
    return Frame(V, doc.get("kind"))


def load_target(doc):
    if "target" not in doc:
        return None
    return _real_array(doc["target"], "decomposition target", 2)


def load_diag(doc, alpha=None):
    _expect(doc, "diag")
    entries = doc.get("entries")
    if not isinstance(entries, list) or not entries:
        raise DocumentError("diag entries must be a non-empty list")
    a = _real_array(entries, "diag entries", 1)
    alpha = doc.get("alpha") if alpha is None else alpha
    if alpha is None or not isinstance(alpha, (int, float)) or not math.isfinite(alpha):
        raise DocumentError("diag document needs a numeric alpha")
    try:
        return DiagSpec(tuple(a), float(alpha))
    except InvalidInput as exc:
        raise DocumentError(str(exc)) from exc
