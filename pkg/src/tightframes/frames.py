"""Frame analysis and synthesis of tight frames from projection decompositions."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ellipsoid import Ellipsoid, membership, to_operator
from .errors import FrameError, InvalidInput, NotDecomposable, NotInvertible
from .operator_core import DEFAULT_TOL, eig, inv_sqrt, symmetric
from .projection import decompose_rank_one

__all__ = [
    "Frame",
    "FrameReport",
    "frame_operator",
    "frame_bounds",
    "parsevalize",
    "etf_synthesize",
    "spherical_frame",
    "max_membership",
]


@dataclass(frozen=True)
class Frame:
    """``vectors`` has shape ``(k, n)``: ``k`` frame vectors in ``R^n``."""

    vectors: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float)
        if v.ndim == 1:
            v = v.reshape(-1, 1)
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise InvalidInput("a frame needs at least one vector of positive length")
        if not np.all(np.isfinite(v)):
            raise InvalidInput("frame vectors must be finite")
        object.__setattr__(self, "vectors", v)

    @classmethod
    def from_list(cls, vectors, label=""):
        lengths = {len(np.atleast_1d(v)) for v in vectors}
        if len(lengths) > 1:
            raise InvalidInput(f"frame vectors have mixed lengths {sorted(lengths)}")
        return cls(np.array([np.atleast_1d(v) for v in vectors], dtype=float), label)

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return self.vectors.shape[0]


@dataclass(frozen=True)
class FrameReport:
    lower_bound: float
    upper_bound: float
    tight: bool
    frame_bound: Optional[float]
    parseval: bool
    complete: bool


def frame_operator(F):
    """``S = sum_j x_j ⊗ x_j``."""
    if not isinstance(F, Frame):
        F = Frame.from_list(F)
    return symmetric(F.vectors.T @ F.vectors)


def frame_bounds(F, cfg=DEFAULT_TOL):
    """Optimal frame bounds from the extreme eigenvalues of the frame operator.

    Tightness is judged by the relative spread ``(B - A) / max(1, B)``.
    """
    values = eig(frame_operator(F)).values
    lower, upper = max(0.0, float(values[-1])), float(values[0])
    scale = max(1.0, upper)
    complete = bool(lower > cfg.tol_rank * scale)
    tight = complete and (upper - lower) <= cfg.tol_recon * scale
    K = 0.5 * (lower + upper) if tight else None
    parseval = tight and abs(K - 1.0) <= cfg.tol_recon
    return FrameReport(lower, upper, tight, K, parseval, complete)


def parsevalize(F, cfg=DEFAULT_TOL):
    """Map each ``x_j`` to ``S^(-1/2) x_j``, giving a frame whose operator is ``I``."""
    if not isinstance(F, Frame):
        F = Frame.from_list(F)
    try:
        root = inv_sqrt(frame_operator(F), cfg)
    except NotInvertible as exc:
        raise NotInvertible(f"frame is not complete: {exc}") from exc
    return Frame(F.vectors @ root, F.label)


def etf_synthesize(E, k, cfg=DEFAULT_TOL):
    """Tight frame of length ``k`` on the surface ``T S`` via a projection decomposition.

    The frame bound is forced to ``K = k / trace(T^-2)``; the unit vectors
    ``x_j`` that decompose ``K T^-2`` are mapped onto the surface as ``T x_j``.

    Returns
    -------
    (Frame, float)
        The frame and its bound ``K``.
    """
    if not isinstance(E, Ellipsoid):
        E = Ellipsoid.from_operator(E, cfg)
    if not E.is_operator:
        if E.degenerate:
            raise InvalidInput("decomposition route needs a non-degenerate ellipsoid")
        E = to_operator(E, cfg)
    T = E.operator
    n = T.shape[0]
    if int(k) != k or k < n:
        raise InvalidInput(f"frame length {k!r} must be an integer >= dimension {n}")
    k = int(k)
    # in the eigenbasis of T everything is diagonal; y = T x keeps componentwise accuracy
    lam, V = eig(T)
    inv_sq = lam ** -2.0
    K = k / math.fsum(inv_sq)
    R = K * inv_sq
    R *= k / math.fsum(R)
    try:
        dec = decompose_rank_one(np.diag(R), k, cfg)
    except NotDecomposable as exc:
        raise FrameError(f"internal error: K T^-2 failed to decompose ({exc})") from exc
    return Frame((dec.factors * lam) @ V.T, "etf"), K


def spherical_frame(S, k, cfg=DEFAULT_TOL):
    """Equal-norm frame of length ``k`` whose frame operator is ``S``.

    The common norm is ``sqrt(trace(S) / k)``.
    """
    S = symmetric(S)
    n = S.shape[0]
    if int(k) != k or k < n:
        raise InvalidInput(f"frame length {k!r} must be an integer >= dimension {n}")
    k = int(k)
    if eig(S).values[-1] <= cfg.tol_psd:
        raise NotInvertible("frame operator must be positive definite")
    tr = float(np.trace(S))
    c = k / tr
    scaled = c * S
    scaled *= k / float(np.trace(scaled))
    dec = decompose_rank_one(scaled, k, cfg)
    return Frame(dec.factors / math.sqrt(c), "spherical"), math.sqrt(tr / k)


def max_membership(E, F):
    return max(membership(E, v) for v in F.vectors)
