"""Dense real symmetric operators: eigensystems, ranks, square roots, clamping.

Operators are plain ``numpy`` arrays. :func:`symmetric` is the single entry
point that validates and symmetrizes user input; everything else assumes
its output.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInput, NotInvertible, NotPSD

__all__ = [
    "ToleranceConfig",
    "EigenSystem",
    "symmetric",
    "eig",
    "mu",
    "rank_eps",
    "outer",
    "inv_sqrt",
    "trace",
    "psd_clamp",
    "is_projection",
    "frob",
]

# entries of a unit eigenvector closer than this count as tied for the sign rule
_SIGN_TIE = 1e-12


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances used throughout the package.

    ``tol_rank`` is relative to ``max(1, |largest eigenvalue|)``; ``tol_bisect``
    is measured on the rotation angle of the Case-2 root search.
    """

    tol_rank: float = 1e-9
    tol_psd: float = 1e-9
    tol_recon: float = 1e-8
    tol_orth: float = 1e-10
    tol_bisect: float = 1e-13

    def __post_init__(self):
        for name in ("tol_rank", "tol_psd", "tol_recon", "tol_orth", "tol_bisect"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidInput(f"{name} must be strictly positive, got {value!r}")


DEFAULT_TOL = ToleranceConfig()


class EigenSystem(NamedTuple):
    """Eigenvalues in non-increasing order and matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray


def symmetric(A):
    """Return ``A`` as a float array with ``A[i, j] == A[j, i]`` exactly."""
    A = np.array(A, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InvalidInput(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix has non-finite entries")
    return (A + A.T) / 2


def frob(A):
    return float(np.linalg.norm(A, "fro"))


def _fix_signs(V):
    for col in range(V.shape[1]):
        v = V[:, col]
        mag = np.abs(v)
        lead = int(np.argmax(mag >= mag.max() - _SIGN_TIE))
        if v[lead] < 0:
            V[:, col] = -v
    return V


def eig(A):
    """Eigendecomposition with a reproducible ordering and sign convention.

    Eigenvalues come out non-increasing; exactly equal eigenvalues keep the
    order LAPACK returned them in. Each eigenvector is flipped so its entry of
    largest magnitude is positive (ties go to the lowest index).

    Parameters
    ----------
    A : array_like
        Real symmetric matrix.

    Returns
    -------
    EigenSystem
        ``values`` of shape ``(n,)`` and ``vectors`` of shape ``(n, n)`` whose
        columns pair with ``values``.
    """
    A = symmetric(A)
    w, V = np.linalg.eigh(A)
    order = np.argsort(-w, kind="stable")
    return EigenSystem(w[order], _fix_signs(V[:, order].copy()))


def mu(A, n):
    """The ``n``-th largest eigenvalue of ``A`` counting multiplicity (1-based)."""
    A = symmetric(A)
    if not 1 <= n <= A.shape[0]:
        raise InvalidInput(f"eigenvalue index {n} outside 1..{A.shape[0]}")
    return float(np.linalg.eigvalsh(A)[::-1][n - 1])


def _rank_from_values(w, cfg):
    scale = max(1.0, float(np.max(np.abs(w))))
    return int(np.sum(np.abs(w) > cfg.tol_rank * scale))


def rank_eps(A, cfg=DEFAULT_TOL):
    """Number of eigenvalues above ``tol_rank`` relative to the spectral radius."""
    return _rank_from_values(np.linalg.eigvalsh(symmetric(A)), cfg)


def outer(x):
    """The rank-one operator ``x ⊗ x``."""
    x = np.asarray(x, dtype=float).ravel()
    return np.outer(x, x)


def trace(A):
    return float(np.trace(np.asarray(A, dtype=float)))


def inv_sqrt(A, cfg=DEFAULT_TOL):
    """Inverse square root of a positive definite matrix via its eigenbasis."""
    values, V = eig(A)
    if values[-1] <= cfg.tol_psd:
        raise NotInvertible(f"smallest eigenvalue {values[-1]:.3e} is not positive")
    return symmetric((V / np.sqrt(values)) @ V.T)


def psd_clamp(A, cfg=DEFAULT_TOL):
    """Zero out slightly negative eigenvalues and rebuild the matrix.

    Raises :class:`NotPSD` when an eigenvalue lies below
    ``-tol_psd * max(1, |largest eigenvalue|)``.
    """
    values, V = eig(A)
    scale = max(1.0, float(np.max(np.abs(values))))
    if values[-1] < -cfg.tol_psd * scale:
        raise NotPSD(f"eigenvalue {values[-1]:.3e} is genuinely negative")
    if values[-1] >= 0:
        return symmetric(A)
    values = np.clip(values, 0.0, None)
    return symmetric((V * values) @ V.T)


def is_projection(A, cfg=DEFAULT_TOL):
    """True when ``A`` is an orthogonal projection: eigenvalues all near 0 or 1."""
    w = np.linalg.eigvalsh(symmetric(A))
    return bool(np.all(np.minimum(np.abs(w), np.abs(w - 1.0)) <= cfg.tol_recon))
