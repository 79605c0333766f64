"""Ellipsoids in R^n and the rotation construction of tight frames on them.

An ellipsoid is stored either as a positive definite ``T`` (surface ``T S``,
the image of the unit sphere) or as axis coefficients ``a`` in an orthonormal
``basis`` (surface ``sum_j a_j <x, b_j>^2 = 1``). Zero coefficients give a
degenerate, cylinder-like surface that only the axis form can express.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import InvalidInput, NotInvertible
from .operator_core import DEFAULT_TOL, eig, symmetric

__all__ = [
    "Ellipsoid",
    "RotationStep",
    "to_axes",
    "to_operator",
    "membership",
    "rotation_steps",
    "onb_on_ellipsoid",
    "tight_frame_on_ellipsoid",
]


@dataclass(frozen=True)
class Ellipsoid:
    """Either ``operator`` is set, or ``coeffs`` (with optional ``basis``) is."""

    operator: Optional[np.ndarray] = None
    coeffs: Optional[np.ndarray] = None
    basis: Optional[np.ndarray] = None

    @classmethod
    def from_operator(cls, T, cfg=DEFAULT_TOL):
        T = symmetric(T)
        if eig(T).values[-1] <= cfg.tol_psd:
            raise InvalidInput("ellipsoid operator must be positive definite")
        return cls(operator=T)

    @classmethod
    def from_axes(cls, coeffs, basis=None):
        a = np.asarray(coeffs, dtype=float).ravel()
        if a.size == 0 or not np.all(np.isfinite(a)):
            raise InvalidInput("axis coefficients must be a non-empty finite list")
        if np.any(a < 0) or a.sum() <= 0:
            raise InvalidInput("axis coefficients must be >= 0 with a positive sum")
        if basis is None:
            basis = np.eye(a.size)
        basis = np.asarray(basis, dtype=float)
        if basis.shape != (a.size, a.size):
            raise InvalidInput("basis must be a square matrix matching the coefficients")
        if np.linalg.norm(basis.T @ basis - np.eye(a.size)) > 1e-8:
            raise InvalidInput("basis columns must be orthonormal")
        return cls(coeffs=a, basis=basis)

    @property
    def is_operator(self):
        return self.operator is not None

    @property
    def dim(self):
        return (self.operator if self.is_operator else self.basis).shape[0]

    @property
    def degenerate(self):
        return not self.is_operator and bool(np.any(self.coeffs == 0))

    def quadratic_form(self):
        """Matrix ``D`` with the surface equal to ``{x : <D x, x> = 1}``."""
        if self.is_operator:
            lam, V = eig(self.operator)
            return symmetric((V * lam ** -2.0) @ V.T)
        return symmetric((self.basis * self.coeffs) @ self.basis.T)


def to_axes(E, cfg=DEFAULT_TOL):
    """Axis form: the coefficients are the eigenvalues of ``T^-2``."""
    if not E.is_operator:
        return E
    lam, V = eig(E.operator)
    return Ellipsoid.from_axes(lam ** -2.0, V)


def to_operator(E, cfg=DEFAULT_TOL):
    """Operator form ``T = basis diag(a)^(-1/2) basis^T``; fails for degenerate axes."""
    if E.is_operator:
        return E
    if np.any(E.coeffs <= cfg.tol_psd):
        raise NotInvertible("degenerate ellipsoid has no operator form")
    T = (E.basis / np.sqrt(E.coeffs)) @ E.basis.T
    return Ellipsoid.from_operator(T, cfg)


def membership(E, y):
    """Distance of ``y`` from the surface, measured in the form's own equation."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size != E.dim:
        raise InvalidInput(f"vector has length {y.size}, ellipsoid dimension is {E.dim}")
    if E.is_operator:
        return abs(float(np.linalg.norm(np.linalg.solve(E.operator, y))) - 1.0)
    return abs(float(np.sum(E.coeffs * (E.basis.T @ y) ** 2)) - 1.0)


class RotationStep(NamedTuple):
    """One plane rotation: slot ``i`` keeps the extracted axis, slot ``j`` gets ``b``."""

    i: int
    j: int
    theta: float
    b: float


def rotation_steps(a):
    """Plane rotations that peel one unit vector per step off ``sum a_j x_j^2 = 1``.

    Each step pairs the largest remaining coefficient (>= 1) with the smallest
    (<= 1), picks ``theta`` with ``a_i cos^2 + a_j sin^2 = 1`` and hands the
    coefficient ``b = a_i sin^2 + a_j cos^2`` to slot ``j``. The last step is a
    bare extraction with ``theta = 0`` and ``j == i``.
    """
    a = np.array(a, dtype=float)
    active = list(range(a.size))
    steps = []
    while active:
        vals = a[active]
        i = active[int(np.argmax(vals))]
        j = active[int(np.argmin(vals))]
        hi, lo = a[i], a[j]
        if hi > lo:
            s2 = min(1.0, max(0.0, (hi - 1.0) / (hi - lo)))
        else:
            s2 = 0.0
        theta = math.asin(math.sqrt(s2))
        b = hi * s2 + lo * (1.0 - s2)
        if i != j:
            a[j] = b
        steps.append(RotationStep(i, j, theta, b))
        active.remove(i)
    return steps


def onb_on_ellipsoid(a, cfg=DEFAULT_TOL):
    """Orthonormal basis lying on ``sum_j a_j x_j^2 = 1`` when ``sum(a) == n``.

    Parameters
    ----------
    a : array_like
        Non-negative coefficients summing to their count ``n``.

    Returns
    -------
    numpy.ndarray
        Shape ``(n, n)``; row ``m`` is the ``m``-th basis vector.
    """
    a = np.asarray(a, dtype=float).ravel()
    n = a.size
    if n == 0 or not np.all(np.isfinite(a)) or np.any(a < 0):
        raise InvalidInput("coefficients must be a non-empty list of finite values >= 0")
    if abs(a.sum() - n) > cfg.tol_recon * max(1.0, n):
        raise InvalidInput(f"coefficients sum to {a.sum():.12g}, expected {n}")
    # M accumulates R_1 R_2 ... ; its column i after step m is the m-th vector
    M = np.eye(n)
    out = np.empty((n, n))
    for m, (i, j, theta, _) in enumerate(rotation_steps(a)):
        if i != j:
            c, s = math.cos(theta), math.sin(theta)
            col_i, col_j = M[:, i].copy(), M[:, j].copy()
            M[:, i] = c * col_i - s * col_j
            M[:, j] = s * col_i + c * col_j
        out[m] = M[:, i]
    return out


def tight_frame_on_ellipsoid(a, k, cfg=DEFAULT_TOL):
    """``k`` vectors on ``sum_j a_j x_j^2 = 1`` forming a tight frame with bound ``k / sum(a)``.

    The coefficients are padded with zeros up to length ``k`` and rescaled to
    sum to ``k``; the orthonormal basis on that padded ellipsoid is scaled back
    onto the original surface and cut down to the first ``n`` coordinates.
    """
    a = np.asarray(a, dtype=float).ravel()
    n = a.size
    if n == 0 or not np.all(np.isfinite(a)) or np.any(a < 0):
        raise InvalidInput("coefficients must be a non-empty list of finite values >= 0")
    r = float(a.sum())
    if r <= 0:
        raise InvalidInput("coefficients must have a positive sum")
    if int(k) != k or k < n:
        raise InvalidInput(f"frame length {k!r} must be an integer >= dimension {n}")
    k = int(k)
    padded = np.zeros(k)
    padded[:n] = a * (k / r)
    # the rescale can drift the sum by an ulp or two; renormalize exactly
    padded[:n] *= k / padded.sum()
    V = onb_on_ellipsoid(padded, cfg)
    return math.sqrt(k / r) * V[:, :n]
