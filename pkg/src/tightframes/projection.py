"""Sums of projections: rank-one decompositions of positive operators.

A positive operator ``A`` of rank ``n`` with integer trace ``k >= n`` is a sum
of ``k`` rank-one projections ``x_i ⊗ x_i``. The factors are found one at a
time. While ``k > n`` the top eigenvector is peeled off; once ``k == n`` a unit
vector ``y`` in the range is chosen so that ``A - y ⊗ y`` loses one rank, by
bisection along the circle joining the top and bottom eigenvectors.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidCase2State, InvalidInput, NotDecomposable
from .operator_core import (
    DEFAULT_TOL,
    eig,
    frob,
    is_projection,
    outer,
    psd_clamp,
    symmetric,
)

__all__ = [
    "ProjectionDecomposition",
    "RankKDecomposition",
    "DecomposabilityReport",
    "decompose_rank_one",
    "peel_root",
    "decompose_rank_k",
    "check_decomposable",
    "PeelStep",
]


@dataclass(frozen=True)
class ProjectionDecomposition:
    """Unit vectors whose outer products sum to ``target``.

    ``factors`` has shape ``(k, dim)``; row ``i`` is ``x_i``.
    """

    factors: np.ndarray
    target: np.ndarray
    steps: tuple = ()

    @property
    def dim(self):
        return self.target.shape[0]

    def __len__(self):
        return self.factors.shape[0]

    def reconstruct(self):
        return self.factors.T @ self.factors

    def residual(self):
        """Frobenius distance between the sum of projections and the target."""
        return frob(self.reconstruct() - self.target)

    def norm_error(self):
        if len(self) == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.norm(self.factors, axis=1) - 1.0)))


@dataclass(frozen=True)
class RankKDecomposition:
    rank_k: int
    projections: list
    target: np.ndarray

    @property
    def dim(self):
        return self.target.shape[0]

    def residual(self):
        return frob(sum(self.projections) - self.target)


@dataclass(frozen=True)
class DecomposabilityReport:
    """Diagnostic summary of whether ``A`` splits into rank-one projections.

    ``verdict`` is one of ``"OK"``, ``"FailNotPSD"``, ``"FailNormCondition"``,
    ``"FailTraceNotInteger"``, ``"FailTraceBelowRank"``. ``k`` is the nearest
    integer to the trace and is the decomposition length when the verdict is OK.
    """

    is_psd: bool
    k: int
    trace_residual: float
    rank: int
    norm: float
    is_projection: bool
    verdict: str

    @property
    def ok(self):
        return self.verdict == "OK"


def _trace_tolerance(tr, cfg):
    return cfg.tol_recon * max(1.0, abs(tr))


def check_decomposable(A, cfg=DEFAULT_TOL):
    """Test the necessary and sufficient conditions for a rank-one decomposition.

    The norm test comes first: a positive operator with norm at most one
    that is neither zero nor a projection can never be a sum of projections,
    regardless of its trace.
    """
    A = symmetric(A)
    values = eig(A).values
    scale = max(1.0, float(np.max(np.abs(values))))
    psd = bool(values[-1] >= -cfg.tol_psd * scale)
    rank = int(np.sum(np.abs(values) > cfg.tol_rank * scale))
    tr = float(np.trace(A))
    k = int(round(tr))
    norm = float(np.max(np.abs(values)))
    proj = is_projection(A, cfg)
    common = dict(is_psd=psd, k=k, trace_residual=abs(tr - k), rank=rank,
                  norm=norm, is_projection=proj)
    if not psd:
        return DecomposabilityReport(verdict="FailNotPSD", **common)
    if rank > 0 and norm <= 1.0 + cfg.tol_recon and not proj:
        return DecomposabilityReport(verdict="FailNormCondition", **common)
    if abs(tr - k) > _trace_tolerance(tr, cfg):
        return DecomposabilityReport(verdict="FailTraceNotInteger", **common)
    if k < rank:
        return DecomposabilityReport(verdict="FailTraceBelowRank", **common)
    return DecomposabilityReport(verdict="OK", **common)


class PeelStep(NamedTuple):
    """Bookkeeping for one extracted factor.

    ``case`` is 1 (top eigenvector peeled, rank kept) or 2 (root search,
    rank drops by one). For case 2, ``f_start``/``f_end`` are the values of
    the ``rank``-th eigenvalue of the remainder at the two ends of the search
    arc and ``angle`` is the root found.
    """

    case: int
    rank: int
    remaining: int
    angle: float
    f_start: float
    f_end: float


class _Spectrum:
    """A positive operator held as ``sum_m values[m] * cols[:, m] ⊗ cols[:, m]``.

    Peeling only ever combines two columns by a plane rotation, so the columns
    stay orthonormal and the operator stays diagonal in them.
    """

    def __init__(self, values, cols):
        self.values = np.array(values, dtype=float)
        self.cols = np.array(cols, dtype=float)
        self.active = list(range(self.values.size))

    def _pick(self, fn):
        vals = self.values[self.active]
        return self.active[int(fn(vals))]

    def top(self):
        return self._pick(np.argmax)

    def bottom(self):
        # the last of tied minima, i.e. the n-th in eigenvalue order
        return self._pick(lambda v: v.size - 1 - np.argmin(v[::-1]))

    def peel_top(self):
        m = self.top()
        self.values[m] -= 1.0
        return self.cols[:, m].copy()

    def _block(self, top, bot, t):
        c, s = math.cos(t), math.sin(t)
        return np.array([[self.values[top] - c * c, -c * s],
                         [-c * s, self.values[bot] - s * s]])

    def smallest_after(self, top, bot, t):
        """Smallest eigenvalue of the remainder after removing ``y(t) ⊗ y(t)``."""
        rest = [self.values[m] for m in self.active if m not in (top, bot)]
        low = float(np.linalg.eigvalsh(self._block(top, bot, t))[0])
        return min([low] + rest)

    def peel_root(self, cfg):
        """Remove ``y ⊗ y`` with ``y`` on the arc from the top to the bottom column."""
        if len(self.active) == 1:
            (m,) = self.active
            self.active = []
            return self.cols[:, m].copy(), (0.0, 0.0, 0.0)
        top, bot = self.top(), self.bottom()
        t, f0, f1 = _bisect_root(lambda t: self.smallest_after(top, bot, t), cfg)
        c, s = math.cos(t), math.sin(t)
        x = c * self.cols[:, top] + s * self.cols[:, bot]
        # the plane block is now rank one, w w^T with w = (sqrt(M00), -+sqrt(M11));
        # diagonal entries at rounding level are zeros, not sqrt-amplified noise
        sigma = self.values[top] + self.values[bot] - 1.0
        if sigma > 0:
            M = self._block(top, bot, t)
            d = np.where(np.diag(M) > cfg.tol_psd * sigma, np.diag(M), 0.0)
            u0, u1 = np.sqrt(d / d.sum())
            if M[0, 1] < 0:
                u1 = -u1
            self.cols[:, top] = u0 * self.cols[:, top] + u1 * self.cols[:, bot]
        self.values[top] = max(sigma, 0.0)
        self.active.remove(bot)
        return x / np.linalg.norm(x), (t, f0, f1)


def _bisect_root(f, cfg):
    """Sign-change root of ``f`` on ``[0, pi/2]`` with ``f(0) >= 0 >= f(pi/2)``.

    Exact zeros send the search left, so the smallest root wins.
    """
    lo, hi = 0.0, math.pi / 2
    f_lo, f_hi = f(lo), f(hi)
    if f_lo < -cfg.tol_psd or f_hi > cfg.tol_psd:
        raise InvalidCase2State(
            f"endpoint values f(0)={f_lo:.3e}, f(pi/2)={f_hi:.3e} do not bracket a root"
        )
    if abs(f_lo) <= cfg.tol_psd:
        return lo, f_lo, f_hi
    if abs(f_hi) <= cfg.tol_psd:
        return hi, f_lo, f_hi
    while hi - lo > cfg.tol_bisect:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), f_lo, f_hi


def _spectrum(A, cfg):
    values, V = eig(A)
    scale = max(1.0, float(np.max(np.abs(values))))
    n = int(np.sum(values > cfg.tol_rank * scale))
    return _Spectrum(values[:n], V[:, :n])


def peel_root(A, cfg=DEFAULT_TOL):
    """Unit vector ``y`` with ``A - y ⊗ y`` positive and of rank one less.

    ``A`` must be in the balanced state: positive with ``trace(A) == rank(A)``.
    The search runs over ``y(t) = cos(t) u_top + sin(t) u_bot`` where
    ``u_top``/``u_bot`` are eigenvectors of the largest and smallest positive
    eigenvalues; the left endpoint wins whenever it is already a root.
    """
    spec = _spectrum(symmetric(A), cfg)
    n = spec.values.size
    if n == 0:
        raise InvalidCase2State("zero operator has no rank to remove")
    if abs(spec.values.sum() - n) > _trace_tolerance(n, cfg):
        raise InvalidCase2State(f"trace {spec.values.sum():.12g} differs from rank {n}")
    y, _ = spec.peel_root(cfg)
    return y


def decompose_rank_one(A, k=None, cfg=DEFAULT_TOL):
    """Write ``A`` as a sum of ``k`` rank-one projections.

    ``A`` is diagonalized once. While more factors remain than the rank, the
    top eigenvector is peeled; once they are equal, each factor comes from
    the root search and the remainder is rotated back to diagonal form in
    the plane of the two eigenvectors involved.

    Parameters
    ----------
    A : array_like
        Positive semidefinite matrix whose trace is (numerically) the integer
        ``k``.
    k : int, optional
        Number of projections; defaults to the rounded trace.
    cfg : ToleranceConfig

    Returns
    -------
    ProjectionDecomposition
        Factors in the order they were peeled.

    Raises
    ------
    NotDecomposable
        ``reason="trace"`` if the trace is not ``k`` or ``k`` is below the
        rank; ``reason="norm"`` if ``A`` has norm at most one and is not a
        projection; ``reason="psd"`` if ``A`` is indefinite.
    """
    target = symmetric(A)
    report = check_decomposable(target, cfg)
    if k is None:
        k = report.k
    if not report.is_psd:
        raise NotDecomposable("psd", "operator is not positive semidefinite")
    if report.verdict == "FailNormCondition":
        raise NotDecomposable("norm", "norm is at most 1 and the operator is not a projection")
    if int(k) != k or k < 0:
        raise InvalidInput(f"length must be a non-negative integer, got {k!r}")
    k = int(k)
    tr = float(np.trace(target))
    if abs(tr - k) > _trace_tolerance(tr, cfg):
        raise NotDecomposable("trace", f"trace {tr:.12g} is not {k}")
    if k < report.rank:
        raise NotDecomposable("trace", f"trace {k} is below rank {report.rank}")

    spec = _spectrum(psd_clamp(target, cfg), cfg)
    # absorb the rounding gap so the balanced state is exact
    if spec.values.size:
        spec.values *= k / spec.values.sum()
    factors, steps = [], []
    for remaining in range(k, 0, -1):
        rank = len(spec.active)
        if remaining > rank:
            # the trace exceeds the rank, so the top eigenvalue is > 1
            factors.append(spec.peel_top())
            steps.append(PeelStep(1, rank, remaining, 0.0, math.nan, math.nan))
        else:
            x, (t, f0, f1) = spec.peel_root(cfg)
            factors.append(x)
            steps.append(PeelStep(2, rank, remaining, t, f0, f1))
    dim = target.shape[0]
    return ProjectionDecomposition(np.array(factors).reshape(k, dim), target, tuple(steps))


def decompose_rank_k(weights, projections, cfg=DEFAULT_TOL):
    """Rewrite ``sum(w_i P_i)`` as a sum of ``sum(w_i)`` rank-``k`` projections.

    The ``P_i`` must be mutually orthogonal projections sharing one rank ``k``
    and the weights must sum to an integer ``r >= len(P)``. Each ``P_i`` is
    split into ``k`` rank-one slots; slot ``j`` of every ``P_i`` forms a
    rank-one problem, and the ``l``-th factors of the ``k`` slot problems are
    mutually orthogonal, so they add up to a rank-``k`` projection ``Q_l``.
    """
    weights = np.asarray(weights, dtype=float).ravel()
    projections = [symmetric(P) for P in projections]
    if len(projections) == 0 or len(weights) != len(projections):
        raise InvalidInput("need one weight per projection and at least one projection")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise InvalidInput("weights must be finite and non-negative")
    dim = projections[0].shape[0]
    if any(P.shape != (dim, dim) for P in projections):
        raise InvalidInput("projections have mismatched dimensions")
    r_float = float(weights.sum())
    r = int(round(r_float))
    if abs(r_float - r) > _trace_tolerance(r_float, cfg):
        raise InvalidInput(f"weights sum to {r_float:.12g}, not an integer")
    if r < len(projections):
        raise InvalidInput(f"weight sum {r} is below the number of projections {len(projections)}")

    slot_vectors = []
    rank_k = None
    for i, P in enumerate(projections):
        if not is_projection(P, cfg):
            raise InvalidInput(f"operator {i} is not a projection")
        values, V = eig(P)
        rk = int(np.sum(values > 0.5))
        if rank_k is None:
            rank_k = rk
        if rk != rank_k or rk == 0:
            raise InvalidInput("projections must share one nonzero rank")
        slot_vectors.append(V[:, :rk])
        for j in range(i):
            if frob(P @ projections[j]) > cfg.tol_recon:
                raise InvalidInput(f"projections {j} and {i} are not orthogonal")

    # slot problems: A_j = sum_i w_i P_ij
    slots = []
    for j in range(rank_k):
        A_j = sum(w * outer(vecs[:, j]) for w, vecs in zip(weights, slot_vectors))
        slots.append(decompose_rank_one(A_j, r, cfg).factors)

    Q = [sum(outer(slots[j][l]) for j in range(rank_k)) for l in range(r)]
    target = symmetric(sum(w * P for w, P in zip(weights, projections)))
    return RankKDecomposition(rank_k, [symmetric(q) for q in Q], target)
