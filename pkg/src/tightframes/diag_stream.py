"""Block-and-carry decomposition of a diagonal operator into rank-one projections.

The diagonal ``diag(a_0, a_1, ...)`` is consumed in blocks. Each block's last
entry is split in two so that the block trace drops to the largest integer
strictly below it; the block is then a sum of that many rank-one projections
and the leftover piece (the carry) opens the next block. Entries below the
threshold ``alpha`` may only sit at positions divisible by the block
parameter ``k``, which guarantees every block has trace at least its rank.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import EndOfStream, InfeasiblePrefix, InvalidInput
from .operator_core import DEFAULT_TOL
from .projection import ProjectionDecomposition, decompose_rank_one

__all__ = [
    "DiagSpec",
    "Block",
    "DiagStreamState",
    "StreamResidual",
    "block_parameter",
    "schedule",
    "plan",
    "next_block",
    "run_prefix",
]


@dataclass(frozen=True)
class DiagSpec:
    entries: tuple
    alpha: float

    def __post_init__(self):
        entries = tuple(float(a) for a in self.entries)
        if not all(math.isfinite(a) and a >= 0 for a in entries):
            raise InvalidInput("diagonal entries must be finite and >= 0")
        if not (math.isfinite(self.alpha) and self.alpha > 1):
            raise InvalidInput(f"alpha must exceed 1, got {self.alpha!r}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "alpha", float(self.alpha))


@dataclass(frozen=True)
class Block:
    """One emitted block: ``support`` indexes positions of the permuted stream."""

    support: tuple
    diagonal: tuple
    trace: float
    L: int
    cut: float
    carry: float
    decomposition: ProjectionDecomposition


@dataclass(frozen=True)
class DiagStreamState:
    spec: DiagSpec
    k: int
    permutation: tuple
    cursor: int = 0
    carry: float = 0.0
    blocks: tuple = field(default_factory=tuple)

    @property
    def stream(self):
        """Entries in scheduled order."""
        return tuple(self.spec.entries[p] for p in self.permutation)

    @property
    def carry_slot(self):
        return self.cursor - 1 if self.blocks else None


@dataclass(frozen=True)
class StreamResidual:
    """What is left after some blocks: the carry on one slot plus the unread tail."""

    carry: float
    carry_slot: object
    tail_slots: tuple
    tail: tuple
    alpha: float

    def as_spec(self):
        head = (self.carry,) if self.carry_slot is not None else ()
        return DiagSpec(head + self.tail, self.alpha)


def block_parameter(alpha):
    """Smallest integer ``k >= 2`` with ``1 + 2/(k-1) <= alpha``."""
    if not alpha > 1:
        raise InvalidInput("alpha must exceed 1")
    k = max(2, math.ceil(2.0 / (alpha - 1.0)) + 1)
    while k > 2 and 1 + 2 / (k - 2) <= alpha:
        k -= 1
    while 1 + 2 / (k - 1) > alpha:
        k += 1
    return k


def schedule(entries, alpha, k):
    """Stable interleave putting entries below ``alpha`` only at multiples of ``k``.

    Returns the permutation as a tuple of original indices. Raises
    :class:`InfeasiblePrefix` carrying the number of positions that could be
    filled before the large entries ran out.
    """
    small = [i for i, a in enumerate(entries) if a < alpha]
    large = [i for i, a in enumerate(entries) if a >= alpha]
    perm = []
    si = li = 0
    while si < len(small) or li < len(large):
        pos = len(perm)
        if pos % k == 0 and si < len(small):
            perm.append(small[si])
            si += 1
        elif li < len(large):
            perm.append(large[li])
            li += 1
        else:
            raise InfeasiblePrefix(pos)
    return tuple(perm)


def plan(spec, k=None):
    """Initial stream state: block parameter, schedule and zero carry."""
    if k is None:
        k = block_parameter(spec.alpha)
    elif int(k) != k or k < 2:
        raise InvalidInput(f"block parameter must be an integer >= 2, got {k!r}")
    k = int(k)
    return DiagStreamState(spec, k, schedule(spec.entries, spec.alpha, k))


def next_block(state, cfg=DEFAULT_TOL):
    """Emit the next block and return ``(block, new_state)``.

    The first block covers ``k`` fresh slots; every later block also includes
    the previous block's last slot, which holds the carry.
    """
    stream = state.stream
    remaining = len(stream) - state.cursor
    if remaining < state.k:
        raise EndOfStream(remaining, state.k)
    fresh = list(range(state.cursor, state.cursor + state.k))
    if state.blocks:
        support = [state.cursor - 1] + fresh
        diagonal = [state.carry] + [stream[p] for p in fresh]
    else:
        support = fresh
        diagonal = [stream[p] for p in fresh]
    total = math.fsum(diagonal)
    L = math.ceil(total) - 1
    carry = total - L
    cut = diagonal[-1] - carry
    if cut < 0:
        raise EndOfStream(remaining, state.k, f"last entry {diagonal[-1]} cannot absorb carry {carry}")
    trimmed = np.array(diagonal[:-1] + [cut])
    rank = int(np.count_nonzero(trimmed))
    if L < rank:
        raise EndOfStream(remaining, state.k, f"block trace {L} is below its rank {rank}")
    # exact integer trace before decomposing
    dec = decompose_rank_one(np.diag(trimmed), L, cfg)
    block = Block(tuple(support), tuple(diagonal), total, L, cut, carry, dec)
    new_state = replace(
        state, cursor=state.cursor + state.k, carry=carry, blocks=state.blocks + (block,)
    )
    return block, new_state


def run_prefix(spec, blocks, k=None, cfg=DEFAULT_TOL):
    """Decompose the first ``blocks`` blocks of the stream.

    Returns
    -------
    (ProjectionDecomposition, StreamResidual, DiagStreamState)
        The decomposition lives on the consumed slots in scheduled order; its
        target is the consumed diagonal with the carry removed from the last
        slot.
    """
    if int(blocks) != blocks or blocks < 0:
        raise InvalidInput("number of blocks must be a non-negative integer")
    state = plan(spec, k)
    for _ in range(int(blocks)):
        _, state = next_block(state, cfg)
    dim = state.cursor
    stream = state.stream
    factors = np.zeros((0, dim))
    for b in state.blocks:
        local = b.decomposition.factors
        embedded = np.zeros((local.shape[0], dim))
        embedded[:, list(b.support)] = local
        factors = np.vstack([factors, embedded])
    target = np.diag(np.array(stream[:dim], dtype=float))
    if state.blocks:
        target[dim - 1, dim - 1] -= state.carry
    residual = StreamResidual(
        carry=state.carry,
        carry_slot=state.carry_slot,
        tail_slots=tuple(range(dim, len(stream))),
        tail=tuple(stream[dim:]),
        alpha=spec.alpha,
    )
    return ProjectionDecomposition(factors, target), residual, state
