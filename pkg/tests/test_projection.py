import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_orthogonal
from tightframes.errors import InvalidInput, NotDecomposable
from tightframes.operator_core import ToleranceConfig, outer, rank_eps
from tightframes.projection import (
    check_decomposable,
    decompose_rank_k,
    decompose_rank_one,
    peel_root,
)

CFG = ToleranceConfig()
S3 = math.sqrt(3) / 2


def case2_root_oracle(a1, a2):
    """Closed-form root on the arc for diag(a1, a2) with a1 + a2 = 2.

    det(diag(a1, a2) - y y^T) with y = (cos t, sin t) is a1 a2 - a1 sin^2 - a2 cos^2,
    which vanishes at sin^2 t = a2 (a1 - 1) / (a1 - a2).
    """
    s2 = a2 * (a1 - 1) / (a1 - a2)
    return np.array([math.sqrt(1 - s2), math.sqrt(s2)])


def random_psd(rng, dim, rank, k):
    G = rng.standard_normal((dim, rank)) * np.exp(rng.uniform(-2, 2, rank))
    A = G @ G.T
    return A * (k / np.trace(A))


def as_set(vectors):
    """Projections are sign-blind; compare factors as a sorted list of outer products."""
    return sorted(tuple(np.round(outer(v).ravel(), 9)) for v in vectors)


# --- decompose_rank_one -------------------------------------------------------


def test_case1_then_case2_by_hand():
    dec = decompose_rank_one(np.diag([2.0, 1.0]), 3)
    assert as_set(dec.factors) == as_set([[1, 0], [1, 0], [0, 1]])
    assert [s.case for s in dec.steps] == [1, 2, 2]


def test_case2_three_halves_fixture():
    dec = decompose_rank_one(np.diag([1.5, 0.5]), 2)
    assert as_set(dec.factors) == as_set([[S3, 0.5], [S3, -0.5]])
    assert dec.residual() < 1e-12


def test_identity_gives_standard_basis():
    dec = decompose_rank_one(np.eye(4), 4)
    assert as_set(dec.factors) == as_set(np.eye(4))


def test_length_defaults_to_trace():
    assert len(decompose_rank_one(np.diag([2.0, 1.0]))) == 3


def test_trace_mismatch_and_below_rank():
    with pytest.raises(NotDecomposable) as exc:
        decompose_rank_one(np.diag([2.0, 1.0]), 4)
    assert exc.value.reason == "trace"
    with pytest.raises(NotDecomposable) as exc:
        decompose_rank_one(np.diag([1.2, 1.3]), 3)
    assert exc.value.reason == "trace"
    with pytest.raises(NotDecomposable) as exc:
        decompose_rank_one(np.diag([1.5, 0.3, 0.2]), 2)
    assert exc.value.reason == "trace"


def test_norm_condition_rejected():
    with pytest.raises(NotDecomposable) as exc:
        decompose_rank_one(np.diag([0.5, 0.5]), 1)
    assert exc.value.reason == "norm"


def test_indefinite_rejected():
    with pytest.raises(NotDecomposable) as exc:
        decompose_rank_one(np.diag([3.0, -1.0]), 2)
    assert exc.value.reason == "psd"


def test_factors_lie_in_range(rng):
    A = random_psd(rng, 6, 3, 5)
    dec = decompose_rank_one(A, 5)
    P = np.linalg.pinv(A) @ A
    for x in dec.factors:
        np.testing.assert_allclose(P @ x, x, atol=1e-10)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 10), st.integers(0, 6), st.integers(0, 2**31))
def test_reconstruction_property(dim, extra, seed):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, dim + 1))
    k = rank + extra
    A = random_psd(rng, dim, rank, k)
    dec = decompose_rank_one(A, k)
    assert len(dec) == k
    assert dec.residual() <= 1e-8 * max(1.0, np.linalg.norm(A))
    assert dec.norm_error() <= CFG.tol_orth
    # peel bookkeeping: case 1 keeps rank, case 2 drops rank and length together
    ranks = [s.rank for s in dec.steps]
    for step, nxt in zip(dec.steps, dec.steps[1:] + (None,)):
        if step.case == 1:
            assert step.remaining > step.rank
            if nxt is not None:
                assert nxt.rank == step.rank
        else:
            assert step.remaining == step.rank
            if nxt is not None:
                assert nxt.rank == step.rank - 1
            if step.rank > 1:
                assert step.f_start >= -CFG.tol_psd
                assert step.f_end <= CFG.tol_psd
    assert ranks[0] == rank
    # validator soundness
    assert check_decomposable(A).ok


def test_projection_inputs_decompose(rng):
    for dim in range(1, 7):
        for rank in range(1, dim + 1):
            Q = random_orthogonal(rng, dim)[:, :rank]
            P = Q @ Q.T
            dec = decompose_rank_one(P, rank)
            assert dec.residual() < 1e-10


# --- peel_root ----------------------------------------------------------------


def test_peel_root_fixture():
    np.testing.assert_allclose(peel_root(np.diag([1.5, 0.5])), [S3, 0.5], atol=1e-12)


def test_peel_root_left_endpoint():
    np.testing.assert_array_equal(peel_root(np.diag([1.0, 1.0])), [1.0, 0.0])


def test_peel_root_one_dimensional():
    np.testing.assert_array_equal(peel_root(np.diag([1.0])), [1.0])


@pytest.mark.parametrize("a1", [1.01, 1.2, 1.5, 1.75, 1.99])
def test_peel_root_against_closed_form(a1):
    y = peel_root(np.diag([a1, 2 - a1]))
    np.testing.assert_allclose(np.abs(y), case2_root_oracle(a1, 2 - a1), atol=1e-11)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**31))
def test_peel_root_removes_one_rank(n, seed):
    rng = np.random.default_rng(seed)
    dim = n + int(rng.integers(0, 3))
    A = random_psd(rng, dim, n, n)
    y = peel_root(A)
    R = A - np.outer(y, y)
    assert abs(np.linalg.norm(y) - 1) < 1e-12
    assert np.linalg.eigvalsh(R).min() >= -CFG.tol_psd
    assert rank_eps(R) == n - 1


# --- check_decomposable -------------------------------------------------------


def test_validator_verdicts():
    assert check_decomposable(np.diag([0.5, 0.5])).verdict == "FailNormCondition"
    report = check_decomposable(np.diag([2.0, 1.0]))
    assert report.verdict == "OK" and report.k == 3
    report = check_decomposable(outer([1.0, 0.0]))
    assert report.verdict == "OK" and report.k == 1
    assert check_decomposable(np.diag([2.5, 1.0])).verdict == "FailTraceNotInteger"
    assert check_decomposable(np.diag([1.5, 0.3, 0.2])).verdict == "FailTraceBelowRank"
    assert check_decomposable(np.diag([2.0, -1.0])).verdict == "FailNotPSD"


# --- decompose_rank_k ---------------------------------------------------------


def test_rank_k_reduces_to_rank_one():
    P1, P2 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    out = decompose_rank_k([2.0, 1.0], [P1, P2])
    assert len(out.projections) == 3 and out.rank_k == 1
    np.testing.assert_allclose(sum(out.projections), np.diag([2.0, 1.0]), atol=1e-12)


def test_rank_k_two_copies_of_the_case2_split():
    P1, P2 = np.diag([1.0, 1.0, 0.0, 0.0]), np.diag([0.0, 0.0, 1.0, 1.0])
    out = decompose_rank_k([1.5, 0.5], [P1, P2])
    assert len(out.projections) == 2
    for Q in out.projections:
        np.testing.assert_allclose(Q @ Q, Q, atol=1e-12)
        assert rank_eps(Q) == 2
    np.testing.assert_allclose(sum(out.projections), 1.5 * P1 + 0.5 * P2, atol=1e-12)
    # each Q carries one factor from each slot: (sqrt3/2, 1/2) in both coordinate pairs
    for Q in out.projections:
        np.testing.assert_allclose(np.diag(Q), [0.75, 0.75, 0.25, 0.25], atol=1e-12)


def test_rank_k_single_projection():
    P = np.diag([1.0, 1.0, 0.0])
    out = decompose_rank_k([1.0], [P])
    assert len(out.projections) == 1
    np.testing.assert_allclose(out.projections[0], P, atol=1e-12)


def test_rank_k_rejects_bad_input():
    P1, P2 = np.diag([1.0, 0.0, 0.0]), np.diag([0.0, 1.0, 1.0])
    with pytest.raises(InvalidInput):
        decompose_rank_k([1.0, 1.0], [P1, P2])  # ranks differ
    with pytest.raises(InvalidInput):
        decompose_rank_k([0.5, 1.0], [np.diag([1.0, 0]), np.diag([0, 1.0])])  # non-integer
    with pytest.raises(InvalidInput):
        decompose_rank_k([0.5, 0.5], [np.diag([1.0, 0]), np.diag([0, 1.0])])  # r < n
    with pytest.raises(InvalidInput):
        decompose_rank_k([1.0, 1.0], [np.diag([1.0, 0]), np.diag([1.0, 0])])  # not orthogonal


def test_rank_k_slot_orthogonality(rng):
    dim, n, k = 7, 2, 3
    Q = random_orthogonal(rng, dim)
    Ps = [Q[:, i * k:(i + 1) * k] @ Q[:, i * k:(i + 1) * k].T for i in range(n)]
    out = decompose_rank_k([2.25, 0.75], Ps)
    for Qop in out.projections:
        # a rank-k projection built from k mutually orthogonal unit vectors
        np.testing.assert_allclose(Qop @ Qop, Qop, atol=1e-10)
        assert rank_eps(Qop) == k
    assert out.residual() < 1e-10
