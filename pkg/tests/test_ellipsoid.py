import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_orthogonal
from tightframes.ellipsoid import (
    Ellipsoid,
    membership,
    onb_on_ellipsoid,
    rotation_steps,
    tight_frame_on_ellipsoid,
    to_axes,
    to_operator,
)
from tightframes.errors import InvalidInput, NotInvertible
from tightframes.frames import frame_operator

H = math.sqrt(2) / 2


def random_coeffs(rng, n, total, zeros=0):
    a = rng.uniform(0.05, 1.0, n)
    if zeros:
        a[rng.choice(n, zeros, replace=False)] = 0.0
    return a * (total / a.sum())


def on_surface(a, V):
    return np.abs((V ** 2) @ np.asarray(a) - 1.0)


# --- representations ----------------------------------------------------------


def test_operator_to_axes():
    E = Ellipsoid.from_operator(np.diag([math.sqrt(2), math.sqrt(2 / 3)]))
    axes = to_axes(E)
    np.testing.assert_allclose(sorted(axes.coeffs), [0.5, 1.5], atol=1e-14)


def test_unit_sphere_axes_to_operator():
    np.testing.assert_allclose(to_operator(Ellipsoid.from_axes([1.0, 1.0])).operator, np.eye(2))


def test_degenerate_has_no_operator():
    with pytest.raises(NotInvertible):
        to_operator(Ellipsoid.from_axes([0.5, 0.0]))


def test_round_trip_with_rotated_basis(rng):
    B = random_orthogonal(rng, 4)
    a = np.array([0.3, 1.2, 2.0, 0.7])
    E = Ellipsoid.from_axes(a, B)
    back = to_axes(to_operator(E))
    np.testing.assert_allclose(sorted(back.coeffs), sorted(a), atol=1e-12)
    # the same point set: a point on one surface is on the other
    x = B[:, 1] / math.sqrt(a[1])
    assert membership(E, x) < 1e-12
    assert membership(to_operator(E), x) < 1e-12


def test_membership_values():
    E = Ellipsoid.from_axes([1.5, 0.5])
    assert membership(E, [H, H]) < 1e-15
    assert membership(E, [1.0, 0.0]) == pytest.approx(0.5)
    assert membership(Ellipsoid.from_operator(np.eye(3)), [1.0, 0.0, 0.0]) == 0.0


def test_invalid_axes():
    with pytest.raises(InvalidInput):
        Ellipsoid.from_axes([-1.0, 2.0])
    with pytest.raises(InvalidInput):
        Ellipsoid.from_axes([0.0, 0.0])


# --- rotation recursion -------------------------------------------------------


def test_onb_three_halves():
    V = onb_on_ellipsoid([1.5, 0.5])
    np.testing.assert_allclose(V, [[H, -H], [H, H]], atol=1e-15)
    assert rotation_steps([1.5, 0.5])[0].theta == pytest.approx(math.pi / 4, abs=1e-15)


def test_onb_sphere_is_standard_basis():
    np.testing.assert_array_equal(onb_on_ellipsoid(np.ones(5)), np.eye(5))


def test_onb_degenerate_pair():
    steps = rotation_steps([2.0, 0.0])
    assert steps[0].theta == pytest.approx(math.pi / 4) and steps[0].b == pytest.approx(1.0)
    np.testing.assert_allclose(onb_on_ellipsoid([2.0, 0.0]), [[H, -H], [H, H]], atol=1e-15)


def test_onb_rejects_wrong_sum():
    with pytest.raises(InvalidInput):
        onb_on_ellipsoid([1.0, 2.0])
    with pytest.raises(InvalidInput):
        onb_on_ellipsoid([2.5, -0.5])


def test_rotation_step_invariants(rng):
    a = random_coeffs(rng, 7, 7, zeros=2)
    remaining = a.copy()
    for step in rotation_steps(a):
        ai, aj = remaining[step.i], remaining[step.j]
        c2, s2 = math.cos(step.theta) ** 2, math.sin(step.theta) ** 2
        if step.i != step.j:
            assert ai * c2 + aj * s2 == pytest.approx(1.0, abs=1e-12)
            assert step.b == pytest.approx(ai * s2 + aj * c2, abs=1e-12)
        before = remaining.sum()
        remaining[step.j] = step.b
        remaining[step.i] = 0.0
        assert remaining.sum() == pytest.approx(before - 1.0, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2), st.integers(0, 2**31))
def test_onb_property(n, zeros, seed):
    rng = np.random.default_rng(seed)
    a = random_coeffs(rng, n, n, zeros=min(zeros, n - 1))
    V = onb_on_ellipsoid(a)
    assert np.linalg.norm(V @ V.T - np.eye(n)) <= 1e-10
    assert on_surface(a, V).max() <= 1e-9


# --- tight frames -------------------------------------------------------------


def test_tight_frame_one_dimensional():
    U = tight_frame_on_ellipsoid([0.5], 2)
    np.testing.assert_allclose(np.abs(U.ravel()), [math.sqrt(2)] * 2, atol=1e-15)
    np.testing.assert_allclose(frame_operator(U), [[4.0]], atol=1e-14)


def test_tight_frame_sphere_square():
    U = tight_frame_on_ellipsoid([1.0, 1.0], 2)
    np.testing.assert_allclose(U @ U.T, np.eye(2), atol=1e-15)


def test_tight_frame_three_vectors_on_ellipse():
    U = tight_frame_on_ellipsoid([1.5, 0.5], 3)
    assert U.shape == (3, 2)
    np.testing.assert_allclose(frame_operator(U), 1.5 * np.eye(2), atol=1e-14)
    assert on_surface([1.5, 0.5], U).max() < 1e-14


def test_tight_frame_rejects_bad_input():
    with pytest.raises(InvalidInput):
        tight_frame_on_ellipsoid([1.0, 1.0], 1)
    with pytest.raises(InvalidInput):
        tight_frame_on_ellipsoid([0.0, 0.0], 3)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 10), st.integers(0, 4), st.integers(0, 2), st.integers(0, 2**31))
def test_tight_frame_property(n, extra, zeros, seed):
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.1, 20.0)
    a = random_coeffs(rng, n, r, zeros=min(zeros, n - 1))
    k = n + extra
    U = tight_frame_on_ellipsoid(a, k)
    assert U.shape == (k, n)
    assert np.linalg.norm(frame_operator(U) - (k / a.sum()) * np.eye(n)) <= 1e-8
    assert on_surface(a, U).max() <= 1e-9


def test_bound_matches_trace_formula(rng):
    a = rng.uniform(0.2, 3.0, 4)
    T = np.diag(a ** -0.5)
    k = 6
    U = tight_frame_on_ellipsoid(a, k)
    K = k / np.trace(np.linalg.inv(T) @ np.linalg.inv(T))
    np.testing.assert_allclose(frame_operator(U), K * np.eye(4), atol=1e-12)
