import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qfractal.errors import InvalidInput, NotSymmetric
from qfractal.numerics import (SymTridiag, householder_tridiagonalize, lanczos,
                               mat_power_apply, sym_eigen, sym_tridiag_eigen,
                               tridiag_moments)

P3 = np.array([[0.0, 1, 0], [1, 0, 1], [0, 1, 0]])


def cycle_adjacency(n):
    a = np.zeros((n, n))
    for v in range(n):
        a[v, (v + 1) % n] = a[(v + 1) % n, v] = 1.0
    return a


def test_eigen_1x1():
    vals, first = sym_tridiag_eigen(([0.0], []))
    assert vals.tolist() == [0.0]
    assert first.tolist() == [1.0]


def test_eigen_2x2():
    vals, first = sym_tridiag_eigen(([0.0, 0.0], [1.0]))
    np.testing.assert_allclose(vals, [-1, 1], atol=1e-15)
    np.testing.assert_allclose(first, [2 ** -0.5, 2 ** -0.5], atol=1e-15)


def test_eigen_path3_matches_characteristic_polynomial():
    # det(xI - P3) = x^3 - 2x, roots by hand: -sqrt2, 0, sqrt2
    vals, first = sym_tridiag_eigen(([0.0, 0, 0], [1.0, 1]))
    np.testing.assert_allclose(vals, [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-14)
    for x in vals:
        assert abs(x ** 3 - 2 * x) < 1e-13
    assert abs(np.sum(first ** 2) - 1) < 1e-14


def test_eigen_rejects_nonfinite():
    with pytest.raises(InvalidInput):
        sym_tridiag_eigen(([0.0, np.nan], [1.0]))
    with pytest.raises(InvalidInput):
        SymTridiag([0.0, 1.0], [np.inf])


def test_eigen_handles_reducible_input():
    vals, first = sym_tridiag_eigen(([1.0, 2.0, 3.0], [0.0, 0.0]))
    assert vals.tolist() == [1.0, 2.0, 3.0]
    assert first.tolist() == [1.0, 0.0, 0.0]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 50), st.integers(0, 2 ** 32 - 1))
def test_eigen_reconstruction(n, seed):
    rng = np.random.default_rng(seed)
    t = SymTridiag(rng.normal(size=n), rng.normal(size=n - 1))
    vals, first, q = sym_tridiag_eigen(t, vectors=True)
    assert np.all(np.diff(vals) >= 0)
    np.testing.assert_allclose(q @ np.diag(vals) @ q.T, t.to_dense(), atol=1e-9)
    np.testing.assert_allclose(q.T @ q, np.eye(n), atol=1e-10)
    assert abs(np.sum(first ** 2) - 1) < 1e-10
    # eigenvalues-only path tracks the same first components
    vals2, first2 = sym_tridiag_eigen(t)
    np.testing.assert_array_equal(vals, vals2)
    np.testing.assert_allclose(first, first2, atol=1e-12)
    np.testing.assert_allclose(vals, np.linalg.eigvalsh(t.to_dense()), atol=1e-10 * max(1, np.abs(vals).max()))


def test_eigen_deterministic():
    rng = np.random.default_rng(3)
    t = SymTridiag(rng.normal(size=40), rng.normal(size=39))
    a = sym_tridiag_eigen(t)
    b = sym_tridiag_eigen(t)
    assert a[0].tobytes() == b[0].tobytes() and a[1].tobytes() == b[1].tobytes()


def test_householder_keeps_first_coordinate():
    rng = np.random.default_rng(5)
    m = rng.normal(size=(12, 12))
    m = m + m.T
    diag, off, q = householder_tridiagonalize(m, accumulate=True)
    t = SymTridiag(diag, off).to_dense()
    np.testing.assert_allclose(q @ t @ q.T, m, atol=1e-12)
    np.testing.assert_allclose(q[:, 0], np.eye(12)[0], atol=0)


def test_sym_eigen_against_numpy():
    rng = np.random.default_rng(11)
    m = rng.normal(size=(40, 40))
    m = m + m.T
    vals, vecs = sym_eigen(m)
    np.testing.assert_allclose(vals, np.linalg.eigvalsh(m), atol=1e-10)
    np.testing.assert_allclose(vecs @ np.diag(vals) @ vecs.T, m, atol=1e-10)


def test_mat_power_identity():
    np.testing.assert_array_equal(mat_power_apply(np.eye(3), [1, 2, 3], 5), [1, 2, 3])


def test_mat_power_counts_walks():
    # walks of length 2 from an end of P3: 0-1-0 and 0-1-2
    walks = np.zeros(3)
    for mid, end in itertools.product(range(3), repeat=2):
        walks[end] += P3[0, mid] * P3[mid, end]
    np.testing.assert_array_equal(mat_power_apply(P3, [1, 0, 0], 2), walks)
    np.testing.assert_array_equal(walks, [1, 0, 1])


def test_mat_power_zero_and_errors():
    v = np.array([0.5, -1.0, 2.0])
    np.testing.assert_array_equal(mat_power_apply(P3, v, 0), v)
    with pytest.raises(InvalidInput):
        mat_power_apply(P3, [1, 0], 1)
    with pytest.raises(InvalidInput):
        mat_power_apply(np.ones((2, 3)), [1, 0, 0], 1)


def _gram_schmidt_krylov(m, v0, count):
    basis = []
    vec = np.asarray(v0, float)
    for _ in range(count):
        w = vec.copy()
        for b in basis:
            w -= (b @ w) * b
        norm = np.linalg.norm(w)
        if norm < 1e-12:
            break
        basis.append(w / norm)
        vec = m @ vec
    q = np.column_stack(basis)
    return q.T @ m @ q


def test_lanczos_path3_against_gram_schmidt():
    alpha, beta = lanczos(P3, [1.0, 0, 0], 3)
    t = _gram_schmidt_krylov(P3, [1.0, 0, 0], 3)
    np.testing.assert_allclose(alpha, np.diag(t), atol=1e-14)
    np.testing.assert_allclose(beta, np.abs(np.diag(t, 1)), atol=1e-14)
    np.testing.assert_allclose(alpha, [0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(beta, [1, 1], atol=1e-15)


def test_lanczos_cycle5_three_strata():
    alpha, beta = lanczos(cycle_adjacency(5), np.eye(5)[0], 5)
    np.testing.assert_allclose(alpha, [0, 0, 1], atol=1e-14)
    np.testing.assert_allclose(beta, [math.sqrt(2), 1], atol=1e-14)


def test_lanczos_trivial_and_errors():
    alpha, beta = lanczos(np.zeros((1, 1)), [1.0], 1)
    assert alpha.tolist() == [0.0] and beta.size == 0
    with pytest.raises(NotSymmetric):
        lanczos(np.array([[0.0, 1.0], [0.0, 0.0]]), [1.0, 0.0], 2)
    with pytest.raises(InvalidInput):
        lanczos(P3, [1.0, 1.0, 0.0], 2)
    with pytest.raises(InvalidInput):
        lanczos(P3, [1.0, 0.0, 0.0], 4)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2 ** 32 - 1))
def test_lanczos_moment_identity(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n))
    m = (m + m.T) / 2
    v0 = rng.normal(size=n)
    v0 /= np.linalg.norm(v0)
    alpha, beta = lanczos(m, v0, n)
    assert np.all(beta > 0)
    count = 2 * alpha.size
    tri = tridiag_moments(alpha, beta, count)
    for k in range(count):
        direct = v0 @ mat_power_apply(m, v0, k)
        assert abs(tri[k] - direct) <= 1e-9 * max(1.0, abs(direct))


def test_lanczos_deterministic():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(20, 20))
    m = m + m.T
    v = np.eye(20)[0]
    a1, b1 = lanczos(m, v, 20)
    a2, b2 = lanczos(m, v, 20)
    assert a1.tobytes() == a2.tobytes() and b1.tobytes() == b2.tobytes()
