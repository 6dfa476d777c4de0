import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matsaevlab import qfock
from matsaevlab.qfock import build_fock, q_relation_check, vacuum_trace

from oracles import q_inner_permutation_sum, random_correlation


def test_free_gram_is_identity():
    F = build_fock(3, 0.0, N=3)
    for G in F.grams:
        assert np.array_equal(G, np.eye(G.shape[0]))
    assert F.level_dims == [1, 3, 9, 27]


def test_fermionic_dimensions():
    F = build_fock(2, -1.0)
    assert F.N == 2 and F.level_dims == [1, 2, 1] and F.dim == 4
    # word (i, i) has norm 1 + q = 0
    assert F.grams[2][0, 0] == 0 and F.grams[2][3, 3] == 0
    assert build_fock(3, -1.0, N=7).level_dims == [1, 3, 3, 1]
    for d in (1, 4):
        F = build_fock(d, -1.0)
        assert F.dim == 2 ** d
        assert F.level_dims == [math.comb(d, m) for m in range(d + 1)]


def test_bosonic_one_letter_factorials():
    F = build_fock(1, 1.0, N=6)
    assert [G[0, 0] for G in F.grams] == [math.factorial(m) for m in range(7)]


def test_bosonic_quotient_is_symmetric_power():
    F = build_fock(3, 1.0, N=3)
    assert F.level_dims == [math.comb(3 + m - 1, m) for m in range(4)]


@pytest.mark.parametrize("q", [-1.0, -0.6, 0.0, 0.3, 1.0])
def test_gram_against_permutation_sum(q):
    rng = np.random.default_rng(int(10 * q) + 20)
    d = 2
    K = random_correlation(rng, d)
    F = build_fock(d, q, N=3 if q != -1 else None, K=K)
    for m in range(1, F.N + 1):
        words = list(itertools.product(range(d), repeat=m))
        oracle = np.array([[q_inner_permutation_sum(w, v, q, K) for v in words] for w in words])
        assert np.allclose(F.grams[m], oracle, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.95, 0.95), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_gram_positive(q, d, seed):
    F = build_fock(d, q, N=3)
    for G in F.grams:
        assert np.allclose(G, G.T)
        assert np.linalg.eigvalsh(G).min() > 0
    assert F.dim == sum(d ** m for m in range(4))
    del seed


def test_frames_orthonormalize():
    F = build_fock(2, 0.5, N=3, K=np.array([[1.0, 0.3], [0.3, 1.0]]))
    for G, V in zip(F.grams, F.frames):
        assert np.allclose(V.T @ G @ V, np.eye(V.shape[1]), atol=1e-10)


def test_creation_on_vacuum():
    F = build_fock(3, 0.4, N=2)
    e = np.array([0.5, -1.0, 2.0])
    v = F.creation(e)[:, 0]
    # level-1 coordinates in the orthonormal frame: V^T G e
    level1 = F.frames[1].T @ F.grams[1] @ e
    assert np.allclose(v[F.level_slice(1)], level1)
    assert np.linalg.norm(v) == pytest.approx(np.linalg.norm(e))
    assert not np.any(F.annihilation(e)[:, 0])


def test_creation_rejects_bad_vector():
    with pytest.raises(ValueError):
        build_fock(2, 0.0, N=2).creation([1.0, 2.0, 3.0])


def test_free_relation():
    F = build_fock(2, 0.0, N=3)
    e, f = F.basis_vector(0), F.basis_vector(1)
    top = F.offsets[F.N]
    assert np.allclose((F.annihilation(e) @ F.creation(e))[:top, :top], np.eye(top))
    assert not np.any(F.annihilation(f) @ F.creation(e))


def test_fermionic_nilpotent():
    F = build_fock(3, -1.0)
    rng = np.random.default_rng(0)
    for _ in range(3):
        e = rng.standard_normal(3)
        L = F.creation(e)
        assert np.abs(L @ L).max() < 1e-12
        # l(e)^* l(e) + l(e) l(e)^* = |e|^2 everywhere, not only below the cap
        assert np.allclose(L.T @ L + L @ L.T, (e @ e) * np.eye(F.dim), atol=1e-12)


@pytest.mark.parametrize("q", [-1.0, -0.5, 0.0, 0.5, 1.0])
def test_q_relation_residual(q):
    rng = np.random.default_rng(5)
    F = build_fock(3, q, N=4 if q != -1 else None)
    for _ in range(3):
        e, f = rng.standard_normal(3), rng.standard_normal(3)
        assert q_relation_check(F, e, f) < 1e-10


def test_q_relation_correlated_ground():
    K = random_correlation(np.random.default_rng(1), 3)
    F = build_fock(3, 0.7, N=3, K=K)
    assert q_relation_check(F, F.basis_vector(0), F.basis_vector(2)) < 1e-10


@pytest.mark.parametrize("q", [-1.0, -0.5, 0.0, 0.5])
def test_vacuum_traces(q):
    F = build_fock(3, q, N=4 if q != -1 else None)
    W = [F.field_operator(F.basis_vector(i)) for i in range(3)]
    for i in range(3):
        assert np.allclose(W[i], W[i].T)
        assert vacuum_trace(F, W[i]) == 0
        for j in range(3):
            assert vacuum_trace(F, W[i] @ W[j]) == pytest.approx(float(i == j), abs=1e-12)


def test_build_fock_rejections():
    with pytest.raises(ValueError):
        build_fock(2, 1.5, N=2)
    with pytest.raises(ValueError):
        build_fock(2, 0.5)
    with pytest.raises(ValueError):
        build_fock(2, 0.0, N=9)
    with pytest.raises(ValueError):
        build_fock(5, 0.0, N=6)
    with pytest.raises(ValueError):
        build_fock(2, 0.0, N=2, K=np.array([[1.0, 2.0], [2.0, 1.0]]))


# -- dilation ----------------------------------------------------------------------


def test_dilation_example_2x2():
    A = np.array([[1.0, 0.5], [0.5, 1.0]])
    c = qfock.schur_dilation_check(A, A, 2, 1, np.ones((2, 2)))
    assert np.allclose(c.computed, [[1, 0.125], [0.125, 1]], atol=1e-12)
    assert c.residual < 1e-12 and c.closed_form_residual < 1e-12


def test_dilation_trivial_symbols_and_powers():
    x = np.arange(9.0).reshape(3, 3)
    c = qfock.schur_dilation_check(np.ones((3, 3)), np.ones((3, 3)), 2, 3, x)
    assert np.allclose(c.computed, x, atol=1e-12)
    A = random_correlation(np.random.default_rng(0), 3)
    c = qfock.schur_dilation_check(A, A, 0, 0, x)
    assert np.array_equal(c.computed, x)


@pytest.mark.parametrize("size", [2, 3])
def test_dilation_identity_all_powers(size):
    rng = np.random.default_rng(size)
    A, B = random_correlation(rng, size), random_correlation(rng, size)
    x = rng.standard_normal((size, size))
    model = qfock.dilation_model(A, B)
    for k in range(4):
        for l in range(4):
            c = qfock.schur_dilation_check(A, B, k, l, x, model)
            assert c.residual < 1e-10
            assert c.closed_form_residual < 1e-12


def test_dilation_generators_trace_to_symbols():
    A = random_correlation(np.random.default_rng(4), 3)
    model = qfock.dilation_model(A, np.eye(3))
    for i in range(3):
        for j in range(3):
            assert vacuum_trace(model.FA, model.wA[i] @ model.wA[j]) == pytest.approx(A[i, j], abs=1e-12)


def test_induction_step():
    rng = np.random.default_rng(7)
    A, B = random_correlation(rng, 3), random_correlation(rng, 3)
    x = rng.standard_normal((3, 3))
    model = qfock.dilation_model(A, B)
    for k in range(3):
        for l in range(k + 1):
            assert qfock.induction_check(A, B, k, l, x, model) < 1e-12
    with pytest.raises(ValueError):
        qfock.induction_check(A, B, 0, 1, x, model)


def test_dilation_rejections():
    with pytest.raises(ValueError):
        qfock.dilation_model(np.array([[1.0, 2.0], [2.0, 1.0]]), np.eye(2))
    with pytest.raises(ValueError):
        qfock.dilation_model(2 * np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        qfock.dilation_model(np.eye(2), np.eye(3))
    with pytest.raises(ValueError):
        qfock.schur_dilation_check(np.eye(2), np.eye(2), 4, 0, np.eye(2))
