from __future__ import annotations

import gmpy2
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asicpovm.constructions import asic_pruned, closed_form_G_inverse
from asicpovm.linalg import (
    NotHermitianError,
    NotPositiveDefiniteError,
    extended_rank,
    extended_solve,
    hermitian_eig,
    inner,
    inv_sqrt_psd,
    jacobi_eigh,
    numerical_rank,
    outer,
    sqrt_psd,
)


def _random_hermitian(n, rng, pd=False):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if pd:
        return a @ a.conj().T + n * np.eye(n)
    return a + a.conj().T


def test_inner_examples():
    assert inner([1, 0], [1, 0]) == 1
    assert inner([1, 0], [0, 1]) == 0
    s = 2**-0.5
    assert abs(inner([s, s], [s, -s])) < 1e-16
    assert inner([1j, 0], [1, 0]) == -1j  # conjugate-linear in the first slot
    with pytest.raises(ValueError):
        inner([1, 0], [1, 0, 0])


def test_outer_examples():
    assert np.array_equal(outer([1, 0]), [[1, 0], [0, 0]])
    assert np.array_equal(outer([0, 1]), [[0, 0], [0, 1]])
    assert np.allclose(outer(np.array([1, 1]) * 2**-0.5), 0.5)


def test_hermitian_eig_examples():
    assert np.allclose(hermitian_eig(np.eye(3)).values, 1)
    assert np.allclose(hermitian_eig(np.diag([5.0, 2.0])).values, [2, 5])
    eig = hermitian_eig(np.array([[0, 1], [1, 0]]))
    assert np.allclose(eig.values, [-1, 1])
    with pytest.raises(NotHermitianError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_phase_convention():
    rng = np.random.default_rng(1)
    eig = hermitian_eig(_random_hermitian(6, rng))
    v = eig.vectors
    piv = v[np.argmax(np.abs(v), axis=0), np.arange(6)]
    assert np.allclose(piv.imag, 0) and np.all(piv.real > 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 24), st.integers(0, 2**32 - 1))
def test_jacobi_agrees_with_lapack(n, seed):
    m = _random_hermitian(n, np.random.default_rng(seed))
    lap = hermitian_eig(m, method="lapack")
    jac = hermitian_eig(m, method="jacobi")
    scale = np.abs(lap.values).max()
    assert np.allclose(jac.values, lap.values, atol=1e-12 * scale)
    assert np.allclose(jac.reconstruct(), m, atol=1e-11 * scale)
    assert abs(lap.values.sum() - np.trace(m).real) <= 1e-12 * max(1.0, np.abs(m).sum())


def test_jacobi_stopping_rule():
    m = _random_hermitian(8, np.random.default_rng(3))
    w, v = jacobi_eigh(m)
    assert np.allclose(v.conj().T @ v, np.eye(8), atol=1e-13)
    d = v.conj().T @ m @ v
    off = np.linalg.norm(d - np.diag(np.diag(d)))
    assert off <= 1e-12 * np.linalg.norm(m)


def test_inv_sqrt_examples():
    assert np.allclose(inv_sqrt_psd(np.eye(4)), np.eye(4))
    assert np.allclose(inv_sqrt_psd(np.diag([4.0, 9.0])), np.diag([1 / 2, 1 / 3]))
    g = asic_pruned(3).frame_operator
    r = inv_sqrt_psd(g)
    assert np.max(np.abs(r @ r - closed_form_G_inverse(3))) <= 1e-12
    with pytest.raises(NotPositiveDefiniteError) as info:
        inv_sqrt_psd(np.diag([1.0, -1.0]))
    assert info.value.min_eigenvalue == pytest.approx(-1.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 64), st.integers(0, 2**32 - 1))
def test_inv_sqrt_round_trip(n, seed):
    m = _random_hermitian(n, np.random.default_rng(seed), pd=True)
    r = inv_sqrt_psd(m)
    assert np.linalg.norm(r @ m @ r - np.eye(n)) <= 1e-10
    assert np.allclose(r, r.conj().T)
    s = sqrt_psd(m)
    assert np.allclose(s @ s, m, atol=1e-10 * np.abs(m).max())


def test_numerical_rank_examples():
    assert numerical_rank(np.eye(4)) == 4
    assert numerical_rank(np.ones((3, 3))) == 1
    assert numerical_rank(np.zeros((3, 3))) == 0


@given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=10))
def test_outer_rank_one(v):
    v = np.array(v)
    if np.linalg.norm(v) > 1e-6:
        assert numerical_rank(outer(v)) == 1


def test_extended_rank_beats_float_on_near_dependence():
    eps = 1e-30
    with gmpy2.context(gmpy2.get_context(), precision=256):
        rows = [[gmpy2.mpc(1), gmpy2.mpc(1)], [gmpy2.mpc(1), gmpy2.mpc(1) + gmpy2.mpfr(eps)]]
    assert numerical_rank(np.array([[1, 1], [1, 1 + eps]])) == 1
    rank, pivot = extended_rank(rows, 256)
    assert rank == 2 and 0 < pivot < 1e-29
    assert extended_rank([[1, 2], [2, 4]], 256)[0] == 1
    with pytest.raises(ValueError):
        extended_rank(rows, 53)


def test_extended_solve():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 6))
    x = rng.normal(size=(6, 2))
    sol = extended_solve(a.tolist(), (a @ x).tolist(), 200)
    assert np.allclose(np.array(sol, dtype=float), x, atol=1e-12)
    with pytest.raises(np.linalg.LinAlgError):
        extended_solve([[1, 2], [2, 4]], [[1], [2]], 128)
