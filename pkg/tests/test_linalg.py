import numpy as np
import pytest
from numpy.testing import assert_allclose

from chdl.errors import DimensionError, NotHermitianError, NotPSDError
from chdl.linalg import (hermitian_eig, operator_norm, partial_trace, polar_decompose, sqrt_psd,
                         tensor_product, trace_norm)
from chdl.rand import ginibre, random_density_matrix, random_hermitian, random_psd, random_unitary


def test_tensor_product_trivial():
    assert_allclose(tensor_product(np.eye(2), np.eye(2)), np.eye(4))
    assert_allclose(tensor_product(2 * np.eye(2), np.eye(3)), 2 * np.eye(6))


def test_tensor_product_index_formula(rng):
    a, b = ginibre(2, 2, rng), ginibre(2, 2, rng)
    ref = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for m in range(2):
                    ref[2 * i + k, 2 * j + m] = a[i, j] * b[k, m]
    assert_allclose(tensor_product(a, b), ref, atol=1e-14)


def test_partial_trace_product_state(rng):
    rho, sigma = random_density_matrix(2, rng), random_psd(3, rng)
    out = partial_trace(np.kron(rho, sigma), (2, 3), 1)
    assert_allclose(out, rho * np.trace(sigma), atol=1e-12)
    assert_allclose(partial_trace(np.kron(rho, sigma), (2, 3), 0), sigma * np.trace(rho), atol=1e-12)


def test_partial_trace_bell():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    p = np.outer(bell, bell)
    assert_allclose(partial_trace(p, (2, 2), 0), np.eye(2) / 2)
    assert_allclose(partial_trace(p, (2, 2), 1), np.eye(2) / 2)


def test_partial_trace_summation_oracle(rng):
    m = random_hermitian(4, rng)
    ref_b = np.array([[sum(m[2 * i + k, 2 * j + k] for k in range(2)) for j in range(2)] for i in range(2)])
    ref_a = np.array([[sum(m[2 * k + i, 2 * k + j] for k in range(2)) for j in range(2)] for i in range(2)])
    assert_allclose(partial_trace(m, (2, 2), 1), ref_b, atol=1e-14)
    assert_allclose(partial_trace(m, (2, 2), 0), ref_a, atol=1e-14)


def test_partial_trace_three_factors(rng):
    a, b, c = random_density_matrix(2, rng), random_density_matrix(3, rng), random_density_matrix(2, rng)
    big = tensor_product(a, b, c)
    assert_allclose(partial_trace(big, (2, 3, 2), (0, 2)), b, atol=1e-12)
    assert_allclose(partial_trace(big, (2, 3, 2), 1), np.kron(a, c), atol=1e-12)


def test_partial_trace_rejects_bad_shape():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), (2, 3), 0)
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), (2, 2), 2)


def test_polar_unitary(rng):
    u = random_unitary(3, rng)
    w, p = polar_decompose(u)
    assert_allclose(w, u, atol=1e-12)
    assert_allclose(p, np.eye(3), atol=1e-12)


def test_polar_support_convention():
    w, p = polar_decompose(np.diag([2.0, 0.0]))
    assert_allclose(w, np.diag([1.0, 0.0]), atol=1e-14)
    assert_allclose(p, np.diag([2.0, 0.0]), atol=1e-14)


def test_polar_reconstruction(rng):
    a = ginibre(3, 3, rng)
    w, p = polar_decompose(a)
    assert_allclose(w @ p, a, atol=1e-10)
    assert_allclose(w.conj().T @ w, np.eye(3), atol=1e-10)
    assert np.all(np.linalg.eigvalsh(p) > -1e-12)


def test_hermitian_eig_examples(rng):
    w, _ = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    assert_allclose(w, [1, 2, 3])
    w, _ = hermitian_eig(np.array([[0, 1], [1, 0]]))
    assert_allclose(w, [-1, 1], atol=1e-15)
    a = random_hermitian(4, rng)
    w, v = hermitian_eig(a)
    assert np.linalg.norm(a @ v - v * w) < 1e-8


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_trace_norm(rng):
    assert trace_norm(np.eye(5)) == pytest.approx(5.0)
    u, v = ginibre(3, 1, rng).ravel(), ginibre(3, 1, rng).ravel()
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    assert trace_norm(np.outer(u, v.conj())) == pytest.approx(1.0)
    a = ginibre(3, 3, rng)
    ref = np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(a.conj().T @ a), 0, None)))
    assert trace_norm(a) == pytest.approx(ref, rel=1e-12)


def test_operator_norm(rng):
    assert operator_norm(random_unitary(4, rng)) == pytest.approx(1.0)
    assert operator_norm(np.diag([0.3, -2.0])) == pytest.approx(2.0)
    a = ginibre(3, 3, rng)
    vs = ginibre(3, 10_000, rng)
    vs /= np.linalg.norm(vs, axis=0)
    sampled = np.max(np.linalg.norm(a @ vs, axis=0))
    val = operator_norm(a)
    assert sampled <= val + 1e-12
    assert val - sampled < 1e-2


def test_sqrt_psd(rng):
    assert_allclose(sqrt_psd(np.eye(3)), np.eye(3))
    assert_allclose(sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    a = random_psd(4, rng)
    r = sqrt_psd(a)
    assert_allclose(r @ r, a, atol=1e-8)


def test_sqrt_psd_clamps_and_rejects():
    r = sqrt_psd(np.diag([1.0, -1e-9]))
    assert_allclose(r, np.diag([1.0, 0.0]), atol=1e-14)
    with pytest.raises(NotPSDError):
        sqrt_psd(np.diag([1.0, -1e-3]))
