import numpy as np
import pytest

from conftest import random_density, random_hermitian
from spinglow.linalg import (
    ShapeError,
    ValidationError,
    commutator,
    hermitian_eig,
    kron,
    multiply,
    partial_trace,
    partial_transpose,
)


def loop_multiply(a, b):
    n, k = a.shape
    m = b.shape[1]
    out = np.zeros((n, m), dtype=complex)
    for i in range(n):
        for j in range(m):
            for t in range(k):
                out[i, j] += a[i, t] * b[t, j]
    return out


def test_multiply_matches_triple_loop(rng):
    a = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    b = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    np.testing.assert_allclose(multiply(a, b), loop_multiply(a, b), atol=1e-13)


def test_multiply_shape_mismatch():
    with pytest.raises(ShapeError):
        multiply(np.eye(2), np.eye(3))


def test_kron_mixed_product(rng):
    a, b, c, d = (rng.normal(size=(2, 2)) for _ in range(4))
    np.testing.assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-13)


def test_kron_of_identities_is_identity():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2), np.eye(2)), np.eye(8))


def test_sigma_plus_embedding_entry():
    sp = np.array([[0, 1], [0, 0]])
    m = kron(sp, np.eye(2))
    assert m[0, 2] == 1 and np.count_nonzero(m) == 2


def test_commutator_of_pauli():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1, -1]).astype(complex)
    np.testing.assert_allclose(commutator(x, y), 2j * z)


@pytest.mark.parametrize("n", [1, 2, 4, 8])
def test_eigensolver_matches_numpy(rng, n):
    h = random_hermitian(rng, n)
    eig = hermitian_eig(h)
    np.testing.assert_allclose(eig.eigenvalues, np.linalg.eigvalsh(h), atol=1e-12)
    assert np.all(np.diff(eig.eigenvalues) >= 0)


def test_eigensolver_reconstructs_50_random_matrices(rng):
    for _ in range(50):
        n = int(rng.integers(2, 9))
        h = random_hermitian(rng, n)
        eig = hermitian_eig(h)
        v = eig.eigenvectors
        np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
        np.testing.assert_allclose(eig.reconstruct(), h, atol=1e-12)


def test_eigensolver_32x32(rng):
    h = random_hermitian(rng, 32)
    eig = hermitian_eig(h)
    np.testing.assert_allclose(eig.eigenvalues, np.linalg.eigvalsh(h), atol=1e-11)


def test_eigensolver_diagonal_and_degenerate():
    eig = hermitian_eig(np.diag([3.0, 1.0, 1.0, -2.0]))
    np.testing.assert_allclose(eig.eigenvalues, [-2, 1, 1, 3])
    assert eig.sweeps <= 1


def test_eigensolver_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_eigensolver_rejects_non_square():
    with pytest.raises(ShapeError):
        hermitian_eig(np.zeros((2, 3)))


def test_partial_trace_of_product_state(rng):
    a = random_density(rng, 2)
    b = random_density(rng, 4)
    np.testing.assert_allclose(partial_trace(kron(a, b), [2, 4], 0), a, atol=1e-14)
    np.testing.assert_allclose(partial_trace(kron(a, b), [2, 4], 1), b, atol=1e-14)


def test_partial_trace_matches_explicit_sum(rng):
    rho = random_density(rng, 8)
    r = rho.reshape(2, 2, 2, 2, 2, 2)
    expected = np.zeros((4, 4), dtype=complex)
    for k in range(2):
        expected += r[:, k, :, :, k, :].reshape(4, 4)
    np.testing.assert_allclose(partial_trace(rho, [2, 2, 2], [0, 2]), expected, atol=1e-14)


def test_partial_trace_preserves_trace(rng):
    rho = random_density(rng, 8)
    assert abs(np.trace(partial_trace(rho, [2, 2, 2], [1])) - 1) < 1e-14


def test_partial_trace_bad_keep(rng):
    with pytest.raises(ShapeError):
        partial_trace(random_density(rng, 4), [2, 2], [3])


def test_partial_transpose_twice_is_identity(rng):
    rho = random_density(rng, 8)
    twice = partial_transpose(partial_transpose(rho, [2, 2, 2], 1), [2, 2, 2], 1)
    np.testing.assert_allclose(twice, rho)


def test_partial_transpose_of_both_is_full_transpose(rng):
    rho = random_density(rng, 4)
    np.testing.assert_allclose(partial_transpose(rho, [2, 2], {0, 1}), rho.T)


def test_partial_transpose_bad_index(rng):
    with pytest.raises(ValidationError):
        partial_transpose(random_density(rng, 4), [2, 2], 2)
