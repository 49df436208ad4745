import numpy as np
import pytest

from hambif import linalg
from hambif.errors import ConvergenceFailure, NonSymmetric, NotAnEigenvalue


def test_standard_symplectic_2x2():
    j = linalg.standard_symplectic(1)
    assert np.array_equal(j, np.array([[0.0, 1.0], [-1.0, 0.0]]))


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_symplectic_square_and_antisymmetry(n):
    j = linalg.standard_symplectic(n)
    assert np.array_equal(j @ j, -np.eye(2 * n))
    assert np.array_equal(j.T, -j)


def test_morse_indices_diagonal():
    a = np.diag([-1.0, 2.0, -3.0])
    assert linalg.morse_index_negative(a) == 2
    assert linalg.morse_index_positive(a) == 1


def test_morse_indices_edges():
    assert linalg.morse_index_negative(np.zeros((3, 3))) == 0
    assert linalg.morse_index_positive(np.eye(4)) == 4


def test_morse_counts_complete():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        a = rng.standard_normal((n, n))
        a = 0.5 * (a + a.T)
        total = (
            linalg.morse_index_negative(a)
            + linalg.morse_index_positive(a)
            + linalg.kernel_dimension(a)
        )
        assert total == n


def test_morse_index_rejects_nonsymmetric():
    m = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(NonSymmetric):
        linalg.morse_index_negative(m)


def test_general_eigenvalues_rotation():
    w = linalg.general_eigenvalues(linalg.standard_symplectic(1))
    assert sorted(np.round(v.imag, 12) for v in w) == [-1.0, 1.0]
    assert max(abs(v.real) for v in w) < 1e-12


def test_general_eigenvalues_scaled_rotation():
    # J * diag(1, 4) has characteristic polynomial t^2 + 4, roots +/- 2i.
    m = linalg.standard_symplectic(1) @ np.diag([1.0, 4.0])
    w = np.sort_complex(linalg.general_eigenvalues(m))
    assert np.allclose(w, [-2j, 2j], atol=1e-12)


def test_general_eigenvalues_conjugation_closed():
    rng = np.random.default_rng(11)
    for _ in range(15):
        n = int(rng.integers(2, 8))
        w = linalg.general_eigenvalues(rng.standard_normal((n, n)))
        remaining = list(w)
        while remaining:
            lam = remaining.pop()
            match = min(range(len(remaining)), key=lambda i: abs(remaining[i] - lam.conjugate()), default=None)
            if abs(lam.imag) < 1e-12:
                continue
            assert match is not None
            assert abs(remaining[match] - lam.conjugate()) < 1e-9
            remaining.pop(match)


def test_real_invariant_subspace_full_plane():
    basis = linalg.real_invariant_subspace(linalg.standard_symplectic(1), 1.0)
    assert basis.shape == (2, 2)
    assert np.allclose(basis.T @ basis, np.eye(2), atol=1e-12)


def test_real_invariant_subspace_block():
    j = linalg.standard_symplectic(1)
    m = np.zeros((4, 4))
    m[:2, :2] = j
    m[2:, 2:] = 2.0 * j
    basis = linalg.real_invariant_subspace(m, 2.0)
    assert basis.shape == (4, 2)
    # span of the last two coordinate axes
    assert np.max(np.abs(basis[:2, :])) < 1e-10
    proj = basis @ basis.T
    assert np.allclose(proj[2:, 2:], np.eye(2), atol=1e-10)


def test_real_invariant_subspace_invariance_residual():
    rng = np.random.default_rng(3)
    j = linalg.standard_symplectic(3)
    for _ in range(10):
        a = rng.standard_normal((6, 6))
        a = a @ a.T + 0.5 * np.eye(6)  # positive definite -> imaginary spectrum of JA
        m = j @ a
        w = linalg.general_eigenvalues(m)
        beta = max(v.imag for v in w)
        basis = linalg.real_invariant_subspace(m, beta)
        resid = np.linalg.norm(m @ basis - basis @ (basis.T @ m @ basis))
        assert resid < 1e-8
        assert np.allclose(basis.T @ basis, np.eye(basis.shape[1]), atol=1e-10)


def test_real_invariant_subspace_rejects_bad_beta():
    with pytest.raises(NotAnEigenvalue):
        linalg.real_invariant_subspace(linalg.standard_symplectic(1), 3.0)


def test_real_invariant_subspace_rejects_defective():
    # 0-eigenvalue Jordan block shifted to +/- i: [[i, 1], [0, i]] realified.
    m = np.array(
        [
            [0.0, 1.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0, 0.0],
        ]
    )
    with pytest.raises((ConvergenceFailure, NotAnEigenvalue)):
        linalg.real_invariant_subspace(m, 1.0)


def test_orthogonal_complement_basic():
    basis = linalg.orthogonal_complement([np.array([1.0, 0.0, 0.0])], 3)
    assert basis.shape == (3, 2)
    assert np.max(np.abs(basis[0, :])) < 1e-12


def test_orthogonal_complement_empty():
    assert np.array_equal(linalg.orthogonal_complement([], 2), np.eye(2))


def test_orthogonal_complement_rank_deficient():
    v = np.array([1.0, 2.0, -1.0])
    basis = linalg.orthogonal_complement([v, 2.0 * v], 3)
    assert basis.shape == (3, 2)
    assert np.max(np.abs(basis.T @ v)) < 1e-12
