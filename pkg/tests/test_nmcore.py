import math

import numpy as np
import pytest

from src.physics.nmcore import (
    APPROX_K_MAX,
    SubspaceSpec,
    approx_central_eigenvalue,
    approximation_table,
    build_hamiltonian,
    central_index_range,
    coupling,
    eigen_central,
    eigen_full,
    eigvec_by_recurrence,
    positive_central_eigenvalues,
)
from src.utils.errors import DivergenceError, DomainError


@pytest.mark.parametrize("N", [-2, 1, 7])
def test_subspace_rejects_bad_energy(N):
    with pytest.raises(DomainError):
        SubspaceSpec(N)


def test_coupling_values():
    assert coupling(4, 0) == pytest.approx(math.sqrt(12))
    assert coupling(4, 1) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        coupling(4, 2)


def test_block_n4_spectrum():
    dec = eigen_full(build_hamiltonian(4))
    np.testing.assert_allclose(dec.eigenvalues, [-4.0, 0.0, 4.0], atol=1e-12)


def test_block_n2_spectrum_and_vectors():
    dec = eigen_full(build_hamiltonian(2))
    np.testing.assert_allclose(dec.eigenvalues, [-math.sqrt(2), math.sqrt(2)], atol=1e-12)
    np.testing.assert_allclose(dec.eigenvectors[:, 1], [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-12)


def test_block_n6_closed_form():
    H = build_hamiltonian(6)
    np.testing.assert_allclose(H.offdiag, np.sqrt([30.0, 24.0, 6.0]))
    inner, outer = math.sqrt(30 - 12 * math.sqrt(5)), math.sqrt(30 + 12 * math.sqrt(5))
    np.testing.assert_allclose(eigen_full(H).eigenvalues, [-outer, -inner, inner, outer], atol=1e-10)


def test_block_zero_is_trivial():
    dec = eigen_full(build_hamiltonian(0))
    assert dec.eigenvalues.tolist() == [0.0]
    assert dec.eigenvectors.tolist() == [[1.0]]


def test_spectrum_pairs_and_zero_mode():
    for N in range(2, 402, 2):
        values = eigen_full(build_hamiltonian(N)).eigenvalues
        np.testing.assert_allclose(values, -values[::-1], rtol=0, atol=1e-10)
        has_zero = np.min(np.abs(values)) < 1e-8
        assert has_zero == ((N // 2) % 2 == 0), N


@pytest.mark.parametrize("N", [2, 20, 100, 202])
def test_decomposition_reconstructs_block(N):
    H = build_hamiltonian(N)
    dec = eigen_full(H)
    V = dec.eigenvectors
    np.testing.assert_allclose(V.T @ V, np.eye(H.dim), atol=1e-10)
    np.testing.assert_allclose(V @ np.diag(dec.eigenvalues) @ V.T, H.to_dense(), atol=1e-9 * H.scale)


def test_sign_convention_first_component_positive():
    V = eigen_full(build_hamiltonian(60)).eigenvectors
    for j in range(V.shape[1]):
        col = V[:, j]
        first = col[np.flatnonzero(np.abs(col) > 1e-10 * np.abs(col).max())[0]]
        assert first > 0


def test_decomposition_is_read_only():
    dec = eigen_full(build_hamiltonian(10))
    with pytest.raises(ValueError):
        dec.eigenvalues[0] = 1.0


@pytest.mark.parametrize(
    "dim, n_cut, expected",
    [(51, 9, (16, 34)), (52, 9, (17, 34)), (3, 9, (0, 2)), (52, 0, (25, 26))],
)
def test_central_index_range(dim, n_cut, expected):
    assert central_index_range(dim, n_cut) == expected


def test_zero_window_keeps_zero_or_closest_pair():
    assert eigen_central(build_hamiltonian(100), 0).eigenvalues.tolist() == pytest.approx([0.0], abs=1e-10)
    pair = eigen_central(build_hamiltonian(102), 0).eigenvalues
    assert pair.size == 2
    assert pair[0] == pytest.approx(-pair[1])


@pytest.mark.parametrize("N", [100, 102])
def test_central_matches_full_slice(N):
    H = build_hamiltonian(N)
    full = eigen_full(H)
    central = eigen_central(H, 9)
    lo = central.offset
    np.testing.assert_allclose(central.eigenvalues, full.eigenvalues[lo : lo + central.size], atol=1e-9)
    np.testing.assert_allclose(
        np.abs(central.eigenvectors), np.abs(full.eigenvectors[:, lo : lo + central.size]), atol=1e-8
    )


def test_recurrence_matches_solver_for_small_block():
    H = build_hamiltonian(20)
    dec = eigen_full(H)
    for j, lam in enumerate(dec.eigenvalues):
        np.testing.assert_allclose(eigvec_by_recurrence(H, lam), dec.eigenvectors[:, j], atol=1e-8)


def test_recurrence_rejects_non_eigenvalue():
    H = build_hamiltonian(20)
    values = eigen_full(H).eigenvalues
    with pytest.raises(DivergenceError):
        eigvec_by_recurrence(H, 0.5 * (values[6] + values[7]))


def test_approx_even_case_has_zero_first():
    assert approx_central_eigenvalue(100, 0) == 0.0
    assert positive_central_eigenvalues(100, 3)[0] == 0.0


def test_approx_odd_case_offset_is_positive():
    assert approx_central_eigenvalue(102, 0) > 0.0


def test_approx_index_limits():
    with pytest.raises(DomainError):
        approx_central_eigenvalue(200, APPROX_K_MAX + 1)
    with pytest.raises(DomainError):
        approx_central_eigenvalue(4, 5)


def test_approx_tracks_exact_central_eigenvalues():
    rows = approximation_table([200, 202])
    assert len(rows) == 2 * (APPROX_K_MAX + 1)
    for row in rows:
        if row["exact"] > 0:
            assert row["rel_err"] < 0.5, row
    approx = [row["approx"] for row in rows if row["N"] == 200]
    assert approx == sorted(approx)
