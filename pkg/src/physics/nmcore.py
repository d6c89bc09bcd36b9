"""Fixed-energy blocks of the down-conversion Hamiltonian and their spectra.

In the block of total energy N = n_a + 2 n_b the basis is |N-2k>_s |k>_p,
k = 0..N/2, and the Hamiltonian is a zero-diagonal symmetric tridiagonal
matrix with couplings c_k = sqrt((k+1)(N-2k)(N-2k-1)).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np
from scipy.linalg import eigh_tridiagonal

from src.utils.errors import DivergenceError, DomainError

logger = logging.getLogger("nm-spdc")

# Components below this fraction of the column maximum do not fix the sign.
PHASE_TOL = 1e-10
DIVERGENCE_NORM = 1e12
CLOSURE_TOL = 1e-6
APPROX_K_MAX = 10

# Central-eigenvalue fit coefficients, N/2 even: b_e(N) = b_b (b_c + N)^b_d,
# d_e(N) = d_a + d_b N^d_d.
_EVEN_FIT = {"b_b": 1.43, "b_c": 6.99, "b_d": 0.41, "d_a": 1.09, "d_b": 0.84, "d_d": -0.39}
# N/2 odd adds the offset a_o(N) = a_a + a_b N^a_d.
_ODD_FIT = {
    "a_a": 2.14, "a_b": 0.43, "a_d": 0.46,
    "b_b": 1.58, "b_c": 6.04, "b_d": 0.41,
    "d_a": 1.08, "d_b": 0.90, "d_d": -0.41,
}


@dataclass(frozen=True)
class SubspaceSpec:
    N: int

    def __post_init__(self) -> None:
        if not isinstance(self.N, (int, np.integer)) or self.N < 0 or self.N % 2:
            raise DomainError(f"total energy N must be a nonnegative even integer, got {self.N!r}")

    @property
    def dim(self) -> int:
        return self.N // 2 + 1


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    spec: SubspaceSpec
    offdiag: np.ndarray = field(compare=False)

    @property
    def N(self) -> int:
        return self.spec.N

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def diagonal(self) -> np.ndarray:
        return np.zeros(self.dim)

    @property
    def scale(self) -> float:
        """max(1, max|c_k|), the yardstick for residual checks."""
        return max(1.0, float(self.offdiag.max())) if self.offdiag.size else 1.0

    def to_dense(self) -> np.ndarray:
        return np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues; column j of `eigenvectors` is chi^{N,j}."""

    N: int
    eigenvalues: np.ndarray = field(compare=False)
    eigenvectors: np.ndarray = field(compare=False)
    mode: Literal["full", "central"] = "full"
    # Position of column 0 within the full ascending spectrum.
    offset: int = 0

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    @property
    def indices(self) -> np.ndarray:
        """Full-spectrum indices of the stored eigenpairs."""
        return np.arange(self.offset, self.offset + self.size)


def coupling(N: int, k: int) -> float:
    spec = SubspaceSpec(N)
    if not 0 <= k <= spec.dim - 2:
        raise DomainError(f"coupling index k={k} outside 0..{spec.dim - 2} for N={N}")
    return math.sqrt((k + 1) * (N - 2 * k) * (N - 2 * k - 1))


def build_hamiltonian(N: int) -> TridiagonalHamiltonian:
    spec = SubspaceSpec(N)
    k = np.arange(spec.dim - 1, dtype=np.float64)
    offdiag = np.sqrt((k + 1) * (N - 2 * k) * (N - 2 * k - 1))
    offdiag.flags.writeable = False
    return TridiagonalHamiltonian(spec, offdiag)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """First significant component of each column made positive."""
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        significant = np.flatnonzero(np.abs(col) > PHASE_TOL * np.abs(col).max())
        if col[significant[0]] < 0:
            vectors[:, j] = -col
    return vectors


def _decompose(H: TridiagonalHamiltonian, lo: int, hi: int, mode: str) -> EigenDecomposition:
    if H.dim == 1:
        values, vectors = np.zeros(1), np.ones((1, 1))
    else:
        # stebz: Sturm-sequence bisection; eigenvectors by inverse iteration (stein).
        values, vectors = eigh_tridiagonal(
            H.diagonal,
            H.offdiag,
            select="i",
            select_range=(lo, hi),
            lapack_driver="stebz",
        )
        vectors = _fix_signs(np.array(vectors, dtype=np.float64))
    values = np.asarray(values, dtype=np.float64)
    values.flags.writeable = False
    vectors.flags.writeable = False
    return EigenDecomposition(H.N, values, vectors, mode=mode, offset=lo)


def eigen_full(H: TridiagonalHamiltonian) -> EigenDecomposition:
    return _decompose(H, 0, H.dim - 1, "full")


def central_index_range(dim: int, n_cut: int) -> tuple[int, int]:
    """Inclusive full-spectrum index window of the eigenpairs nearest zero.

    Odd dim (N/2 even): zero plus n_cut on each side, 2 n_cut + 1 in all.
    Even dim: n_cut eigenvalues on each side of zero. There is no zero
    eigenvalue to keep, so n_cut = 0 still keeps the +-lambda pair closest to
    zero: two eigenpairs, one more than 2 n_cut + 1.
    """
    if n_cut < 0:
        raise DomainError(f"n_cut must be >= 0, got {n_cut}")
    if dim % 2:
        centre = dim // 2
        return max(0, centre - n_cut), min(dim - 1, centre + n_cut)
    half = dim // 2
    pairs = max(1, n_cut)
    return max(0, half - pairs), min(dim - 1, half - 1 + pairs)


def eigen_central(H: TridiagonalHamiltonian, n_cut: int) -> EigenDecomposition:
    lo, hi = central_index_range(H.dim, n_cut)
    return _decompose(H, lo, hi, "central")


def eigvec_by_recurrence(H: TridiagonalHamiltonian, lam: float) -> np.ndarray:
    """Eigenvector from lam*chi_k = c_{k-1} chi_{k-1} + c_k chi_{k+1}, chi_0 = 1.

    Forward recurrence; only trustworthy for small blocks (N <= 60).
    """
    c = H.offdiag
    chi = np.zeros(H.dim)
    chi[0] = 1.0
    for k in range(H.dim - 1):
        prev = c[k - 1] * chi[k - 1] if k > 0 else 0.0
        chi[k + 1] = (lam * chi[k] - prev) / c[k]
        if abs(chi[k + 1]) > DIVERGENCE_NORM:
            raise DivergenceError(
                f"recurrence for N={H.N}, lambda={lam:.6g} diverged at k={k + 1}"
            )
    norm = float(np.linalg.norm(chi))
    if norm > DIVERGENCE_NORM:
        raise DivergenceError(f"recurrence norm {norm:.3e} for N={H.N}, lambda={lam:.6g}")
    chi /= norm
    if H.dim > 1:
        closure = abs(lam * chi[-1] - c[-1] * chi[-2])
        if closure > CLOSURE_TOL * H.scale:
            raise DivergenceError(
                f"lambda={lam:.6g} is not an eigenvalue of block N={H.N} "
                f"(closing residual {closure:.3e})"
            )
    return chi


def _positive_count(N: int) -> int:
    dim = SubspaceSpec(N).dim
    return dim // 2


def approx_central_eigenvalue(N: int, k: int) -> float:
    """Power-law fit of the k-th non-negative central eigenvalue of block N."""
    spec = SubspaceSpec(N)
    if not 0 <= k <= APPROX_K_MAX:
        raise DomainError(f"fit index k={k} outside 0..{APPROX_K_MAX}")
    even = (N // 2) % 2 == 0
    # Even blocks count the zero eigenvalue as k = 0.
    available = _positive_count(N) + (1 if even else 0)
    if spec.N == 0 or k >= available:
        raise DomainError(f"block N={N} has only {available} non-negative eigenvalues, k={k}")

    if even:
        f = _EVEN_FIT
        b = f["b_b"] * (f["b_c"] + N) ** f["b_d"]
        d = f["d_a"] + f["d_b"] * N ** f["d_d"]
        return b * k**d
    f = _ODD_FIT
    a = f["a_a"] + f["a_b"] * N ** f["a_d"]
    b = f["b_b"] * (f["b_c"] + N) ** f["b_d"]
    d = f["d_a"] + f["d_b"] * N ** f["d_d"]
    return a + b * k**d


def positive_central_eigenvalues(N: int, count: int) -> np.ndarray:
    """The `count` smallest non-negative eigenvalues of block N, ascending.

    Indexed as the fit indexes k: zero first when N/2 is even.
    """
    H = build_hamiltonian(N)
    start = H.dim // 2
    stop = min(H.dim - 1, start + count - 1)
    if H.dim == 1:
        return np.zeros(1)
    values = eigh_tridiagonal(
        H.diagonal,
        H.offdiag,
        eigvals_only=True,
        select="i",
        select_range=(start, stop),
        lapack_driver="stebz",
    )
    values = np.asarray(values, dtype=np.float64)
    # Zero comes out of bisection as +-eps; clamp for the k = 0 row.
    if (N // 2) % 2 == 0:
        values[0] = 0.0
    return values


def relative_error(approx: float, exact: float) -> float:
    if abs(exact) > PHASE_TOL:
        return abs(approx - exact) / abs(exact)
    return abs(approx - exact)


def approximation_table(N_values: Iterable[int], k_max: int = APPROX_K_MAX) -> list[dict]:
    rows = []
    for N in N_values:
        exact = positive_central_eigenvalues(N, k_max + 1)
        for k, value in enumerate(exact):
            approx = approx_central_eigenvalue(N, k)
            rows.append(
                {
                    "N": N,
                    "k": k,
                    "exact": float(value),
                    "approx": approx,
                    "rel_err": relative_error(approx, float(value)),
                }
            )
        logger.debug("Central-eigenvalue fit table for N=%d: %d rows", N, len(exact))
    return rows
