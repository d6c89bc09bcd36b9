"""Brute-force dense two-mode simulator for small cutoffs.

Basis |n_a, n_b> with n_a <= A (signal) and n_b <= B (pump), flattened as
n_a * (B + 1) + n_b. Deliberately slow; used to check the block machinery.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from src.physics.evolution import NMState
from src.utils.errors import DomainError, TruncationError

logger = logging.getLogger("nm-spdc")

MAX_STATES = 2500
NORM_TOL = 1e-12
LEAKAGE_TOL = 1e-10


def _check_cutoffs(A: int, B: int) -> None:
    if A < 0 or B < 0:
        raise DomainError(f"cutoffs must be >= 0, got A={A}, B={B}")
    if (A + 1) * (B + 1) > MAX_STATES:
        raise DomainError(f"dense oracle is capped at {MAX_STATES} states, got {(A + 1) * (B + 1)}")


def _lowering(cutoff: int) -> sp.csr_matrix:
    return sp.csr_matrix(np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=np.float64)), 1))


def complete_energy(A: int, B: int) -> int:
    """Largest N whose whole block fits inside the cutoffs."""
    return min(A, 2 * B + 1)


def _energies(A: int, B: int) -> np.ndarray:
    return np.arange(A + 1)[:, None] + 2 * np.arange(B + 1)[None, :]


@dataclass(frozen=True)
class DenseTwoModeState:
    amplitudes: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2:
            raise DomainError("dense amplitudes must be an (A+1, B+1) matrix")
        _check_cutoffs(amps.shape[0] - 1, amps.shape[1] - 1)
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"dense state norm {norm:.15f} is not 1")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes: np.ndarray) -> DenseTwoModeState:
        amps = np.asarray(amplitudes, dtype=np.complex128)
        norm = math.sqrt(float(np.vdot(amps, amps).real))
        if norm == 0.0:
            raise DomainError("cannot normalize the zero state")
        return cls(amps / norm)

    @property
    def cutoffs(self) -> tuple[int, int]:
        return self.amplitudes.shape[0] - 1, self.amplitudes.shape[1] - 1


def dense_hamiltonian(A: int, B: int) -> sp.csr_matrix:
    """a^2 b^dag + h.c. on the truncated product basis."""
    _check_cutoffs(A, B)
    a, b = _lowering(A), _lowering(B)
    down = sp.kron(a @ a, b.T)
    return (down + down.T).tocsr()


def dense_block(H: sp.spmatrix, N: int, B: int) -> np.ndarray:
    """Restriction of the dense H to the basis |N-2k, k>, k = 0..N/2."""
    A = H.shape[0] // (B + 1) - 1
    if N < 0 or N % 2 or N > A or N // 2 > B:
        raise DomainError(f"block N={N} does not fit in cutoffs A={A}, B={B}")
    idx = [(N - 2 * k) * (B + 1) + k for k in range(N // 2 + 1)]
    return H[idx, :][:, idx].toarray()


def dense_evolve(state: DenseTwoModeState, tau: float) -> DenseTwoModeState:
    """exp(-i H tau) |state>, refusing states with weight on truncated blocks."""
    if tau == 0.0:
        return state
    A, B = state.cutoffs
    probs = np.abs(state.amplitudes) ** 2
    leakage = float(probs[_energies(A, B) > complete_energy(A, B)].sum())
    if leakage > LEAKAGE_TOL:
        raise TruncationError(f"state reaches blocks cut by A={A}, B={B}", leakage)
    H = dense_hamiltonian(A, B)
    psi = expm_multiply(-1j * tau * H, state.amplitudes.reshape(-1))
    return DenseTwoModeState(psi.reshape(A + 1, B + 1))


def dense_initial_state(beta: float, A: int, B: int) -> DenseTwoModeState:
    """|0>_s (x) |beta>_p cut at n_b <= min(B, A/2) and renormalized."""
    top = min(B, A // 2)
    amps = np.zeros((A + 1, B + 1), dtype=np.complex128)
    amps[0, 0] = 1.0
    for n in range(top):
        amps[0, n + 1] = amps[0, n] * beta / math.sqrt(n + 1)
    return DenseTwoModeState.normalized(amps)


def from_nm_state(state: NMState, A: int | None = None, B: int | None = None) -> DenseTwoModeState:
    top = max(state.energies)
    A = top if A is None else A
    B = top // 2 if B is None else B
    if top > complete_energy(A, B):
        raise DomainError(f"block N={top} does not fit in cutoffs A={A}, B={B}")
    amps = np.zeros((A + 1, B + 1), dtype=np.complex128)
    for N, a in state.blocks.items():
        for k, value in enumerate(a):
            amps[N - 2 * k, k] = value
    return DenseTwoModeState.normalized(amps)


def to_nm_state(state: DenseTwoModeState) -> NMState:
    A, B = state.cutoffs
    blocks = {}
    for N in range(0, complete_energy(A, B) + 1, 2):
        blocks[N] = np.array([state.amplitudes[N - 2 * k, k] for k in range(N // 2 + 1)])
    return NMState(blocks)


def pump_marginal(state: DenseTwoModeState) -> np.ndarray:
    return (np.abs(state.amplitudes) ** 2).sum(axis=0)


def mean_energy(state: DenseTwoModeState) -> float:
    A, B = state.cutoffs
    return float(np.sum(_energies(A, B) * np.abs(state.amplitudes) ** 2))


def dense_squeezed_coherent(beta: float, r: float, cutoff: int, working_cutoff: int | None = None) -> np.ndarray:
    """S(r)|beta> by a dense matrix exponential of (r/2)(a^2 - a^dag^2)."""
    work = working_cutoff if working_cutoff is not None else 2 * cutoff + 60
    if work > MAX_STATES:
        raise DomainError(f"working cutoff {work} exceeds {MAX_STATES}")
    a = np.diag(np.sqrt(np.arange(1, work + 1, dtype=np.float64)), 1)
    generator = 0.5 * r * (a @ a - (a @ a).T)
    coherent = np.zeros(work + 1)
    coherent[0] = math.exp(-0.5 * beta * beta)
    for n in range(work):
        coherent[n + 1] = coherent[n] * beta / math.sqrt(n + 1)
    return (expm(generator) @ coherent)[: cutoff + 1]
