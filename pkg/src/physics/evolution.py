"""Two-mode states in the fixed-energy block representation and their evolution.

A state is a map N -> a(N, k), the amplitude of |N-2k>_s |k>_p. The
Hamiltonian never mixes blocks, so each block evolves on its own.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field
from multiprocessing.pool import ThreadPool
from typing import Literal, NamedTuple

import numpy as np
from scipy.stats import poisson

from src.physics.nmcore import EigenDecomposition, build_hamiltonian, eigen_central, eigen_full
from src.physics.states import DEFAULT_TAIL_EPS, coherent_log_amplitudes
from src.utils.errors import DomainError

logger = logging.getLogger("nm-spdc")


# tau_opt(beta) = B_T / (1 + C_T beta)^D_T
B_T, C_T, D_T = 1.70, 1.16, 0.84


@dataclass(frozen=True)
class EvolutionMode:
    kind: Literal["full", "central"] = "full"
    n_cut: int = 9

    def __post_init__(self) -> None:
        if self.kind not in ("full", "central"):
            raise DomainError(f"unknown evolution mode {self.kind!r}")
        if self.n_cut < 0:
            raise DomainError(f"n_cut must be >= 0, got {self.n_cut}")

    @classmethod
    def full(cls) -> EvolutionMode:
        return cls("full")

    @classmethod
    def central(cls, n_cut: int = 9) -> EvolutionMode:
        return cls("central", n_cut)

    def __str__(self) -> str:
        return "full" if self.kind == "full" else f"central:{self.n_cut}"


@functools.lru_cache(maxsize=4096)
def decompose(N: int, mode: EvolutionMode = EvolutionMode.full()) -> EigenDecomposition:
    """Cached eigendecomposition of block N; arrays are read-only."""
    H = build_hamiltonian(N)
    if mode.kind == "full":
        return eigen_full(H)
    return eigen_central(H, mode.n_cut)


@dataclass(frozen=True)
class NMState:
    blocks: dict[int, np.ndarray] = field(compare=False)
    tail_eps: float = DEFAULT_TAIL_EPS

    def __post_init__(self) -> None:
        frozen: dict[int, np.ndarray] = {}
        for N in sorted(self.blocks):
            if N < 0 or N % 2:
                raise DomainError(f"only nonnegative even N are allowed, got N={N}")
            a = np.array(self.blocks[N], dtype=np.complex128)
            if a.shape != (N // 2 + 1,):
                raise DomainError(f"block N={N} needs {N // 2 + 1} amplitudes, got shape {a.shape}")
            a.flags.writeable = False
            frozen[int(N)] = a
        object.__setattr__(self, "blocks", frozen)

    @property
    def energies(self) -> list[int]:
        return list(self.blocks)

    @property
    def max_pump(self) -> int:
        return max((N // 2 for N in self.blocks), default=0)

    def block_weights(self) -> dict[int, float]:
        return {N: float(np.vdot(a, a).real) for N, a in self.blocks.items()}

    def norm_squared(self) -> float:
        return math.fsum(self.block_weights().values())

    def restricted(self, max_N: int) -> NMState:
        """Blocks with N <= max_N, renormalized."""
        kept = {N: a for N, a in self.blocks.items() if N <= max_N}
        norm = math.sqrt(math.fsum(float(np.vdot(a, a).real) for a in kept.values()))
        if norm == 0.0:
            raise DomainError(f"no weight left at or below N={max_N}")
        return NMState({N: a / norm for N, a in kept.items()}, self.tail_eps)


def state_fidelity(a: NMState, b: NMState) -> float:
    """|<a|b>|^2 / (|a|^2 |b|^2) over the union of blocks."""
    na, nb = a.norm_squared(), b.norm_squared()
    if na == 0.0 or nb == 0.0:
        raise DomainError("fidelity with the zero state is undefined")
    overlap = sum(np.vdot(a.blocks[N], b.blocks[N]) for N in a.blocks.keys() & b.blocks.keys())
    return float(abs(overlap) ** 2 / (na * nb))


class OverlapPoint(NamedTuple):
    index: int
    eigenvalue: float
    weight: float


def retained_pump_range(beta: float, tail_eps: float = DEFAULT_TAIL_EPS) -> tuple[int, int]:
    """Pump numbers n in a symmetric window around beta^2 holding 1 - tail_eps Poisson mass."""
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    if not 0.0 < tail_eps < 1.0:
        raise DomainError(f"tail_eps must lie in (0, 1), got {tail_eps}")
    if beta == 0.0:
        return 0, 0
    mu = beta * beta
    centre = int(round(mu))
    widths = np.arange(0, centre + int(40 * math.sqrt(mu)) + 50)
    hi = centre + widths
    lo = np.maximum(centre - widths, 0)
    mass = poisson.cdf(hi, mu) - poisson.cdf(lo - 1, mu)
    reached = np.flatnonzero(mass >= 1.0 - tail_eps)
    w = int(reached[0]) if reached.size else int(widths[-1])
    return int(lo[w]), int(hi[w])


def initial_state(beta: float, tail_eps: float = DEFAULT_TAIL_EPS) -> NMState:
    """|0>_s (x) |beta>_p: block N = 2n holds e^{-beta^2/2} beta^n / sqrt(n!) at k = n."""
    lo, hi = retained_pump_range(beta, tail_eps)
    if beta == 0.0:
        return NMState({0: np.ones(1)}, tail_eps)
    n = np.arange(lo, hi + 1, dtype=np.float64)
    amps = np.exp(coherent_log_amplitudes(beta, n))
    blocks = {}
    for pump, amp in zip(range(lo, hi + 1), amps):
        a = np.zeros(pump + 1, dtype=np.complex128)
        a[pump] = amp
        blocks[2 * pump] = a
    logger.debug("Initial state beta=%.6g: pump numbers %d..%d", beta, lo, hi)
    return NMState(blocks, tail_eps)


def _block_propagator(mode: EvolutionMode, tau: float):
    def run(item: tuple[int, np.ndarray]) -> tuple[int, np.ndarray]:
        N, a = item
        dec = decompose(N, mode)
        V = dec.eigenvectors
        phases = np.exp(-1j * dec.eigenvalues * tau)
        return N, V @ (phases * (V.T @ a))

    return run


def evolve(
    state: NMState,
    tau: float,
    mode: EvolutionMode = EvolutionMode.full(),
    workers: int = 1,
) -> NMState:
    """a <- V exp(-i Lambda tau) V^T a per block."""
    if not math.isfinite(tau):
        raise DomainError(f"tau must be finite, got {tau}")
    if tau == 0.0 and mode.kind == "full":
        return state

    run = _block_propagator(mode, tau)
    items = list(state.blocks.items())
    if workers > 1 and len(items) > 1:
        with ThreadPool(workers) as pool:
            results = pool.map(run, items)
    else:
        results = [run(item) for item in items]

    logger.debug("Evolved %d blocks to tau=%.6g (%s)", len(results), tau, mode)
    return NMState(dict(results), state.tail_eps)


def overlap_spectrum(n: int, mode: EvolutionMode = EvolutionMode.full()) -> list[OverlapPoint]:
    """|<chi^{2n,j} | 0_s, n_p>|^2 against lambda_j."""
    if n < 0:
        raise DomainError(f"pump number must be >= 0, got {n}")
    dec = decompose(2 * n, mode)
    weights = dec.eigenvectors[n, :] ** 2
    return [
        OverlapPoint(int(j), float(lam), float(w))
        for j, lam, w in zip(dec.indices, dec.eigenvalues, weights)
    ]


def tau_opt(beta: float) -> float:
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    return B_T / (1.0 + C_T * beta) ** D_T
