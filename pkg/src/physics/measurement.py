"""Photon-number measurement of the pump mode and the collapsed signal states."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from src.physics.evolution import EvolutionMode, NMState, decompose, evolve, initial_state
from src.physics.states import DEFAULT_TAIL_EPS, FockVector
from src.utils.errors import DomainError

logger = logging.getLogger("nm-spdc")

MIN_PROBABILITY = 1e-300


@dataclass(frozen=True)
class MeasurementOutcome:
    m: int
    probability: float
    signal: FockVector | None = field(compare=False)

    @property
    def defined(self) -> bool:
        return self.signal is not None


@dataclass(frozen=True)
class ParityStatistics:
    p_even: float
    p_odd: float
    per_m: np.ndarray = field(compare=False)


def project_pump(state: NMState, m: int) -> MeasurementOutcome:
    """Collapse on m pump photons; block N contributes a(N, m) at signal level N - 2m."""
    if m < 0:
        raise DomainError(f"measured photon number must be >= 0, got {m}")
    levels, amps = [], []
    for N, a in state.blocks.items():
        if N // 2 >= m:
            levels.append(N - 2 * m)
            amps.append(a[m])
    probability = math.fsum(abs(x) ** 2 for x in amps)
    if probability < MIN_PROBABILITY:
        logger.debug("Outcome m=%d has zero probability", m)
        return MeasurementOutcome(m, 0.0, None)
    levels, amps = np.asarray(levels), np.asarray(amps)
    # Sized to the highest occupied level.
    top = int(levels[amps != 0].max())
    keep = levels <= top
    signal = np.zeros(top + 1, dtype=np.complex128)
    signal[levels[keep]] = amps[keep] / math.sqrt(probability)
    return MeasurementOutcome(m, probability, FockVector(signal))


def m_coeff(n: int, k: int, m: int, tau: float) -> complex:
    """chi^{2n,k}_n chi^{2n,k}_m exp(-i lambda_k tau), k indexing the full spectrum."""
    if n < 0 or not 0 <= m <= n:
        raise DomainError(f"need 0 <= m <= n, got n={n}, m={m}")
    dec = decompose(2 * n)
    if not 0 <= k < dec.size:
        raise DomainError(f"eigen-index k={k} outside 0..{dec.size - 1} for n={n}")
    chi = dec.eigenvectors[:, k]
    return complex(chi[n] * chi[m] * np.exp(-1j * dec.eigenvalues[k] * tau))


def transition_amplitudes(
    n_values: Iterable[int],
    m: int,
    tau: float,
    mode: EvolutionMode = EvolutionMode.full(),
) -> np.ndarray:
    """A_n = sum over the selected eigen-indices of M^n_k(tau)."""
    n_values = list(n_values)
    if n_values and m > min(n_values):
        raise DomainError(f"m={m} exceeds the smallest pump number {min(n_values)}")
    out = np.empty(len(n_values), dtype=np.complex128)
    for i, n in enumerate(n_values):
        dec = decompose(2 * n, mode)
        V = dec.eigenvectors
        out[i] = np.sum(V[n, :] * V[m, :] * np.exp(-1j * dec.eigenvalues * tau))
    return out


def parity_statistics(state: NMState) -> ParityStatistics:
    per_m = np.zeros(state.max_pump + 1)
    for a in state.blocks.values():
        per_m[: a.size] += np.abs(a) ** 2
    p_even = math.fsum(per_m[0::2])
    p_odd = math.fsum(per_m[1::2])
    return ParityStatistics(p_even, p_odd, per_m)


def collapsed_signal(
    beta: float,
    tau: float,
    m: int,
    mode: EvolutionMode = EvolutionMode.full(),
    tail_eps: float = DEFAULT_TAIL_EPS,
) -> MeasurementOutcome:
    state = evolve(initial_state(beta, tail_eps), tau, mode)
    return project_pump(state, m)


def probability_scan(
    beta: float,
    taus: Iterable[float],
    m: int = 0,
    mode: EvolutionMode = EvolutionMode.full(),
    tail_eps: float = DEFAULT_TAIL_EPS,
) -> list[tuple[float, float]]:
    """(tau, probability of m pump photons) over a tau grid."""
    start = initial_state(beta, tail_eps)
    return [(float(t), project_pump(evolve(start, t, mode), m).probability) for t in taus]


def amplitude_parity_convention(n_values: Iterable[int], amplitudes: np.ndarray) -> dict[str, str]:
    """Which part (real/imag) carries the transition amplitudes for even and odd n."""
    n_values = np.asarray(list(n_values))
    out = {}
    for label, mask in (("even", n_values % 2 == 0), ("odd", n_values % 2 == 1)):
        part = amplitudes[mask]
        if part.size == 0:
            continue
        re, im = np.abs(part.real).sum(), np.abs(part.imag).sum()
        out[label] = "real" if re >= im else "imag"
    return out
