"""CSV data behind each figure; one file per figure, deterministic across runs."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Callable

import numpy as np

from src.cli.formatters import format_csv
from src.physics.catfit import fidelity_law, per_m_characterization
from src.physics.evolution import (
    EvolutionMode,
    evolve,
    initial_state,
    overlap_spectrum,
    retained_pump_range,
    tau_opt,
)
from src.physics.measurement import m_coeff, parity_statistics, transition_amplitudes
from src.physics.nmcore import approximation_table
from src.physics.states import DEFAULT_TAIL_EPS, coherent_log_amplitudes
from src.utils.errors import UsageError

logger = logging.getLogger("nm-spdc")

SPECTRUM_PUMP_NUMBERS = (100, 101)
M_COEFF_BETA = 10.0
FLAT_AMPLITUDE_BETA = 30.0
UNEVEN_AMPLITUDE_BETA = 10.0
FIDELITY_BETAS = (2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0)
PARITY_BETA = 8.0
PER_M_MAX = 12
EIGEN_APPROX_N = (100, 200, 202, 400)
EIGEN_APPROX_COLUMNS = ("N", "k", "exact", "approx", "rel_err")

Rows = list[dict[str, Any]]


def spectrum_rows(mode: EvolutionMode, tail_eps: float) -> Rows:
    return [
        {"n": n, "j": p.index, "lambda": p.eigenvalue, "weight": p.weight}
        for n in SPECTRUM_PUMP_NUMBERS
        for p in overlap_spectrum(n, mode)
    ]


def m_coeff_rows(mode: EvolutionMode, tail_eps: float) -> Rows:
    tau = tau_opt(M_COEFF_BETA)
    rows = []
    for n in SPECTRUM_PUMP_NUMBERS:
        for p in overlap_spectrum(n, mode):
            value = m_coeff(n, p.index, 0, tau)
            rows.append({"n": n, "j": p.index, "lambda": p.eigenvalue, "re_M": value.real, "im_M": value.imag})
    return rows


def _transition_rows(beta: float, mode: EvolutionMode, tail_eps: float) -> Rows:
    lo, hi = retained_pump_range(beta, tail_eps)
    n_values = list(range(lo, hi + 1))
    amps = transition_amplitudes(n_values, 0, tau_opt(beta), mode)
    coherent = np.exp(coherent_log_amplitudes(beta, np.asarray(n_values, dtype=np.float64)))
    return [
        {"n": n, "re_A": a.real, "im_A": a.imag, "abs_A": abs(a), "coherent_amplitude": float(c)}
        for n, a, c in zip(n_values, amps, coherent)
    ]


def flat_amplitude_rows(mode: EvolutionMode, tail_eps: float) -> Rows:
    return _transition_rows(FLAT_AMPLITUDE_BETA, mode, tail_eps)


def uneven_amplitude_rows(mode: EvolutionMode, tail_eps: float) -> Rows:
    return _transition_rows(UNEVEN_AMPLITUDE_BETA, mode, tail_eps)


def fidelity_law_rows(mode: EvolutionMode, tail_eps: float) -> Rows:
    return fidelity_law(FIDELITY_BETAS, mode, tail_eps, with_fit=True)


def parity_rows(mode: EvolutionMode, tail_eps: float) -> Rows:
    state = evolve(initial_state(PARITY_BETA, tail_eps), tau_opt(PARITY_BETA), mode)
    stats = parity_statistics(state)
    logger.info("beta=%.4g: P(even)=%.6f P(odd)=%.6f", PARITY_BETA, stats.p_even, stats.p_odd)
    return [
        {"m": m, "probability": float(p), "parity": "even" if m % 2 == 0 else "odd"}
        for m, p in enumerate(stats.per_m)
    ]


_per_m_cache: dict[tuple[str, float], Rows] = {}


def per_m_rows(mode: EvolutionMode, tail_eps: float) -> Rows:
    key = (str(mode), tail_eps)
    if key not in _per_m_cache:
        _per_m_cache[key] = per_m_characterization(PARITY_BETA, PER_M_MAX, mode, tail_eps)
    return _per_m_cache[key]


FIGURES: dict[str, tuple[Callable[[EvolutionMode, float], Rows], tuple[str, ...]]] = {
    "fig1": (spectrum_rows, ("n", "j", "lambda", "weight")),
    "fig2": (m_coeff_rows, ("n", "j", "lambda", "re_M", "im_M")),
    "fig3": (flat_amplitude_rows, ("n", "re_A", "im_A", "abs_A", "coherent_amplitude")),
    "fig4": (uneven_amplitude_rows, ("n", "re_A", "im_A", "abs_A", "coherent_amplitude")),
    "fig5": (fidelity_law_rows, ("beta", "one_minus_F", "one_minus_F_fit", "beta_fit", "r_fit", "law")),
    "fig6": (parity_rows, ("m", "probability", "parity")),
    "fig7": (per_m_rows, ("m", "probability", "fidelity")),
    "fig8": (per_m_rows, ("m", "beta_fit")),
    "fig9": (per_m_rows, ("m", "r_fit")),
}


def figure_csv(
    name: str,
    mode: EvolutionMode = EvolutionMode.full(),
    tail_eps: float = DEFAULT_TAIL_EPS,
    timestamp: bool = False,
) -> str:
    if name not in FIGURES:
        raise UsageError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    build, columns = FIGURES[name]
    return format_csv(build(mode, tail_eps), columns, timestamp)


def reproduce(
    names: list[str],
    out_dir: Path,
    mode: EvolutionMode = EvolutionMode.full(),
    tail_eps: float = DEFAULT_TAIL_EPS,
    timestamp: bool = False,
) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in names:
        path = out_dir / f"{name}.csv"
        path.write_text(figure_csv(name, mode, tail_eps, timestamp))
        logger.info("Figure data %s written to %s", name, path)
        written.append(path)
    return written


def eigen_approx_csv() -> str:
    """Power-law fit against the exact central eigenvalues, k <= 10."""
    return format_csv(approximation_table(EIGEN_APPROX_N), EIGEN_APPROX_COLUMNS)
