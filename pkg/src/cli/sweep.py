"""Parameter sweeps over (beta, m) cells on a worker pool.

Results come back in grid order whatever order the workers finish in.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import product
from multiprocessing import Pool
from typing import Any, Sequence

from src.physics.catfit import fit_squeezed_cat
from src.physics.evolution import EvolutionMode, evolve, initial_state, tau_opt
from src.physics.measurement import project_pump
from src.physics.states import DEFAULT_TAIL_EPS
from src.utils.errors import NMSpdcError

logger = logging.getLogger("nm-spdc")

SWEEP_COLUMNS = ("beta", "m", "tau", "probability", "fidelity", "beta_fit", "r_fit", "error")


@dataclass(frozen=True)
class SweepCell:
    beta: float
    m: int
    tau: float | str = "opt"
    mode: EvolutionMode = EvolutionMode.full()
    tail_eps: float = DEFAULT_TAIL_EPS


def build_grid(
    betas: Sequence[float],
    ms: Sequence[int],
    tau: float | str = "opt",
    mode: EvolutionMode = EvolutionMode.full(),
    tail_eps: float = DEFAULT_TAIL_EPS,
) -> list[SweepCell]:
    return [SweepCell(beta, m, tau, mode, tail_eps) for beta, m in product(betas, ms)]


def run_cell(cell: SweepCell) -> dict[str, Any]:
    row: dict[str, Any] = {
        "beta": cell.beta,
        "m": cell.m,
        "tau": math.nan,
        "probability": math.nan,
        "fidelity": math.nan,
        "beta_fit": math.nan,
        "r_fit": math.nan,
        "error": "",
    }
    try:
        tau = tau_opt(cell.beta) if cell.tau == "opt" else float(cell.tau)
        row["tau"] = tau
        state = evolve(initial_state(cell.beta, cell.tail_eps), tau, cell.mode)
        outcome = project_pump(state, cell.m)
        row["probability"] = outcome.probability
        if not outcome.defined:
            row["error"] = "zero_probability"
            return row
        fit = fit_squeezed_cat(outcome.signal)
        row.update(fidelity=fit.fidelity, beta_fit=fit.params.beta, r_fit=fit.params.r)
    except NMSpdcError as e:
        logger.error("Sweep cell beta=%s m=%s failed: %s", cell.beta, cell.m, e)
        row["error"] = f"{type(e).__name__}: {e}"
    except Exception as e:
        # numpy/scipy failures stay inside the cell too
        logger.exception("Sweep cell beta=%s m=%s crashed", cell.beta, cell.m)
        row["error"] = f"{type(e).__name__}: {e}"
    return row


def run_sweep(cells: Sequence[SweepCell], threads: int = 1) -> list[dict[str, Any]]:
    if not cells:
        return []
    workers = min(threads, len(cells))
    logger.info("Sweeping %d cells on %d worker(s)", len(cells), workers)
    if workers <= 1:
        return [run_cell(cell) for cell in cells]
    with Pool(workers) as pool:
        return pool.map(run_cell, cells)
