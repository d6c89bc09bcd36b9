from __future__ import annotations

import argparse
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np

from config.settings import Settings
from src.cli.options import RunConfig, parse_m, parse_mode, parse_tau
from src.cli import figures, formatters
from src.cli.sweep import SWEEP_COLUMNS, build_grid, run_sweep
from src.physics import oracle
from src.physics.catfit import fit_squeezed_cat
from src.physics.evolution import EvolutionMode, decompose, evolve, initial_state, overlap_spectrum, tau_opt
from src.physics.measurement import parity_statistics, project_pump
from src.physics.nmcore import SubspaceSpec, approx_central_eigenvalue, relative_error
from src.physics.states import fix_global_phase, mean_photon, photon_variance
from src.utils.errors import (
    ConfigError,
    DomainError,
    NMSpdcError,
    NumericError,
    UsageError,
)

logger = logging.getLogger("nm-spdc")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

ORACLE_MAX_N = 12


def exit_code_for(exc: NMSpdcError) -> int:
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    if isinstance(exc, (UsageError, ConfigError, DomainError)):
        return EXIT_USAGE
    return EXIT_NUMERIC


# --- Argument parsing helpers ---


def _int_list(text: str) -> list[int]:
    """'0-10' or '0,2,4'."""
    out: list[int] = []
    try:
        for part in filter(None, (p.strip() for p in text.split(","))):
            if "-" in part:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None
    return out


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None


def _run_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    return RunConfig(
        beta=float(getattr(args, "beta", 0.0)),
        tau=parse_tau(getattr(args, "tau", "opt")),
        m=parse_m(str(getattr(args, "m", 0))),
        mode=parse_mode(args.mode, settings.n_cut),
        tail_eps=args.tail_eps if args.tail_eps is not None else settings.tail_eps,
        output=args.output,
        fmt=args.format,
        threads=args.threads if args.threads is not None else settings.threads,
    ).validate()


def _emit(rows: list[dict[str, Any]], columns: tuple[str, ...], args: argparse.Namespace) -> None:
    text = formatters.format_rows(rows, columns, args.format, args.timestamp)
    formatters.write_output(text, args.output)


# --- Commands ---


EIGVALS_COLUMNS = ("N", "j", "lambda", "approx_lambda", "rel_err")


def _approx_for(N: int, j: int) -> float | None:
    """Fit value for full-spectrum index j, mirrored for negative eigenvalues."""
    dim = SubspaceSpec(N).dim
    start = dim // 2
    if j >= start:
        k, sign = j - start, 1.0
    else:
        k, sign = (dim - 1 - j) - start, -1.0
    try:
        return sign * approx_central_eigenvalue(N, k)
    except DomainError:
        return None


def cmd_eigvals(args: argparse.Namespace, settings: Settings) -> None:
    spec = SubspaceSpec(args.N)
    if args.central is None:
        mode = EvolutionMode.full()
    else:
        mode = EvolutionMode.central(args.central)
    dec = decompose(spec.N, mode)
    rows = []
    for j, lam in zip(dec.indices, dec.eigenvalues):
        approx = _approx_for(spec.N, int(j))
        rows.append(
            {
                "N": spec.N,
                "j": int(j),
                "lambda": float(lam),
                "approx_lambda": approx,
                "rel_err": relative_error(approx, float(lam)) if approx is not None else None,
            }
        )
    _emit(rows, EIGVALS_COLUMNS, args)


def cmd_overlap(args: argparse.Namespace, settings: Settings) -> None:
    mode = parse_mode(args.mode, settings.n_cut)
    rows = [
        {"n": args.n, "j": p.index, "lambda": p.eigenvalue, "weight": p.weight}
        for p in overlap_spectrum(args.n, mode)
    ]
    _emit(rows, ("n", "j", "lambda", "weight"), args)


def cmd_evolve(args: argparse.Namespace, settings: Settings) -> None:
    config = _run_config(args, settings)
    state = evolve(
        initial_state(config.beta, config.tail_eps),
        config.resolved_tau,
        config.mode,
        workers=config.resolved_threads,
    )
    rows = [
        {"N": N, "k": k, "re": float(x.real), "im": float(x.imag)}
        for N, a in state.blocks.items()
        for k, x in enumerate(a)
    ]
    _emit(rows, ("N", "k", "re", "im"), args)


def cmd_measure(args: argparse.Namespace, settings: Settings) -> None:
    config = _run_config(args, settings)
    state = evolve(
        initial_state(config.beta, config.tail_eps), config.resolved_tau, config.mode, workers=config.resolved_threads
    )

    if args.parity or config.m == "all":
        stats = parity_statistics(state)
        logger.info("P(even)=%.12f P(odd)=%.12f", stats.p_even, stats.p_odd)
        rows = [
            {"m": m, "probability": float(p), "parity": "even" if m % 2 == 0 else "odd"}
            for m, p in enumerate(stats.per_m)
        ]
        _emit(rows, ("m", "probability", "parity"), args)
        return

    outcome = project_pump(state, config.m)
    signal = fix_global_phase(outcome.signal).amplitudes if outcome.defined else np.zeros(0)
    if args.format == "csv":
        rows = [{"m": config.m, **row} for row in formatters.signal_rows(signal)]
        _emit(rows, ("m", "n", "re", "im"), args)
        return
    payload = {
        "m": outcome.m,
        "beta": config.beta,
        "tau": config.resolved_tau,
        "probability": outcome.probability,
        "defined": outcome.defined,
        "signal": formatters.signal_rows(signal),
    }
    formatters.write_output(formatters.format_json(payload), args.output)


FIT_COLUMNS = (
    "beta", "tau", "m", "probability", "fidelity", "beta_fit", "r_fit", "phase",
    "iterations", "mean_photon", "variance",
)


def cmd_fit(args: argparse.Namespace, settings: Settings) -> None:
    config = _run_config(args, settings)
    if config.m == "all":
        raise UsageError("fit needs a single m; use sweep for several")
    tau = config.resolved_tau
    state = evolve(initial_state(config.beta, config.tail_eps), tau, config.mode)
    outcome = project_pump(state, config.m)
    row: dict[str, Any] = {"beta": config.beta, "tau": tau, "m": config.m, "probability": outcome.probability}
    if outcome.defined:
        fit = fit_squeezed_cat(outcome.signal)
        row.update(
            fidelity=fit.fidelity,
            beta_fit=fit.params.beta,
            r_fit=fit.params.r,
            phase=fit.phase,
            iterations=fit.iterations,
            mean_photon=mean_photon(outcome.signal),
            variance=photon_variance(outcome.signal),
        )
    else:
        logger.warning("Outcome m=%d has zero probability; fit skipped", config.m)
    _emit([row], FIT_COLUMNS, args)


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> None:
    config = _run_config(args, settings)
    betas = _float_list(args.betas)
    ms = _int_list(args.ms)
    for beta in betas:
        if not math.isfinite(beta) or beta < 0:
            raise UsageError(f"beta must be finite and >= 0, got {beta}")
    if any(m < 0 for m in ms):
        raise UsageError("m values must be >= 0")
    cells = build_grid(betas, ms, config.tau, config.mode, config.tail_eps)
    rows = run_sweep(cells, config.resolved_threads)
    _emit(rows, SWEEP_COLUMNS, args)


def cmd_reproduce(args: argparse.Namespace, settings: Settings) -> None:
    mode = parse_mode(args.mode, settings.n_cut)
    tail_eps = args.tail_eps if args.tail_eps is not None else settings.tail_eps
    names = list(figures.FIGURES) if args.figure == "all" else [args.figure]
    figures.reproduce(names, args.output_dir, mode, tail_eps, args.timestamp)


def cmd_oracle(args: argparse.Namespace, settings: Settings) -> None:
    tau = parse_tau(args.tau)
    tau = tau_opt(args.beta) if tau == "opt" else tau
    tail_eps = args.tail_eps if args.tail_eps is not None else settings.tail_eps
    nm_start = initial_state(args.beta, tail_eps).restricted(args.max_N)
    dense = oracle.dense_evolve(oracle.from_nm_state(nm_start), tau)
    nm = parity_statistics(evolve(nm_start, tau)).per_m
    marginal = oracle.pump_marginal(dense)
    rows = []
    for m in range(max(nm.size, marginal.size)):
        p_nm = float(nm[m]) if m < nm.size else 0.0
        p_dense = float(marginal[m]) if m < marginal.size else 0.0
        rows.append({"m": m, "nm_probability": p_nm, "dense_probability": p_dense, "abs_diff": abs(p_nm - p_dense)})
    _emit(rows, ("m", "nm_probability", "dense_probability", "abs_diff"), args)


# --- Registration ---


def _common_parser(settings: Settings) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", type=Path, default=None, help="Write to this file instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="Output format (default: csv)")
    common.add_argument("--timestamp", action="store_true", help="Prefix CSV output with a timestamp comment")
    common.add_argument("--mode", default="full", help="'full' or 'central[:n_cut]' (default: full)")
    common.add_argument("--tail-eps", type=float, default=None, help=f"Truncation budget (default: {settings.tail_eps})")
    common.add_argument("--threads", default=None, help="Worker count or 'auto' (env NMSPDC_THREADS)")
    return common


def register_commands(parser: argparse.ArgumentParser, settings: Settings) -> None:
    """Attach all subcommands to the top-level parser."""
    common = _common_parser(settings)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("eigvals", parents=[common], help="Eigenvalues of one fixed-energy block")
    p.add_argument("--N", type=int, required=True, help="Total energy (even)")
    p.add_argument("--central", type=int, default=None, metavar="N_CUT", help="Only the eigenpairs nearest zero")
    p.set_defaults(handler=cmd_eigvals)

    p = sub.add_parser("overlap", parents=[common], help="Overlap of |0>_s|n>_p with the block eigenstates")
    p.add_argument("--n", type=int, required=True, help="Pump photon number")
    p.set_defaults(handler=cmd_overlap)

    for name, handler, text in (
        ("evolve", cmd_evolve, "Evolve |0>_s|beta>_p and print the block amplitudes"),
        ("measure", cmd_measure, "Project the pump on m photons"),
        ("fit", cmd_fit, "Fit the collapsed signal to a squeezed even cat"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--beta", type=float, required=True, help="Pump coherent amplitude")
        p.add_argument("--tau", default="opt", help="Dimensionless time or 'opt' (default: opt)")
        if name != "evolve":
            p.add_argument("--m", default="0", help="Measured pump photon number (default: 0)")
        if name == "measure":
            p.add_argument("--parity", action="store_true", help="Per-m probabilities instead of one outcome")
        p.set_defaults(handler=handler)

    p = sub.add_parser("sweep", parents=[common], help="Grid of (beta, m) fits on a worker pool")
    p.add_argument("--betas", required=True, help="Comma-separated amplitudes, e.g. 5,8")
    p.add_argument("--ms", default="0", help="Pump photon numbers, e.g. 0-10 or 0,2,4")
    p.add_argument("--tau", default="opt", help="Dimensionless time or 'opt' (default: opt)")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("reproduce", parents=[common], help="Write the CSV data behind a figure")
    p.add_argument("--figure", choices=(*figures.FIGURES, "all"), required=True)
    p.add_argument("--output-dir", type=Path, default=Path("figures"), help="Directory for figN.csv files")
    p.set_defaults(handler=cmd_reproduce)

    # No help= so it stays out of the command listing.
    p = sub.add_parser("oracle", parents=[common])
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--tau", default="opt")
    p.add_argument("--max-N", type=int, default=ORACLE_MAX_N)
    p.set_defaults(handler=cmd_oracle)
