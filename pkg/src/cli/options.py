"""Per-invocation options parsed from the command line."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from config.settings import resolve_threads
from src.physics.evolution import EvolutionMode, tau_opt
from src.utils.errors import UsageError

FORMATS = ("csv", "json")


def parse_mode(text: str, default_n_cut: int = 9) -> EvolutionMode:
    """'full', 'central' or 'central:<n_cut>'."""
    kind, _, rest = text.strip().partition(":")
    if kind == "full" and not rest:
        return EvolutionMode.full()
    if kind == "central":
        try:
            n_cut = int(rest) if rest else default_n_cut
        except ValueError:
            raise UsageError(f"bad n_cut in mode {text!r}") from None
        if n_cut < 0:
            raise UsageError(f"n_cut must be >= 0, got {n_cut}")
        return EvolutionMode.central(n_cut)
    raise UsageError(f"mode must be 'full' or 'central[:n_cut]', got {text!r}")


def parse_tau(text: str) -> float | str:
    if text == "opt":
        return "opt"
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"tau must be a number or 'opt', got {text!r}") from None


def parse_m(text: str) -> int | str:
    if text == "all":
        return "all"
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"m must be an integer or 'all', got {text!r}") from None


@dataclass(frozen=True)
class RunConfig:
    """One validated CLI invocation."""

    beta: float
    tau: float | str = "opt"
    m: int | str = 0
    mode: EvolutionMode = EvolutionMode.full()
    tail_eps: float = 1e-12
    output: Path | None = None
    fmt: str = "csv"
    threads: int | str = "auto"

    def validate(self) -> RunConfig:
        if not math.isfinite(self.beta) or self.beta < 0:
            raise UsageError(f"beta must be finite and >= 0, got {self.beta}")
        if self.tau != "opt" and not (isinstance(self.tau, float) and math.isfinite(self.tau)):
            raise UsageError(f"tau must be a finite number or 'opt', got {self.tau!r}")
        if self.m != "all" and (not isinstance(self.m, int) or self.m < 0):
            raise UsageError(f"m must be a nonnegative integer or 'all', got {self.m!r}")
        if not 0.0 < self.tail_eps < 1.0:
            raise UsageError(f"tail_eps must lie in (0, 1), got {self.tail_eps}")
        if self.fmt not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}, got {self.fmt!r}")
        resolve_threads(self.threads)
        return self

    @property
    def resolved_tau(self) -> float:
        return tau_opt(self.beta) if self.tau == "opt" else float(self.tau)

    @property
    def resolved_threads(self) -> int:
        return resolve_threads(self.threads)
