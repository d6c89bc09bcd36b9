from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from src.utils.errors import ConfigError, UsageError

PROJECT_ROOT = Path(__file__).resolve().parent.parent
load_dotenv(PROJECT_ROOT / ".env")


def _env(name: str, default: str) -> str:
    return os.getenv(name, default).strip() or default


def _env_float(name: str, default: str) -> float:
    raw = _env(name, default)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"environment variable {name}={raw!r} is not a number") from None


def _env_int(name: str, default: str) -> int:
    raw = _env(name, default)
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"environment variable {name}={raw!r} is not an integer") from None


def resolve_threads(value: int | str) -> int:
    """'auto' -> cpu count; otherwise a positive integer."""
    if value == "auto":
        return os.cpu_count() or 1
    try:
        threads = int(value)
    except (TypeError, ValueError):
        raise UsageError(f"threads must be a positive integer or 'auto', got {value!r}") from None
    if threads < 1:
        raise UsageError(f"threads must be >= 1, got {threads}")
    return threads


@dataclass(frozen=True)
class Settings:
    threads: int | str = "auto"
    tail_eps: float = 1e-12
    n_cut: int = 9
    log_level: str = "INFO"
    log_file: Path | None = None

    @classmethod
    def load(cls) -> Settings:
        raw_threads = _env("NMSPDC_THREADS", "auto")
        if raw_threads != "auto":
            try:
                threads: int | str = resolve_threads(raw_threads)
            except UsageError as e:
                raise ConfigError(f"NMSPDC_THREADS: {e}") from None
        else:
            threads = "auto"

        tail_eps = _env_float("NMSPDC_TAIL_EPS", "1e-12")
        if not 0.0 < tail_eps < 1.0:
            raise ConfigError(f"NMSPDC_TAIL_EPS must lie in (0, 1), got {tail_eps}")

        n_cut = _env_int("NMSPDC_N_CUT", "9")
        if n_cut < 0:
            raise ConfigError(f"NMSPDC_N_CUT must be >= 0, got {n_cut}")

        log_file = os.getenv("NMSPDC_LOG_FILE", "").strip()
        return cls(
            threads=threads,
            tail_eps=tail_eps,
            n_cut=n_cut,
            log_level=_env("NMSPDC_LOG_LEVEL", "INFO").upper(),
            log_file=Path(log_file) if log_file else None,
        )
