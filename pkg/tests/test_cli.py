import csv
import io
import json
import math

import pytest

from config.settings import Settings
from src.cli.formatters import format_csv, format_value
from src.cli.handlers import EXIT_NUMERIC, EXIT_USAGE, exit_code_for
from src.cli.sweep import SWEEP_COLUMNS, build_grid, run_sweep
from src.main import build_parser, main
from src.utils.errors import DivergenceError, DomainError, TruncationError, UsageError


def _rows(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(None) == ""
    assert format_value(math.nan) == "nan"
    assert format_value(3) == "3"


def test_empty_csv_has_header():
    assert format_csv([], ("a", "b")) == "a,b\n"


def test_eigvals_command(capsys):
    assert main(["eigvals", "--N", "4"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert [float(r["lambda"]) for r in rows] == pytest.approx([-4.0, 0.0, 4.0], abs=1e-12)
    assert [r["j"] for r in rows] == ["0", "1", "2"]
    assert rows[1]["approx_lambda"] == "0"


def test_eigvals_is_deterministic(capsys):
    main(["eigvals", "--N", "40", "--central", "3"])
    first = capsys.readouterr().out
    main(["eigvals", "--N", "40", "--central", "3"])
    assert capsys.readouterr().out == first
    assert len(_rows(first)) == 7


def test_measure_json(capsys):
    assert main(["measure", "--beta", "1", "--tau", "0", "--m", "0", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["probability"] == pytest.approx(math.exp(-1.0))
    assert payload["defined"] is True
    assert payload["signal"] == [{"n": 0, "re": 1.0, "im": 0.0}]


def test_measure_parity_rows(capsys):
    assert main(["measure", "--beta", "2", "--parity"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert sum(float(r["probability"]) for r in rows) == pytest.approx(1.0, abs=1e-10)
    assert rows[1]["parity"] == "odd"


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out" / "overlap.csv"
    assert main(["overlap", "--n", "5", "--output", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert len(_rows(target.read_text())) == 6


@pytest.mark.parametrize(
    "argv",
    [
        ["eigvals", "--N", "5"],
        ["measure", "--beta", "-1"],
        ["fit", "--beta", "2", "--tau", "soon"],
        ["evolve", "--beta", "1", "--mode", "partial"],
        ["evolve", "--beta", "1", "--threads", "0"],
        ["bogus"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_exit_code_mapping():
    assert exit_code_for(TruncationError("short", 1e-3)) == EXIT_NUMERIC
    assert exit_code_for(DivergenceError("blew up")) == EXIT_NUMERIC
    assert exit_code_for(DomainError("odd N")) == EXIT_USAGE
    assert exit_code_for(UsageError("bad flag")) == EXIT_USAGE


def test_oracle_command_is_hidden():
    assert "oracle" not in build_parser(Settings()).format_help()


def test_oracle_command_agrees(capsys):
    assert main(["oracle", "--beta", "0.5", "--tau", "0.3"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert max(float(r["abs_diff"]) for r in rows) <= 1e-10


def test_sweep_empty_grid(capsys):
    assert main(["sweep", "--betas", "2", "--ms", ""]) == 0
    assert capsys.readouterr().out == ",".join(SWEEP_COLUMNS) + "\n"


def test_sweep_thread_independence():
    cells = build_grid([2.0, 3.0], [0])
    serial = run_sweep(cells, threads=1)
    pooled = run_sweep(cells, threads=2)
    assert format_csv(serial, SWEEP_COLUMNS) == format_csv(pooled, SWEEP_COLUMNS)
    assert [(r["beta"], r["m"]) for r in serial] == [(2.0, 0), (3.0, 0)]


def test_sweep_records_zero_probability():
    (row,) = run_sweep(build_grid([0.0], [2]))
    assert row["error"] == "zero_probability"
    assert row["probability"] == 0.0


def test_sweep_keeps_going_after_unexpected_failure(monkeypatch):
    import src.cli.sweep as sweep

    calls = []

    def broken_fit(signal):
        calls.append(signal)
        raise FloatingPointError("overflow in fit")

    monkeypatch.setattr(sweep, "fit_squeezed_cat", broken_fit)
    rows = run_sweep(build_grid([2.0, 3.0], [0]), threads=1)
    assert len(calls) == 2
    assert [r["error"] for r in rows] == ["FloatingPointError: overflow in fit"] * 2
    assert all(r["probability"] > 0 for r in rows)


def test_reproduce_is_byte_identical(tmp_path):
    for run in ("a", "b"):
        assert main(["reproduce", "--figure", "fig1", "--output-dir", str(tmp_path / run)]) == 0
    first = (tmp_path / "a" / "fig1.csv").read_bytes()
    assert first == (tmp_path / "b" / "fig1.csv").read_bytes()
    rows = _rows(first.decode())
    assert {r["n"] for r in rows} == {"100", "101"}


def test_fit_command(capsys):
    assert main(["fit", "--beta", "4", "--m", "0"]) == 0
    first = capsys.readouterr().out
    (row,) = _rows(first)
    assert float(row["fidelity"]) > 0.98
    assert float(row["mean_photon"]) > 0
    assert main(["fit", "--beta", "4", "--m", "0"]) == 0
    assert capsys.readouterr().out == first


def test_fit_rejects_all_outcomes(capsys):
    assert main(["fit", "--beta", "4", "--m", "all"]) == EXIT_USAGE
