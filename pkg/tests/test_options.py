import pytest

from src.cli.options import RunConfig, parse_m, parse_mode, parse_tau
from src.physics.evolution import EvolutionMode, tau_opt
from src.utils.errors import UsageError


def test_parse_mode():
    assert parse_mode("full") == EvolutionMode.full()
    assert parse_mode("central:5") == EvolutionMode.central(5)
    assert parse_mode("central", default_n_cut=4) == EvolutionMode.central(4)
    for bad in ("partial", "central:x", "full:3"):
        with pytest.raises(UsageError):
            parse_mode(bad)


def test_parse_tau_and_m():
    assert parse_tau("opt") == "opt"
    assert parse_tau("0.25") == 0.25
    assert parse_m("all") == "all"
    assert parse_m("3") == 3
    with pytest.raises(UsageError):
        parse_m("three")


def test_run_config_resolution():
    config = RunConfig(beta=10.0, threads=2).validate()
    assert config.resolved_tau == pytest.approx(tau_opt(10.0))
    assert config.resolved_threads == 2


@pytest.mark.parametrize(
    "kwargs",
    [{"beta": -1.0}, {"beta": float("inf")}, {"beta": 1.0, "m": -2}, {"beta": 1.0, "tail_eps": 0.0}, {"beta": 1.0, "fmt": "xml"}],
)
def test_run_config_rejects(kwargs):
    with pytest.raises(UsageError):
        RunConfig(**kwargs).validate()


def test_config_layer_is_a_leaf():
    import config.settings as settings

    assert "EvolutionMode" not in vars(settings)
    assert "tau_opt" not in vars(settings)
