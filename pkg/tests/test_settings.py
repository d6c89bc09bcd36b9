import pytest

from config.settings import Settings, resolve_threads
from src.utils.errors import ConfigError, UsageError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("NMSPDC_THREADS", "NMSPDC_TAIL_EPS", "NMSPDC_N_CUT", "NMSPDC_LOG_LEVEL", "NMSPDC_LOG_FILE"):
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    settings = Settings.load()
    assert settings.threads == "auto"
    assert settings.tail_eps == 1e-12
    assert settings.n_cut == 9
    assert settings.log_file is None


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("NMSPDC_THREADS", "3")
    monkeypatch.setenv("NMSPDC_TAIL_EPS", "1e-10")
    monkeypatch.setenv("NMSPDC_LOG_LEVEL", "debug")
    monkeypatch.setenv("NMSPDC_LOG_FILE", str(tmp_path / "run.log"))
    settings = Settings.load()
    assert settings.threads == 3
    assert settings.tail_eps == 1e-10
    assert settings.log_level == "DEBUG"
    assert settings.log_file == tmp_path / "run.log"


@pytest.mark.parametrize(
    "name, value",
    [("NMSPDC_THREADS", "0"), ("NMSPDC_THREADS", "many"), ("NMSPDC_TAIL_EPS", "2"), ("NMSPDC_N_CUT", "-1")],
)
def test_invalid_environment(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigError):
        Settings.load()


def test_resolve_threads():
    assert resolve_threads("auto") >= 1
    assert resolve_threads("2") == 2
    with pytest.raises(UsageError):
        resolve_threads("-4")

