import math

import numpy as np
import pytest

from src.physics.catfit import (
    FIDELITY_LAW,
    PARAM_TOL,
    R_CAT,
    FitGrid,
    fidelity_law,
    fidelity_with_cat,
    fit_squeezed_cat,
    per_m_characterization,
)
from src.physics.evolution import tau_opt
from src.physics.measurement import collapsed_signal
from src.physics.states import (
    SqueezedCatParams,
    coherent_amplitudes,
    phase_rotate,
    squeezed_cat_amplitudes,
)
from src.utils.errors import DomainError, PreconditionError


@pytest.mark.parametrize("beta, r, phase", [(3.0, -0.2, 0.3), (4.0, 0.1, -0.5), (2.5, -0.6, 0.0)])
def test_fit_recovers_known_cat(beta, r, phase):
    signal = phase_rotate(squeezed_cat_amplitudes(SqueezedCatParams(beta, r)), phase)
    result = fit_squeezed_cat(signal)
    assert result.fidelity == pytest.approx(1.0, abs=1e-8)
    assert result.params.beta == pytest.approx(beta, abs=1e-3)
    assert result.params.r == pytest.approx(r, abs=1e-3)
    assert result.phase == pytest.approx(phase, abs=1e-3)


def test_fit_rejects_odd_parity():
    with pytest.raises(PreconditionError):
        fit_squeezed_cat(coherent_amplitudes(2.0))


def test_fit_grid_validation():
    with pytest.raises(DomainError):
        FitGrid(n_r=1)


def test_infidelity_against_fixed_cat_at_beta10():
    (row,) = fidelity_law([10.0], with_fit=True)
    assert row["tau"] == pytest.approx(tau_opt(10.0))
    # Recorded gap: the fixed r = -ln sqrt 2 cat sits well above 7e-3 / beta^2,
    # the best-fit cat well below it.
    assert row["one_minus_F"] == pytest.approx(9.10e-4, rel=0.01)
    assert row["one_minus_F"] > 2 * FIDELITY_LAW / 100.0
    assert row["one_minus_F_fit"] < 5e-5
    assert row["beta_fit"] == pytest.approx(10.18, abs=0.05)
    assert row["r_fit"] == pytest.approx(-0.326, abs=0.01)


def test_infidelity_decays_with_beta():
    values = [row["one_minus_F"] for row in fidelity_law([8.0, 10.0, 12.0])]
    assert values == sorted(values, reverse=True)


@pytest.mark.slow
def test_infidelity_at_large_beta():
    rows = fidelity_law([16.0, 20.0])
    assert rows[0]["one_minus_F"] == pytest.approx(2.45e-4, rel=0.02)
    assert rows[1]["one_minus_F"] == pytest.approx(1.18e-4, rel=0.02)
    assert rows[1]["one_minus_F"] < rows[0]["one_minus_F"]


@pytest.mark.slow
def test_fidelity_above_997_at_beta30():
    (row,) = fidelity_law([30.0])
    assert 1.0 - row["one_minus_F"] > 0.997


@pytest.mark.slow
def test_fitted_squeezing_converges_at_beta20():
    outcome = collapsed_signal(20.0, tau_opt(20.0), 0)
    result = fit_squeezed_cat(outcome.signal)
    assert result.params.r == pytest.approx(R_CAT, abs=0.02)


@pytest.mark.slow
def test_per_m_characterization_trends():
    rows = per_m_characterization(8.0, 4)
    assert [row["m"] for row in rows] == [0, 1, 2, 3, 4]
    even = [row for row in rows if row["m"] % 2 == 0]
    assert even[0]["probability"] > even[1]["probability"] > even[2]["probability"]
    assert even[0]["fidelity"] > 0.9
    for row in rows:
        assert row["flag"] == ""
        assert not math.isnan(row["fidelity"])


@pytest.fixture(scope="module")
def signal_beta6():
    return collapsed_signal(6.0, tau_opt(6.0), 0).signal


@pytest.fixture(scope="module")
def fit_beta6(signal_beta6):
    return fit_squeezed_cat(signal_beta6)


def test_fit_is_a_local_optimum(signal_beta6, fit_beta6):
    rng = np.random.default_rng(7)
    best = fit_beta6.params
    for _ in range(20):
        d_beta, d_r, d_phi = rng.uniform(-1.0, 1.0, 3) * 10 * PARAM_TOL
        nearby = fidelity_with_cat(
            signal_beta6, SqueezedCatParams(best.beta + d_beta, best.r + d_r), fit_beta6.phase + d_phi
        )
        assert nearby <= fit_beta6.fidelity + 1e-9


def test_fit_follows_a_phase_rotation(signal_beta6, fit_beta6):
    rotated = fit_squeezed_cat(phase_rotate(signal_beta6, 0.4))
    assert rotated.fidelity == pytest.approx(fit_beta6.fidelity, abs=1e-9)
    shift = (rotated.phase - fit_beta6.phase - 0.4 + math.pi / 2) % math.pi - math.pi / 2
    assert shift == pytest.approx(0.0, abs=1e-4)
    assert rotated.params.beta == pytest.approx(fit_beta6.params.beta, abs=1e-4)


@pytest.mark.parametrize("grid", [FitGrid(5, 361), FitGrid(9, 1441)])
def test_fit_does_not_depend_on_grid_density(signal_beta6, fit_beta6, grid):
    other = fit_squeezed_cat(signal_beta6, grid)
    assert other.fidelity == pytest.approx(fit_beta6.fidelity, abs=1e-9)
    assert other.params.beta == pytest.approx(fit_beta6.params.beta, abs=1e-4)
    assert other.params.r == pytest.approx(fit_beta6.params.r, abs=1e-4)
