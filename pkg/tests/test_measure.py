import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heston_is.errors import ParameterError
from heston_is.estimator import SimConfig, simulate
from heston_is.measure import (
    ISDrift,
    hbar_deep_otm,
    hbar_for_regime,
    hbar_short_maturity,
    log_weight,
    log_weight_acc,
)
from heston_is.model import HestonParams, MarketSpec, SimGrid, simulate_path


def test_short_maturity_examples():
    assert hbar_short_maturity(MarketSpec(2000, 2200, 1 / 252), 0.36) == pytest.approx(
        math.log(2000 / 2200) * 252 / 0.36, rel=1e-14
    )
    assert hbar_short_maturity(MarketSpec(2000, 2200, 1 / 252), 0.36) == pytest.approx(-66.717, abs=5e-4)
    assert hbar_short_maturity(MarketSpec(2000, 2000, 1.0), 0.5) == 0.0
    assert hbar_short_maturity(MarketSpec(2000, 4000, 1.0), 0.5) == pytest.approx(-1.38629, abs=5e-6)


def test_deep_otm_examples():
    assert hbar_deep_otm(MarketSpec(2000, 4000, 1.0), 0.5) == pytest.approx(-math.log(2) / 0.5, rel=1e-14)
    assert hbar_deep_otm(MarketSpec(2000, 3000, 21 / 252), 0.5) == pytest.approx(-9.731163, abs=5e-7)
    assert -1e-6 < hbar_deep_otm(MarketSpec(2000, 2000 * (1 + 1e-9), 1.0), 0.5) < 0


def test_deep_otm_needs_otm_strike():
    with pytest.raises(ParameterError):
        hbar_deep_otm(MarketSpec(2000, 2000, 1.0), 0.5)


@given(st.floats(1.0001, 5.0), st.floats(1e-3, 2.0), st.floats(0.01, 1.0))
def test_regimes_coincide_and_tilt_upwards(m, T, theta):
    market = MarketSpec(2000.0, 2000.0 * m, T)
    hs = hbar_short_maturity(market, theta)
    hd = hbar_deep_otm(market, theta)
    assert hs == pytest.approx(hd, rel=1e-12)
    assert hs < 0 and hd < 0
    for v in (1e-6, 0.3, 2.0):
        assert ISDrift(hs).log_price_drift(v) > -0.5 * v


def test_regime_dispatch():
    atm = MarketSpec(2000, 2000, 1.0)
    assert hbar_for_regime("deep", atm, 0.5) == 0.0
    with pytest.raises(ParameterError):
        hbar_for_regime("medium", atm, 0.5)


def test_drift_components():
    d = ISDrift(-2.0)
    assert np.all(d.h1([0.1, 0.5]) == 0)
    assert d.h2(0.25, 0.5) == pytest.approx(2.0)
    # rho_bar * h2 * sqrt(v) reproduces the extra log-price drift
    v = 0.3
    assert 0.5 * d.h2(v, 0.5) * math.sqrt(v) == pytest.approx(d.log_price_drift(v) + 0.5 * v)


def test_zero_tilt_weight():
    assert log_weight(0.7, 0.2, 0.0, 0.9) == 0.0
    assert np.array_equal(log_weight(np.ones(3), np.ones(3), 0.0, 0.9), np.zeros(3))


def test_deterministic_variance_weight():
    p = HestonParams(5.0, 0.04, 0.0, -0.3, 0.04)
    T, hbar = 0.5, -3.0
    _, acc = simulate_path(p, MarketSpec(100, 110, T), SimGrid(50, T), [0.0] * 100, hbar)
    expected = -0.5 * (hbar / p.rho_bar) ** 2 * 0.04 * T
    assert log_weight_acc(acc, hbar, p.rho_bar) == pytest.approx(expected, rel=1e-13)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        log_weight(math.nan, 0.1, -1.0, 0.9)


@pytest.mark.parametrize("regime", ["short", "deep"])
@pytest.mark.parametrize("m, T", [(1.1, 1 / 252), (1.5, 1.0)])
def test_weight_mean_is_one(deep_otm, regime, m, T):
    market = MarketSpec(2000.0, 2000.0 * m, T)
    hbar = hbar_for_regime(regime, market, deep_otm.theta)
    b = simulate(deep_otm, market, SimConfig(100_000, seed=77), hbar)
    w = np.exp(log_weight(b.int_sqrtv_dw2, b.int_v_dt, hbar, deep_otm.rho_bar))
    se = np.std(w, ddof=1) / math.sqrt(w.size)
    assert abs(w.mean() - 1.0) <= 3 * se
