import math

import numpy as np
import pytest
from scipy import integrate

from heston_is.errors import ParameterError
from heston_is.estimator import (
    MIN_BMC_HITS,
    Estimate,
    SimConfig,
    bmc_price,
    is_price,
    simulate,
    vrr_report,
)
from heston_is.fourier import QuadratureSpec, black_scholes_call, heston_cf, reference_price
from heston_is.measure import hbar_for_regime
from heston_is.model import HestonParams, MarketSpec, Scheme

SHORT = MarketSpec(2000.0, 2200.0, 1 / 252)


def gil_pelaez(params, market):
    """Independent oracle: C = S0 P1 - K P2 with the two-probability inversion."""
    k = math.log(market.strike / market.s0)

    def p_j(j):
        def f(u):
            if j == 1:
                val = heston_cf(u - 1j, market.maturity, params)
            else:
                val = heston_cf(u, market.maturity, params)
            return (np.exp(-1j * u * k) * val / (1j * u)).real

        return 0.5 + integrate.quad(f, 1e-12, 2000.0, limit=4000)[0] / math.pi

    return market.s0 * p_j(1) - market.strike * p_j(2)


class TestSimConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(n_paths=1), dict(n_paths=2.5), dict(n_steps=0), dict(chunk_size=0), dict(seed=-1), dict(seed=2**64), dict(workers=0)],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ParameterError):
            SimConfig(**kwargs)

    def test_chunks(self):
        assert SimConfig(10, chunk_size=4).chunks() == [(0, 4), (1, 4), (2, 2)]
        assert SimConfig(8, chunk_size=4).chunks() == [(0, 4), (1, 4)]

    def test_scheme_parse(self):
        assert SimConfig(scheme="EULER").scheme is Scheme.EULER
        with pytest.raises(ParameterError):
            SimConfig(scheme="rk4")


def test_estimate_from_samples():
    e = Estimate.from_samples(np.array([0.0, 0.0, 2.0, 4.0]))
    assert e.mean == 1.5 and e.n_hits == 2 and e.n_paths == 4
    assert e.std_error == pytest.approx(np.std([0, 0, 2, 4], ddof=1) / 2)
    assert math.isnan(Estimate(0.0, 0.0, 4).rel_error)


class TestDeterminism:
    def test_worker_count_irrelevant(self, high_vol):
        runs = [simulate(high_vol, SHORT, SimConfig(5000, n_steps=16, chunk_size=700, workers=w, seed=3)) for w in (1, 2, 5)]
        for r in runs[1:]:
            for a, b in zip((runs[0].x_T, runs[0].int_v_dt, runs[0].int_sqrtv_dw2), (r.x_T, r.int_v_dt, r.int_sqrtv_dw2)):
                assert np.array_equal(a, b)

    def test_seed_changes_output(self, high_vol):
        a = bmc_price(high_vol, SHORT, SimConfig(2000, n_steps=8, seed=1))
        b = bmc_price(high_vol, SHORT, SimConfig(2000, n_steps=8, seed=2))
        assert a != b

    def test_zero_tilt_is_bmc(self, high_vol):
        sim = SimConfig(20_000, n_steps=32, seed=8)
        assert is_price(high_vol, SHORT, sim, 0.0) == bmc_price(high_vol, SHORT, sim)


class TestPricers:
    def test_zero_strike(self, high_vol):
        m = MarketSpec(2000.0, 0.0, 21 / 252)
        e = bmc_price(high_vol, m, SimConfig(100_000, seed=12))
        assert abs(e.mean - 2000.0) < 4 * e.std_error
        assert reference_price(high_vol, m) == 2000.0

    def test_black_scholes_limit(self):
        p = HestonParams(3.0, 0.09, 0.0, -0.4, 0.09)
        m = MarketSpec(100.0, 110.0, 0.5)
        bs = black_scholes_call(100.0, 110.0, 0.5, 0.3)
        e = bmc_price(p, m, SimConfig(100_000, n_steps=64, seed=5))
        assert abs(e.mean - bs) < 3 * e.std_error

    @pytest.mark.parametrize("K", [80.0, 100.0, 125.0])
    def test_reference_black_scholes_limit(self, K):
        m = MarketSpec(100.0, K, 0.5)
        bs = black_scholes_call(100.0, K, 0.5, 0.3)
        errs = [abs(reference_price(HestonParams(3.0, 0.09, s, -0.4, 0.09), m) - bs) / bs for s in (1e-2, 1e-4, 1e-6)]
        assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-6
        assert reference_price(HestonParams(3.0, 0.09, 0.0, -0.4, 0.09), m) == pytest.approx(bs, rel=1e-10)

    @pytest.mark.parametrize("K, T", [(2200.0, 1 / 252), (2200.0, 21 / 252), (2600.0, 1.0), (1500.0, 0.5)])
    def test_reference_against_gil_pelaez(self, high_vol, K, T):
        m = MarketSpec(2000.0, K, T)
        assert reference_price(high_vol, m) == pytest.approx(gil_pelaez(high_vol, m), rel=1e-6, abs=1e-7)

    def test_reference_bounds(self, deep_otm):
        for K in (1000.0, 2000.0, 4000.0, 1e6):
            m = MarketSpec(2000.0, K, 1.0)
            c = reference_price(deep_otm, m)
            assert max(2000.0 - K, 0.0) <= c <= 2000.0

    def test_reference_custom_bound(self, high_vol):
        a = reference_price(high_vol, SHORT)
        b = reference_price(high_vol, SHORT, QuadratureSpec(initial_bound=50.0))
        assert a == pytest.approx(b, abs=1e-6)

    @pytest.mark.slow
    def test_short_maturity_three_pricers(self, high_vol):
        sim = SimConfig(2**18, seed=21)
        ref = reference_price(high_vol, SHORT)
        bmc = bmc_price(high_vol, SHORT, sim)
        ise = is_price(high_vol, SHORT, sim, hbar_for_regime("short", SHORT, high_vol.theta))
        assert abs(bmc.mean - ref) < 3 * bmc.std_error
        assert abs(ise.mean - ref) < 3 * ise.std_error
        assert ise.std_error < bmc.std_error / 5

    @pytest.mark.slow
    @pytest.mark.parametrize("T", [21 / 252, 1.0])
    def test_is_bmc_pairing_on_grid(self, deep_otm, T):
        sim = SimConfig(2**15, seed=40)
        for m in (1.0, 1.2, 1.5, 2.0):
            market = MarketSpec(2000.0, 2000.0 * m, T)
            hbar = hbar_for_regime("short", market, deep_otm.theta)
            rep = vrr_report(deep_otm, market, sim, hbar)
            ref = reference_price(deep_otm, market)
            if rep.bmc.n_hits >= MIN_BMC_HITS:
                assert abs(rep.bmc.mean - rep.is_est.mean) < 3 * math.hypot(rep.bmc.std_error, rep.is_est.std_error)
            assert abs(rep.is_est.mean - ref) < 3 * rep.is_est.std_error + 1e-9
            assert rep.vrr >= 0.8


class TestVrr:
    @pytest.mark.slow
    def test_identity_tilt(self, high_vol):
        rep = vrr_report(high_vol, SHORT, SimConfig(2**18, seed=9), 0.0)
        assert 0.8 <= rep.vrr <= 1.25
        assert rep.source == "sample"

    def test_reweighted_when_bmc_blind(self, deep_otm):
        m = MarketSpec(2000.0, 3000.0, 1 / 252)
        rep = vrr_report(deep_otm, m, SimConfig(4096, n_steps=32, seed=2), hbar_for_regime("short", m, 0.5))
        assert rep.bmc.n_hits == 0 and rep.vrr_sample == 0.0
        assert rep.source == "is_reweighted" and rep.vrr == rep.vrr_reweighted > 100
