"""Experiment runners behind the command-line subcommands.

Defaults when the configuration leaves a field unset:

==================  =====================  ===============================================
experiment          model                  market
==================  =====================  ===============================================
table1              high-vol set           K = 2200, T in {1/252, 21/252}
vrr-sweep           deep-OTM set           K/S0 in {1.0, ..., 2.0}, T in {1/252, 21/252, 1}
scgf-check          per regime             short: k = ln(K/S0) with K = 2200; deep: T = 1
optimality-report   per regime             as scgf-check
price               high-vol set           K = 2200, T = 1/252
==================  =====================  ===============================================

High-vol set: kappa=60, theta=0.36, sigma=3, rho=-0.1, v0=0.36.
Deep-OTM set: kappa=15, theta=0.5, sigma=1, rho=-0.1, v0=0.5. S0 = 2000 throughout.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .config import DEEP_OTM, DEFAULT_MONEYNESS, HIGH_VOL, ExperimentConfig
from .errors import ExplosionError
from .estimator import SimConfig, vrr_report
from .fourier import reference_price
from .measure import hbar_for_regime
from .model import FellerWarning, MarketSpec, validate
from .rate import g_deep, g_short, minimize_g
from .report import PlotSpec, Table
from .scgf import ScgfFunction, ScgfKind, limit_oracle

DEFAULT_STRIKE = 2200.0

TABLE1_HEADER = ("maturity", "method", "price", "std_error", "rel_error", "reference", "vrr", "vrr_source")
SWEEP_HEADER = (
    "maturity", "strike", "moneyness", "bmc_se", "is_se", "vrr", "bmc_price", "is_price",
    "hbar", "bmc_hits", "vrr_sample", "vrr_reweighted", "vrr_source",
)
SCGF_HEADER = ("kind", "context", "scale", "p", "closed_form", "oracle", "abs_diff", "series")
OPTIMALITY_HEADER = (
    "regime", "context", "lambda1", "lambda_ii", "q_star", "g_at_qstar", "minus_two_lambda1",
    "relative_gap", "gap_over_5pct", "interior", "q_singular",
)
PRICE_HEADER = ("s0", "strike", "maturity", "hbar", "bmc_price", "bmc_se", "is_price", "is_se", "vrr", "reference")


def sim_config(cfg: ExperimentConfig) -> SimConfig:
    return SimConfig(cfg.paths, cfg.steps, cfg.scheme, cfg.seed, cfg.chunk_size, cfg.workers)


def _checked(params, market=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FellerWarning)
        validate(params, market)
    return params


def _reference(params, market):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FellerWarning)
        return reference_price(params, market)


def _regimes(cfg: ExperimentConfig) -> tuple[str, ...]:
    regime = cfg.regime or "both"
    return ("short", "deep") if regime == "both" else (regime,)


def run_table1(cfg: ExperimentConfig) -> Table:
    params = _checked(cfg.params or HIGH_VOL)
    strike = cfg.strike if cfg.strike is not None else DEFAULT_STRIKE
    maturities = cfg.maturities or (1 / 252, 21 / 252)
    regime = cfg.regime or "short"
    sim = sim_config(cfg)
    table = Table(
        TABLE1_HEADER,
        plot=PlotSpec("maturity", "price", group="method", yerr="std_error", logx=True,
                      title="BMC and IS prices (2 SE bars)", ylabel="call price"),
    )
    for T in maturities:
        market = MarketSpec(cfg.s0, strike, T)
        _checked(params, market)
        rep = vrr_report(params, market, sim, hbar_for_regime(regime, market, params.theta))
        ref = _reference(params, market)
        for name, est in (("BMC", rep.bmc), ("IS", rep.is_est)):
            table.add(T, name, est.mean, est.std_error, est.rel_error, ref, None, None)
        table.add(T, "VRR", None, None, None, ref, rep.vrr, rep.source)
    return table


def sweep_hbar(regime: str, market: MarketSpec, theta: float) -> float:
    """Tilt for a sweep point; at the money both regimes use the short-maturity rule."""
    if market.strike <= market.s0:
        return hbar_for_regime("short", market, theta)
    return hbar_for_regime(regime, market, theta)


def run_vrr_sweep(cfg: ExperimentConfig) -> Table:
    params = _checked(cfg.params or DEEP_OTM)
    moneyness = cfg.moneyness or DEFAULT_MONEYNESS
    maturities = cfg.maturities or (1 / 252, 21 / 252, 1.0)
    regime = cfg.regime or "short"
    sim = sim_config(cfg)
    table = Table(
        SWEEP_HEADER,
        plot=PlotSpec("moneyness", "vrr", group="maturity", logy=True,
                      title="Variance reduction ratio against moneyness", xlabel="K/S0", ylabel="VRR"),
    )
    for T in maturities:
        for m in moneyness:
            market = MarketSpec(cfg.s0, cfg.s0 * m, T)
            hbar = sweep_hbar(regime, market, params.theta)
            rep = vrr_report(params, market, sim, hbar)
            table.add(
                T, market.strike, m, rep.bmc.std_error, rep.is_est.std_error, rep.vrr,
                rep.bmc.mean, rep.is_est.mean, hbar, rep.bmc.n_hits,
                rep.vrr_sample, rep.vrr_reweighted, rep.source,
            )
    return table


def _scgf_targets(cfg: ExperimentConfig):
    out = []
    for regime in _regimes(cfg):
        if regime == "short":
            params = _checked(cfg.params or HIGH_VOL)
            strike = cfg.strike if cfg.strike is not None else DEFAULT_STRIKE
            k = math.log(strike / cfg.s0)
            out.append((regime, params, k))
        else:
            params = _checked(cfg.params or DEEP_OTM)
            out.append((regime, params, cfg.maturity if cfg.maturity is not None else 1.0))
    return out


def run_scgf_check(cfg: ExperimentConfig) -> Table:
    table = Table(
        SCGF_HEADER,
        plot=PlotSpec("p", "abs_diff", group="series", logy=True,
                      title="Closed-form SCGF against the Riccati oracle", ylabel="|closed - oracle|"),
    )
    for regime, params, ctx in _scgf_targets(cfg):
        if regime == "short":
            kinds = ((ScgfKind.SHORT_GAMMA1, None), (ScgfKind.SHORT_GAMMA_II, ctx))
        else:
            kinds = ((ScgfKind.DEEP_GAMMA1, ctx), (ScgfKind.DEEP_GAMMA_II, ctx))
        for kind, context in kinds:
            f = ScgfFunction(kind, params, context)
            grid = f.domain.interior_grid(cfg.scgf_points, cfg.scgf_fraction)
            for scale in cfg.scgf_scales:
                for p in grid:
                    p = float(p)
                    closed = f(p)
                    try:
                        oracle = limit_oracle(kind, p, params, context, scale)
                    except ExplosionError:
                        oracle = math.nan
                    table.add(kind.value, context, scale, p, closed, oracle, abs(closed - oracle),
                              f"{kind.value}@{scale:g}")
    return table


def run_optimality_report(cfg: ExperimentConfig) -> Table:
    table = Table(OPTIMALITY_HEADER)
    curve = Table(("regime", "q", "g"))
    hlines = []
    for regime, params, ctx in _scgf_targets(cfg):
        rep = minimize_g(regime, params, ctx)
        table.add(
            regime, ctx, rep.lambda1, rep.lambda_ii, rep.q_star, rep.g_at_qstar, rep.minus_two_lambda1,
            rep.relative_gap, rep.gap_flagged, rep.interior, rep.q_singular,
        )
        g = g_short if regime == "short" else g_deep
        qs = np.linspace(1.0, 1.0 + 0.95 * (rep.q_singular - 1.0), 201)[1:]
        for q in qs:
            curve.add(regime, float(q), g(float(q), params, ctx, rep.lambda_ii))
        hlines.append((f"-2 Lambda_1 ({regime})", rep.minus_two_lambda1))
    table.plot = PlotSpec("q", "g", group="regime", title="Hoelder bound G(q)", ylabel="G(q)", hlines=tuple(hlines))
    table.plot_data = curve
    return table


def run_price(cfg: ExperimentConfig) -> Table:
    params = _checked(cfg.params or HIGH_VOL)
    strike = cfg.strike if cfg.strike is not None else DEFAULT_STRIKE
    T = cfg.maturity if cfg.maturity is not None else 1 / 252
    market = MarketSpec(cfg.s0, strike, T)
    regime = cfg.regime or "short"
    hbar = 0.0 if strike == 0 else sweep_hbar(regime, market, params.theta)
    sim = sim_config(cfg)
    rep = vrr_report(params, market, sim, hbar)
    table = Table(PRICE_HEADER)
    table.add(cfg.s0, strike, T, hbar, rep.bmc.mean, rep.bmc.std_error, rep.is_est.mean,
              rep.is_est.std_error, rep.vrr, _reference(params, market))
    return table


RUNNERS = {
    "table1": run_table1,
    "vrr-sweep": run_vrr_sweep,
    "scgf-check": run_scgf_check,
    "optimality-report": run_optimality_report,
    "price": run_price,
}


def run(cfg: ExperimentConfig) -> Table:
    return RUNNERS[cfg.kind](cfg)


__all__ = ["RUNNERS", "run", "sim_config"]
