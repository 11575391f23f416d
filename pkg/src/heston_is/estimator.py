"""Brute-force and importance-sampling Monte Carlo pricers.

Paths are split into fixed-size chunks, each with its own counter-based random
stream, simulated concurrently and concatenated in chunk order. Results are
therefore identical for any number of worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .kernel import simulate_chunk
from .measure import log_weight
from .model import HestonParams, MarketSpec, Scheme, default_n_steps

DEFAULT_PATHS = 2**18
DEFAULT_CHUNK = 2**14
# Below this many exercised paths the BMC sample variance is not usable for a VRR.
MIN_BMC_HITS = 100


@dataclass(frozen=True)
class SimConfig:
    n_paths: int = DEFAULT_PATHS
    n_steps: int | None = None
    scheme: Scheme = Scheme.MILSTEIN
    seed: int = 20240101
    chunk_size: int = DEFAULT_CHUNK
    workers: int | None = None

    def __post_init__(self):
        if int(self.n_paths) != self.n_paths or self.n_paths < 2:
            raise ParameterError("n_paths must be an integer >= 2", field="n_paths")
        if self.n_steps is not None and (int(self.n_steps) != self.n_steps or self.n_steps < 1):
            raise ParameterError("n_steps must be a positive integer", field="n_steps")
        if int(self.chunk_size) != self.chunk_size or self.chunk_size < 1:
            raise ParameterError("chunk_size must be a positive integer", field="chunk_size")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must fit in 64 bits", field="seed")
        if self.workers is not None and self.workers < 1:
            raise ParameterError("workers must be positive", field="workers")
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))

    def steps_for(self, maturity: float) -> int:
        return self.n_steps if self.n_steps is not None else default_n_steps(maturity)

    def chunks(self):
        """(chunk index, paths in chunk) pairs; the last chunk may be short."""
        full, rest = divmod(self.n_paths, self.chunk_size)
        out = [(i, self.chunk_size) for i in range(full)]
        if rest:
            out.append((full, rest))
        return out


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    n_paths: int
    n_hits: int = 0

    @property
    def rel_error(self) -> float:
        return self.std_error / self.mean if self.mean > 0 else math.nan

    @classmethod
    def from_samples(cls, y: np.ndarray, n_hits: int | None = None) -> "Estimate":
        m = y.size
        mean = float(np.mean(y))
        se = float(np.std(y, ddof=1) / math.sqrt(m))
        return cls(mean, se, m, int(np.count_nonzero(y)) if n_hits is None else n_hits)


@dataclass(frozen=True)
class PathBatch:
    """Terminal log prices and path integrals for a full run, in chunk order."""

    x_T: np.ndarray
    int_v_dt: np.ndarray
    int_sqrtv_dw2: np.ndarray


def simulate(params: HestonParams, market: MarketSpec, sim: SimConfig, hbar: float = 0.0, stream: int = 0) -> PathBatch:
    """Simulate ``sim.n_paths`` paths under the measure tilted by ``hbar``."""
    n_steps = sim.steps_for(market.maturity)

    def run(chunk):
        idx, m = chunk
        return simulate_chunk(params, market.s0, market.maturity, n_steps, sim.scheme, hbar, sim.seed, stream, idx, m)

    chunks = sim.chunks()
    workers = sim.workers or min(len(chunks), os.cpu_count() or 1)
    if workers == 1:
        parts = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    return PathBatch(*(np.concatenate([p[i] for p in parts]) for i in range(3)))


def _payoff(x_T: np.ndarray, strike: float) -> np.ndarray:
    return np.maximum(np.exp(x_T) - strike, 0.0)


def bmc_price(params: HestonParams, market: MarketSpec, sim: SimConfig) -> Estimate:
    """Plain Monte Carlo estimate of E[(S_T - K)^+]."""
    batch = simulate(params, market, sim, 0.0)
    return Estimate.from_samples(_payoff(batch.x_T, market.strike))


@dataclass(frozen=True)
class ISResult:
    estimate: Estimate
    second_moment_p: float
    weight_mean: float
    weight_se: float

    @property
    def payoff_variance_p(self) -> float:
        """Var_P of the payoff, estimated from the tilted sample."""
        return max(self.second_moment_p - self.estimate.mean**2, 0.0)


def is_run(params: HestonParams, market: MarketSpec, sim: SimConfig, hbar: float) -> ISResult:
    """IS estimate together with by-products of the same sample."""
    batch = simulate(params, market, sim, hbar)
    y = _payoff(batch.x_T, market.strike)
    w = np.exp(log_weight(batch.int_sqrtv_dw2, batch.int_v_dt, hbar, params.rho_bar))
    z = y * w
    est = Estimate.from_samples(z, int(np.count_nonzero(y)))
    wm = float(np.mean(w))
    wse = float(np.std(w, ddof=1) / math.sqrt(w.size))
    return ISResult(est, float(np.mean(z * y)), wm, wse)


def is_price(params: HestonParams, market: MarketSpec, sim: SimConfig, hbar: float) -> Estimate:
    """Mean of (S_T - K)^+ exp(log_weight) over paths simulated under the tilted measure."""
    return is_run(params, market, sim, hbar).estimate


@dataclass(frozen=True)
class VrrReport:
    """``vrr_sample`` is (SE_bmc/SE_is)^2. ``vrr`` equals it unless BMC saw fewer than
    ``MIN_BMC_HITS`` exercised paths; then the BMC variance is estimated from the IS
    sample (``source = 'is_reweighted'``)."""

    bmc: Estimate
    is_est: Estimate
    hbar: float
    vrr_sample: float
    vrr_reweighted: float
    vrr: float
    source: str


def vrr_report(params: HestonParams, market: MarketSpec, sim: SimConfig, hbar: float) -> VrrReport:
    """BMC with ``sim.seed`` and IS with ``sim.seed + 1``, and their variance reduction ratio."""
    bmc = bmc_price(params, market, sim)
    is_sim = SimConfig(sim.n_paths, sim.n_steps, sim.scheme, (sim.seed + 1) % 2**64, sim.chunk_size, sim.workers)
    res = is_run(params, market, is_sim, hbar)
    ise = res.estimate
    if ise.std_error > 0:
        sample = (bmc.std_error / ise.std_error) ** 2
        reweighted = res.payoff_variance_p / bmc.n_paths / ise.std_error**2
    else:
        sample = reweighted = math.nan
    if bmc.n_hits >= MIN_BMC_HITS:
        vrr, source = sample, "sample"
    else:
        vrr, source = reweighted, "is_reweighted"
    return VrrReport(bmc, ise, hbar, sample, reweighted, vrr, source)
