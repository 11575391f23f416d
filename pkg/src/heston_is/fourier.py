"""Semi-analytic Heston call prices from the characteristic function.

Uses the single-integral representation (Lewis) with zero rates,

    C = S0 - sqrt(S0 K)/pi * int_0^inf Re[exp(i u ln(S0/K)) phi(u - i/2)] / (u^2 + 1/4) du,

with phi the characteristic function of ln(S_T/S0) in the branch-stable form
(Albrecher et al.). The differences b - d and g are rewritten so that sigma -> 0
involves no cancellation, which makes the Black-Scholes limit exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from .errors import ConvergenceError
from .model import FellerWarning, HestonParams, MarketSpec


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    initial_bound: float | None = None
    max_doublings: int = 30
    quad_limit: int = 2000


def heston_cf(u, T: float, params: HestonParams):
    """E[exp(i u ln(S_T/S0))] for complex ``u`` (array or scalar)."""
    u = np.asarray(u, dtype=complex)
    kap, th, sig, rho, v0 = params.kappa, params.theta, params.sigma, params.rho, params.v0
    a = 1j * u + u * u
    b = kap - rho * sig * 1j * u
    d = np.sqrt(b * b + sig * sig * a)
    bpd = b + d
    b_minus_d_over_s2 = -a / bpd
    g_over_s2 = -a / (bpd * bpd)
    e = np.exp(-d * T)
    g = sig * sig * g_over_s2
    z_over_s2 = g_over_s2 * (1.0 - e) / (1.0 - g)
    z = sig * sig * z_over_s2
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(np.abs(z) > 1e-12, np.log1p(z) / np.where(z == 0, 1, z), 1.0 - 0.5 * z)
    big_c = kap * th * (b_minus_d_over_s2 * T - 2.0 * z_over_s2 * ratio)
    big_d = b_minus_d_over_s2 * (1.0 - e) / (1.0 - g * e)
    return np.exp(big_c + big_d * v0)


def black_scholes_call(s0: float, strike: float, maturity: float, vol: float) -> float:
    if strike <= 0:
        return s0
    sd = vol * math.sqrt(maturity)
    d1 = (math.log(s0 / strike) + 0.5 * sd * sd) / sd
    return float(s0 * ndtr(d1) - strike * ndtr(d1 - sd))


def reference_price(params: HestonParams, market: MarketSpec, spec: QuadratureSpec | None = None) -> float:
    """Call price by numerical Fourier inversion, truncation doubled until stable to rel_tol * S0."""
    spec = spec or QuadratureSpec()
    if not params.feller_satisfied:
        warnings.warn("Feller condition fails; reference price may be less accurate", FellerWarning, stacklevel=2)
    s0, K, T = market.s0, market.strike, market.maturity
    if K == 0:
        return s0
    kprime = math.log(s0 / K)

    def integrand(u):
        return float(np.real(np.exp(1j * u * kprime) * heston_cf(u - 0.5j, T, params))) / (u * u + 0.25)

    scale = min(params.v0, params.theta) * T
    bound = spec.initial_bound or math.sqrt(40.0 / scale)

    def price(upper):
        # Convergence is judged by the doubling loop below, so quad's roundoff notices are noise.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(integrand, 0.0, upper, limit=spec.quad_limit, epsabs=1e-13, epsrel=1e-10)
        return s0 - math.sqrt(s0 * K) / math.pi * val

    prev = price(bound)
    history = [(bound, prev)]
    for _ in range(spec.max_doublings):
        bound *= 2.0
        cur = price(bound)
        history.append((bound, cur))
        if abs(cur - prev) < spec.rel_tol * s0:
            lo, hi = max(s0 - K, 0.0), s0
            return min(max(cur, lo), hi)
        prev = cur
    raise ConvergenceError("Fourier truncation did not stabilise", diagnostics={"history": history})
