"""State-dependent change of measure: tilt parameter choices and the log likelihood ratio.

Under the tilted measure the second Brownian motion gains the drift
``-(hbar/rho_bar) sqrt(V)``, which turns the log-price drift into
``(-1/2 - hbar) V``. The first Brownian motion is left untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .model import MarketSpec


@dataclass(frozen=True)
class ISDrift:
    """Tilt specification; ``hbar = 0`` is the identity change of measure."""

    hbar: float

    def __post_init__(self):
        if not math.isfinite(self.hbar):
            raise ParameterError("hbar must be finite", field="hbar")

    def h1(self, v):
        return np.zeros_like(np.asarray(v, dtype=float))

    def h2(self, v, rho_bar: float):
        return -(self.hbar / rho_bar) * np.sqrt(np.maximum(np.asarray(v, dtype=float), 0.0))

    def log_price_drift(self, v):
        return (-0.5 - self.hbar) * np.asarray(v, dtype=float)


def hbar_short_maturity(market: MarketSpec, theta: float) -> float:
    """ln(S0/K) / (theta T): the tilt that centres the terminal log price on the strike."""
    if not theta > 0:
        raise ParameterError("theta must be positive", field="theta")
    if market.strike <= 0:
        raise ParameterError("the short-maturity tilt needs a positive strike", field="strike")
    return math.log(market.s0 / market.strike) / (theta * market.maturity)


def hbar_deep_otm(market: MarketSpec, theta: float) -> float:
    """-1/(eps theta T) with eps = 1/ln(K/S0); requires K > S0.

    Algebraically this equals :func:`hbar_short_maturity`; both entry points are
    kept so that callers state which regime they are in.
    """
    if not theta > 0:
        raise ParameterError("theta must be positive", field="theta")
    eps = market.epsilon
    if eps is None:
        raise ParameterError("deep OTM tilt needs strike > s0", field="strike")
    return -1.0 / (eps * theta * market.maturity)


def hbar_for_regime(regime: str, market: MarketSpec, theta: float) -> float:
    """Dispatch on ``'short'`` or ``'deep'``; at or below the money the deep tilt falls back to the short one."""
    if regime == "short":
        return hbar_short_maturity(market, theta)
    if regime == "deep":
        if market.strike <= market.s0:
            return hbar_short_maturity(market, theta)
        return hbar_deep_otm(market, theta)
    raise ParameterError(f"unknown regime {regime!r}", field="regime")


def log_weight(int_sqrtv_dw2, int_v_dt, hbar: float, rho_bar: float):
    """log dP/dPbar from the discrete path integrals, for scalars or arrays.

    Returns ``a * int_sqrtv_dw2 - a**2/2 * int_v_dt`` with ``a = hbar/rho_bar``.
    """
    a = hbar / rho_bar
    isw = np.asarray(int_sqrtv_dw2, dtype=float)
    iv = np.asarray(int_v_dt, dtype=float)
    if not (np.all(np.isfinite(isw)) and np.all(np.isfinite(iv))):
        raise ValueError("non-finite path accumulators")
    if hbar == 0.0:
        out = np.zeros(np.broadcast(isw, iv).shape)
    else:
        out = a * isw - 0.5 * a * a * iv
    return float(out) if out.ndim == 0 else out


def log_weight_acc(acc, hbar: float, rho_bar: float) -> float:
    """:func:`log_weight` applied to a :class:`~heston_is.model.PathAccumulators`."""
    return log_weight(acc.int_sqrtv_dw2, acc.int_v_dt, hbar, rho_bar)
