"""Importance-sampling Monte Carlo for Heston out-of-the-money calls.

Submodules:

* ``model``: parameters, validation and the scalar path stepper
* ``measure``: tilted drift and likelihood ratio
* ``riccati`` and ``scgf``: finite-horizon cumulants and their limits
* ``rate``: Legendre transforms and the optimality bound
* ``estimator``: parallel BMC and IS pricers
* ``fourier``: semi-analytic reference prices
* ``config``, ``experiments``, ``report`` and ``cli``: the experiment runner
"""

from .errors import (
    ConvergenceError,
    DomainError,
    ExplosionError,
    HestonISError,
    ParameterError,
    SingularityError,
)
from .estimator import Estimate, SimConfig, VrrReport, bmc_price, is_price, vrr_report
from .fourier import black_scholes_call, reference_price
from .measure import ISDrift, hbar_deep_otm, hbar_for_regime, hbar_short_maturity, log_weight
from .model import FellerWarning, HestonParams, MarketSpec, Scheme, SimGrid, simulate_path, step, validate
from .rate import legendre, minimize_g
from .scgf import ScgfFunction, ScgfKind

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "Estimate",
    "ExplosionError",
    "FellerWarning",
    "HestonISError",
    "HestonParams",
    "ISDrift",
    "MarketSpec",
    "ParameterError",
    "Scheme",
    "ScgfFunction",
    "ScgfKind",
    "SimConfig",
    "SimGrid",
    "SingularityError",
    "VrrReport",
    "black_scholes_call",
    "bmc_price",
    "hbar_deep_otm",
    "hbar_for_regime",
    "hbar_short_maturity",
    "is_price",
    "legendre",
    "log_weight",
    "minimize_g",
    "reference_price",
    "simulate_path",
    "step",
    "validate",
    "vrr_report",
]
