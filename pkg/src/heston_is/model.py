"""Heston model data types, parameter validation and a reference single-path simulator.

The vectorised simulator used by the pricers lives in :mod:`heston_is.kernel`; the
scalar :func:`step` and :func:`simulate_path` here implement the same scheme one
path at a time and serve as its readable reference.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable

from .errors import ParameterError


class FellerWarning(UserWarning):
    """Emitted when 2*kappa*theta < sigma**2."""


def _require_finite(name, value):
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ParameterError(f"{name} must be a finite real number, got {value!r}", field=name)


@dataclass(frozen=True)
class HestonParams:
    """Heston parameters under the pricing measure (zero rates).

    ``sigma = 0`` is accepted as the deterministic-variance limit so that the
    simulator can be checked against Black-Scholes; :func:`validate` rejects it.
    """

    kappa: float
    theta: float
    sigma: float
    rho: float
    v0: float

    def __post_init__(self):
        for name in ("kappa", "theta", "sigma", "rho", "v0"):
            _require_finite(name, getattr(self, name))
        for name in ("kappa", "theta", "v0"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive", field=name)
        if self.sigma < 0:
            raise ParameterError("sigma must be non-negative", field="sigma")
        if not abs(self.rho) < 1:
            raise ParameterError("|rho| must be below 1", field="rho")

    @property
    def rho_bar(self) -> float:
        return math.sqrt((1.0 - self.rho) * (1.0 + self.rho))

    @property
    def feller_satisfied(self) -> bool:
        return 2.0 * self.kappa * self.theta >= self.sigma**2


@dataclass(frozen=True)
class MarketSpec:
    """Spot, strike and maturity. ``strike = 0`` is allowed and prices the forward."""

    s0: float
    strike: float
    maturity: float
    rate: float = field(default=0.0, init=False)

    def __post_init__(self):
        for name in ("s0", "strike", "maturity"):
            _require_finite(name, getattr(self, name))
        if self.s0 <= 0:
            raise ParameterError("s0 must be positive", field="s0")
        if self.strike < 0:
            raise ParameterError("strike must be non-negative", field="strike")
        if self.maturity <= 0:
            raise ParameterError("maturity must be positive", field="maturity")

    @property
    def moneyness(self) -> float:
        return self.strike / self.s0

    @property
    def log_moneyness(self) -> float:
        if self.strike == 0:
            return -math.inf
        return math.log(self.strike / self.s0)

    @property
    def epsilon(self) -> float | None:
        """1/ln(K/S0) when K > S0, otherwise ``None``."""
        k = self.log_moneyness
        return 1.0 / k if k > 0 else None


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        """All hard checks pass; the Feller check is advisory."""
        return all(c.passed for c in self.checks if c.name != "feller")

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate(params: HestonParams, market: MarketSpec | None = None) -> ValidationReport:
    """Check parameter invariants; raise :class:`ParameterError` naming the first bad field.

    A failed Feller condition is reported as a warning (and emitted as
    :class:`FellerWarning`), never as an error.
    """
    if params.sigma <= 0:
        raise ParameterError("sigma must be positive", field="sigma")
    checks = [
        Check("kappa>0", params.kappa > 0),
        Check("theta>0", params.theta > 0),
        Check("sigma>0", params.sigma > 0),
        Check("v0>0", params.v0 > 0),
        Check("|rho|<1", abs(params.rho) < 1),
        Check(
            "rho_bar",
            abs(params.rho_bar**2 + params.rho**2 - 1.0) < 1e-15,
            f"rho_bar={params.rho_bar!r}",
        ),
    ]
    feller = params.feller_satisfied
    lhs, rhs = 2 * params.kappa * params.theta, params.sigma**2
    checks.append(Check("feller", feller, f"2*kappa*theta={lhs:.6g}, sigma^2={rhs:.6g}"))
    notes = []
    if not feller:
        msg = f"Feller condition fails: 2*kappa*theta={lhs:.6g} < sigma^2={rhs:.6g}"
        notes.append(msg)
        warnings.warn(msg, FellerWarning, stacklevel=2)
    if market is not None:
        checks.append(Check("s0>0", market.s0 > 0))
        checks.append(Check("strike>=0", market.strike >= 0))
        checks.append(Check("maturity>0", market.maturity > 0))
        if market.strike == 0:
            notes.append("strike is zero: the payoff is the forward S_T")
    return ValidationReport(tuple(checks), tuple(notes))


class Scheme(enum.Enum):
    EULER = "euler"
    MILSTEIN = "milstein"

    @classmethod
    def parse(cls, text: "str | Scheme") -> "Scheme":
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise ParameterError(f"unknown scheme {text!r}; use euler or milstein", field="scheme") from None


@dataclass(frozen=True)
class SimGrid:
    n_steps: int
    maturity: float

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ParameterError("n_steps must be a positive integer", field="n_steps")

    @property
    def dt(self) -> float:
        return self.maturity / self.n_steps


def default_n_steps(maturity: float) -> int:
    """256 steps up to one month, 512 beyond."""
    return 256 if maturity <= 21 / 252 + 1e-12 else 512


@dataclass(frozen=True)
class PathState:
    x: float
    v: float
    t: float = 0.0


@dataclass(frozen=True)
class PathAccumulators:
    int_v_dt: float
    int_sqrtv_dw2: float
    x_T: float


def step(
    state: PathState,
    dt: float,
    dw1: float,
    dw2: float,
    params: HestonParams,
    hbar: float = 0.0,
    scheme: Scheme = Scheme.MILSTEIN,
) -> PathState:
    """Advance one step. ``dw1``/``dw2`` are Brownian increments (variance ``dt``).

    ``hbar = 0`` gives the original dynamics; otherwise the log-price drift is
    ``(-1/2 - hbar) v``.
    """
    vp = state.v if state.v > 0.0 else 0.0
    sv = math.sqrt(vp)
    x = state.x + (-0.5 - hbar) * vp * dt + sv * (params.rho * dw1 + params.rho_bar * dw2)
    v = state.v + params.kappa * (params.theta - vp) * dt + params.sigma * sv * dw1
    if scheme is Scheme.MILSTEIN:
        v += 0.25 * params.sigma * params.sigma * (dw1 * dw1 - dt)
    return PathState(x, v if v > 0.0 else 0.0, state.t + dt)


def simulate_path(
    params: HestonParams,
    market: MarketSpec,
    grid: SimGrid,
    noise: Iterable[float],
    hbar: float = 0.0,
    scheme: Scheme = Scheme.MILSTEIN,
) -> tuple[PathState, PathAccumulators]:
    """Simulate one path from ``2*n_steps`` standard normals (dW1 then dW2 per step)."""
    it = iter(noise)
    dt = grid.dt
    sq = math.sqrt(dt)
    state = PathState(math.log(market.s0), params.v0, 0.0)
    int_v = 0.0
    int_sw = 0.0
    for _ in range(grid.n_steps):
        try:
            z1 = next(it)
            z2 = next(it)
        except StopIteration:
            raise ParameterError("noise stream shorter than 2*n_steps", field="noise") from None
        dw1, dw2 = z1 * sq, z2 * sq
        vp = state.v if state.v > 0.0 else 0.0
        int_v += vp * dt
        int_sw += math.sqrt(vp) * dw2
        state = step(state, dt, dw1, dw2, params, hbar, scheme)
    return state, PathAccumulators(int_v, int_sw, state.x)
