"""Limiting scaled cumulant generating functions, their domains and the Term-I limits.

Four SCGFs appear in the analysis of the second moment of the IS estimator:

* ``SHORT_GAMMA1``   short maturity, pricing measure (closed form of Forde and Jacquier);
* ``SHORT_GAMMA_II`` short maturity, auxiliary measure, depends on k = ln(K/S0);
* ``DEEP_GAMMA1``    deep OTM, pricing measure, depends on T;
* ``DEEP_GAMMA_II``  deep OTM, auxiliary measure, depends on T.

Each kind is the value at the horizon of a limiting Riccati equation. The Gamma_II
kinds are evaluated with the exact solution of that equation; their domains are
located numerically as the first blow-up on either side of zero.

:func:`limit_oracle` evaluates the finite-horizon (or finite-eps) quantity whose
limit each closed form claims to be, by RK4 on the un-truncated coefficients.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import DomainError, ParameterError, SingularityError
from .model import HestonParams
from .riccati import (
    CgfKind,
    Discriminant,
    Regime,
    blowup_free,
    c_of_hbar,
    finite_T_cgf,
    riccati_closed_form,
)


class ScgfKind(enum.Enum):
    SHORT_GAMMA1 = "short_gamma1"
    SHORT_GAMMA_II = "short_gamma_ii"
    DEEP_GAMMA1 = "deep_gamma1"
    DEEP_GAMMA_II = "deep_gamma_ii"


@dataclass(frozen=True)
class ScgfDomain:
    """Open interval (p_minus, p_plus) containing 0."""

    p_minus: float
    p_plus: float

    def __post_init__(self):
        if not self.p_minus < 0 < self.p_plus:
            raise ValueError(f"domain must contain 0: ({self.p_minus}, {self.p_plus})")

    @property
    def width(self) -> float:
        return self.p_plus - self.p_minus

    def contains(self, p: float) -> bool:
        return self.p_minus < p < self.p_plus

    def require(self, p: float) -> None:
        if not self.contains(p):
            end = self.p_minus if p <= self.p_minus else self.p_plus
            raise DomainError(f"p={p!r} outside the open domain ({self.p_minus!r}, {self.p_plus!r})", endpoint=end)

    def interior_grid(self, n: int = 9, fraction: float = 0.8) -> np.ndarray:
        """``n`` equally spaced points covering the central ``fraction`` of the domain."""
        mid = 0.5 * (self.p_minus + self.p_plus)
        half = 0.5 * fraction * self.width
        return np.linspace(mid - half, mid + half, n)


# Pricing-measure SCGFs ------------------------------------------------------------


def _gamma1_value(p: float, params: HestonParams, T: float) -> float:
    x = 0.5 * params.sigma * params.rho_bar * T * p
    if x == 0.0:
        return 0.0
    den = params.sigma * (params.rho_bar * math.cos(x) - params.rho * math.sin(x))
    return params.v0 * p * math.sin(x) / den


def _tangent_domain(params: HestonParams, T: float = 1.0) -> ScgfDomain:
    rho, rb, sig = params.rho, params.rho_bar, params.sigma
    scale = 2.0 / (sig * rb * T)
    if rho < 0:
        a = math.atan(rb / rho)
        return ScgfDomain(scale * a, scale * (math.pi + a))
    if rho > 0:
        a = math.atan(rb / rho)
        return ScgfDomain(scale * (a - math.pi), scale * a)
    return ScgfDomain(-math.pi / (sig * T), math.pi / (sig * T))


def domain_gamma1_short(params: HestonParams) -> ScgfDomain:
    return _tangent_domain(params, 1.0)


def gamma1_short(p: float, params: HestonParams) -> float:
    """v0 p / (sigma (-rho + rho_bar cot(sigma rho_bar p / 2)))."""
    domain_gamma1_short(params).require(p)
    return _gamma1_value(p, params, 1.0)


def domain_gamma1_deep(params: HestonParams, T: float) -> ScgfDomain:
    return _tangent_domain(params, T)


def gamma1_deep(p: float, params: HestonParams, T: float) -> float:
    """v0 p / (-rho sigma + rho_bar sigma cot(p rho_bar sigma T / 2))."""
    domain_gamma1_deep(params, T).require(p)
    return _gamma1_value(p, params, T)


# Auxiliary-measure SCGFs ----------------------------------------------------------


@dataclass(frozen=True)
class _LimitRiccati:
    """Limiting Riccati c0(p) = a p^2 + b p, c1(p) = -rho sigma p, c2 = sigma^2/2 on [0, tau]."""

    a: float
    b: float
    params: HestonParams
    tau: float

    def coefficients(self, p):
        return self.a * p * p + self.b * p, -self.params.rho * self.params.sigma * p, 0.5 * self.params.sigma**2

    def discriminant(self, p: float) -> Discriminant:
        c0, c1, c2 = self.coefficients(p)
        return Discriminant.classify(c1 * c1 - 4.0 * c0 * c2)

    def finite(self, p: float) -> bool:
        return blowup_free(*self.coefficients(p), self.tau)

    def value(self, p: float) -> float:
        return self.params.v0 * riccati_closed_form(*self.coefficients(p), self.tau)

    def _pi_point(self, sign: int) -> float:
        # Where omega * tau = pi: past it the solution has certainly blown up.
        sig2 = self.params.sigma**2
        qa = sig2 * self.params.rho**2 - 2.0 * sig2 * self.a
        qb = -2.0 * sig2 * self.b
        qc = (2.0 * math.pi / self.tau) ** 2
        if qa >= 0:
            raise ParameterError("auxiliary SCGF discriminant does not turn negative on this side", field="rho")
        disc = qb * qb - 4.0 * qa * qc
        roots = sorted(((-qb - math.sqrt(disc)) / (2 * qa), (-qb + math.sqrt(disc)) / (2 * qa)))
        return roots[1] if sign > 0 else roots[0]

    def endpoint(self, sign: int, n_scan: int = 4000) -> float:
        p_far = self._pi_point(sign)
        grid = np.linspace(0.0, p_far, n_scan + 1)
        lo = 0.0
        hi = p_far
        for p in grid[1:]:
            if not self.finite(float(p)):
                hi = float(p)
                break
            lo = float(p)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if self.finite(mid):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    @cached_property
    def domain(self) -> ScgfDomain:
        return ScgfDomain(self.endpoint(-1), self.endpoint(+1))


@lru_cache(maxsize=256)
def _short_ii(params: HestonParams, k: float) -> _LimitRiccati:
    if not 2.0 * params.rho**2 < 1.0:
        raise ParameterError("short-maturity auxiliary SCGF needs 2 rho^2 < 1", field="rho")
    if not math.isfinite(k):
        raise ParameterError("k must be finite", field="k")
    rb2 = params.rho_bar**2
    return _LimitRiccati(0.5 * rb2, -k / params.theta, params, 1.0)


@lru_cache(maxsize=256)
def _deep_ii(params: HestonParams, T: float) -> _LimitRiccati:
    if not T > 0:
        raise ParameterError("T must be positive", field="T")
    return _LimitRiccati(0.5, -1.0 / (params.theta * T), params, T)


def discriminant_gammaII_short(p: float, params: HestonParams, k: float) -> Discriminant:
    """sigma^2 (p^2 (2 rho^2 - 1) + 2 p k / theta)."""
    return _short_ii(params, k).discriminant(p)


def root_gammaII_short(params: HestonParams, k: float) -> float:
    """Non-zero root 2k / (theta (1 - 2 rho^2)) of the discriminant."""
    _short_ii(params, k)
    return 2.0 * k / (params.theta * (1.0 - 2.0 * params.rho**2))


def domain_gammaII_short(params: HestonParams, k: float) -> ScgfDomain:
    return _short_ii(params, k).domain


def gammaII_short(p: float, params: HestonParams, k: float) -> float:
    """Short-maturity auxiliary SCGF (tanh, linear or tan regime by the discriminant sign)."""
    lim = _short_ii(params, k)
    lim.domain.require(p)
    return lim.value(p)


def discriminant_gammaII_deep(p: float, params: HestonParams, T: float) -> Discriminant:
    """sigma^2 (-p^2 rho_bar^2 + 2 p / (theta T))."""
    return _deep_ii(params, T).discriminant(p)


def root_gammaII_deep(params: HestonParams, T: float) -> float:
    return 2.0 / (params.theta * T * params.rho_bar**2)


def domain_gammaII_deep(params: HestonParams, T: float) -> ScgfDomain:
    return _deep_ii(params, T).domain


def gammaII_deep(p: float, params: HestonParams, T: float) -> float:
    """Deep-OTM auxiliary SCGF on horizon T."""
    lim = _deep_ii(params, T)
    lim.domain.require(p)
    return lim.value(p)


# Term-I limits --------------------------------------------------------------------


def q_singular_short(params: HestonParams, k: float) -> float:
    """q at which sigma k sqrt(2q) / (2 theta rho_bar) reaches pi/2."""
    return 0.5 * (math.pi * params.theta * params.rho_bar / (params.sigma * abs(k))) ** 2


def q_singular_deep(params: HestonParams) -> float:
    """q at which sigma sqrt(2q) / (2 theta rho_bar) reaches pi/2."""
    return 0.5 * (math.pi * params.theta * params.rho_bar / params.sigma) ** 2


def _tan_checked(arg: float) -> float:
    if not 0 <= arg < 0.5 * math.pi:
        raise SingularityError(f"tangent argument {arg!r} not in [0, pi/2)", endpoint=0.5 * math.pi)
    return math.tan(arg)


def term1_limit_short(q: float, params: HestonParams, k: float) -> float:
    """(1/q) v0 k sqrt(2q)/(sigma theta rho_bar) tan(sigma k sqrt(2q)/(2 theta rho_bar))."""
    if not q > 0:
        raise DomainError("q must be positive", endpoint=0.0)
    s, th, rb = params.sigma, params.theta, params.rho_bar
    r = math.sqrt(2.0 * q)
    return params.v0 * k * r / (q * s * th * rb) * _tan_checked(s * k * r / (2.0 * th * rb))


def term1_limit_deep(q: float, params: HestonParams, T: float) -> float:
    """(1/q) v0 sqrt(2q)/(sigma theta rho_bar T) tan(sigma sqrt(2q)/(2 theta rho_bar))."""
    if not q > 0:
        raise DomainError("q must be positive", endpoint=0.0)
    s, th, rb = params.sigma, params.theta, params.rho_bar
    r = math.sqrt(2.0 * q)
    return params.v0 * r / (q * s * th * rb * T) * _tan_checked(s * r / (2.0 * th * rb))


# Callable wrapper -----------------------------------------------------------------


@dataclass(frozen=True)
class ScgfFunction:
    """An SCGF bound to its parameters: ``context`` is k (SHORT_GAMMA_II) or T (deep kinds)."""

    kind: ScgfKind
    params: HestonParams
    context: float | None = None

    def __post_init__(self):
        if self.kind is not ScgfKind.SHORT_GAMMA1 and self.context is None:
            raise ParameterError(f"{self.kind.value} needs a context value", field="context")

    @cached_property
    def domain(self) -> ScgfDomain:
        if self.kind is ScgfKind.SHORT_GAMMA1:
            return domain_gamma1_short(self.params)
        if self.kind is ScgfKind.SHORT_GAMMA_II:
            return domain_gammaII_short(self.params, self.context)
        if self.kind is ScgfKind.DEEP_GAMMA1:
            return domain_gamma1_deep(self.params, self.context)
        return domain_gammaII_deep(self.params, self.context)

    def __call__(self, p: float) -> float:
        p = float(p)
        self.domain.require(p)
        if self.kind is ScgfKind.SHORT_GAMMA1:
            return _gamma1_value(p, self.params, 1.0)
        if self.kind is ScgfKind.DEEP_GAMMA1:
            return _gamma1_value(p, self.params, self.context)
        if self.kind is ScgfKind.SHORT_GAMMA_II:
            return _short_ii(self.params, self.context).value(p)
        return _deep_ii(self.params, self.context).value(p)


# Finite-horizon oracles -----------------------------------------------------------


def limit_oracle(kind: ScgfKind, p: float, params: HestonParams, context, scale: float, n_steps: int = 10_000) -> float:
    """The pre-limit quantity whose limit is the SCGF, at T = scale (short) or eps = scale (deep).

    SHORT_GAMMA1    T log E[exp((p/T)(X_T - X_0))]
    SHORT_GAMMA_II  T log E^{Ptilde}[exp((p/T)(X_T - X_0))] with hbar = -k/(theta T)
    DEEP_GAMMA1     eps^2 log E[exp((p/eps^2)(X^e_T - X^e_0))]
    DEEP_GAMMA_II   eps^2 log E^{Ptilde^e}[exp((p/eps^2)(X^e_T - X^e_0))] with hbar = -1/(eps theta T)
    """
    if kind is ScgfKind.SHORT_GAMMA1:
        T = scale
        return T * finite_T_cgf(p / T, T, params, 0.0, CgfKind.PRICE, n_steps=n_steps)
    if kind is ScgfKind.SHORT_GAMMA_II:
        T = scale
        hbar = -context / (params.theta * T)
        return T * finite_T_cgf(p / T, T, params, hbar, CgfKind.AUX_PRICE, n_steps=n_steps)
    eps = scale
    T = context
    if kind is ScgfKind.DEEP_GAMMA1:
        return eps**2 * finite_T_cgf(p / eps**2, T, params, 0.0, CgfKind.DEEP_PRICE, eps, n_steps)
    hbar = -1.0 / (eps * params.theta * T)
    return eps**2 * finite_T_cgf(p / eps**2, T, params, hbar, CgfKind.DEEP_AUX_PRICE, eps, n_steps)


def term1_oracle_short(q: float, params: HestonParams, k: float, T: float, n_steps: int = 10_000) -> float:
    """(T/q) log E^{Ptilde}[exp(q C(hbar) int V dt)] with hbar = -k/(theta T)."""
    hbar = -k / (params.theta * T)
    u = q * c_of_hbar(hbar, params.rho_bar)
    return T / q * finite_T_cgf(u, T, params, hbar, CgfKind.AUX_VARIANCE, n_steps=n_steps)


def term1_oracle_deep(q: float, params: HestonParams, T: float, eps: float, n_steps: int = 10_000) -> float:
    """(eps^2/q) log E^{Ptilde^e}[exp(q C(hbar) int V^e dt / eps)] with hbar = -1/(eps theta T)."""
    hbar = -1.0 / (eps * params.theta * T)
    u = q * c_of_hbar(hbar, params.rho_bar) / eps
    return eps**2 / q * finite_T_cgf(u, T, params, hbar, CgfKind.DEEP_AUX_VARIANCE, eps, n_steps)


__all__ = [
    "Regime",
    "ScgfDomain",
    "ScgfFunction",
    "ScgfKind",
    "discriminant_gammaII_deep",
    "discriminant_gammaII_short",
    "domain_gamma1_deep",
    "domain_gamma1_short",
    "domain_gammaII_deep",
    "domain_gammaII_short",
    "gamma1_deep",
    "gamma1_short",
    "gammaII_deep",
    "gammaII_short",
    "limit_oracle",
    "q_singular_deep",
    "q_singular_short",
    "root_gammaII_deep",
    "root_gammaII_short",
    "term1_limit_deep",
    "term1_limit_short",
    "term1_oracle_deep",
    "term1_oracle_short",
]
