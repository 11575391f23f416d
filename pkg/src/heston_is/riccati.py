"""Scalar Riccati equations psi' = c0 - c1 psi + c2 psi^2, psi(0) = 0.

Three tools live here:

* :func:`riccati_psi_ode`, a fixed-step RK4 integrator used as an independent oracle;
* :func:`riccati_closed_form`, the exact solution through the linearisation
  psi = -u'/(c2 u), with blow-up detection;
* :func:`finite_T_cgf`, which assembles finite-horizon log moment generating
  functions of the Heston model under the measures used in the analysis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ExplosionError, ParameterError
from .model import HestonParams

BLOWUP = 1e12
LINEAR_TOL = 1e-12


class Regime(enum.Enum):
    EXPONENTIAL = "exponential"
    LINEAR = "linear"
    OSCILLATORY = "oscillatory"


@dataclass(frozen=True)
class Discriminant:
    """Sign class of c1^2 - 4 c0 c2 with a fixed tolerance band around zero."""

    value: float
    regime: Regime
    omega: float

    @classmethod
    def classify(cls, value: float, tol: float = LINEAR_TOL) -> "Discriminant":
        if abs(value) < tol:
            regime = Regime.LINEAR
        elif value > 0:
            regime = Regime.EXPONENTIAL
        else:
            regime = Regime.OSCILLATORY
        return cls(value, regime, 0.5 * math.sqrt(abs(value)))


@dataclass(frozen=True)
class RiccatiProblem:
    c0: float
    c1: float
    c2: float
    horizon: float

    def __post_init__(self):
        if not self.c2 >= 0:
            raise ParameterError("c2 must be non-negative", field="c2")
        if not self.horizon > 0:
            raise ParameterError("horizon must be positive", field="horizon")

    @property
    def discriminant(self) -> Discriminant:
        return Discriminant.classify(self.c1 * self.c1 - 4.0 * self.c0 * self.c2)


def _rk4(problem: RiccatiProblem, n_steps: int, want_integral: bool):
    c0, c1, c2 = problem.c0, problem.c1, problem.c2
    h = problem.horizon / n_steps

    def f(y):
        return c0 - c1 * y + c2 * y * y

    psi = 0.0
    integral = 0.0
    for i in range(n_steps):
        k1 = f(psi)
        k2 = f(psi + 0.5 * h * k1)
        k3 = f(psi + 0.5 * h * k2)
        k4 = f(psi + h * k3)
        if want_integral:
            # Simpson weights on the RK4 stages integrate psi to the same order.
            integral += h * (psi + 2.0 * (psi + 0.5 * h * k1) + 2.0 * (psi + 0.5 * h * k2) + (psi + h * k3)) / 6.0
        psi = psi + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        if not math.isfinite(psi) or abs(psi) > BLOWUP:
            raise ExplosionError(f"Riccati solution exceeded {BLOWUP:g} at t={(i + 1) * h:.6g}", (i + 1) * h)
    return psi, integral


def riccati_psi_ode(problem: RiccatiProblem, n_steps: int = 10_000) -> float:
    """psi(horizon) by classical fixed-step RK4."""
    if n_steps < 100:
        raise ParameterError("n_steps must be at least 100", field="n_steps")
    return _rk4(problem, int(n_steps), False)[0]


def _shape_functions(disc: Discriminant, t: float):
    """(even, odd/t) parts of the linearised solution: cosh/sinhc, 1/1, cos/sinc."""
    if disc.regime is Regime.LINEAR:
        return 1.0, 1.0
    x = disc.omega * t
    if disc.regime is Regime.EXPONENTIAL:
        return math.cosh(x), (math.sinh(x) / x if x != 0 else 1.0)
    return math.cos(x), (math.sin(x) / x if x != 0 else 1.0)


def blowup_free(c0: float, c1: float, c2: float, tau: float) -> bool:
    """True when the solution stays finite on [0, tau]."""
    disc = Discriminant.classify(c1 * c1 - 4.0 * c0 * c2)
    if disc.regime is Regime.OSCILLATORY:
        w = disc.omega
        # u(t) is proportional to cos(w t - phi); its first zero is at (pi/2 + phi)/w.
        return w * tau < 0.5 * math.pi + math.atan(c1 / (2.0 * w))
    even, odd = _shape_functions(disc, tau)
    return even + 0.5 * c1 * tau * odd > 0.0


def riccati_closed_form(c0: float, c1: float, c2: float, tau: float) -> float:
    """Exact psi(tau) = c0 tau S / (C + c1 tau S / 2) in the regime set by the discriminant.

    ``S`` and ``C`` are sinh(x)/x, cosh(x) (exponential), 1, 1 (linear) or
    sin(x)/x, cos(x) (oscillatory), with x = omega tau.
    """
    if not blowup_free(c0, c1, c2, tau):
        raise ExplosionError("Riccati solution blows up before the horizon", tau)
    disc = Discriminant.classify(c1 * c1 - 4.0 * c0 * c2)
    even, odd = _shape_functions(disc, tau)
    return c0 * tau * odd / (even + 0.5 * c1 * tau * odd)


class CgfKind(enum.Enum):
    """Which expectation :func:`finite_T_cgf` evaluates.

    ``u`` is the exponent exactly as it multiplies the random quantity:

    PRICE              log E^{Pbar_hbar}[exp(u (X_T - X_0))], hbar = 0 is the pricing measure
    AUX_PRICE          log E^{Ptilde}[exp(u (X_T - X_0))], drift (3/2 + hbar) V, W2 variance rho_bar^2
    AUX_VARIANCE       log E^{Ptilde}[exp(u int_0^T V dt)]
    DEEP_PRICE         log E[exp(u (X^e_T - X^e_0))] for the eps-scaled model
    DEEP_AUX_PRICE     log E^{Ptilde^e}[exp(u (X^e_T - X^e_0))], drift hbar V^e
    DEEP_AUX_VARIANCE  log E^{Ptilde^e}[exp(u int_0^T V^e dt)]

    The auxiliary measure Ptilde shifts W1 by 2 rho sqrt(V), hence kappa - 2 rho sigma.
    The eps-scaled model has V^e_0 = eps v0, mean reversion kappa eps^2 and
    vol-of-vol sigma eps^1.5.
    """

    PRICE = "price"
    AUX_PRICE = "aux_price"
    AUX_VARIANCE = "aux_variance"
    DEEP_PRICE = "deep_price"
    DEEP_AUX_PRICE = "deep_aux_price"
    DEEP_AUX_VARIANCE = "deep_aux_variance"

    @property
    def deep(self) -> bool:
        return self.name.startswith("DEEP")


def _assemble(u, T, params: HestonParams, hbar, kind: CgfKind, epsilon):
    """Coefficients in the rescaled unknown b = s psi, plus (s, phi rate, initial variance)."""
    kap, th, sig, rho, rb = params.kappa, params.theta, params.sigma, params.rho, params.rho_bar
    if kind.deep:
        if epsilon is None or not epsilon > 0:
            raise ParameterError("deep kinds need epsilon > 0", field="epsilon")
        e = float(epsilon)
        s = e**3
        c2 = 0.5 * sig * sig * e**3
        phi_rate = kap * th * e**3
        v_init = e * params.v0
        if kind is CgfKind.DEEP_PRICE:
            c0 = 0.5 * u * u * e - 0.5 * u
            c1 = kap * e * e - u * e * e * rho * sig
        elif kind is CgfKind.DEEP_AUX_PRICE:
            c0 = 0.5 * u * u * e + u * hbar
            c1 = kap * e * e - u * e * e * rho * sig
        else:
            c0 = u
            c1 = kap * e * e - 2.0 * rho * sig * e
    else:
        s = T
        c2 = 0.5 * sig * sig
        phi_rate = kap * th
        v_init = params.v0
        if kind is CgfKind.PRICE:
            c0 = 0.5 * u * u - u * (0.5 + hbar)
            c1 = kap - rho * sig * u
        elif kind is CgfKind.AUX_PRICE:
            c0 = u * (1.5 + hbar) + 0.5 * u * u * rb * rb
            c1 = kap - 2.0 * rho * sig - rho * sig * u
        else:
            c0 = u
            c1 = kap - 2.0 * rho * sig
    return RiccatiProblem(s * c0, c1, c2 / s, T), s, phi_rate, v_init


def finite_T_cgf(
    u: float,
    T: float,
    params: HestonParams,
    hbar: float = 0.0,
    kind: CgfKind = CgfKind.PRICE,
    epsilon: float | None = None,
    n_steps: int = 10_000,
) -> float:
    """phi(T) + v_init psi(T) for the expectation selected by ``kind``, integrated by RK4."""
    problem, s, phi_rate, v_init = _assemble(float(u), float(T), params, float(hbar), kind, epsilon)
    b, int_b = _rk4(problem, int(n_steps), True)
    return (phi_rate * int_b + v_init * b) / s


def c_of_hbar(hbar: float, rho_bar: float) -> float:
    """C(hbar) = 1 + 2 hbar + hbar^2/rho_bar^2, the integrated-variance coefficient in Term I."""
    return 1.0 + 2.0 * hbar + hbar * hbar / (rho_bar * rho_bar)
