"""Rate functions by Legendre transform, and the Hoelder bound functions G(q).

The bound on the IS second moment is G(q) = TermI(q) - (1 - 1/q) Lambda_II, and
asymptotic optimality holds when inf_q G(q) = -2 Lambda_1. :func:`minimize_g`
measures how close the numbers come to that identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol

from .errors import ConvergenceError, DomainError, ParameterError
from .model import HestonParams
from .scgf import (
    ScgfDomain,
    ScgfFunction,
    ScgfKind,
    q_singular_deep,
    q_singular_short,
    term1_limit_deep,
    term1_limit_short,
)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
MAX_ITER = 200
P_TOL = 1e-10
INSET = 1e-9


class Scgf(Protocol):
    domain: ScgfDomain

    def __call__(self, p: float) -> float: ...


@dataclass(frozen=True)
class RateEval:
    x: float
    value: float
    p_star: float
    converged: bool


@dataclass(frozen=True)
class OptimalityReport:
    kind: str
    q_star: float
    g_at_qstar: float
    lambda1: float
    lambda_ii: float
    minus_two_lambda1: float
    relative_gap: float
    interior: bool
    q_singular: float

    @property
    def gap_flagged(self) -> bool:
        return not self.relative_gap <= 0.05


def golden_section_min(f: Callable[[float], float], lo: float, hi: float, tol: float = P_TOL, max_iter: int = MAX_ITER):
    """Minimise a unimodal ``f`` on [lo, hi]; returns (x, f(x), iterations)."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for it in range(1, max_iter + 1):
        if b - a <= tol:
            x = 0.5 * (a + b)
            best = min(((fc, c), (fd, d), (f(x), x)))
            return best[1], best[0], it
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    raise ConvergenceError(f"golden section did not reach tol={tol:g} in {max_iter} iterations", bracket=(a, b))


def legendre(scgf: Scgf, x: float) -> RateEval:
    """Lambda(x) = sup_p (p x - Gamma(p)) over the open domain of ``scgf``."""
    dom = scgf.domain
    inset = INSET * dom.width
    lo, hi = dom.p_minus + inset, dom.p_plus - inset
    p, neg, _ = golden_section_min(lambda p: scgf(p) - p * x, lo, hi)
    # A maximiser pinned to an inset endpoint means x lies beyond the range of Gamma'.
    converged = (p - lo) > 10 * P_TOL and (hi - p) > 10 * P_TOL
    return RateEval(x, max(-neg, 0.0) if converged else -neg, p, converged)


def g_short(q: float, params: HestonParams, k: float, lambda_ii: float | None = None) -> float:
    """G(q) = TermI(q) - (1 - 1/q) Lambda_II(k), short-maturity regime."""
    if lambda_ii is None:
        lambda_ii = legendre(ScgfFunction(ScgfKind.SHORT_GAMMA_II, params, k), k).value
    return term1_limit_short(q, params, k) - (1.0 - 1.0 / q) * lambda_ii


def g_deep(q: float, params: HestonParams, T: float, lambda_ii: float | None = None) -> float:
    """G^eps(q) = TermI^eps(q) - (1 - 1/q) Lambda^eps_II(1), deep-OTM regime."""
    if lambda_ii is None:
        lambda_ii = legendre(ScgfFunction(ScgfKind.DEEP_GAMMA_II, params, T), 1.0).value
    return term1_limit_deep(q, params, T) - (1.0 - 1.0 / q) * lambda_ii


def minimize_g(
    kind: str,
    params: HestonParams,
    context: float,
    lambda_ii: float | None = None,
) -> OptimalityReport:
    """Minimise G on (1, q_sing) and compare with -2 Lambda_1.

    ``kind`` is ``'short'`` (context k = ln(K/S0)) or ``'deep'`` (context T).
    ``lambda_ii`` overrides the computed Lambda_II, for synthetic checks.
    """
    if kind == "short":
        k = context
        q_sing = q_singular_short(params, k)
        lam1 = legendre(ScgfFunction(ScgfKind.SHORT_GAMMA1, params), k).value
        if lambda_ii is None:
            lambda_ii = legendre(ScgfFunction(ScgfKind.SHORT_GAMMA_II, params, k), k).value

        def g(q):
            return g_short(q, params, k, lambda_ii)

    elif kind == "deep":
        T = context
        q_sing = q_singular_deep(params)
        lam1 = legendre(ScgfFunction(ScgfKind.DEEP_GAMMA1, params, T), 1.0).value
        if lambda_ii is None:
            lambda_ii = legendre(ScgfFunction(ScgfKind.DEEP_GAMMA_II, params, T), 1.0).value

        def g(q):
            return g_deep(q, params, T, lambda_ii)

    else:
        raise ParameterError(f"unknown regime {kind!r}", field="kind")
    if not q_sing > 1.0:
        raise ParameterError(f"tangent pole at q={q_sing:.6g} is not beyond 1: the bound is vacuous", field="q_sing")
    inset = INSET * (q_sing - 1.0)
    lo, hi = 1.0 + inset, q_sing - inset
    q_star, g_star, _ = golden_section_min(g, lo, hi)
    interior = (q_star - lo) > 1e3 * P_TOL and (hi - q_star) > 1e3 * P_TOL
    target = -2.0 * lam1
    gap = abs(g_star - target) / abs(target) if target != 0 else math.inf
    return OptimalityReport(kind, q_star, g_star, lam1, lambda_ii, target, gap, interior, q_sing)


def stationarity(kind: str, params: HestonParams, context: float, report: OptimalityReport, h: float = 1e-5):
    """One-sided differences (G(q*) - G(q*-h), G(q*+h) - G(q*)) / h at the reported minimiser."""
    if kind == "short":
        def g(q):
            return g_short(q, params, context, report.lambda_ii)
    else:
        def g(q):
            return g_deep(q, params, context, report.lambda_ii)
    q = report.q_star
    try:
        left = (g(q) - g(q - h)) / h
    except DomainError:
        left = math.nan
    right = (g(q + h) - g(q)) / h
    return left, right
