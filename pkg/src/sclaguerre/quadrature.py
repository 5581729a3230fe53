"""High-precision composite Gauss-Legendre rules for the weight x^c e^{-x^2+tx}.

The substitution x = u^2 turns the half-line integral into

    int_0^U 2 u^(2c+1) e^(-u^4 + t u^2) f(u^2) du,

which is entire in u whenever 2c + 1 is a non-negative integer. Other
exponents get a geometrically graded mesh towards u = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import ConvergenceError
from .numerics import PrecisionContext


@dataclass(frozen=True)
class QuadratureRule:
    """Discrete measure ``sum_i weights[i] * delta(x - nodes[i])``."""

    nodes: tuple
    weights: tuple
    x_max: object

    def integrate(self, values):
        return sum(w * v for w, v in zip(self.weights, values))

    def __len__(self):
        return len(self.nodes)


@lru_cache(maxsize=64)
def _legendre_nodes(m: int, digits: int):
    ctx = PrecisionContext(max(digits, 30) + 10)
    mp = ctx.mp
    guess, _ = np.polynomial.legendre.leggauss(m)
    nodes, weights = [], []
    tol = mp.mpf(10) ** (-digits - 5)
    for g in guess[m // 2:]:
        x = mp.mpf(float(g))
        for _ in range(100):
            p0, p1 = mp.one, x
            for k in range(2, m + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = m * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x -= dx
            if abs(dx) < tol:
                break
        else:
            raise ConvergenceError("Legendre node refinement did not converge")
        p0, p1 = mp.one, x
        for k in range(2, m + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = m * (x * p1 - p0) / (x * x - 1)
        nodes.append(x)
        weights.append(2 / ((1 - x * x) * dp * dp))
    # positive half computed; mirror (the middle node of odd m appears once)
    half = [(-x, w) for x, w in zip(nodes, weights) if x != 0][::-1]
    full = half + list(zip(nodes, weights))
    return tuple(x for x, _ in full), tuple(w for _, w in full)


def gauss_legendre(m: int, ctx: PrecisionContext):
    """Nodes and weights of the m-point Gauss-Legendre rule on [-1, 1]."""
    xs, ws = _legendre_nodes(m, ctx.digits)
    mp = ctx.mp
    return [mp.mpf(x) for x in xs], [mp.mpf(w) for w in ws]


def tail_cutoff(c, t, digits, max_degree=0):
    """x beyond which x^(c+d) e^(-x^2+tx) for d = max_degree has dropped by
    10**-(digits+10) from its peak (bisection on the log-envelope)."""
    cc = float(c) + max_degree
    t = float(t)
    x_ref = max((t + math.sqrt(t * t + 8 * max(cc, 0.0))) / 4, 1.0)

    def drop(x):
        return (x * x - t * x - cc * math.log(x)) - (x_ref * x_ref - t * x_ref - cc * math.log(x_ref))

    target = (digits + 10) * math.log(10)
    lo, hi = x_ref, x_ref + 1
    while drop(hi) < target:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if drop(mid) < target:
            lo = mid
        else:
            hi = mid
    return hi


def _u_panels(u_max, graded, digits, power):
    width = 0.25
    count = max(1, int(math.ceil(u_max / width)))
    edges = [u_max * k / count for k in range(count + 1)]
    if graded:
        # geometric mesh on [0, edges[1]] down to where the innermost panel's
        # mass u^(power+1) is below 10**-(digits+10)
        q = 0.5
        first = edges[1]
        levels = int(math.ceil((digits + 10) / ((power + 1) * -math.log10(q)))) + 1
        inner = [first * q ** k for k in range(levels, 0, -1)]
        edges = [0.0] + inner + edges[1:]
    return edges, (len(edges) - count if graded else 0)


def weight_rule(c, t, ctx: PrecisionContext, max_degree: int, order: int | None = None) -> QuadratureRule:
    """Rule for ``int_0^inf f(x) x^c e^(-x^2+tx) dx`` with f polynomial of
    degree <= ``max_degree``; relative accuracy about ``10**-ctx.digits``.

    ``c`` and ``t`` are ``mpf`` (or exact) numbers; ``c > -1``.
    """
    mp = ctx.mp
    c = ctx.mpf(c)
    t = ctx.mpf(t)
    power = 2 * c + 1
    graded = not (power >= 0 and mp.isint(power))
    x_max = tail_cutoff(c, t, ctx.digits, max_degree)
    u_max = math.sqrt(x_max)
    edges, n_graded = _u_panels(u_max, graded, ctx.digits, float(power))
    m = order or int(math.ceil(0.45 * ctx.digits + max_degree / 4)) + 12
    main_rule = gauss_legendre(m, ctx)
    # graded panels see the branch point at u = 0 through rho = 3 + sqrt(8)
    m_graded = max(m, int(math.ceil(ctx.digits / (2 * math.log10(3 + math.sqrt(8))))) + 10)
    graded_rule = gauss_legendre(m_graded, ctx) if n_graded else None
    nodes, weights = [], []
    for i, (lo, hi) in enumerate(zip(edges, edges[1:])):
        gx, gw = graded_rule if i < n_graded else main_rule
        lo, hi = mp.mpf(lo), mp.mpf(hi)
        half = (hi - lo) / 2
        mid = (hi + lo) / 2
        for g, w in zip(gx, gw):
            u = mid + half * g
            x = u * u
            nodes.append(x)
            weights.append(2 * half * w * u ** power * mp.exp(-x * x + t * x))
    return QuadratureRule(tuple(nodes), tuple(weights), x_max)
