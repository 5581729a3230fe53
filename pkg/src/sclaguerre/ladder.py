"""Ladder-operator auxiliaries R_n, r_n and the relations they satisfy.

For lambda > 0 the weight vanishes at both ends of (0, inf) and the monic
polynomials obey

    (d/dx + B_n) P_n = beta_n A_n P_{n-1},
    (d/dx - B_n - v') P_{n-1} = -A_{n-1} P_n,

with A_n = 2 + R_n / x, B_n = r_n / x and v(x) = x^2 - t x - lambda ln x.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import NamedTuple

from .exceptions import DomainError
from .moments import moment_rule
from .numerics import PrecisionContext
from .opcore import RecurrenceTable, recurrence_table, stieltjes_guard_digits

__all__ = [
    "AuxTable",
    "PolyEval",
    "CompatibilityResiduals",
    "LadderResiduals",
    "aux_quantities",
    "aux_table",
    "poly_eval",
    "poly_values",
    "verify_compatibility",
    "ladder_residuals",
    "verify_ladder",
    "sample_points",
]


@dataclass(frozen=True)
class AuxTable:
    """R_n = 2 alpha_n - t and r_n = 2 beta_n - n for n = 0 .. n_max, with
    the integral-definition values where they were computed (else None)."""

    R: tuple
    r: tuple
    oracle_R: tuple | None = None
    oracle_r: tuple | None = None

    @property
    def n_max(self):
        return len(self.R) - 1


class PolyEval(NamedTuple):
    n: int
    x: object
    P: object
    dP: object
    d2P: object


class CompatibilityResiduals(NamedTuple):
    re2: object
    re4: object
    re5: object
    # sum_{j<n} R_j against -2 p(n, t) - n t
    re4_sum: object


class LadderResiduals(NamedTuple):
    raising: object
    lowering: object


def _rel(mp, residual, *terms):
    scale = max((abs(x) for x in terms), default=mp.zero)
    return abs(residual) / scale if scale else abs(residual)


def poly_values(alpha, beta, n, x, mp):
    """(P_n, P_n', P_n'') at x from the three-term recurrence and its first
    two x-derivatives."""
    x = mp.mpf(x)
    p0, p1 = mp.zero, mp.one
    d0, d1 = mp.zero, mp.zero
    s0, s1 = mp.zero, mp.zero
    for k in range(n):
        a, b = alpha[k], beta[k]
        p0, p1, d0, d1, s0, s1 = (
            p1, (x - a) * p1 - b * p0,
            d1, p1 + (x - a) * d1 - b * d0,
            s1, 2 * d1 + (x - a) * s1 - b * s0,
        )
    return p1, d1, s1


def poly_eval(table: RecurrenceTable, n: int, x, ctx: PrecisionContext | None = None) -> PolyEval:
    """P_n(x), P_n'(x), P_n''(x) by recurrence from ``table``."""
    if not 0 <= n <= table.n_max:
        raise DomainError(f"poly_eval at n={n} needs table rows up to n (table has {table.n_max})")
    ctx = table.ctx() if ctx is None else ctx
    mp = ctx.mp
    x = ctx.mpf(x)
    P, dP, d2P = poly_values([mp.mpf(a) for a in table.alpha], [mp.mpf(b) for b in table.beta], n, x, mp)
    return PolyEval(n, x, P, dP, d2P)


def _integral_aux(table, n, ctx):
    # The integrals sit about 10^(-0.78 n) below the monomial scale of the
    # rule, so both the coefficients and the rule carry that many extra digits.
    params = table.params
    wctx = PrecisionContext(ctx.digits + stieltjes_guard_digits(n) + 10)
    mp = wctx.mp
    work = recurrence_table(max(n, 1), params, wctx, mode=table.mode)
    lam, _ = params.values(wctx)
    rule = moment_rule(params, wctx, 2 * n, shift=-1)
    alpha = [mp.mpf(a) for a in work.alpha]
    beta = [mp.mpf(b) for b in work.beta]
    sq, cross = [], []
    for y, w in zip(rule.nodes, rule.weights):
        p_n = poly_values(alpha, beta, n, y, mp)[0]
        sq.append(w * p_n * p_n)
        if n:
            cross.append(w * p_n * poly_values(alpha, beta, n - 1, y, mp)[0])
    R = lam * mp.fsum(sq) / work.h[n]
    r = lam * mp.fsum(cross) / work.h[n - 1] if n else mp.zero
    return ctx.mp.mpf(R), ctx.mp.mpf(r)


def aux_quantities(table: RecurrenceTable, n: int, mode: str = "algebraic",
                   ctx: PrecisionContext | None = None):
    """(R_n, r_n).

    ``mode="algebraic"`` reads them off the recurrence coefficients;
    ``mode="integral"`` evaluates the defining integrals

        R_n = lambda / h_n     int P_n^2     y^(lambda-1) e^(-y^2+ty) dy,
        r_n = lambda / h_{n-1} int P_n P_{n-1} y^(lambda-1) e^(-y^2+ty) dy

    by quadrature, with P_n evaluated by recurrence at the nodes.
    """
    table.params.require_positive_lambda("the ladder auxiliaries")
    ctx = table.ctx() if ctx is None else ctx
    if not 0 <= n <= table.n_max:
        raise DomainError(f"aux_quantities at n={n} outside table (n_max={table.n_max})")
    if mode == "algebraic":
        _, t = table.params.values(ctx)
        return 2 * ctx.mpf(table.alpha[n]) - t, 2 * ctx.mpf(table.beta[n]) - n
    if mode == "integral":
        return _integral_aux(table, n, ctx)
    raise DomainError(f"unknown aux mode {mode!r}")


def aux_table(table: RecurrenceTable, oracle_n_max: int | None = None,
              ctx: PrecisionContext | None = None) -> AuxTable:
    """Algebraic R_n, r_n for the whole table; integral values as well for
    n <= ``oracle_n_max`` when it is given."""
    table.params.require_positive_lambda("the ladder auxiliaries")
    ctx = table.ctx() if ctx is None else ctx
    pairs = [aux_quantities(table, n, "algebraic", ctx) for n in range(table.n_max + 1)]
    oracle_R = oracle_r = None
    if oracle_n_max is not None:
        top = min(oracle_n_max, table.n_max)
        opairs = [aux_quantities(table, n, "integral", ctx) for n in range(top + 1)]
        oracle_R = tuple(p[0] for p in opairs)
        oracle_r = tuple(p[1] for p in opairs)
    return AuxTable(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), oracle_R, oracle_r)


def verify_compatibility(table: RecurrenceTable, aux: AuxTable, n: int) -> CompatibilityResiduals:
    """Relative residuals of

        r_n + r_{n+1} = lambda - alpha_n R_n,
        sum_{j<n} R_j - t r_n = 2 beta_n (R_n + R_{n-1}),
        r_n^2 - lambda r_n = beta_n R_n R_{n-1},

    each divided by its largest participating term, plus the check of
    sum_{j<n} R_j against -2 p(n, t) - n t. The last two relations are
    empty at n = 0 and reported as 0.
    """
    if not 0 <= n < min(table.n_max, aux.n_max):
        raise DomainError(f"compatibility at n={n} needs rows up to n+1")
    ctx = table.ctx()
    mp = ctx.mp
    lam, t = table.params.values(ctx)
    R, r = aux.R, aux.r
    a, b = table.alpha[n], table.beta[n]
    re2 = _rel(mp, r[n] + r[n + 1] - (lam - a * R[n]), r[n], r[n + 1], lam, a * R[n])
    if n == 0:
        return CompatibilityResiduals(re2, mp.zero, mp.zero, mp.zero)
    total = mp.fsum(R[:n])
    rhs4 = 2 * b * (R[n] + R[n - 1])
    re4 = _rel(mp, total - t * r[n] - rhs4, total, t * r[n], rhs4)
    lhs5 = r[n] * r[n] - lam * r[n]
    rhs5 = b * R[n] * R[n - 1]
    re5 = _rel(mp, lhs5 - rhs5, r[n] * r[n], lam * r[n], rhs5)
    via_p = -2 * table.p[n] - n * t
    re4_sum = _rel(mp, total - via_p, total, 2 * table.p[n], n * t)
    return CompatibilityResiduals(re2, re4, re5, re4_sum)


def ladder_residuals(table: RecurrenceTable, aux: AuxTable, n: int, x_samples) -> LadderResiduals:
    """Largest relative residual over ``x_samples`` of the raising and the
    lowering relation, each normalised by its largest term."""
    table.params.require_positive_lambda("the ladder relations")
    if not 1 <= n <= min(table.n_max, aux.n_max):
        raise DomainError(f"ladder relations at n={n} need 1 <= n <= n_max")
    ctx = table.ctx()
    mp = ctx.mp
    lam, t = table.params.values(ctx)
    worst_ra = worst_lo = mp.zero
    for x in x_samples:
        x = ctx.mpf(x)
        if not x > 0:
            raise DomainError(f"ladder sample points must be positive, got {x}")
        pn = poly_eval(table, n, x, ctx)
        pm = poly_eval(table, n - 1, x, ctx)
        B = aux.r[n] / x
        vp = 2 * x - t - lam / x
        t1, t2 = pn.dP, B * pn.P
        t3 = table.beta[n] * (2 + aux.R[n] / x) * pm.P
        worst_ra = max(worst_ra, _rel(mp, t1 + t2 - t3, t1, t2, t3))
        s1, s2 = pm.dP, (B + vp) * pm.P
        s3 = (2 + aux.R[n - 1] / x) * pn.P
        worst_lo = max(worst_lo, _rel(mp, s1 - s2 + s3, s1, s2, s3))
    return LadderResiduals(worst_ra, worst_lo)


def verify_ladder(table: RecurrenceTable, aux: AuxTable, n: int, x_samples):
    """Max of the raising and lowering relative residuals."""
    res = ladder_residuals(table, aux, n, x_samples)
    return max(res.raising, res.lowering)


def sample_points(table: RecurrenceTable, n: int, count: int = 10, seed: int | None = None):
    """Sample points in (10^-2, b) with b = alpha_n + 2 sqrt(beta_n), a
    recurrence-based estimate of the right end of the zero distribution.

    Without ``seed`` they are log-spaced; with ``seed`` they are drawn
    log-uniformly from a seeded generator. Either way the set is
    deterministic.
    """
    ctx = table.ctx()
    b_est = float(table.alpha[n]) + 2 * math.sqrt(max(float(table.beta[n]), 0.0))
    b_est = max(b_est, 0.1)
    lo, hi = math.log(1e-2), math.log(b_est)
    if seed is None:
        us = [lo + (hi - lo) * (k + 0.5) / count for k in range(count)]
    else:
        rng = random.Random(seed)
        us = sorted(rng.uniform(lo, hi) for _ in range(count))
    return [ctx.mpf(repr(math.exp(u))) for u in us]
