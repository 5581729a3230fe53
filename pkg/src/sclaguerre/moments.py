"""Moments of the semi-classical Laguerre weight x^lambda e^{-x^2+tx} on (0, inf)."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

from .exceptions import CrossCheckError, DomainError
from .numerics import PrecisionContext, as_mpf, hyp1f1
from .quadrature import weight_rule

__all__ = ["WeightParams", "MomentTable", "moment", "moment_table", "moment_rule"]


@dataclass(frozen=True)
class WeightParams:
    """The pair (lambda, t). Values are kept as given (str, int, float,
    Fraction or mpf) and converted at each precision on use."""

    lam: object
    t: object = 0

    def __post_init__(self):
        if not float(self.lam) > -1:
            raise DomainError(f"lambda must exceed -1 for finite moments, got {self.lam!r}")

    def values(self, ctx: PrecisionContext):
        return ctx.mpf(self.lam), ctx.mpf(self.t)

    @property
    def moments_only(self):
        """True when lambda is in (-1, 0]: moments exist but the ladder and
        fluid machinery (which need w(0) = 0) does not apply."""
        return not float(self.lam) > 0

    def require_positive_lambda(self, what="this operation"):
        # exact test so that e.g. lambda = 1e-30 is accepted
        mp_lam = as_mpf(PrecisionContext(30).mp, self.lam)
        if not mp_lam > 0:
            raise DomainError(f"{what} requires lambda > 0, got {self.lam!r}")

    def with_t(self, t):
        return WeightParams(self.lam, t)


def _formula(j, params, ctx):
    mp = ctx.mp
    lam, t = params.values(ctx)
    z = t * t / 4
    a1 = (j + 1 + lam) / 2
    a2 = (j + 2 + lam) / 2
    first = mp.gamma(a1) * hyp1f1(a1, mp.mpf(1) / 2, z, ctx)
    second = t * mp.gamma(a2) * hyp1f1(a2, mp.mpf(3) / 2, z, ctx)
    return first, second


@lru_cache(maxsize=50000)
def _moment_cached(j, params, digits, mode):
    guard = 10
    while True:
        wctx = PrecisionContext(digits + guard)
        if mode == "formula":
            first, second = _formula(j, params, wctx)
            value = (first + second) / 2
            # t < 0 makes the two terms cancel; make sure guard digits cover it
            lost = wctx.mp.log10(max(abs(first), abs(second)) / abs(value)) if value != 0 else wctx.digits
            if lost + 5 > guard:
                guard = int(lost) + 15
                continue
            return value
        lam, t = params.values(wctx)
        rule = weight_rule(lam, t, wctx, j)
        return rule.integrate([x ** j for x in rule.nodes])


def moment(j: int, params: WeightParams, ctx: PrecisionContext, mode: str = "formula"):
    """The j-th moment mu_j(t).

    ``mode="formula"`` evaluates the closed Gamma * 1F1 combination;
    ``mode="quadrature"`` integrates x^(j+lambda) e^(-x^2+tx) by composite
    Gauss-Legendre in u = sqrt(x).
    """
    if j < 0 or int(j) != j:
        raise DomainError(f"moment index must be a non-negative integer, got {j!r}")
    if mode not in ("formula", "quadrature"):
        raise DomainError(f"unknown moment mode {mode!r}")
    return ctx.mp.mpf(_moment_cached(int(j), params, ctx.digits, mode))


def moment_rule(params: WeightParams, ctx: PrecisionContext, max_degree: int, shift: int = 0):
    """Quadrature rule for the weight x^(lambda+shift) e^(-x^2+tx), exact to
    working precision on polynomials of degree <= ``max_degree``."""
    lam, t = params.values(ctx)
    return weight_rule(lam + shift, t, ctx, max_degree)


@dataclass(frozen=True)
class MomentTable:
    params: WeightParams
    values: tuple
    digits: int

    @property
    def j_max(self):
        return len(self.values) - 1

    def hankel_matrix(self, order, ctx: PrecisionContext):
        if 2 * order - 2 > self.j_max:
            raise DomainError(f"order-{order} Hankel matrix needs moments up to {2 * order - 2}")
        mp = ctx.mp
        return mp.matrix([[self.values[i + j] for j in range(order)] for i in range(order)])

    def hankel_pivots(self, order, ctx: PrecisionContext):
        """Pivots of symmetric Gaussian elimination (no pivoting) on the
        order-``order`` Hankel matrix; all positive iff it is positive definite."""
        mp = ctx.mp
        a = [[mp.mpf(self.values[i + j]) for j in range(order)] for i in range(order)]
        pivots = []
        for k in range(order):
            piv = a[k][k]
            pivots.append(piv)
            if not piv > 0:
                break
            for i in range(k + 1, order):
                f = a[i][k] / piv
                for j in range(k + 1, order):
                    a[i][j] -= f * a[k][j]
        return pivots

    def is_positive_definite(self, order, ctx: PrecisionContext):
        pivots = self.hankel_pivots(order, ctx)
        return len(pivots) == order and all(p > 0 for p in pivots)


_SPOT_CHECK_CAP = 16
_SPOT_CHECK_MAX_DIGITS = 200
_PEARSON_FROM = 200


def _pearson_fill(j_max, params, ctx):
    # Integrating d/dx[x^(j+1+lam) e^(-x^2+tx)] over (0, inf) gives
    # 2 mu_{j+2} = t mu_{j+1} + (j + 1 + lam) mu_j. For t < 0 the moments are
    # the recessive solution; the guard covers the resulting growth of error.
    t_f = float(params.t)
    guard = 15 + (int(math.ceil(abs(t_f) * math.sqrt(2 * j_max + 2) * 0.87)) if t_f < 0 else 0)
    wctx = ctx.extended(guard)
    lam, t = params.values(wctx)
    mu = [moment(0, params, wctx), moment(1, params, wctx)]
    for j in range(j_max - 1):
        mu.append((t * mu[j + 1] + (j + 1 + lam) * mu[j]) / 2)
    return tuple(ctx.mp.mpf(v) for v in mu[:j_max + 1])


def moment_table(j_max: int, params: WeightParams, ctx: PrecisionContext,
                 spot_check: float = 0.1, seed: int = 0, method: str = "auto") -> MomentTable:
    """mu_0 .. mu_{j_max}.

    ``method="formula"`` evaluates every entry by the closed formula.
    ``method="pearson"`` evaluates mu_0, mu_1 by the formula and the rest by
    the three-term moment recurrence that follows from the Pearson equation;
    it is what keeps tables of thousands of moments at thousands of digits
    affordable. ``"auto"`` switches to it above j_max = 200.

    A random ``spot_check`` fraction of indices (at least one, at most 16,
    always including ``j_max``) is recomputed by quadrature and must agree to
    ``ctx.target_tol``. Above 200 digits the quadrature check runs at 200
    digits with that precision's tolerance; recurrence-filled entries are
    additionally checked against the formula at full precision.
    """
    if j_max < 0:
        raise DomainError("j_max must be non-negative")
    if method == "auto":
        method = "pearson" if j_max > _PEARSON_FROM else "formula"
    if method == "formula":
        values = tuple(moment(j, params, ctx) for j in range(j_max + 1))
    elif method == "pearson":
        values = _pearson_fill(j_max, params, ctx)
    else:
        raise DomainError(f"unknown moment table method {method!r}")
    if spot_check > 0:
        rng = random.Random(seed)
        count = min(_SPOT_CHECK_CAP, max(1, math.ceil(spot_check * (j_max + 1))))
        picks = set(rng.sample(range(j_max + 1), min(count, j_max + 1)))
        picks.add(j_max)
        check_ctx = ctx if ctx.digits <= _SPOT_CHECK_MAX_DIGITS else PrecisionContext(_SPOT_CHECK_MAX_DIGITS)
        tol = check_ctx.target_tol
        rule = moment_rule(params, check_ctx.extended(10), j_max)
        for j in sorted(picks):
            q = check_ctx.mp.mpf(rule.integrate([x ** j for x in rule.nodes]))
            f = check_ctx.mp.mpf(values[j])
            if not abs(q - f) <= tol * abs(f):
                raise CrossCheckError(
                    f"moment spot-check failed at j={j}: table {f} vs quadrature {q}")
            if method == "pearson" and j > 1:
                exact = moment(j, params, ctx)
                if not abs(values[j] - exact) <= ctx.target_tol * abs(exact):
                    raise CrossCheckError(
                        f"moment recurrence drifted at j={j}: {values[j]} vs formula {exact}")
    return MomentTable(params, values, ctx.digits)
