"""Hankel determinants, recurrence coefficients and the discrete string system.

Two independent routes build a :class:`RecurrenceTable`:

* ``"hankel"``: the moment (Hankel) matrix is eliminated with the Chebyshev
  algorithm, the O(n^2) form of Gaussian elimination on a Hankel matrix. It
  yields D_n = prod h_j and p(n, t) = -D~_n / D_n exactly as the determinant
  formulas do, but the moment matrix is badly conditioned, so it runs with
  a guard that grows linearly in n.
* ``"stieltjes"``: the discretised Stieltjes procedure on a high-precision
  quadrature rule for the weight; well conditioned, never touches moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .exceptions import CrossCheckError, DomainError, PrecisionExhaustedError
from .moments import MomentTable, WeightParams, moment_rule, moment_table
from .numerics import PrecisionContext

__all__ = [
    "RecurrenceTable",
    "hankel_guard_digits",
    "stieltjes_guard_digits",
    "default_digits",
    "hankel_det",
    "shifted_hankel_det",
    "recurrence_table",
    "compare_tables",
    "discrete_string_check",
    "discrete_string_advance",
    "iterate_string",
    "string_instability_index",
]


def hankel_guard_digits(n_max: int) -> int:
    """Extra digits the Hankel route needs to deliver ``digits`` correct
    digits at index n_max (about 1.15 digits are lost per index)."""
    return int(math.ceil(1.3 * n_max)) + 20


def stieltjes_guard_digits(n_max: int) -> int:
    """Extra digits for the quadrature behind the Stieltjes route; log10 of
    mu_{2n} / h_n grows like 0.78 n."""
    return int(math.ceil(0.8 * n_max)) + 10


def default_digits(n_max: int) -> int:
    """Working precision suggested for a run to ``n_max``."""
    return 40 + int(math.ceil(3.2 * n_max))


@dataclass(frozen=True)
class RecurrenceTable:
    """Columns indexed by n = 0 .. n_max. ``beta[0] = 0``, ``p[0] = 0``,
    ``lnD[0] = 0`` by convention; ``h[n] = D_{n+1} / D_n``."""

    params: WeightParams
    digits: int
    mode: str
    alpha: tuple
    beta: tuple
    h: tuple
    p: tuple
    lnD: tuple

    @property
    def n_max(self):
        return len(self.alpha) - 1

    def row(self, n):
        return {"n": n, "alpha": self.alpha[n], "beta": self.beta[n], "h": self.h[n],
                "p": self.p[n], "lnD": self.lnD[n]}

    def rows(self):
        return [self.row(n) for n in range(self.n_max + 1)]

    def ctx(self):
        return PrecisionContext(self.digits)


def _check_det_args(n, m: MomentTable, top):
    if n < 1:
        raise DomainError("determinant order must be >= 1")
    if m.j_max < top:
        raise DomainError(f"order-{n} determinant needs moments up to index {top}, table has {m.j_max}")


def _det_full_pivot(a, mp):
    n = len(a)
    a = [row[:] for row in a]
    det = mp.one
    for k in range(n):
        pi, pj = max(((i, j) for i in range(k, n) for j in range(k, n)), key=lambda ij: abs(a[ij[0]][ij[1]]))
        if a[pi][pj] == 0:
            return mp.zero
        if pi != k:
            a[k], a[pi] = a[pi], a[k]
            det = -det
        if pj != k:
            for row in a:
                row[k], row[pj] = row[pj], row[k]
            det = -det
        piv = a[k][k]
        det *= piv
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                for j in range(k + 1, n):
                    a[i][j] -= f * a[k][j]
    return det


def hankel_det(n: int, m: MomentTable, ctx: PrecisionContext):
    """D_n = det(mu_{i+j})_{i,j<n} by Gaussian elimination with full pivoting."""
    _check_det_args(n, m, 2 * n - 2)
    mp = ctx.mp
    a = [[mp.mpf(m.values[i + j]) for j in range(n)] for i in range(n)]
    det = _det_full_pivot(a, mp)
    if not det > 0:
        raise PrecisionExhaustedError(f"D_{n} came out non-positive ({det}); raise digits")
    return det


def shifted_hankel_det(n: int, m: MomentTable, ctx: PrecisionContext):
    """D~_n: the Hankel matrix of order n with its last column replaced by
    (mu_n, ..., mu_{2n-1}); ``p(n, t) = -D~_n / D_n``."""
    _check_det_args(n, m, 2 * n - 1)
    mp = ctx.mp
    a = [[mp.mpf(m.values[i + j + (1 if j == n - 1 else 0)]) for j in range(n)] for i in range(n)]
    det = _det_full_pivot(a, mp)
    if not det > 0:
        raise PrecisionExhaustedError(f"D~_{n} came out non-positive ({det}); raise digits")
    return det


def _chebyshev(mu, n_coef, mp):
    # sigma_{k,l} = <P_k, x^l>; returns alpha_0..alpha_{n_coef-1}, b with b_0 = mu_0
    m_top = 2 * n_coef
    sig_prev = [mp.zero] * m_top
    sig = list(mu[:m_top])
    alpha = [sig[1] / sig[0]]
    b = [sig[0]]
    for k in range(1, n_coef):
        new = [mp.zero] * m_top
        ak, bk = alpha[k - 1], b[k - 1]
        for l in range(k, m_top - k):
            new[l] = sig[l + 1] - ak * sig[l] - bk * sig_prev[l]
        if not new[k] > 0:
            return None
        alpha.append(new[k + 1] / new[k] - sig[k] / sig[k - 1])
        b.append(new[k] / sig[k - 1])
        sig_prev, sig = sig, new
    return alpha, b


def _stieltjes(rule, n_coef, mp):
    xs = rule.nodes
    ws = rule.weights
    P_prev = [mp.zero] * len(xs)
    P = [mp.one] * len(xs)
    alpha, hs = [], []
    for k in range(n_coef):
        wp = [w * p for w, p in zip(ws, P)]
        hk = mp.fsum(q * p for q, p in zip(wp, P))
        ak = mp.fsum(q * p * x for q, p, x in zip(wp, P, xs)) / hk
        alpha.append(ak)
        hs.append(hk)
        if k + 1 < n_coef:
            bk = hk / hs[k - 1] if k > 0 else mp.zero
            P_prev, P = P, [(x - ak) * p - bk * q for x, p, q in zip(xs, P, P_prev)]
    return alpha, hs


def _assemble(alpha, h_list, mp):
    n_coef = len(alpha)
    beta = [mp.zero] + [h_list[k] / h_list[k - 1] for k in range(1, n_coef)]
    p = [mp.zero]
    lnD = [mp.zero]
    for k in range(n_coef - 1):
        p.append(p[-1] - alpha[k])
        lnD.append(lnD[-1] + mp.log(h_list[k]))
    return alpha, beta, h_list, p, lnD


@lru_cache(maxsize=512)
def _table_cached(n_max, params, digits, mode):
    n_coef = n_max + 1
    if mode == "hankel":
        guard = hankel_guard_digits(n_max)
        for _ in range(4):
            wctx = PrecisionContext(digits + guard)
            mp = wctx.mp
            mt = moment_table(2 * n_coef - 1, params, wctx, spot_check=0.1)
            out = _chebyshev(mt.values, n_coef, mp)
            if out is not None and all(b > 0 for b in out[1]) and all(a > 0 for a in out[0]):
                alpha, b = out
                h_list = [b[0]]
                for k in range(1, n_coef):
                    h_list.append(h_list[-1] * b[k])
                break
            guard *= 2
        else:
            raise PrecisionExhaustedError(
                f"Hankel route lost positivity up to n={n_max}", required_digits=digits + guard)
    elif mode == "stieltjes":
        # h_n is about 10^(-0.78 n) of mu_{2n}: the rule (and its tail cutoff)
        # must resolve P_n^2 w to that much below the monomial scale
        wctx = PrecisionContext(digits + stieltjes_guard_digits(n_max))
        mp = wctx.mp
        rule = moment_rule(params, wctx, 2 * n_coef + 1)
        alpha, h_list = _stieltjes(rule, n_coef, mp)
    else:
        raise DomainError(f"unknown recurrence mode {mode!r}")
    cols = _assemble(alpha, h_list, mp)
    out_mp = PrecisionContext(digits).mp
    return tuple(tuple(out_mp.mpf(v) for v in col) for col in cols)


def recurrence_table(n_max: int, params: WeightParams, ctx: PrecisionContext,
                     mode: str = "hankel", cross_check: bool = False) -> RecurrenceTable:
    """alpha_n, beta_n, h_n, p(n, t) and ln D_n for n = 0 .. n_max.

    Values are accurate to about ``ctx.digits``; internal precision is raised
    as each route requires. With ``cross_check=True`` the other route is
    computed as well and a disagreement beyond ``ctx.target_tol`` (relative)
    raises :class:`CrossCheckError`.
    """
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    cols = _table_cached(int(n_max), params, ctx.digits, mode)
    table = RecurrenceTable(params, ctx.digits, mode, *cols)
    if cross_check:
        other = recurrence_table(n_max, params, ctx, "stieltjes" if mode == "hankel" else "hankel")
        worst = compare_tables(table, other)
        if worst[1] > ctx.target_tol:
            raise CrossCheckError(f"hankel and stieltjes tables disagree: {worst[0]} rel. diff {worst[1]}")
    return table


def compare_tables(a: RecurrenceTable, b: RecurrenceTable):
    """Largest entrywise relative difference: (where, value)."""
    mp = PrecisionContext(min(a.digits, b.digits)).mp
    worst = ("", mp.zero)
    for name in ("alpha", "beta", "h", "p", "lnD"):
        for n, (x, y) in enumerate(zip(getattr(a, name), getattr(b, name))):
            x, y = mp.mpf(x), mp.mpf(y)
            scale = max(abs(x), abs(y))
            d = abs(x - y) / scale if scale else mp.zero
            if d > worst[1]:
                worst = (f"{name}[{n}]", d)
    return worst


def discrete_string_check(table: RecurrenceTable, n: int):
    """Left-minus-right residuals of the two string equations at index n:

        alpha_n (2 alpha_n - t) + 2 beta_n + 2 beta_{n+1} = 2n + 1 + lambda
        (2 alpha_n - t)(2 alpha_{n-1} - t) beta_n = (2 beta_n - n)(2 beta_n - n - lambda)

    The second holds trivially at n = 0 (both sides vanish with beta_0 = 0)
    and is reported as 0 there.
    """
    if not 0 <= n < table.n_max:
        raise DomainError(f"string check at n={n} needs rows up to n+1 (table has {table.n_max})")
    ctx = table.ctx()
    mp = ctx.mp
    lam, t = table.params.values(ctx)
    a, b = table.alpha, table.beta
    res_a = a[n] * (2 * a[n] - t) + 2 * b[n] + 2 * b[n + 1] - (2 * n + 1 + lam)
    if n == 0:
        res_b = mp.zero
    else:
        res_b = (2 * a[n] - t) * (2 * a[n - 1] - t) * b[n] - (2 * b[n] - n) * (2 * b[n] - n - lam)
    return res_a, res_b


def discrete_string_advance(alpha_n, beta_n, n: int, params: WeightParams, ctx: PrecisionContext):
    """One forward step of the string system: (beta_{n+1}, alpha_{n+1}).

    Forward iteration amplifies rounding errors exponentially; use only for
    verification and short runs.
    """
    mp = ctx.mp
    lam, t = params.values(ctx)
    a, b = ctx.mpf(alpha_n), ctx.mpf(beta_n)
    b_next = (2 * n + 1 + lam - a * (2 * a - t) - 2 * b) / 2
    denom = (2 * a - t) * b_next
    if denom == 0:
        raise DomainError(f"string step at n={n} divides by zero (2 alpha_n - t = {2 * a - t}, beta_next = {b_next})")
    r = 2 * b_next - n - 1
    a_next = (t + r * (r - lam) / denom) / 2
    return b_next, a_next


def iterate_string(alpha0, n_steps: int, params: WeightParams, ctx: PrecisionContext, unstable: bool = False):
    """Run the string recursion from (alpha_0, beta_0 = 0); returns the lists
    alpha_0..alpha_{n_steps}, beta_0..beta_{n_steps}.

    The recursion loses about one digit per step, so callers must pass
    ``unstable=True`` to acknowledge it; use :func:`recurrence_table` for
    trustworthy values.
    """
    if not unstable:
        raise DomainError("forward string iteration is unstable; pass unstable=True to run it anyway")
    mp = ctx.mp
    alpha = [ctx.mpf(alpha0)]
    beta = [mp.zero]
    for n in range(n_steps):
        b_next, a_next = discrete_string_advance(alpha[n], beta[n], n, params, ctx)
        alpha.append(a_next)
        beta.append(b_next)
    return alpha, beta


def string_instability_index(table: RecurrenceTable, ctx: PrecisionContext, threshold=None):
    """Seed the forward string recursion with ``table.alpha[0]`` at
    ``ctx.digits`` and return the first n where alpha_n or beta_n deviates
    from the table by more than ``threshold`` (relative; default 1e-20), or
    where the step breaks down; None if the run tracks the table up to
    ``table.n_max``."""
    threshold = ctx.mpf("1e-20") if threshold is None else ctx.mpf(threshold)
    a, b = ctx.mpf(table.alpha[0]), ctx.mp.zero
    if abs(a - table.alpha[0]) > threshold * abs(table.alpha[0]):
        return 0
    for n in range(table.n_max):
        try:
            b, a = discrete_string_advance(a, b, n, table.params, ctx)
        except DomainError:
            return n + 1
        da = abs(a - table.alpha[n + 1]) / abs(table.alpha[n + 1])
        db = abs(b - table.beta[n + 1]) / abs(table.beta[n + 1])
        if da > threshold or db > threshold:
            return n + 1
    return None
