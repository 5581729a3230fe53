"""Large-n expansions of alpha_n, beta_n, p(n, t), ln D_n and of the fluid
quantities X = a + b and A, checked against exact values.

The coefficients are hard-coded; the scaling fits in the tests are what
guard them against transcription errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exceptions import ConvergenceError, DomainError
from .moments import WeightParams
from .numerics import PrecisionContext, RealSeries, barnes_g_ln, zeta_prime_minus1
from .opcore import recurrence_table

__all__ = [
    "QUANTITIES",
    "REMAINDER",
    "ExpansionSpec",
    "ScalingFit",
    "ConstantEstimate",
    "C1_closed",
    "C2_closed",
    "expansion",
    "series_eval",
    "exact_values",
    "compare_to_exact",
    "extract_constants",
    "fit_exponent",
]

QUANTITIES = ("alpha", "beta", "p", "lnD", "X", "A")

# exponent of the stated remainder after the last known term
REMAINDER = {"alpha": Fraction(-7, 2), "beta": Fraction(-3), "p": Fraction(-5, 2),
             "lnD": Fraction(-3, 2), "X": Fraction(-7, 2), "A": Fraction(-5, 2)}

H = Fraction(1, 2)


@dataclass(frozen=True)
class ExpansionSpec:
    """Known terms of one expansion and the lowest exponent kept."""

    quantity: str
    coefficients: RealSeries
    truncation_order: Fraction

    def kept(self):
        return self.coefficients.truncated(self.truncation_order)

    def first_omitted(self):
        """Exponent of the first dropped term with a nonzero coefficient, or
        the stated remainder order when every known term is kept."""
        for e, _, c in self.coefficients.terms:
            if Fraction(e) < self.truncation_order and c != 0:
                return Fraction(e)
        return REMAINDER[self.quantity]


@dataclass(frozen=True)
class ScalingFit:
    quantity: str
    n_values: tuple
    errors: tuple
    fitted_exponent: float
    expected_exponent: Fraction
    tolerance: float = 0.2

    @property
    def passed(self):
        return abs(self.fitted_exponent - float(self.expected_exponent)) <= self.tolerance


@dataclass(frozen=True)
class ConstantEstimate:
    C1_est: object
    C2_est: object
    C1_closed: object
    C2_closed: object
    C1_change: object  # change in the estimate when one fewer remainder term is fitted
    C2_change: object

    def significant_digits(self, ctx: PrecisionContext):
        mp = ctx.mp
        d1 = abs(self.C1_est - self.C1_closed) / abs(self.C1_closed)
        d2 = abs(self.C2_est - self.C2_closed) / abs(self.C2_closed)
        to_digits = lambda d: float(-mp.log10(d)) if d else float(ctx.digits)
        return to_digits(d1), to_digits(d2)


def C1_closed(params: WeightParams, ctx: PrecisionContext):
    mp = ctx.mp
    lam, t = params.values(ctx)
    return t * t / 12 + mp.log(2 * mp.pi) - lam * (1 + mp.log(6)) / 2


def C2_closed(params: WeightParams, ctx: PrecisionContext):
    mp = ctx.mp
    lam, t = params.values(ctx)
    bracket = (48 * zeta_prime_minus1(ctx) - 24 * barnes_g_ln(lam + 1, ctx)
               - 12 * lam * lam * mp.log(mp.mpf(3) / 2) + 12 * lam * mp.log(2 * mp.pi)
               - 4 * mp.log(2) + 3 * mp.log(3))
    return t * t * (t * t + 36 * lam) / 864 + bracket / 24


def _terms(quantity, params, ctx):
    mp = ctx.mp
    lam, t = params.values(ctx)
    r6 = mp.sqrt(6)
    ln6 = mp.log(6)
    if quantity == "alpha":
        return [
            (H, 0, mp.sqrt(mp.mpf(2) / 3)),
            (0, 0, t / 6),
            (-H, 0, (t ** 2 + 12 * (1 + lam)) / (24 * r6)),
            (-3 * H, 0, -(t ** 4 + 24 * t ** 2 * (1 + lam) - 48 * (6 * lam ** 2 - 6 * lam - 5)) / (2304 * r6)),
            (-2, 0, t * (9 * lam ** 2 - 2) / 144),
            (-5 * H, 0, (t ** 6 + 36 * t ** 4 * (1 + lam) + 144 * t ** 2 * (66 * lam ** 2 + 6 * lam - 13)
                         - 1728 * (8 * lam ** 3 + 6 * lam ** 2 - 5 * lam - 3)) / (110592 * r6)),
            (-3, 0, t * (t ** 2 * (27 * lam ** 2 - 7) - 12 * (9 * lam ** 3 + 9 * lam ** 2 - 2 * lam - 2)) / 1728),
        ]
    if quantity == "beta":
        return [
            (1, 0, mp.mpf(1) / 6),
            (H, 0, t / (6 * r6)),
            (0, 0, (t ** 2 + 6 * lam) / 72),
            (-H, 0, t * (t ** 2 + 12 * lam) / (288 * r6)),
            (-1, 0, (2 - 9 * lam ** 2) / 144),
            (-3 * H, 0, -t * (t ** 4 + 24 * lam * t ** 2 + 3168 * lam ** 2 - 816) / (27648 * r6)),
            (-2, 0, (t ** 2 * (7 - 27 * lam ** 2) + 4 * lam * (9 * lam ** 2 - 2)) / 1152),
            (-5 * H, 0, t * (t ** 6 + 36 * lam * t ** 4 - 144 * t ** 2 * (246 * lam ** 2 - 61)
                             + 1728 * lam * (64 * lam ** 2 - 17)) / (1327104 * r6)),
        ]
    if quantity == "p":
        return [
            (3 * H, 0, -mp.mpf(2) / 3 * mp.sqrt(mp.mpf(2) / 3)),
            (1, 0, -t / 6),
            (H, 0, -(t ** 2 + 12 * lam) / (12 * r6)),
            (0, 0, -t * (t ** 2 + 18 * lam) / 216),
            (-H, 0, -(t ** 4 + 24 * lam * t ** 2 - 288 * lam ** 2 + 48) / (1152 * r6)),
            (-1, 0, t * (9 * lam ** 2 - 2) / 144),
            (-3 * H, 0, (t ** 6 + 36 * lam * t ** 4 + 144 * t ** 2 * (66 * lam ** 2 - 17)
                         - 1728 * lam * (8 * lam ** 2 - 1)) / (165888 * r6)),
            (-2, 0, t * (t ** 2 * (27 * lam ** 2 - 7) + 12 * lam * (2 - 9 * lam ** 2)) / 3456),
        ]
    if quantity == "lnD":
        return [
            (2, 1, mp.mpf(1) / 2),
            (2, 0, -(3 + 2 * ln6) / 4),
            (3 * H, 0, mp.mpf(2) / 3 * mp.sqrt(mp.mpf(2) / 3) * t),
            (1, 1, lam / 2),
            (1, 0, C1_closed(params, ctx)),
            (H, 0, t * (t ** 2 + 36 * lam) / (36 * r6)),
            (0, 1, (3 * lam ** 2 - 1) / 6),
            (0, 0, C2_closed(params, ctx)),
            (-H, 0, t * (t ** 4 + 40 * lam * t ** 2 + 240 * (1 - 6 * lam ** 2)) / (5760 * r6)),
            (-1, 0, -((9 * lam ** 2 - 2) * t ** 2 - 12 * lam * (5 * lam ** 2 - 2)) / 288),
        ]
    if quantity == "X":
        return [
            (H, 0, 2 * mp.sqrt(mp.mpf(2) / 3)),
            (0, 0, t / 3),
            (-H, 0, (t ** 2 + 12 * lam) / (12 * r6)),
            (-3 * H, 0, -(t ** 4 + 24 * lam * t ** 2 - 288 * lam ** 2) / (1152 * r6)),
            (-2, 0, lam ** 2 * t / 8),
            (-5 * H, 0, (t ** 6 + 36 * lam * t ** 4 + 9504 * lam ** 2 * t ** 2 - 13824 * lam ** 3) / (55296 * r6)),
            (-3, 0, lam ** 2 * t * (t ** 2 - 4 * lam) / 32),
        ]
    if quantity == "A":
        return [
            (1, 1, -mp.one),
            (1, 0, 1 + ln6),
            (H, 0, -t * mp.sqrt(mp.mpf(2) / 3)),
            (0, 1, -lam / 2),
            (0, 0, (6 * lam * ln6 - t ** 2) / 12),
            (-H, 0, -t * (t ** 2 + 36 * lam) / (72 * r6)),
            (-1, 0, -lam ** 2 / 2),
            (-3 * H, 0, t * (t ** 4 + 40 * lam * t ** 2 - 1440 * lam ** 2) / (11520 * r6)),
            (-2, 0, -lam ** 2 * (3 * t ** 2 - 20 * lam) / 96),
        ]
    raise DomainError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")


def expansion(quantity: str, params: WeightParams, ctx: PrecisionContext, through=None) -> ExpansionSpec:
    """All known terms of ``quantity``; ``through`` is the lowest exponent
    kept by :func:`series_eval` (default: every known term)."""
    terms = tuple((Fraction(e), k, c) for e, k, c in _terms(quantity, params, ctx))
    low = terms[-1][0] if through is None else Fraction(through)
    return ExpansionSpec(quantity, RealSeries(terms), low)


def series_eval(spec: ExpansionSpec, n, params: WeightParams | None = None, ctx: PrecisionContext | None = None):
    """Sum of the kept terms at n."""
    if not float(n) > 0:
        raise DomainError("series_eval needs n > 0")
    ctx = PrecisionContext(50) if ctx is None else ctx
    return spec.kept()(n, ctx.mp)


def exact_values(quantity: str, n_values, params: WeightParams, ctx: PrecisionContext):
    """Exact alpha_n, beta_n, p(n, t), ln D_n (one recurrence table up to
    max(n) + 1) or the fluid X, A (endpoint solve per n)."""
    n_values = [int(n) for n in n_values]
    if quantity in ("alpha", "beta", "p", "lnD"):
        table = recurrence_table(max(n_values) + 1, params, ctx)
        col = getattr(table, quantity)
        return [ctx.mpf(col[n]) for n in n_values]
    if quantity in ("X", "A"):
        from .fluid import solve_endpoints
        return [ctx.mpf(getattr(solve_endpoints(n, params, ctx), quantity)) for n in n_values]
    raise DomainError(f"unknown quantity {quantity!r}")


def fit_exponent(n_values, errors):
    """Least-squares slope of log|error| against log n."""
    xs = [math.log(float(n)) for n in n_values]
    ys = [float(math.log(abs(float(e)))) if float(e) != 0 else float("-inf") for e in errors]
    if any(math.isinf(y) for y in ys):
        raise ConvergenceError("an error is exactly zero; the slope is undefined")
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx


def compare_to_exact(quantity: str, n_values, params: WeightParams, truncation_order,
                     ctx: PrecisionContext, tolerance: float = 0.2) -> ScalingFit:
    """Fit the decay exponent of |exact - series| over ``n_values``; the
    expected exponent is that of the first omitted nonzero term."""
    n_values = tuple(int(n) for n in n_values)
    if len(n_values) < 2 or any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise DomainError("n_values must be strictly increasing with at least two entries")
    if n_values[0] < 50:
        raise DomainError("scaling fits need n >= 50")
    spec = expansion(quantity, params, ctx, truncation_order)
    exact = exact_values(quantity, n_values, params, ctx)
    errors = tuple(abs(e - series_eval(spec, n, params, ctx)) for e, n in zip(exact, n_values))
    return ScalingFit(quantity, n_values, errors, fit_exponent(n_values, errors),
                      spec.first_omitted(), tolerance)


def _constant_fit(n_values, remainders, n_extra, mp):
    # R(n) = C1 n + C2 + sum_{k=3}^{2 + n_extra} c_k n^(-k/2), least squares
    rows = []
    for n in n_values:
        n = mp.mpf(n)
        rows.append([n, mp.one] + [n ** (-mp.mpf(k) / 2) for k in range(3, 3 + n_extra)])
    A = mp.matrix(rows)
    b = mp.matrix([[r] for r in remainders])
    sol = mp.qr_solve(A, b)[0]
    return sol[0], sol[1]


def extract_constants(n_values, params: WeightParams, ctx: PrecisionContext, n_extra: int | None = None,
                      tol=None) -> ConstantEstimate:
    """Estimate C1 and C2 from exact ln D_n.

    Every known non-constant term of the ln D_n expansion except C1 n is
    subtracted; the remainder R(n) = C1 n + C2 + O(n^(-3/2)) is then
    extrapolated by a least-squares fit that also carries ``n_extra``
    correction terms c_k n^(-k/2), k = 3, 4, ... (a generalised Richardson
    elimination); by default as many as the data allow, up to 6. The change
    in the estimates when one correction term is dropped is reported as an
    error indicator; when it exceeds ``tol`` (default 1e-6 relative) a
    ConvergenceError is raised.
    """
    n_values = [int(n) for n in n_values]
    mp = ctx.mp
    known = [tm for tm in expansion("lnD", params, ctx).coefficients.terms
             if not (tm[1] == 0 and tm[0] in (1, 0))]
    residual_series = RealSeries(tuple(known))
    exact = exact_values("lnD", n_values, params, ctx)
    rem = [e - residual_series(n, mp) for e, n in zip(exact, n_values)]
    if n_extra is None:
        n_extra = max(1, min(6, len(n_values) - 3))
    if len(n_values) < n_extra + 3:
        raise DomainError("need at least n_extra + 3 points")
    c1, c2 = _constant_fit(n_values, rem, n_extra, mp)
    c1b, c2b = _constant_fit(n_values, rem, n_extra - 1, mp) if n_extra > 1 else (c1, c2)
    est = ConstantEstimate(c1, c2, C1_closed(params, ctx), C2_closed(params, ctx), abs(c1 - c1b), abs(c2 - c2b))
    tol = mp.mpf("1e-6") if tol is None else ctx.mpf(tol)
    if est.C1_change > tol * abs(c1) or est.C2_change > tol * max(abs(c2), mp.one):
        raise ConvergenceError(f"constant extrapolation unstable: changes {est.C1_change}, {est.C2_change}")
    return est
