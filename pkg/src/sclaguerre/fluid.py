"""Coulomb-fluid equilibrium on a single interval (a, b) for the potential
v(x) = x^2 - t x - lambda ln x.

With X = a + b and Y = ab the supplementary and normalisation conditions
reduce to

    (X - t)^2 Y = lambda^2,        3 X^2 - 2 t X - 4 Y = 8 n + 4 lambda,

and X is the root of (X - t)^2 (3 X^2 - 2 t X - 8 n - 4 lambda) = 4 lambda^2
with X > t. Carrying out the principal-value integral for this v' gives

    sigma(x) = sqrt((b - x)(x - a)) / (2 pi) * (2 + lambda / (x sqrt(ab))).

All interval integrals use y = (a + b)/2 + (b - a)/2 cos(theta), which
absorbs the inverse square roots at both ends.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .exceptions import ConvergenceError, CrossCheckError, DomainError
from .moments import WeightParams
from .numerics import PrecisionContext
from .opcore import RecurrenceTable

__all__ = [
    "FluidSolution",
    "EndpointLink",
    "quartic",
    "solution_from_X",
    "solve_endpoints",
    "endpoint_residuals",
    "density",
    "normalization",
    "normalization_residual",
    "supplementary_residual",
    "lagrange_multiplier",
    "equilibrium_residual",
    "endpoint_link",
]


@dataclass(frozen=True)
class FluidSolution:
    n: object
    params: WeightParams
    X: object
    Y: object
    a: object
    b: object
    A: object
    digits: int

    def ctx(self):
        return PrecisionContext(self.digits)


class EndpointLink(NamedTuple):
    alpha_gap: object
    beta_gap: object


def _pv(params, ctx):
    lam, t = params.values(ctx)
    return lam, t


def quartic(X, n, params: WeightParams, ctx: PrecisionContext):
    lam, t = _pv(params, ctx)
    X, n = ctx.mpf(X), ctx.mpf(n)
    return (X - t) ** 2 * (3 * X * X - 2 * t * X - 8 * n - 4 * lam) - 4 * lam * lam


def _bracket(n, lam, t, mp):
    # Below lo the quadratic factor is <= 0 (so q = -4 lambda^2 < 0 at lo);
    # past lo both factors are positive and increasing.
    # (nudged down so that rounding cannot put it past the zero)
    root = (t + mp.sqrt(t * t + 24 * n + 12 * lam)) / 3
    lo = max(t, root - mp.mpf(10) ** (-mp.dps // 2) * (1 + abs(root)))
    hi = 2 * mp.sqrt(8 * n / 3) + abs(t) + 1
    return lo, hi


def solution_from_X(X, n, params: WeightParams, ctx: PrecisionContext) -> FluidSolution:
    """Endpoints and multiplier from a given X (Y from (X - t)^2 Y = lambda^2)."""
    mp = ctx.mp
    lam, t = _pv(params, ctx)
    X, n_ = ctx.mpf(X), ctx.mpf(n)
    if not X > t:
        raise DomainError(f"X = {X} must exceed t = {t}")
    Y = lam * lam / (X - t) ** 2
    disc = X * X - 4 * Y
    if not Y > 0 or not disc > 0:
        raise DomainError(f"no real positive endpoints for X = {X}, Y = {Y}")
    root = mp.sqrt(disc)
    b = (X + root) / 2
    a = Y / b  # (X - root) / 2 cancels when lambda is small
    A = _multiplier_endpoints(a, b, n_, lam, t, mp)
    return FluidSolution(n, params, X, Y, a, b, A, ctx.digits)


def solve_endpoints(n, params: WeightParams, ctx: PrecisionContext) -> FluidSolution:
    """Solve the endpoint equations for fluid size ``n`` (any real n >= 1).

    The root is bracketed by [lo, hi] where lo is the larger of t and the
    positive zero of 3X^2 - 2tX - 8n - 4 lambda (the quartic equals
    -4 lambda^2 there and increases beyond) and hi = 2 sqrt(8n/3) + |t| + 1,
    checked at runtime. Newton from 2 sqrt(2n/3) + t/3, falling back to
    bisection steps, runs at digits + 10.
    """
    params.require_positive_lambda("the Coulomb fluid")
    if not float(n) >= 1:
        raise DomainError(f"fluid size n must be >= 1, got {n!r}")
    wctx = ctx.extended(10)
    mp = wctx.mp
    lam, t = _pv(params, wctx)
    n_ = wctx.mpf(n)
    f = lambda X: (X - t) ** 2 * (3 * X * X - 2 * t * X - 8 * n_ - 4 * lam) - 4 * lam * lam
    df = lambda X: (2 * (X - t) * (3 * X * X - 2 * t * X - 8 * n_ - 4 * lam)
                    + (X - t) ** 2 * (6 * X - 2 * t))
    lo, hi = _bracket(n_, lam, t, mp)
    if not (f(lo) < 0 < f(hi)):
        raise ConvergenceError(f"quartic has no sign change on [{mp.nstr(lo, 15)}, {mp.nstr(hi, 15)}]")
    X = 2 * mp.sqrt(2 * n_ / 3) + t / 3
    if not lo < X < hi:
        X = (lo + hi) / 2
    tol = mp.mpf(10) ** (-wctx.digits + 5) * (1 + abs(X))
    for _ in range(400):
        fx = f(X)
        if fx < 0:
            lo = X
        else:
            hi = X
        d = df(X)
        step = fx / d if d else None
        X_new = X - step if step is not None else None
        if X_new is None or not lo < X_new < hi:
            X_new = (lo + hi) / 2
        if abs(X_new - X) < tol or hi - lo < tol:
            X = X_new
            break
        X = X_new
    else:
        raise ConvergenceError("endpoint iteration did not converge")
    sol = solution_from_X(X, n, params, wctx)
    out = ctx.mp
    return FluidSolution(n, params, out.mpf(sol.X), out.mpf(sol.Y), out.mpf(sol.a), out.mpf(sol.b),
                         out.mpf(sol.A), ctx.digits)


def endpoint_residuals(sol: FluidSolution, ctx: PrecisionContext | None = None):
    """Relative residuals of the two endpoint equations."""
    ctx = sol.ctx() if ctx is None else ctx
    mp = ctx.mp
    lam, t = _pv(sol.params, ctx)
    X, Y, n = ctx.mpf(sol.X), ctx.mpf(sol.Y), ctx.mpf(sol.n)
    e3 = abs((X - t) ** 2 * Y - lam * lam) / (lam * lam)
    terms = (3 * X * X, 2 * t * X, 4 * Y, 8 * n + 4 * lam)
    e4 = abs(3 * X * X - 2 * t * X - 4 * Y - 8 * n - 4 * lam) / max(abs(x) for x in terms)
    return e3, e4


def _theta_map(sol, mp):
    """y(theta) = a sin^2(theta/2) + b cos^2(theta/2), positive and exact at
    both ends, and its inverse."""
    a, b = mp.mpf(sol.a), mp.mpf(sol.b)
    y = lambda th: a * mp.sin(th / 2) ** 2 + b * mp.cos(th / 2) ** 2
    theta = lambda x: 2 * mp.acos(mp.sqrt((x - a) / (b - a)))
    return y, theta, (b - a) / 2


def _vprime(y, lam, t):
    return 2 * y - t - lam / y


def density(x, sol: FluidSolution, ctx: PrecisionContext | None = None, mode: str = "closed_form"):
    """Equilibrium density at a < x < b.

    ``mode="closed_form"`` uses the formula in the module docstring;
    ``mode="pv_quadrature"`` evaluates the principal-value integral
    numerically: in the theta variable the singular point is enclosed in a
    window whose two halves are integrated as symmetric pairs (their 1/u
    parts cancel), and the rest is integrated by mpmath's adaptive
    quadrature on panels that shrink geometrically toward the window.
    """
    ctx = sol.ctx() if ctx is None else ctx
    mp = ctx.mp
    lam, t = _pv(sol.params, ctx)
    x = ctx.mpf(x)
    a, b = ctx.mpf(sol.a), ctx.mpf(sol.b)
    if not a < x < b:
        raise DomainError(f"density is supported on ({a}, {b}); x = {x}")
    root = mp.sqrt((b - x) * (x - a))
    if mode == "closed_form":
        return root / (2 * mp.pi) * (2 + lam / (x * mp.sqrt(a * b)))
    if mode == "pv_quadrature":
        return root / (2 * mp.pi ** 2) * _pv_integral(x, sol, ctx)
    raise DomainError(f"unknown density mode {mode!r}")


def _pv_integral(x, sol, ctx):
    wctx = ctx.extended(20)
    mp = wctx.mp
    lam, t = _pv(sol.params, wctx)
    x = wctx.mpf(x)
    y_of, theta_of, _ = _theta_map(sol, mp)
    th_x = theta_of(x)

    def F(th):
        y = y_of(th)
        return _vprime(y, lam, t) / (y - x)

    delta = min(mp.pi * mp.mpf("1e-3"), th_x / 2, (mp.pi - th_x) / 2)
    pair = mp.quad(lambda u: F(th_x + u) + F(th_x - u), [0, delta], method="gauss-legendre")
    left_pts = [mp.zero] + [th_x - delta * 2 ** k for k in range(12, -1, -1) if th_x - delta * 2 ** k > 0] + [th_x - delta]
    right_pts = [th_x + delta] + [th_x + delta * 2 ** k for k in range(1, 13) if th_x + delta * 2 ** k < mp.pi] + [mp.pi]
    left = mp.quad(F, sorted(set(left_pts)))
    right = mp.quad(F, sorted(set(right_pts)))
    return ctx.mp.mpf(pair + left + right)


def normalization(sol: FluidSolution, ctx: PrecisionContext | None = None, mode: str = "density"):
    """Total mass: the integral of the closed-form density (``mode="density"``)
    or (1/2pi) int x v'(x) / sqrt((b-x)(x-a)) dx (``mode="moment"``)."""
    ctx = sol.ctx() if ctx is None else ctx
    mp = ctx.mp
    lam, t = _pv(sol.params, ctx)
    y_of, _, half = _theta_map(sol, mp)
    if mode == "density":
        sab = mp.sqrt(ctx.mpf(sol.a) * ctx.mpf(sol.b))

        def g(th):
            x = y_of(th)
            s = half * mp.sin(th)
            return s * s / (2 * mp.pi) * (2 + lam / (x * sab))

        return mp.quad(g, [0, mp.pi])
    if mode == "moment":
        def g(th):
            x = y_of(th)
            return x * _vprime(x, lam, t)
        return mp.quad(g, [0, mp.pi]) / (2 * mp.pi)
    raise DomainError(f"unknown normalization mode {mode!r}")


def normalization_residual(sol: FluidSolution, ctx: PrecisionContext | None = None, mode: str = "density"):
    """|mass - n| / n."""
    ctx = sol.ctx() if ctx is None else ctx
    n = ctx.mpf(sol.n)
    return abs(normalization(sol, ctx, mode) - n) / n


def supplementary_residual(sol: FluidSolution, ctx: PrecisionContext | None = None, relative: bool = True):
    """|int_a^b v'(x) / sqrt((b-x)(x-a)) dx|, divided (by default) by the
    same integral of |v'|."""
    ctx = sol.ctx() if ctx is None else ctx
    mp = ctx.mp
    lam, t = _pv(sol.params, ctx)
    y_of, theta_of, _ = _theta_map(sol, mp)
    vp = lambda th: _vprime(y_of(th), lam, t)
    # v' changes sign once on (a, b); split there so |v'| integrates cleanly
    x0 = (t + mp.sqrt(t * t + 8 * lam)) / 4
    pts = [mp.zero, mp.pi]
    if ctx.mpf(sol.a) < x0 < ctx.mpf(sol.b):
        pts = [mp.zero, theta_of(x0), mp.pi]
    value = abs(mp.quad(vp, pts))
    if not relative:
        return value
    scale = mp.quad(lambda th: abs(vp(th)), pts)
    return value / scale


def _multiplier_endpoints(a, b, n, lam, t, mp):
    return ((3 * a * a + 2 * a * b + 3 * b * b) / 8 - (a + b) * t / 2
            - lam * mp.log((a + b + 2 * mp.sqrt(a * b)) / 4) - 2 * n * mp.log((b - a) / 4))


def _multiplier_X(X, n, lam, t, mp):
    return ((4 * n + 2 * lam - t * X) / 4 - lam * mp.log((X * X - t * X + 2 * lam) / (4 * (X - t)))
            - n * mp.log((4 * n + 2 * lam + t * X - X * X) / 8))


def lagrange_multiplier(sol: FluidSolution, ctx: PrecisionContext | None = None):
    """The multiplier A from the endpoints, checked against its form in X
    alone to 10^(10 - digits) relative."""
    ctx = sol.ctx() if ctx is None else ctx
    mp = ctx.mp
    a, b = ctx.mpf(sol.a), ctx.mpf(sol.b)
    if not a > 0:
        raise DomainError(f"left endpoint must be positive, got {a}")
    lam, t = _pv(sol.params, ctx)
    n = ctx.mpf(sol.n)
    A1 = _multiplier_endpoints(a, b, n, lam, t, mp)
    A2 = _multiplier_X(ctx.mpf(sol.X), n, lam, t, mp)
    scale = max(abs(A1), abs(n * mp.log(n)), mp.one)
    if abs(A1 - A2) > mp.mpf(10) ** (10 - ctx.digits) * scale:
        raise CrossCheckError(f"multiplier forms disagree: {A1} vs {A2}")
    return A1


def equilibrium_residual(x, sol: FluidSolution, ctx: PrecisionContext | None = None):
    """v(x) - 2 int ln|x - y| sigma(y) dy - A at an interior x, relative to
    max(|v(x)|, |A|)."""
    ctx = sol.ctx() if ctx is None else ctx
    wctx = ctx.extended(10)
    mp = wctx.mp
    lam, t = _pv(sol.params, wctx)
    x = wctx.mpf(x)
    a, b = wctx.mpf(sol.a), wctx.mpf(sol.b)
    if not a < x < b:
        raise DomainError("equilibrium residual needs an interior point")
    y_of, theta_of, half = _theta_map(sol, mp)
    sab = mp.sqrt(a * b)

    def g(th):
        y = y_of(th)
        s = half * mp.sin(th)
        return mp.log(abs(x - y)) * s * s / (2 * mp.pi) * (2 + lam / (y * sab))

    th_x = theta_of(x)
    log_int = mp.quad(g, [0, th_x, mp.pi])
    v = x * x - t * x - lam * mp.log(x)
    A = wctx.mpf(sol.A)
    res = v - 2 * log_int - A
    return ctx.mp.mpf(abs(res) / max(abs(v), abs(A)))


def endpoint_link(sol: FluidSolution, table: RecurrenceTable, n: int | None = None) -> EndpointLink:
    """|alpha_n - (a+b)/2| and |beta_n - ((b-a)/4)^2| for the fluid of
    size n = sol.n."""
    n = int(sol.n) if n is None else n
    ctx = sol.ctx()
    a, b = ctx.mpf(sol.a), ctx.mpf(sol.b)
    return EndpointLink(abs(ctx.mpf(table.alpha[n]) - (a + b) / 2),
                        abs(ctx.mpf(table.beta[n]) - ((b - a) / 4) ** 2))
