"""Numerical verification of the differential and difference identities.

Every t-derivative is a finite difference of quantities recomputed from
scratch (moments -> recurrence table) at the stencil points, never taken
from another identity. Residuals are relative: the left-minus-right value
divided by the largest term taking part.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .exceptions import DomainError
from .ladder import aux_table, ladder_residuals, poly_eval, sample_points, verify_compatibility
from .moments import WeightParams
from .numerics import PrecisionContext, fd_derivative, fd_guard_digits
from .opcore import RecurrenceTable, discrete_string_check, recurrence_table

__all__ = [
    "IDENTITIES",
    "IdentityReport",
    "SigmaTriple",
    "ode_coefficients",
    "ode_residual",
    "riccati_residual",
    "painleve4_residual",
    "chazy_residual",
    "sigma_continuous_residual",
    "p_form_residual",
    "sigma_triple",
    "sigma_discrete_residual",
    "beta_reconstruction_residual",
    "p_difference_residual",
    "pnt_residual",
    "toda_and_H_residual",
    "identity_reports",
]

CONTINUOUS_TOL = "1e-15"

IDENTITIES = (
    "discrete-system", "sigma-discrete", "p-difference", "compatibility",
    "ode", "ladder", "riccati", "painleve4", "chazy", "sigma-continuous", "toda",
)


@dataclass(frozen=True)
class IdentityReport:
    identity_name: str
    n: int
    params: WeightParams
    residual: object
    derivative_error_estimate: object
    tolerance: object
    detail: str = ""

    @property
    def passed(self):
        return bool(self.residual < self.tolerance and self.derivative_error_estimate < self.tolerance / 10)


@dataclass(frozen=True)
class SigmaTriple:
    """sigma_{n-1}, sigma_n, sigma_{n+1} at a common s = t / 2, where
    sigma_n(s) = -2 p(n, t) - (n + lambda) t."""

    sigma_prev: object
    sigma_n: object
    sigma_next: object
    s: object


class _Fd(NamedTuple):
    value: object
    d1: object
    d2: object
    error: object


def _rel(mp, residual, *terms):
    scale = max((abs(x) for x in terms), default=mp.zero)
    return abs(residual) / scale if scale else abs(residual)


def _rel_squared(mp, L, Rr, lhs_terms, rhs_terms, weight):
    # residual of L^2 = weight * Rr, on the scale of its squared terms
    scale = max(max(abs(x) for x in lhs_terms) ** 2, weight * max(abs(x) for x in rhs_terms))
    res = L * L - weight * Rr
    return abs(res) / scale if scale else abs(res)


def _derivs(quantity, n, params, ctx, mode="hankel", scale=1):
    """Value, first and second derivative of ``quantity(table)`` in the
    variable u = t / scale, by Richardson-extrapolated central differences
    on freshly computed tables. ``error`` is the larger relative fd error."""
    mp = ctx.mp
    h = ctx.fd_step
    wdigits = max(ctx.digits + fd_guard_digits(h, 2, 3), 40)
    wctx = PrecisionContext(wdigits)
    scale = wctx.mpf(scale)

    def f(u):
        table = recurrence_table(n + 1, params.with_t(u * scale), wctx, mode=mode)
        return quantity(table, wctx)

    t0 = wctx.mpf(params.t)
    u0 = t0 / scale
    value = ctx.mp.mpf(f(u0))
    d1 = fd_derivative(f, u0, 1, ctx, step=h)
    d2 = fd_derivative(f, u0, 2, ctx, step=h)
    err = max(d1.error / max(abs(d1.value), mp.one), d2.error / max(abs(d2.value), mp.one))
    return _Fd(value, d1.value, d2.value, err)


def _table_at(n, params, ctx, mode="hankel"):
    return recurrence_table(n + 1, params, ctx, mode=mode)


def _R(n):
    return lambda tb, c: 2 * tb.alpha[n] - c.mpf(tb.params.t)


def _r(n):
    return lambda tb, c: 2 * tb.beta[n] - n


def _guard_pole(value, ctx, what):
    if abs(value) < 10 * ctx.fd_step:
        raise DomainError(f"{what} = {value} is within 10 fd_step of zero; identity has a pole there")


# ---------------------------------------------------------------- P_n ODE

def ode_coefficients(alpha_n, beta_n, n, x, params, ctx):
    """(Phi(x), Psi(x)) of P_n'' + Phi P_n' + Psi P_n = 0."""
    lam, t = params.values(ctx)
    a, b, x = ctx.mpf(alpha_n), ctx.mpf(beta_n), ctx.mpf(x)
    u = t - 2 * a
    w = 2 * x - t + 2 * a
    phi = t - 2 * x + lam / x - u / (x * w)
    psi = (2 * n - (n * t - 4 * a * b) / x - 2 * (n - 2 * b) * (n + lam - 2 * b) / (x * u)
           + (n - 2 * b) / x ** 2 + u * (n - 2 * b) / (x ** 2 * w))
    return phi, psi


def ode_residual(table: RecurrenceTable, n: int, x_samples, ctx: PrecisionContext | None = None):
    """Largest relative residual of P_n'' + Phi P_n' + Psi P_n over
    ``x_samples``, each normalised by max(|P_n''|, |Phi P_n'|, |Psi P_n|)."""
    table.params.require_positive_lambda("the P_n differential equation")
    ctx = table.ctx() if ctx is None else ctx
    mp = ctx.mp
    _, t = table.params.values(ctx)
    a = ctx.mpf(table.alpha[n])
    _guard_pole(t - 2 * a, ctx, "t - 2 alpha_n")
    worst = mp.zero
    for x in x_samples:
        x = ctx.mpf(x)
        _guard_pole(x, ctx, "x")
        _guard_pole(2 * x - t + 2 * a, ctx, "2x - t + 2 alpha_n")
        pe = poly_eval(table, n, x, ctx)
        phi, psi = ode_coefficients(a, table.beta[n], n, x, table.params, ctx)
        terms = (pe.d2P, phi * pe.dP, psi * pe.P)
        worst = max(worst, _rel(mp, sum(terms), *terms))
    return worst


# ------------------------------------------------------ Riccati, P-IV, Chazy

def _riccati(n, params, ctx, mode="hankel"):
    mp = ctx.mp
    lam, _ = params.values(ctx)
    Rd = _derivs(_R(n), n, params, ctx, mode)
    rd = _derivs(_r(n), n, params, ctx, mode)
    R, r = Rd.value, rd.value
    _guard_pole(R, ctx, f"R_{n}")
    _, t = params.values(ctx)
    a1, b1 = (n + r) * R / 2, (r * r - lam * r) / R
    res1 = _rel(mp, rd.d1 - a1 + b1, rd.d1, a1, b1)
    c2 = R * (t + R) / 2
    res2 = _rel(mp, Rd.d1 - lam + 2 * r + c2, Rd.d1, lam, 2 * r, c2)
    err = max(Rd.error, rd.error)
    return (res1, res2), err


def riccati_residual(n: int, params: WeightParams, ctx: PrecisionContext, mode="hankel"):
    """Relative residuals of

        r_n' = (n + r_n) R_n / 2 - (r_n^2 - lambda r_n) / R_n,
        R_n' = lambda - 2 r_n - R_n (t + R_n) / 2.
    """
    return _riccati(n, params, ctx, mode)[0]


def _p4(n, params, ctx, variant, mode="hankel"):
    mp = ctx.mp
    lam, t = params.values(ctx)
    if variant == "t":
        # q_n(s) = R_n(2s) rewritten as an equation for R_n in t
        d = _derivs(_R(n), n, params, ctx, mode)
        R, R1, R2 = d.value, d.d1, d.d2
        _guard_pole(R, ctx, f"R_{n}")
        terms = (8 * R * R2, -4 * R1 * R1, -3 * R ** 4, -4 * t * R ** 3,
                 (8 * n + 4 * lam + 4 - t * t) * R * R, 4 * lam * lam)
        return _rel(mp, mp.fsum(terms), *terms), d.error
    if variant == "s":
        # derivatives taken in s = t / 2; beta_n is rebuilt from q_n and q_n'
        d = _derivs(_R(n), n, params, ctx, mode, scale=2)
        q, q1, q2 = d.value, d.d1, d.d2
        _guard_pole(q, ctx, f"q_{n}")
        s = t / 2
        terms = (q1 * q1 / (2 * q), mp.mpf(3) / 2 * q ** 3, 4 * s * q * q,
                 2 * (s * s - 2 * n - 1 - lam) * q, -2 * lam * lam / q)
        res = _rel(mp, q2 - mp.fsum(terms), q2, *terms)
        beta = ctx.mpf(_table_at(n, params, ctx, mode).beta[n])
        rebuilt = (-q1 / 8, -q * q / 8, -s * q / 4, mp.mpf(n) / 2, lam / 4)
        res_b = _rel(mp, beta - mp.fsum(rebuilt), beta, *rebuilt)
        return max(res, res_b), d.error
    raise DomainError(f"unknown Painleve IV variant {variant!r}")


def painleve4_residual(n: int, params: WeightParams, ctx: PrecisionContext, variant="s", mode="hankel"):
    """Relative residual of Painleve IV for q_n(s) = 2 alpha_n - t, s = t/2.

    ``variant="s"`` differentiates in s and also checks the reconstruction
    beta_n = -q'/8 - q^2/8 - s q/4 + n/2 + lambda/4 (the larger of the two
    residuals is returned). ``variant="t"`` checks the same equation
    multiplied out as an equation for R_n(t) with t-derivatives:

        8 R R'' - 4 R'^2 - 3 R^4 - 4 t R^3 + (8n + 4 lambda + 4 - t^2) R^2 + 4 lambda^2 = 0.
    """
    return _p4(n, params, ctx, variant, mode)[0]


def _chazy(n, params, ctx, mode="hankel"):
    mp = ctx.mp
    lam, t = params.values(ctx)
    beta = lambda tb, c: tb.beta[n]
    d = _derivs(beta, n, params, ctx, mode)
    b, b1, b2 = d.value, d.d1, d.d2
    k = 2 * n + lam
    m = n * (n + lam)
    lhs = (2 * b2, 12 * b * b, -4 * k * b, m)
    rhs = (b1 * b1, 4 * b ** 3, -2 * k * b * b, m * b)
    L, Rr = mp.fsum(lhs), mp.fsum(rhs)
    res_bde = _rel_squared(mp, L, Rr, lhs, rhs, t * t)

    # t = sqrt(2) z, beta_n = (2n + lambda)/6 - v/2, derivatives taken in z
    sq2 = mp.sqrt(2)
    v_of = lambda tb, c: (2 * n + c.mpf(tb.params.lam)) / 3 - 2 * tb.beta[n]
    dv = _derivs(v_of, n, params, ctx, mode, scale=sq2)
    v, v1, v2 = dv.value, dv.d1, dv.d2
    z = t / sq2
    a1 = -mp.mpf(2) / 3 * (n * n + n * lam + lam * lam)
    b1t = -mp.mpf(4) / 27 * (2 * n ** 3 + 3 * n * n * lam - 3 * n * lam * lam - 2 * lam ** 3)
    lhs_ce = (v2, -6 * v * v, -a1)
    rhs_ce = (v1 * v1, -4 * v ** 3, -2 * a1 * v, -b1t)
    Lc, Rc = mp.fsum(lhs_ce), mp.fsum(rhs_ce)
    res_ce = _rel_squared(mp, Lc, Rc, lhs_ce, rhs_ce, z * z)
    return (res_bde, res_ce), max(d.error, dv.error)


def chazy_residual(n: int, params: WeightParams, ctx: PrecisionContext, mode="hankel"):
    """Relative residuals of the second-order second-degree equation for
    beta_n(t) and of its Chazy II form in v(z). Both are squared identities;
    they are normalised by max(largest left term^2, t^2 * largest right term)."""
    return _chazy(n, params, ctx, mode)[0]


# ------------------------------------------------------------- sigma forms

def _sigma_cont(n, params, ctx, mode="hankel"):
    mp = ctx.mp
    lam, t = params.values(ctx)
    sig = lambda tb, c: -2 * tb.p[n] - (n + c.mpf(tb.params.lam)) * c.mpf(tb.params.t)
    d = _derivs(sig, n, params, ctx, mode, scale=2)
    s = t / 2
    sg, s1, s2 = d.value, d.d1, d.d2
    terms = (s2 * s2, -4 * (s * s1 - sg) ** 2, 4 * s1 * (s1 + 2 * lam) * (s1 + 2 * n + 2 * lam))
    # at n = 0 every term vanishes identically, so scale by the factors
    sizes = (s2 * s2, 4 * (abs(s * s1) + abs(sg)) ** 2,
             4 * abs(s1) * (abs(s1) + 2 * lam) * (abs(s1) + 2 * n + 2 * lam))
    return _rel(mp, mp.fsum(terms), *sizes), d.error


def sigma_continuous_residual(n: int, params: WeightParams, ctx: PrecisionContext, mode="hankel"):
    """Relative residual of the Jimbo-Miwa-Okamoto sigma form

        sigma''^2 - 4 (s sigma' - sigma)^2 + 4 sigma' (sigma' + 2 lambda)(sigma' + 2n + 2 lambda)

    with derivatives in s = t / 2."""
    return _sigma_cont(n, params, ctx, mode)[0]


def _p_form(n, params, ctx, mode="hankel"):
    mp = ctx.mp
    _, t = params.values(ctx)
    lam = ctx.mpf(params.lam)
    d = _derivs(lambda tb, c: tb.p[n], n, params, ctx, mode)
    p, p1, p2 = d.value, d.d1, d.d2
    terms = (4 * p2 * p2, -(t * p1 - p) ** 2, -4 * p1 * (n + 2 * p1) * (n + lam + 2 * p1))
    sizes = (4 * p2 * p2, (abs(t * p1) + abs(p)) ** 2,
             4 * abs(p1) * (n + 2 * abs(p1)) * (n + lam + 2 * abs(p1)))
    return _rel(mp, mp.fsum(terms), *sizes), d.error


def p_form_residual(n: int, params: WeightParams, ctx: PrecisionContext, mode="hankel"):
    """The sigma form written for p(n, t) in t:
    4 p''^2 = (t p' - p)^2 + 4 p' (n + 2 p')(n + lambda + 2 p')."""
    return _p_form(n, params, ctx, mode)[0]


def sigma_triple(table: RecurrenceTable, n: int) -> SigmaTriple:
    if not 1 <= n < table.n_max:
        raise DomainError(f"sigma triple at n={n} needs rows n-1 .. n+1")
    ctx = table.ctx()
    lam, t = table.params.values(ctx)
    sig = [-2 * table.p[k] - (k + lam) * t for k in (n - 1, n, n + 1)]
    return SigmaTriple(*sig, t / 2)


def sigma_discrete_residual(triple: SigmaTriple, n: int, params: WeightParams,
                            ctx: PrecisionContext | None = None):
    """Relative residual of the discrete sigma form (purely algebraic)."""
    ctx = PrecisionContext(60) if ctx is None else ctx
    mp = ctx.mp
    lam = ctx.mpf(params.lam)
    sm, sn, sp, s = (ctx.mpf(v) for v in (triple.sigma_prev, triple.sigma_n, triple.sigma_next, triple.s))
    lhs = 2 * (sn + n * (sm - sp) + 2 * lam * s) * (sn + (n + lam) * (sm - sp))
    rhs = (sn + 2 * (n + lam) * s) * (sp - sm + 2 * s) * (sm - sn) * (sn - sp)
    return _rel(mp, lhs - rhs, lhs, rhs)


def beta_reconstruction_residual(table: RecurrenceTable, n: int):
    """beta_n against p(n) / (t + 2 p(n+1) - 2 p(n-1)), relative."""
    if not 1 <= n < table.n_max:
        raise DomainError(f"beta reconstruction at n={n} needs rows n-1 .. n+1")
    ctx = table.ctx()
    _, t = table.params.values(ctx)
    p = table.p
    rebuilt = p[n] / (t + 2 * p[n + 1] - 2 * p[n - 1])
    return _rel(ctx.mp, table.beta[n] - rebuilt, table.beta[n], rebuilt)


def p_difference_residual(table: RecurrenceTable, n: int):
    """Relative residual of the second-order difference equation for p(n)."""
    if not 1 <= n < table.n_max:
        raise DomainError(f"p difference equation at n={n} needs rows n-1 .. n+1")
    ctx = table.ctx()
    lam, t = table.params.values(ctx)
    pm, p0, pp = table.p[n - 1], table.p[n], table.p[n + 1]
    w = t + 2 * pp - 2 * pm
    lhs = (2 * p0 - n * w) * (2 * p0 - (n + lam) * w)
    rhs = p0 * w * (t + 2 * pp - 2 * p0) * (t + 2 * p0 - 2 * pm)
    return _rel(ctx.mp, lhs - rhs, lhs, rhs)


def pnt_residual(table: RecurrenceTable, n: int):
    """p(n, t) against beta_n (t - 2 alpha_n - 2 alpha_{n-1}), relative."""
    if not 1 <= n <= table.n_max:
        raise DomainError(f"p(n,t) relation at n={n} needs rows n-1 .. n")
    ctx = table.ctx()
    _, t = table.params.values(ctx)
    rhs = table.beta[n] * (t - 2 * table.alpha[n] - 2 * table.alpha[n - 1])
    return _rel(ctx.mp, table.p[n] - rhs, table.p[n], rhs)


# ------------------------------------------------------------ Toda and H_n

def _toda(n, params, ctx, mode="hankel"):
    if n < 1:
        raise DomainError("the Toda equation is stated for n >= 1")
    mp = ctx.mp
    d = _derivs(lambda tb, c: tb.lnD[n], n, params, ctx, mode)
    table = _table_at(n, params, ctx, mode)
    ratio = mp.exp(ctx.mpf(table.lnD[n + 1]) + ctx.mpf(table.lnD[n - 1]) - 2 * ctx.mpf(table.lnD[n]))
    res_toda = _rel(mp, d.d2 - ratio, d.d2, ratio)
    minus_p = -ctx.mpf(table.p[n])
    res_H = _rel(mp, d.d1 - minus_p, d.d1, minus_p)
    return (res_toda, res_H), d.error


def toda_and_H_residual(n: int, params: WeightParams, ctx: PrecisionContext, mode="hankel"):
    """(ln D_n)'' against D_{n+1} D_{n-1} / D_n^2, and (ln D_n)' against -p(n, t)."""
    return _toda(n, params, ctx, mode)[0]


# ---------------------------------------------------------------- reports

def _discrete_tol(ctx, slack=40):
    # 10^(slack - digits), never looser than half the working digits
    return ctx.mp.mpf(10) ** -max(ctx.digits - slack, ctx.digits // 2)


def identity_reports(name: str, n: int, params: WeightParams, ctx: PrecisionContext,
                     tol=None, table: RecurrenceTable | None = None, x_samples=None,
                     mode: str = "hankel") -> list[IdentityReport]:
    """One report per residual of identity ``name`` at index n.

    Derivative-based identities default to a tolerance of 1e-15, the
    algebraic ones (string system, discrete sigma form, p difference
    equation, ODE, ladder) to 10^(40 - digits) and the compatibility
    relations to 10^(30 - digits), both capped at 10^(-digits/2). ``table`` is reused by the algebraic
    checks when given (it must reach n + 1).
    """
    mp = ctx.mp
    zero = mp.zero

    def rep(label, res, err, default):
        t = ctx.mpf(default if tol is None else tol)
        return IdentityReport(label, n, params, ctx.mp.mpf(res), ctx.mp.mpf(err), t)

    def get_table():
        if table is not None and table.n_max >= n + 1:
            return table
        return recurrence_table(n + 1, params, ctx, mode=mode)

    dtol = _discrete_tol(ctx)
    if name == "discrete-system":
        ra, rb = discrete_string_check(get_table(), n)
        return [rep("residual_a", abs(ra), zero, dtol), rep("residual_b", abs(rb), zero, dtol)]
    if name == "sigma-discrete":
        tb = get_table()
        out = [rep("sigma-discrete", sigma_discrete_residual(sigma_triple(tb, n), n, params, tb.ctx()), zero, dtol),
               rep("beta-from-p", beta_reconstruction_residual(tb, n), zero, dtol)]
        return out
    if name == "p-difference":
        tb = get_table()
        return [rep("p-difference", p_difference_residual(tb, n), zero, dtol),
                rep("p-from-alpha-beta", pnt_residual(tb, n), zero, dtol)]
    if name == "compatibility":
        tb = get_table()
        c = verify_compatibility(tb, aux_table(tb), n)
        ctol = _discrete_tol(ctx, 30)
        return [rep(f"compat-{k}", getattr(c, k), zero, ctol) for k in c._fields]
    if name in ("ode", "ladder"):
        tb = get_table()
        xs = sample_points(tb, n) if x_samples is None else x_samples
        if name == "ode":
            return [rep("ode", ode_residual(tb, n, xs, tb.ctx()), zero, dtol)]
        lr = ladder_residuals(tb, aux_table(tb), n, xs)
        return [rep("ladder-raising", lr.raising, zero, dtol), rep("ladder-lowering", lr.lowering, zero, dtol)]
    if name == "riccati":
        (r1, r2), err = _riccati(n, params, ctx, mode)
        return [rep("riccati-r", r1, err, CONTINUOUS_TOL), rep("riccati-R", r2, err, CONTINUOUS_TOL)]
    if name == "painleve4":
        out = []
        for variant in ("s", "t"):
            res, err = _p4(n, params, ctx, variant, mode)
            out.append(rep(f"painleve4-{variant}", res, err, CONTINUOUS_TOL))
        return out
    if name == "chazy":
        (rb, rc), err = _chazy(n, params, ctx, mode)
        return [rep("chazy-beta", rb, err, CONTINUOUS_TOL), rep("chazy-v", rc, err, CONTINUOUS_TOL)]
    if name == "sigma-continuous":
        rs, es = _sigma_cont(n, params, ctx, mode)
        rp, ep = _p_form(n, params, ctx, mode)
        return [rep("sigma-jmo", rs, es, CONTINUOUS_TOL), rep("sigma-p-form", rp, ep, CONTINUOUS_TOL)]
    if name == "toda":
        (rt, rh), err = _toda(n, params, ctx, mode)
        return [rep("toda", rt, err, CONTINUOUS_TOL), rep("H-equals-minus-p", rh, err, CONTINUOUS_TOL)]
    raise DomainError(f"unknown identity {name!r}; choose from {', '.join(IDENTITIES)}")
