import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from sclaguerre.exceptions import DomainError
from sclaguerre.moments import WeightParams, moment
from sclaguerre.numerics import (PrecisionContext, RealSeries, as_mpf, barnes_g_ln, fd_derivative, gamma_ln,
                                 glaisher_ln, hyp1f1, richardson_limit, zeta_prime_minus1)


def close(x, y, tol):
    return abs(x - y) <= tol * max(1, abs(y))


def test_contexts_are_independent():
    a, b = PrecisionContext(40), PrecisionContext(90)
    assert a.mp.dps == 40 and b.mp.dps == 90
    assert mpmath.mp.dps == 15  # global context untouched
    assert a.target_tol == a.mp.mpf(10) ** -20
    assert b.extended(10).digits == 100


def test_context_rejects_bad_settings():
    with pytest.raises(DomainError):
        PrecisionContext(10)
    with pytest.raises(DomainError):
        PrecisionContext(40, target_tol="1e-50")


def test_float_inputs_are_decimal():
    ctx = PrecisionContext(40)
    assert as_mpf(ctx.mp, 0.8) == ctx.mp.mpf("0.8")
    assert as_mpf(ctx.mp, Fraction(1, 3)) * 3 == 1


def test_gamma_ln(ctx50):
    mp = ctx50.mp
    assert gamma_ln(1, ctx50) == 0
    assert close(gamma_ln("1.5", ctx50), mp.log(mp.sqrt(mp.pi) / 2), mp.mpf(10) ** -48)
    assert close(gamma_ln("3.5", ctx50), mp.log(15 * mp.sqrt(mp.pi) / 8), mp.mpf(10) ** -48)
    with pytest.raises(DomainError):
        gamma_ln(0, ctx50)


def test_hyp1f1_examples(ctx50):
    mp = ctx50.mp
    assert hyp1f1("2.3", "0.5", 0, ctx50) == 1
    assert close(hyp1f1(1, 1, "0.7", ctx50), mp.exp(mp.mpf("0.7")), mp.mpf(10) ** -48)
    # (e^z - 1)/z at z = 1, independently by summing 1/(k+1)!
    direct = mp.fsum(1 / mp.factorial(k + 1) for k in range(80))
    assert close(hyp1f1(1, 2, 1, ctx50), direct, mp.mpf(10) ** -48)
    assert mp.nstr(direct, 10) == "1.718281828"
    with pytest.raises(DomainError):
        hyp1f1(1, -2, 1, ctx50)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-3, 6), b=st.floats(0.3, 4), z=st.floats(-4, 6))
def test_hyp1f1_precision_doubling(a, b, z):
    p1, p2 = PrecisionContext(30), PrecisionContext(60)
    v1, v2 = hyp1f1(a, b, z, p1), hyp1f1(a, b, z, p2)
    assert abs(p2.mpf(v1) - v2) <= p2.mpf(10) ** -20 * max(1, abs(v2))


def test_barnes_g_examples(ctx50):
    mp = ctx50.mp
    assert abs(barnes_g_ln(1, ctx50)) < mp.mpf(10) ** -45
    assert close(barnes_g_ln(4, ctx50), mp.log(2), mp.mpf(10) ** -45)
    with pytest.raises(DomainError):
        barnes_g_ln(0, ctx50)


def test_barnes_g_three_halves_against_integral():
    # ln G(1+z) = z ln(2 pi)/2 - z(z+1)/2 + z ln Gamma(1+z) - int_0^z ln Gamma(1+u) du
    ctx = PrecisionContext(40)
    mp = ctx.mp
    z = mp.mpf(1) / 2
    integral = mp.quad(lambda u: mp.loggamma(1 + u), [0, z])
    oracle = z * mp.log(2 * mp.pi) / 2 - z * (z + 1) / 2 + z * mp.loggamma(1 + z) - integral
    assert close(barnes_g_ln("1.5", ctx), oracle, mp.mpf(10) ** -35)


def test_barnes_g_functional_equation():
    ctx = PrecisionContext(40)
    mp = ctx.mp
    for z in ("0.1", "0.5", "1.3", "2.5", "3.7", "6.2", "9.9", "10"):
        lhs = barnes_g_ln(mp.mpf(z) + 1, ctx) - barnes_g_ln(z, ctx) - gamma_ln(z, ctx)
        assert abs(lhs) < mp.mpf(10) ** -30


def test_zeta_prime_minus1():
    ctx = PrecisionContext(30)
    v = zeta_prime_minus1(ctx)
    assert ctx.mp.nstr(v, 15).startswith("-0.165421143700")
    # precision monotonicity
    w = zeta_prime_minus1(PrecisionContext(60))
    assert abs(ctx.mpf(w) - v) < ctx.mpf(10) ** -29
    # against mpmath's own zeta derivative
    assert abs(v - ctx.mp.zeta(-1, derivative=1)) < ctx.mpf(10) ** -28
    A = ctx.mp.exp(glaisher_ln(ctx))
    assert ctx.mp.nstr(A, 9) == "1.28242713"
    assert abs(ctx.mp.mpf(1) / 12 - v - glaisher_ln(ctx)) == 0


def test_fd_examples(ctx50, unit):
    mp = ctx50.mp
    r = fd_derivative(lambda u: u.context.exp(u), 0, 1, ctx50)
    assert close(r.value, 1, ctx50.target_tol) and not r.flagged
    r = fd_derivative(lambda u: u ** 3, 1, 2, ctx50)
    assert close(r.value, 6, ctx50.target_tol)

    def ln_mu0(u):
        c = PrecisionContext(u.context.dps)
        return c.mp.log(moment(0, unit.with_t(u), c))

    r = fd_derivative(ln_mu0, 0, 1, ctx50)
    assert close(r.value, mp.sqrt(mp.pi) / 2, ctx50.target_tol)


@pytest.mark.parametrize("order", [1, 2])
def test_fd_exact_on_quartics(ctx50, order):
    c = [3, -2, 5, "0.5", -1]
    f = lambda u: sum(u.context.mpf(ci) * u ** k for k, ci in enumerate(c))
    t0 = ctx50.mpf("0.37")
    if order == 1:
        exact = sum(k * ctx50.mpf(ci) * t0 ** (k - 1) for k, ci in enumerate(c) if k)
    else:
        exact = sum(k * (k - 1) * ctx50.mpf(ci) * t0 ** (k - 2) for k, ci in enumerate(c) if k > 1)
    assert close(fd_derivative(f, t0, order, ctx50).value, exact, ctx50.target_tol)


def test_fd_flags_large_error(ctx50):
    # a big step on a rapidly varying function cannot meet the tolerance
    r = fd_derivative(lambda u: u.context.exp(40 * u), 0, 2, ctx50, step="0.5", levels=1)
    assert r.flagged
    with pytest.raises(DomainError):
        fd_derivative(lambda u: u, 0, 3, ctx50)


def test_fd_error_shrinks_with_step():
    ctx = PrecisionContext(60)
    f = lambda u: u.context.sin(3 * u) * u.context.exp(u)
    exact = ctx.mp.diff(lambda u: ctx.mp.sin(3 * u) * ctx.mp.exp(u), ctx.mpf("0.4"), 2)
    errs = [abs(fd_derivative(f, "0.4", 2, ctx, step=h, levels=1).value - exact) for h in ("1e-2", "1e-3")]
    # one Richardson level leaves an h^4 error: a 10x smaller step gains >= 3 digits
    assert errs[1] < errs[0] * ctx.mpf("1e-3")


def test_richardson_limit():
    mp = PrecisionContext(40).mp
    # trapezoid-like sequence: pi + c1 h^2 + c2 h^4
    vals = [mp.pi + 3 * h ** 2 - 7 * h ** 4 for h in (mp.mpf(1) / 2 ** k for k in range(4))]
    v, err = richardson_limit(vals, 2, 2, mp)
    assert abs(v - mp.pi) < mp.mpf(10) ** -35
    with pytest.raises(DomainError):
        richardson_limit(vals[:1], 2, 2, mp)


def test_real_series():
    mp = PrecisionContext(40).mp
    s = RealSeries(((Fraction(1, 2), 0, mp.mpf(2)), (0, 1, mp.mpf(3)), (-1, 0, mp.mpf(1))))
    assert s(4, mp) == 4 + 3 * mp.log(4) + mp.mpf(1) / 4
    assert len(s.truncated(0).terms) == 2
    with pytest.raises(DomainError):
        RealSeries(((Fraction(1, 3), 0, 1),))
    with pytest.raises(DomainError):
        RealSeries(((0, 0, 1), (1, 0, 1)))
