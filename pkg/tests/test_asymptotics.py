from fractions import Fraction

import pytest

from sclaguerre.asymptotics import (C1_closed, ScalingFit, compare_to_exact, expansion, extract_constants,
                                    series_eval)
from sclaguerre.exceptions import DomainError
from sclaguerre.moments import WeightParams
from sclaguerre.numerics import PrecisionContext, fd_derivative


def test_series_examples(ctx50):
    mp = ctx50.mp
    lead = expansion("alpha", WeightParams(1, 0), ctx50, "1/2")
    assert abs(series_eval(lead, 6) - 2) < mp.mpf(10) ** -45
    three = expansion("beta", WeightParams(0, 0), ctx50, 0)
    assert len(three.kept().terms) == 3
    assert abs(series_eval(three, 30, ctx=ctx50) - 5) < mp.mpf(10) ** -45


def test_c1_direct_value(ctx50):
    mp = ctx50.mp
    c1 = C1_closed(WeightParams(1, 0), ctx50)
    assert abs(c1 - (mp.log(2 * mp.pi) - (1 + mp.log(6)) / 2)) < mp.mpf(10) ** -45
    assert mp.nstr(c1, 6) == "0.441997"


def test_errors(ctx50, base):
    with pytest.raises(DomainError):
        expansion("gamma", base, ctx50)
    with pytest.raises(DomainError):
        series_eval(expansion("alpha", base, ctx50), 0)
    with pytest.raises(DomainError):
        compare_to_exact("alpha", [400, 200], base, -3, ctx50)


def test_first_omitted_skips_zero_terms(ctx50):
    # at t = 0 the n^-2 and n^-3 terms of alpha vanish
    spec = expansion("alpha", WeightParams("1.5", 0), ctx50, "-5/2")
    assert spec.first_omitted() == Fraction(-7, 2)
    assert expansion("alpha", WeightParams("1.5", "0.8"), ctx50, "-5/2").first_omitted() == -3


def test_scaling_fit_pass_rule():
    ok = ScalingFit("alpha", (1, 2), (1, 1), -3.69, Fraction(-7, 2))
    bad = ScalingFit("alpha", (1, 2), (1, 1), -3.71, Fraction(-7, 2))
    assert ok.passed and not bad.passed


def test_alpha_and_beta_fits(base, ctx50):
    ns = [200, 400, 800]
    fa = compare_to_exact("alpha", ns, base, -3, ctx50)
    fb = compare_to_exact("beta", ns, base, "-5/2", ctx50)
    assert fa.passed and fa.expected_exponent == Fraction(-7, 2), fa.fitted_exponent
    assert fb.passed and fb.expected_exponent == -3, fb.fitted_exponent


def test_t0_slice_fit(ctx50):
    p = WeightParams("1.5", 0)
    for q, through in (("alpha", "-5/2"), ("p", "-3/2")):
        spec = expansion(q, p, ctx50)
        odd = [c for e, k, c in spec.coefficients.terms if e in (0, -2, -3) and q == "alpha"]
        assert all(c == 0 for c in odd)
        fit = compare_to_exact(q, [100, 200, 400], p, through, ctx50)
        assert fit.passed, (q, fit.fitted_exponent)


def test_constants_moderate_n():
    ctx = PrecisionContext(60)
    p = WeightParams("1.5", "0.8")
    est = extract_constants(range(20, 61, 4), p, ctx)
    d1, d2 = est.significant_digits(ctx)
    assert d1 >= 8 and d2 >= 6
    # t = 0 slice: C1 reduces to ln(2 pi) - lambda (1 + ln 6) / 2
    mp = ctx.mp
    c1 = C1_closed(p.with_t(0), ctx)
    assert abs(c1 - (mp.log(2 * mp.pi) - mp.mpf("1.5") * (1 + mp.log(6)) / 2)) < mp.mpf(10) ** -55


def test_lnD_and_p_series_consistent(base):
    # d/dt of each ln D coefficient is minus the p coefficient of the same power
    ctx = PrecisionContext(40)
    shared = [Fraction(3, 2), 1, Fraction(1, 2), 0, Fraction(-1, 2), -1]

    def coef(q, e, k=0):
        def f(u):
            c = PrecisionContext(u.context.dps)
            terms = expansion(q, base.with_t(u), c).coefficients.terms
            return sum((cc for ee, kk, cc in terms if ee == e and kk == k), c.mp.zero)
        return f

    p_t0 = {e: coef("p", e)(ctx.mpf(base.t)) for e in shared}
    for e in shared:
        d = fd_derivative(coef("lnD", e), base.t, 1, ctx)
        assert abs(d.value + p_t0[e]) < ctx.mpf(10) ** -25, e
    for e, k in ((2, 1), (1, 1), (0, 1), (2, 0)):  # log and leading terms do not move with t
        assert abs(fd_derivative(coef("lnD", e, k), base.t, 1, ctx).value) < ctx.mpf(10) ** -25


def test_x_series_halved_vs_alpha(base, ctx50):
    x = expansion("X", base, ctx50).coefficients.terms
    a = expansion("alpha", base, ctx50).coefficients.terms
    for (ex, _, cx), (ea, _, ca) in zip(x[:2], a[:2]):
        assert ex == ea and abs(cx / 2 - ca) < ctx50.mpf(10) ** -45
    # they part at n^(-1/2): 12 lambda against 12 (1 + lambda), i.e. by 1/(2 sqrt 6)
    mp = ctx50.mp
    assert x[2][0] == a[2][0] == Fraction(-1, 2)
    assert abs(a[2][2] - x[2][2] / 2 - 1 / (2 * mp.sqrt(6))) < mp.mpf(10) ** -45
