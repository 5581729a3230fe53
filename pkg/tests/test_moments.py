import pytest
from hypothesis import given, settings, strategies as st

from sclaguerre.exceptions import CrossCheckError, DomainError
from sclaguerre.moments import WeightParams, moment, moment_table
from sclaguerre.numerics import PrecisionContext, fd_derivative


def test_moment_examples(ctx50, unit):
    mp = ctx50.mp
    tol = mp.mpf(10) ** -48
    assert abs(moment(0, unit, ctx50) - mp.mpf(1) / 2) < tol
    assert abs(moment(1, unit, ctx50) - mp.sqrt(mp.pi) / 4) < tol
    assert abs(moment(2, unit, ctx50) - mp.mpf(1) / 2) < tol
    for j in range(3):
        assert abs(moment(j, unit, ctx50, "quadrature") - moment(j, unit, ctx50)) < ctx50.target_tol


def test_moment_errors(ctx50):
    with pytest.raises(DomainError):
        WeightParams(-1, 0)
    with pytest.raises(DomainError):
        moment(-1, WeightParams(1), ctx50)
    with pytest.raises(DomainError):
        moment(0, WeightParams(1), ctx50, "series")


def test_moments_only_range(ctx50):
    p = WeightParams("-0.5", "0.3")
    assert p.moments_only and moment(0, p, ctx50) > 0
    with pytest.raises(DomainError):
        p.require_positive_lambda()
    WeightParams("1e-30").require_positive_lambda()


def test_moment_table_examples(ctx50, unit, base):
    mp = ctx50.mp
    m = moment_table(2, unit, ctx50)
    assert [mp.nstr(v, 20) for v in m.values] == [mp.nstr(x, 20) for x in (0.5, mp.sqrt(mp.pi) / 4, 0.5)]
    for p in (unit, base, WeightParams("0.5", "-1.2")):
        m0 = moment_table(0, p, ctx50)
        assert m0.j_max == 0 and m0.values[0] > 0
    big = moment_table(80, base, ctx50)
    assert big.is_positive_definite(41, ctx50)


def test_formula_vs_quadrature_grid():
    ctx = PrecisionContext(40)
    for p in (WeightParams("1.5", "0.8"), WeightParams("0.5", "-1.2"), WeightParams(2, 0), WeightParams("-0.5", 2)):
        for j in (0, 1, 7, 30, 80):
            f, q = moment(j, p, ctx), moment(j, p, ctx, "quadrature")
            assert abs(f - q) <= ctx.target_tol * abs(f), (p, j)


def test_log_convexity(ctx50, base):
    mu = moment_table(60, base, ctx50).values
    for j in range(len(mu) - 2):
        assert mu[j + 1] ** 2 < mu[j] * mu[j + 2]
    ratios = [mu[j + 1] / mu[j] for j in range(len(mu) - 1)]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))


@settings(max_examples=10, deadline=None)
@given(lam=st.floats(0.05, 4), t=st.floats(-3, 3), j=st.integers(0, 20))
def test_t_derivative_shifts_index(lam, t, j):
    ctx = PrecisionContext(40)
    p = WeightParams(lam, t)

    def mu(u):
        c = PrecisionContext(u.context.dps)
        return moment(j, p.with_t(u), c)

    d = fd_derivative(mu, p.t, 1, ctx)
    target = moment(j + 1, p, ctx)
    assert abs(d.value - target) <= ctx.target_tol * abs(target)


def test_pearson_table_matches_formula():
    ctx = PrecisionContext(60)
    for p in (WeightParams("1.5", "0.8"), WeightParams("0.5", "-1.2")):
        rec = moment_table(240, p, ctx, method="pearson")
        for j in (2, 101, 240):
            exact = moment(j, p, ctx)
            assert abs(rec.values[j] - exact) <= ctx.target_tol * exact


def test_spot_check_failure_is_loud(monkeypatch, ctx50, base):
    import sclaguerre.moments as mod

    real = mod._formula

    def broken(j, params, ctx):
        a, b = real(j, params, ctx)
        return (a * (1 + ctx.mpf("1e-10")), b) if j == 5 else (a, b)

    monkeypatch.setattr(mod, "_formula", broken)
    mod._moment_cached.cache_clear()
    try:
        with pytest.raises(CrossCheckError, match="j=5"):
            moment_table(5, base, PrecisionContext(44), spot_check=1.0)
    finally:
        monkeypatch.undo()
        mod._moment_cached.cache_clear()


def test_hankel_matrix_bounds(ctx50, base):
    with pytest.raises(DomainError):
        moment_table(4, base, ctx50).hankel_matrix(4, ctx50)
