import pytest

from sclaguerre.exceptions import DomainError
from sclaguerre.identities import (IDENTITIES, _derivs, _guard_pole, beta_reconstruction_residual, chazy_residual,
                                   identity_reports, ode_residual, p_difference_residual, p_form_residual,
                                   painleve4_residual, pnt_residual, riccati_residual, sigma_continuous_residual,
                                   sigma_discrete_residual, sigma_triple, toda_and_H_residual)
from sclaguerre.moments import WeightParams
from sclaguerre.numerics import PrecisionContext
from sclaguerre.opcore import recurrence_table


@pytest.fixture(scope="module")
def c60():
    return PrecisionContext(60, fd_step="1e-12")


def test_ode_n0_is_exact(ctx50, base):
    tb = recurrence_table(2, base, ctx50)
    assert ode_residual(tb, 0, ["0.5", "1", "3"]) == 0


def test_ode_examples(unit, base):
    ctx = PrecisionContext(60)
    tb = recurrence_table(3, unit, ctx)
    assert ode_residual(tb, 1, ["0.5", "1", "2"]) < ctx.mpf(10) ** (-60 + 30)
    tb = recurrence_table(11, base, ctx)
    assert ode_residual(tb, 10, [ctx.mpf(k) / 4 for k in range(1, 17)]) < ctx.mpf(10) ** (-60 + 40)


def test_ode_pole_is_refused(ctx50, base):
    tb = recurrence_table(3, base, ctx50)
    with pytest.raises(DomainError):
        ode_residual(tb, 2, [0])
    lam, t = base.values(ctx50)
    with pytest.raises(DomainError):
        ode_residual(tb, 2, [(t - 2 * tb.alpha[2]) / 2])
    with pytest.raises(DomainError):
        _guard_pole(ctx50.mpf("1e-20"), ctx50, "R_n")


def test_riccati_n0(unit, c60):
    (r1, r2) = riccati_residual(0, unit, c60)
    assert r1 == 0
    assert r2 < c60.mpf("1e-40")
    mp = c60.mp
    d = _derivs(lambda tb, c: 2 * tb.alpha[0] - c.mpf(tb.params.t), 0, unit, c60)
    assert abs(d.d1 - (1 - mp.pi / 2)) < c60.mpf("1e-40")


def test_riccati_n7(base, c60):
    r1, r2 = riccati_residual(7, base, c60)
    assert r1 < 1e-20 and r2 < 1e-20


def test_painleve4_both_parametrisations(base, c60):
    for variant in ("s", "t"):
        assert painleve4_residual(5, base, c60, variant) < 1e-18
    with pytest.raises(DomainError):
        painleve4_residual(5, base, c60, "x")


def test_painleve4_variants_share_q(base, ctx50):
    # 2 alpha_n - 2s with s = t/2 is exactly 2 alpha_n - t = R_n
    tb = recurrence_table(6, base, ctx50)
    lam, t = base.values(ctx50)
    s = t / 2
    assert 2 * tb.alpha[5] - 2 * s == 2 * tb.alpha[5] - t


def test_chazy_at_t0_reduces(c60):
    # with t = 0 the right side vanishes, so the left bracket alone is zero
    p = WeightParams("1.5", 0)
    lam = c60.mpf("1.5")
    for n in range(0, 11, 2):
        d = _derivs(lambda tb, c: tb.beta[n], n, p, c60)
        b = d.value
        lhs = 2 * d.d2 + 12 * b * b - 4 * (2 * n + lam) * b + n * (n + lam)
        assert abs(lhs) < c60.mpf("1e-30") * max(1, n * n)


def test_chazy_n4(base, c60):
    bde, ce = chazy_residual(4, base, c60)
    assert bde < 1e-18 and ce < 1e-18


def test_sigma_continuous(base, c60):
    # sigma_0 is linear in t: the residual is the fd roundoff floor
    assert sigma_continuous_residual(0, base, c60) < 1e-100
    assert sigma_continuous_residual(6, base, c60) < 1e-18
    assert p_form_residual(6, base, c60) < 1e-18


def test_sigma_discrete_property():
    ctx = PrecisionContext(100)
    for p in (WeightParams("1.5", "0.8"), WeightParams("1.5", 0)):
        tb = recurrence_table(25, p, ctx)
        floor = ctx.mpf(10) ** (-100 + 40)
        for n in range(1, 25):
            assert sigma_discrete_residual(sigma_triple(tb, n), n, p, ctx) < floor
            assert beta_reconstruction_residual(tb, n) < floor
            assert p_difference_residual(tb, n) < floor
            assert pnt_residual(tb, n) < floor
        with pytest.raises(DomainError):
            sigma_triple(tb, 25)


def test_toda_closed_forms(unit, c60):
    mp = c60.mp
    d = _derivs(lambda tb, c: tb.lnD[1], 1, unit, c60)
    assert abs(d.d2 - (1 - mp.pi / 4)) < c60.mpf("1e-40")
    assert abs(d.d1 - mp.sqrt(mp.pi) / 2) < c60.mpf("1e-40")
    rt, rh = toda_and_H_residual(1, unit, c60)
    assert rt < 1e-40 and rh < 1e-40
    with pytest.raises(DomainError):
        toda_and_H_residual(0, unit, c60)


def test_toda_n12(base, c60):
    rt, rh = toda_and_H_residual(12, base, c60)
    assert rt < 1e-18 and rh < 1e-18


def test_residual_shrinks_with_fd_step(base):
    big = PrecisionContext(50, fd_step="1e-1")
    small = PrecisionContext(50, fd_step="1e-2")
    r_big = max(riccati_residual(3, base, big))
    r_small = max(riccati_residual(3, base, small))
    # 3 Richardson levels leave an h^8 error; demand at least order 7
    assert r_small < r_big * 1e-7, (r_big, r_small)


def test_reports_invariant_under_stieltjes(base):
    ctx = PrecisionContext(45, fd_step="1e-10")
    for name in IDENTITIES:
        for n in (1, 4):
            h = identity_reports(name, n, base, ctx)
            s = identity_reports(name, n, base, ctx, mode="stieltjes")
            assert [r.identity_name for r in h] == [r.identity_name for r in s]
            assert all(r.passed for r in h + s), name


def test_report_fields(base, ctx50):
    rep = identity_reports("discrete-system", 3, base, ctx50)
    assert [r.identity_name for r in rep] == ["residual_a", "residual_b"]
    assert all(r.passed and r.n == 3 and r.params == base for r in rep)
    loose = identity_reports("discrete-system", 3, base, ctx50, tol="1e-300")
    assert not all(r.passed for r in loose) or all(r.residual == 0 for r in loose)
    with pytest.raises(DomainError):
        identity_reports("nonsense", 1, base, ctx50)
