import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from Wave.core.elliptic import complete_K
from Wave.core.params import (
    AdmissibilityError,
    EtaRangeError,
    PeriodBoundError,
    beta0,
    beta1,
    discriminant,
    ellipse_residual,
    f_s,
    gamma_a,
    gamma_f,
    h_bound,
    k_sq_normalized,
    long_period_limits,
    make_context,
    massless_safe_k_sq,
    modulus_slope,
    normalized_modulus,
    period_from_eta2,
    period_from_eta3,
    period_normalized,
    period_slope_sign,
    profile_from_eta2,
    profile_from_eta3,
    roots_from_eta3,
    shape_from_eta3,
    solve_eta3,
    vieta_residuals,
    xi_normalized,
)

CONTEXTS = [(1.0, 0.0), (1.0, 1.0), (1.0, -1.0), (4.0, 2.0), (1.0, 2.0)]


@pytest.mark.parametrize("omega,c", [(0.0, 0.0), (-1.0, 0.0), (1.0, 3.0), (1.0, -2.0), (math.nan, 0.0)])
def test_make_context_rejects_inadmissible(omega, c):
    with pytest.raises(AdmissibilityError):
        make_context(omega, c)


def test_generic_context_constants(generic_ctx):
    assert generic_ctx.L0 == pytest.approx(0.5 * math.pi, rel=1e-15)
    assert generic_ctx.alpha0 == pytest.approx(4.0 / math.sqrt(3.0), rel=1e-15)
    assert generic_ctx.alpha1 == 4.0
    assert generic_ctx.s == 0.0
    assert not generic_ctx.is_massless


def test_massless_context_constants(massless_ctx):
    assert massless_ctx.is_massless
    assert massless_ctx.s == 1.0
    assert massless_ctx.decay_sq == 0.0
    assert massless_ctx.alpha1 == 8.0
    assert massless_ctx.alpha0 == pytest.approx(16.0 / 3.0, rel=1e-15)


@pytest.mark.parametrize("omega,c", CONTEXTS)
def test_alpha_are_roots(omega, c):
    ctx = make_context(omega, c)
    assert ctx.alpha0 < ctx.alpha1
    # α₀ 是 3η² − 8cη − 16ω + 4c² 的正根；η₃ = α₁ 时 η₂ = 0，√A = α₁ − 4c
    assert 3.0 * ctx.alpha0 ** 2 - 8.0 * c * ctx.alpha0 - 16.0 * ctx.omega_eff + 4.0 * c * c == \
        pytest.approx(0.0, abs=1e-12 * ctx.alpha1 ** 2)
    assert discriminant(ctx, ctx.alpha1) == pytest.approx((ctx.alpha1 - 4.0 * c) ** 2, abs=1e-12 * ctx.alpha1 ** 2)


@pytest.mark.parametrize("omega,c", CONTEXTS)
@pytest.mark.parametrize("t", [0.01, 0.3, 0.7, 0.99])
def test_roots_satisfy_vieta(omega, c, t):
    ctx = make_context(omega, c)
    eta3 = ctx.alpha0 + t * (ctx.alpha1 - ctx.alpha0)
    p = profile_from_eta3(ctx, eta3)
    assert p.eta1 < 0.0 < p.eta2 < p.eta3
    assert max(vieta_residuals(p)) <= 1e-10
    assert 0.0 < p.k.k < 1.0
    assert p.beta_sq > 0.0


def test_roots_reject_out_of_range(generic_ctx):
    with pytest.raises(EtaRangeError):
        roots_from_eta3(generic_ctx, generic_ctx.alpha0)
    with pytest.raises(EtaRangeError):
        roots_from_eta3(generic_ctx, generic_ctx.alpha1)
    with pytest.raises(EtaRangeError):
        profile_from_eta2(generic_ctx, 0.0)


def test_trough_vanishes_at_upper_endpoint(generic_ctx):
    eta1, eta2, _ = roots_from_eta3(generic_ctx, generic_ctx.alpha1 * (1.0 - 1e-12))
    assert 0.0 < eta2 < 1e-10
    assert eta1 == pytest.approx(-4.0, rel=1e-9)


@pytest.mark.parametrize("omega,c", CONTEXTS)
@pytest.mark.parametrize("t", [0.05, 0.5, 0.95])
def test_eta2_and_eta3_parametrizations_agree(omega, c, t):
    ctx = make_context(omega, c)
    eta3 = ctx.alpha0 + t * (ctx.alpha1 - ctx.alpha0)
    p = profile_from_eta3(ctx, eta3)
    q = profile_from_eta2(ctx, p.eta2)
    assert q.eta3 == pytest.approx(p.eta3, rel=1e-10)
    assert q.T == pytest.approx(p.T, rel=1e-10)
    assert q.k.k == pytest.approx(p.k.k, rel=1e-9)
    assert period_from_eta2(ctx, p.eta2) == pytest.approx(period_from_eta3(ctx, eta3), rel=1e-10)


def test_period_increases_with_peak(generic_ctx):
    ctx = generic_ctx
    etas = [ctx.alpha0 + t * (ctx.alpha1 - ctx.alpha0) for t in (0.001, 0.1, 0.5, 0.9, 0.999)]
    periods = [period_from_eta3(ctx, eta) for eta in etas]
    assert periods == sorted(periods)
    assert periods[0] > ctx.T0


@pytest.mark.parametrize("omega,c", CONTEXTS)
@pytest.mark.parametrize("factor", [1.01, 1.5, 3.0])
def test_solve_round_trip(omega, c, factor):
    ctx = make_context(omega, c)
    L = factor * ctx.L0
    p = solve_eta3(ctx, L)
    assert abs(p.T - 2.0 * L) <= 1e-12 * 2.0 * L
    assert p.L == pytest.approx(L, rel=1e-12)
    assert max(vieta_residuals(p)) <= 1e-10


@pytest.mark.parametrize("L", [1.7, 2.5, 3.5, 5.0])
def test_solve_inverts_period_map(generic_ctx, L):
    p = solve_eta3(generic_ctx, L)
    assert period_from_eta3(generic_ctx, p.eta3) == pytest.approx(2.0 * L, rel=1e-11)


@pytest.mark.parametrize("L", [10.0, 50.0, 200.0])
def test_solve_long_periods(generic_ctx, massless_ctx, L):
    for ctx in (generic_ctx, massless_ctx):
        p = solve_eta3(ctx, L)
        assert abs(p.T - 2.0 * L) <= 1e-12 * 2.0 * L
        assert ctx.alpha0 < p.eta3 <= ctx.alpha1


def test_solve_rejects_short_period(generic_ctx):
    with pytest.raises(PeriodBoundError) as excinfo:
        solve_eta3(generic_ctx, 1.0)
    assert excinfo.value.L0 == pytest.approx(0.5 * math.pi)
    with pytest.raises(PeriodBoundError):
        solve_eta3(generic_ctx, generic_ctx.L0)


def test_solve_rejects_unrepresentable_period(generic_ctx):
    # η₂ ~ e^{−L}，L 达到数百时低于 binary64 下限
    with pytest.raises(EtaRangeError):
        solve_eta3(generic_ctx, 2000.0)


def test_solve_brackets_near_trough_floor(generic_ctx):
    # 谷值约 1e−260，扩展步会越过下限，须截断而非报错
    p = solve_eta3(generic_ctx, 300.0)
    assert 0.0 < p.eta2 < 1e-200
    assert abs(p.T - 600.0) <= 1e-13 * 600.0


def test_shape_matches_period(generic_ctx):
    eta3 = 3.0
    modulus, g, beta_sq = shape_from_eta3(generic_ctx, eta3)
    assert period_from_eta3(generic_ctx, eta3) == pytest.approx(4.0 * g * complete_K(modulus), rel=1e-15)
    assert beta_sq > 0.0


def test_massless_safe_k_sq_limit():
    k_sq, kp_sq = massless_safe_k_sq(2.0 - 1e-14)
    assert k_sq + kp_sq == pytest.approx(1.0, abs=1e-15)
    assert k_sq == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("omega,c", [(1.0, 0.0), (1.0, 1.0), (1.0, -1.0)])
def test_long_period_modulus_limit(omega, c):
    ctx = make_context(omega, c)
    limits = long_period_limits(ctx)
    p = solve_eta3(ctx, 50.0)
    assert p.k.k == pytest.approx(limits.k_lim, abs=1e-2)
    assert p.beta_sq == pytest.approx(limits.beta_sq_lim, rel=1e-2)
    assert p.eta1 == pytest.approx(limits.eta1_lim, rel=1e-6)


def test_long_period_limits_generic(generic_ctx):
    limits = long_period_limits(generic_ctx)
    assert limits.k_lim == 1.0
    assert limits.beta_sq_lim == pytest.approx(1.0)
    assert limits.mu1 == pytest.approx(0.25 * math.pi)
    assert limits.soliton_mass == pytest.approx(2.0 * math.pi)
    assert limits.inv_two_g_lim == pytest.approx(1.0)
    assert not limits.beta_sq_unbounded


def test_long_period_limits_massless(massless_ctx):
    limits = long_period_limits(massless_ctx)
    assert limits.beta_sq_unbounded
    assert limits.beta_sq_lim is None
    assert limits.k_lim == pytest.approx(1.0 / math.sqrt(2.0))
    assert limits.soliton_mass == pytest.approx(4.0 * math.pi)
    p = solve_eta3(massless_ctx, 50.0)
    assert p.k.k == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-3)


s_values = st.floats(min_value=-0.9, max_value=0.9)
t_values = st.floats(min_value=0.01, max_value=0.99)


@given(s_values, t_values)
def test_normalized_trough_lies_on_ellipse(s, t):
    eta = beta0(s) + t * (beta1(s) - beta0(s))
    xi = xi_normalized(s, eta)
    assert 0.0 < xi < eta
    assert ellipse_residual(s, xi, eta) == pytest.approx(0.0, abs=1e-12)


@given(s_values, t_values)
def test_normalized_modulus_matches_direct_formula(s, t):
    eta = beta0(s) + t * (beta1(s) - beta0(s))
    assert normalized_modulus(s, eta).k_sq == pytest.approx(k_sq_normalized(s, eta), abs=1e-10)


@given(s_values, t_values)
def test_modulus_slope_positive_and_matches_difference(s, t):
    lo, hi = beta0(s), beta1(s)
    eta = lo + t * (hi - lo)
    step = 1e-6 * (hi - lo)
    slope = modulus_slope(s, eta)
    fd = (normalized_modulus(s, eta + step).k_sq - normalized_modulus(s, eta - step).k_sq) / (2.0 * step)
    assert slope > 0.0
    assert abs(slope - fd) <= 1e-6 * max(1.0, slope)


@given(s_values, t_values)
def test_period_slope_is_positive(s, t):
    eta = beta0(s) + t * (beta1(s) - beta0(s))
    assert period_slope_sign(s, eta) == 1


@pytest.mark.parametrize("omega,c", [(1.0, 0.0), (1.0, 1.0), (4.0, 2.0)])
def test_period_normalized_scales_with_frequency(omega, c):
    ctx = make_context(omega, c)
    eta3 = 0.5 * (ctx.alpha0 + ctx.alpha1)
    eta = eta3 / (4.0 * ctx.sqrt_omega)
    assert period_normalized(ctx.s, eta) == pytest.approx(ctx.sqrt_omega * period_from_eta3(ctx, eta3), rel=1e-12)


def test_normalized_helpers_reject_bad_arguments():
    with pytest.raises(AdmissibilityError):
        modulus_slope(1.5, 1.0)
    with pytest.raises(EtaRangeError):
        modulus_slope(0.0, beta1(0.0))


@pytest.mark.parametrize("s", [-0.9, -0.3, 0.0, 0.4, 0.9, 1.0])
def test_normalized_zeros(s):
    assert f_s(s, gamma_f(s)) == pytest.approx(0.0, abs=1e-12)
    assert -3.0 * gamma_a(s) ** 2 + 3.0 * s * gamma_a(s) + 2.0 == pytest.approx(0.0, abs=1e-12)
    assert beta0(s) < beta1(s) <= gamma_f(s)
    assert h_bound(s) > 0.0


def test_h_bound_values_and_growth():
    assert h_bound(0.0) == pytest.approx(4.0, abs=1e-14)
    assert h_bound(-1.0) == pytest.approx(0.0, abs=1e-15)
    values = [h_bound(s) for s in np.linspace(-1.0, 0.0, 101)]
    assert all(b > a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("t", np.linspace(0.01, 0.99, 25))
def test_period_slope_positive_on_massless_endpoint(t):
    # s = 1：η ∈ (β₀, 2) = (4/3, 2)
    eta = beta0(1.0) + t * (beta1(1.0) - beta0(1.0))
    assert beta1(1.0) == 2.0
    assert modulus_slope(1.0, eta) > 0.0
    assert period_slope_sign(1.0, eta) == 1


def test_period_matches_direct_quadrature(generic_ctx):
    eta3 = 0.5 * (generic_ctx.alpha0 + generic_ctx.alpha1)
    eta1, eta2, _ = roots_from_eta3(generic_ctx, eta3)

    # t = η₂ + (η₃ − η₂)sin²θ 消去两端的平方根奇点
    def integrand(theta):
        t = eta2 + (eta3 - eta2) * math.sin(theta) ** 2
        return 2.0 / math.sqrt(t * (t - eta1))

    value, _ = integrate.quad(integrand, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=1e-13)
    assert period_from_eta3(generic_ctx, eta3) == pytest.approx(4.0 * value, rel=1e-8)
