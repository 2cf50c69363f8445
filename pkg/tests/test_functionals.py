import math

import numpy as np
import pytest

from Wave.core.elliptic import Modulus
from Wave.core.functionals import (
    GaugeErrorRecord,
    conserved_set,
    convergence_row,
    convergence_study,
    gauge_error,
    gauge_error_study,
    gauge_phase,
    gauge_transform,
    h_m_norm,
    legendre_G,
    mass_angle,
    mass_prefactor,
    massless_tail_mass,
    mean_zero_primitive,
    quadrature_mass,
    soliton_mass,
    soliton_tail_mass,
    torus_mass_closed,
    uniform_bound,
)
from Wave.core.params import make_context, solve_eta3
from Wave.core.profiles import (
    GridConsistencyError,
    GridFunction,
    SolitonProfile,
    sample_grid,
    sample_soliton,
    sample_torus,
    sample_traveling_wave,
    snap_speed,
    soliton_carrier_eval,
    soliton_eval,
    torus_profile_eval,
)

CONTEXTS = [(1.0, 0.0), (1.0, 1.0), (1.0, -1.0), (4.0, 2.0), (1.0, 2.0)]


def test_legendre_G_endpoint():
    assert legendre_G(0.5 * math.pi, Modulus.from_k(1.0 / math.sqrt(2.0))) == pytest.approx(0.5 * math.pi, abs=1e-12)
    assert legendre_G(0.0, 0.5) == 0.0


@pytest.mark.parametrize("k", [0.1, 0.5, 0.9, 0.999])
def test_legendre_G_endpoint_any_modulus(k):
    assert legendre_G(0.5 * math.pi, k) == pytest.approx(0.5 * math.pi, abs=1e-12)


@pytest.mark.parametrize("omega,c", CONTEXTS)
@pytest.mark.parametrize("L", [5.0, 10.0, 25.0])
def test_closed_mass_matches_quadrature(omega, c, L):
    p = solve_eta3(make_context(omega, c), L)
    closed = torus_mass_closed(p)
    quad = quadrature_mass(sample_torus(p, 2048))
    assert abs(closed - quad) / closed <= 1e-9


def test_mass_prefactor_and_angle_limits(generic_ctx):
    p = solve_eta3(generic_ctx, 40.0)
    assert mass_prefactor(p) == pytest.approx(8.0, rel=1e-6)
    assert mass_angle(p) == pytest.approx(0.25 * math.pi, rel=1e-6)


def test_quadrature_mass_requires_grid():
    with pytest.raises(GridConsistencyError):
        quadrature_mass(np.ones(16))


def test_soliton_mass_values(generic_ctx, massless_ctx):
    assert soliton_mass(generic_ctx) == pytest.approx(2.0 * math.pi, rel=1e-15)
    assert soliton_mass(massless_ctx) == pytest.approx(4.0 * math.pi, rel=1e-15)
    # c → 2√ω 时连续地趋于 4π
    near = make_context(1.0, 2.0 - 1e-9)
    assert soliton_mass(near) == pytest.approx(4.0 * math.pi, abs=1e-3)


@pytest.mark.parametrize("omega,c", [(1.0, 0.0), (1.0, 1.0), (1.0, -1.0), (4.0, 2.0)])
def test_soliton_mass_matches_quadrature(omega, c):
    ctx = make_context(omega, c)
    grid = sample_soliton(SolitonProfile.for_context(ctx), 30.0, 8192)
    assert quadrature_mass(grid) == pytest.approx(soliton_mass(ctx), rel=1e-10)


@pytest.mark.parametrize("L", [5.0, 20.0, 100.0])
def test_massless_tail_mass_closed_form(massless_ctx, L):
    assert soliton_tail_mass(massless_ctx, L) == pytest.approx(massless_tail_mass(massless_ctx, L), rel=1e-6)


@pytest.mark.parametrize("L", [10.0, 50.0])
def test_long_period_mass_limits(generic_ctx, L):
    p = solve_eta3(generic_ctx, L)
    assert abs(torus_mass_closed(p) - 2.0 * math.pi) < 5e-3


def test_massless_mass_gap_tracks_tail(massless_ctx):
    for L in (20.0, 50.0):
        p = solve_eta3(massless_ctx, L)
        gap = abs(torus_mass_closed(p) - soliton_mass(massless_ctx))
        tail = massless_tail_mass(massless_ctx, L)
        assert 0.5 <= gap / tail <= 2.0


def test_conserved_set_of_zero_wave(generic_ctx):
    zero = GridFunction(np.zeros(64, dtype=complex), 5.0)
    values = conserved_set(zero, generic_ctx)
    assert values.mass == 0.0
    assert values.energy == 0.0
    assert values.momentum == 0.0
    assert values.action == 0.0


def test_conserved_set_requires_complex(generic_profile, generic_ctx):
    with pytest.raises(TypeError):
        conserved_set(sample_torus(generic_profile, 256), generic_ctx)


def test_conserved_set_plane_wave(generic_ctx):
    # u = a·e^{ikx}：M = 2La²，P = −2Lka² + (L/2)a⁴
    L, a, k = math.pi, 0.5, 3.0
    grid = sample_grid(lambda x: a * np.exp(1j * k * x), L, 64)
    values = conserved_set(grid, generic_ctx)
    assert values.mass == pytest.approx(2.0 * L * a * a, rel=1e-13)
    assert values.momentum == pytest.approx(-2.0 * L * k * a * a + 0.5 * L * a ** 4, rel=1e-12)
    energy = L * k * k * a * a - 2.0 * L * a ** 6 / 32.0
    assert values.energy == pytest.approx(energy, rel=1e-12)
    assert values.action == pytest.approx(values.energy + 0.5 * values.mass, rel=1e-13)


def test_conserved_set_is_time_invariant():
    L = 10.0
    c_L = snap_speed(1.0, L)
    ctx = make_context(1.0, c_L)
    p = solve_eta3(ctx, L)
    first = conserved_set(sample_traveling_wave(p, c_L, 0.0, 1024), ctx)
    later = conserved_set(sample_traveling_wave(p, c_L, 1.3, 1024), ctx)
    assert later.mass == pytest.approx(first.mass, rel=1e-10)
    assert later.energy == pytest.approx(first.energy, rel=1e-8, abs=1e-10)
    assert later.momentum == pytest.approx(first.momentum, rel=1e-8, abs=1e-10)
    assert first.mass == pytest.approx(torus_mass_closed(p), rel=1e-9)


def test_h_m_norm_of_trigonometric():
    L = math.pi
    grid = sample_grid(lambda x: np.sin(2.0 * x), L, 64)
    # ‖sin 2x‖² = π，‖(sin 2x)′‖² = 4π
    assert h_m_norm(grid, 0) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert h_m_norm(grid, 1) == pytest.approx(math.sqrt(5.0 * math.pi), rel=1e-13)
    with pytest.raises(ValueError):
        h_m_norm(grid, 5)


def test_convergence_row_error_for_short_period(generic_ctx):
    row = convergence_row(generic_ctx, 1.0, 3, n=256)
    assert row.error is not None
    assert math.isnan(row.mass_gap)
    assert len(row.h_m_gaps) == 4
    assert len(row.sup_gaps) == 3


def test_convergence_study_rejects_bad_arguments(generic_ctx):
    with pytest.raises(ValueError):
        convergence_study(generic_ctx, [5.0], 4)
    with pytest.raises(ValueError):
        convergence_study(generic_ctx, [5.0], 2, jobs=0)


def _assert_decreasing(values, floor):
    for prev, nxt in zip(values, values[1:]):
        assert nxt < prev or nxt <= floor


@pytest.mark.parametrize("omega,c", [(1.0, 0.0), (1.0, 2.0)])
def test_convergence_gaps_decrease(omega, c):
    ctx = make_context(omega, c)
    rows = convergence_study(ctx, [5.0, 10.0, 20.0, 40.0], 3, n=2048)
    assert all(row.error is None for row in rows)
    _assert_decreasing([row.mass_gap for row in rows], 1e-11)
    for m in range(4):
        _assert_decreasing([row.h_m_gaps[m] for row in rows], 1e-11)
    for m in range(3):
        _assert_decreasing([row.sup_gaps[m] for row in rows], 1e-11)
    for j in range(3):
        _assert_decreasing([row.pointwise_gaps[j] for row in rows], 1e-11)


def test_convergence_study_parallel_matches_serial(generic_ctx):
    L_list = [5.0, 10.0, 20.0]
    serial = convergence_study(generic_ctx, L_list, 2, n=512)
    parallel = convergence_study(generic_ctx, L_list, 2, n=512, jobs=3)
    assert [row.L for row in parallel] == L_list
    for a, b in zip(serial, parallel):
        assert a == b


def test_uniform_bound_skips_error_rows(generic_ctx):
    rows = convergence_study(generic_ctx, [1.0, 5.0, 10.0], 1, n=512)
    assert rows[0].error is not None
    bound = uniform_bound(rows, 1)
    assert bound == max(rows[1].h_m_norms[1], rows[2].h_m_norms[1])
    with pytest.raises(ValueError):
        uniform_bound(rows[:1], 0)


def test_mean_zero_primitive_of_cosine():
    grid = sample_grid(lambda x: 1.0 + np.cos(3.0 * x), math.pi, 64)
    primitive = mean_zero_primitive(grid)
    np.testing.assert_allclose(primitive.samples, np.sin(3.0 * grid.x) / 3.0, atol=1e-14)
    assert abs(np.mean(primitive.samples)) < 1e-15


def test_gauge_transform_preserves_modulus(generic_profile):
    u = sample_traveling_wave(generic_profile, 0.0, 0.0, 512)
    gauged = gauge_transform(u, -0.25)
    np.testing.assert_allclose(np.abs(gauged.samples), np.abs(u.samples), rtol=1e-14)
    assert gauge_phase(u).half_length == u.half_length


def test_gauge_error_validation(generic_profile):
    real = sample_torus(generic_profile, 256)
    with pytest.raises(TypeError):
        gauge_error(real, generic_profile.L)
    complex_grid = GridFunction(real.samples.astype(complex), real.half_length)
    with pytest.raises(GridConsistencyError):
        gauge_error(complex_grid, 2.0 * generic_profile.L)


def test_gauge_error_decreases(generic_ctx):
    records = gauge_error_study(generic_ctx, [5.0, 10.0, 20.0, 40.0], n=2048)
    assert all(isinstance(record, GaugeErrorRecord) for record in records)
    norms = [record.e_norms[0] for record in records]
    assert all(b < a for a, b in zip(norms, norms[1:]))
    assert [record.L for record in records] == [5.0, 10.0, 20.0, 40.0]


def test_gauge_error_of_zero_field():
    zero = GridFunction(np.zeros(64, dtype=complex), 5.0)
    record = gauge_error(zero, 5.0)
    assert record == GaugeErrorRecord(mu=0.0, psi_v=0.0, e_norms=(0.0, 0.0, 0.0), L=5.0)


def test_pointwise_gaps_compare_carriers():
    ctx = make_context(1.0, 1.0)
    xs = (0.0, 1.0, 2.0)
    row = convergence_row(ctx, 10.0, 1, n=512, pointwise_x=xs)
    p = solve_eta3(ctx, 10.0)
    sol = SolitonProfile.for_context(ctx)
    for x, gap in zip(xs, row.pointwise_gaps):
        assert isinstance(gap, float)
        assert gap == pytest.approx(abs(torus_profile_eval(p, x) - soliton_eval(sol, x)), abs=1e-15)
        phi = soliton_carrier_eval(sol, x)
        assert phi == pytest.approx(np.exp(0.5j * x) * soliton_eval(sol, x), abs=1e-15)
