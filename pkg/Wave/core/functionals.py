"""
泛函与收敛研究模块

守恒量、环面质量闭式、孤立子质量、长周期收敛研究与规范误差。

主要功能:
- 质量闭式 4gη₃√((k²+β²)/((1+β²)β²))·G(μ,k) 与梯形求积对照
- 守恒量 (能量、质量、动量) 与作用量 S = E + (ω/2)M + (c/2)P
- 长周期收敛研究：质量差、H^m 与 C^m 范数差、逐点差
- 规范变换 𝒢_a 与周期误差项 e_L 的范数
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .elliptic import ModulusLike, as_modulus, complete_E, complete_K, incomplete_E, incomplete_F
from .params import EtaRangeError, PeriodBoundError, TorusProfile, WaveContext, make_context, solve_eta3
from .profiles import (
    DEFAULT_GRID_SIZE,
    GridConsistencyError,
    GridFunction,
    SolitonProfile,
    carrier_eval,
    derivative_grid,
    ode_residual,
    sample_torus,
    sample_traveling_wave,
    snap_speed,
    soliton_carrier_eval,
    soliton_derivatives,
    soliton_psi,
)


logger = logging.getLogger(__name__)

# H^m 比较最高阶数，C^m 最高阶数
MAX_SOBOLEV_ORDER = 3
MAX_UNIFORM_ORDER = 2
DEFAULT_POINTWISE_X = (0.0, 1.0, 2.0)


@dataclass(frozen=True)
class ConservedSet:
    """能量、质量、动量与作用量"""

    mass: float
    energy: float
    momentum: float
    action: float


@dataclass(frozen=True)
class ConvergenceRow:
    """
    长周期研究中的一行

    error 非空时该行的数值列均为 NaN。
    """

    L: float
    eta3: float
    k: float
    mass_torus: float
    mass_gap: float
    h_m_gaps: Tuple[float, ...]
    sup_gaps: Tuple[float, ...]
    ode_residual: float
    pointwise_gaps: Tuple[float, ...]
    h_m_norms: Tuple[float, ...]
    n: int
    error: Optional[str] = None


@dataclass(frozen=True)
class GaugeErrorRecord:
    """规范误差：μ = (1/2L)‖v‖²，标量 ψ(v)，‖e_L‖ 的 H^0..H^2 范数"""

    mu: float
    psi_v: float
    e_norms: Tuple[float, ...]
    L: float = math.nan


# ===== 质量闭式 =====

def legendre_G(mu: float, k: ModulusLike) -> float:
    """
    G(μ, k) = K(k)E(μ,k′) − K(k)F(μ,k′) + E(k)F(μ,k′)

    μ = π/2 时 G 退化为 Legendre 关系左端，恒等于 π/2。
    """
    m = as_modulus(k)
    comp = m.complement()
    big_k = complete_K(m)
    f_mu = incomplete_F(mu, comp)
    return big_k * incomplete_E(mu, comp) - big_k * f_mu + complete_E(m) * f_mu


def mass_prefactor(p: TorusProfile) -> float:
    """4gη₃√((k²+β²)/((1+β²)β²))，长周期极限为 8"""
    b2 = p.beta_sq
    return 4.0 * p.g * p.eta3 * math.sqrt((p.k.k_sq + b2) / ((1.0 + b2) * b2))


def mass_angle(p: TorusProfile) -> float:
    """μ = sin⁻¹√(β²/(β²+k²))，用 atan2(β, k) 求值以免在 π/2 附近失去精度"""
    return math.atan2(math.sqrt(p.beta_sq), p.k.k)


def torus_mass_closed(p: TorusProfile) -> float:
    """
    ‖Φ^L‖²_{L²([−L,L])} 的闭式

    Args:
        p: 周期剖面参数束

    Returns:
        环面上的质量
    """
    return mass_prefactor(p) * legendre_G(mass_angle(p), p.k)


def quadrature_mass(grid: GridFunction) -> float:
    """周期网格上 |Φ|² 的梯形和"""
    if not isinstance(grid, GridFunction):
        raise GridConsistencyError("quadrature_mass 需要 GridFunction")
    return float(np.sum(np.abs(grid.samples) ** 2) * grid.spacing)


def soliton_mass(ctx: WaveContext) -> float:
    """
    8·tan⁻¹√((2√ω+c)/(2√ω−c))，无质量端点直接返回 4π

    (2√ω+c)/(2√ω−c) 写成 (1+s)/(1−s)，以 atan2 求值。
    """
    if ctx.is_massless:
        return 4.0 * math.pi
    return 8.0 * math.atan2(math.sqrt(1.0 + ctx.s), math.sqrt(1.0 - ctx.s))


def soliton_tail_mass(ctx: WaveContext, L: float) -> float:
    """
    孤立子在 |x| > L 上的质量 2∫_L^∞ Φ² dx

    自适应 Gauss–Kronrod 求积，作为无质量情形质量差的对照。
    """
    sol = SolitonProfile.for_context(ctx)
    value, abserr = integrate.quad(lambda x: soliton_psi(sol, x), L, np.inf, limit=200)
    logger.debug("孤立子尾部质量 L=%r: %r (误差估计 %g)", L, value, abserr)
    return 2.0 * value


def massless_tail_mass(ctx: WaveContext, L: float) -> float:
    """无质量孤立子尾部质量的闭式 8(π/2 − tan⁻¹ cL)"""
    return 8.0 * (0.5 * math.pi - math.atan(ctx.c * L))


# ===== 守恒量 =====

def _integrate(values: np.ndarray, spacing: float) -> float:
    return float(np.sum(values) * spacing)


def conserved_set(grid: GridFunction, ctx: WaveContext) -> ConservedSet:
    """
    周期网格上的守恒量

    E = ½‖∂ₓu‖² − (1/32)‖u‖⁶_{L⁶}
    M = ‖u‖²
    P = Re∫i∂ₓu·ū + ¼‖u‖⁴_{L⁴}

    Raises:
        TypeError: 网格为实值
    """
    if not grid.is_complex:
        raise TypeError("conserved_set 需要复值网格 u")
    u = grid.samples
    u_x = derivative_grid(grid, 1).samples
    h = grid.spacing
    density = np.abs(u) ** 2
    mass = _integrate(density, h)
    energy = 0.5 * _integrate(np.abs(u_x) ** 2, h) - _integrate(density ** 3, h) / 32.0
    momentum = _integrate((1j * u_x * np.conj(u)).real, h) + 0.25 * _integrate(density ** 2, h)
    action = energy + 0.5 * ctx.omega * mass + 0.5 * ctx.c * momentum
    return ConservedSet(mass=mass, energy=energy, momentum=momentum, action=action)


# ===== Sobolev 范数 =====

def _cumulative_h_norms(derivatives: Sequence[np.ndarray], spacing: float) -> Tuple[float, ...]:
    """‖f‖_{H^m}² = Σ_{j≤m} ‖f^{(j)}‖²，对每个 m 返回一项"""
    total = 0.0
    norms = []
    for values in derivatives:
        total += _integrate(np.abs(values) ** 2, spacing)
        norms.append(math.sqrt(total))
    return tuple(norms)


def _cumulative_sup_norms(derivatives: Sequence[np.ndarray]) -> Tuple[float, ...]:
    best = 0.0
    norms = []
    for values in derivatives:
        best = max(best, float(np.max(np.abs(values))))
        norms.append(best)
    return tuple(norms)


def _grid_derivatives(grid: GridFunction, m: int) -> List[np.ndarray]:
    return [grid.samples] + [derivative_grid(grid, j).samples for j in range(1, m + 1)]


def h_m_norm(grid: GridFunction, m: int) -> float:
    """周期网格函数的 H^m 范数，导数取谱导数"""
    if not 0 <= m <= 4:
        raise ValueError(f"H^m 阶数 m={m!r} 必须在 0..4 内")
    return _cumulative_h_norms(_grid_derivatives(grid, m), grid.spacing)[-1]


# ===== 收敛研究 =====

def _error_row(L: float, m_max: int, n_points: int, n: int, message: str) -> ConvergenceRow:
    nan = math.nan
    return ConvergenceRow(
        L=L, eta3=nan, k=nan, mass_torus=nan, mass_gap=nan,
        h_m_gaps=(nan,) * (m_max + 1),
        sup_gaps=(nan,) * (min(m_max, MAX_UNIFORM_ORDER) + 1),
        ode_residual=nan,
        pointwise_gaps=(nan,) * n_points,
        h_m_norms=(nan,) * (m_max + 1),
        n=n,
        error=message,
    )


def convergence_row(ctx: WaveContext, L: float, m_max: int, *, n: int = DEFAULT_GRID_SIZE,
                    pointwise_x: Sequence[float] = DEFAULT_POINTWISE_X) -> ConvergenceRow:
    """
    单个 L 的收敛记录

    Φ^L 的导数取谱导数，孤立子的导数取解析式；两者在同一网格上比较。
    逐点差取载波 φ^L = e^{icx/2}Φ^L 与全直线载波 φ 之差的模。
    L ≤ L₀ 时返回带 error 标记的行而不抛出。
    """
    try:
        p = solve_eta3(ctx, L)
    except (PeriodBoundError, EtaRangeError) as exc:
        return _error_row(L, m_max, len(pointwise_x), n, str(exc))

    sol = SolitonProfile.for_context(ctx)
    grid = sample_torus(p, n)
    torus_derivs = _grid_derivatives(grid, m_max)
    soliton_derivs = soliton_derivatives(sol, grid.x)[: m_max + 1]
    gaps = [a - b for a, b in zip(torus_derivs, soliton_derivs)]

    mass_torus = torus_mass_closed(p)
    pointwise = tuple(
        float(abs(carrier_eval(p, x) - soliton_carrier_eval(sol, x))) for x in pointwise_x
    )
    return ConvergenceRow(
        L=L,
        eta3=p.eta3,
        k=p.k.k,
        mass_torus=mass_torus,
        mass_gap=abs(mass_torus - soliton_mass(ctx)),
        h_m_gaps=_cumulative_h_norms(gaps, grid.spacing),
        sup_gaps=_cumulative_sup_norms(gaps[: MAX_UNIFORM_ORDER + 1]),
        ode_residual=ode_residual(p, grid),
        pointwise_gaps=pointwise,
        h_m_norms=_cumulative_h_norms(torus_derivs, grid.spacing),
        n=n,
    )


def convergence_study(ctx: WaveContext, L_list: Sequence[float], m_max: int = MAX_SOBOLEV_ORDER, *,
                      n: int = DEFAULT_GRID_SIZE, jobs: int = 1,
                      pointwise_x: Sequence[float] = DEFAULT_POINTWISE_X) -> List[ConvergenceRow]:
    """
    长周期收敛研究

    Args:
        ctx: 可容许参数对
        L_list: 半长列表
        m_max: H^m 最高阶数 (0..3)；C^m 截断到 2
        n: 公共网格点数
        jobs: 并发工作线程数，行之间互不依赖

    Returns:
        与 L_list 同序的 ConvergenceRow 列表
    """
    if not 0 <= m_max <= MAX_SOBOLEV_ORDER:
        raise ValueError(f"m_max={m_max!r} 必须在 0..{MAX_SOBOLEV_ORDER} 内")
    if jobs < 1:
        raise ValueError(f"jobs={jobs!r} 必须 ≥ 1")

    def run(L: float) -> ConvergenceRow:
        row = convergence_row(ctx, L, m_max, n=n, pointwise_x=pointwise_x)
        logger.info("收敛研究 ω=%r c=%r L=%r: mass_gap=%g", ctx.omega, ctx.c, L, row.mass_gap)
        return row

    if jobs == 1:
        return [run(L) for L in L_list]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run, L_list))


def uniform_bound(rows: Sequence[ConvergenceRow], m: int) -> float:
    """sup_L ‖Φ^L‖_{H^m}，跳过带错误标记的行"""
    values = [row.h_m_norms[m] for row in rows if row.error is None]
    if not values:
        raise ValueError("没有可用的收敛记录")
    return max(values)


# ===== 规范变换 =====

def mean_zero_primitive(grid: GridFunction) -> GridFunction:
    """
    f − mean(f) 的均值为零的周期原函数

    零模与 Nyquist 模置零。
    """
    n = grid.n
    wavenumbers = 2.0 * np.pi * np.fft.fftfreq(n, d=grid.spacing)
    spectrum = np.fft.fft(grid.samples)
    spectrum[0] = 0.0
    spectrum[n // 2] = 0.0
    nonzero = wavenumbers != 0.0
    spectrum[nonzero] /= 1j * wavenumbers[nonzero]
    values = np.fft.ifft(spectrum)
    if not grid.is_complex:
        values = values.real
    return GridFunction(values, grid.half_length)


def gauge_phase(grid: GridFunction) -> GridFunction:
    """𝒥(f)：|f|² − μ(f) 的均值为零的周期原函数"""
    density = GridFunction(np.abs(grid.samples) ** 2, grid.half_length)
    return mean_zero_primitive(density)


def gauge_transform(grid: GridFunction, a: float) -> GridFunction:
    """𝒢_a(f) = e^{ia𝒥(f)}·f"""
    phase = gauge_phase(grid).samples
    return GridFunction(np.exp(1j * a * phase) * grid.samples, grid.half_length)


def gauge_error(grid: GridFunction, L: float) -> GaugeErrorRecord:
    """
    e_L(v) = ψ(v)v + (1/4)μ|v|²v 的 H^0..H^2 范数

    ψ(v) = −(1/8L)∫(2Im(v̄∂ₓv) + (1/8)|v|⁴) + μ²/16，μ = (1/2L)‖v‖²。

    Raises:
        TypeError: 网格为实值
        GridConsistencyError: 网格半长与 L 不一致
    """
    if not grid.is_complex:
        raise TypeError("gauge_error 需要复值网格 v")
    if abs(grid.half_length - L) > 1e-12 * max(1.0, L):
        raise GridConsistencyError(f"网格半长 {grid.half_length!r} 与 L = {L!r} 不一致")
    v = grid.samples
    h = grid.spacing
    v_x = derivative_grid(grid, 1).samples
    density = np.abs(v) ** 2
    mu = _integrate(density, h) / (2.0 * L)
    integrand = 2.0 * (np.conj(v) * v_x).imag + density ** 2 / 8.0
    psi_v = -_integrate(integrand, h) / (8.0 * L) + mu * mu / 16.0
    e_grid = GridFunction((psi_v + 0.25 * mu * density) * v, L)
    norms = _cumulative_h_norms(_grid_derivatives(e_grid, 2), h)
    return GaugeErrorRecord(mu=mu, psi_v=psi_v, e_norms=norms, L=L)


def gauge_error_study(ctx: WaveContext, L_list: Sequence[float], *,
                      n: int = DEFAULT_GRID_SIZE) -> List[GaugeErrorRecord]:
    """
    各 L 上 t=0 行波经 𝒢_{−1/4} 变换后的规范误差

    速度先吸附到 (2π/L)ℤ，使载波在 [−L, L] 上周期。
    """
    records = []
    for L in L_list:
        c_L = snap_speed(ctx.c, L)
        ctx_L = ctx if c_L == ctx.c else make_context(ctx.omega, c_L)
        p = solve_eta3(ctx_L, L)
        u = sample_traveling_wave(p, c_L, 0.0, n)
        records.append(gauge_error(gauge_transform(u, -0.25), L))
    return records
