"""
参数代数模块

周期行波的全部参数关系：(ω, c) 的可容许性、临界振幅 α₀ / α₁、
根公式、模量/尺度/周期对峰值 η₃ 的依赖、单调性导数，以及由环面半长 L
反解周期映射得到完整参数束。

主要功能:
- WaveContext：可容许参数对及其派生常数
- TorusProfile：确定一个精确周期剖面的参数束
- 由 η₃ 计算根、形状与周期 (roots_from_eta3 / shape_from_eta3 / period_from_eta3)
- 由谷值 η₂ 计算参数束 (profile_from_eta2 / period_from_eta2)
- 周期映射反解 solve_eta3
- 归一化变量下的单调性判据 (modulus_slope / period_slope_sign)
- 长周期极限的闭式值 (long_period_limits)

反解在谷值 η₂ 上进行：L 较大时 α₁ − η₃ 会小于 α₁ 的一个 ulp，
而 η₂ 在 (0, α₀) 上以对数尺度仍可分辨。所有差值都用无相消形式计算。
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .elliptic import Modulus, complete_E, complete_K


logger = logging.getLogger(__name__)

# |ω − c²/4| ≤ MASSLESS_RTOL·ω 视为无质量情形
MASSLESS_RTOL = 1e-12
# 三次 Vieta 关系的相对容差
VIETA_RTOL = 1e-10
# 无质量情形下 α₁ − η₃ ≤ 该比例·α₁ 时改用安全形式计算 k²
MASSLESS_SAFE_WINDOW = 1e-6
# 最小可表示谷值，低于此值的 L 超出 binary64 能力
_ETA2_FLOOR = 1e-300


class AdmissibilityError(ValueError):
    """(ω, c) 不满足可容许条件 ω > c²/4 或 (ω = c²/4 且 c > 0)"""


class EtaRangeError(ValueError):
    """振幅参数超出开区间"""


class PeriodBoundError(ValueError):
    """L ≤ L₀ 时不存在单峰解"""

    def __init__(self, message: str, L0: float):
        super().__init__(message)
        self.L0 = L0


@dataclass(frozen=True)
class WaveContext:
    """
    可容许参数对 (ω, c) 及其派生常数

    无质量情形 (ω = c²/4, c > 0) 内部统一使用 ω_eff = c²/4 与
    decay_sq = 0，保证各恒等式在该边界上精确成立。
    """

    omega: float
    c: float
    s: float
    alpha0: float
    alpha1: float
    beta0: float
    beta1: float
    L0: float
    T0: float
    is_massless: bool
    omega_eff: float
    sqrt_omega: float
    decay_sq: float          # 4ω − c²，无质量时为 0
    sqrt_A0: float           # √A(α₀) = √(48ω + 4c²)


@dataclass(frozen=True)
class TorusProfile:
    """
    一个精确周期剖面的完整参数束

    A 为判别式 A(η₃) = (η₂ − η₁)²；L 为半周期，T = 2L。
    C_psi 只作为派生量保存。
    """

    ctx: WaveContext
    eta1: float
    eta2: float
    eta3: float
    A: float
    k: Modulus
    g: float
    beta_sq: float
    T: float
    L: float
    C_psi: float


@dataclass(frozen=True)
class LimitRecord:
    """η₃ → α₁ 时的闭式极限"""

    eta1_lim: float
    eta2_lim: float
    inv_two_g_lim: float
    k_lim: float
    beta_sq_lim: Optional[float]
    beta_sq_unbounded: bool
    mu1: float
    soliton_mass: float


# ===== 上下文 =====

def make_context(omega: float, c: float) -> WaveContext:
    """
    构造并校验 WaveContext

    Args:
        omega: 频率 ω
        c: 波速

    Returns:
        已填充全部派生常数的 WaveContext

    Raises:
        AdmissibilityError: ω ≤ 0、ω < c²/4，或 ω = c²/4 且 c ≤ 0
    """
    omega = float(omega)
    c = float(c)
    if not (math.isfinite(omega) and math.isfinite(c)):
        raise AdmissibilityError(f"(ω, c) = ({omega!r}, {c!r}) 必须有限")
    if omega <= 0.0:
        raise AdmissibilityError(f"可容许条件不满足: ω = {omega!r} ≤ 0")

    gap = omega - 0.25 * c * c
    on_boundary = abs(gap) <= MASSLESS_RTOL * omega
    if on_boundary and c <= 0.0:
        raise AdmissibilityError(
            f"可容许条件不满足: ω = c²/4 时要求 c > 0 (c = {c!r})"
        )
    if not on_boundary and gap < 0.0:
        raise AdmissibilityError(
            f"可容许条件不满足: ω = {omega!r} < c²/4 = {0.25 * c * c!r}"
        )

    if on_boundary:
        omega_eff = 0.25 * c * c
        sqrt_omega = 0.5 * c
        s = 1.0
        decay_sq = 0.0
    else:
        omega_eff = omega
        sqrt_omega = math.sqrt(omega)
        s = c / (2.0 * sqrt_omega)
        decay_sq = (2.0 * sqrt_omega - c) * (2.0 * sqrt_omega + c)

    sqrt_A0 = math.sqrt(48.0 * omega_eff + 4.0 * c * c)
    if c >= 0.0:
        alpha0 = (4.0 * c + sqrt_A0) / 3.0
    else:
        alpha0 = 4.0 * decay_sq / (sqrt_A0 - 4.0 * c)
    alpha1 = 4.0 * sqrt_omega + 2.0 * c
    T0 = 4.0 * math.pi / math.sqrt(alpha0 * sqrt_A0)

    ctx = WaveContext(
        omega=omega,
        c=c,
        s=s,
        alpha0=alpha0,
        alpha1=alpha1,
        beta0=alpha0 / (4.0 * sqrt_omega),
        beta1=1.0 + s,
        L0=0.5 * T0,
        T0=T0,
        is_massless=on_boundary,
        omega_eff=omega_eff,
        sqrt_omega=sqrt_omega,
        decay_sq=decay_sq,
        sqrt_A0=sqrt_A0,
    )
    logger.debug("构造上下文 ω=%r c=%r: α₀=%r α₁=%r L₀=%r", omega, c, alpha0, alpha1, ctx.L0)
    return ctx


def discriminant(ctx: WaveContext, eta: float) -> float:
    """A(η) = 64ω − 3η² + 8cη"""
    return 64.0 * ctx.omega_eff - 3.0 * eta * eta + 8.0 * ctx.c * eta


def _alpha0_minus(ctx: WaveContext) -> float:
    """3x² − 8cx − (16ω − 4c²) 的负根 (4c − √A(α₀))/3"""
    if ctx.c > 0.0:
        return -4.0 * ctx.decay_sq / (ctx.sqrt_A0 + 4.0 * ctx.c)
    return (4.0 * ctx.c - ctx.sqrt_A0) / 3.0


def _alpha1_minus(ctx: WaveContext) -> float:
    return 2.0 * ctx.c - 4.0 * ctx.sqrt_omega


def _check_eta3(ctx: WaveContext, eta3: float) -> float:
    eta3 = float(eta3)
    if not (ctx.alpha0 < eta3 < ctx.alpha1):
        raise EtaRangeError(
            f"η₃ = {eta3!r} 不在 (α₀, α₁) = ({ctx.alpha0!r}, {ctx.alpha1!r}) 内"
        )
    return eta3


# ===== 以峰值 η₃ 为参数 =====

def _sqrt_discriminant_eta3(ctx: WaveContext, eta3: float) -> float:
    """√A(η₃)，按 A = 48ω(γ − η)(η − γ⁻) 的因式形式计算"""
    s = ctx.s
    root = math.sqrt(s * s + 3.0)
    gamma_plus = 2.0 * (s + root) / 3.0
    if s > 0.0:
        gamma_minus = -2.0 / (s + root)
    else:
        gamma_minus = 2.0 * (s - root) / 3.0
    eta = eta3 / (4.0 * ctx.sqrt_omega)
    return math.sqrt(48.0 * ctx.omega_eff * (gamma_plus - eta) * (eta - gamma_minus))


def roots_from_eta3(ctx: WaveContext, eta3: float) -> Tuple[float, float, float]:
    """
    由峰值 η₃ 求另外两个根与判别式

    Args:
        ctx: 参数上下文
        eta3: α₀ < η₃ < α₁

    Returns:
        (η₁, η₂, A)，满足 Vieta 关系

    η₁ = −(√A + η₃ − 4c)/2，η₂ = (α₁ − η₃)(η₃ − α₁⁻)/(−η₁)，
    后者在 η₃ → α₁ 时不发生相消。
    """
    eta3 = _check_eta3(ctx, eta3)
    sqrt_A = _sqrt_discriminant_eta3(ctx, eta3)
    minus_eta1 = 0.5 * (sqrt_A + eta3 - 4.0 * ctx.c)
    eta2 = (ctx.alpha1 - eta3) * (eta3 - _alpha1_minus(ctx)) / minus_eta1
    return -minus_eta1, eta2, sqrt_A * sqrt_A


def _peak_trough_gap_eta3(ctx: WaveContext, eta3: float, sqrt_A: float) -> float:
    """η₃ − η₂ = 6(η₃ − α₀)(η₃ − α₀⁻)/(3η₃ − 4c + √A)"""
    return 6.0 * (eta3 - ctx.alpha0) * (eta3 - _alpha0_minus(ctx)) / (
        3.0 * eta3 - 4.0 * ctx.c + sqrt_A
    )


def massless_safe_k_sq(eta: float) -> Tuple[float, float]:
    """
    无质量情形 k² 与 k′² 的安全形式

    k² = 1/2 − 3√(2−η)/(2√(3η+2))，η = η₃/(4√ω) ∈ (β₀, 2)
    """
    ratio = 3.0 * math.sqrt(2.0 - eta) / (2.0 * math.sqrt(3.0 * eta + 2.0))
    return 0.5 - ratio, 0.5 + ratio


def shape_from_eta3(ctx: WaveContext, eta3: float) -> Tuple[Modulus, float, float]:
    """
    由峰值求模量、自变量尺度与 β²

    Returns:
        (k, g, β²)，k² = −η₁(η₃−η₂)/(η₃(η₂−η₁))，g = 2/√(η₃(η₂−η₁))，
        β² = (η₃ − η₂)/(η₂ − η₁)
    """
    eta1, eta2, A = roots_from_eta3(ctx, eta3)
    sqrt_A = math.sqrt(A)
    gap = _peak_trough_gap_eta3(ctx, eta3, sqrt_A)
    if ctx.is_massless and ctx.alpha1 - eta3 <= MASSLESS_SAFE_WINDOW * ctx.alpha1:
        k_sq, k_prime_sq = massless_safe_k_sq(eta3 / (4.0 * ctx.sqrt_omega))
    else:
        k_sq = -eta1 * gap / (eta3 * sqrt_A)
        k_prime_sq = eta2 * (eta3 - eta1) / (eta3 * sqrt_A)
    modulus = Modulus.from_k_sq(k_sq, k_prime_sq)
    g = 2.0 / math.sqrt(eta3 * sqrt_A)
    return modulus, g, gap / sqrt_A


def period_from_eta3(ctx: WaveContext, eta3: float) -> float:
    """基本周期 T_ψ = 8K(k)/√(η₃(η₂ − η₁))"""
    modulus, g, _ = shape_from_eta3(ctx, eta3)
    return 4.0 * g * complete_K(modulus)


def profile_from_eta3(ctx: WaveContext, eta3: float) -> TorusProfile:
    """由峰值直接组装参数束"""
    eta1, eta2, A = roots_from_eta3(ctx, eta3)
    modulus, g, beta_sq = shape_from_eta3(ctx, eta3)
    T = 4.0 * g * complete_K(modulus)
    return TorusProfile(
        ctx=ctx, eta1=eta1, eta2=eta2, eta3=float(eta3), A=A, k=modulus, g=g,
        beta_sq=beta_sq, T=T, L=0.5 * T, C_psi=eta1 * eta2 * float(eta3) / 32.0,
    )


# ===== 以谷值 η₂ 为参数 =====

def _bundle_from_eta2(ctx: WaveContext, eta2: float) -> TorusProfile:
    """
    谷值参数化的参数束，允许 η₂ = α₀ 端点 (此时给出常数解的 T₀)

    解曲线椭圆关于 η₂、η₃ 对称，故 η₃ = (4c − η₂ + √A(η₂))/2。
    """
    c = ctx.c
    root = math.sqrt(64.0 * ctx.omega_eff + eta2 * (8.0 * c - 3.0 * eta2))
    if c > 0.0:
        delta = (16.0 * ctx.decay_sq + eta2 * (8.0 * c - 3.0 * eta2)) / (root + 4.0 * c)
    else:
        delta = root - 4.0 * c
    eta1 = -0.5 * (eta2 + delta)
    eta3 = 4.0 * c + 0.5 * (delta - eta2)
    trough_gap = 0.5 * (3.0 * eta2 + delta)          # η₂ − η₁
    spread = root                                    # η₃ − η₁
    if eta2 > 0.5 * ctx.alpha0:
        peak_gap = 6.0 * (ctx.alpha0 - eta2) * (eta2 - _alpha0_minus(ctx)) / (
            root + 3.0 * eta2 - 4.0 * c
        )
    else:
        peak_gap = 0.5 * (4.0 * c - 3.0 * eta2 + root)
    peak_gap = max(peak_gap, 0.0)

    denom = eta3 * trough_gap
    modulus = Modulus.from_k_sq(-eta1 * peak_gap / denom, eta2 * spread / denom)
    g = 2.0 / math.sqrt(denom)
    T = 4.0 * g * complete_K(modulus)
    return TorusProfile(
        ctx=ctx, eta1=eta1, eta2=eta2, eta3=eta3, A=trough_gap * trough_gap,
        k=modulus, g=g, beta_sq=peak_gap / trough_gap, T=T, L=0.5 * T,
        C_psi=eta1 * eta2 * eta3 / 32.0,
    )


def profile_from_eta2(ctx: WaveContext, eta2: float) -> TorusProfile:
    """
    由谷值 η₂ ∈ (0, α₀) 组装参数束

    Raises:
        EtaRangeError: η₂ 不在开区间内
    """
    eta2 = float(eta2)
    if not (0.0 < eta2 < ctx.alpha0):
        raise EtaRangeError(f"η₂ = {eta2!r} 不在 (0, α₀ = {ctx.alpha0!r}) 内")
    return _bundle_from_eta2(ctx, eta2)


def period_from_eta2(ctx: WaveContext, eta2: float) -> float:
    """谷值参数下的基本周期，关于 η₂ 严格递减"""
    return profile_from_eta2(ctx, eta2).T


def solve_eta3(ctx: WaveContext, L: float, *, rtol: float = 1e-13,
               switch_width: float = 1e-6, max_iter: int = 400) -> TorusProfile:
    """
    反解周期映射：求 T_ψ = 2L 的唯一单峰剖面

    Args:
        ctx: 参数上下文
        L: 环面半长，须大于 L₀
        rtol: 收敛判据 |T − 2L| ≤ rtol·2L
        switch_width: 对数括号宽度小于该值后改用 Illinois 割线步
        max_iter: 最大迭代次数

    Returns:
        满足全部不变量的 TorusProfile

    Raises:
        PeriodBoundError: L ≤ L₀
        EtaRangeError: L 太大，谷值低于 binary64 可表示范围

    在 t = log η₂ 上二分，T 关于 t 严格递减；括号足够窄时切换为
    Illinois 变体的试位法。

    调用时机: 命令 solve / limit-study 以及全部校验套件
    """
    L = float(L)
    if not math.isfinite(L) or L <= ctx.L0:
        raise PeriodBoundError(
            f"L = {L!r} ≤ L₀ = {ctx.L0!r}，不存在单峰周期解", ctx.L0
        )
    target = 2.0 * L
    tolerance = rtol * target

    def residual(t: float) -> Tuple[float, TorusProfile]:
        p = _bundle_from_eta2(ctx, math.exp(t))
        return p.T - target, p

    t_hi = math.log(ctx.alpha0)
    f_hi = ctx.T0 - target

    # 向下扩展直到 T(η₂) > 2L，下端截在 log(_ETA2_FLOOR)
    t_floor = math.log(_ETA2_FLOOR)
    step = 1.0
    t_lo = t_hi - step
    f_lo, p_lo = residual(t_lo)
    while f_lo <= 0.0:
        if abs(f_lo) <= tolerance:
            return p_lo
        if t_lo <= t_floor:
            raise EtaRangeError(f"L = {L!r} 过大：谷值 η₂ 低于 binary64 可表示范围")
        t_hi, f_hi = t_lo, f_lo
        step *= 2.0
        t_lo = max(t_hi - step, t_floor)
        f_lo, p_lo = residual(t_lo)
    best, best_gap = p_lo, abs(f_lo)

    side = 0
    for iteration in range(max_iter):
        secant = t_hi - t_lo < switch_width
        t_new = 0.5 * (t_lo + t_hi)
        if secant:
            candidate = t_hi - f_hi * (t_hi - t_lo) / (f_hi - f_lo)
            if t_lo < candidate < t_hi:
                t_new = candidate
        if t_new <= t_lo or t_new >= t_hi:
            break
        f_new, p_new = residual(t_new)
        if abs(f_new) < best_gap:
            best, best_gap = p_new, abs(f_new)
        if best_gap <= tolerance:
            logger.debug("solve_eta3 收敛: L=%r 迭代=%d η₂=%r", L, iteration + 1, best.eta2)
            return best
        # Illinois：同一端点连续保留两次时将其函数值减半
        if f_new > 0.0:
            t_lo, f_lo = t_new, f_new
            if secant and side == -1:
                f_hi *= 0.5
            side = -1
        else:
            t_hi, f_hi = t_new, f_new
            if secant and side == 1:
                f_lo *= 0.5
            side = 1

    logger.warning("solve_eta3 未达到 rtol=%g: L=%r, |T−2L|=%g", rtol, L, best_gap)
    return best


# ===== 归一化变量 η = η₃/(4√ω) =====

def _check_s(s: float) -> float:
    s = float(s)
    if not (-1.0 < s <= 1.0):
        raise AdmissibilityError(f"斜率 s = {s!r} 不在 (−1, 1] 内")
    return s


def beta0(s: float) -> float:
    """β₀(s) = (2s + √(3 + s²))/3"""
    return (2.0 * s + math.sqrt(3.0 + s * s)) / 3.0


def beta0_minus(s: float) -> float:
    """3η² − 4sη + s² − 1 的另一根"""
    root = math.sqrt(3.0 + s * s)
    if s > 0.0:
        return (s * s - 1.0) / (2.0 * s + root)
    return (2.0 * s - root) / 3.0


def beta1(s: float) -> float:
    """β₁(s) = 1 + s"""
    return 1.0 + s


def f_s(s: float, eta: float) -> float:
    return -3.0 * eta * eta + 4.0 * s * eta + 4.0


def b_s(s: float, eta: float) -> float:
    return eta * eta * f_s(s, eta)


def g_s(s: float, eta: float) -> float:
    return -(eta - (s - 1.0)) * (eta - (s + 1.0))


def a_s(s: float, eta: float) -> float:
    return -3.0 * eta * eta + 3.0 * s * eta + 2.0


def gamma_f(s: float) -> float:
    """f_s 的正零点"""
    return 2.0 * (s + math.sqrt(s * s + 3.0)) / 3.0


def gamma_a(s: float) -> float:
    """a_s 的正零点"""
    return (3.0 * s + math.sqrt(9.0 * s * s + 24.0)) / 6.0


def h_bound(s: float) -> float:
    """h(s) = (4/9)(−s⁴ + (3 + s²)^{3/2}s + 9)"""
    return 4.0 / 9.0 * (-s ** 4 + (3.0 + s * s) ** 1.5 * s + 9.0)


def _check_eta(s: float, eta: float) -> Tuple[float, float]:
    s = _check_s(s)
    eta = float(eta)
    if not (beta0(s) < eta < beta1(s)):
        raise EtaRangeError(f"η = {eta!r} 不在 (β₀, β₁) = ({beta0(s)!r}, {beta1(s)!r}) 内")
    return s, eta


def xi_normalized(s: float, eta: float) -> float:
    """归一化谷值 ξ = η₂/(4√ω) = 2g_s(η)/(√f_s(η) + η − 2s)"""
    return 2.0 * g_s(s, eta) / (math.sqrt(f_s(s, eta)) + eta - 2.0 * s)


def ellipse_residual(s: float, xi: float, eta: float) -> float:
    """(ξ − s)² + (η − s)² + ξη − (1 + s²)，在解曲线上为 0"""
    return (xi - s) ** 2 + (eta - s) ** 2 + xi * eta - (1.0 + s * s)


def k_sq_normalized(s: float, eta: float) -> float:
    """
    k² = (3η² + (√f_s − 6s)η + 2(s² − 1))/(2η√f_s)

    直接按归一化公式计算，作为参考值使用。
    """
    r = math.sqrt(f_s(s, eta))
    return (3.0 * eta * eta + (r - 6.0 * s) * eta + 2.0 * (s * s - 1.0)) / (2.0 * eta * r)


def normalized_modulus(s: float, eta: float) -> Modulus:
    """无相消的归一化模量"""
    r = math.sqrt(f_s(s, eta))
    peak_gap = 12.0 * (eta - beta0(s)) * (eta - beta0_minus(s)) / (3.0 * eta - 2.0 * s + r)
    minus_eta1 = 0.5 * (eta - 2.0 * s + r)
    xi = xi_normalized(s, eta)
    k_sq = minus_eta1 * 0.5 * peak_gap / (eta * r)
    k_prime_sq = xi * 0.5 * (3.0 * eta - 2.0 * s + r) / (eta * r)
    return Modulus.from_k_sq(k_sq, k_prime_sq)


def modulus_slope(s: float, eta: float) -> float:
    """
    dk²/dη = (η/(b√b))·(6sη·g_s(η) + 4(1 − s²))，b = η²f_s(η)

    Raises:
        EtaRangeError: η 不在 (β₀(s), β₁(s)) 内
    """
    s, eta = _check_eta(s, eta)
    b = b_s(s, eta)
    return eta / (b * math.sqrt(b)) * (6.0 * s * eta * g_s(s, eta) + 4.0 * (1.0 - s * s))


def period_normalized(s: float, eta: float) -> float:
    """√ω·T_ψ = 2K(k(η))/b_s(η)^{1/4}"""
    s, eta = _check_eta(s, eta)
    return 2.0 * complete_K(normalized_modulus(s, eta)) / b_s(s, eta) ** 0.25


def period_slope_bracket(s: float, eta: float) -> float:
    """
    周期导数的方括号项 (dK/dk)(dk/dη)·b_s − K·η·a_s(η)

    dK/dk = (E − k′²K)/(k·k′²)，dk/dη = (dk²/dη)/(2k)。
    """
    s, eta = _check_eta(s, eta)
    modulus = normalized_modulus(s, eta)
    K = complete_K(modulus)
    E = complete_E(modulus)
    k = modulus.k
    kp_sq = modulus.k_prime_sq
    dK_dk = (E - kp_sq * K) / (k * kp_sq)
    dk_deta = modulus_slope(s, eta) / (2.0 * k)
    return dK_dk * dk_deta * b_s(s, eta) - K * eta * a_s(s, eta)


def period_slope_sign(s: float, eta: float) -> int:
    """dT_ψ/dη 的符号，在可容许区域上恒为 +1"""
    return int(np.sign(period_slope_bracket(s, eta)))


# ===== 长周期极限 =====

def long_period_limits(ctx: WaveContext) -> LimitRecord:
    """
    η₃ → α₁ 时各参数的闭式极限

    无质量情形 β² 无界，用 beta_sq_unbounded 标记，μ₁ 直接取 π/2。
    """
    two_root = 2.0 * ctx.sqrt_omega
    inv_two_g = 0.5 * math.sqrt(ctx.decay_sq)
    if ctx.is_massless:
        return LimitRecord(
            eta1_lim=-2.0 * two_root + 2.0 * ctx.c,
            eta2_lim=0.0,
            inv_two_g_lim=inv_two_g,
            k_lim=1.0 / math.sqrt(2.0),
            beta_sq_lim=None,
            beta_sq_unbounded=True,
            mu1=0.5 * math.pi,
            soliton_mass=4.0 * math.pi,
        )
    beta_sq = (two_root + ctx.c) / (two_root - ctx.c)
    mu1 = math.atan(math.sqrt(beta_sq))
    return LimitRecord(
        eta1_lim=-2.0 * two_root + 2.0 * ctx.c,
        eta2_lim=0.0,
        inv_two_g_lim=inv_two_g,
        k_lim=1.0,
        beta_sq_lim=beta_sq,
        beta_sq_unbounded=False,
        mu1=mu1,
        soliton_mass=8.0 * mu1,
    )


def vieta_residuals(p: TorusProfile) -> Tuple[float, float, float]:
    """三条 Vieta 关系的相对残差"""
    ctx = p.ctx
    e1, e2, e3 = p.eta1, p.eta2, p.eta3
    scale = max(abs(e1), abs(e2), abs(e3))
    r_sum = abs(e1 + e2 + e3 - 4.0 * ctx.c) / scale
    pair = e2 * e3 + e1 * e3 + e1 * e2
    target = -16.0 * ctx.omega_eff + 4.0 * ctx.c * ctx.c
    r_pair = abs(pair - target) / (scale * scale)
    r_prod = abs(e1 * e2 * e3 - 32.0 * p.C_psi) / max(abs(e1 * e2 * e3), np.finfo(float).tiny)
    return r_sum, r_pair, r_prod
