"""
剖面求值模块

精确周期剖面 Φ^L、全直线孤立子 Φ、复载波 φ 与完整行波 u 的求值，
以及对定义常微分方程的残差验证。

主要功能:
- 周期剖面 Φ^L 与其解析导数 (Jacobi 链式法则)
- 孤立子两支 (一般 / 无质量) 及其至三阶的解析导数
- 速度格点吸附与行波组装
- 均匀周期网格 GridFunction 与谱微分
- ELL 方程残差与一阶积分残差

所有公式先在 ψ = Φ² 上计算，最后取平方根；ψ ≥ η₂ > 0。
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Tuple, Union

import numpy as np

from .elliptic import jacobi
from .params import TorusProfile, WaveContext


logger = logging.getLogger(__name__)

# 速度格点判定的相对容差
LATTICE_RTOL = 1e-12
# 网格自动加密的上限
MAX_GRID_SIZE = 2 ** 16
DEFAULT_GRID_SIZE = 2048

ArrayLike = Union[float, np.ndarray]


class LatticeError(ValueError):
    """速度不在格点 (2π/L)ℤ 上"""


class GridConsistencyError(ValueError):
    """网格与剖面 (半长、速度或样本) 不一致"""


class DerivativeOrderError(ValueError):
    """谱微分阶数超出 1..4"""


class SolitonBranch(Enum):
    """孤立子分支"""
    GENERIC = "generic"
    MASSLESS = "massless"


@dataclass(frozen=True)
class SolitonProfile:
    """全直线孤立子 Φ_{ω,c}，Φ²(0) = α₁"""

    ctx: WaveContext
    branch: SolitonBranch

    @classmethod
    def for_context(cls, ctx: WaveContext) -> "SolitonProfile":
        branch = SolitonBranch.MASSLESS if ctx.is_massless else SolitonBranch.GENERIC
        return cls(ctx, branch)


@dataclass(frozen=True)
class GridFunction:
    """
    [−L, L) 上均匀周期网格的采样值

    x_j = −L + j·(2L/n)，n 为 2 的幂；样本在构造后只读。
    """

    samples: np.ndarray
    half_length: float

    def __post_init__(self):
        data = np.array(self.samples, copy=True)
        if data.ndim != 1 or data.size == 0:
            raise GridConsistencyError("网格样本必须是非空一维数组")
        n = data.size
        if n < 2 or n & (n - 1):
            raise GridConsistencyError(f"网格点数 n={n} 必须是 2 的幂")
        if not (math.isfinite(self.half_length) and self.half_length > 0.0):
            raise GridConsistencyError(f"半长 L={self.half_length!r} 必须为正")
        data.setflags(write=False)
        object.__setattr__(self, "samples", data)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.n

    @property
    def x(self) -> np.ndarray:
        return make_grid(self.half_length, self.n)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.samples)


def make_grid(half_length: float, n: int) -> np.ndarray:
    """周期网格节点 −L + j·2L/n"""
    return -half_length + np.arange(n) * (2.0 * half_length / n)


def sample_grid(fn: Callable[[np.ndarray], np.ndarray], half_length: float, n: int) -> GridFunction:
    """在周期网格上采样任意函数"""
    return GridFunction(fn(make_grid(half_length, n)), half_length)


# ===== 周期剖面 =====

def torus_psi(p: TorusProfile, x: ArrayLike) -> ArrayLike:
    """ψ(x) = η₃·dn²(x/2g)/(1 + β²sn²(x/2g))"""
    triple = jacobi(np.asarray(x, dtype=float) / (2.0 * p.g), p.k)
    psi = p.eta3 * triple.dn ** 2 / (1.0 + p.beta_sq * triple.sn ** 2)
    return float(psi) if np.ndim(x) == 0 else psi


def torus_profile_eval(p: TorusProfile, x: ArrayLike) -> ArrayLike:
    """
    Φ^L(x) = √ψ(x)

    偶函数；x=0 处取最大值 √η₃，x=±L 处取最小值 √η₂。
    """
    return np.sqrt(torus_psi(p, x)) if np.ndim(x) else math.sqrt(torus_psi(p, x))


def torus_psi_prime(p: TorusProfile, x: ArrayLike) -> ArrayLike:
    """ψ′ = −2η₃(k² + β²)·sn·cn·dn/(1 + β²sn²)²/(2g)"""
    triple = jacobi(np.asarray(x, dtype=float) / (2.0 * p.g), p.k)
    denom = 1.0 + p.beta_sq * triple.sn ** 2
    value = (-2.0 * p.eta3 * (p.k.k_sq + p.beta_sq) * triple.sn * triple.cn * triple.dn
             / (denom * denom) / (2.0 * p.g))
    return float(value) if np.ndim(x) == 0 else value


def torus_profile_derivative(p: TorusProfile, x: ArrayLike) -> ArrayLike:
    """Φ^L 的解析一阶导数 ψ′/(2Φ)"""
    return torus_psi_prime(p, x) / (2.0 * torus_profile_eval(p, x))


def first_integral_residual(p: TorusProfile, x: ArrayLike) -> ArrayLike:
    """
    一阶积分残差 |ψ′² − ¼ψ(ψ−η₁)(ψ−η₂)(η₃−ψ)|

    ψ′ 由解析链式法则给出，与谱微分路线相互独立。
    """
    psi = torus_psi(p, x)
    psi_prime = torus_psi_prime(p, x)
    poly = psi * (psi - p.eta1) * (psi - p.eta2) * (p.eta3 - psi)
    return np.abs(psi_prime * psi_prime - 0.25 * poly)


def first_integral_bound(p: TorusProfile) -> float:
    return 1e-9 * p.eta3 ** 4


# ===== 孤立子 =====

def soliton_psi(sol: SolitonProfile, x: ArrayLike) -> ArrayLike:
    """
    Φ²(x)

    一般支用 ψ = 8√ω(1−κ²)e^{−y}/((1−e^{−y})² + 2(1−κ)e^{−y})，
    y = √(4ω−c²)|x|，κ = c/(2√ω)；分母为两个非负项之和。
    无质量支 ψ = 4c/((cx)² + 1)。
    """
    ctx = sol.ctx
    x_arr = np.asarray(x, dtype=float)
    if sol.branch is SolitonBranch.MASSLESS:
        psi = 4.0 * ctx.c / ((ctx.c * x_arr) ** 2 + 1.0)
    else:
        y = math.sqrt(ctx.decay_sq) * np.abs(x_arr)
        decay = np.exp(-y)
        kappa = ctx.s
        numer = 8.0 * ctx.sqrt_omega * (1.0 - kappa) * (1.0 + kappa) * decay
        psi = numer / (np.expm1(-y) ** 2 + 2.0 * (1.0 - kappa) * decay)
    return float(psi) if np.ndim(x) == 0 else psi


def soliton_psi_prime(sol: SolitonProfile, x: ArrayLike) -> ArrayLike:
    ctx = sol.ctx
    x_arr = np.asarray(x, dtype=float)
    if sol.branch is SolitonBranch.MASSLESS:
        c = ctx.c
        value = -8.0 * c ** 3 * x_arr / ((c * x_arr) ** 2 + 1.0) ** 2
    else:
        rate = math.sqrt(ctx.decay_sq)
        y = rate * np.abs(x_arr)
        decay = np.exp(-y)
        kappa = ctx.s
        numer = 8.0 * ctx.sqrt_omega * (1.0 - kappa) * (1.0 + kappa) * decay
        denom = np.expm1(-y) ** 2 + 2.0 * (1.0 - kappa) * decay
        d_psi_dy = numer * np.expm1(-2.0 * y) / (denom * denom)
        value = rate * np.sign(x_arr) * d_psi_dy
    return float(value) if np.ndim(x) == 0 else value


def soliton_eval(sol: SolitonProfile, x: ArrayLike) -> ArrayLike:
    """Φ_{ω,c}(x)：偶函数，[0, ∞) 上严格递减并趋于 0"""
    return np.sqrt(soliton_psi(sol, x)) if np.ndim(x) else math.sqrt(soliton_psi(sol, x))


def _ell_cubic(ctx: WaveContext, phi: np.ndarray) -> np.ndarray:
    """(ω − c²/4)Φ + (c/2)Φ³ − (3/16)Φ⁵"""
    phi_sq = phi * phi
    return phi * (0.25 * ctx.decay_sq + 0.5 * ctx.c * phi_sq - 0.1875 * phi_sq * phi_sq)


def ode_derivatives(ctx: WaveContext, phi: np.ndarray, phi_x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    由 ELL 方程得到 Φ″ 与 Φ‴

    Φ″ = (ω − c²/4)Φ + (c/2)Φ³ − (3/16)Φ⁵
    Φ‴ = Φ′·[(ω − c²/4) + (3/2)cΦ² − (15/16)Φ⁴]
    """
    phi_sq = phi * phi
    phi_xx = _ell_cubic(ctx, phi)
    phi_xxx = phi_x * (0.25 * ctx.decay_sq + 1.5 * ctx.c * phi_sq - 0.9375 * phi_sq * phi_sq)
    return phi_xx, phi_xxx


def soliton_derivatives(sol: SolitonProfile, x: ArrayLike) -> Tuple[np.ndarray, ...]:
    """
    孤立子的 (Φ, Φ′, Φ″, Φ‴)

    Φ′ = ψ′/(2Φ)，更高阶导数取自 ELL 恒等式，避免对非周期函数做谱微分。
    """
    x_arr = np.asarray(x, dtype=float)
    phi = np.sqrt(np.asarray(soliton_psi(sol, x_arr)))
    phi_x = np.asarray(soliton_psi_prime(sol, x_arr)) / (2.0 * phi)
    phi_xx, phi_xxx = ode_derivatives(sol.ctx, phi, phi_x)
    return phi, phi_x, phi_xx, phi_xxx


# ===== 行波 =====

def snap_speed(c: float, L: float) -> float:
    """
    取 (2π/L)ℤ 中离 c 最近的元素，平局取向 +∞

    Args:
        c: 目标速度
        L: 半长，须为正
    """
    if not L > 0.0:
        raise ValueError(f"半长 L={L!r} 必须为正")
    spacing = 2.0 * math.pi / L
    return math.floor(c / spacing + 0.5) * spacing


def on_lattice(c_L: float, L: float) -> bool:
    m = c_L * L / (2.0 * math.pi)
    return abs(m - round(m)) <= LATTICE_RTOL * max(1.0, abs(m))


def traveling_wave_eval(p: TorusProfile, c_L: float, t: float, x: ArrayLike) -> ArrayLike:
    """
    u(t,x) = exp(i(ωt + (c_L/2)(x − c_L t)))·Φ^L(x − c_L t)

    Raises:
        LatticeError: c_L 不在 (2π/L)ℤ 上
        GridConsistencyError: 剖面不是以速度 c_L 构造的
    """
    if not on_lattice(c_L, p.L):
        raise LatticeError(f"c_L = {c_L!r} 不在格点 (2π/L)ℤ 上 (L = {p.L!r})")
    if abs(p.ctx.c - c_L) > LATTICE_RTOL * max(1.0, abs(c_L)):
        raise GridConsistencyError(f"剖面速度 c = {p.ctx.c!r} 与 c_L = {c_L!r} 不一致")
    xi = np.asarray(x, dtype=float) - c_L * t
    phase = p.ctx.omega * t + 0.5 * c_L * xi
    value = np.exp(1j * phase) * torus_profile_eval(p, xi)
    return complex(value) if np.ndim(x) == 0 else value


def carrier_eval(p: TorusProfile, x: ArrayLike) -> ArrayLike:
    """φ^L(x) = e^{icx/2}Φ^L(x)"""
    x_arr = np.asarray(x, dtype=float)
    return np.exp(0.5j * p.ctx.c * x_arr) * torus_profile_eval(p, x_arr)


def soliton_carrier_eval(sol: SolitonProfile, x: ArrayLike) -> ArrayLike:
    """全直线载波 φ_{ω,c}(x) = e^{icx/2}Φ(x)"""
    x_arr = np.asarray(x, dtype=float)
    return np.exp(0.5j * sol.ctx.c * x_arr) * soliton_eval(sol, x_arr)


# ===== 网格与谱微分 =====

def sample_torus(p: TorusProfile, n: int = DEFAULT_GRID_SIZE) -> GridFunction:
    """在 [−L, L) 上采样 Φ^L"""
    return sample_grid(lambda x: torus_profile_eval(p, x), p.L, n)


def sample_soliton(sol: SolitonProfile, half_length: float, n: int = DEFAULT_GRID_SIZE) -> GridFunction:
    """在截断窗口 [−L, L) 上采样孤立子"""
    return sample_grid(lambda x: soliton_eval(sol, x), half_length, n)


def sample_traveling_wave(p: TorusProfile, c_L: float, t: float, n: int = DEFAULT_GRID_SIZE) -> GridFunction:
    """在 [−L, L) 上采样复行波 u(t, ·)"""
    return sample_grid(lambda x: traveling_wave_eval(p, c_L, t, x), p.L, n)


def derivative_grid(grid: GridFunction, order: int) -> GridFunction:
    """
    周期网格上的 m 阶傅里叶谱导数

    Args:
        grid: 周期网格函数
        order: 1 ≤ m ≤ 4

    Returns:
        导数网格；实输入返回实部

    Nyquist 模恒置零，因此一阶导数作用两次与二阶导数一致。
    """
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= 4:
        raise DerivativeOrderError(f"导数阶数 m={order!r} 必须在 1..4 内")
    n = grid.n
    wavenumbers = 2.0 * np.pi * np.fft.fftfreq(n, d=grid.spacing)
    wavenumbers[n // 2] = 0.0
    spectrum = np.fft.fft(grid.samples) * (1j * wavenumbers) ** order
    values = np.fft.ifft(spectrum)
    if not grid.is_complex:
        values = values.real
    return GridFunction(values, grid.half_length)


# ===== 方程残差 =====

def ell_residual_values(ctx: WaveContext, phi: np.ndarray, phi_xx: np.ndarray) -> np.ndarray:
    """−Φ″ + (ω − c²/4)Φ + (c/2)Φ³ − (3/16)Φ⁵ 的逐点值"""
    return -phi_xx + _ell_cubic(ctx, phi)


def ell_residual(ctx: WaveContext, grid: GridFunction) -> float:
    """任意实网格在 ELL 方程中的最大残差，Φ″ 取谱导数"""
    if grid.is_complex:
        raise GridConsistencyError("ELL 残差需要实值网格")
    phi_xx = derivative_grid(grid, 2).samples
    return float(np.max(np.abs(ell_residual_values(ctx, grid.samples, phi_xx))))


def _check_profile_grid(p: TorusProfile, grid: GridFunction) -> None:
    if abs(grid.half_length - p.L) > 1e-12 * p.L:
        raise GridConsistencyError(f"网格半长 {grid.half_length!r} 与剖面 L = {p.L!r} 不一致")
    if grid.is_complex:
        raise GridConsistencyError("剖面网格必须为实值")
    peak = grid.samples[grid.n // 2]
    if abs(peak - math.sqrt(p.eta3)) > 1e-9 * math.sqrt(p.eta3):
        raise GridConsistencyError(f"网格在 x=0 处的值 {peak!r} 不等于 √η₃")


def ode_residual(p: TorusProfile, grid: GridFunction) -> float:
    """
    剖面网格的 ELL 残差

    Raises:
        GridConsistencyError: 网格与剖面不匹配
    """
    _check_profile_grid(p, grid)
    return ell_residual(p.ctx, grid)


def ode_residual_bound(p: TorusProfile) -> float:
    """1e−7·(1 + ω + |c|)·η₃^{5/2}"""
    ctx = p.ctx
    return 1e-7 * (1.0 + ctx.omega + abs(ctx.c)) * p.eta3 ** 2.5


def refine_ode_residual(p: TorusProfile, n_start: int = DEFAULT_GRID_SIZE,
                        n_max: int = MAX_GRID_SIZE) -> Tuple[float, int]:
    """
    加密网格直到残差改善不足 10 倍或达到 n_max

    Returns:
        (最佳残差, 对应网格点数)
    """
    n = n_start
    best = ode_residual(p, sample_torus(p, n))
    best_n = n
    while n < n_max:
        n *= 2
        residual = ode_residual(p, sample_torus(p, n))
        logger.debug("ODE 残差 L=%r n=%d: %g", p.L, n, residual)
        if residual >= best:
            break
        previous = best
        best, best_n = residual, n
        if residual * 10.0 > previous:
            break
    return best, best_n
