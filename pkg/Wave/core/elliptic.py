"""
椭圆函数模块

提供自包含的 Jacobi 椭圆函数与第一、二类完全/不完全椭圆积分，
在整个模量范围内(包括 k 接近 1)保持接近机器精度。

主要功能:
- 模量与互补模量的成对存储 (Modulus)
- 完全椭圆积分 K(k)、E(k)：算术-几何平均 (AGM) 迭代
- 不完全椭圆积分 F(φ,k)、E(φ,k)：Carlson 对称形式 RF / RD
- Jacobi 函数 sn、cn、dn：由 AGM 序列驱动的降序 Landen 变换
- 退化模量的分支：k′ 极小时走对数渐近，k 极小时走三角函数

所有运算都是输入的纯函数，没有共享可变状态，可在任意线程中并发调用。
"""

import math
from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np


# k′ 低于该阈值时使用 K ≈ log(4/k′) 渐近分支
LOG_BRANCH_KP = 1e-8
# k 低于该阈值时使用三角函数分支
TRIG_BRANCH_K = 1e-8

_EPS = float(np.finfo(float).eps)
# k² + k′² = 1 的容许偏差
PYTHAGOREAN_TOL = 8 * _EPS
# Carlson 复制迭代的终止阈值：截断误差按 δ⁶ 衰减
_CARLSON_DELTA = 1e-3
_MAX_ITERATIONS = 100


class EllipticDomainError(ValueError):
    """椭圆函数或积分的参数超出定义域"""


@dataclass(frozen=True)
class Modulus:
    """
    椭圆模量 k 及其互补模量 k′

    两个分量分别存储，避免在 k → 1 时由 1 − k² 引起的相消。
    请使用 from_k / from_k_prime / from_k_sq 构造。
    """

    k: float
    k_prime: float

    def __post_init__(self):
        for name, value in (("k", self.k), ("k_prime", self.k_prime)):
            if not math.isfinite(value) or value < 0.0 or value > 1.0:
                raise EllipticDomainError(f"模量分量 {name}={value!r} 不在 [0, 1] 内")
        residual = self.k * self.k + self.k_prime * self.k_prime - 1.0
        if abs(residual) > PYTHAGOREAN_TOL:
            raise EllipticDomainError(
                f"k² + k′² − 1 = {residual:.3e} 超出容许范围"
            )

    @classmethod
    def from_k(cls, k: float) -> "Modulus":
        """由 k 构造，k′ = √((1−k)(1+k))"""
        k = float(k)
        if not 0.0 <= k <= 1.0:
            raise EllipticDomainError(f"模量 k={k!r} 不在 [0, 1] 内")
        return cls(k, math.sqrt((1.0 - k) * (1.0 + k)))

    @classmethod
    def from_k_prime(cls, k_prime: float) -> "Modulus":
        """由互补模量构造，k 接近 1 时优先使用"""
        k_prime = float(k_prime)
        if not 0.0 <= k_prime <= 1.0:
            raise EllipticDomainError(f"互补模量 k′={k_prime!r} 不在 [0, 1] 内")
        return cls(math.sqrt((1.0 - k_prime) * (1.0 + k_prime)), k_prime)

    @classmethod
    def from_k_sq(cls, k_sq: float, k_prime_sq: float) -> "Modulus":
        """
        由分别精确计算的 k² 与 k′² 构造

        Args:
            k_sq: k²，应在 [0, 1] 内
            k_prime_sq: k′²，由无相消公式独立给出

        两者先按和归一化，以吸收各自的舍入误差。
        """
        k_sq = float(k_sq)
        k_prime_sq = float(k_prime_sq)
        if k_sq < 0.0 or k_prime_sq < 0.0 or not math.isfinite(k_sq + k_prime_sq):
            raise EllipticDomainError(f"k²={k_sq!r}, k′²={k_prime_sq!r} 无效")
        total = k_sq + k_prime_sq
        if abs(total - 1.0) > 1e-8:
            raise EllipticDomainError(f"k² + k′² = {total!r} 与 1 相差过大")
        return cls(math.sqrt(k_sq / total), math.sqrt(k_prime_sq / total))

    @property
    def k_sq(self) -> float:
        return self.k * self.k

    @property
    def k_prime_sq(self) -> float:
        return self.k_prime * self.k_prime

    def complement(self) -> "Modulus":
        """交换 k 与 k′"""
        return Modulus(self.k_prime, self.k)


@dataclass(frozen=True)
class JacobiTriple:
    """sn、cn、dn 三元组，标量或同形数组"""

    sn: Union[float, np.ndarray]
    cn: Union[float, np.ndarray]
    dn: Union[float, np.ndarray]


ModulusLike = Union[Modulus, float]


def as_modulus(k: ModulusLike) -> Modulus:
    """接受 Modulus 或实数 k"""
    if isinstance(k, Modulus):
        return k
    return Modulus.from_k(k)


# ===== 完全椭圆积分 =====

def agm(a: float, b: float) -> float:
    """
    算术-几何平均

    Args:
        a, b: 非负实数

    Returns:
        AGM(a, b)
    """
    if a < 0.0 or b < 0.0:
        raise EllipticDomainError(f"AGM 参数必须非负: a={a!r}, b={b!r}")
    if a == 0.0 or b == 0.0:
        return 0.0
    for _ in range(_MAX_ITERATIONS):
        if abs(a - b) <= _EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def _agm_sequence(m: Modulus) -> Tuple[List[float], List[float]]:
    """
    以 a₀=1, b₀=k′, c₀=k 开始的 AGM 序列

    c_{n+1} 用 c_n²/(4a_{n+1}) 计算，避免 a_n − b_n 的相消。
    """
    a, b, c = 1.0, m.k_prime, m.k
    a_seq, c_seq = [a], [c]
    for _ in range(_MAX_ITERATIONS):
        if c <= _EPS * a:
            break
        a_next = 0.5 * (a + b)
        b = math.sqrt(a * b)
        c = c * c / (4.0 * a_next)
        a = a_next
        a_seq.append(a)
        c_seq.append(c)
    return a_seq, c_seq


def complete_K(k: ModulusLike) -> float:
    """
    第一类完全椭圆积分 K(k)

    Args:
        k: 模量，0 ≤ k < 1

    Returns:
        K(k)；k′ < LOG_BRANCH_KP 时取 log(4/k′) 渐近式

    Raises:
        EllipticDomainError: k ≥ 1 时 K 发散
    """
    m = as_modulus(k)
    if m.k_prime == 0.0:
        raise EllipticDomainError("k = 1 时 K(k) 发散")
    kp = m.k_prime
    if kp < LOG_BRANCH_KP:
        log_term = math.log(4.0 / kp)
        return log_term + 0.25 * kp * kp * (log_term - 1.0)
    return math.pi / (2.0 * agm(1.0, kp))


def complete_E(k: ModulusLike) -> float:
    """
    第二类完全椭圆积分 E(k)

    E = K·(1 − Σ 2^{n−1} c_n²)，c 为 AGM 序列的半差。
    k = 1 时返回 1。
    """
    m = as_modulus(k)
    kp = m.k_prime
    if kp == 0.0:
        return 1.0
    if kp < LOG_BRANCH_KP:
        return 1.0 + 0.5 * kp * kp * (math.log(4.0 / kp) - 0.5)
    if m.k == 0.0:
        return 0.5 * math.pi
    a_seq, c_seq = _agm_sequence(m)
    deficit = 0.0
    weight = 0.5
    for c in c_seq:
        deficit += weight * c * c
        weight *= 2.0
    return complete_K(m) * (1.0 - deficit)


# ===== Carlson 对称积分 =====

def carlson_rf(x: float, y: float, z: float) -> float:
    """
    Carlson 对称积分 RF(x, y, z)

    复制定理迭代，直到相对偏差小于 _CARLSON_DELTA，再用五阶展开收尾。
    至多一个参数可以为 0。
    """
    if min(x, y, z) < 0.0 or (x == 0.0) + (y == 0.0) + (z == 0.0) > 1:
        raise EllipticDomainError(f"RF 参数无效: ({x!r}, {y!r}, {z!r})")
    for _ in range(_MAX_ITERATIONS):
        mean = (x + y + z) / 3.0
        delta = max(abs(mean - x), abs(mean - y), abs(mean - z)) / mean
        if delta < _CARLSON_DELTA:
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
    mean = (x + y + z) / 3.0
    dx = 1.0 - x / mean
    dy = 1.0 - y / mean
    dz = -(dx + dy)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    series = 1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0
    return series / math.sqrt(mean)


def carlson_rd(x: float, y: float, z: float) -> float:
    """
    Carlson 对称积分 RD(x, y, z)

    x、y 至多一个为 0，z 必须为正。
    """
    if min(x, y) < 0.0 or z <= 0.0 or (x == 0.0 and y == 0.0):
        raise EllipticDomainError(f"RD 参数无效: ({x!r}, {y!r}, {z!r})")
    tail = 0.0
    scale = 1.0
    for _ in range(_MAX_ITERATIONS):
        mean = (x + y + 3.0 * z) / 5.0
        delta = max(abs(mean - x), abs(mean - y), abs(mean - z)) / mean
        if delta < _CARLSON_DELTA:
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        tail += scale / (sz * (z + lam))
        scale *= 0.25
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
    mean = (x + y + 3.0 * z) / 5.0
    dx = 1.0 - x / mean
    dy = 1.0 - y / mean
    dz = -(dx + dy) / 3.0
    e2 = dx * dy - 6.0 * dz * dz
    e3 = (3.0 * dx * dy - 8.0 * dz * dz) * dz
    e4 = 3.0 * (dx * dy - dz * dz) * dz * dz
    e5 = dx * dy * dz ** 3
    series = (1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0
              - 3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0 + 3.0 * e5 / 26.0)
    return 3.0 * tail + scale * series / (mean * math.sqrt(mean))


# ===== 不完全椭圆积分 =====

def _check_amplitude(phi: float) -> float:
    phi = float(phi)
    if not (0.0 <= phi <= 0.5 * math.pi):
        raise EllipticDomainError(f"振幅 φ={phi!r} 不在 [0, π/2] 内")
    return phi


def _amplitude_terms(phi: float, m: Modulus) -> Tuple[float, float, float]:
    """
    返回 sin φ、cos²φ 与 Δ² = k′²sin²φ + cos²φ

    cos φ 取 sin(π/2 − φ)：φ 为浮点 π/2 时恰为 0，否则 RF(cos²φ, ·, ·)
    在 k′ → 0 时放大 cos φ 的舍入误差。
    """
    s = math.sin(phi)
    c_sq = math.sin(0.5 * math.pi - phi) ** 2
    return s, c_sq, m.k_prime_sq * s * s + c_sq


def incomplete_F(phi: float, k: ModulusLike) -> float:
    """
    第一类不完全椭圆积分 F(φ, k) = sin φ · RF(cos²φ, Δ², 1)

    Args:
        phi: 振幅，0 ≤ φ ≤ π/2，化约到基本区间由调用方负责
        k: 模量，0 ≤ k < 1
    """
    phi = _check_amplitude(phi)
    m = as_modulus(k)
    if m.k_prime == 0.0:
        raise EllipticDomainError("k = 1 时 F(φ, k) 在 φ = π/2 处发散，不予支持")
    if phi == 0.0:
        return 0.0
    if m.k == 0.0:
        return phi
    s, c_sq, delta_sq = _amplitude_terms(phi, m)
    return s * carlson_rf(c_sq, delta_sq, 1.0)


def incomplete_E(phi: float, k: ModulusLike) -> float:
    """
    第二类不完全椭圆积分 E(φ, k)

    E = sin φ · RF − (k²/3) sin³φ · RD，k = 1 时退化为 sin φ。
    """
    phi = _check_amplitude(phi)
    m = as_modulus(k)
    if phi == 0.0:
        return 0.0
    if m.k == 0.0:
        return phi
    if m.k_prime == 0.0:
        return math.sin(phi)
    s, c_sq, delta_sq = _amplitude_terms(phi, m)
    rf = carlson_rf(c_sq, delta_sq, 1.0)
    rd = carlson_rd(c_sq, delta_sq, 1.0)
    return s * rf - m.k_sq * s ** 3 * rd / 3.0


# ===== Jacobi 椭圆函数 =====

def _landen_base(v: np.ndarray, m: Modulus) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """v ∈ [0, K/2] 上的降序 Landen 递推"""
    a_seq, c_seq = _agm_sequence(m)
    depth = len(a_seq) - 1
    phi = (2.0 ** depth) * a_seq[depth] * v
    phi_next = phi
    for n in range(depth, 0, -1):
        phi_next = phi
        phi = 0.5 * (phi + np.arcsin(c_seq[n] / a_seq[n] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    if depth == 0:
        dn = np.sqrt(1.0 - m.k_sq * sn * sn)
    else:
        dn = cn / np.cos(phi_next - phi)
    return sn, cn, dn


def _hyperbolic_base(v: np.ndarray, m: Modulus) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """k′ 极小时的一阶 k′² 修正式，v ≤ K/2 时误差为 O(k′²)"""
    t = np.tanh(v)
    sech = 1.0 / np.cosh(v)
    sc = np.sinh(v) * np.cosh(v)
    quarter = 0.25 * m.k_prime_sq
    sn = t + quarter * (sc - v) * sech * sech
    cn = sech - quarter * (sc - v) * t * sech
    dn = sech + quarter * (sc + v) * t * sech
    return sn, cn, dn


def _trig_base(v: np.ndarray, m: Modulus) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    sn = np.sin(v)
    return sn, np.cos(v), np.sqrt(1.0 - m.k_sq * sn * sn)


def jacobi(u, k: ModulusLike) -> JacobiTriple:
    """
    Jacobi 椭圆函数 (sn, cn, dn)(u; k)

    Args:
        u: 实数或数组，必须有限
        k: 模量，0 ≤ k ≤ 1

    Returns:
        JacobiTriple；标量输入返回标量

    Raises:
        EllipticDomainError: u 含非有限值

    对 |u| 先按 2K 取模并记录符号，再把 (K/2, K] 的部分用
    sn(K−v)=cn/dn、cn(K−v)=k′sn/dn、dn(K−v)=k′/dn 反射到 [0, K/2]，
    使 cn 与 dn 在 K 附近保持相对精度。
    """
    m = as_modulus(k)
    scalar = np.ndim(u) == 0
    u_arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u_arr)):
        raise EllipticDomainError("Jacobi 函数的自变量必须有限")
    negative = np.signbit(u_arr)
    w = np.abs(u_arr)

    if m.k_prime == 0.0:
        sn = np.tanh(w)
        cn = 1.0 / np.cosh(w)
        dn = 1.0 / np.cosh(w)
    else:
        quarter = complete_K(m)
        half_period = 2.0 * quarter
        r = np.fmod(w, half_period)
        q = np.rint((w - r) / half_period)
        odd = np.mod(q, 2.0) == 1.0
        upper = r > quarter
        r = np.where(upper, half_period - r, r)
        reflect = r > 0.5 * quarter
        v = np.where(reflect, quarter - r, r)

        if m.k < TRIG_BRANCH_K:
            sn_v, cn_v, dn_v = _trig_base(v, m)
        elif m.k_prime < LOG_BRANCH_KP:
            sn_v, cn_v, dn_v = _hyperbolic_base(v, m)
        else:
            sn_v, cn_v, dn_v = _landen_base(v, m)

        sn = np.where(reflect, cn_v / dn_v, sn_v)
        cn = np.where(reflect, m.k_prime * sn_v / dn_v, cn_v)
        dn = np.where(reflect, m.k_prime / dn_v, dn_v)
        cn = np.where(upper, -cn, cn)
        sn = np.where(odd, -sn, sn)
        cn = np.where(odd, -cn, cn)

    sn = np.where(negative, -sn, sn)
    if scalar:
        return JacobiTriple(float(sn), float(cn), float(dn))
    return JacobiTriple(sn, cn, dn)
