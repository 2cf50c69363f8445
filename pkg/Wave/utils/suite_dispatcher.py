"""
验证套件分发器

按名称调用对应的不变量验证套件，每个套件返回最大残差、阈值与通过标记。
支持动态注册新的套件。

主要功能:
- 套件名到处理函数的映射
- 椭圆恒等式、Legendre 关系、构造往返、残差、质量、单调性、极限、收敛与规范误差
- 阈值统一覆盖 (负对照)
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.elliptic import Modulus, complete_E, complete_K, incomplete_F, jacobi
from ..core.functionals import (
    convergence_study,
    gauge_error_study,
    legendre_G,
    massless_tail_mass,
    quadrature_mass,
    soliton_mass,
    soliton_tail_mass,
    torus_mass_closed,
)
from ..core.params import (
    TorusProfile,
    beta0,
    beta1,
    make_context,
    modulus_slope,
    normalized_modulus,
    period_slope_sign,
    solve_eta3,
    vieta_residuals,
    xi_normalized,
)
from ..core.profiles import (
    first_integral_bound,
    first_integral_residual,
    ode_residual,
    ode_residual_bound,
    sample_torus,
)


logger = logging.getLogger(__name__)

ELLIPTIC_U = np.linspace(-20.0, 20.0, 1000)
ELLIPTIC_K = (0.0, 1e-9, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0 - 1e-10, 1.0)
# 含无质量端点 s = 1，并逼近开端点 s = −1
MONOTONICITY_S = np.linspace(-0.99, 1.0, 20)
MONOTONICITY_T = np.linspace(0.01, 0.99, 200)
GENERIC_CASE = (1.0, 0.0)
MASSLESS_CASE = (1.0, 2.0)


@dataclass(frozen=True)
class SuiteResult:
    """单个套件的结果"""

    name: str
    max_residual: float
    threshold: float
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerifyPlan:
    """验证运行的参数网格"""

    contexts: Tuple[Tuple[float, float], ...]
    L_values: Tuple[float, ...] = (5.0, 10.0, 25.0, 50.0)
    L0_factor: float = 1.5
    n: int = 2048
    limit_L: float = 50.0
    study_L_list: Tuple[float, ...] = (5.0, 10.0, 20.0, 40.0)
    modulus_count: int = 50
    gap_floor: float = 1e-11
    tolerance: Optional[float] = None

    @classmethod
    def from_config(cls, verify: Dict[str, Any], tolerance: Optional[float] = None,
                    contexts: Optional[Sequence[Tuple[float, float]]] = None) -> "VerifyPlan":
        """由配置文件的 verify 段构造，contexts 给出时覆盖配置"""
        pairs = contexts if contexts is not None else verify["contexts"]
        return cls(
            contexts=tuple((float(w), float(c)) for w, c in pairs),
            L_values=tuple(verify.get("L_values", cls.L_values)),
            L0_factor=float(verify.get("L0_factor", cls.L0_factor)),
            n=int(verify.get("n", cls.n)),
            limit_L=float(verify.get("limit_L", cls.limit_L)),
            study_L_list=tuple(verify.get("study_L_list", cls.study_L_list)),
            modulus_count=int(verify.get("modulus_count", cls.modulus_count)),
            gap_floor=float(verify.get("gap_floor", cls.gap_floor)),
            tolerance=tolerance,
        )


@dataclass
class _Checks:
    """
    累积 (残差, 阈值, 标签)，按残差/阈值比挑出最差的一项

    计数项的阈值恒为 0，不受 --tolerance 覆盖。
    """

    items: List[Tuple[float, float, str, bool]] = field(default_factory=list)

    def add(self, residual: float, threshold: float, label: str) -> None:
        self.items.append((float(residual), float(threshold), label, False))

    def count(self, violations: int, label: str) -> None:
        self.items.append((float(violations), 0.0, label, True))

    def result(self, name: str, tolerance: Optional[float]) -> SuiteResult:
        worst = None
        worst_ratio = -1.0
        for residual, threshold, label, fixed in self.items:
            if tolerance is not None and not fixed:
                threshold = tolerance
            if not math.isfinite(residual):
                ratio = math.inf
            elif threshold > 0.0:
                ratio = residual / threshold
            else:
                ratio = math.inf if residual > 0.0 else 0.0
            if ratio > worst_ratio:
                worst, worst_ratio = (residual, threshold, label), ratio
        if worst is None:
            return SuiteResult(name, 0.0, tolerance or 0.0, True, "无检查项")
        residual, threshold, label = worst
        passed = math.isfinite(residual) and residual <= threshold
        return SuiteResult(name, residual, threshold, passed, label)


def _non_increasing_violations(values: Sequence[float], floor: float) -> int:
    """严格递减；落到 floor 以下后只要求不超过 floor"""
    violations = 0
    for prev, nxt in zip(values, values[1:]):
        if not (nxt < prev or nxt <= floor):
            violations += 1
    return violations


class SuiteDispatcher:
    """
    验证套件分发器

    根据套件名调用相应的验证函数；剖面在同一分发器实例内缓存复用。
    """

    def __init__(self):
        """初始化套件分发器"""
        self.suite_handlers: Dict[str, Callable[[VerifyPlan], _Checks]] = {
            'elliptic': self._suite_elliptic,
            'legendre': self._suite_legendre,
            'construction': self._suite_construction,
            'residuals': self._suite_residuals,
            'mass': self._suite_mass,
            'monotonicity': self._suite_monotonicity,
            'limits': self._suite_limits,
            'convergence': self._suite_convergence,
            'gauge': self._suite_gauge,
        }
        self._profile_cache: Dict[Tuple, List[Tuple[float, TorusProfile]]] = {}

    def dispatch(self, name: str, plan: VerifyPlan) -> SuiteResult:
        """
        运行单个套件

        Args:
            name: 套件名
            plan: 验证参数

        Returns:
            套件结果

        Raises:
            KeyError: 未注册的套件名
        """
        handler = self.suite_handlers[name]
        checks = handler(plan)
        result = checks.result(name, plan.tolerance)
        logger.info("套件 %s: max_residual=%g threshold=%g passed=%s",
                    name, result.max_residual, result.threshold, result.passed)
        return result

    def run(self, plan: VerifyPlan, names: Optional[Sequence[str]] = None) -> List[SuiteResult]:
        """按注册顺序运行全部或指定的套件"""
        selected = list(names) if names else self.get_supported_suites()
        return [self.dispatch(name, plan) for name in selected]

    def register_handler(self, name: str, handler: Callable[[VerifyPlan], _Checks]) -> None:
        """
        注册新的验证套件

        调用时机: 扩展新的不变量检查时
        """
        self.suite_handlers[name] = handler

    def unregister_handler(self, name: str) -> bool:
        if name in self.suite_handlers:
            del self.suite_handlers[name]
            return True
        return False

    def get_supported_suites(self) -> List[str]:
        """获取所有已注册的套件名"""
        return list(self.suite_handlers.keys())

    # ===== 剖面网格 =====

    def _profiles(self, plan: VerifyPlan) -> List[Tuple[float, TorusProfile]]:
        """验收网格：各 (ω, c) × {L0_factor·L₀} ∪ L_values，跳过 L ≤ L₀"""
        key = (plan.contexts, plan.L_values, plan.L0_factor)
        if key not in self._profile_cache:
            profiles = []
            for omega, c in plan.contexts:
                ctx = make_context(omega, c)
                for L in sorted({plan.L0_factor * ctx.L0, *plan.L_values}):
                    if L > ctx.L0:
                        profiles.append((L, solve_eta3(ctx, L)))
            self._profile_cache[key] = profiles
        return self._profile_cache[key]

    # ===== 预定义的套件 =====

    def _suite_elliptic(self, plan: VerifyPlan) -> _Checks:
        """Jacobi 恒等式、端点值与 k = 0、1 处的三角/双曲退化式"""
        checks = _Checks()
        for k in ELLIPTIC_K:
            m = Modulus.from_k(k)
            t = jacobi(ELLIPTIC_U, m)
            checks.add(np.max(np.abs(t.sn ** 2 + t.cn ** 2 - 1.0)), 1e-13, f"sn²+cn²−1 k={k}")
            checks.add(np.max(np.abs(t.dn ** 2 + m.k_sq * t.sn ** 2 - 1.0)), 1e-13, f"dn²+k²sn²−1 k={k}")
            if k < 1.0:
                big_k = complete_K(m)
                at_k = jacobi(big_k, m)
                checks.add(abs(at_k.sn - 1.0), 1e-12, f"sn(K)−1 k={k}")
                checks.add(abs(at_k.cn), 1e-12, f"cn(K) k={k}")
                checks.add(abs(at_k.dn - m.k_prime), 1e-12, f"dn(K)−k′ k={k}")
        zero = Modulus.from_k(0.0)
        checks.add(abs(complete_K(zero) - 0.5 * math.pi), 1e-12, "K(0)−π/2")
        checks.add(abs(complete_E(zero) - 0.5 * math.pi), 1e-12, "E(0)−π/2")
        checks.add(abs(complete_E(Modulus.from_k(1.0)) - 1.0), 1e-12, "E(1)−1")

        circular = jacobi(ELLIPTIC_U, Modulus.from_k(0.0))
        checks.add(np.max(np.abs(circular.sn - np.sin(ELLIPTIC_U))), 1e-12, "sn(u,0)−sin u")
        checks.add(np.max(np.abs(circular.cn - np.cos(ELLIPTIC_U))), 1e-12, "cn(u,0)−cos u")
        checks.add(np.max(np.abs(circular.dn - 1.0)), 1e-12, "dn(u,0)−1")
        hyperbolic = jacobi(ELLIPTIC_U, Modulus.from_k(1.0))
        sech = 1.0 / np.cosh(ELLIPTIC_U)
        checks.add(np.max(np.abs(hyperbolic.sn - np.tanh(ELLIPTIC_U))), 1e-12, "sn(u,1)−tanh u")
        checks.add(np.max(np.abs(hyperbolic.cn - sech)), 1e-12, "cn(u,1)−sech u")
        checks.add(np.max(np.abs(hyperbolic.dn - sech)), 1e-12, "dn(u,1)−sech u")
        return checks

    def _suite_legendre(self, plan: VerifyPlan) -> _Checks:
        """Legendre 关系，含 k′ = 1e−6"""
        checks = _Checks()
        for kp in np.logspace(-6.0, math.log10(0.999999), plan.modulus_count):
            m = Modulus.from_k_prime(float(kp))
            comp = m.complement()
            big_k, big_e = complete_K(m), complete_E(m)
            big_kp, big_ep = complete_K(comp), complete_E(comp)
            residual = big_e * big_kp + big_ep * big_k - big_k * big_kp - 0.5 * math.pi
            checks.add(abs(residual), 1e-12, f"Legendre k′={kp:.3e}")
            checks.add(abs(incomplete_F(0.5 * math.pi, m) - big_k) / big_k, 1e-12, f"F(π/2)−K k′={kp:.3e}")
        g_end = legendre_G(0.5 * math.pi, Modulus.from_k(1.0 / math.sqrt(2.0)))
        checks.add(abs(g_end - 0.5 * math.pi), 1e-12, "G(π/2, 1/√2)−π/2")
        return checks

    def _suite_construction(self, plan: VerifyPlan) -> _Checks:
        """周期反演往返与 Vieta 关系"""
        checks = _Checks()
        for L, p in self._profiles(plan):
            tag = f"(ω,c)=({p.ctx.omega},{p.ctx.c}) L={L:.6g}"
            checks.add(abs(p.T - 2.0 * L) / (2.0 * L), 1e-12, f"|T−2L|/2L {tag}")
            for label, residual in zip(("和", "两两积", "积"), vieta_residuals(p)):
                checks.add(residual, 1e-10, f"Vieta {label} {tag}")
        return checks

    def _suite_residuals(self, plan: VerifyPlan) -> _Checks:
        """ELL 残差与一阶积分残差"""
        checks = _Checks()
        for L, p in self._profiles(plan):
            tag = f"(ω,c)=({p.ctx.omega},{p.ctx.c}) L={L:.6g}"
            grid = sample_torus(p, plan.n)
            checks.add(ode_residual(p, grid), ode_residual_bound(p), f"ELL {tag}")
            fi = float(np.max(first_integral_residual(p, grid.x)))
            checks.add(fi, first_integral_bound(p), f"一阶积分 {tag}")
        return checks

    def _suite_mass(self, plan: VerifyPlan) -> _Checks:
        """质量闭式与梯形求积"""
        checks = _Checks()
        for L, p in self._profiles(plan):
            closed = torus_mass_closed(p)
            quad = quadrature_mass(sample_torus(p, plan.n))
            checks.add(abs(closed - quad) / closed, 1e-9,
                       f"质量 (ω,c)=({p.ctx.omega},{p.ctx.c}) L={L:.6g}")
        return checks

    def _suite_monotonicity(self, plan: VerifyPlan) -> _Checks:
        """(s, η) 网格上的单调性与模量导数的差分对照"""
        checks = _Checks()
        bad_slope = bad_period = bad_trough = 0
        fd_gap = 0.0
        for s in MONOTONICITY_S:
            s = float(s)
            lo, hi = beta0(s), beta1(s)
            etas = lo + (hi - lo) * MONOTONICITY_T
            step = 1e-6 * (hi - lo)
            troughs = []
            for eta in etas:
                eta = float(eta)
                slope = modulus_slope(s, eta)
                bad_slope += slope <= 0.0
                bad_period += period_slope_sign(s, eta) != 1
                troughs.append(xi_normalized(s, eta))
                fd = (normalized_modulus(s, eta + step).k_sq
                      - normalized_modulus(s, eta - step).k_sq) / (2.0 * step)
                fd_gap = max(fd_gap, abs(slope - fd) / max(1.0, slope))
            bad_trough += int(np.sum(np.diff(troughs) >= 0.0))
        checks.count(bad_slope, "dk²/dη ≤ 0 的点数")
        checks.count(bad_period, "dT/dη 符号非正的点数")
        checks.count(bad_trough, "η₂ 非递减的点数")
        checks.add(fd_gap, 1e-6, "dk²/dη 与中心差分的相对差")
        return checks

    def _suite_limits(self, plan: VerifyPlan) -> _Checks:
        """L = limit_L 处的模量、β² 与质量极限；无质量质量差以尾部求积为对照"""
        checks = _Checks()
        L = plan.limit_L
        generic = make_context(*GENERIC_CASE)
        p = solve_eta3(generic, L)
        checks.add(abs(p.k.k - 1.0), 1e-2, "|k−1| (1,0)")
        checks.add(abs(p.beta_sq - 1.0), 1e-2, "|β²−1| (1,0)")
        checks.add(abs(torus_mass_closed(p) - 2.0 * math.pi), 5e-3, "|M−2π| (1,0)")

        massless = make_context(*MASSLESS_CASE)
        q = solve_eta3(massless, L)
        checks.add(abs(q.k.k - 1.0 / math.sqrt(2.0)), 1e-3, "|k−1/√2| (1,2)")
        gap = abs(torus_mass_closed(q) - soliton_mass(massless))
        tail = soliton_tail_mass(massless, L)
        closed_tail = massless_tail_mass(massless, L)
        checks.add(abs(tail - closed_tail) / closed_tail, 1e-6, "尾部质量 求积−闭式 (1,2)")
        checks.add(abs(math.log2(gap / tail)), 1.0, "质量差/尾部质量 偏离因子 (1,2)")
        return checks

    def _suite_convergence(self, plan: VerifyPlan) -> _Checks:
        """各差值列沿 L 单调递减"""
        checks = _Checks()
        for case in (GENERIC_CASE, MASSLESS_CASE):
            ctx = make_context(*case)
            rows = convergence_study(ctx, plan.study_L_list, 3, n=plan.n)
            columns = {"mass_gap": [row.mass_gap for row in rows]}
            for m in range(4):
                columns[f"h{m}_gap"] = [row.h_m_gaps[m] for row in rows]
            for m in range(3):
                columns[f"c{m}_gap"] = [row.sup_gaps[m] for row in rows]
            for j in range(len(rows[0].pointwise_gaps)):
                columns[f"pointwise_{j}"] = [row.pointwise_gaps[j] for row in rows]
            for name, values in columns.items():
                checks.count(_non_increasing_violations(values, plan.gap_floor), f"{name} {case}")
            if case == GENERIC_CASE:
                checks.add(rows[-1].h_m_gaps[0], 1e-2, f"H⁰ 差 L={rows[-1].L} {case}")
        return checks

    def _suite_gauge(self, plan: VerifyPlan) -> _Checks:
        """‖e_L‖_{H⁰} 沿 L 严格递减"""
        checks = _Checks()
        records = gauge_error_study(make_context(*GENERIC_CASE), plan.study_L_list, n=plan.n)
        norms = [record.e_norms[0] for record in records]
        checks.count(_non_increasing_violations(norms, 0.0), "‖e_L‖ 非递减次数")
        return checks
