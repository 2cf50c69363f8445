"""
研究引擎

命令行各命令的核心编排器，协调参数求解、剖面求值、泛函计算、验证套件与报告输出。

主要功能:
- solve：单个 L 的剖面参数束、质量与 ODE 残差
- limit-study：长周期收敛表与闭式极限脚注
- verify：运行不变量验证套件并汇总通过/失败
- elliptic-check：对数网格上的完全椭圆积分与 Legendre 残差
- 异常到退出码的映射
"""

import logging
import math
from enum import IntEnum
from typing import Any, Dict, List, Optional

import numpy as np

from .. import __version__
from ..config.settings import ConfigManager, RunConfig, UsageError
from ..utils.logger import StudyLogger
from ..utils.report_writer import emit_diagnostic, render_report, write_report
from ..utils.suite_dispatcher import SuiteDispatcher, VerifyPlan
from .elliptic import Modulus, complete_E, complete_K
from .functionals import (
    convergence_study,
    quadrature_mass,
    soliton_mass,
    torus_mass_closed,
    uniform_bound,
)
from .params import (
    AdmissibilityError,
    EtaRangeError,
    PeriodBoundError,
    WaveContext,
    long_period_limits,
    make_context,
    solve_eta3,
)
from .profiles import (
    SolitonProfile,
    ode_residual,
    refine_ode_residual,
    sample_torus,
    soliton_eval,
    torus_profile_eval,
)


logger = logging.getLogger(__name__)

SOLVE_COLUMNS = (
    "omega", "c", "L", "eta1", "eta2", "eta3", "k", "k_prime", "g", "beta_sq", "T", "C_psi",
    "mass_closed", "mass_quadrature", "ode_residual",
)
PROFILE_COLUMNS = ("x", "phi_L", "phi")
VERIFY_COLUMNS = ("suite", "max_residual", "threshold", "status")
ELLIPTIC_COLUMNS = ("k", "k_prime", "K", "E", "K_prime", "E_prime", "legendre_residual")
LEGENDRE_THRESHOLD = 1e-12


class ExitCode(IntEnum):
    """命令行退出码"""
    OK = 0
    USAGE = 1
    ADMISSIBILITY = 2
    PERIOD_BOUND = 3
    VERIFICATION = 4


def limit_study_columns(m_max: int, n_points: int) -> List[str]:
    """limit-study 的列顺序，随 m_max 与逐点位置数变化"""
    columns = ["L", "eta3", "k", "mass_torus", "mass_gap"]
    columns += [f"h{m}_gap" for m in range(m_max + 1)]
    columns += [f"c{m}_gap" for m in range(min(m_max, 2) + 1)]
    columns += ["ode_residual"]
    columns += [f"pointwise_gap_{j}" for j in range(n_points)]
    columns += ["error"]
    return columns


class StudyEngine:
    """
    波剖面研究引擎

    由 ConfigManager 提供默认参数，按 RunConfig 执行单个命令并返回退出码。
    数据写到 stdout 或 --output 文件，诊断写到 stderr。
    """

    def __init__(self, config_manager: Optional[ConfigManager] = None,
                 study_logger: Optional[StudyLogger] = None):
        """
        初始化研究引擎

        Args:
            config_manager: 配置管理器实例，如果为None则创建新实例
            study_logger: 会话日志，如果为None则按配置创建
        """
        self.config = config_manager or ConfigManager()
        logging_config = self.config.get_logging_config()
        self.logger = study_logger or StudyLogger(logging_config.get("log_file"))
        self.dispatcher = SuiteDispatcher()

    def run(self, cfg: RunConfig) -> int:
        """
        执行一个命令

        Args:
            cfg: 运行配置

        Returns:
            退出码

        调用时机: main 解析完命令行之后
        """
        errors = cfg.validate()
        if cfg.command == "verify" and cfg.suite is not None \
                and cfg.suite not in self.dispatcher.get_supported_suites():
            errors.append(f"未知套件 {cfg.suite!r}，可选: {', '.join(self.dispatcher.get_supported_suites())}")
        if errors:
            for error in errors:
                emit_diagnostic(error)
            return self._finish(cfg, ExitCode.USAGE)

        self.logger.log_event("命令开始", cfg.command, cfg.echo())
        handlers = {
            "solve": self.cmd_solve,
            "limit-study": self.cmd_limit_study,
            "verify": self.cmd_verify,
            "elliptic-check": self.cmd_elliptic_check,
        }
        try:
            code = handlers[cfg.command](cfg)
        except UsageError as exc:
            emit_diagnostic(str(exc))
            code = ExitCode.USAGE
        except AdmissibilityError as exc:
            emit_diagnostic(f"参数不可容许: {exc}")
            code = ExitCode.ADMISSIBILITY
        except PeriodBoundError as exc:
            emit_diagnostic(f"半周期过小: {exc} (L₀ = {exc.L0!r})")
            code = ExitCode.PERIOD_BOUND
        except EtaRangeError as exc:
            emit_diagnostic(f"半周期超出可表示范围: {exc}")
            code = ExitCode.PERIOD_BOUND
        return self._finish(cfg, code)

    def _finish(self, cfg: RunConfig, code: int) -> int:
        self.logger.log_event("命令结束", cfg.command, {"exit_code": int(code)})
        self.logger.log_session_summary(int(code), {"command": cfg.command})
        return int(code)

    def _meta(self, cfg: RunConfig) -> Dict[str, Any]:
        return {"command": cfg.command, "version": __version__, "config": cfg.echo()}

    def _solve(self, ctx: WaveContext, L: float, cfg: RunConfig):
        solver = cfg.solver
        return solve_eta3(
            ctx, L,
            rtol=solver.get("rtol", 1e-13),
            switch_width=solver.get("switch_width", 1e-6),
            max_iter=solver.get("max_iterations", 400),
        )

    # ===== 命令 =====

    def cmd_solve(self, cfg: RunConfig) -> int:
        """
        求解单个 L 的周期剖面并输出参数记录

        调用时机: solve 命令
        """
        ctx = make_context(cfg.omega, cfg.c)
        p = self._solve(ctx, cfg.L, cfg)
        grid = sample_torus(p, cfg.n)
        if cfg.refine:
            residual, n_used = refine_ode_residual(p, cfg.n, cfg.n_max)
            logger.debug("ODE 残差加密到 n=%d", n_used)
        else:
            residual = ode_residual(p, grid)

        record = {
            "omega": ctx.omega, "c": ctx.c, "L": p.L,
            "eta1": p.eta1, "eta2": p.eta2, "eta3": p.eta3,
            "k": p.k.k, "k_prime": p.k.k_prime, "g": p.g, "beta_sq": p.beta_sq,
            "T": p.T, "C_psi": p.C_psi,
            "mass_closed": torus_mass_closed(p),
            "mass_quadrature": quadrature_mass(grid),
            "ode_residual": residual,
        }
        self.logger.log_event("剖面求解", f"L={cfg.L!r}", {"eta3": p.eta3, "k": p.k.k})
        write_report(render_report(cfg.format, SOLVE_COLUMNS, [record], self._meta(cfg)), cfg.output)

        if cfg.profile_output:
            sol = SolitonProfile.for_context(ctx)
            x = grid.x
            table = [
                {"x": float(xi), "phi_L": float(phi_l), "phi": float(phi)}
                for xi, phi_l, phi in zip(x, torus_profile_eval(p, x), soliton_eval(sol, x))
            ]
            write_report(render_report(cfg.format, PROFILE_COLUMNS, table, self._meta(cfg)),
                         cfg.profile_output)
        return ExitCode.OK

    def cmd_limit_study(self, cfg: RunConfig) -> int:
        """
        长周期收敛表，脚注给出闭式极限

        求解失败的行 (L ≤ L₀ 或超出可表示范围) 带 error 标记，命令以退出码 3 结束。
        """
        ctx = make_context(cfg.omega, cfg.c)
        rows = convergence_study(ctx, cfg.L_list, cfg.m_max, n=cfg.n, jobs=cfg.jobs,
                                 pointwise_x=cfg.pointwise_x)
        columns = limit_study_columns(cfg.m_max, len(cfg.pointwise_x))
        table = []
        for row in rows:
            entry: Dict[str, Any] = {
                "L": row.L, "eta3": row.eta3, "k": row.k,
                "mass_torus": row.mass_torus, "mass_gap": row.mass_gap,
                "ode_residual": row.ode_residual, "error": row.error,
            }
            entry.update({f"h{m}_gap": v for m, v in enumerate(row.h_m_gaps)})
            entry.update({f"c{m}_gap": v for m, v in enumerate(row.sup_gaps)})
            entry.update({f"pointwise_gap_{j}": v for j, v in enumerate(row.pointwise_gaps)})
            table.append(entry)

        limits = long_period_limits(ctx)
        footer: Dict[str, Any] = {
            "k_lim": limits.k_lim,
            "beta_sq_lim": math.inf if limits.beta_sq_unbounded else limits.beta_sq_lim,
            "soliton_mass": soliton_mass(ctx),
            "mu1": limits.mu1,
            "eta1_lim": limits.eta1_lim,
            "inv_two_g_lim": limits.inv_two_g_lim,
            "L0": ctx.L0,
        }
        valid = [row for row in rows if row.error is None]
        if valid:
            for m in range(cfg.m_max + 1):
                footer[f"h{m}_uniform_bound"] = uniform_bound(valid, m)
        write_report(render_report(cfg.format, columns, table, self._meta(cfg), footer), cfg.output)

        failed = [row for row in rows if row.error is not None]
        self.logger.log_event("长周期研究", f"{len(rows)} 行", {"failed_rows": [row.L for row in failed]})
        if failed:
            for row in failed:
                emit_diagnostic(f"L = {row.L!r} 求解失败: {row.error}")
            return ExitCode.PERIOD_BOUND
        return ExitCode.OK

    def cmd_verify(self, cfg: RunConfig) -> int:
        """
        运行验证套件，逐套件输出残差、阈值与状态

        调用时机: verify 命令；任一套件失败时退出码为 4
        """
        contexts = None
        if cfg.omega is not None:
            make_context(cfg.omega, cfg.c)
            contexts = [(cfg.omega, cfg.c)]
        plan = VerifyPlan.from_config(cfg.verify, cfg.tolerance, contexts)
        names = [cfg.suite] if cfg.suite else None
        results = self.dispatcher.run(plan, names)

        table = [
            {"suite": r.name, "max_residual": r.max_residual, "threshold": r.threshold,
             "status": "pass" if r.passed else "fail"}
            for r in results
        ]
        write_report(render_report(cfg.format, VERIFY_COLUMNS, table, self._meta(cfg)), cfg.output)
        for r in results:
            self.logger.log_suite(r.name, r.passed, {
                "max_residual": r.max_residual, "threshold": r.threshold, "detail": r.detail,
            })

        failed = [r for r in results if not r.passed]
        if failed:
            for r in failed:
                emit_diagnostic(f"套件 {r.name} 失败: {r.detail} = {r.max_residual!r} > {r.threshold!r}")
            return ExitCode.VERIFICATION
        return ExitCode.OK

    def cmd_elliptic_check(self, cfg: RunConfig) -> int:
        """
        对数间隔的互补模量网格上输出 K、E、K′、E′ 与 Legendre 残差
        """
        count = int(cfg.verify.get("modulus_count", 50))
        threshold = cfg.tolerance if cfg.tolerance is not None else LEGENDRE_THRESHOLD
        table = []
        for kp in np.logspace(-6.0, math.log10(0.999999), count):
            m = Modulus.from_k_prime(float(kp))
            comp = m.complement()
            big_k, big_e = complete_K(m), complete_E(m)
            big_kp, big_ep = complete_K(comp), complete_E(comp)
            residual = big_e * big_kp + big_ep * big_k - big_k * big_kp - 0.5 * math.pi
            table.append({
                "k": m.k, "k_prime": m.k_prime, "K": big_k, "E": big_e,
                "K_prime": big_kp, "E_prime": big_ep, "legendre_residual": residual,
            })
        write_report(render_report(cfg.format, ELLIPTIC_COLUMNS, table, self._meta(cfg)), cfg.output)

        worst = max(abs(row["legendre_residual"]) for row in table)
        if worst > threshold:
            emit_diagnostic(f"Legendre 残差 {worst!r} 超过阈值 {threshold!r}")
            return ExitCode.VERIFICATION
        return ExitCode.OK
