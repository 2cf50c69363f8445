"""
配置管理模块

负责波剖面研究的配置文件管理与命令行运行配置的构造。
配置文件缺失或损坏时写出默认配置。

主要功能:
- 配置文件加载和保存
- 网格、求解器、研究与验证参数
- 配置验证和默认值
- 命令行参数到 RunConfig 的合并与校验
"""

import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple


logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "config/wave_config.json"
CONFIG_PATH_ENV = "WAVE_CONFIG_PATH"

COMMANDS = ("solve", "verify", "limit-study", "elliptic-check")
OUTPUT_FORMATS = ("csv", "json")


class UsageError(ValueError):
    """命令行用法错误，退出码 1"""


def _is_power_of_two(n: Any) -> bool:
    return isinstance(n, int) and not isinstance(n, bool) and n >= 2 and not n & (n - 1)


def _is_finite_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


class ConfigManager:
    """
    波剖面研究配置管理器

    管理网格大小、求解器容差、长周期研究与验证套件的参数以及日志配置。
    """

    def __init__(self, config_file: Optional[str] = None):
        """
        初始化配置管理器

        Args:
            config_file: 配置文件路径；为 None 时依次取环境变量 WAVE_CONFIG_PATH 与默认路径
        """
        self.config_file = config_file or os.environ.get(CONFIG_PATH_ENV) or DEFAULT_CONFIG_FILE
        self.config = self._load_config()

    def get_grid_config(self) -> Dict[str, Any]:
        """
        获取网格配置

        调用时机: 采样剖面或计算残差前
        """
        return self.config["grid"].copy()

    def get_solver_config(self) -> Dict[str, Any]:
        """获取周期反演求解器配置"""
        return self.config["solver"].copy()

    def get_study_config(self) -> Dict[str, Any]:
        """
        获取长周期研究配置

        Returns:
            包含 L_list、m_max、jobs、pointwise_x 的字典

        调用时机: limit-study 命令未指定对应参数时
        """
        return self.config["study"].copy()

    def get_verify_config(self) -> Dict[str, Any]:
        """获取验证套件配置"""
        return self.config["verify"].copy()

    def get_output_config(self) -> Dict[str, Any]:
        return self.config.get("output", {"format": "csv"}).copy()

    def get_logging_config(self) -> Dict[str, Any]:
        """
        获取日志相关配置

        Returns:
            日志配置字典

        调用时机: 初始化日志系统时
        """
        return dict(self.config.get("logging", self._get_default_logging_config()))

    def display_config(self) -> None:
        """
        在控制台显示当前配置

        调用时机: --validate-config 校验通过后
        """
        grid = self.get_grid_config()
        solver = self.get_solver_config()
        study = self.get_study_config()

        print("\n=== 当前配置 ===")
        print(f"配置文件: {self.config_file}")
        print(f"网格点数: {grid['n']} (上限 {grid['n_max']})")
        print(f"求解器容差: rtol={solver['rtol']} switch_width={solver['switch_width']}")
        print(f"研究半长列表: {study['L_list']}  m_max={study['m_max']}  jobs={study['jobs']}")
        print(f"默认输出格式: {self.get_output_config()['format']}")
        print("=" * 25)

    def validate_config(self) -> List[str]:
        """
        验证配置的有效性

        Returns:
            配置错误列表，空列表表示配置有效

        调用时机: 系统启动前或配置更新后
        """
        errors = []

        grid = self.config.get("grid", {})
        if not _is_power_of_two(grid.get("n")):
            errors.append("grid.n 必须是 2 的幂")
        if not _is_power_of_two(grid.get("n_max")) or grid.get("n_max", 0) < grid.get("n", 0):
            errors.append("grid.n_max 必须是不小于 grid.n 的 2 的幂")

        solver = self.config.get("solver", {})
        if not (_is_finite_number(solver.get("rtol")) and 0.0 < solver["rtol"] < 1e-6):
            errors.append("solver.rtol 必须在 (0, 1e-6) 内")
        if not (_is_finite_number(solver.get("switch_width")) and solver["switch_width"] > 0.0):
            errors.append("solver.switch_width 必须大于0")
        if not (isinstance(solver.get("max_iterations"), int) and solver["max_iterations"] > 0):
            errors.append("solver.max_iterations 必须是正整数")

        study = self.config.get("study", {})
        L_list = study.get("L_list", [])
        if not L_list or not all(_is_finite_number(L) and L > 0 for L in L_list):
            errors.append("study.L_list 必须是非空的正数列表")
        elif list(L_list) != sorted(L_list):
            errors.append("study.L_list 必须升序排列")
        if study.get("m_max") not in (0, 1, 2, 3):
            errors.append("study.m_max 必须在 0..3 内")
        if not (isinstance(study.get("jobs"), int) and study["jobs"] >= 1):
            errors.append("study.jobs 必须是正整数")

        verify = self.config.get("verify", {})
        contexts = verify.get("contexts", [])
        if not contexts or not all(
            isinstance(pair, list) and len(pair) == 2 and all(_is_finite_number(v) for v in pair)
            for pair in contexts
        ):
            errors.append("verify.contexts 必须是 [ω, c] 对的非空列表")
        if not _is_power_of_two(verify.get("n")):
            errors.append("verify.n 必须是 2 的幂")
        if not (_is_finite_number(verify.get("L0_factor")) and verify["L0_factor"] > 1.0):
            errors.append("verify.L0_factor 必须大于1")

        if self.get_output_config().get("format") not in OUTPUT_FORMATS:
            errors.append(f"output.format 必须是 {OUTPUT_FORMATS} 之一")

        log_level = self.get_logging_config().get("log_level", "INFO")
        if not isinstance(logging.getLevelName(str(log_level).upper()), int):
            errors.append(f"logging.log_level {log_level!r} 不是有效的日志级别")

        return errors

    def reset_to_defaults(self) -> None:
        """
        重置为默认配置

        调用时机: 配置损坏或用户要求重置时
        """
        self.config = self._get_default_config()
        self._save_config()
        logger.info("配置已重置为默认值")

    def get_log_file_path(self) -> Optional[str]:
        """获取日志文件路径，None 表示不写文件"""
        return self.get_logging_config().get("log_file")

    def _load_config(self) -> Dict[str, Any]:
        """加载配置文件"""
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                config = json.load(f)

            if self._is_valid_config_structure(config):
                return config
            logger.warning("配置文件结构异常，使用默认配置: %s", self.config_file)
            return self._get_default_config()

        except (FileNotFoundError, json.JSONDecodeError):
            logger.warning("配置文件不存在或格式错误，创建默认配置: %s", self.config_file)
            default_config = self._get_default_config()
            self._save_config_dict(default_config)
            return default_config

    def _save_config(self) -> None:
        """保存当前配置到文件"""
        self._save_config_dict(self.config)

    def _save_config_dict(self, config_dict: Dict[str, Any]) -> None:
        """保存指定配置字典到文件"""
        directory = os.path.dirname(self.config_file)
        if directory:
            os.makedirs(directory, exist_ok=True)

        with open(self.config_file, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(config_dict, f, indent=2, ensure_ascii=False)
            f.write("\n")

    def _get_default_config(self) -> Dict[str, Any]:
        """获取默认配置"""
        return {
            "grid": {
                "n": 2048,
                "n_max": 65536,
                "refine": False
            },
            "solver": {
                "rtol": 1e-13,
                "switch_width": 1e-6,
                "max_iterations": 400
            },
            "study": {
                "L_list": [5.0, 10.0, 20.0, 40.0],
                "m_max": 3,
                "jobs": 1,
                "pointwise_x": [0.0, 1.0, 2.0]
            },
            "verify": {
                "contexts": [[1.0, 0.0], [1.0, 1.0], [1.0, -1.0], [4.0, 2.0], [1.0, 2.0]],
                "L_values": [5.0, 10.0, 25.0, 50.0],
                "L0_factor": 1.5,
                "n": 2048,
                "limit_L": 50.0,
                "study_L_list": [5.0, 10.0, 20.0, 40.0],
                "modulus_count": 50,
                "gap_floor": 1e-11
            },
            "output": {
                "format": "csv"
            },
            "logging": self._get_default_logging_config()
        }

    def _get_default_logging_config(self) -> Dict[str, Any]:
        """获取默认日志配置"""
        return {
            "log_file": "logs/wave_study.log",
            "log_level": "INFO",
            "enable_console_output": False
        }

    def _is_valid_config_structure(self, config: Dict[str, Any]) -> bool:
        """检查配置结构是否有效"""
        required_keys = ["grid", "solver", "study", "verify"]
        return isinstance(config, dict) and all(key in config for key in required_keys)


def parse_float_list(text: str) -> Tuple[float, ...]:
    """
    解析逗号分隔的实数列表

    Raises:
        UsageError: 含有无法解析或非有限的项
    """
    items = [item.strip() for item in text.split(",") if item.strip()]
    try:
        values = tuple(float(item) for item in items)
    except ValueError as exc:
        raise UsageError(f"无法解析列表 {text!r}: {exc}") from exc
    if not all(math.isfinite(v) for v in values):
        raise UsageError(f"列表 {text!r} 含有非有限值")
    return values


@dataclass(frozen=True)
class RunConfig:
    """
    一次命令行运行的完整配置

    命令行未给出的值由配置文件填充；validate() 在任何计算之前报告用法错误。
    """

    command: str
    omega: Optional[float] = None
    c: Optional[float] = None
    L: Optional[float] = None
    L_list: Tuple[float, ...] = ()
    n: int = 2048
    n_max: int = 65536
    refine: bool = False
    m_max: int = 3
    format: str = "csv"
    output: Optional[str] = None
    profile_output: Optional[str] = None
    jobs: int = 1
    suite: Optional[str] = None
    tolerance: Optional[float] = None
    pointwise_x: Tuple[float, ...] = (0.0, 1.0, 2.0)
    solver: Dict[str, Any] = field(default_factory=dict)
    verify: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: Any, config_manager: ConfigManager) -> "RunConfig":
        """
        合并命令行参数与配置文件默认值

        Args:
            args: argparse 解析结果
            config_manager: 提供默认值的配置管理器
        """
        grid = config_manager.get_grid_config()
        study = config_manager.get_study_config()
        L_list = parse_float_list(args.L_list) if args.L_list is not None else tuple(study["L_list"])
        return cls(
            command=args.command,
            omega=args.omega,
            c=args.c,
            L=args.L,
            L_list=L_list,
            n=args.n if args.n is not None else grid["n"],
            n_max=grid["n_max"],
            refine=bool(grid.get("refine", False)),
            m_max=args.m_max if args.m_max is not None else study["m_max"],
            format=args.format or config_manager.get_output_config()["format"],
            output=args.output,
            profile_output=args.profile_output,
            jobs=args.jobs if args.jobs is not None else study["jobs"],
            suite=args.suite,
            tolerance=args.tolerance,
            pointwise_x=tuple(study.get("pointwise_x", (0.0, 1.0, 2.0))),
            solver=config_manager.get_solver_config(),
            verify=config_manager.get_verify_config(),
        )

    def validate(self) -> List[str]:
        """
        检查用法约束

        Returns:
            违规描述列表，空列表表示可以执行
        """
        errors = []
        if self.command not in COMMANDS:
            errors.append(f"未知命令 {self.command!r}")
        for name in ("omega", "c", "L", "tolerance"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                errors.append(f"--{name} 必须是有限实数")

        if self.command == "solve":
            if self.omega is None or self.c is None:
                errors.append("solve 需要 --omega 与 --c")
            if self.L is None:
                errors.append("solve 需要 --L")
        elif self.command == "limit-study":
            if self.omega is None or self.c is None:
                errors.append("limit-study 需要 --omega 与 --c")
            if not self.L_list:
                errors.append("--L-list 不能为空")
            elif list(self.L_list) != sorted(self.L_list):
                errors.append("--L-list 必须升序排列")
        elif self.command == "verify":
            if (self.omega is None) != (self.c is None):
                errors.append("verify 的 --omega 与 --c 必须同时给出")

        if not _is_power_of_two(self.n):
            errors.append(f"--n={self.n!r} 必须是 2 的幂")
        if self.m_max not in (0, 1, 2, 3):
            errors.append(f"--m-max={self.m_max!r} 必须在 0..3 内")
        if self.format not in OUTPUT_FORMATS:
            errors.append(f"--format 必须是 {OUTPUT_FORMATS} 之一")
        if self.jobs < 1:
            errors.append(f"--jobs={self.jobs!r} 必须 ≥ 1")
        if self.tolerance is not None and not self.tolerance > 0.0:
            errors.append("--tolerance 必须大于0")
        return errors

    def echo(self) -> Dict[str, Any]:
        """用于输出 meta 的配置回显，不含输出路径"""
        data = asdict(self)
        data.pop("output")
        data.pop("profile_output")
        data["L_list"] = list(self.L_list)
        data["pointwise_x"] = list(self.pointwise_x)
        return data
