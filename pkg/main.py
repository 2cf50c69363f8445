#!/usr/bin/env python3
"""
Wave 主程序入口

导数非线性薛定谔方程精确周期行波的构造、验证与长周期研究。

使用方法:
    python main.py solve --omega 1 --c 0 --L 10          # 求解单个剖面
    python main.py limit-study --omega 1 --c 0           # 长周期收敛表
    python main.py verify                                # 运行全部验证套件
    python main.py elliptic-check                        # 椭圆积分与 Legendre 残差
    python main.py --validate-config                     # 验证配置文件
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

# 添加项目根目录到Python路径
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from Wave import __version__
from Wave.config.settings import COMMANDS, OUTPUT_FORMATS, ConfigManager, RunConfig, UsageError
from Wave.core.study_engine import ExitCode, StudyEngine
from Wave.utils.report_writer import emit_diagnostic

LOG_LEVEL_ENV = "WAVE_LOG_LEVEL"


class WaveArgumentParser(argparse.ArgumentParser):
    """用法错误抛出 UsageError，由 main 映射为退出码 1"""

    def error(self, message: str):
        raise UsageError(message)


def setup_argument_parser() -> argparse.ArgumentParser:
    """设置命令行参数解析器"""
    parser = WaveArgumentParser(
        description="Wave: 导数 NLS 精确周期行波的构造与验证",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例用法:
    python main.py solve --omega 1 --c 0 --L 10 --format json
    python main.py limit-study --omega 1 --c 2 --L-list 5,10,20,40
    python main.py verify --suite legendre
    python main.py verify --tolerance 1e-20   # 负对照，预期退出码 4

退出码: 0 成功, 1 用法错误, 2 参数不可容许, 3 半周期过小, 4 验证失败
        """
    )

    parser.add_argument(
        'command',
        nargs='?',
        choices=COMMANDS,
        help='要执行的命令'
    )
    parser.add_argument('--omega', type=float, help='频率 ω')
    parser.add_argument('--c', type=float, help='波速 c')
    parser.add_argument('--L', type=float, help='环面半长 L (solve)')
    parser.add_argument('--L-list', dest='L_list', type=str,
                        help='逗号分隔的升序半长列表 (limit-study)')
    parser.add_argument('--n', type=int, help='网格点数，须为 2 的幂')
    parser.add_argument('--m-max', dest='m_max', type=int, help='H^m 最高阶数 0..3')
    parser.add_argument('--format', choices=OUTPUT_FORMATS, help='输出格式')
    parser.add_argument('--output', type=str, help='输出文件路径 (默认 stdout)')
    parser.add_argument('--profile-output', dest='profile_output', type=str,
                        help='solve 时写出 (x, Φ^L, Φ) 采样表')
    parser.add_argument('--jobs', type=int, help='limit-study 的并发行数')
    parser.add_argument('--suite', type=str, help='verify 只运行指定套件')
    parser.add_argument('--tolerance', type=float, help='覆盖全部验证阈值')

    parser.add_argument(
        '--debug',
        action='store_true',
        help='启用调试日志'
    )
    parser.add_argument(
        '--config-file',
        type=str,
        default=None,
        help='指定配置文件路径 (默认: $WAVE_CONFIG_PATH 或 config/wave_config.json)'
    )
    parser.add_argument(
        '--validate-config',
        action='store_true',
        help='验证配置文件并退出'
    )
    parser.add_argument(
        '--version',
        action='version',
        version=f'Wave v{__version__}'
    )

    return parser


def validate_config(config_file: Optional[str]) -> int:
    """验证配置文件"""
    config_manager = ConfigManager(config_file)
    errors = config_manager.validate_config()

    if errors:
        print("❌ 配置验证失败:")
        for error in errors:
            print(f"  - {error}")
        return ExitCode.USAGE
    print("✅ 配置文件验证通过")
    config_manager.display_config()
    return ExitCode.OK


def configure_logging(config_manager: ConfigManager, debug_mode: bool) -> None:
    """
    按配置设置库日志，--debug 时输出 DEBUG 到 stderr

    环境变量 WAVE_LOG_LEVEL 优先于配置文件中的 log_level。
    """
    logging_config = config_manager.get_logging_config()
    configured = str(logging_config.get("log_level", "INFO")).upper()
    level = (os.environ.get(LOG_LEVEL_ENV) or configured).upper()
    if not isinstance(logging.getLevelName(level), int):
        emit_diagnostic(f"未知日志级别 {level!r}，改用 {configured}", "warning")
        level = configured
    if debug_mode:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr)
    elif logging_config.get("enable_console_output"):
        logging.basicConfig(level=level, stream=sys.stderr)


def check_requirements() -> None:
    """检查运行环境"""
    if sys.version_info < (3, 8):
        raise UsageError("需要Python 3.8或更高版本")
    try:
        import numpy  # noqa: F401
        import scipy  # noqa: F401
    except ImportError as exc:
        raise UsageError(f"缺少必要依赖 ({exc.name})，请运行: pip install -r requirements.txt") from exc


def main(argv: Optional[List[str]] = None) -> int:
    """
    主函数

    Args:
        argv: 命令行参数，None 时取 sys.argv

    Returns:
        退出码
    """
    parser = setup_argument_parser()
    try:
        args = parser.parse_args(argv)
        check_requirements()

        if args.validate_config:
            return validate_config(args.config_file)
        if args.command is None:
            raise UsageError(f"需要命令: {', '.join(COMMANDS)}")

        config_manager = ConfigManager(args.config_file)
        configure_logging(config_manager, args.debug)
        cfg = RunConfig.from_args(args, config_manager)
    except UsageError as exc:
        emit_diagnostic(str(exc))
        return ExitCode.USAGE

    engine = StudyEngine(config_manager)
    try:
        return engine.run(cfg)
    except KeyboardInterrupt:
        emit_diagnostic("运行被用户中断", "warning")
        return ExitCode.USAGE


if __name__ == "__main__":
    sys.exit(int(main()))
