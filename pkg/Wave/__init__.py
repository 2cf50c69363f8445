"""
Wave: 导数非线性薛定谔方程的精确周期行波

由椭圆函数闭式构造环面 [−L, L] 上的单峰周期行波，按半长 L 反解周期映射，
并验证其长周期极限趋于孤立子。

主要特性:
- 自实现的 Jacobi 椭圆函数与完全/不完全椭圆积分
- 周期映射反演与无相消的参数公式
- 剖面、孤立子与行波求值及 ODE 残差验证
- 质量闭式、守恒量与 H^m / C^m 收敛研究
- 可复现的 CSV / JSON 命令行输出

版本: 1.0.0
"""

__version__ = "1.0.0"

from .core.study_engine import StudyEngine
from .core.params import TorusProfile, WaveContext
from .utils.logger import StudyLogger
from .config.settings import ConfigManager, RunConfig

__all__ = [
    'StudyEngine',
    'TorusProfile',
    'WaveContext',
    'StudyLogger',
    'ConfigManager',
    'RunConfig'
]
