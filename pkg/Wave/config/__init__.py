"""
Wave 配置模块

包含配置文件管理与运行配置。
"""

from .settings import ConfigManager, RunConfig, UsageError

__all__ = ['ConfigManager', 'RunConfig', 'UsageError']
