"""
Wave 核心模块

包含椭圆函数、参数求解、剖面求值、泛函与研究引擎。
"""

from .study_engine import ExitCode, StudyEngine

__all__ = ['ExitCode', 'StudyEngine']
