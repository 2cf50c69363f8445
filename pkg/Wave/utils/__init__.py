"""
Wave 工具模块

包含会话日志、验证套件分发与报告输出。
"""

from .logger import StudyLogger
from .suite_dispatcher import SuiteDispatcher, SuiteResult, VerifyPlan

__all__ = ['StudyLogger', 'SuiteDispatcher', 'SuiteResult', 'VerifyPlan']
