"""
研究会话日志记录器

每次命令行运行对应一个会话文件，记录命令参数、求解诊断与验证结果。
日志只写入会话文件，不进入数据输出。

主要功能:
- 带时间戳的会话文件
- 事件记录 (附加数据以 JSON 写出)
- 套件通过/失败计数
- 会话总结
"""

import datetime
import json
import os
from typing import Any, Dict, List, Optional

RULE = "=" * 60


class StudyLogger:
    """
    研究会话日志记录器

    log_file 为 None 时只计数，不写文件。
    """

    def __init__(self, log_file: Optional[str] = "logs/wave_study.log"):
        """
        Args:
            log_file: 日志文件路径，实际文件名附加会话时间戳
        """
        self.session_start = datetime.datetime.now()
        self.event_count = 0
        self.suite_outcomes: Dict[str, bool] = {}
        self.log_file = self._session_path(log_file) if log_file is not None else None
        if self.log_file is not None:
            os.makedirs(os.path.dirname(self.log_file) or ".", exist_ok=True)
            self._append([RULE, f"新研究会话开始 - {self._stamp(self.session_start)}", RULE])

    @property
    def enabled(self) -> bool:
        return self.log_file is not None

    def log_event(self, event_type: str, description: str, data: Optional[Dict[str, Any]] = None) -> None:
        """
        记录事件

        Args:
            event_type: 事件类型，如 '命令开始'、'剖面求解'、'命令结束'
            description: 事件描述
            data: 附加数据
        """
        self.event_count += 1
        lines = ["", f"[{self._stamp()}] #{self.event_count} {event_type}", f"描述: {description}"]
        if data:
            lines.append(f"数据: {json.dumps(data, ensure_ascii=False, default=str)}")
        lines.append("-" * 30)
        self._append(lines)

    def log_suite(self, name: str, passed: bool, data: Dict[str, Any]) -> None:
        """记录验证套件结果并计入通过/失败统计"""
        self.suite_outcomes[name] = passed
        self.log_event("套件结果", name, dict(data, passed=passed))

    def log_session_summary(self, exit_code: int, run_info: Optional[Dict[str, Any]] = None) -> None:
        """命令结束时写出会话时长、事件数、套件统计与退出码"""
        end = datetime.datetime.now()
        lines = [
            "", RULE, f"会话总结 - {self._stamp(end)}", RULE,
            f"会话时长: {end - self.session_start}",
            f"事件数: {self.event_count}",
        ]
        if self.suite_outcomes:
            failed = sorted(name for name, ok in self.suite_outcomes.items() if not ok)
            lines.append(f"套件: {len(self.suite_outcomes) - len(failed)} 通过, {len(failed)} 失败")
            if failed:
                lines.append(f"失败套件: {', '.join(failed)}")
        lines.append(f"退出码: {exit_code}")
        if run_info:
            lines.append("运行信息:")
            lines.extend(f"  {key}: {value}" for key, value in run_info.items())
        lines += [RULE, ""]
        self._append(lines)

    def get_log_file_path(self) -> Optional[str]:
        return os.path.abspath(self.log_file) if self.enabled else None

    def get_session_info(self) -> Dict[str, Any]:
        return {
            'session_start': self.session_start.strftime('%H:%M:%S'),
            'session_duration': str(datetime.datetime.now() - self.session_start),
            'events': self.event_count,
            'suites_failed': sum(not ok for ok in self.suite_outcomes.values()),
            'log_file': self.get_log_file_path(),
        }

    def _append(self, lines: List[str]) -> None:
        if not self.enabled:
            return
        with open(self.log_file, 'a', encoding='utf-8') as f:
            f.write("\n".join(lines) + "\n")

    @staticmethod
    def _stamp(moment: Optional[datetime.datetime] = None) -> str:
        return (moment or datetime.datetime.now()).strftime('%Y-%m-%d %H:%M:%S')

    def _session_path(self, log_file: str) -> str:
        name, ext = os.path.splitext(log_file)
        return f"{name}_{self.session_start.strftime('%Y%m%d_%H%M%S')}{ext}"
