"""
报告输出

把命令结果写成 CSV 或 JSON，并格式化 stderr 诊断信息。

主要功能:
- CSV：一行表头，17 位有效数字科学计数法，LF 行尾，可选 '#' 脚注
- JSON：单个对象 {meta, rows}，浮点数取最短往返表示
- 诊断着色，设置 NO_COLOR 时不着色
"""

import csv
import io
import json
import math
import os
import sys
from typing import Any, Dict, Optional, Sequence, TextIO

CSV_FLOAT_FORMAT = "%.16e"

_COLORS = {"error": "\033[31m", "warning": "\033[33m", "ok": "\033[32m"}
_RESET = "\033[0m"


def format_csv_value(value: Any) -> str:
    """CSV 单元格：浮点数固定 17 位有效数字，其余取 str"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return CSV_FLOAT_FORMAT % value
    return str(value)


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    return value


def render_csv(columns: Sequence[str], rows: Sequence[Dict[str, Any]],
               footer: Optional[Dict[str, Any]] = None) -> str:
    """
    渲染 CSV 文本

    Args:
        columns: 列名，决定列顺序
        rows: 每行一个字典
        footer: 表后以 '# key,value' 形式写出的脚注
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_csv_value(row.get(name)) for name in columns])
    if footer:
        for key, value in footer.items():
            buffer.write(f"# {key},{format_csv_value(value)}\n")
    return buffer.getvalue()


def render_json(meta: Dict[str, Any], rows: Sequence[Dict[str, Any]]) -> str:
    """渲染 JSON 文本，非有限浮点数写为 null"""
    document = {"meta": _json_safe(meta), "rows": _json_safe(list(rows))}
    return json.dumps(document, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def render_report(fmt: str, columns: Sequence[str], rows: Sequence[Dict[str, Any]],
                  meta: Dict[str, Any], footer: Optional[Dict[str, Any]] = None) -> str:
    """
    按格式渲染报告

    JSON 中脚注并入 meta.limits。
    """
    if fmt == "json":
        if footer:
            meta = dict(meta, limits=footer)
        ordered = [{name: row.get(name) for name in columns} for row in rows]
        return render_json(meta, ordered)
    return render_csv(columns, rows, footer)


def write_report(text: str, output: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """
    写出报告文本

    Args:
        text: 已渲染的报告
        output: 输出文件路径；为 None 时写到 stream (默认 stdout)
    """
    if output is None:
        (stream or sys.stdout).write(text)
        return
    directory = os.path.dirname(output)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(output, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def use_color(stream: TextIO) -> bool:
    if "NO_COLOR" in os.environ:
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def format_diagnostic(message: str, level: str = "error", stream: Optional[TextIO] = None) -> str:
    """给诊断信息加等级前缀，终端且未设置 NO_COLOR 时着色"""
    stream = stream or sys.stderr
    text = f"[{level}] {message}"
    if use_color(stream) and level in _COLORS:
        return f"{_COLORS[level]}{text}{_RESET}"
    return text


def emit_diagnostic(message: str, level: str = "error", stream: Optional[TextIO] = None) -> None:
    stream = stream or sys.stderr
    stream.write(format_diagnostic(message, level, stream) + "\n")
