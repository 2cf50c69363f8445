import json
import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

# 添加项目根目录到Python路径
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from Wave.core.params import make_context, solve_eta3  # noqa: E402

# CI 上剖面求解较慢，关闭 too_slow 健康检查
settings.register_profile("ci", suppress_health_check=(HealthCheck.too_slow,), deadline=None)
settings.register_profile("dev", deadline=None, max_examples=25)
settings.load_profile("ci" if "CI" in os.environ else "dev")


@pytest.fixture(scope="session")
def generic_ctx():
    """(ω, c) = (1, 0)：L₀ = π/2，孤立子质量 2π"""
    return make_context(1.0, 0.0)


@pytest.fixture(scope="session")
def massless_ctx():
    """(ω, c) = (1, 2)：无质量端点，孤立子质量 4π"""
    return make_context(1.0, 2.0)


@pytest.fixture(scope="session")
def generic_profile(generic_ctx):
    return solve_eta3(generic_ctx, 10.0)


@pytest.fixture(scope="session")
def massless_profile(massless_ctx):
    return solve_eta3(massless_ctx, 10.0)


@pytest.fixture
def config_file(tmp_path):
    """写出关闭日志文件、缩小验证网格的测试配置"""
    config = {
        "grid": {"n": 1024, "n_max": 4096, "refine": False},
        "solver": {"rtol": 1e-13, "switch_width": 1e-6, "max_iterations": 400},
        "study": {"L_list": [5.0, 10.0, 20.0], "m_max": 2, "jobs": 1, "pointwise_x": [0.0, 1.0]},
        "verify": {
            "contexts": [[1.0, 0.0], [1.0, 2.0]],
            "L_values": [5.0, 10.0],
            "L0_factor": 1.5,
            "n": 2048,
            "limit_L": 50.0,
            "study_L_list": [5.0, 10.0, 20.0, 40.0],
            "modulus_count": 20,
            "gap_floor": 1e-11,
        },
        "output": {"format": "csv"},
        "logging": {"log_file": None, "log_level": "INFO", "enable_console_output": False},
    }
    path = tmp_path / "wave_config.json"
    path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return str(path)
