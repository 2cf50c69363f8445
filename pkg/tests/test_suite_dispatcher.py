import math

import pytest

from Wave.config.settings import ConfigManager
from Wave.utils.suite_dispatcher import (
    MONOTONICITY_S,
    SuiteDispatcher,
    SuiteResult,
    VerifyPlan,
    _Checks,
    _non_increasing_violations,
)

SMALL_PLAN = VerifyPlan(contexts=((1.0, 0.0), (1.0, 2.0)), L_values=(5.0, 10.0), n=2048, modulus_count=20)


@pytest.fixture(scope="module")
def dispatcher():
    return SuiteDispatcher()


def test_supported_suites(dispatcher):
    assert dispatcher.get_supported_suites() == [
        "elliptic", "legendre", "construction", "residuals", "mass",
        "monotonicity", "limits", "convergence", "gauge",
    ]


def test_plan_from_config(config_file):
    verify = ConfigManager(config_file).get_verify_config()
    plan = VerifyPlan.from_config(verify, 1e-3)
    assert plan.contexts == ((1.0, 0.0), (1.0, 2.0))
    assert plan.L_values == (5.0, 10.0)
    assert plan.tolerance == 1e-3
    overridden = VerifyPlan.from_config(verify, None, [(4, 2)])
    assert overridden.contexts == ((4.0, 2.0),)


def test_non_increasing_violations():
    assert _non_increasing_violations([3.0, 2.0, 1.0], 0.0) == 0
    assert _non_increasing_violations([3.0, 3.0, 1.0], 0.0) == 1
    assert _non_increasing_violations([1e-3, 1e-12, 2e-12], 1e-11) == 0
    assert _non_increasing_violations([1e-3, 1e-12, 2e-11], 1e-11) == 1


def test_checks_pick_worst_ratio():
    checks = _Checks()
    checks.add(1e-13, 1e-12, "small")
    checks.add(5e-10, 1e-9, "half")
    result = checks.result("demo", None)
    assert result == SuiteResult("demo", 5e-10, 1e-9, True, "half")
    checks.count(1, "violations")
    assert not checks.result("demo", None).passed


def test_checks_tolerance_override():
    checks = _Checks()
    checks.add(1e-13, 1e-12, "small")
    result = checks.result("demo", 1e-20)
    assert not result.passed
    assert result.threshold == 1e-20


def test_checks_counts_ignore_tolerance_override():
    checks = _Checks()
    checks.count(3, "violations")
    result = checks.result("demo", 10.0)
    assert not result.passed
    assert result.threshold == 0.0


def test_checks_non_finite_fail():
    checks = _Checks()
    checks.add(math.nan, 1.0, "nan")
    assert not checks.result("demo", None).passed


def test_register_handler(dispatcher):
    def always_ok(plan):
        checks = _Checks()
        checks.add(0.0, 1.0, "zero")
        return checks

    dispatcher.register_handler("noop", always_ok)
    assert dispatcher.dispatch("noop", SMALL_PLAN).passed
    assert dispatcher.unregister_handler("noop")
    assert not dispatcher.unregister_handler("noop")
    with pytest.raises(KeyError):
        dispatcher.dispatch("noop", SMALL_PLAN)


@pytest.mark.parametrize("name", [
    "elliptic", "legendre", "construction", "residuals", "mass", "monotonicity", "limits", "gauge",
])
def test_suites_pass(dispatcher, name):
    result = dispatcher.dispatch(name, SMALL_PLAN)
    assert result.passed, f"{result.detail}: {result.max_residual} > {result.threshold}"


def test_convergence_suite_passes(dispatcher):
    plan = VerifyPlan(contexts=((1.0, 0.0),), study_L_list=(5.0, 10.0, 20.0, 40.0))
    result = dispatcher.dispatch("convergence", plan)
    assert result.passed, result.detail


def test_run_selected_suites(dispatcher):
    results = dispatcher.run(SMALL_PLAN, ["legendre", "mass"])
    assert [r.name for r in results] == ["legendre", "mass"]


def test_monotonicity_grid_spans_admissible_slopes():
    assert MONOTONICITY_S[-1] == 1.0
    assert -1.0 < MONOTONICITY_S[0] < -0.98


def test_legendre_suite_reaches_small_complementary_modulus(dispatcher):
    plan = VerifyPlan(contexts=((1.0, 0.0),), modulus_count=5)
    result = dispatcher.dispatch("legendre", plan)
    assert result.passed, f"{result.detail}: {result.max_residual} > {result.threshold}"
    assert result.max_residual < 5e-13
