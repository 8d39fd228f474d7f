import math

import numpy as np

from semigroup_calculus.models import ApplyResult


def test_converged_result_keeps_diagnostics():
    result = ApplyResult.converged(np.array([1.0, 0.5]), error_estimate=1e-12, T_star=40.0, panels_used=12, route="hp")

    assert result.is_converged
    assert result.T_star == 40.0
    assert result.panels_used == 12


def test_non_finite_value_is_downgraded():
    result = ApplyResult.converged(np.array([1.0, math.nan]), error_estimate=1e-12, T_star=3.5e41, route="bp")

    assert not result.is_converged
    assert result.domain_verdict == "non_convergent"
    assert result.value is None
    assert result.route == "bp"
    assert result.notes == ("non-finite value or error estimate",)


def test_non_finite_error_estimate_is_downgraded():
    result = ApplyResult.converged(np.ones(2), error_estimate=math.nan)

    assert not result.is_converged
    assert math.isinf(result.error_estimate)
