import math

import numpy as np
import pytest

from semigroup_calculus.models import NON_CONVERGENT
from semigroup_calculus.services.hp_engine import (
    NonInjectiveGeneratorError,
    alpha_limit_bound,
    alpha_limit_check,
    alpha_limit_monotone,
    hp_apply,
    hp_apply_by_parts,
    inverse_via_integral,
    neg_frac_power,
    neg_frac_power_shifted,
)
from semigroup_calculus.services.linalg_core import DimensionMismatchError, GrowthProfileError, make_generator
from semigroup_calculus.services.quadrature import DivergentIntegralError
from semigroup_calculus.services.symbols import (
    MeasureValidationError,
    build_exp_tpsi,
    build_frac_power,
    build_inverse,
    build_neg_frac_power_bernstein,
    build_shift,
)


@pytest.fixture
def zero_block():
    return make_generator(np.diag([0.0, -1.0]))


def test_frac_power_on_diagonal_generator(diag_generator):
    result = hp_apply(build_frac_power(0.5), diag_generator, np.ones(2))

    assert result.is_converged
    assert np.allclose(result.value, [1.0, 0.5], atol=1e-9)
    assert result.oracle_delta < 1e-9
    assert result.error_estimate <= result.tolerance
    assert result.T_star >= 1.0
    assert result.panels_used > 0


def test_block_input_applies_column_by_column(diag_generator):
    result = hp_apply(build_frac_power(0.5), diag_generator, np.eye(2))

    assert result.value.shape == (2, 2)
    assert np.allclose(result.value, np.diag([1.0, 0.5]), atol=1e-9)


def test_vector_dimension_is_checked(diag_generator):
    with pytest.raises(DimensionMismatchError):
        hp_apply(build_frac_power(0.5), diag_generator, np.ones(3))


def test_shift_atom_is_the_semigroup(diag_generator):
    result = hp_apply(build_shift(0.5), diag_generator, np.ones(2))

    assert np.allclose(result.value, [math.exp(-0.5), math.exp(-2.0)], rtol=1e-12)
    assert result.panels_used == 0


def test_subordinated_symbol_on_diagonal_generator(diag_generator):
    symbol = build_exp_tpsi(1.0, build_neg_frac_power_bernstein(0.5))

    result = hp_apply(symbol, diag_generator, np.ones(2))

    assert np.allclose(result.value, [math.exp(-1.0), math.exp(-2.0)], atol=1e-9)


def test_inverse_of_diagonal_generator(diag_generator):
    result = inverse_via_integral(diag_generator, np.ones(2))

    assert result.route == "inverse"
    assert np.allclose(result.value, [-1.0, -0.25], atol=1e-9)
    assert result.diagnostics["residual"] < 1e-8


def test_inverse_of_non_injective_generator_raises(zero_block):
    with pytest.raises(NonInjectiveGeneratorError):
        inverse_via_integral(zero_block, np.ones(2))


def test_inverse_of_non_injective_generator_best_effort(zero_block):
    result = inverse_via_integral(zero_block, np.ones(2), best_effort=True)

    assert result.domain_verdict == NON_CONVERGENT
    assert result.value is None


def test_divergent_tail_is_reported_not_truncated(zero_block):
    with pytest.raises(DivergentIntegralError):
        hp_apply(build_inverse(), zero_block, np.ones(2))

    result = hp_apply(build_inverse(), zero_block, np.ones(2), best_effort=True)

    assert not result.is_converged
    assert result.notes


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_shifted_construction_agrees_with_gamma_formula(stable_8, vector_8, alpha):
    direct = neg_frac_power(stable_8, alpha, vector_8)
    shifted = neg_frac_power_shifted(stable_8, alpha, vector_8)

    assert np.linalg.norm(direct.value - shifted.value) < 1e-8 * (1.0 + np.linalg.norm(vector_8))
    assert direct.oracle_delta < 1e-7 * max(1.0, np.linalg.norm(direct.value))


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_by_parts_route_agrees_with_density_route(diag_generator, alpha):
    symbol = build_frac_power(alpha)

    direct = hp_apply(symbol, diag_generator, np.array([1.0, -2.0]))
    parts = hp_apply_by_parts(symbol, diag_generator, np.array([1.0, -2.0]))

    assert parts.route.startswith("by_parts")
    assert np.allclose(direct.value, parts.value, atol=1e-9)


def test_by_parts_needs_an_atomless_measure(diag_generator):
    with pytest.raises(MeasureValidationError):
        hp_apply_by_parts(build_shift(1.0), diag_generator, np.ones(2))


def test_alpha_limit_rows_are_bounded_and_monotone(diag_generator):
    rows = alpha_limit_check(diag_generator, np.ones(2), (0.5, 0.25, 0.1, 0.05))

    assert [row.alpha for row in rows] == [0.5, 0.25, 0.1, 0.05]
    assert all(row.within_bound for row in rows)
    assert rows[0].deviation == pytest.approx(0.5, abs=1e-8)
    assert alpha_limit_monotone(rows)


def test_alpha_limit_needs_alpha_below_delta(diag_generator):
    with pytest.raises(GrowthProfileError):
        alpha_limit_check(diag_generator, np.ones(2), (1.0,))


def test_alpha_limit_needs_a_contraction():
    generator = make_generator(np.array([[-1.0, 10.0], [0.0, -2.0]]))

    with pytest.raises(GrowthProfileError):
        alpha_limit_check(generator, np.ones(2), (0.5,))


def test_alpha_limit_bound_formula():
    bound = alpha_limit_bound(0.5, constant=1.0, delta=1.0, defect=3.0, x_norm=2.0)

    expected = (3.0 / 1.5 + 2.0 / 0.5 + 2.0 * math.exp(-1.0)) / math.gamma(0.5)
    assert bound == pytest.approx(expected)
