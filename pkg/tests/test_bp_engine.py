import math

import numpy as np
import pytest

from semigroup_calculus.services.bp_engine import MAX_LEVY_TRUNCATION, bp_apply, materialize_bernstein, psi_tilde_apply, subordinated_apply
from semigroup_calculus.services.linalg_core import make_generator
from semigroup_calculus.services.quadrature import DivergentTailError
from semigroup_calculus.services.symbols import (
    SubordinationUnavailableError,
    SymbolParameterError,
    build_identity,
    build_log_shift,
    build_neg_frac_power_bernstein,
)
from semigroup_calculus.verification import random_vector, stable_generator

SEEDS = (0, 1, 7)
BETAS = (0.25, 0.5, 0.75)


def test_fractional_power_on_diagonal_generator(diag_generator):
    result = bp_apply(build_neg_frac_power_bernstein(0.5), diag_generator, np.ones(2))

    assert result.is_converged
    assert np.allclose(result.value, [-1.0, -2.0], atol=1e-8)
    assert result.oracle_delta < 1e-7


@pytest.mark.parametrize("beta", [0.25, 0.75])
def test_fractional_power_matches_oracle(stable_8, vector_8, beta):
    result = bp_apply(build_neg_frac_power_bernstein(beta), stable_8, vector_8)

    assert result.oracle_delta < 1e-6 * max(1.0, np.linalg.norm(result.value))


def test_log_shift_on_diagonal_generator(diag_generator):
    result = bp_apply(build_log_shift(), diag_generator, np.ones(2))

    assert np.allclose(result.value, [-math.log(2.0), -math.log(5.0)], atol=1e-8)


def test_identity_atom_returns_generator_action(diag_generator):
    x = np.array([2.0, -1.0])

    result = bp_apply(build_identity(), diag_generator, x)

    assert np.allclose(result.value, diag_generator.entries @ x)
    assert result.panels_used == 0


def test_materialized_log_shift(diag_generator):
    matrix, error = materialize_bernstein(build_log_shift(), diag_generator)

    assert np.allclose(matrix, np.diag([-math.log(2.0), -math.log(5.0)]), atol=1e-8)
    assert error < 1e-8


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_subordination_routes_agree(diag_generator, t):
    psi = build_neg_frac_power_bernstein(0.5)
    expected = [math.exp(-t), math.exp(-2.0 * t)]

    direct = subordinated_apply(psi, t, diag_generator, np.ones(2), route="direct")
    density = subordinated_apply(psi, t, diag_generator, np.ones(2), route="subordination")

    assert np.allclose(direct.value, expected, atol=1e-7)
    assert np.allclose(density.value, expected, atol=1e-7)
    assert density.route == f"subordinated:subordination:t={t:g}"


def test_gamma_subordinator_route(diag_generator):
    result = subordinated_apply(build_log_shift(), 2.0, diag_generator, np.ones(2), route="subordination")

    # (1 - lambda)^{-t}
    assert np.allclose(result.value, [0.25, 0.04], atol=1e-8)


def test_subordination_at_time_zero_is_identity(diag_generator):
    x = np.array([3.0, 4.0])

    result = subordinated_apply(build_log_shift(), 0.0, diag_generator, x)

    assert np.array_equal(result.value, x)
    assert result.value is not x


def test_subordination_rejects_negative_time(diag_generator):
    with pytest.raises(SymbolParameterError):
        subordinated_apply(build_log_shift(), -1.0, diag_generator, np.ones(2))


def test_subordination_rejects_unknown_route(diag_generator):
    with pytest.raises(ValueError):
        subordinated_apply(build_log_shift(), 1.0, diag_generator, np.ones(2), route="series")


def test_density_route_needs_registered_density(diag_generator):
    with pytest.raises(SubordinationUnavailableError):
        subordinated_apply(build_neg_frac_power_bernstein(0.25), 1.0, diag_generator, np.ones(2), route="subordination")


def test_direct_route_works_without_registered_density(diag_generator):
    result = subordinated_apply(build_neg_frac_power_bernstein(0.25), 1.0, diag_generator, np.ones(2))

    expected = [math.exp(-1.0), math.exp(-math.sqrt(2.0))]
    assert np.allclose(result.value, expected, atol=1e-7)
    assert result.oracle_delta < 1e-7


@pytest.mark.parametrize("seed", SEEDS)
@pytest.mark.parametrize("beta", BETAS)
def test_fractional_power_on_random_generators(seed, beta):
    generator, x = stable_generator(seed, 8), random_vector(seed, 8)

    result = bp_apply(build_neg_frac_power_bernstein(beta), generator, x)

    assert result.is_converged
    assert np.all(np.isfinite(result.value))
    assert np.isfinite(result.error_estimate)
    assert result.T_star < MAX_LEVY_TRUNCATION
    assert result.oracle_delta < 1e-6 * max(1.0, np.linalg.norm(result.value))


@pytest.mark.parametrize("seed", SEEDS)
@pytest.mark.parametrize("beta", BETAS)
def test_generator_factors_out_of_bernstein_function(seed, beta):
    generator, x = stable_generator(seed, 8), random_vector(seed, 8)
    psi = build_neg_frac_power_bernstein(beta)

    tilde = psi_tilde_apply(psi, generator, x)
    direct = bp_apply(psi, generator, x, oracle=False)

    assert np.linalg.norm(generator.entries @ tilde.value - direct.value) <= 1e-7 * (1.0 + np.linalg.norm(x))


def test_slow_levy_tail_on_bounded_semigroup_is_not_truncated():
    generator = make_generator(np.diag([0.0, -1.0]))
    psi = build_neg_frac_power_bernstein(0.25)

    with pytest.raises(DivergentTailError):
        bp_apply(psi, generator, np.ones(2))

    result = bp_apply(psi, generator, np.ones(2), best_effort=True)
    assert not result.is_converged
    assert result.value is None


@pytest.mark.parametrize("seed", SEEDS)
def test_subordinated_semigroup_law(seed):
    generator, x = stable_generator(seed, 6), random_vector(seed, 6)
    psi = build_neg_frac_power_bernstein(0.5)

    first = subordinated_apply(psi, 1.0, generator, x)
    composed = subordinated_apply(psi, 0.5, generator, first.value)
    combined = subordinated_apply(psi, 1.5, generator, x)

    assert np.linalg.norm(composed.value - combined.value) <= 1e-7 * (1.0 + np.linalg.norm(x))


@pytest.mark.parametrize("seed", SEEDS)
@pytest.mark.parametrize("psi", [build_neg_frac_power_bernstein(0.5), build_log_shift()], ids=["stable_half", "log_shift"])
def test_subordination_of_contraction_is_contractive(seed, psi):
    generator, x = stable_generator(seed, 6, kind="contraction"), random_vector(seed, 6)

    result = subordinated_apply(psi, 1.0, generator, x)

    assert np.linalg.norm(result.value) <= np.linalg.norm(x) + 10.0 * result.error_estimate + 1e-12
