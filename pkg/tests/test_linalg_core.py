import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from semigroup_calculus.models import Generator
from semigroup_calculus.services.linalg_core import (
    DimensionMismatchError,
    NotBoundedGeneratorError,
    OracleDomainError,
    OracleUnavailableError,
    SingularResolventError,
    as_generator,
    certify_growth,
    discretized_laplacian,
    expm_action,
    fit_decay_profile,
    is_injective,
    make_generator,
    oracle_apply,
    phi1_orbit,
    resolvent_orbit,
    resolvent_solve,
    semigroup_orbit,
    spectral_decompose,
)

DIM = 4
EIGENVALUES = st.floats(min_value=-3.0, max_value=-0.2)


def _symmetric_stable(eigenvalues, raw):
    orthogonal, _ = np.linalg.qr(raw + 4.0 * np.eye(DIM))
    return orthogonal @ np.diag(eigenvalues) @ orthogonal.T


@seed(1)
@settings(max_examples=25, deadline=None)
@given(
    eigenvalues=arrays(np.float64, (DIM,), elements=EIGENVALUES),
    raw=arrays(np.float64, (DIM, DIM), elements=st.floats(min_value=-1.0, max_value=1.0)),
    s=st.floats(min_value=0.0, max_value=3.0),
    t=st.floats(min_value=0.0, max_value=3.0),
)
def test_semigroup_law_holds(eigenvalues, raw, s, t):
    matrix = _symmetric_stable(eigenvalues, raw)
    x = np.arange(1.0, DIM + 1.0)

    combined = expm_action(matrix, s + t, x)
    stepped = expm_action(matrix, s, expm_action(matrix, t, x))

    assert np.allclose(combined, stepped, atol=1e-10, rtol=1e-10)


@seed(2)
@settings(max_examples=25, deadline=None)
@given(
    eigenvalues=arrays(np.float64, (DIM,), elements=EIGENVALUES),
    raw=arrays(np.float64, (DIM, DIM), elements=st.floats(min_value=-1.0, max_value=1.0)),
    point=st.floats(min_value=-5.0, max_value=-0.1),
)
def test_resolvent_inverts_shifted_operator(eigenvalues, raw, point):
    matrix = _symmetric_stable(eigenvalues, raw) - 3.5 * np.eye(DIM)
    x = np.ones(DIM)

    y = resolvent_solve(matrix, point + 4.0, x)

    assert np.allclose((point + 4.0) * y - matrix @ y, x, atol=1e-10)


def test_expm_action_zero_time_returns_copy():
    x = np.array([1.0, 2.0])

    result = expm_action(np.diag([-1.0, -2.0]), 0.0, x)

    assert np.array_equal(result, x)
    assert result is not x


def test_expm_action_rejects_negative_time():
    with pytest.raises(ValueError):
        expm_action(np.diag([-1.0]), -1.0, np.ones(1))


def test_dimension_mismatch_is_reported():
    with pytest.raises(DimensionMismatchError) as info:
        expm_action(np.diag([-1.0, -2.0]), 1.0, np.ones(3))

    assert info.value.expected == 2


def test_semigroup_orbit_matches_single_actions():
    matrix = np.array([[-1.0, 1.0], [0.0, -2.0]])
    x = np.array([1.0, -1.0])
    times = np.array([0.0, 0.5, 2.0])

    orbit = semigroup_orbit(matrix, times, x)

    assert orbit.shape == (3, 2)
    for row, t in zip(orbit, times):
        assert np.allclose(row, expm(t * matrix) @ x, atol=1e-13)


def test_semigroup_orbit_handles_blocks():
    matrix = np.diag([-1.0, -2.0])
    block = np.eye(2)

    orbit = semigroup_orbit(matrix, np.array([1.0]), block)

    assert orbit.shape == (1, 2, 2)
    assert np.allclose(orbit[0], np.diag(np.exp([-1.0, -2.0])))


def test_phi1_orbit_matches_closed_form():
    matrix = np.diag([-1.0, -4.0])
    y = np.array([1.0, 1.0])
    us = np.array([0.0, 0.5, 3.0])

    values = phi1_orbit(matrix, us, y)

    assert np.allclose(values[0], y)
    for row, u in zip(values[1:], us[1:]):
        expected = (np.exp(u * np.array([-1.0, -4.0])) - 1.0) / (u * np.array([-1.0, -4.0]))
        assert np.allclose(row, expected, atol=1e-13)


def test_resolvent_solve_rejects_spectral_point():
    with pytest.raises(SingularResolventError):
        resolvent_solve(np.diag([-1.0, -2.0]), -1.0, np.ones(2))


def test_resolvent_orbit_matches_pointwise_solves():
    matrix = np.array([[-1.0, 0.5], [0.0, -3.0]])
    x = np.array([2.0, 1.0])
    points = np.array([0.5, 2.0, 10.0])

    batched = resolvent_orbit(matrix, points, x)

    for row, point in zip(batched, points):
        assert np.allclose(row, resolvent_solve(matrix, point, x), atol=1e-13)


def test_spectral_decompose_orders_eigenvalues():
    data = spectral_decompose(np.diag([-4.0, -1.0, -2.0]))

    assert np.allclose(data.eigenvalues.real, [-4.0, -2.0, -1.0])


def test_oracle_unavailable_for_jordan_block():
    with pytest.raises(OracleUnavailableError):
        spectral_decompose(np.array([[-1.0, 1.0], [0.0, -1.0]]))


def test_oracle_apply_returns_real_values_for_real_data():
    result = oracle_apply(np.diag([-1.0, -4.0]), lambda s: (-s) ** -0.5, np.array([1.0, 1.0]))

    assert not np.iscomplexobj(result)
    assert np.allclose(result, [1.0, 0.5])


def test_oracle_domain_error_at_singular_point():
    with pytest.raises(OracleDomainError):
        oracle_apply(np.diag([0.0, -1.0]), lambda s: 1.0 / s, np.ones(2))


def test_certify_growth_of_normal_stable_matrix():
    growth_M, omega = certify_growth(np.diag([-1.0, -4.0]))

    assert growth_M == pytest.approx(1.0)
    assert omega == pytest.approx(-1.0)


def test_certify_growth_bounds_non_normal_transient():
    matrix = np.array([[-1.0, 10.0], [0.0, -2.0]])
    growth_M, omega = certify_growth(matrix)

    assert growth_M > 1.0
    assert omega < 0.0
    for t in (0.1, 0.7, 5.0, 20.0):
        assert np.linalg.norm(expm(t * matrix), 2) <= growth_M * np.exp(omega * t) * (1 + 1e-6)


def test_certify_growth_rejects_unstable_matrix():
    with pytest.raises(NotBoundedGeneratorError) as info:
        certify_growth(np.diag([0.5, -1.0]))

    assert info.value.spectral_abscissa == pytest.approx(0.5)


def test_certify_growth_rejects_nilpotent_growth():
    with pytest.raises(NotBoundedGeneratorError):
        certify_growth(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_make_generator_marks_zero_block_non_injective():
    generator = make_generator(np.array([[0.0, 0.0], [0.0, -1.0]]))

    assert generator.certified
    assert not generator.injective
    assert generator.growth_omega == 0.0
    assert generator.is_contraction


def test_make_generator_fits_decay_profile():
    generator = make_generator(np.diag([-1.0, -4.0]), decay_delta=1.0)

    assert generator.has_decay_profile
    # max of t e^{-t} is 1/e
    assert generator.decay_C == pytest.approx(np.exp(-1.0), rel=1e-3)


def test_fit_decay_profile_needs_uniform_stability():
    with pytest.raises(ValueError):
        fit_decay_profile(np.diag([0.0, -1.0]), 1.0)


def test_is_injective():
    assert is_injective(np.diag([-1.0, -2.0]))
    assert not is_injective(np.zeros((2, 2)))


def test_as_generator_certifies_raw_generator():
    generator = as_generator(Generator(entries=np.diag([-2.0, -3.0])))

    assert generator.certified
    assert generator.growth_omega == pytest.approx(-2.0)


def test_discretized_laplacian_is_negative_definite():
    matrix = discretized_laplacian(5)

    assert np.allclose(matrix, matrix.T)
    assert np.max(np.linalg.eigvalsh(matrix)) < 0
