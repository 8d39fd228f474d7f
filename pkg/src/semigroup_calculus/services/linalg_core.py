from __future__ import annotations

import logging
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eig, expm, lu_factor, lu_solve, svdvals
from scipy.sparse.linalg import expm_multiply

from semigroup_calculus.config.settings import get_settings
from semigroup_calculus.models import Generator, SpectralData

logger = logging.getLogger(__name__)


class DimensionMismatchError(ValueError):
    def __init__(self, message: str, *, expected: int | None = None, actual: tuple[int, ...] | None = None) -> None:
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class NotBoundedGeneratorError(ValueError):
    """The matrix does not generate a bounded semigroup."""

    def __init__(self, message: str, *, spectral_abscissa: float | None = None) -> None:
        super().__init__(message)
        self.spectral_abscissa = spectral_abscissa


class GrowthProfileError(ValueError):
    pass


class SingularResolventError(ArithmeticError):
    def __init__(self, message: str, *, point: complex | None = None, condition: float | None = None) -> None:
        super().__init__(message)
        self.point = point
        self.condition = condition


class OracleUnavailableError(RuntimeError):
    def __init__(self, message: str, *, condition: float | None = None) -> None:
        super().__init__(message)
        self.condition = condition


class OracleDomainError(ArithmeticError):
    def __init__(self, message: str, *, eigenvalue: complex | None = None) -> None:
        super().__init__(message)
        self.eigenvalue = eigenvalue


def _entries(A: Generator | np.ndarray) -> np.ndarray:
    return A.entries if isinstance(A, Generator) else np.asarray(A)


def operator_norm(A: Generator | np.ndarray) -> float:
    matrix = _entries(A)
    if matrix.size == 0:
        return 0.0
    return float(svdvals(matrix)[0])


def as_vector(A: Generator | np.ndarray, x: np.ndarray) -> np.ndarray:
    """Validate ``x`` (a vector or an n-by-m block) against the dimension of A."""

    dim = _entries(A).shape[0]
    values = np.asarray(x)
    if values.ndim not in (1, 2) or values.shape[0] != dim:
        raise DimensionMismatchError(
            f"Vector of shape {values.shape} does not match generator dimension {dim}.",
            expected=dim,
            actual=values.shape,
        )
    if not np.iscomplexobj(values):
        values = values.astype(float)
    return values


def time_scale(A: Generator | np.ndarray) -> float:
    return 1.0 / (1.0 + operator_norm(A))


def expm_action(A: Generator | np.ndarray, t: float, x: np.ndarray) -> np.ndarray:
    if t < 0:
        raise ValueError(f"Semigroup time must be nonnegative, got {t}.")
    vector = as_vector(A, x)
    if t == 0:
        return vector.copy()

    matrix = _entries(A)
    if matrix.shape[0] <= get_settings().dense_limit:
        return expm(t * matrix) @ vector
    return expm_multiply(t * matrix, vector)


def semigroup_orbit(A: Generator | np.ndarray, ts: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``T(t)x`` for every node in ``ts``; result has shape ``(len(ts), *x.shape)``."""

    times = np.asarray(ts, dtype=float).ravel()
    vector = as_vector(A, x)
    matrix = _entries(A)
    if times.size == 0:
        return np.zeros((0, *vector.shape), dtype=np.result_type(matrix, vector))
    if np.any(times < 0):
        raise ValueError("Semigroup times must be nonnegative.")

    if matrix.shape[0] <= get_settings().dense_limit:
        stack = expm(times[:, None, None] * matrix[None, :, :])
        return stack @ vector

    return np.stack([expm_multiply(moment * matrix, vector) for moment in times])


def phi1_orbit(A: Generator | np.ndarray, us: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``phi_1(uA) y`` with ``phi_1(z) = (e^z - 1)/z``, read off the augmented exponential."""

    times = np.asarray(us, dtype=float).ravel()
    vector = as_vector(A, y)
    matrix = _entries(A)
    block = vector.reshape(vector.shape[0], -1)
    n, m = block.shape
    dtype = np.result_type(matrix, block, float)

    augmented = np.zeros((times.size, n + m, n + m), dtype=dtype)
    augmented[:, :n, :n] = times[:, None, None] * matrix[None, :, :]
    augmented[:, :n, n:] = times[:, None, None] * block[None, :, :]
    # the top-right block of exp([[uA, uY], [0, 0]]) is u * phi_1(uA) Y
    corner = expm(augmented)[:, :n, n:]
    with np.errstate(divide="ignore", invalid="ignore"):
        values = corner / times[:, None, None]
    zero = times == 0
    if np.any(zero):
        values[zero] = block
    return values.reshape((times.size, *vector.shape))


def resolvent_solve(A: Generator | np.ndarray, t: complex, x: np.ndarray) -> np.ndarray:
    """Solve ``(tI - A) y = x``."""

    matrix = _entries(A)
    vector = as_vector(A, x)
    shifted = t * np.eye(matrix.shape[0]) - matrix
    condition = float(np.linalg.cond(shifted))
    limit = get_settings().resolvent_condition_limit
    if not np.isfinite(condition) or condition > limit:
        raise SingularResolventError(
            f"Resolvent at t={t} is singular or ill-conditioned (cond={condition:.3e}).",
            point=t,
            condition=condition,
        )
    factors = lu_factor(shifted)
    return lu_solve(factors, vector)


def resolvent_orbit(A: Generator | np.ndarray, ts: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Batched ``R(t, A)x`` over the nodes ``ts``."""

    times = np.asarray(ts).ravel()
    matrix = _entries(A)
    vector = as_vector(A, x)
    n = matrix.shape[0]
    stack = times[:, None, None] * np.eye(n)[None, :, :] - matrix[None, :, :]
    conditions = np.linalg.cond(stack)
    limit = get_settings().resolvent_condition_limit
    bad = ~np.isfinite(conditions) | (conditions > limit)
    if np.any(bad):
        index = int(np.argmax(bad))
        raise SingularResolventError(
            f"Resolvent at t={times[index]} is singular or ill-conditioned.",
            point=times[index],
            condition=float(conditions[index]),
        )
    block = vector.reshape(n, -1)
    rhs = np.broadcast_to(block, (times.size, *block.shape))
    solved = np.linalg.solve(stack, rhs)
    return solved.reshape((times.size, *vector.shape))


def spectral_abscissa(A: Generator | np.ndarray) -> float:
    return float(np.max(np.linalg.eigvals(_entries(A)).real))


def spectral_decompose(A: Generator | np.ndarray) -> SpectralData:
    matrix = _entries(A)
    eigenvalues, vectors = eig(matrix)
    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order]

    condition = float(np.linalg.cond(vectors))
    limit = get_settings().oracle_condition_limit
    if not np.isfinite(condition) or condition > limit:
        raise OracleUnavailableError(
            f"Eigenvector basis is ill-conditioned (cond={condition:.3e} > {limit:.1e}); oracle unavailable.",
            condition=condition,
        )

    inverse = np.linalg.inv(vectors)
    residual = float(np.linalg.norm(matrix @ vectors - vectors * eigenvalues[None, :], 2))
    scale = max(operator_norm(matrix), np.finfo(float).tiny)
    if residual > 1e-10 * scale and residual > 1e-14:
        raise OracleUnavailableError(
            f"Eigendecomposition residual {residual:.3e} exceeds tolerance.",
            condition=condition,
        )
    return SpectralData(
        eigenvalues=eigenvalues,
        right_vectors=vectors,
        condition_estimate=max(1.0, condition),
        inverse_vectors=inverse,
    )


def oracle_apply(
    A: Generator | np.ndarray,
    f: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    spectral: SpectralData | None = None,
) -> np.ndarray:
    """Ground-truth ``f(A)x = V f(Lambda) V^{-1} x`` for diagonalizable A."""

    matrix = _entries(A)
    vector = as_vector(A, x)
    data = spectral if spectral is not None else spectral_decompose(matrix)

    with np.errstate(all="ignore"):
        values = np.asarray(f(data.eigenvalues.astype(complex)), dtype=complex)
    values = np.broadcast_to(values, data.eigenvalues.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        eigenvalue = complex(data.eigenvalues[int(np.argmax(bad))])
        raise OracleDomainError(f"Function undefined at eigenvalue {eigenvalue}.", eigenvalue=eigenvalue)

    inverse = data.inverse_vectors if data.inverse_vectors is not None else np.linalg.inv(data.right_vectors)
    coefficients = inverse @ vector
    scaled = values.reshape(-1, *([1] * (coefficients.ndim - 1))) * coefficients
    result = data.right_vectors @ scaled

    if not np.iscomplexobj(matrix) and not np.iscomplexobj(vector):
        magnitude = max(1.0, float(np.max(np.abs(result.real))) if result.size else 1.0)
        if float(np.max(np.abs(result.imag), initial=0.0)) <= 1e-10 * magnitude:
            return result.real
    return result


def default_certification_grid(horizon: float | None = None, points: int | None = None) -> np.ndarray:
    settings = get_settings()
    horizon = settings.certification_horizon if horizon is None else horizon
    points = settings.certification_points if points is None else points
    return np.linspace(horizon / points, horizon, points)


def _norm_curve(matrix: np.ndarray, grid: np.ndarray) -> np.ndarray:
    stack = expm(grid[:, None, None] * matrix[None, :, :])
    return np.linalg.norm(stack, ord=2, axis=(1, 2))


def certify_growth(A: Generator | np.ndarray, grid: Sequence[float] | None = None) -> tuple[float, float]:
    """Sampled growth profile ``(M, omega)`` with ``||e^{tA}|| <= M e^{omega t}`` on the grid."""

    matrix = _entries(A)
    if grid is None:
        times = default_certification_grid()
        # resolve short transients of stiff generators
        early = np.geomspace(1e-3 * time_scale(matrix), times[0], 32, endpoint=False)
        times = np.concatenate([early, times])
    else:
        times = np.asarray(grid, dtype=float)
    if times.size == 0 or np.any(np.diff(times) <= 0) or times[0] <= 0:
        raise ValueError("Certification grid must be nonempty, positive and increasing.")

    abscissa = spectral_abscissa(matrix)
    tolerance = 1e-10 * max(1.0, operator_norm(matrix))
    if abscissa > tolerance:
        raise NotBoundedGeneratorError(
            f"Spectral abscissa {abscissa:.3e} > 0: not a bounded-semigroup generator.",
            spectral_abscissa=abscissa,
        )

    norms = _norm_curve(matrix, times)
    omega = min(abscissa, 0.0) if abscissa < -tolerance else 0.0
    for _ in range(400):
        ratio = norms * np.exp(-omega * times)
        peak = int(np.argmax(ratio))
        still_growing = peak == times.size - 1 and ratio[-1] > 1.0 + 1e-9 and times.size > 1
        if not still_growing:
            break
        if omega == 0.0:
            raise NotBoundedGeneratorError(
                "Semigroup norm keeps growing on the certification grid (polynomial growth).",
                spectral_abscissa=abscissa,
            )
        omega *= 0.9
        if abs(omega) < tolerance:
            omega = 0.0
    else:
        raise GrowthProfileError("Could not certify a growth profile on the sampled grid.")

    ratio = norms * np.exp(-omega * times)
    growth_M = max(1.0, float(np.max(ratio)))
    logger.debug("Certified growth profile M=%.6g omega=%.6g (abscissa %.6g).", growth_M, omega, abscissa)
    return growth_M, float(omega)


def fit_decay_profile(A: Generator | np.ndarray, delta: float, grid: Sequence[float] | None = None) -> float:
    """Smallest sampled C with ``||T(t)|| <= C / t**delta``."""

    if delta <= 0:
        raise GrowthProfileError("Decay exponent delta must be positive.")
    matrix = _entries(A)
    abscissa = spectral_abscissa(matrix)
    if abscissa >= 0:
        raise GrowthProfileError("An algebraic decay profile needs a uniformly stable semigroup.")

    times = default_certification_grid() if grid is None else np.asarray(grid, dtype=float)
    # extend until the weighted curve has turned over
    for _ in range(20):
        weighted = _norm_curve(matrix, times) * np.power(times, delta)
        if int(np.argmax(weighted)) < times.size - 1:
            return float(np.max(weighted))
        times = np.concatenate([times, times[-1] + times])
    raise GrowthProfileError("Decay profile did not settle on the certification grid.")


def is_injective(A: Generator | np.ndarray) -> bool:
    matrix = _entries(A)
    singular = svdvals(matrix)
    if singular[0] == 0.0:
        return False
    tolerance = singular[0] * max(matrix.shape) * np.finfo(float).eps
    return bool(singular[-1] > tolerance)


def make_generator(
    entries: np.ndarray,
    *,
    decay_delta: float | None = None,
    decay_C: float | None = None,
    grid: Sequence[float] | None = None,
) -> Generator:
    matrix = np.asarray(entries)
    generator = Generator(entries=matrix, injective=is_injective(matrix))
    growth_M, growth_omega = certify_growth(generator, grid)
    generator = generator.with_profile(growth_M, growth_omega)
    if decay_delta is not None:
        constant = decay_C if decay_C is not None else fit_decay_profile(generator, decay_delta, grid)
        generator = generator.with_decay(constant, decay_delta)
    return generator


def discretized_laplacian(n: int) -> np.ndarray:
    """Dirichlet second-difference operator on n interior points of [0, 1]."""

    if n < 1:
        raise ValueError("Need at least one interior point.")
    h = 1.0 / (n + 1)
    main = -2.0 * np.ones(n)
    off = np.ones(n - 1)
    return (np.diag(main) + np.diag(off, 1) + np.diag(off, -1)) / h**2


def as_generator(A: Generator | np.ndarray) -> Generator:
    """Certified Generator for A; raw arrays and uncertified generators are certified here."""

    if isinstance(A, Generator):
        if A.certified:
            return A
        growth_M, growth_omega = certify_growth(A)
        return A.with_profile(growth_M, growth_omega)
    return make_generator(A)
