from __future__ import annotations

import logging

import numpy as np

from semigroup_calculus.models import Generator
from semigroup_calculus.services.linalg_core import make_generator

logger = logging.getLogger(__name__)

EIGENVALUE_RANGE = (-3.0, -0.2)
CONDITION_LIMIT = 1e3
MAX_DRAWS = 200


def random_stable_matrix(
    rng: np.random.Generator,
    dim: int,
    *,
    eigenvalue_range: tuple[float, float] = EIGENVALUE_RANGE,
    condition_limit: float = CONDITION_LIMIT,
) -> np.ndarray:
    """``V diag(lambda) V^{-1}`` with real eigenvalues in the range and ``cond(V) <= condition_limit``."""

    if dim < 1:
        raise ValueError("Ensemble dimension must be positive.")
    low, high = eigenvalue_range
    if not low < high < 0:
        raise ValueError("Eigenvalue range must lie strictly in the left half line.")

    eigenvalues = rng.uniform(low, high, size=dim)
    for _ in range(MAX_DRAWS):
        basis = np.eye(dim) + rng.standard_normal((dim, dim)) / np.sqrt(dim)
        if np.linalg.cond(basis) <= condition_limit:
            return basis @ np.diag(eigenvalues) @ np.linalg.inv(basis)
    raise ArithmeticError(f"No eigenvector basis with condition <= {condition_limit:g} after {MAX_DRAWS} draws.")


def random_contraction_matrix(
    rng: np.random.Generator,
    dim: int,
    *,
    eigenvalue_range: tuple[float, float] = EIGENVALUE_RANGE,
) -> np.ndarray:
    """Symmetric negative definite matrix, so ``||e^{tA}|| <= 1``."""

    low, high = eigenvalue_range
    eigenvalues = rng.uniform(low, high, size=dim)
    orthogonal, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    return orthogonal @ np.diag(eigenvalues) @ orthogonal.T


def stable_generator(seed: int, dim: int, *, kind: str = "stable") -> Generator:
    rng = np.random.default_rng(seed)
    if kind == "stable":
        matrix = random_stable_matrix(rng, dim)
    elif kind == "contraction":
        matrix = random_contraction_matrix(rng, dim)
    else:
        raise ValueError(f"Unknown ensemble kind {kind!r}.")
    generator = make_generator(matrix)
    logger.debug("Drew %s generator dim=%d seed=%d (M=%.4g, omega=%.4g).", kind, dim, seed, generator.growth_M, generator.growth_omega)
    return generator


def random_vector(seed: int, dim: int) -> np.ndarray:
    # offset keeps the vector stream independent of the matrix stream
    return np.random.default_rng(seed + 7919).standard_normal(dim)
