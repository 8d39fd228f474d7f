from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"
if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from semigroup_calculus.models import QuadratureSpec
from semigroup_calculus.services.linalg_core import make_generator
from semigroup_calculus.verification.ensembles import random_vector, stable_generator


@pytest.fixture
def spec():
    return QuadratureSpec()


@pytest.fixture
def diag_generator():
    return make_generator(np.diag([-1.0, -4.0]))


@pytest.fixture
def stable_8():
    return stable_generator(7, 8)


@pytest.fixture
def vector_8():
    return random_vector(7, 8)
