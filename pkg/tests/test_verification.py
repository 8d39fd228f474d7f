import math

import numpy as np
import pytest

from semigroup_calculus.models import QuadratureSpec
from semigroup_calculus.services.linalg_core import make_generator
from semigroup_calculus.services.symbols import build_frac_power
from semigroup_calculus.verification import SUITES, SuiteContext, VerificationReport, random_vector, run_suites, stable_generator
from semigroup_calculus.verification.ensembles import random_contraction_matrix, random_stable_matrix


def test_registered_suites():
    assert set(SUITES) == {
        "eq1",
        "eq3",
        "eq5",
        "eq7",
        "eq8",
        "thm3",
        "thm4",
        "cor9",
        "ex1",
        "ex2",
        "ex3",
        "ex4",
        "ex5",
        "remark1",
        "alpha-limit",
        "subordination",
        "oracle",
    }


def test_random_stable_matrix_is_reproducible():
    first = random_stable_matrix(np.random.default_rng(4), 5)
    second = random_stable_matrix(np.random.default_rng(4), 5)

    assert np.array_equal(first, second)
    assert np.max(np.linalg.eigvals(first).real) < 0


def test_random_contraction_matrix_is_symmetric_negative_definite():
    matrix = random_contraction_matrix(np.random.default_rng(1), 4)

    assert np.allclose(matrix, matrix.T)
    assert np.max(np.linalg.eigvalsh(matrix)) < 0


def test_stable_generator_rejects_unknown_kind():
    with pytest.raises(ValueError):
        stable_generator(0, 3, kind="normal")


def test_report_records_outcomes():
    report = VerificationReport(seed=0, operator="diag")

    assert report.check("eq1", "small", 1e-10, 1e-8)
    assert not report.check("eq1", "large", 1e-6, 1e-8)
    assert not report.check("ex2", "nan", math.nan, 1.0)
    report.fail("ex4", "suite completed", "boom")

    assert report.suites == ["eq1", "ex2", "ex4"]
    assert [record.check for record in report.failures] == ["large", "nan", "suite completed"]
    assert not report.all_passed


def test_empty_report_does_not_pass():
    assert not VerificationReport(seed=0, operator="").all_passed


def test_suites_pass_on_diagonal_generator(diag_generator):
    ctx = SuiteContext(generator=diag_generator, vector=np.array([1.0, -0.5]), spec=QuadratureSpec())

    report = run_suites(["ex1", "ex2", "eq3", "eq8"], ctx, operator="diag_1_4")

    assert report.records
    assert report.all_passed, [record for record in report.failures]


def test_eq1_uses_context_symbol(diag_generator):
    ctx = SuiteContext(generator=diag_generator, vector=np.ones(2), spec=QuadratureSpec(), symbol=build_frac_power(1.5))

    report = run_suites(["eq1"], ctx)

    assert len(report.records) == 2
    assert all("frac_power(alpha=1.5)" in record.check for record in report.records)
    assert report.all_passed


def test_non_injective_generator_is_reported_in_ex1():
    generator = make_generator(np.diag([0.0, -1.0]))
    ctx = SuiteContext(generator=generator, vector=np.ones(2), spec=QuadratureSpec())

    report = run_suites(["ex1"], ctx)

    assert report.all_passed
    assert report.records[0].check == "non-injective A is reported as non-convergent"


def test_raising_suite_is_recorded_and_others_still_run():
    generator = make_generator(np.diag([0.0, -1.0]))
    ctx = SuiteContext(generator=generator, vector=np.ones(2), spec=QuadratureSpec())

    report = run_suites(["ex4", "ex1"], ctx)

    failure = report.failures[0]
    assert failure.suite == "ex4"
    assert "RuleHypothesisError" in failure.detail
    assert report.suites == ["ex4", "ex1"]


def test_random_context_passes_product_suite():
    ctx = SuiteContext(generator=stable_generator(3, 4), vector=random_vector(3, 4), spec=QuadratureSpec(), seed=3)

    report = run_suites(["thm3"], ctx)

    assert report.all_passed, [record for record in report.failures]


@pytest.mark.parametrize(("seed", "dim"), [(0, 6), (1, 8), (7, 8), (11, 16)])
def test_all_suites_pass_on_random_generators(seed, dim):
    ctx = SuiteContext(generator=stable_generator(seed, dim), vector=random_vector(seed, dim), spec=QuadratureSpec(), seed=seed)

    report = run_suites(list(SUITES), ctx)

    assert set(report.suites) == set(SUITES)
    assert report.all_passed, [record for record in report.failures]
