import math

import numpy as np
import pytest
from scipy.integrate import quad

from semigroup_calculus.models import BernsteinSymbol, LaplaceSymbol, MeasureRepr, TailEnvelope
from semigroup_calculus.services.bp_engine import psi_tilde_apply
from semigroup_calculus.services.symbols import (
    CATALOG,
    BernsteinHypothesisError,
    MeasureValidationError,
    SubordinationUnavailableError,
    SymbolParameterError,
    UnknownSymbolError,
    bernstein_eval_via_measure,
    build_exp_tpsi,
    build_frac_power,
    build_from_spec,
    build_inverse,
    build_log_inverse,
    build_log_shift,
    build_neg_frac_power_bernstein,
    build_recip_log,
    build_shift,
    catalog_build,
    certify_bernstein_symbol,
    certify_laplace_symbol,
    psi_tilde_density,
    subordination_measure,
    symbol_eval_via_measure,
    validate_measure,
    volterra_nu,
)
from semigroup_calculus.utils.parsing import parse_symbol_spec


def _stieltjes_part(t):
    # int_0^inf e^{-tu} / (u (log^2 u + pi^2)) du with u = e^w
    return quad(lambda w: math.exp(-t * math.exp(w)) / (w * w + math.pi**2), -np.inf, np.inf, epsabs=1e-12, limit=400)[0]


def test_catalog_lists_every_builder():
    assert set(CATALOG) == {
        "inverse",
        "frac_power",
        "neg_frac_power_bernstein",
        "log_shift",
        "recip_log",
        "exp_tpsi",
        "identity",
        "shift",
    }
    assert CATALOG["frac_power"].parameters == ("alpha",)
    assert CATALOG["neg_frac_power_bernstein"].kind == "bernstein"


def test_catalog_build_rejects_unknown_name():
    with pytest.raises(UnknownSymbolError):
        catalog_build("sqrt")


def test_catalog_build_checks_arity():
    with pytest.raises(SymbolParameterError) as excinfo:
        catalog_build("frac_power")

    assert excinfo.value.name == "frac_power"


@pytest.mark.parametrize(
    ("builder", "value"),
    [
        (build_frac_power, 0.0),
        (build_frac_power, -1.0),
        (build_neg_frac_power_bernstein, 0.0),
        (build_neg_frac_power_bernstein, 1.0),
        (build_shift, -0.5),
    ],
)
def test_builders_reject_parameters_outside_their_range(builder, value):
    with pytest.raises(SymbolParameterError):
        builder(value)


def test_exp_tpsi_rejects_negative_time():
    with pytest.raises(SymbolParameterError):
        build_exp_tpsi(-1.0, build_log_shift())


def test_build_from_spec_nests_bernstein_symbol():
    symbol = build_from_spec(parse_symbol_spec("exp_tpsi:2:neg_frac_power_bernstein:0.5"))

    assert isinstance(symbol, LaplaceSymbol)
    assert symbol.parameters == {"t": 2.0}
    assert symbol.inner.name == "neg_frac_power_bernstein"
    assert symbol.evaluate(-4.0) == pytest.approx(math.exp(-4.0))


def test_build_from_spec_rejects_laplace_inner_symbol():
    with pytest.raises(SymbolParameterError):
        build_from_spec(parse_symbol_spec("exp_tpsi:1:frac_power:0.5"))


def test_labels_carry_parameters():
    assert build_frac_power(0.5).label == "frac_power(alpha=0.5)"
    assert build_inverse().label == "inverse"
    assert build_neg_frac_power_bernstein(0.25).label == "neg_frac_power_bernstein(beta=0.25)"


@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 1.5])
def test_frac_power_measure_reproduces_symbol(alpha):
    deviations = certify_laplace_symbol(build_frac_power(alpha))

    assert set(deviations) == {-0.1, -1.0, -10.0}
    assert max(deviations.values()) < 1e-8


def test_inverse_measure_reproduces_reciprocal():
    value = symbol_eval_via_measure(build_inverse(), -2.0)

    assert value == pytest.approx(-0.5, rel=1e-9)


def test_shift_atom_is_exact():
    assert symbol_eval_via_measure(build_shift(1.5), -2.0) == pytest.approx(math.exp(-3.0), rel=1e-14)


def test_exp_tpsi_stable_half_density_reproduces_symbol():
    symbol = build_exp_tpsi(1.0, build_neg_frac_power_bernstein(0.5))

    deviations = certify_laplace_symbol(symbol, samples=(-0.5, -2.0))

    assert max(deviations.values()) < 1e-8


def test_exp_tpsi_gamma_density_reproduces_symbol():
    symbol = build_exp_tpsi(2.0, build_log_shift())

    # (1 - s)^{-t}
    assert symbol_eval_via_measure(symbol, -1.0) == pytest.approx(0.25, rel=1e-9)


def test_prefactor_applies_to_the_measure_transform():
    recip = build_recip_log()
    log_inv = build_log_inverse()

    assert recip.has_prefactor
    assert recip.evaluate(-1.0) == pytest.approx(-1.0 / math.log(2.0))
    assert log_inv.evaluate(-1.0) == pytest.approx(1.0 / math.log(2.0))
    assert recip.premultiply(np.diag([-1.0, -2.0]), np.ones(2)) == pytest.approx([-2.0, -3.0])


def test_recip_log_measure_reproduces_symbol():
    deviations = certify_laplace_symbol(build_recip_log(), samples=(-1.0,), tolerance=1e-7)

    assert deviations[-1.0] < 1e-7


@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
def test_volterra_nu_zero_matches_stieltjes_form(t):
    expected = math.exp(t) - _stieltjes_part(t)

    assert float(volterra_nu(t, 0.0)) == pytest.approx(expected, rel=1e-8)


LOG_CUTOFF = 200.0


def _volterra_transform(p):
    # t = e^w; below t = e^{-200}, nu(t, -1) t = 1/w^2 + 2 gamma/|w|^3 + O(|w|^-4)
    def integrand(w):
        t = math.exp(w)
        return math.exp(-p * t) * float(volterra_nu(t, -1.0)) * t

    head, _ = quad(integrand, -LOG_CUTOFF, 4.0, points=(-20.0, -5.0, 0.0), limit=400, epsabs=1e-12)
    return head + 1.0 / LOG_CUTOFF + np.euler_gamma / LOG_CUTOFF**2


@pytest.mark.parametrize("p", [1.5, math.e, 3.0])
def test_volterra_nu_laplace_transform_is_reciprocal_log(p):
    assert _volterra_transform(p) == pytest.approx(1.0 / math.log(p), rel=1e-6)


def test_volterra_nu_increases_past_one():
    values = volterra_nu(np.array([1.0, 2.0, 3.0, 5.0, 8.0]), -1.0)

    assert values[0] > 0
    assert np.all(np.diff(values) > 0)


def test_volterra_nu_is_vectorised():
    values = volterra_nu(np.array([0.5, 1.0]), 0.0)

    assert values.shape == (2,)
    assert values[1] > values[0] > 0


@pytest.mark.parametrize(("t", "alpha"), [(0.0, 0.0), (-1.0, 0.0), (1.0, -1.5)])
def test_volterra_nu_rejects_arguments_outside_domain(t, alpha):
    with pytest.raises(ValueError):
        volterra_nu(t, alpha)


def test_validate_measure_flags_wrong_endpoint_exponent():
    measure = MeasureRepr(
        density=lambda t: np.power(np.asarray(t, dtype=float), -0.9),
        p0=0.0,
        envelope=None,
    )

    with pytest.raises(MeasureValidationError):
        validate_measure(measure)


def test_validate_measure_flags_envelope_violation():
    measure = MeasureRepr(
        density=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        p0=0.0,
        envelope=TailEnvelope(1.0, -1.0, 0.0),
    )

    with pytest.raises(MeasureValidationError):
        validate_measure(measure)


def test_log_shift_is_certified_bernstein():
    deviations = certify_bernstein_symbol(build_log_shift())

    assert max(deviations.values()) < 1e-8


def test_bernstein_eval_via_measure_matches_closed_form():
    psi = build_neg_frac_power_bernstein(0.5)

    assert bernstein_eval_via_measure(psi, -4.0) == pytest.approx(-2.0, rel=1e-8)
    assert bernstein_eval_via_measure(psi, 0.0) == 0.0


def test_psi_tilde_needs_psi_of_zero_to_vanish():
    psi = BernsteinSymbol(
        name="killed_identity",
        c0=-1.0,
        levy=MeasureRepr(atoms=((0.0, 1.0),)),
        evaluate=lambda s: -1.0 + np.asarray(s),
    )

    with pytest.raises(BernsteinHypothesisError):
        psi_tilde_density(psi)


def test_psi_tilde_of_fractional_power(diag_generator):
    # psi(s)/s = (-s)^{-1/2}
    result = psi_tilde_apply(build_neg_frac_power_bernstein(0.5), diag_generator, np.ones(2))

    assert result.is_converged
    assert np.allclose(result.value, [1.0, 0.5], atol=1e-8)
    assert result.oracle_delta < 1e-8


def test_psi_tilde_of_identity_is_unit_atom():
    identity = catalog_build("identity")

    symbol = psi_tilde_density(identity)

    assert symbol.measure.atoms == ((0.0, 1.0),)
    assert symbol.measure.density is None


def test_subordination_at_time_zero_is_unit_atom():
    measure = subordination_measure(build_neg_frac_power_bernstein(0.3), 0.0)

    assert measure.atoms == ((0.0, 1.0),)


def test_subordination_without_registered_density():
    with pytest.raises(SubordinationUnavailableError):
        subordination_measure(build_neg_frac_power_bernstein(0.25), 1.0)
