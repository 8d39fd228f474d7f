from .bp_engine import bp_apply, materialize_bernstein, psi_tilde_apply, subordinated_apply
from .hp_engine import (
	NonInjectiveGeneratorError,
	alpha_limit_check,
	hp_apply,
	hp_apply_by_parts,
	inverse_via_integral,
	neg_frac_power,
	neg_frac_power_shifted,
)
from .linalg_core import (
	DimensionMismatchError,
	GrowthProfileError,
	NotBoundedGeneratorError,
	OracleDomainError,
	OracleUnavailableError,
	SingularResolventError,
	expm_action,
	make_generator,
	oracle_apply,
	resolvent_solve,
	spectral_decompose,
)
from .quadrature import (
	DivergentIntegralError,
	DivergentTailError,
	NonConvergentIntegralError,
	integrate_vector,
	tail_bound_for,
)
from .rules import (
	CompositionRouteUnavailable,
	RuleHypothesisError,
	compose_apply,
	log_inverse,
	multiply_apply,
	product_distribution,
	reciprocal_bernstein_inverse,
)
from .symbols import (
	BernsteinHypothesisError,
	DivergentTransformError,
	MeasureValidationError,
	SubordinationUnavailableError,
	SymbolParameterError,
	UnknownSymbolError,
	catalog_build,
	psi_tilde_density,
	symbol_eval_via_measure,
	volterra_nu,
)

__all__ = [
	"BernsteinHypothesisError",
	"CompositionRouteUnavailable",
	"DimensionMismatchError",
	"DivergentIntegralError",
	"DivergentTailError",
	"DivergentTransformError",
	"GrowthProfileError",
	"MeasureValidationError",
	"NonConvergentIntegralError",
	"NonInjectiveGeneratorError",
	"NotBoundedGeneratorError",
	"OracleDomainError",
	"OracleUnavailableError",
	"RuleHypothesisError",
	"SingularResolventError",
	"SubordinationUnavailableError",
	"SymbolParameterError",
	"UnknownSymbolError",
	"alpha_limit_check",
	"bp_apply",
	"catalog_build",
	"compose_apply",
	"expm_action",
	"hp_apply",
	"hp_apply_by_parts",
	"integrate_vector",
	"inverse_via_integral",
	"log_inverse",
	"make_generator",
	"materialize_bernstein",
	"multiply_apply",
	"neg_frac_power",
	"neg_frac_power_shifted",
	"oracle_apply",
	"product_distribution",
	"psi_tilde_apply",
	"psi_tilde_density",
	"reciprocal_bernstein_inverse",
	"resolvent_solve",
	"spectral_decompose",
	"subordinated_apply",
	"symbol_eval_via_measure",
	"tail_bound_for",
	"volterra_nu",
]
