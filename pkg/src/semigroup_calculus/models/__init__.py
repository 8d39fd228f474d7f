from .measures import (
	BernsteinSymbol,
	LaplaceSymbol,
	MeasureRepr,
	ProductSymbol,
	SymbolCatalogEntry,
	TailEnvelope,
)
from .operators import Generator, SpectralData
from .quadrature import QuadratureOutcome, QuadratureSpec, TailBound
from .results import CONVERGED, NON_CONVERGENT, AlphaLimitRow, ApplyResult

__all__ = [
	"AlphaLimitRow",
	"ApplyResult",
	"BernsteinSymbol",
	"CONVERGED",
	"Generator",
	"LaplaceSymbol",
	"MeasureRepr",
	"NON_CONVERGENT",
	"ProductSymbol",
	"QuadratureOutcome",
	"QuadratureSpec",
	"SpectralData",
	"SymbolCatalogEntry",
	"TailBound",
	"TailEnvelope",
]
