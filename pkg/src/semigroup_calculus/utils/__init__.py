from .parsing import (
	InvalidComplexToken,
	InvalidSuiteList,
	InvalidSymbolSpec,
	SymbolSpec,
	format_scalar,
	parse_complex_token,
	parse_suite_list,
	parse_symbol_spec,
)

__all__ = [
	"InvalidComplexToken",
	"InvalidSuiteList",
	"InvalidSymbolSpec",
	"SymbolSpec",
	"format_scalar",
	"parse_complex_token",
	"parse_suite_list",
	"parse_symbol_spec",
]
