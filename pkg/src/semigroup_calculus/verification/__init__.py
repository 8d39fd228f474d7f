from .ensembles import random_vector, stable_generator
from .report import CheckRecord, VerificationReport
from .suites import SUITES, SuiteContext, run_suites

__all__ = [
	"CheckRecord",
	"SUITES",
	"SuiteContext",
	"VerificationReport",
	"random_vector",
	"run_suites",
	"stable_generator",
]
