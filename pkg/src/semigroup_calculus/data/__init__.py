from .matrix_io import (
	InvalidMatrixFile,
	OPERATORS_DIR,
	read_operator_csv,
	read_vector_csv,
	shipped_operator,
	write_operator_csv,
	write_vector_csv,
)

__all__ = [
	"InvalidMatrixFile",
	"OPERATORS_DIR",
	"read_operator_csv",
	"read_vector_csv",
	"shipped_operator",
	"write_operator_csv",
	"write_vector_csv",
]
