from .app import build_parser, main
from .commands import EXIT_DIVERGENT, EXIT_INPUT, EXIT_OK, EXIT_ORACLE, EXIT_VERIFY

__all__ = ["EXIT_DIVERGENT", "EXIT_INPUT", "EXIT_OK", "EXIT_ORACLE", "EXIT_VERIFY", "build_parser", "main"]
