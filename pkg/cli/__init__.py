from .app import EXIT_INVALID, EXIT_NO_TIPPING, EXIT_NUMERICAL, EXIT_OK, build_parser, main
from .commands import COMMANDS, CommandContext, CommandResult
from .reporting import encode, format_float, write_csv, write_json

__all__ = [
    "COMMANDS",
    "EXIT_INVALID",
    "EXIT_NO_TIPPING",
    "EXIT_NUMERICAL",
    "EXIT_OK",
    "CommandContext",
    "CommandResult",
    "build_parser",
    "encode",
    "format_float",
    "main",
    "write_csv",
    "write_json",
]
