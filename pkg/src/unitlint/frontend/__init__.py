from unitlint.frontend.canon import StaticInfo, UnresolvedName, VarRegistry, canonicalize
from unitlint.frontend.lexer import LexError, Token, tokenize
from unitlint.frontend.loader import IncludeError, load_unit
from unitlint.frontend.parser import ParseError, parse_program, parse_source
from unitlint.frontend.printer import format_expr, format_program

__all__ = [
    "StaticInfo",
    "UnresolvedName",
    "VarRegistry",
    "canonicalize",
    "LexError",
    "Token",
    "tokenize",
    "IncludeError",
    "load_unit",
    "ParseError",
    "parse_program",
    "parse_source",
    "format_expr",
    "format_program",
]
