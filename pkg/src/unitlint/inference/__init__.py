from unitlint.inference.generate import DEFAULT_IGNORE, GenOptions, generate, literal_scale
from unitlint.inference.report import (
    CODES,
    CheckResult,
    Diagnostic,
    UnitReport,
    analyze_file,
    analyze_program,
    check_files,
    dedup,
    diagnostics_for,
)
from unitlint.inference.solver import SolveResult, Solver, solve
from unitlint.inference.terms import (
    ArgMember,
    ArgType,
    Constraint,
    Equal,
    Known,
    Product,
    Quotient,
    Reframe,
    ReturnType,
    SameDimension,
    Subtype,
    Sum,
    Var,
    dump_constraints,
)

__all__ = [
    "DEFAULT_IGNORE",
    "GenOptions",
    "generate",
    "literal_scale",
    "CODES",
    "CheckResult",
    "Diagnostic",
    "UnitReport",
    "analyze_file",
    "analyze_program",
    "check_files",
    "dedup",
    "diagnostics_for",
    "SolveResult",
    "Solver",
    "solve",
    "ArgMember",
    "ArgType",
    "Constraint",
    "Equal",
    "Known",
    "Product",
    "Quotient",
    "Reframe",
    "ReturnType",
    "SameDimension",
    "Subtype",
    "Sum",
    "Var",
    "dump_constraints",
]
