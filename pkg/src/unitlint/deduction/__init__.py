from unitlint.deduction.mining import (
    CONVERSION_TABLE,
    DatabaseFormatError,
    DbEntry,
    LinearFit,
    MiningConfig,
    TypeDatabase,
    align_pairs,
    build_type_db,
    filter_candidates,
    mine_approximate,
    mine_eventually,
    mine_linear,
)

__all__ = [
    "CONVERSION_TABLE",
    "DatabaseFormatError",
    "DbEntry",
    "LinearFit",
    "MiningConfig",
    "TypeDatabase",
    "align_pairs",
    "build_type_db",
    "filter_candidates",
    "mine_approximate",
    "mine_eventually",
    "mine_linear",
]
