"""Type deduction from traces.

Three rules are tried per candidate variable, in order:

``approximate``
    the variable always tracks a QOI within ``eps_approx`` (relative);
``linear``
    the variable is ``C0 * qoi`` for a conversion factor ``C0`` from the table;
``eventually``
    the values the variable settles on are later reached by the QOI, or the
    other way round.

The first rule with any matching QOI decides; among several matching QOIs the
smallest mean relative error wins, then the QOI name.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from unitlint.deduction import kernels
from unitlint.units import PINNED_LOG10, Frame, UnitError, UnitType, format_scalar, format_unit, parse_scalar, parse_unit_string


def _default_table() -> tuple:
    entries = [(10.0**k, Fraction(k)) for k in range(-9, 10)]
    for key, value in (("60", 60.0), ("3600", 3600.0), ("0.9144", 0.9144), ("0.3048", 0.3048),
                       ("0.0254", 0.0254), ("1609.344", 1609.344)):
        entries.append((value, PINNED_LOG10[key]))
        entries.append((1.0 / value, -PINNED_LOG10[key]))
    return tuple(sorted(entries))


CONVERSION_TABLE = _default_table()


@dataclass(frozen=True)
class MiningConfig:
    eps_approx: float = 0.05
    linear_min_abs_pearson: float = 0.975
    eventually_min_confidence: float = 0.975
    pair_window_ms: int = 500
    small_const_threshold: float = 10
    conversion_table: tuple = CONVERSION_TABLE

    def __post_init__(self):
        for name in ("eps_approx", "linear_min_abs_pearson", "eventually_min_confidence"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        if self.pair_window_ms <= 0:
            raise ValueError("pair_window_ms must be positive")


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    pearson_r: float
    snapped_factor: float | None = None
    snapped_scale: Fraction | None = None
    mean_rel_err: float = 0.0


@dataclass(frozen=True)
class DbEntry:
    var_id: int
    canonical_name: str
    unit: UnitType
    rule: str  # approximate | linear | eventually | manual
    qoi: str
    scale_log10: Fraction = Fraction(0)

    def to_json(self) -> dict:
        return {
            "canonical_name": self.canonical_name,
            "var_id": self.var_id,
            "unit": format_unit(self.unit),
            "frame": str(self.unit.frame),
            "rule": self.rule,
            "qoi": self.qoi,
            "scale_log10": format_scalar(self.scale_log10),
        }

    def describe(self) -> str:
        if self.rule == "linear":
            return f"mined by the linear rule from QOI {self.qoi} (scale 10^{format_scalar(self.scale_log10)})"
        if self.rule in ("approximate", "eventually"):
            return f"mined by the {self.rule} rule from QOI {self.qoi}"
        return "declared in the type database"


class DatabaseFormatError(ValueError):
    pass


@dataclass
class TypeDatabase:
    entries: dict = field(default_factory=dict)  # var_id -> DbEntry

    def __len__(self):
        return len(self.entries)

    def add(self, entry: DbEntry):
        if entry.var_id in self.entries:
            raise ValueError(f"duplicate entry for var id {entry.var_id}")
        self.entries[entry.var_id] = entry

    def by_name(self) -> dict:
        return {e.canonical_name: e for e in self.entries.values()}

    def to_json(self) -> str:
        rows = [self.entries[k].to_json() for k in sorted(self.entries)]
        return json.dumps(rows, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> TypeDatabase:
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DatabaseFormatError(f"invalid JSON: {exc}") from None
        if not isinstance(rows, list):
            raise DatabaseFormatError("type database must be a JSON array")
        db = cls()
        names = set()
        for k, row in enumerate(rows):
            try:
                unit = parse_unit_string(row["unit"]).with_frame(Frame.parse(row.get("frame", "Any")))
                entry = DbEntry(
                    var_id=int(row.get("var_id", k)),
                    canonical_name=str(row["canonical_name"]),
                    unit=unit,
                    rule=str(row.get("rule", "manual")),
                    qoi=str(row.get("qoi", "")),
                    scale_log10=parse_scalar(str(row.get("scale_log10", "0"))),
                )
            except (KeyError, TypeError, ValueError, UnitError) as exc:
                raise DatabaseFormatError(f"entry {k}: {exc}") from None
            if entry.canonical_name in names:
                raise DatabaseFormatError(f"entry {k}: duplicate name {entry.canonical_name}")
            names.add(entry.canonical_name)
            try:
                db.add(entry)
            except ValueError as exc:
                raise DatabaseFormatError(f"entry {k}: {exc}") from None
        return db

    def save(self, path):
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> TypeDatabase:
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


# -- candidate filtering ------------------------------------------------------


def filter_candidates(trace, enum_ids=(), cfg: MiningConfig = MiningConfig()) -> set:
    """Variables worth mining: not enums, seen more than once, not a small constant."""
    var_series, _ = trace.grouped()
    enum_ids = set(enum_ids)
    keep = set()
    for var_id, (_, vs) in var_series.items():
        if var_id in enum_ids or len(vs) < 2:
            continue
        first = vs[0]
        if all(v == first for v in vs) and abs(first) < cfg.small_const_threshold:
            continue
        keep.add(var_id)
    return keep


def align_pairs(series_a, series_b, window_ms: int) -> list:
    """Pair values of two ``(times, values)`` series by nearest timestamp."""
    (ta, va), (tb, vb) = series_a, series_b
    return kernels.align_pairs(ta, va, tb, vb, int(window_ms))


# -- the three rules ----------------------------------------------------------


def approximate_error(var, qoi, cfg: MiningConfig = MiningConfig()) -> float | None:
    """Mean relative error when the approximate rule matches, else ``None``."""
    pairs = align_pairs(var, qoi, cfg.pair_window_ms)
    if len(pairs) < 2:
        return None
    ok, err = kernels.approx_check(pairs, cfg.eps_approx)
    return err if ok else None


def mine_approximate(var, qoi, cfg: MiningConfig = MiningConfig()) -> bool:
    return approximate_error(var, qoi, cfg) is not None


def snap_factor(c0: float, table, eps: float):
    """Closest table entry within ``eps`` relative, as ``(factor, log10)``."""
    best = None
    for factor, scale in table:
        err = abs(c0 / factor - 1.0)
        if err < eps and (best is None or err < best[0]):
            best = (err, factor, scale)
    return None if best is None else best[1:]


def fit_linear(pairs) -> LinearFit | None:
    if len(pairs) < 3:
        return None
    vs = [p[0] for p in pairs]
    qs = [p[1] for p in pairs]
    try:
        slope, intercept = statistics.linear_regression(qs, vs)
        r = statistics.correlation(qs, vs)
    except statistics.StatisticsError:
        return None  # constant on one side
    if not (math.isfinite(slope) and math.isfinite(r)):
        return None
    return LinearFit(slope, intercept, r)


def mine_linear(var, qoi, cfg: MiningConfig = MiningConfig(), conversion_table=None) -> LinearFit | None:
    """Accepted fit of ``var ~ C0 * qoi`` with ``C0`` snapped to the table, else ``None``."""
    table = cfg.conversion_table if conversion_table is None else conversion_table
    pairs = align_pairs(var, qoi, cfg.pair_window_ms)
    fit = fit_linear(pairs)
    if fit is None or abs(fit.pearson_r) < cfg.linear_min_abs_pearson or fit.slope <= 0:
        return None
    mean_abs = sum(abs(p[0]) for p in pairs) / len(pairs)
    if abs(fit.intercept) > cfg.eps_approx * mean_abs:
        return None
    snapped = snap_factor(fit.slope, table, cfg.eps_approx)
    if snapped is None:
        return None
    factor, scale = snapped
    err = sum(kernels.rel_err(v, factor * q) for v, q in pairs) / len(pairs)
    return LinearFit(fit.slope, fit.intercept, fit.pearson_r, factor, scale, err)


def eventually_score(var, qoi, cfg: MiningConfig = MiningConfig()):
    """``(confidence, mean error)`` of the better direction, or ``None`` if inapplicable."""
    best = None
    for a, b in ((var, qoi), (qoi, var)):
        plats = kernels.plateaus(a[0], a[1], cfg.eps_approx)
        if len(plats) < 2:
            continue
        hits, err = kernels.later_hits(plats, b[0], b[1], cfg.eps_approx)
        score = (hits / len(plats), err)
        if best is None or (score[0], -score[1]) > (best[0], -best[1]):
            best = score
    return best


def mine_eventually(var, qoi, cfg: MiningConfig = MiningConfig()) -> bool:
    score = eventually_score(var, qoi, cfg)
    return score is not None and score[0] >= cfg.eventually_min_confidence


# -- database assembly --------------------------------------------------------


def _rule_matches(rule: str, var, qoi, cfg):
    """``(error, scale_log10)`` when ``rule`` matches this pair, else ``None``."""
    if rule == "approximate":
        err = approximate_error(var, qoi, cfg)
        return None if err is None else (err, Fraction(0))
    if rule == "linear":
        fit = mine_linear(var, qoi, cfg)
        return None if fit is None else (fit.mean_rel_err, fit.snapped_scale)
    score = eventually_score(var, qoi, cfg)
    if score is None or score[0] < cfg.eventually_min_confidence:
        return None
    return score[1], Fraction(0)


RULES = ("approximate", "linear", "eventually")


def build_type_db(trace, qoi_decls: dict, cfg: MiningConfig = MiningConfig(), enum_ids=(), names=None) -> TypeDatabase:
    """Mine a :class:`TypeDatabase` from ``trace``.

    ``names`` maps var ids to canonical names (from the registry sidecar);
    ids without a name are recorded as ``#<id>``.
    """
    names = names or {}
    var_series, qoi_series = trace.grouped()
    qois = [(n, qoi_series[n], qoi_decls[n].unit) for n in sorted(qoi_series) if n in qoi_decls]
    db = TypeDatabase()
    for var_id in sorted(filter_candidates(trace, enum_ids, cfg)):
        var = var_series[var_id]
        for rule in RULES:
            found = []
            for qname, qser, qtype in qois:
                m = _rule_matches(rule, var, qser, cfg)
                if m is not None:
                    found.append((m[0], qname, m[1], qtype))
            if found:
                err, qname, scale, qtype = min(found, key=lambda f: (f[0], f[1]))
                # var = C0 * q, so one var unit is 1/C0 of a q unit
                unit = UnitType(qtype.scalar - scale, qtype.exponents, qtype.frame)
                db.add(DbEntry(var_id, names.get(var_id, f"#{var_id}"), unit, rule, qname, scale))
                break
    return db
