"""Unit types: a log10 scale factor, an SI exponent vector and a frame of reference.

A unit type is written ``(scalar_log10, exponents, frame)``.  The scale is kept
as an exact :class:`~fractions.Fraction` holding log10 of the multiple, so a
centimeter is ``-2`` on the meter axis and multiplying units adds scales.

The mass base is the gram.  Exponent order is fixed by :data:`BASES`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

__all__ = [
    "BASES",
    "ANY",
    "Frame",
    "UnitType",
    "DIMENSIONLESS",
    "UnitError",
    "DimensionMismatch",
    "FrameMismatch",
    "EmptyComplement",
    "UnknownUnit",
    "subtype",
    "mul",
    "div",
    "add",
    "sub",
    "frame_meet",
    "frame_join",
    "frame_le",
    "frame_complement",
    "parse_unit_string",
    "format_unit",
    "format_scalar",
    "parse_scalar",
    "VOCABULARY",
    "PINNED_LOG10",
]

BASES = ("m", "s", "mol", "A", "K", "cd", "g")
_NBASES = len(BASES)


class UnitError(Exception):
    """Base class for unit algebra failures."""


class DimensionMismatch(UnitError):
    def __init__(self, left, right):
        super().__init__(f"dimension mismatch: {left} vs {right}")
        self.left = left
        self.right = right


class FrameMismatch(UnitError):
    def __init__(self, left, right):
        super().__init__(f"frame mismatch: {left} vs {right}")
        self.left = left
        self.right = right


class EmptyComplement(UnitError):
    pass


class UnknownUnit(UnitError):
    def __init__(self, atom: str):
        super().__init__(f"unknown unit {atom!r}")
        self.atom = atom


# ---------------------------------------------------------------------------
# Frames


@dataclass(frozen=True)
class Frame:
    """A frame specifier.

    ``names is None`` means Any (the top of the lattice).  Otherwise ``names``
    is the non-empty set of frames the value may be in; a single name is a
    concrete frame.
    """

    names: frozenset | None = None

    def __post_init__(self):
        if self.names is not None:
            if not isinstance(self.names, frozenset):
                object.__setattr__(self, "names", frozenset(self.names))
            if not self.names:
                raise ValueError("a frame set must be non-empty")

    @classmethod
    def concrete(cls, name: str) -> Frame:
        return cls(frozenset([name]))

    @classmethod
    def one_of(cls, names: Iterable[str]) -> Frame:
        return cls(frozenset(names))

    @classmethod
    def parse(cls, text: str | None) -> Frame:
        """Parse ``Any``, ``NAME`` or ``{A,B}`` (also ``A,B``)."""
        if text is None:
            return ANY
        text = text.strip()
        if not text or text.lower() == "any":
            return ANY
        text = text.strip("{}")
        names = [n.strip() for n in text.split(",") if n.strip()]
        if not names:
            raise ValueError(f"empty frame specifier {text!r}")
        return cls(frozenset(names))

    @property
    def is_any(self) -> bool:
        return self.names is None

    @property
    def is_concrete(self) -> bool:
        return self.names is not None and len(self.names) == 1

    def __str__(self) -> str:
        if self.names is None:
            return "Any"
        if len(self.names) == 1:
            return next(iter(self.names))
        return "{" + ",".join(sorted(self.names)) + "}"

    def __repr__(self) -> str:
        return f"Frame({self})"


ANY = Frame()


def frame_le(f1: Frame, f2: Frame) -> bool:
    """Lattice order: ``f1`` is at or below ``f2``."""
    if f2.names is None:
        return True
    if f1.names is None:
        return False
    return f1.names <= f2.names


def frame_meet(f1: Frame, f2: Frame) -> Frame:
    if f1.names is None:
        return f2
    if f2.names is None:
        return f1
    common = f1.names & f2.names
    if not common:
        raise FrameMismatch(f1, f2)
    return Frame(common)


def frame_join(f1: Frame, f2: Frame) -> Frame:
    if f1.names is None or f2.names is None:
        return ANY
    return Frame(f1.names | f2.names)


def frame_complement(f: Frame, universe: Iterable[str]) -> Frame:
    if f.names is None:
        raise EmptyComplement("the complement of Any is empty")
    rest = frozenset(universe) - f.names
    if not rest:
        raise EmptyComplement(f"complement of {f} in {sorted(universe)} is empty")
    return Frame(rest)


# ---------------------------------------------------------------------------
# Unit types

Exponents = tuple


@dataclass(frozen=True)
class UnitType:
    scalar: Fraction = Fraction(0)
    exponents: Exponents = (0,) * _NBASES
    frame: Frame = ANY

    def __post_init__(self):
        if isinstance(self.scalar, float):
            raise TypeError("unit scalars must be exact rationals, not floats")
        if not isinstance(self.scalar, Fraction):
            object.__setattr__(self, "scalar", Fraction(self.scalar))
        exps = tuple(int(e) for e in self.exponents)
        if len(exps) != _NBASES:
            raise ValueError(f"expected {_NBASES} exponents, got {len(exps)}")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def base(cls, name: str, power: int = 1, scalar=0, frame: Frame = ANY) -> UnitType:
        exps = [0] * _NBASES
        exps[BASES.index(name)] = power
        return cls(Fraction(scalar), tuple(exps), frame)

    @property
    def dimension(self) -> tuple:
        return (self.scalar, self.exponents)

    def with_frame(self, frame: Frame) -> UnitType:
        return UnitType(self.scalar, self.exponents, frame)

    def same_dimension(self, other: UnitType) -> bool:
        return self.scalar == other.scalar and self.exponents == other.exponents

    def __mul__(self, other: UnitType) -> UnitType:
        return mul(self, other)

    def __truediv__(self, other: UnitType) -> UnitType:
        return div(self, other)

    def __str__(self) -> str:
        return f"({format_unit(self)}, {self.frame})"


DIMENSIONLESS = UnitType()


def subtype(u1: UnitType, u2: UnitType) -> bool:
    return u1.same_dimension(u2) and frame_le(u1.frame, u2.frame)


def mul(u1: UnitType, u2: UnitType) -> UnitType:
    frame = frame_meet(u1.frame, u2.frame)
    exps = tuple(a + b for a, b in zip(u1.exponents, u2.exponents))
    return UnitType(u1.scalar + u2.scalar, exps, frame)


def div(u1: UnitType, u2: UnitType) -> UnitType:
    frame = frame_meet(u1.frame, u2.frame)
    exps = tuple(a - b for a, b in zip(u1.exponents, u2.exponents))
    return UnitType(u1.scalar - u2.scalar, exps, frame)


def add(u1: UnitType, u2: UnitType) -> UnitType:
    """Sum type: the larger operand under the subtype order."""
    if subtype(u1, u2):
        return u2
    if subtype(u2, u1):
        return u1
    if not u1.same_dimension(u2):
        raise DimensionMismatch(u1, u2)
    raise FrameMismatch(u1, u2)


sub = add

# ---------------------------------------------------------------------------
# Vocabulary

# log10 of non-decimal scale factors, pinned to 20 significant digits so that
# equality stays exact and reproducible.
PINNED_LOG10 = {
    "60": Fraction("1.7781512503836436325"),
    "3600": Fraction("3.5563025007672872650"),
    "pi/180": Fraction("-1.7581226324091722155"),
    "0.9144": Fraction("-0.038863782612774675522"),
    "0.3048": Fraction("-0.51598503733243711282"),
    "0.0254": Fraction("-1.5951662833800619405"),
    "1609.344": Fraction("3.2066488852013751461"),
}

_DEG = PINNED_LOG10["pi/180"]

# atom -> (scalar_log10, base name or None, power)
_ATOMS = {
    "1": (0, None, 0),
    "rad": (0, None, 0),
    "deg": (_DEG, None, 0),
    "cdeg": (_DEG - 2, None, 0),
    "degE7": (_DEG - 7, None, 0),
    "m": (0, "m", 1),
    "cm": (-2, "m", 1),
    "mm": (-3, "m", 1),
    "km": (3, "m", 1),
    "yd": (PINNED_LOG10["0.9144"], "m", 1),
    "ft": (PINNED_LOG10["0.3048"], "m", 1),
    "in": (PINNED_LOG10["0.0254"], "m", 1),
    "mi": (PINNED_LOG10["1609.344"], "m", 1),
    "s": (0, "s", 1),
    "ms": (-3, "s", 1),
    "us": (-6, "s", 1),
    "min": (PINNED_LOG10["60"], "s", 1),
    "h": (PINNED_LOG10["3600"], "s", 1),
    "Hz": (0, "s", -1),
    "g": (0, "g", 1),
    "kg": (3, "g", 1),
    "mol": (0, "mol", 1),
    "A": (0, "A", 1),
    "K": (0, "K", 1),
    "cd": (0, "cd", 1),
}


def _atom_type(scalar, base, power) -> UnitType:
    if base is None:
        return UnitType(Fraction(scalar))
    return UnitType.base(base, power, scalar)


VOCABULARY = {name: _atom_type(*spec) for name, spec in _ATOMS.items()}

_TOKEN = re.compile(
    r"\s*(?:(?P<scale>10\^\{(?P<sv>[^}]*)\})|(?P<atom>[A-Za-z0-9]+)(?:\^(?P<pow>-?\d+))?|(?P<op>[*/]))"
)


def parse_scalar(text: str) -> Fraction:
    """Parse ``p/q`` or a decimal into an exact rational."""
    return Fraction(text.strip())


def format_scalar(value: Fraction) -> str:
    return str(value)


def parse_unit_string(text: str) -> UnitType:
    """Parse a unit string such as ``m/s``, ``cm*s`` or ``10^{-2} * m^1 s^-1``.

    ``/`` divides by the factor that follows it; juxtaposition and ``*``
    multiply.  The result has frame Any.
    """
    src = text.strip()
    if not src:
        return DIMENSIONLESS
    pos = 0
    result = DIMENSIONLESS
    pending_div = False
    seen_factor = False
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise UnknownUnit(src[pos:].strip() or src)
        pos = m.end()
        if m.group("op"):
            if m.group("op") == "/":
                if not seen_factor or pending_div:
                    raise UnknownUnit(src)
                pending_div = True
            continue
        if m.group("scale") is not None:
            try:
                factor = UnitType(parse_scalar(m.group("sv")))
            except (ValueError, ZeroDivisionError):
                raise UnknownUnit(m.group("scale")) from None
        else:
            atom = m.group("atom")
            if atom not in VOCABULARY:
                raise UnknownUnit(atom)
            factor = VOCABULARY[atom]
            if m.group("pow") is not None:
                k = int(m.group("pow"))
                factor = UnitType(factor.scalar * k, tuple(e * k for e in factor.exponents))
        result = div(result, factor) if pending_div else mul(result, factor)
        pending_div = False
        seen_factor = True
    if pending_div:
        raise UnknownUnit(src)
    return result


@lru_cache(maxsize=1)
def _canonical_names() -> dict:
    """Map (scalar, exponents) to the shortest spelling in the vocabulary."""
    names: dict = {}

    def offer(key, spelling):
        best = names.get(key)
        if best is None or (len(spelling), spelling) < (len(best), best):
            names[key] = spelling

    for name, u in VOCABULARY.items():
        offer(u.dimension, name)
    singles = dict(names)
    atoms = [a for a in VOCABULARY if a not in ("1", "rad")]
    for a in atoms:
        for b in atoms:
            ua, ub = VOCABULARY[a], VOCABULARY[b]
            for spelling, u in ((f"{a}/{b}", div(ua, ub)), (f"{a}*{b}", mul(ua, ub))):
                if u.dimension not in singles:
                    offer(u.dimension, spelling)
    return names


def format_unit(u: UnitType) -> str:
    """Shortest vocabulary spelling of ``u`` (frame ignored)."""
    hit = _canonical_names().get(u.dimension)
    dimensionless = not any(u.exponents)
    if hit is not None and not (dimensionless and ("/" in hit or "*" in hit)):
        return hit
    parts = [f"{b}^{e}" for b, e in zip(BASES, u.exponents) if e]
    body = " ".join(parts)
    if u.scalar == 0:
        return body or "1"
    if not body:
        return f"10^{{{u.scalar}}}"
    return f"10^{{{u.scalar}}} * {body}"

