"""Type terms and constraints.

Atoms are the unknowns of the system: program variables (:class:`Var`),
per-function argument and return slots (:class:`ArgType`,
:class:`ArgMember`, :class:`ReturnType`).  Composite terms only appear on the
right of an equation, over atoms or known types:

``Product(a, b)`` / ``Quotient(a, b)``
    unit multiplication and division; the frame is the meet of the operands;
``Sum(a, b)``
    the result of ``a + b`` or ``a - b``: dimension of ``a``, frame the larger
    operand (the operands must be comparable); dimension agreement between the
    operands is a separate ``same-dim`` constraint;
``Reframe(a, F)``
    the dimension of ``a`` with its frame fixed to ``F`` (frame refinement).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from unitlint.frontend.ast import NOSPAN, Span
from unitlint.units import Frame, UnitType, format_unit


@dataclass(frozen=True)
class Known:
    unit: UnitType
    origin: str = field(default="", compare=False)

    def __str__(self):
        return str(self.unit)

    def sexpr(self):
        return f"(unit {json.dumps(format_unit(self.unit))} {json.dumps(str(self.unit.frame))})"


@dataclass(frozen=True)
class Var:
    name: str
    label: str = field(default="", compare=False)  # source text for temporaries

    @property
    def is_temp(self) -> bool:
        return self.name.startswith("%")

    def __str__(self):
        if self.is_temp and self.label:
            return f"type({self.label})"
        return f"type({self.name})"

    def sexpr(self):
        return f"(var {json.dumps(self.name)})"


@dataclass(frozen=True)
class ArgType:
    func: str
    index: int

    def __str__(self):
        return f"ArgType({self.func}, {self.index})"

    def sexpr(self):
        return f"(arg {json.dumps(self.func)} {self.index})"


@dataclass(frozen=True)
class ArgMember:
    func: str
    index: int
    member: str

    def __str__(self):
        return f"ArgType({self.func}, {self.index}).{self.member}"

    def sexpr(self):
        return f"(arg-member {json.dumps(self.func)} {self.index} {json.dumps(self.member)})"


@dataclass(frozen=True)
class ReturnType:
    func: str

    def __str__(self):
        return f"ReturnType({self.func})"

    def sexpr(self):
        return f"(ret {json.dumps(self.func)})"


ATOMS = (Var, ArgType, ArgMember, ReturnType)


@dataclass(frozen=True)
class _Binary:
    left: object
    right: object
    symbol = "?"

    def __str__(self):
        return f"{self.left} {self.symbol} {self.right}"

    def sexpr(self):
        return f"({self.symbol} {self.left.sexpr()} {self.right.sexpr()})"

    @property
    def operands(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Product(_Binary):
    symbol = "*"


@dataclass(frozen=True)
class Quotient(_Binary):
    symbol = "/"


@dataclass(frozen=True)
class Sum(_Binary):
    symbol = "+"


@dataclass(frozen=True)
class Reframe:
    base: object
    frame: Frame

    def __str__(self):
        return f"{self.base} in frame {self.frame}"

    def sexpr(self):
        return f"(reframe {self.base.sexpr()} {json.dumps(str(self.frame))})"

    @property
    def operands(self):
        return (self.base,)


COMPOSITES = (Product, Quotient, Sum, Reframe)


def atoms_of(term) -> tuple:
    """Atoms mentioned by a term, in order, without duplicates."""
    if isinstance(term, COMPOSITES):
        out = []
        for op in term.operands:
            for a in atoms_of(op):
                if a not in out:
                    out.append(a)
        return tuple(out)
    if isinstance(term, ATOMS):
        return (term,)
    return ()


def knowns_of(term) -> tuple:
    if isinstance(term, COMPOSITES):
        return tuple(k for op in term.operands for k in knowns_of(op))
    return (term,) if isinstance(term, Known) else ()


# -- constraints --------------------------------------------------------------

EQ, SUB, SAME = "eq", "sub", "same-dim"


@dataclass(frozen=True)
class Constraint:
    kind: str  # "eq" | "sub" | "same-dim"
    left: object
    right: object
    span: Span = field(default=NOSPAN, compare=False)
    reason: str = field(default="", compare=False)
    binding: bool = field(default=False, compare=False)  # call-site argument or return binding

    def __str__(self):
        op = {EQ: "=", SUB: "<:", SAME: "~"}[self.kind]
        return f"{self.left} {op} {self.right}"

    @property
    def location(self) -> str:
        return f"{self.span.file}:{self.span.line}"

    def sexpr(self) -> str:
        return f"({self.kind} {self.left.sexpr()} {self.right.sexpr()} {json.dumps(self.location)})"

    def atoms(self) -> tuple:
        out = list(atoms_of(self.left))
        for a in atoms_of(self.right):
            if a not in out:
                out.append(a)
        return tuple(out)

    def knowns(self) -> tuple:
        return knowns_of(self.left) + knowns_of(self.right)

    @property
    def is_seed(self) -> bool:
        return bool(self.knowns())


def Equal(a, b, span=NOSPAN, reason="", binding=False) -> Constraint:
    return Constraint(EQ, a, b, span, reason, binding)


def Subtype(a, b, span=NOSPAN, reason="") -> Constraint:
    return Constraint(SUB, a, b, span, reason)


def SameDimension(a, b, span=NOSPAN, reason="") -> Constraint:
    return Constraint(SAME, a, b, span, reason)


def dump_constraints(constraints) -> str:
    return "".join(c.sexpr() + "\n" for c in constraints)
