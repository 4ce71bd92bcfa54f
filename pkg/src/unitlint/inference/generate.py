"""Constraint generation for one translation unit.

Constraints come out in a fixed order: type-database seeds first, then each
global initialiser and function body in source order.  The solver processes
them in that order, so this order decides where a conflict is reported.

Frame refinement: a test of a protocol control field (``msg.frame == C``)
narrows the frame of every measurement field of that message inside the
guarded block.  The other branch gets the complement within the protocol's
frame universe, and an early ``return`` carries the narrowing to the rest of
the enclosing block.  For ``A && msg.frame == C`` the complement in the else
branch is only valid when ``A`` held; it is applied, except inside the else
branch of a nested ``if (A)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from unitlint.frontend import ast as A
from unitlint.frontend.printer import format_expr
from unitlint.inference.terms import (
    ArgMember,
    ArgType,
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
)
from unitlint.units import DIMENSIONLESS, EmptyComplement, Frame, FrameMismatch, UnitType, frame_complement, frame_meet

DEFAULT_IGNORE = frozenset({"fabsf", "fabs", "log", "min", "max", "abs"})
_IDENTITY = frozenset({"fabsf", "fabs", "abs"})
_JOIN = frozenset({"min", "max"})
_COMPARE = frozenset({"==", "!=", "<", ">", "<=", ">="})
DB_SPAN = A.Span("<type-db>", 0, 0, 0, 0)


@dataclass(frozen=True)
class GenOptions:
    ignore: frozenset = DEFAULT_IGNORE
    conversions: dict = field(default_factory=dict)  # function name -> UnitType of its result


def literal_scale(text: str) -> Fraction | None:
    """``-k`` when the literal is exactly ``10**k``, else ``None``.

    Dividing a value by ``100`` turns centimetres into metres, so the literal
    ``100`` carries the scale ``10**-2``.
    """
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        return None
    if v <= 0:
        return None
    k = 0
    while v >= 10 and v.denominator == 1 and v.numerator % 10 == 0:
        v /= 10
        k += 1
    while v < 1 and (v * 10).denominator <= v.denominator:
        v *= 10
        k -= 1
    return Fraction(-k) if v == 1 else None


@dataclass
class _Layer:
    frames: dict  # canonical member name -> Frame
    guard: A.Expr | None = None
    lid: int = 0


class _Generator:
    def __init__(self, program: A.Program, info, protocol=None, db=None, options: GenOptions = GenOptions()):
        self.program = program
        self.info = info
        self.protocol = protocol
        self.db = db
        self.options = options
        self.universe = protocol.frame_universe if protocol is not None else frozenset()
        self.out: list = []
        self._tmp = itertools.count()
        self._lid = itertools.count(1)
        self.layers: list = []
        self.disabled: set = set()
        self.fn = None
        self.callers = {n.target for n in A.walk(program) if isinstance(n, A.Call) and n.target}

    # -- entry ----------------------------------------------------------------

    def run(self) -> list:
        if self.db is not None:
            present = self.info.nonlocal_
            for entry in sorted(self.db.entries.values(), key=lambda e: e.var_id):
                if entry.canonical_name in present:
                    known = Known(entry.unit, origin=f"type database: {entry.canonical_name} {entry.describe()}")
                    self.emit(Equal(Var(entry.canonical_name), known, DB_SPAN, "type database entry"))
        for d in self.program.decls:
            if isinstance(d, A.VarDecl) and d.init is not None:
                self.fn = None
                self.declare(d)
            elif isinstance(d, A.FunctionDef):
                self.function(d)
        return self.out

    def emit(self, c):
        self.out.append(c)

    def temp(self, e: A.Expr) -> Var:
        return Var(f"%{next(self._tmp)}", format_expr(e))

    # -- statements -------------------------------------------------------------

    def function(self, fn: A.FunctionDef):
        self.fn = fn
        self.layers, self.disabled = [], set()
        self.block(fn.body.stmts)

    def block(self, stmts):
        depth = len(self.layers)
        for s in stmts:
            post = self.stmt(s)
            if post is not None:
                self.layers.append(post)
        del self.layers[depth:]

    def declare(self, s: A.VarDecl):
        if s.init is None:
            return
        if self.is_struct(s.type.name):
            self.expr(s.init)
            return
        self.emit(Subtype(self.expr(s.init), Var(s.canon), s.span, f"initialisation of {s.name}"))

    def stmt(self, s):
        """Handle ``s``; returns a refinement layer for the rest of the block, if any."""
        if isinstance(s, A.Block):
            self.block(s.stmts)
        elif isinstance(s, A.VarDecl):
            self.declare(s)
        elif isinstance(s, A.Assign):
            value = self.expr(s.value)
            target = self.lvalue(s.target)
            if target is not None:
                self.emit(Subtype(value, target, s.span, f"assignment to {format_expr(s.target)}"))
        elif isinstance(s, A.ExprStmt):
            self.expr(s.expr)
        elif isinstance(s, A.Return):
            if s.value is not None and self.fn is not None:
                self.emit(Equal(ReturnType(self.fn.qualname), self.expr(s.value), s.span,
                                f"return value of {self.fn.qualname}"))
        elif isinstance(s, A.While):
            self.expr(s.cond)
            self.block(s.body.stmts)
        elif isinstance(s, A.If):
            return self.if_stmt(s)
        elif isinstance(s, A.Switch):
            self.switch(s)
        return None

    def if_stmt(self, s: A.If):
        self.expr(s.cond)
        then_layer, else_layer = self.control_test(s.cond)
        matched = {layer.lid for layer in self.layers if layer.guard is not None and layer.guard == s.cond}

        self.with_layer(then_layer, lambda: self.block(s.then.stmts))
        if s.orelse is not None:
            saved = set(self.disabled)
            self.disabled |= matched
            self.with_layer(else_layer, lambda: self.stmt(s.orelse))
            self.disabled = saved

        then_exits = _returns(s.then)
        else_exits = s.orelse is not None and _returns(s.orelse)
        if then_exits and not else_exits:
            return else_layer
        if else_exits and not then_exits:
            return then_layer
        return None

    def with_layer(self, layer, body):
        if layer is None:
            body()
            return
        self.layers.append(layer)
        try:
            body()
        finally:
            self.layers.remove(layer)

    def switch(self, s: A.Switch):
        self.expr(s.subject)
        test = self.control_member(s.subject)
        seen: set = set()
        for case in s.cases:
            if case.values:
                seen.update(v.const for v in case.values if isinstance(v, A.Name) and v.const in self.universe)
        for case in s.cases:
            layer = None
            if test is not None:
                fields = test
                if case.values is None:
                    frame = self._complement(Frame(frozenset(seen))) if seen else None
                else:
                    names = {v.const for v in case.values if isinstance(v, A.Name) and v.const in self.universe}
                    frame = Frame(frozenset(names)) if names and len(names) == len(case.values) else None
                if frame is not None:
                    layer = self.layer(fields, frame)
            self.with_layer(layer, lambda: self.block(case.body))

    # -- refinement -------------------------------------------------------------

    def layer(self, fields, frame: Frame, guard=None) -> _Layer:
        return _Layer({f: frame for f in fields}, guard, next(self._lid))

    def _complement(self, frame: Frame) -> Frame | None:
        try:
            return frame_complement(frame, self.universe)
        except EmptyComplement:
            return None

    def control_member(self, e) -> list | None:
        """Canonical names of the fields governed by control field ``e``, if it is one."""
        if not isinstance(e, A.Member) or self.protocol is None or e.struct is None:
            return None
        msg = self.protocol.message_for_struct(e.struct)
        if msg is None or e.attr not in msg.control_fields:
            return None
        return [f"{e.struct}.{f}" for f in msg.field_units]

    def simple_test(self, e):
        """``(fields, frame when true, frame when false)`` for ``ctrl ==/!= C``."""
        if not isinstance(e, A.Binary) or e.op not in ("==", "!="):
            return None
        for m, c in ((e.left, e.right), (e.right, e.left)):
            fields = self.control_member(m)
            if fields is not None and isinstance(c, A.Name) and c.const in self.universe:
                eq = Frame.concrete(c.const)
                ne = self._complement(eq)
                return (fields, eq, ne) if e.op == "==" else (fields, ne, eq)
        return None

    def control_test(self, cond):
        """Refinement layers for the then and else branches of ``if (cond)``."""
        test = self.simple_test(cond)
        if test is not None:
            fields, yes, no = test
            return (self.layer(fields, yes) if yes else None, self.layer(fields, no) if no else None)
        if isinstance(cond, A.Binary) and cond.op in ("&&", "||"):
            for inner, other in ((cond.right, cond.left), (cond.left, cond.right)):
                test = self.simple_test(inner)
                if test is None:
                    continue
                fields, yes, no = test
                if cond.op == "&&":
                    return (self.layer(fields, yes) if yes else None,
                            self.layer(fields, no, guard=other) if no else None)
                return None, self.layer(fields, no) if no else None
        return None, None

    def refined(self, canon: str) -> Frame | None:
        frame = None
        for layer in self.layers:
            if layer.lid in self.disabled or canon not in layer.frames:
                continue
            f = layer.frames[canon]
            try:
                frame = f if frame is None else frame_meet(frame, f)
            except FrameMismatch:
                frame = f
        return frame

    # -- expressions ------------------------------------------------------------

    def is_struct(self, type_name) -> bool:
        return self.info.is_struct_like(type_name)

    def protocol_unit(self, struct: str | None, attr: str):
        if self.protocol is None or struct is None:
            return None, None
        msg = self.protocol.message_for_struct(struct)
        if msg is None:
            return None, None
        return msg, msg.field_units.get(attr)

    def field_term(self, e: A.Expr, struct: str, attr: str, param_index, span):
        """Type of ``obj.attr`` for a protocol message field, with refinement."""
        msg, unit = self.protocol_unit(struct, attr)
        canon = f"{struct}.{attr}"
        frame = self.refined(canon)
        if param_index is not None and self.fn is not None and self.fn.qualname in self.callers:
            base = ArgMember(self.fn.qualname, param_index, attr)
            if frame is None:
                return base
            t = Var(f"%{next(self._tmp)}", f"{format_expr(e)}.{attr}" if not isinstance(e, A.Member) else format_expr(e))
            self.emit(Equal(t, Reframe(base, frame), span, f"frame of {canon} narrowed by a test of the control field"))
            return t
        origin = f"protocol field {msg.name}.{attr}"
        if frame is not None:
            origin += f" narrowed to {frame}"
            unit = unit.with_frame(frame)
        return Known(unit, origin=origin)

    def lvalue(self, e):
        if isinstance(e, A.Name):
            if self.is_struct(self.info.var_types.get(e.canon)):
                return None
            if e.param_index is not None and self.fn is not None:
                return ArgType(self.fn.qualname, e.param_index)
            return Var(e.canon)
        if isinstance(e, A.Member):
            _, unit = self.protocol_unit(e.struct, e.attr)
            if unit is not None:
                return self.field_term(e, e.struct, e.attr, e.param_index, e.span)
            if self.is_struct(self.info.var_types.get(e.canon)):
                return None
            return Var(e.canon)
        if isinstance(e, A.Index):
            self.expr(e.index)
            return Var(e.canon)
        raise TypeError(f"not an lvalue: {e!r}")

    def expr(self, e, scaled: bool = False):
        """Term for the type of ``e``; ``scaled`` marks an operand of ``*`` or ``/``."""
        if isinstance(e, A.Number):
            if scaled:
                k = literal_scale(e.text)
                if k is not None:
                    return Known(UnitType(k), origin=f"literal {e.text}")
            return self.temp(e)
        if isinstance(e, A.String):
            return self.temp(e)
        if isinstance(e, A.Name):
            if e.const is not None:
                return self.temp(e)
            if e.param_index is not None and self.fn is not None:
                return ArgType(self.fn.qualname, e.param_index)
            return Var(e.canon)
        if isinstance(e, A.Member):
            _, unit = self.protocol_unit(e.struct, e.attr)
            if unit is not None:
                return self.field_term(e, e.struct, e.attr, e.param_index, e.span)
            return Var(e.canon)
        if isinstance(e, A.Index):
            self.expr(e.index)
            return Var(e.canon)
        if isinstance(e, A.Unary):
            t = self.expr(e.operand, scaled)
            return Known(DIMENSIONLESS, origin="logical negation") if e.op == "!" else t
        if isinstance(e, A.Binary):
            return self.binary(e)
        if isinstance(e, A.Call):
            return self.call(e)
        raise TypeError(f"unexpected expression {e!r}")

    def binary(self, e: A.Binary):
        op = e.op
        if op in ("*", "/"):
            a, b = self.expr(e.left, True), self.expr(e.right, True)
            t = self.temp(e)
            self.emit(Equal(t, (Product if op == "*" else Quotient)(a, b), e.span, f"result of '{op}'"))
            return t
        if op in ("+", "-"):
            a, b = self.expr(e.left), self.expr(e.right)
            self.emit(SameDimension(a, b, e.span, f"operands of '{op}'"))
            t = self.temp(e)
            self.emit(Equal(t, Sum(a, b), e.span, f"result of '{op}'"))
            return t
        if op in _COMPARE:
            a, b = self.expr(e.left), self.expr(e.right)
            self.emit(SameDimension(a, b, e.span, f"operands of '{op}'"))
            return Known(DIMENSIONLESS, origin="comparison")
        self.expr(e.left)
        self.expr(e.right)
        return Known(DIMENSIONLESS, origin="logical operator")

    def call(self, e: A.Call):
        target = e.target or e.func
        if e.receiver is not None:
            self.expr(e.receiver)
        if e.func in self.options.ignore or target in self.options.ignore:
            args = [self.expr(a) for a in e.args]
            if e.func in _IDENTITY and len(args) == 1:
                return args[0]
            if e.func in _JOIN and len(args) >= 2:
                acc = args[0]
                for a in args[1:]:
                    self.emit(SameDimension(acc, a, e.span, f"arguments of {e.func}"))
                    t = self.temp(e)
                    self.emit(Equal(t, Sum(acc, a), e.span, f"result of {e.func}"))
                    acc = t
                return acc
            return self.temp(e)
        if target in self.options.conversions:
            for a in e.args:
                self.expr(a)
            return Known(self.options.conversions[target], origin=f"trusted conversion {target}")
        for i, a in enumerate(e.args, 1):
            struct = self.info.var_types.get(getattr(a, "canon", None)) if isinstance(a, A.Name) else None
            if self.is_struct(struct):
                self.struct_argument(e, target, i, a, struct)
                continue
            self.emit(Equal(ArgType(target, i), self.expr(a), e.span, f"argument {i} of {target}", binding=True))
        return ReturnType(target)

    def struct_argument(self, call: A.Call, target: str, i: int, arg: A.Name, struct: str):
        msg, _ = self.protocol_unit(struct, "")
        if msg is None:
            return
        for attr in msg.field_units:
            src = self.field_term(arg, struct, attr, arg.param_index, call.span)
            self.emit(Equal(ArgMember(target, i, attr), src, call.span,
                            f"argument {i} of {target}: field {attr}", binding=True))


def _returns(s) -> bool:
    """Whether statement ``s`` always ends in a ``return``."""
    if isinstance(s, A.Return):
        return True
    if isinstance(s, A.Block):
        return bool(s.stmts) and _returns(s.stmts[-1])
    if isinstance(s, A.If):
        return s.orelse is not None and _returns(s.then) and _returns(s.orelse)
    return False


def generate(program: A.Program, info, protocol=None, db=None, options: GenOptions = GenOptions()) -> list:
    """Constraints for a canonicalised translation unit, in solving order."""
    return _Generator(program, info, protocol, db, options).run()
