"""AST for the mini-language.

Nodes compare structurally; source spans and resolution annotations are
excluded from equality so that reformatted code compares equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    col: int
    end_line: int
    end_col: int

    def contains(self, other: Span) -> bool:
        return (self.line, self.col) <= (other.line, other.col) and (other.end_line, other.end_col) <= (
            self.end_line,
            self.end_col,
        )

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


NOSPAN = Span("<none>", 0, 0, 0, 0)


def _span():
    return field(default=NOSPAN, compare=False, repr=False)


def _note(default=None):
    return field(default=default, compare=False, repr=False)


@dataclass(eq=True)
class Node:
    def children(self):
        return ()


# --- types -----------------------------------------------------------------


@dataclass
class TypeRef(Node):
    name: str
    array: bool = False
    span: Span = _span()

    def __str__(self) -> str:
        return self.name + ("[]" if self.array else "")


# --- expressions -----------------------------------------------------------


@dataclass
class Expr(Node):
    pass


@dataclass
class Number(Expr):
    text: str
    span: Span = _span()

    @property
    def value(self) -> float:
        return float(self.text)


@dataclass
class String(Expr):
    value: str
    span: Span = _span()


@dataclass
class Name(Expr):
    id: str
    span: Span = _span()
    # filled in by canonicalize
    canon: Optional[str] = _note()
    local: bool = _note(False)
    const: Optional[str] = _note()
    param_index: Optional[int] = _note()


@dataclass
class Member(Expr):
    obj: Expr
    attr: str
    span: Span = _span()
    canon: Optional[str] = _note()
    local: bool = _note(False)
    struct: Optional[str] = _note()
    param_index: Optional[int] = _note()

    def children(self):
        return (self.obj,)


@dataclass
class Index(Expr):
    obj: Expr
    index: Expr
    span: Span = _span()
    canon: Optional[str] = _note()
    local: bool = _note(False)

    def children(self):
        return (self.obj, self.index)


@dataclass
class Unary(Expr):
    op: str
    operand: Expr
    span: Span = _span()

    def children(self):
        return (self.operand,)


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr
    span: Span = _span()

    def children(self):
        return (self.left, self.right)


@dataclass
class Call(Expr):
    func: str
    args: list
    receiver: Optional[Expr] = None
    span: Span = _span()
    target: Optional[str] = _note()

    def children(self):
        return ((self.receiver,) if self.receiver is not None else ()) + tuple(self.args)


# --- statements ------------------------------------------------------------


@dataclass
class Stmt(Node):
    pass


@dataclass
class Block(Stmt):
    stmts: list
    span: Span = _span()

    def children(self):
        return tuple(self.stmts)


@dataclass
class VarDecl(Stmt):
    type: TypeRef
    name: str
    init: Optional[Expr] = None
    span: Span = _span()
    canon: Optional[str] = _note()
    local: bool = _note(False)

    def children(self):
        return (self.type,) + ((self.init,) if self.init is not None else ())


@dataclass
class Assign(Stmt):
    target: Expr
    value: Expr
    span: Span = _span()

    def children(self):
        return (self.target, self.value)


@dataclass
class If(Stmt):
    cond: Expr
    then: Block
    orelse: Optional[Stmt] = None
    span: Span = _span()

    def children(self):
        return (self.cond, self.then) + ((self.orelse,) if self.orelse is not None else ())


@dataclass
class Case(Node):
    values: Optional[list]  # None for default
    body: list
    span: Span = _span()

    def children(self):
        return tuple(self.values or ()) + tuple(self.body)


@dataclass
class Switch(Stmt):
    subject: Expr
    cases: list
    span: Span = _span()

    def children(self):
        return (self.subject,) + tuple(self.cases)


@dataclass
class While(Stmt):
    cond: Expr
    body: Block
    span: Span = _span()

    def children(self):
        return (self.cond, self.body)


@dataclass
class Return(Stmt):
    value: Optional[Expr] = None
    span: Span = _span()

    def children(self):
        return (self.value,) if self.value is not None else ()


@dataclass
class Break(Stmt):
    span: Span = _span()


@dataclass
class ExprStmt(Stmt):
    expr: Expr
    span: Span = _span()

    def children(self):
        return (self.expr,)


# --- declarations ----------------------------------------------------------


@dataclass
class Param(Node):
    type: TypeRef
    name: str
    span: Span = _span()

    def children(self):
        return (self.type,)


@dataclass
class StructDecl(Node):
    kind: str  # "struct" or "class"
    name: str
    members: list  # list[Param]
    methods: list = field(default_factory=list)  # prototype names
    span: Span = _span()

    def children(self):
        return tuple(self.members)


@dataclass
class EnumDecl(Node):
    name: str
    values: list
    span: Span = _span()


@dataclass
class FunctionDef(Node):
    ret: TypeRef
    name: str
    params: list
    body: Block
    owner: Optional[str] = None
    span: Span = _span()

    @property
    def qualname(self) -> str:
        return f"{self.owner}::{self.name}" if self.owner else self.name

    def children(self):
        return (self.ret,) + tuple(self.params) + (self.body,)


@dataclass
class Include(Node):
    path: str
    span: Span = _span()


@dataclass
class Program(Node):
    decls: list = field(default_factory=list)

    def children(self):
        return tuple(self.decls)

    @property
    def structs(self) -> list:
        return [d for d in self.decls if isinstance(d, StructDecl)]

    @property
    def enums(self) -> list:
        return [d for d in self.decls if isinstance(d, EnumDecl)]

    @property
    def globals(self) -> list:
        return [d for d in self.decls if isinstance(d, VarDecl)]

    @property
    def functions(self) -> list:
        return [d for d in self.decls if isinstance(d, FunctionDef)]


def walk(node: Node):
    """Pre-order traversal."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed([c for c in n.children() if c is not None]))
