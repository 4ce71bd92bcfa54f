"""Name resolution and canonical variable identities.

Canonical names:

* globals keep their name (``waypoints``),
* class members are ``Class::member``,
* struct members are keyed by the static struct type (``vision_speed_estimate_t.usec``),
* array elements collapse to the array (``waypoints[i]`` -> ``waypoints``),
* function locals and parameters are ``function/name`` and never instrumented.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from unitlint.frontend import ast as A
from unitlint.frontend.parser import BUILTIN_TYPES


class UnresolvedName(Exception):
    def __init__(self, name: str, span: A.Span, detail: str = ""):
        msg = f"{span}: unresolved name {name!r}"
        super().__init__(msg + (f" ({detail})" if detail else ""))
        self.name = name
        self.span = span


class VarRegistry:
    """Dense bijection between canonical names and integer ids."""

    def __init__(self, names=()):
        self.names: list[str] = []
        self.ids: dict[str, int] = {}
        for n in names:
            self.id_for(n)

    def id_for(self, name: str) -> int:
        if name not in self.ids:
            self.ids[name] = len(self.names)
            self.names.append(name)
        return self.ids[name]

    def get(self, name: str) -> int | None:
        return self.ids.get(name)

    def name_of(self, var_id: int) -> str:
        return self.names[var_id]

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name) -> bool:
        return name in self.ids

    def to_json(self) -> str:
        return json.dumps({str(i): n for i, n in enumerate(self.names)}, indent=1, sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> VarRegistry:
        raw = json.loads(text)
        reg = cls()
        for key in sorted(raw, key=int):
            if int(key) != len(reg.names):
                raise ValueError(f"registry ids must be dense; missing id {len(reg.names)}")
            reg.id_for(raw[key])
        return reg


@dataclass
class StaticInfo:
    local: set = field(default_factory=set)
    nonlocal_: set = field(default_factory=set)
    enum_vars: set = field(default_factory=set)
    var_types: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    structs: dict = field(default_factory=dict)
    enums: dict = field(default_factory=dict)

    def is_class(self, type_name: str | None) -> bool:
        d = self.structs.get(type_name)
        return d is not None and d.kind == "class"

    def is_struct_like(self, type_name: str | None) -> bool:
        return type_name is not None and type_name not in BUILTIN_TYPES and type_name not in self.enums


@dataclass
class _Binding:
    canon: str
    type: A.TypeRef | None
    local: bool
    param_index: int | None = None


class _Resolver:
    def __init__(self, program: A.Program, registry: VarRegistry, protocol):
        self.program = program
        self.registry = registry
        self.protocol = protocol
        self.info = StaticInfo()
        self.globals: dict[str, _Binding] = {}

    def run(self):
        info = self.info
        for d in self.program.decls:
            if isinstance(d, A.StructDecl):
                if d.name in info.structs:
                    raise UnresolvedName(d.name, d.span, "duplicate struct")
                info.structs[d.name] = d
            elif isinstance(d, A.EnumDecl):
                info.enums[d.name] = d
                for v in d.values:
                    info.constants.setdefault(v, len(info.constants))
            elif isinstance(d, A.FunctionDef):
                if d.qualname in info.functions:
                    raise UnresolvedName(d.qualname, d.span, "duplicate function")
                info.functions[d.qualname] = d
        if self.protocol is not None:
            for frame in sorted(self.protocol.frame_universe):
                info.constants.setdefault(frame, len(info.constants))

        for d in self.program.decls:
            if isinstance(d, A.VarDecl):
                self.check_type(d.type)
                if d.init is not None:
                    self.expr(d.init, [], None)
                d.canon, d.local = d.name, False
                self.globals[d.name] = _Binding(d.name, d.type, False)
                self.declare(d.name, d.type, local=False)
            elif isinstance(d, A.StructDecl):
                for m in d.members:
                    self.check_type(m.type)
                    if d.kind == "class":
                        self.declare(f"{d.name}::{m.name}", m.type, local=False)
        for fn in self.program.functions:
            self.function(fn)
        return info

    def check_type(self, t: A.TypeRef):
        # unknown non-builtin names are external structs (e.g. protocol messages)
        return t

    def declare(self, canon: str, ty: A.TypeRef | None, local: bool):
        self.registry.id_for(canon)
        if ty is not None:
            self.info.var_types[canon] = ty.name
            if ty.name in self.info.enums:
                self.info.enum_vars.add(canon)
        (self.info.local if local else self.info.nonlocal_).add(canon)

    # -- functions ----------------------------------------------------------

    def function(self, fn: A.FunctionDef):
        if fn.owner is not None and fn.owner not in self.info.structs:
            raise UnresolvedName(fn.owner, fn.span, "unknown class")
        self.fn = fn
        self.used_names: dict[str, int] = {}
        scope: dict[str, _Binding] = {}
        seen = set()
        for i, p in enumerate(fn.params, 1):
            if p.name in seen:
                raise UnresolvedName(p.name, p.span, "duplicate parameter")
            seen.add(p.name)
            canon = self.local_canon(p.name)
            scope[p.name] = _Binding(canon, p.type, True, i)
            self.declare(canon, p.type, local=True)
        self.block(fn.body, [scope])

    def local_canon(self, name: str) -> str:
        n = self.used_names.get(name, 0) + 1
        self.used_names[name] = n
        base = f"{self.fn.qualname}/{name}"
        return base if n == 1 else f"{base}#{n}"

    def block(self, block: A.Block, scopes: list):
        scopes = scopes + [{}]
        for s in block.stmts:
            self.stmt(s, scopes)

    def stmt(self, s, scopes):
        if isinstance(s, A.Block):
            self.block(s, scopes)
        elif isinstance(s, A.VarDecl):
            if s.init is not None:
                self.expr(s.init, scopes, None)
            canon = self.local_canon(s.name)
            s.canon, s.local = canon, True
            scopes[-1][s.name] = _Binding(canon, s.type, True)
            self.declare(canon, s.type, local=True)
        elif isinstance(s, A.Assign):
            self.expr(s.value, scopes, None)
            self.expr(s.target, scopes, None)
        elif isinstance(s, A.If):
            self.expr(s.cond, scopes, None)
            self.block(s.then, scopes)
            if s.orelse is not None:
                self.stmt(s.orelse, scopes)
        elif isinstance(s, A.While):
            self.expr(s.cond, scopes, None)
            self.block(s.body, scopes)
        elif isinstance(s, A.Switch):
            self.expr(s.subject, scopes, None)
            inner = scopes + [{}]
            for case in s.cases:
                for v in case.values or ():
                    self.expr(v, scopes, None)
                for b in case.body:
                    self.stmt(b, inner)
        elif isinstance(s, A.Return):
            if s.value is not None:
                self.expr(s.value, scopes, None)
        elif isinstance(s, A.ExprStmt):
            self.expr(s.expr, scopes, None)
        elif isinstance(s, A.Break):
            pass
        else:
            raise TypeError(f"unexpected statement {s!r}")

    # -- expressions --------------------------------------------------------

    def lookup(self, name: str, scopes: list) -> _Binding | None:
        for scope in reversed(scopes):
            if name in scope:
                return scope[name]
        owner = getattr(self, "fn", None) and self.fn.owner
        if owner:
            cls = self.info.structs[owner]
            for m in cls.members:
                if m.name == name:
                    return _Binding(f"{owner}::{name}", m.type, False)
        if "::" in name:
            cls_name, member = name.split("::", 1)
            cls = self.info.structs.get(cls_name)
            if cls is not None:
                for m in cls.members:
                    if m.name == member:
                        return _Binding(name, m.type, False)
        return self.globals.get(name)

    def expr(self, e, scopes, _hint) -> str | None:
        """Resolve ``e`` in place; returns its static type name when known."""
        if isinstance(e, (A.Number, A.String)):
            return None
        if isinstance(e, A.Name):
            b = self.lookup(e.id, scopes)
            if b is None:
                if e.id in self.info.constants:
                    e.const = e.id
                    return None
                raise UnresolvedName(e.id, e.span)
            e.canon, e.local, e.param_index = b.canon, b.local, b.param_index
            self.registry.id_for(b.canon)
            return b.type.name if b.type is not None else None
        if isinstance(e, A.Member):
            base_type = self.expr(e.obj, scopes, None)
            if base_type in BUILTIN_TYPES or base_type in self.info.enums:
                raise UnresolvedName(e.attr, e.span, f"member access on {base_type}")
            if base_type is None:
                base_canon = getattr(e.obj, "canon", None)
                if base_canon is None:
                    raise UnresolvedName(e.attr, e.span, "member of an untyped expression")
                canon = f"{base_canon}.{e.attr}"
            elif self.info.is_class(base_type):
                canon = f"{base_type}::{e.attr}"
            else:
                canon = f"{base_type}.{e.attr}"
            e.canon, e.local, e.struct = canon, False, base_type
            if isinstance(e.obj, A.Name) and e.obj.param_index is not None:
                e.param_index = e.obj.param_index
            member_type = self.member_type(base_type, e.attr)
            self.declare(canon, member_type, local=False)
            if self.protocol is not None and base_type is not None:
                msg = self.protocol.message_for_struct(base_type)
                if msg is not None and e.attr in msg.control_fields:
                    self.info.enum_vars.add(canon)
            return member_type.name if member_type is not None else None
        if isinstance(e, A.Index):
            base_type = self.expr(e.obj, scopes, None)
            self.expr(e.index, scopes, None)
            e.canon = getattr(e.obj, "canon", None)
            e.local = getattr(e.obj, "local", False)
            return base_type
        if isinstance(e, A.Unary):
            return self.expr(e.operand, scopes, None)
        if isinstance(e, A.Binary):
            self.expr(e.left, scopes, None)
            self.expr(e.right, scopes, None)
            return None
        if isinstance(e, A.Call):
            recv_type = None
            if e.receiver is not None:
                recv_type = self.expr(e.receiver, scopes, None)
            for a in e.args:
                self.expr(a, scopes, None)
            e.target = self.resolve_call(e, recv_type)
            fn = self.info.functions.get(e.target)
            if fn is not None and fn.ret.name not in BUILTIN_TYPES:
                return fn.ret.name
            return None
        raise TypeError(f"unexpected expression {e!r}")

    def member_type(self, struct_name: str | None, attr: str) -> A.TypeRef | None:
        decl = self.info.structs.get(struct_name)
        if decl is None:
            return None
        for m in decl.members:
            if m.name == attr:
                return m.type
        raise UnresolvedName(attr, decl.span, f"{struct_name} has no member {attr}")

    def resolve_call(self, call: A.Call, recv_type: str | None) -> str:
        if call.receiver is not None and recv_type is not None and self.info.is_class(recv_type):
            return f"{recv_type}::{call.func}"
        owner = getattr(self, "fn", None) and self.fn.owner
        if call.receiver is None and owner and f"{owner}::{call.func}" in self.info.functions:
            return f"{owner}::{call.func}"
        return call.func


def canonicalize(program: A.Program, registry: VarRegistry | None = None, protocol=None):
    """Resolve every reference in ``program``.

    Returns ``(program, registry, info)``; ``info.nonlocal_`` holds the
    variables eligible for instrumentation.
    """
    registry = registry if registry is not None else VarRegistry()
    info = _Resolver(program, registry, protocol).run()
    return program, registry, info
