"""Pretty-printer; output reparses to an equal AST."""

from __future__ import annotations

import json

from unitlint.frontend import ast as A


def format_expr(e: A.Expr) -> str:
    if isinstance(e, A.Number):
        return e.text
    if isinstance(e, A.String):
        return json.dumps(e.value)
    if isinstance(e, A.Name):
        return e.id
    if isinstance(e, A.Member):
        return f"{format_expr(e.obj)}.{e.attr}"
    if isinstance(e, A.Index):
        return f"{format_expr(e.obj)}[{format_expr(e.index)}]"
    if isinstance(e, A.Unary):
        return f"{e.op}({format_expr(e.operand)})"
    if isinstance(e, A.Binary):
        return f"({format_expr(e.left)} {e.op} {format_expr(e.right)})"
    if isinstance(e, A.Call):
        args = ", ".join(format_expr(a) for a in e.args)
        if e.receiver is not None:
            return f"{format_expr(e.receiver)}.{e.func}({args})"
        return f"{e.func}({args})"
    raise TypeError(f"not an expression: {e!r}")


def _type(t: A.TypeRef) -> str:
    return f"{t.name}[]" if t.array else t.name


def _stmt(s: A.Stmt, out: list, depth: int) -> None:
    pad = "    " * depth
    if isinstance(s, A.Block):
        out.append(pad + "{")
        for inner in s.stmts:
            _stmt(inner, out, depth + 1)
        out.append(pad + "}")
    elif isinstance(s, A.VarDecl):
        init = f" = {format_expr(s.init)}" if s.init is not None else ""
        out.append(f"{pad}{_type(s.type)} {s.name}{init};")
    elif isinstance(s, A.Assign):
        out.append(f"{pad}{format_expr(s.target)} = {format_expr(s.value)};")
    elif isinstance(s, A.If):
        out.append(f"{pad}if ({format_expr(s.cond)})")
        _stmt(s.then, out, depth)
        if s.orelse is not None:
            # "else if" reparses as a nested If, "else {...}" as a Block
            out.append(pad + "else")
            _stmt(s.orelse, out, depth)
    elif isinstance(s, A.While):
        out.append(f"{pad}while ({format_expr(s.cond)})")
        _stmt(s.body, out, depth)
    elif isinstance(s, A.Switch):
        out.append(f"{pad}switch ({format_expr(s.subject)}) {{")
        for case in s.cases:
            if case.values is None:
                out.append(pad + "default:")
            else:
                for v in case.values:
                    out.append(f"{pad}case {format_expr(v)}:")
            for inner in case.body:
                _stmt(inner, out, depth + 1)
        out.append(pad + "}")
    elif isinstance(s, A.Return):
        out.append(pad + ("return;" if s.value is None else f"return {format_expr(s.value)};"))
    elif isinstance(s, A.Break):
        out.append(pad + "break;")
    elif isinstance(s, A.ExprStmt):
        out.append(f"{pad}{format_expr(s.expr)};")
    else:
        raise TypeError(f"not a statement: {s!r}")


def format_program(program: A.Program) -> str:
    out: list = []
    for d in program.decls:
        if isinstance(d, A.Include):
            out.append(f"include {json.dumps(d.path)};")
        elif isinstance(d, A.StructDecl):
            out.append(f"{d.kind} {d.name} {{")
            for m in d.members:
                out.append(f"    {_type(m.type)} {m.name};")
            for meth in d.methods:
                out.append(f"    void {meth}();")
            out.append("};")
        elif isinstance(d, A.EnumDecl):
            out.append(f"enum {d.name} {{ {', '.join(d.values)} }};")
        elif isinstance(d, A.VarDecl):
            _stmt(d, out, 0)
        elif isinstance(d, A.FunctionDef):
            params = ", ".join(f"{_type(p.type)} {p.name}" for p in d.params)
            name = f"{d.owner}::{d.name}" if d.owner else d.name
            out.append(f"{_type(d.ret)} {name}({params})")
            _stmt(d.body, out, 0)
        out.append("")
    return "\n".join(out)
