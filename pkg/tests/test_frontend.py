import pytest

from unitlint.frontend import (
    IncludeError,
    LexError,
    ParseError,
    UnresolvedName,
    VarRegistry,
    canonicalize,
    format_program,
    load_unit,
    parse_source,
    tokenize,
)
from unitlint.frontend import ast as A


def kinds(src):
    return [(t.kind, t.text) for t in tokenize(src)][:-1]


def test_tokenize_examples():
    assert kinds("x = y / 100.0;") == [
        ("IDENT", "x"), ("OP", "="), ("IDENT", "y"), ("OP", "/"), ("NUMBER", "100.0"), ("OP", ";"),
    ]
    assert [t for _, t in kinds("a.b[i]")] == ["a", ".", "b", "[", "i", "]"]
    toks = tokenize("// note\n  /* block\n */ x1")
    assert (toks[0].text, toks[0].line, toks[0].col) == ("x1", 3, 5)


def test_lex_error_position():
    with pytest.raises(LexError) as info:
        tokenize("@")
    assert "1:1" in str(info.value)


def test_literal_text_is_preserved():
    # the C float suffix is dropped, the digits are kept verbatim
    assert [t.text for t in tokenize("1e-2 100.0f 0.001")][:-1] == ["1e-2", "100.0", "0.001"]


def test_empty_program():
    assert parse_source("").decls == []


def test_closest_approach_shape(fixtures):
    prog = load_unit(fixtures / "closest_approach" / "closest.ml4u")
    fn = next(f for f in prog.functions if f.name == "closest_z")
    assert len(fn.body.stmts) == 3
    ret = fn.body.stmts[-1]
    assert isinstance(ret, A.Return) and isinstance(ret.value, A.Binary)
    inner = ret.value.left.args[0]
    assert inner.op == "-" and inner.right.op == "*"


def test_proximity_patched_shape(fixtures):
    prog = load_unit(fixtures / "proximity" / "proximity_patched.ml4u")
    guards = [s for f in prog.functions for s in A.walk(f) if isinstance(s, A.If)]
    guard = guards[0]
    assert isinstance(guard.cond, A.Binary) and guard.cond.op == "!="
    assert isinstance(guard.cond.left, A.Member)
    body = guard.then.stmts
    assert isinstance(body[0], A.ExprStmt) and body[0].expr.func == "log"
    assert isinstance(body[-1], A.Return)


def test_precedence():
    e = parse_source("void f() { x = a + b * c < d && !e || g; }").functions[0].body.stmts[0].value
    assert e.op == "||"
    assert e.left.op == "&&"
    cmp = e.left.left
    assert cmp.op == "<" and cmp.left.op == "+" and cmp.left.right.op == "*"
    assert isinstance(e.left.right, A.Unary)


@pytest.mark.parametrize("src", ["void f() { x = ; }", "void f( {", "struct S { int }", "void f() { 3 = x; }"])
def test_parse_errors(src):
    with pytest.raises(ParseError) as info:
        parse_source(src, "bad.ml4u")
    assert "bad.ml4u:" in str(info.value)


@pytest.mark.parametrize("name", ["closest_approach/closest.ml4u", "proximity/proximity_patched.ml4u", "apm19868/vision.ml4u",
                                  "px4_17354/landing.ml4u", "pipeline/altitude.ml4u"])
def test_format_round_trip(fixtures, name):
    prog = load_unit(fixtures / name)
    again = parse_source(format_program(prog))
    assert again == prog
    assert format_program(again) == format_program(prog)


def test_switch_and_while_round_trip():
    src = """
    enum Mode { A, B };
    void f(int m) {
        switch (m) { case A: x = 1; break; case B: default: x = 2; }
        while (x < 10) { x = x + 1; }
    }
    """
    prog = parse_source(src)
    assert parse_source(format_program(prog)) == prog


@pytest.mark.parametrize("name", ["closest_approach/closest.ml4u", "px4_17354/landing.ml4u"])
def test_spans_nest(fixtures, name):
    prog = load_unit(fixtures / name)

    def check(node):
        for child in node.children():
            if child is None:
                continue
            span = getattr(child, "span", None)
            parent = getattr(node, "span", None)
            if span is not None and parent is not None and parent.line:
                assert parent.contains(span), (node, child)
            check(child)

    check(prog)


def test_canonical_names(fixtures):
    prog, reg, info = canonicalize(load_unit(fixtures / "apm19868" / "vision.ml4u"))
    assert "vision_speed_estimate_t.usec" in reg
    assert "Corr::link_offset" in reg and "Corr::link_offset" in info.nonlocal_
    assert "Corr::correct_time/diff" in info.local
    assert "Corr::correct_time/diff" not in info.nonlocal_


def test_index_collapses_to_array():
    prog, reg, info = canonicalize(parse_source("float waypoints[]; void f(int i) { waypoints[i] = 3.0; }"))
    target = prog.functions[0].body.stmts[0].target
    assert target.canon == "waypoints" and "waypoints" in info.nonlocal_


def test_canonicalization_is_stable(fixtures):
    path = fixtures / "closest_approach" / "closest.ml4u"
    _, r1, _ = canonicalize(load_unit(path))
    _, r2, _ = canonicalize(load_unit(path))
    assert r1.names == r2.names
    assert VarRegistry.from_json(r1.to_json()).names == r1.names
    assert list(range(len(r1))) == [r1.get(n) for n in r1.names]


def test_unresolved_name():
    with pytest.raises(UnresolvedName) as info:
        canonicalize(parse_source("void f() {\n  x = nowhere;\n}", "u.ml4u"))
    assert "u.ml4u:2" in str(info.value)


def test_include(tmp_path):
    (tmp_path / "lib.ml4u").write_text("float shared;\n")
    (tmp_path / "main.ml4u").write_text('include "lib.ml4u";\nvoid f() { shared = 1.0; }\n')
    prog = load_unit(tmp_path / "main.ml4u")
    _, reg, _ = canonicalize(prog)
    assert "shared" in reg
    (tmp_path / "bad.ml4u").write_text('include "missing.ml4u";\n')
    with pytest.raises(IncludeError):
        load_unit(tmp_path / "bad.ml4u")
