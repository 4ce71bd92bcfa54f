"""Recursive descent parser for the mini-language."""

from __future__ import annotations

from unitlint.frontend import ast as A
from unitlint.frontend.lexer import Token, tokenize

BUILTIN_TYPES = {"int", "float", "double", "u32", "u8", "u16", "u64", "i32", "bool", "void"}

_COMPARE = {"==", "!=", "<", ">", "<=", ">="}
_COMPOUND = {"+=": "+", "-=": "-", "*=": "*", "/=": "/"}


class ParseError(Exception):
    def __init__(self, file: str, line: int, col: int, expected: str, found: str):
        super().__init__(f"{file}:{line}:{col}: expected {expected}, found {found!r}")
        self.file, self.line, self.col = file, line, col
        self.expected, self.found = expected, found


class Parser:
    def __init__(self, tokens: list[Token], file: str = "<input>"):
        self.tokens = tokens
        self.file = file
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k) if k else self.tok
        return t.kind in ("OP", "KEYWORD") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(repr(text))
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "IDENT":
            self.error("identifier")
        return self.advance()

    def error(self, expected: str):
        t = self.tok
        raise ParseError(self.file, t.line, t.col, expected, str(t))

    def span_from(self, start: Token) -> A.Span:
        end = self.tokens[self.pos - 1] if self.pos > 0 else start
        return A.Span(self.file, start.line, start.col, end.end_line, end.end_col)

    # -- top level ----------------------------------------------------------

    def parse_program(self) -> A.Program:
        decls = []
        while self.tok.kind != "EOF":
            decls.append(self.top_level())
        return A.Program(decls)

    def top_level(self):
        start = self.tok
        if self.at("include"):
            self.advance()
            if self.tok.kind != "STRING":
                self.error("include path string")
            path = self.advance().text
            self.expect(";")
            return A.Include(path, span=self.span_from(start))
        if self.at("struct") or self.at("class"):
            return self.struct_decl()
        if self.at("enum"):
            return self.enum_decl()
        ty = self.type_ref()
        name_tok = self.expect_ident()
        owner = None
        if self.at("::"):
            self.advance()
            owner = name_tok.text
            name_tok = self.expect_ident()
        if self.at("("):
            params = self.params()
            body = self.block()
            return A.FunctionDef(ty, name_tok.text, params, body, owner, span=self.span_from(start))
        if owner is not None:
            self.error("'(' after qualified function name")
        decl = self.var_decl_rest(ty, name_tok, start)
        return decl

    def struct_decl(self) -> A.StructDecl:
        start = self.advance()
        name = self.expect_ident().text
        self.expect("{")
        members, methods = [], []
        while not self.at("}"):
            mstart = self.tok
            ty = self.type_ref()
            mname = self.expect_ident()
            if self.at("("):
                self.params()
                self.expect(";")
                methods.append(mname.text)
                continue
            if self.at("["):
                self.advance()
                if self.tok.kind == "NUMBER":
                    self.advance()
                self.expect("]")
                ty = A.TypeRef(ty.name, True, span=ty.span)
            self.expect(";")
            members.append(A.Param(ty, mname.text, span=self.span_from(mstart)))
        self.expect("}")
        if self.at(";"):
            self.advance()
        return A.StructDecl(start.text, name, members, methods, span=self.span_from(start))

    def enum_decl(self) -> A.EnumDecl:
        start = self.advance()
        name = self.expect_ident().text
        self.expect("{")
        values = []
        while not self.at("}"):
            values.append(self.expect_ident().text)
            if not self.at(","):
                break
            self.advance()
        self.expect("}")
        if self.at(";"):
            self.advance()
        return A.EnumDecl(name, values, span=self.span_from(start))

    def type_ref(self) -> A.TypeRef:
        start = self.tok
        if self.at("const"):
            self.advance()
        if self.tok.kind != "IDENT":
            self.error("type name")
        name = self.advance().text
        array = False
        if self.at("[") and self.at("]", 1):
            self.advance()
            self.advance()
            array = True
        if self.at("&"):
            self.advance()
        return A.TypeRef(name, array, span=self.span_from(start))

    def params(self) -> list:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                pstart = self.tok
                if self.tok.kind == "IDENT" and self.tok.text == "void" and self.at(")", 1):
                    self.advance()
                    break
                ty = self.type_ref()
                pname = self.expect_ident().text
                params.append(A.Param(ty, pname, span=self.span_from(pstart)))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return params

    def var_decl_rest(self, ty: A.TypeRef, name_tok: Token, start: Token) -> A.VarDecl:
        if self.at("["):
            self.advance()
            if self.tok.kind == "NUMBER":
                self.advance()
            self.expect("]")
            ty = A.TypeRef(ty.name, True, span=ty.span)
        init = None
        if self.at("="):
            self.advance()
            init = self.expr()
        self.expect(";")
        return A.VarDecl(ty, name_tok.text, init, span=self.span_from(start))

    # -- statements ---------------------------------------------------------

    def block(self) -> A.Block:
        start = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "EOF":
                self.error("'}'")
            stmts.append(self.statement())
        self.expect("}")
        return A.Block(stmts, span=self.span_from(start))

    def body(self) -> A.Block:
        if self.at("{"):
            return self.block()
        start = self.tok
        stmt = self.statement()
        return A.Block([stmt], span=self.span_from(start))

    def looks_like_decl(self) -> bool:
        if self.at("const"):
            return True
        if self.tok.kind != "IDENT":
            return False
        nxt = self.peek()
        if nxt.kind == "IDENT":
            return True
        if nxt.kind == "OP" and nxt.text == "&" and self.peek(2).kind == "IDENT":
            return True
        if nxt.kind == "OP" and nxt.text == "[" and self.at("]", 2) and self.peek(3).kind == "IDENT":
            return True
        return False

    def statement(self):
        start = self.tok
        if self.at("{"):
            return self.block()
        if self.at("if"):
            return self.if_stmt()
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            body = self.body()
            return A.While(cond, body, span=self.span_from(start))
        if self.at("switch"):
            return self.switch_stmt()
        if self.at("return"):
            self.advance()
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return A.Return(value, span=self.span_from(start))
        if self.at("break"):
            self.advance()
            self.expect(";")
            return A.Break(span=self.span_from(start))
        if self.looks_like_decl():
            ty = self.type_ref()
            name_tok = self.expect_ident()
            return self.var_decl_rest(ty, name_tok, start)
        expr = self.expr()
        if self.tok.kind == "OP" and (self.tok.text == "=" or self.tok.text in _COMPOUND):
            op = self.advance().text
            if not isinstance(expr, (A.Name, A.Member, A.Index)):
                raise ParseError(self.file, start.line, start.col, "assignable expression", start.text)
            value = self.expr()
            self.expect(";")
            span = self.span_from(start)
            if op != "=":
                value = A.Binary(_COMPOUND[op], expr, value, span=span)
            return A.Assign(expr, value, span=span)
        self.expect(";")
        return A.ExprStmt(expr, span=self.span_from(start))

    def if_stmt(self) -> A.If:
        start = self.advance()
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.body()
        orelse = None
        if self.at("else"):
            self.advance()
            if self.at("if"):
                orelse = self.if_stmt()
            else:
                orelse = self.body()
        return A.If(cond, then, orelse, span=self.span_from(start))

    def switch_stmt(self) -> A.Switch:
        start = self.advance()
        self.expect("(")
        subject = self.expr()
        self.expect(")")
        self.expect("{")
        cases = []
        while not self.at("}"):
            cstart = self.tok
            values = []
            is_default = False
            while self.at("case") or self.at("default"):
                if self.at("default"):
                    self.advance()
                    is_default = True
                else:
                    self.advance()
                    values.append(self.expr())
                self.expect(":")
            if not values and not is_default:
                self.error("'case' or 'default'")
            body = []
            while not (self.at("case") or self.at("default") or self.at("}")):
                body.append(self.statement())
            cases.append(A.Case(None if is_default else values, body, span=self.span_from(cstart)))
        self.expect("}")
        return A.Switch(subject, cases, span=self.span_from(start))

    # -- expressions --------------------------------------------------------

    def expr(self):
        return self.logical_or()

    def _binary_level(self, ops, next_level):
        start = self.tok
        left = next_level()
        while self.tok.kind == "OP" and self.tok.text in ops:
            op = self.advance().text
            right = next_level()
            left = A.Binary(op, left, right, span=self.span_from(start))
        return left

    def logical_or(self):
        return self._binary_level({"||"}, self.logical_and)

    def logical_and(self):
        return self._binary_level({"&&"}, self.comparison)

    def comparison(self):
        return self._binary_level(_COMPARE, self.additive)

    def additive(self):
        return self._binary_level({"+", "-"}, self.multiplicative)

    def multiplicative(self):
        return self._binary_level({"*", "/"}, self.unary)

    def unary(self):
        start = self.tok
        if self.tok.kind == "OP" and self.tok.text in ("-", "!"):
            op = self.advance().text
            operand = self.unary()
            return A.Unary(op, operand, span=self.span_from(start))
        return self.postfix()

    def postfix(self):
        start = self.tok
        node = self.primary()
        while True:
            if self.at("."):
                self.advance()
                attr = self.expect_ident().text
                if self.at("("):
                    args = self.call_args()
                    node = A.Call(attr, args, node, span=self.span_from(start))
                else:
                    node = A.Member(node, attr, span=self.span_from(start))
            elif self.at("["):
                self.advance()
                index = self.expr()
                self.expect("]")
                node = A.Index(node, index, span=self.span_from(start))
            else:
                return node

    def call_args(self) -> list:
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.expr())
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return args

    def primary(self):
        start = self.tok
        if self.tok.kind == "NUMBER":
            return A.Number(self.advance().text, span=self.span_from(start))
        if self.tok.kind == "STRING":
            return A.String(self.advance().text, span=self.span_from(start))
        if self.tok.kind == "IDENT":
            name = self.advance().text
            if self.at("::"):
                self.advance()
                name = f"{name}::{self.expect_ident().text}"
            if self.at("("):
                args = self.call_args()
                return A.Call(name, args, span=self.span_from(start))
            return A.Name(name, span=self.span_from(start))
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        self.error("expression")


def parse_program(tokens: list[Token], file: str = "<input>") -> A.Program:
    return Parser(tokens, file).parse_program()


def parse_source(source: str, file: str = "<input>") -> A.Program:
    return parse_program(tokenize(source, file), file)
