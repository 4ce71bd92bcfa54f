from __future__ import annotations

import re
from dataclasses import dataclass

KEYWORDS = {
    "struct", "class", "enum", "if", "else", "switch", "case", "default",
    "return", "while", "break", "include", "const",
}

_SPEC = [
    ("WS", r"[ \t\r]+"),
    ("NL", r"\n"),
    ("LINE_COMMENT", r"//[^\n]*"),
    ("BLOCK_COMMENT", r"/\*.*?\*/"),
    ("NUMBER", r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?[fF]?"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"'),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("OP", r"::|==|!=|<=|>=|&&|\|\||\+=|-=|\*=|/=|[-+*/=<>!(){}\[\];,.:&]"),
]
_MASTER = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _SPEC), re.S)


class LexError(Exception):
    def __init__(self, file: str, line: int, col: int, char: str):
        super().__init__(f"{file}:{line}:{col}: unexpected character {char!r}")
        self.file, self.line, self.col, self.char = file, line, col, char


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, KEYWORD, NUMBER, STRING, OP, EOF
    text: str
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return self.text if self.kind != "EOF" else "end of input"


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    n = len(source)
    while pos < n:
        m = _MASTER.match(source, pos)
        if m is None:
            raise LexError(file, line, pos - line_start + 1, source[pos])
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "NL":
            line += 1
            line_start = m.end()
        elif kind == "BLOCK_COMMENT":
            newlines = text.count("\n")
            if newlines:
                line += newlines
                line_start = pos + text.rfind("\n") + 1
        elif kind not in ("WS", "LINE_COMMENT"):
            if kind == "IDENT" and text in KEYWORDS:
                kind = "KEYWORD"
            elif kind == "NUMBER" and text[-1] in "fF":
                text = text[:-1]
            elif kind == "STRING":
                text = bytes(text[1:-1], "utf-8").decode("unicode_escape")
            end_col = col + (m.end() - m.start())
            tokens.append(Token(kind, text, line, col, line, end_col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1, line, pos - line_start + 1))
    return tokens
