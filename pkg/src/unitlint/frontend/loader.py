"""Load a translation unit: a source file plus everything it includes."""

from __future__ import annotations

import os
from pathlib import Path

from unitlint.frontend import ast as A
from unitlint.frontend.parser import parse_source


class IncludeError(OSError):
    pass


def load_unit(path: str | Path) -> A.Program:
    """Parse ``path`` and splice in its ``include "..."`` files.

    Included declarations come first, in include order; each file is spliced
    at most once per unit.  Spans keep the file each node came from.
    """
    seen: set = set()
    decls: list = []

    def visit(p: Path, origin: A.Span | None):
        key = p.resolve()
        if key in seen:
            return
        seen.add(key)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            if origin is None:
                raise
            raise IncludeError(f"{origin}: cannot include {p}: {exc.strerror}") from None
        prog = parse_source(text, os.path.normpath(str(p)))
        for d in prog.decls:
            if isinstance(d, A.Include):
                visit(p.parent / d.path, d.span)
            else:
                decls.append(d)

    visit(Path(path), None)
    return A.Program(decls)
