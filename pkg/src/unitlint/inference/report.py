"""Diagnostics, their provenance chains, and checking of whole file sets."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from unitlint.frontend.canon import canonicalize
from unitlint.frontend.loader import load_unit
from unitlint.inference.generate import GenOptions, generate
from unitlint.inference.solver import SolveResult, solve
from unitlint.inference.terms import ArgMember, ArgType, Product, Quotient, ReturnType, atoms_of

CODES = {
    "UTE001": "dimension mismatch",
    "UTE002": "frame mismatch",
    "UTE003": "inconsistent argument or return type",
}
_SLOTS = (ArgType, ArgMember, ReturnType)


@dataclass(frozen=True)
class ChainStep:
    location: str
    constraint: str
    reason: str
    origin: str = ""

    def __str__(self):
        text = f"{self.location}: {self.constraint}  [{self.reason}]"
        return text + (f"  <- {self.origin}" if self.origin else "")

    def to_json(self) -> dict:
        return {"location": self.location, "constraint": self.constraint, "reason": self.reason, "origin": self.origin}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    file: str
    line: int
    col: int
    message: str
    left_type: str
    right_type: str
    constraint: str
    severity: str = "error"
    chain: tuple = field(default=(), compare=False)
    constraint_obj: object = field(default=None, compare=False, repr=False)
    chain_constraints: tuple = field(default=(), compare=False, repr=False)

    @property
    def signature(self) -> tuple:
        return (self.code, self.left_type, self.right_type)

    @property
    def key(self) -> tuple:
        return (self.file, self.line, self.signature)

    def human(self) -> str:
        return f"{self.file}:{self.line}:{self.col}: {self.severity} {self.code} {self.message}: {self.left_type} vs {self.right_type}"

    def explain(self) -> str:
        lines = [self.human(), f"  failing constraint: {self.constraint}"]
        lines += [f"  {step}" for step in self.chain]
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "file": self.file,
            "line": self.line,
            "col": self.col,
            "message": self.message,
            "left_type": self.left_type,
            "right_type": self.right_type,
            "constraint": self.constraint,
            "chain": [s.to_json() for s in self.chain],
        }


# -- provenance -----------------------------------------------------------------


class _Provenance:
    """Constraint graph over accepted constraints, for tracing types back to seeds."""

    def __init__(self, result: SolveResult):
        self.constraints = result.constraints
        self.adj: dict = {}
        for i in result.accepted:
            for a in self.constraints[i].atoms():
                self.adj.setdefault(a, []).append(i)

    def trace(self, atom, limit: int, wanted=None):
        """``(constraint indices seed-first, atoms on the path)`` from ``atom`` to a seed.

        Prefers the nearest seed whose known frame is ``wanted``; falls back
        to the nearest seed of any kind.
        """
        prev = {atom: None}
        queue = deque([atom])
        fallback = None
        while queue:
            a = queue.popleft()
            for ci in self.adj.get(a, ()):
                if ci >= limit:
                    break
                c = self.constraints[ci]
                if c.is_seed:
                    hit = self._path(prev, a, ci)
                    if wanted is None or any(k.unit.frame == wanted for k in c.knowns()):
                        return hit
                    if fallback is None:
                        fallback = hit
                for b in c.atoms():
                    if b not in prev:
                        prev[b] = (a, ci)
                        queue.append(b)
        return fallback or ((), (atom,))

    def sources(self, atom, limit: int, wanted=None, depth: int = 3):
        """Like :meth:`trace`, but follows both factors of a product or quotient."""
        if depth:
            for ci in self.adj.get(atom, ()):
                if ci >= limit:
                    break
                c = self.constraints[ci]
                if c.left == atom and isinstance(c.right, (Product, Quotient)):
                    steps, atoms = [], [atom]
                    for op in c.right.operands:
                        for a in atoms_of(op):
                            s, via = self.sources(a, ci, None, depth - 1)
                            steps += [x for x in s if x not in steps]
                            atoms += via
                    return tuple(steps) + (ci,), tuple(atoms)
        return self.trace(atom, limit, wanted)

    @staticmethod
    def _path(prev, a, seed):
        steps, atoms = [seed], [a]
        while prev[a] is not None:
            a, ci = prev[a]
            steps.append(ci)
            atoms.append(a)
        return tuple(steps), tuple(atoms)


def _step(c) -> ChainStep:
    origin = "; ".join(k.origin for k in c.knowns() if k.origin)
    return ChainStep(c.location, str(c), c.reason, origin)


def diagnostics_for(result: SolveResult) -> list:
    """One diagnostic per rejected constraint, in constraint order."""
    prov = _Provenance(result)
    out = []
    for rej in result.rejected:
        c = rej.constraint
        operands = set(c.atoms())
        sides = [(atoms_of(c.left), rej.left.frame), (atoms_of(c.right), rej.right.frame)]
        order: list = []
        path_atoms: set = set()
        for atoms, frame in sides:
            for atom in atoms:
                if rej.part == "frame":
                    steps, via = prov.trace(atom, rej.index, frame)
                else:
                    steps, via = prov.sources(atom, rej.index)
                path_atoms.update(via)
                order += [s for s in steps if s not in order]
        if c.binding:
            code = "UTE003"
        elif rej.part == "dimension":
            code = "UTE001"
        elif any(isinstance(a, _SLOTS) and a not in operands for a in path_atoms):
            code = "UTE003"
        else:
            code = "UTE002"
        chain = tuple(_step(result.constraints[i]) for i in order) + (_step(c),)
        out.append(Diagnostic(
            code=code,
            file=c.span.file,
            line=c.span.line,
            col=c.span.col,
            message=f"{CODES[code]} in {c.reason}" if c.reason else CODES[code],
            left_type=str(rej.left),
            right_type=str(rej.right),
            constraint=str(c),
            chain=chain,
            constraint_obj=c,
            chain_constraints=tuple(result.constraints[i] for i in order) + (c,),
        ))
    return out


def dedup(diagnostics) -> list:
    """Keep the first diagnostic per ``(file, line, signature)``."""
    seen = set()
    out = []
    for d in diagnostics:
        if d.key not in seen:
            seen.add(d.key)
            out.append(d)
    return out


# -- checking -------------------------------------------------------------------


@dataclass
class UnitReport:
    path: str
    constraints: list
    result: SolveResult
    diagnostics: list


def analyze_program(program, path: str = "<input>", protocol=None, db=None, options: GenOptions = GenOptions()) -> UnitReport:
    program, _, info = canonicalize(program, protocol=protocol)
    constraints = generate(program, info, protocol, db, options)
    result = solve(constraints)
    return UnitReport(path, constraints, result, diagnostics_for(result))


def analyze_file(path, protocol=None, db=None, options: GenOptions = GenOptions()) -> UnitReport:
    return analyze_program(load_unit(path), str(path), protocol, db, options)


@dataclass
class CheckResult:
    diagnostics: list
    units: list

    def to_json(self) -> str:
        return json.dumps([d.to_json() for d in self.diagnostics], indent=2) + "\n"

    def to_text(self, explain: bool = False) -> str:
        render = Diagnostic.explain if explain else Diagnostic.human
        return "".join(render(d) + "\n" for d in self.diagnostics)


def check_files(paths, protocol=None, db=None, options: GenOptions = GenOptions(), dedup_diagnostics: bool = True) -> CheckResult:
    """Check each file as its own translation unit and merge the results in file order."""
    units = [analyze_file(p, protocol, db, options) for p in paths]
    merged = [d for u in units for d in u.diagnostics]
    if dedup_diagnostics:
        merged = dedup(merged)
    return CheckResult(merged, units)
