"""A deterministic interpreter that replays a scenario against a program.

Time is virtual: events fire at their scripted timestamps and QOI signals are
sampled on a fixed grid.  Every store to a non-local variable is a candidate
observation; a per-variable rate limiter keeps the first write in each
``1/sample_rate_hz`` window.

Class state is a single instance per class: ``Corr::link_offset`` names one
storage cell no matter which receiver a method was called on.
"""

from __future__ import annotations

import math

from unitlint.frontend import ast as A
from unitlint.frontend.canon import StaticInfo, VarRegistry
from unitlint.frontend.parser import BUILTIN_TYPES
from unitlint.runtime.scenario import Scenario, ScenarioError
from unitlint.runtime.trace import Observation, Trace

MAX_LOOP_ITERATIONS = 100_000
MAX_CALL_DEPTH = 200


class RuntimeFault(Exception):
    def __init__(self, span: A.Span, description: str):
        super().__init__(f"{span}: {description}")
        self.span = span
        self.description = description


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Break(Exception):
    pass


def _log(*_args):
    return 0.0


BUILTINS = {
    "fabsf": abs,
    "fabs": abs,
    "abs": abs,
    "min": min,
    "max": max,
    "sqrt": math.sqrt,
    "log": _log,
}


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


class Interpreter:
    def __init__(self, program: A.Program, info: StaticInfo, registry: VarRegistry,
                 scenario: Scenario, sample_rate_hz: float = 1.0):
        if sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        self.program = program
        self.info = info
        self.registry = registry
        self.scenario = scenario
        self.period_ms = 1000.0 / sample_rate_hz
        self.store: dict = {}
        self.rows: list = []
        self.last_recorded: dict = {}
        self.now = 0
        self.depth = 0

    # -- values -------------------------------------------------------------

    def default_value(self, ty: A.TypeRef | None):
        if ty is None:
            return 0.0
        if ty.array:
            return {}
        if ty.name in ("float", "double"):
            return 0.0
        if ty.name in BUILTIN_TYPES or ty.name in self.info.enums:
            return 0
        decl = self.info.structs.get(ty.name)
        if decl is None:
            return {}  # external struct: fields appear as they are written
        return {m.name: self.default_value(m.type) for m in decl.members}

    def arg_value(self, spec, t_ms: int):
        """Turn a scenario argument into a runtime value."""
        if isinstance(spec, bool):
            return int(spec)
        if _is_number(spec):
            return spec
        if isinstance(spec, dict):
            return {k: self.arg_value(v, t_ms) for k, v in spec.items()}
        if isinstance(spec, list):
            return {i: self.arg_value(v, t_ms) for i, v in enumerate(spec)}
        if isinstance(spec, str):
            if spec.startswith("qoi:"):
                name, _, factor = spec[4:].partition("*")
                series = self.scenario.series.get(name)
                if series is None:
                    raise ScenarioError(f"argument {spec!r} names an unknown QOI")
                try:
                    scale = float(factor) if factor else 1.0
                except ValueError:
                    raise ScenarioError(f"bad QOI factor in {spec!r}") from None
                return series(t_ms) * scale
            if spec in self.info.constants:
                return self.info.constants[spec]
            return spec
        raise ScenarioError(f"unsupported argument {spec!r}")

    # -- recording ----------------------------------------------------------

    def record(self, canon: str, value):
        if not _is_number(value):
            return
        var_id = self.registry.id_for(canon)
        last = self.last_recorded.get(var_id)
        if last is not None and self.now - last < self.period_ms - 1e-9:
            return
        self.last_recorded[var_id] = self.now
        self.rows.append(Observation(self.now, "var", var_id, float(value)))

    # -- setup and main loop ------------------------------------------------

    def initialize(self):
        for d in self.program.decls:
            if isinstance(d, A.StructDecl) and d.kind == "class":
                for m in d.members:
                    self.store[f"{d.name}::{m.name}"] = self.default_value(m.type)
        for g in self.program.globals:
            self.store[g.canon] = self.eval(g.init, {}) if g.init is not None else self.default_value(g.type)
        for name, spec in self.scenario.globals.items():
            if name not in self.store:
                raise ScenarioError(f"[globals] names unknown variable {name!r}")
            self.store[name] = self.arg_value(spec, 0)

    def run(self) -> Trace:
        for ev in self.scenario.events:
            if ev.call not in self.info.functions:
                raise ScenarioError(f"event at {ev.t_ms} ms calls unknown function {ev.call!r}")
        self.initialize()
        duration = self.scenario.duration_ms
        qoi_names = sorted(self.scenario.series)
        n_samples = int(math.ceil(duration / self.period_ms - 1e-9))
        sample_times = [int(round(k * self.period_ms)) for k in range(n_samples)] if qoi_names else []
        events = self.scenario.events
        i = j = 0
        while i < len(sample_times) or j < len(events):
            # QOI rows precede events that share a timestamp
            if j >= len(events) or (i < len(sample_times) and sample_times[i] <= events[j].t_ms):
                t = sample_times[i]
                for name in qoi_names:
                    self.rows.append(Observation(t, "qoi", name, float(self.scenario.series[name](t))))
                i += 1
            else:
                ev = events[j]
                self.now = ev.t_ms
                fn = self.info.functions[ev.call]
                args = [self.arg_value(a, ev.t_ms) for a in ev.args]
                if len(args) != len(fn.params):
                    raise ScenarioError(
                        f"event at {ev.t_ms} ms passes {len(args)} argument(s) to {ev.call}, expected {len(fn.params)}"
                    )
                self.call_function(fn, args, fn.span)
                j += 1
        return Trace(self.rows)

    # -- statements ---------------------------------------------------------

    def call_function(self, fn: A.FunctionDef, args: list, span: A.Span):
        if self.depth >= MAX_CALL_DEPTH:
            raise RuntimeFault(span, "call depth limit exceeded")
        env = {}
        for p, v in zip(fn.params, args):
            env[f"{fn.qualname}/{p.name}"] = v
        self.depth += 1
        try:
            self.exec_block(fn.body, env)
        except _Return as r:
            return r.value
        except _Break:
            raise RuntimeFault(span, "break outside switch or loop") from None
        finally:
            self.depth -= 1
        return None

    def exec_block(self, block: A.Block, env: dict):
        for s in block.stmts:
            self.exec(s, env)

    def exec(self, s, env):
        if isinstance(s, A.Block):
            self.exec_block(s, env)
        elif isinstance(s, A.VarDecl):
            env[s.canon] = self.eval(s.init, env) if s.init is not None else self.default_value(s.type)
        elif isinstance(s, A.Assign):
            value = self.eval(s.value, env)
            self.assign(s.target, value, env)
        elif isinstance(s, A.ExprStmt):
            self.eval(s.expr, env)
        elif isinstance(s, A.If):
            if self.truthy(self.eval(s.cond, env)):
                self.exec_block(s.then, env)
            elif s.orelse is not None:
                self.exec(s.orelse, env)
        elif isinstance(s, A.Return):
            raise _Return(self.eval(s.value, env) if s.value is not None else None)
        elif isinstance(s, A.Break):
            raise _Break()
        elif isinstance(s, A.While):
            n = 0
            try:
                while self.truthy(self.eval(s.cond, env)):
                    n += 1
                    if n > MAX_LOOP_ITERATIONS:
                        raise RuntimeFault(s.span, "loop iteration limit exceeded")
                    self.exec_block(s.body, env)
            except _Break:
                pass
        elif isinstance(s, A.Switch):
            self.exec_switch(s, env)
        else:
            raise RuntimeFault(s.span, f"cannot execute {type(s).__name__}")

    def exec_switch(self, s: A.Switch, env):
        subject = self.eval(s.subject, env)
        start = None
        for k, case in enumerate(s.cases):
            if case.values is not None and any(self.eval(v, env) == subject for v in case.values):
                start = k
                break
        if start is None:
            start = next((k for k, c in enumerate(s.cases) if c.values is None), None)
        if start is None:
            return
        try:
            for case in s.cases[start:]:  # C fallthrough
                for b in case.body:
                    self.exec(b, env)
        except _Break:
            pass

    def assign(self, target, value, env):
        if isinstance(target, A.Name):
            if target.canon in env:
                env[target.canon] = value
            else:
                self.store[target.canon] = value
        else:
            container = self.eval(target.obj, env)
            if not isinstance(container, dict):
                raise RuntimeFault(target.span, "member or index store into a non-aggregate value")
            if isinstance(target, A.Member):
                container[target.attr] = value
            else:
                container[self.index_key(target, env)] = value
        if not target.local:
            self.record(target.canon, value)

    # -- expressions --------------------------------------------------------

    @staticmethod
    def truthy(v) -> bool:
        return bool(v)

    def index_key(self, node: A.Index, env):
        idx = self.eval(node.index, env)
        if not _is_number(idx) or idx != int(idx):
            raise RuntimeFault(node.span, f"array index must be an integer, got {idx!r}")
        return int(idx)

    def eval(self, e, env):
        if isinstance(e, A.Number):
            text = e.text
            return int(text) if text.isdigit() else float(text)
        if isinstance(e, A.String):
            return e.value
        if isinstance(e, A.Name):
            if e.const is not None:
                return self.info.constants[e.const]
            if e.canon in env:
                return env[e.canon]
            if e.canon in self.store:
                return self.store[e.canon]
            raise RuntimeFault(e.span, f"read of unbound variable {e.id}")
        if isinstance(e, A.Member):
            obj = self.eval(e.obj, env)
            if not isinstance(obj, dict):
                raise RuntimeFault(e.span, f"member access .{e.attr} on a non-struct value")
            return obj.get(e.attr, 0.0)
        if isinstance(e, A.Index):
            arr = self.eval(e.obj, env)
            if not isinstance(arr, dict):
                raise RuntimeFault(e.span, "indexing a non-array value")
            return arr.get(self.index_key(e, env), 0.0)
        if isinstance(e, A.Unary):
            v = self.eval(e.operand, env)
            if e.op == "!":
                return int(not self.truthy(v))
            return -self.number(v, e)
        if isinstance(e, A.Binary):
            return self.binary(e, env)
        if isinstance(e, A.Call):
            return self.call(e, env)
        raise RuntimeFault(e.span, f"cannot evaluate {type(e).__name__}")

    def number(self, v, node):
        if not _is_number(v):
            raise RuntimeFault(node.span, f"expected a number, got {type(v).__name__}")
        return v

    def binary(self, e: A.Binary, env):
        op = e.op
        if op == "&&":
            return int(self.truthy(self.eval(e.left, env)) and self.truthy(self.eval(e.right, env)))
        if op == "||":
            return int(self.truthy(self.eval(e.left, env)) or self.truthy(self.eval(e.right, env)))
        a = self.eval(e.left, env)
        b = self.eval(e.right, env)
        if op == "==":
            return int(a == b)
        if op == "!=":
            return int(a != b)
        a, b = self.number(a, e.left), self.number(b, e.right)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0:
                raise RuntimeFault(e.span, "division by zero")
            if isinstance(a, int) and isinstance(b, int):
                return int(a / b)  # C truncation
            return a / b
        if op == "<":
            return int(a < b)
        if op == ">":
            return int(a > b)
        if op == "<=":
            return int(a <= b)
        if op == ">=":
            return int(a >= b)
        raise RuntimeFault(e.span, f"unknown operator {op}")

    def call(self, e: A.Call, env):
        args = [self.eval(a, env) for a in e.args]
        fn = self.info.functions.get(e.target)
        if fn is not None:
            if len(args) != len(fn.params):
                raise RuntimeFault(e.span, f"{e.target} expects {len(fn.params)} argument(s), got {len(args)}")
            result = self.call_function(fn, args, e.span)
            return 0.0 if result is None else result
        builtin = BUILTINS.get(e.func)
        if builtin is None:
            raise RuntimeFault(e.span, f"call to unresolved function {e.target or e.func}")
        if builtin is not _log:
            args = [self.number(a, e) for a in args]
        try:
            return builtin(*args)
        except (TypeError, ValueError) as exc:
            raise RuntimeFault(e.span, f"{e.func}: {exc}") from None


def interpret(program: A.Program, scenario: Scenario, registry: VarRegistry,
              sample_rate_hz: float = 1.0, info: StaticInfo | None = None) -> Trace:
    """Run ``scenario`` against a canonicalized ``program``."""
    if info is None:
        from unitlint.frontend.canon import canonicalize

        _, registry, info = canonicalize(program, registry)
    return Interpreter(program, info, registry, scenario, sample_rate_hz).run()


def enum_var_ids(info: StaticInfo, registry: VarRegistry) -> list:
    return sorted(registry.id_for(c) for c in info.enum_vars if c in info.nonlocal_)
