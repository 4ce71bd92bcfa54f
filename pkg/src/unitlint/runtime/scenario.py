"""Scripted scenarios: QOI signals plus timed calls into the program.

Scenario files are TOML::

    duration_s = 10
    tick_ms = 100

    [qoi.alt]
    unit = "m"
    frame = "GLOBAL"
    expr = "ramp(0, 50, 0, 8000)"

    [[event]]
    t_ms = 0
    every_ms = 100
    call = "on_altitude"
    args = [{ alt = "qoi:alt*100" }]

QOI series come from ``expr`` generators (``constant``, ``linear``, ``ramp``,
``sine``) or from ``csv`` points ``[[t_ms, value], ...]`` interpolated
linearly.  Virtual time runs over ``[0, duration)``; a repeating event fires
every ``every_ms`` from ``t_ms`` up to, not including, ``until_ms``.  A QOI
file for deduction uses the same ``[qoi.<name>]`` tables and may omit the
series.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import tomli

from unitlint.units import Frame, UnitType, parse_unit_string


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class QoiDecl:
    name: str
    unit: UnitType  # frame included


class Series:
    def __call__(self, t_ms: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Series):
    value: float

    def __call__(self, t_ms):
        return self.value


@dataclass(frozen=True)
class Linear(Series):
    start: float
    slope_per_s: float

    def __call__(self, t_ms):
        return self.start + self.slope_per_s * t_ms / 1000.0


@dataclass(frozen=True)
class Ramp(Series):
    lo: float
    hi: float
    t0_ms: float
    t1_ms: float

    def __call__(self, t_ms):
        if t_ms <= self.t0_ms:
            return self.lo
        if t_ms >= self.t1_ms:
            return self.hi
        frac = (t_ms - self.t0_ms) / (self.t1_ms - self.t0_ms)
        return self.lo + (self.hi - self.lo) * frac


@dataclass(frozen=True)
class Sine(Series):
    offset: float
    amplitude: float
    period_s: float

    def __call__(self, t_ms):
        return self.offset + self.amplitude * math.sin(2 * math.pi * t_ms / (1000.0 * self.period_s))


@dataclass(frozen=True)
class Points(Series):
    times: tuple
    values: tuple

    def __call__(self, t_ms):
        ts = self.times
        i = bisect.bisect_right(ts, t_ms)
        if i == 0:
            return self.values[0]
        if i == len(ts):
            return self.values[-1]
        t0, t1 = ts[i - 1], ts[i]
        v0, v1 = self.values[i - 1], self.values[i]
        return v0 + (v1 - v0) * (t_ms - t0) / (t1 - t0)


_GENERATORS = {"constant": (Constant, 1), "linear": (Linear, 2), "ramp": (Ramp, 4), "sine": (Sine, 3)}
_CALL = re.compile(r"^\s*([a-z]+)\s*\(([^()]*)\)\s*$")


def parse_series_expr(text: str) -> Series:
    m = _CALL.match(text)
    if not m or m.group(1) not in _GENERATORS:
        raise ScenarioError(f"bad series expression {text!r}; expected one of {sorted(_GENERATORS)}")
    cls, arity = _GENERATORS[m.group(1)]
    try:
        args = [float(a) for a in m.group(2).split(",")] if m.group(2).strip() else []
    except ValueError:
        raise ScenarioError(f"non-numeric argument in {text!r}") from None
    if len(args) != arity:
        raise ScenarioError(f"{m.group(1)} takes {arity} arguments, got {len(args)}")
    if cls is Ramp and args[3] <= args[2]:
        raise ScenarioError(f"ramp end must follow its start in {text!r}")
    if cls is Sine and args[2] <= 0:
        raise ScenarioError(f"sine period must be positive in {text!r}")
    return cls(*args)


@dataclass(frozen=True)
class Event:
    t_ms: int
    call: str
    args: tuple


@dataclass
class Scenario:
    duration_s: float
    tick_ms: int = 1
    qois: dict = field(default_factory=dict)  # name -> QoiDecl
    series: dict = field(default_factory=dict)  # name -> Series
    events: list = field(default_factory=list)
    globals: dict = field(default_factory=dict)

    @property
    def duration_ms(self) -> int:
        return int(round(self.duration_s * 1000))


_SCENARIO_KEYS = {"duration_s", "tick_ms", "qoi", "event", "globals"}
_QOI_KEYS = {"unit", "frame", "expr", "csv"}
_EVENT_KEYS = {"t_ms", "call", "args", "every_ms", "until_ms"}


def _read_toml(path) -> dict:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            return tomli.load(fh)
    except FileNotFoundError:
        raise ScenarioError(f"{path}: no such file") from None
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from None


def _qoi_decls(table: dict) -> dict:
    decls = {}
    for name, spec in table.items():
        if not isinstance(spec, dict):
            raise ScenarioError(f"[qoi.{name}] must be a table")
        extra = set(spec) - _QOI_KEYS
        if extra:
            raise ScenarioError(f"[qoi.{name}]: unknown keys {sorted(extra)}")
        if "unit" not in spec:
            raise ScenarioError(f"[qoi.{name}] needs a unit")
        frame = Frame.parse(spec.get("frame", "Any"))
        decls[name] = QoiDecl(name, parse_unit_string(spec["unit"]).with_frame(frame))
    return decls


def load_qoi_decls(path=None) -> dict:
    """QOI name -> QoiDecl.  ``None`` loads the shipped default set."""
    if path is None:
        text = resources.files("unitlint.data").joinpath("qoi.toml").read_text(encoding="utf-8")
        return _qoi_decls(tomli.loads(text).get("qoi", {}))
    return _qoi_decls(_read_toml(path).get("qoi", {}))


def load_scenario(path) -> Scenario:
    return scenario_from_dict(_read_toml(path))


def loads_scenario(text: str) -> Scenario:
    try:
        return scenario_from_dict(tomli.loads(text))
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"TOML error: {exc}") from None


def scenario_from_dict(raw: dict) -> Scenario:
    extra = set(raw) - _SCENARIO_KEYS
    if extra:
        raise ScenarioError(f"unknown top-level keys {sorted(extra)}")
    if "duration_s" not in raw:
        raise ScenarioError("scenario needs duration_s")
    duration_s = float(raw["duration_s"])
    tick = int(raw.get("tick_ms", 1))
    if duration_s <= 0 or tick <= 0:
        raise ScenarioError("duration_s and tick_ms must be positive")
    sc = Scenario(duration_s, tick, globals=dict(raw.get("globals", {})))
    duration_ms = sc.duration_ms
    qtable = raw.get("qoi", {})
    sc.qois = _qoi_decls(qtable)
    for name, spec in qtable.items():
        if "expr" in spec and "csv" in spec:
            raise ScenarioError(f"[qoi.{name}]: give expr or csv, not both")
        if "expr" in spec:
            sc.series[name] = parse_series_expr(spec["expr"])
        elif "csv" in spec:
            pts = spec["csv"]
            try:
                ts = tuple(float(p[0]) for p in pts)
                vs = tuple(float(p[1]) for p in pts)
            except (TypeError, ValueError, IndexError):
                raise ScenarioError(f"[qoi.{name}].csv must be [[t_ms, value], ...]") from None
            if not ts or any(b <= a for a, b in zip(ts, ts[1:])):
                raise ScenarioError(f"[qoi.{name}].csv times must be strictly increasing")
            if ts[0] > 0 or ts[-1] < duration_ms:
                raise ScenarioError(f"[qoi.{name}].csv must cover [0, {duration_ms}] ms")
            sc.series[name] = Points(ts, vs)
        else:
            raise ScenarioError(f"[qoi.{name}] needs expr or csv")

    events = []
    for i, ev in enumerate(raw.get("event", [])):
        extra = set(ev) - _EVENT_KEYS
        if extra:
            raise ScenarioError(f"event {i}: unknown keys {sorted(extra)}")
        if "t_ms" not in ev or "call" not in ev:
            raise ScenarioError(f"event {i} needs t_ms and call")
        args = ev.get("args", [])
        if not isinstance(args, list):
            raise ScenarioError(f"event {i}: args must be a list")
        t0 = int(ev["t_ms"])
        every = ev.get("every_ms")
        until = int(ev.get("until_ms", duration_ms))
        times = [t0]
        if every is not None:
            every = int(every)
            if every <= 0:
                raise ScenarioError(f"event {i}: every_ms must be positive")
            times = list(range(t0, until, every))
        for t in times:
            if t < 0 or t >= duration_ms:
                raise ScenarioError(f"event {i}: time {t} ms outside [0, {duration_ms})")
            if t % tick:
                raise ScenarioError(f"event {i}: time {t} ms is not a multiple of tick_ms={tick}")
            events.append((t, i, Event(t, ev["call"], tuple(args))))
    events.sort(key=lambda e: (e[0], e[1]))
    sc.events = [e for _, _, e in events]
    return sc
