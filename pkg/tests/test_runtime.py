import io

import pytest

from unitlint.frontend import canonicalize, parse_source
from unitlint.runtime import (
    Observation,
    RuntimeFault,
    ScenarioError,
    Trace,
    TraceFormatError,
    interpret,
    load_qoi_decls,
    load_scenario,
    loads_scenario,
    read_trace,
    write_trace,
)
from unitlint.units import Frame, parse_unit_string

ALT_PROGRAM = """
struct gps_t { float alt; };
float _alt;
void on_gps(gps_t msg) {
    float scratch = msg.alt;
    _alt = scratch;
}
"""

ALT_SCENARIO = """
duration_s = 10
tick_ms = 100

[qoi.alt]
unit = "m"
frame = "GLOBAL"
expr = "ramp(0, 50, 0, 8000)"

[[event]]
t_ms = 0
every_ms = 100
call = "on_gps"
args = [{ alt = "qoi:alt" }]
"""


def run(src, scenario, rate=1.0):
    prog, reg, info = canonicalize(parse_source(src))
    return interpret(prog, loads_scenario(scenario), reg, rate, info), reg, info


def test_rate_limit_keeps_one_write_per_second():
    trace, reg, _ = run(ALT_PROGRAM, ALT_SCENARIO)
    alt = [o for o in trace.rows if o.kind == "var" and o.id == reg.get("_alt")]
    assert len(alt) == 10
    assert [o.timestamp_ms for o in alt] == list(range(0, 10000, 1000))
    qoi = [o for o in trace.rows if o.kind == "qoi"]
    assert len(qoi) >= 10


def test_first_write_in_window_is_kept():
    src = "float v; void f() { v = 1.0; v = 2.0; }"
    scen = 'duration_s = 1\ntick_ms = 10\n[[event]]\nt_ms = 0\ncall = "f"\nargs = []\n'
    trace, reg, _ = run(src, scen)
    rows = [o for o in trace.rows if o.kind == "var"]
    assert [(o.id, o.value) for o in rows] == [(reg.get("v"), 1.0)]


def test_locals_are_not_recorded():
    src = "void f() { float t = 3.0; t = t + 1.0; }"
    scen = 'duration_s = 2\ntick_ms = 10\n[[event]]\nt_ms = 0\nevery_ms = 100\ncall = "f"\nargs = []\n'
    trace, reg, info = run(src, scen)
    assert all(o.kind == "qoi" for o in trace.rows)


def test_no_local_ids_and_gaps_respected(fixtures):
    prog, reg, info = canonicalize(parse_source((fixtures / "pipeline" / "altitude.ml4u").read_text()))
    scen = load_scenario(fixtures / "pipeline" / "scenario.toml")
    trace = interpret(prog, scen, reg, 1.0, info)
    last = {}
    for o in trace.rows:
        if o.kind != "var":
            continue
        assert reg.name_of(o.id) in info.nonlocal_
        if o.id in last:
            assert o.timestamp_ms - last[o.id] >= 1000 - scen.tick_ms
        last[o.id] = o.timestamp_ms
    times = [o.timestamp_ms for o in trace.rows]
    assert times == sorted(times)


def test_interpretation_is_deterministic(fixtures):
    def once():
        prog, reg, info = canonicalize(parse_source((fixtures / "pipeline" / "altitude.ml4u").read_text()))
        buf = io.StringIO()
        write_trace(interpret(prog, load_scenario(fixtures / "pipeline" / "scenario.toml"), reg, 1.0, info), buf)
        return buf.getvalue()

    assert once() == once()


def test_division_by_zero_faults():
    src = "float v; void f() { v = 1.0 / 0.0; }"
    scen = 'duration_s = 1\ntick_ms = 10\n[[event]]\nt_ms = 0\ncall = "f"\nargs = []\n'
    with pytest.raises(RuntimeFault):
        run(src, scen)


def test_unknown_event_target():
    with pytest.raises((RuntimeFault, ScenarioError)):
        run("void f() { }", 'duration_s = 1\ntick_ms = 10\n[[event]]\nt_ms = 0\ncall = "g"\nargs = []\n')


def test_trace_round_trip():
    t = Trace([Observation(0, "var", 3, 1.5), Observation(10, "qoi", "alt", -2.25), Observation(10, "var", 0, 1e-12)])
    buf = io.StringIO()
    write_trace(t, buf)
    assert read_trace(io.StringIO(buf.getvalue())).rows == t.rows


def test_hand_written_trace():
    text = "timestamp_ms,kind,id,value\n0,var,0,1.0\n5,qoi,alt,2.5\n9,var,1,-3\n"
    rows = read_trace(io.StringIO(text)).rows
    assert rows == [Observation(0, "var", 0, 1.0), Observation(5, "qoi", "alt", 2.5), Observation(9, "var", 1, -3.0)]


@pytest.mark.parametrize("row,line", [("a,b", 2), ("0,var,x,1.0", 2), ("0,thing,1,2", 2), ("-5,var,1,2", 2)])
def test_malformed_trace_rows(row, line):
    text = "timestamp_ms,kind,id,value\n" + row + "\n"
    with pytest.raises(TraceFormatError) as info:
        read_trace(io.StringIO(text))
    assert info.value.line == line


def test_default_qoi_set():
    decls = load_qoi_decls()
    assert decls["alt"].unit == parse_unit_string("m").with_frame(Frame.concrete("GLOBAL"))
    assert decls["time_boot"].unit == parse_unit_string("us")
    assert decls["obstacle_heading"].unit.frame == Frame.concrete("BODY_FRD") if "obstacle_heading" in decls else True
    assert len(decls) >= 15


def test_bad_scenarios():
    with pytest.raises(ScenarioError):
        loads_scenario("duration_s = -1\n")
    with pytest.raises(ScenarioError):
        loads_scenario('duration_s = 1\n[qoi.x]\nunit = "m"\nexpr = "wobble(3)"\n')
