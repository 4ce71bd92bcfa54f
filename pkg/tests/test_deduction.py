import random
from fractions import Fraction

import pytest

from oracles import ramp_through, steps
from unitlint.deduction import (
    DatabaseFormatError,
    MiningConfig,
    TypeDatabase,
    align_pairs,
    build_type_db,
    filter_candidates,
    mine_approximate,
    mine_eventually,
    mine_linear,
)
from unitlint.runtime import Observation, QoiDecl, Trace
from unitlint.units import Frame, parse_unit_string

ALT = QoiDecl("alt", parse_unit_string("m").with_frame(Frame.concrete("GLOBAL")))
DIST = QoiDecl("distance", parse_unit_string("m").with_frame(Frame.concrete("BODY_FRD")))


def make_trace(vars_=None, qois=None) -> Trace:
    rows = []
    for var_id, (ts, vs) in (vars_ or {}).items():
        rows += [Observation(t, "var", var_id, float(v)) for t, v in zip(ts, vs)]
    for name, (ts, vs) in (qois or {}).items():
        rows += [Observation(t, "qoi", name, float(v)) for t, v in zip(ts, vs)]
    rows.sort(key=lambda o: o.timestamp_ms)
    return Trace(rows)


def alt_series(n=40, seed=1):
    rng = random.Random(seed)
    ts = [k * 1000 for k in range(n)]
    return ts, [20 + 2 * k + rng.uniform(-1, 1) for k in range(n)]


# -- filtering -----------------------------------------------------------------


def test_filter_candidates():
    t = [0, 1000, 2000]
    trace = make_trace({0: (t, [3, 3, 3]), 1: (t, [500, 500, 500]), 2: ([0], [123.4]), 3: (t, [1, 2, 3]),
                        4: (t, [7, 8, 9])})
    assert filter_candidates(trace, enum_ids={4}) == {1, 3}


def test_filter_threshold_is_configurable():
    t = [0, 1000]
    trace = make_trace({0: (t, [30, 30])})
    assert filter_candidates(trace, cfg=MiningConfig(small_const_threshold=50)) == set()


# -- alignment -----------------------------------------------------------------


def test_alignment_examples():
    t = [0, 1000, 2000, 3000]
    assert align_pairs((t, [1, 2, 3, 4]), (t, [5, 6, 7, 8]), 500) == [(1, 5), (2, 6), (3, 7), (4, 8)]
    assert align_pairs((t, [1, 2, 3, 4]), ([10000, 11000], [0, 0]), 500) == []
    assert len(align_pairs((t, [1, 2, 3, 4]), ([x + 200 for x in t], [5, 6, 7, 8]), 500)) == 4


# -- approximate ---------------------------------------------------------------


def test_approximate_examples():
    ts, q = alt_series()
    rng = random.Random(2)
    assert mine_approximate((ts, [x * (1 + rng.uniform(-0.01, 0.01)) for x in q]), (ts, q))
    assert mine_approximate((ts, q), (ts, q))
    bad = list(q)
    bad[17] *= 1.5
    assert not mine_approximate((ts, bad), (ts, q))


def test_approximate_needs_two_pairs():
    assert not mine_approximate(([0], [1.0]), ([0], [1.0]))


def test_near_zero_qoi_compares_absolutely():
    ts = [0, 1000, 2000]
    assert mine_approximate((ts, [0.01, 0.02, 0.0]), (ts, [0.0, 0.0, 0.0]))
    assert not mine_approximate((ts, [0.1, 0.02, 0.0]), (ts, [0.0, 0.0, 0.0]))


# -- linear --------------------------------------------------------------------


def test_linear_centimetres_of_a_metre_qoi():
    ts, q = alt_series()
    fit = mine_linear((ts, [100 * x for x in q]), (ts, q))
    assert fit is not None and fit.snapped_scale == 2 and fit.snapped_factor == 100.0
    assert abs(fit.pearson_r) > 0.999


def test_linear_rejects_off_table_and_negative():
    ts, q = alt_series()
    assert mine_linear((ts, [3.7 * x for x in q]), (ts, q)) is None
    assert mine_linear((ts, [-100 * x for x in q]), (ts, q)) is None
    assert mine_linear((ts, [100 * x + 900 for x in q]), (ts, q)) is None


def test_linear_needs_variance():
    ts = [0, 1000, 2000, 3000]
    assert mine_linear((ts, [5, 5, 5, 5]), (ts, [1, 2, 3, 4])) is None


@pytest.mark.parametrize("k,scale", [(100.0, Fraction(2)), (0.001, Fraction(-3)), (1e6, Fraction(6)),
                                     (1 / 0.9144, None)])
def test_linear_recovers_table_entry_under_noise(k, scale):
    rng = random.Random(int(k * 1000) % 97)
    ts = [i * 1000 for i in range(60)]
    q = [rng.uniform(1, 100) for _ in ts]
    fit = mine_linear((ts, [k * x * (1 + rng.gauss(0, 0.001)) for x in q]), (ts, q))
    assert fit is not None
    assert fit.snapped_factor == pytest.approx(k, rel=1e-12)
    if scale is not None:
        assert fit.snapped_scale == scale


# -- eventually ----------------------------------------------------------------


def test_prophecy_steps_reached_later():
    rng = random.Random(3)
    target = steps(rng, [10, 30, 50], 10, period=1000)
    alt = ramp_through([10, 30, 50], 500, period=250, per_leg=40)
    assert mine_eventually(target, alt)


def test_prophecy_never_reached():
    rng = random.Random(4)
    target = steps(rng, [10, 30, 50], 10, period=1000)
    alt = ramp_through([3, 5, 7], 500, period=250, per_leg=40)
    assert not mine_eventually(target, alt)


def test_eventually_confidence_threshold():
    levels = [10 * 1.5**k for k in range(40)]
    rng = random.Random(5)
    var = steps(rng, levels, 3, noise=0)
    q39 = ramp_through(levels[:39], var[0][-1] + 100, per_leg=30)
    q38 = ramp_through(levels[:38], var[0][-1] + 100, per_leg=30)
    cfg = MiningConfig()
    assert mine_eventually(var, q39, cfg)  # 39/40 = 0.975
    assert not mine_eventually(var, q38, cfg)


def test_eventually_reverse_direction():
    rng = random.Random(6)
    qoi = steps(rng, [10, 30, 50], 10, period=1000)
    var = ramp_through([10, 30, 50], 500, period=250, per_leg=40)
    assert mine_eventually(var, qoi)


# -- database ------------------------------------------------------------------


def test_empty_trace_gives_empty_db():
    assert len(build_type_db(Trace(), {"alt": ALT})) == 0


def test_smaller_error_wins_among_qois():
    ts, q = alt_series()
    d = [x * 1.03 for x in q]
    v = [x * 1.003 for x in q]
    db = build_type_db(make_trace({0: (ts, v)}, {"alt": (ts, q), "distance": (ts, d)}),
                       {"alt": ALT, "distance": DIST}, names={0: "_alt"})
    entry = db.entries[0]
    assert (entry.qoi, entry.rule, entry.unit) == ("alt", "approximate", ALT.unit)


def test_rule_precedence_and_linear_type():
    ts, q = alt_series()
    trace = make_trace({0: (ts, q), 1: (ts, [100 * x for x in q])}, {"alt": (ts, q)})
    db = build_type_db(trace, {"alt": ALT})
    assert db.entries[0].rule == "approximate"
    lin = db.entries[1]
    assert lin.rule == "linear" and lin.scale_log10 == 2
    assert lin.unit == parse_unit_string("cm").with_frame(Frame.concrete("GLOBAL"))


def test_target_altitude_prophecy_db():
    rng = random.Random(7)
    target = steps(rng, [10, 30, 50], 10, period=1000)
    alt = ramp_through([10, 30, 50], 500, period=250, per_leg=40)
    db = build_type_db(make_trace({0: target}, {"alt": alt}), {"alt": ALT}, names={0: "target_altitude"})
    entry = db.by_name()["target_altitude"]
    assert entry.unit == ALT.unit and entry.rule == "eventually"


def test_approximate_is_monotone_in_eps():
    rng = random.Random(8)
    ts, q = alt_series(30)
    vars_ = {k: (ts, [x * (1 + rng.uniform(-e, e)) for x in q]) for k, e in enumerate([0.001, 0.02, 0.04, 0.08, 0.2] * 4)}
    trace = make_trace(vars_, {"alt": (ts, q)})
    sets = []
    for eps in (0.10, 0.05, 0.025, 0.01):
        cfg = MiningConfig(eps_approx=eps)
        sets.append({v for v, s in vars_.items() if mine_approximate(s, (ts, q), cfg)})
    for wide, narrow in zip(sets, sets[1:]):
        assert narrow <= wide


def test_db_determinism_and_json_round_trip():
    ts, q = alt_series()
    trace = make_trace({0: (ts, q), 1: (ts, [100 * x for x in q])}, {"alt": (ts, q)})
    a = build_type_db(trace, {"alt": ALT}, names={0: "a", 1: "b"})
    b = build_type_db(trace, {"alt": ALT}, names={0: "a", 1: "b"})
    assert a.to_json() == b.to_json()
    back = TypeDatabase.from_json(a.to_json())
    assert back.to_json() == a.to_json()


@pytest.mark.parametrize("text", ["{", "{}", '[{"unit": "m"}]', '[{"canonical_name": "x", "unit": "parsec"}]',
                                  '[{"canonical_name": "x", "unit": "m"}, {"canonical_name": "x", "unit": "m"}]'])
def test_db_format_errors(text):
    with pytest.raises(DatabaseFormatError):
        TypeDatabase.from_json(text)


def test_mining_config_validation():
    with pytest.raises(ValueError):
        MiningConfig(eps_approx=0)
    with pytest.raises(ValueError):
        MiningConfig(pair_window_ms=0)
