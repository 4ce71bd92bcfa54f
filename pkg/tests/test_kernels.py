"""The compiled kernels and the pure-Python fallback must agree exactly."""

import importlib
import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unitlint.deduction import _kernels_py as py
from unitlint.deduction import kernels

compiled = pytest.importorskip("unitlint.deduction._kernels")

values = st.lists(st.floats(-1e4, 1e4, allow_nan=False), min_size=0, max_size=40)


def series(draw_values, rng, step=(0, 400)):
    ts, t = [], 0
    for _ in draw_values:
        t += rng.randint(*step)
        ts.append(t)
    return ts, list(draw_values)


@settings(max_examples=200)
@given(values, values, st.integers(0, 2**32), st.integers(1, 1000))
def test_align_pairs_agree(va, vb, seed, window):
    rng = random.Random(seed)
    ta, va = series(va, rng)
    tb, vb = series(vb, rng)
    assert compiled.align_pairs(ta, va, tb, vb, window) == py.align_pairs(ta, va, tb, vb, window)


@settings(max_examples=200)
@given(st.lists(st.tuples(st.floats(-1e4, 1e4), st.floats(-1e4, 1e4)), max_size=30), st.floats(0.001, 1))
def test_approx_check_agrees(pairs, eps):
    assert compiled.approx_check(pairs, eps) == py.approx_check(pairs, eps)


@settings(max_examples=200)
@given(values, st.integers(0, 2**32), st.floats(0.001, 0.5))
def test_plateaus_and_hits_agree(vs, seed, eps):
    rng = random.Random(seed)
    ts, vs = series([round(v, 1) for v in vs], rng)
    plats = py.plateaus(ts, vs, eps)
    assert compiled.plateaus(ts, vs, eps) == plats
    qt, qv = series(list(reversed(vs)), rng)
    assert compiled.later_hits(plats, qt, qv, eps) == py.later_hits(plats, qt, qv, eps)


def test_rel_err():
    for k in (compiled, py):
        assert k.rel_err(101.0, 100.0) == pytest.approx(0.01)
        assert k.rel_err(1e-3, 0.0) == 1e-3


def test_identical_and_disjoint_alignment():
    t = [0, 1000, 2000]
    assert kernels.align_pairs(t, [1, 2, 3], t, [4, 5, 6], 500) == [(1, 4), (2, 5), (3, 6)]
    assert kernels.align_pairs(t, [1, 2, 3], [9000, 9500], [4, 5], 500) == []
    shifted = [x + 200 for x in t]
    assert len(kernels.align_pairs(t, [1, 2, 3], shifted, [4, 5, 6], 500)) == 3


def test_each_observation_used_once():
    # both a-values are nearest to the single b-value
    assert kernels.align_pairs([0, 10], [1.0, 2.0], [6], [9.0], 500) == [(2.0, 9.0)]


def test_pure_python_switch():
    env = dict(os.environ, UNITLINT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from unitlint.deduction import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
    assert importlib.import_module("unitlint.deduction.kernels").BACKEND in ("compiled", "python")


def test_benchmark_smoke(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).parent.parent / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    assert bench.main(["--n", "400", "--repeat", "1"]) == 0
    assert "later_hits" in capsys.readouterr().out
