"""Compare the compiled mining kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--n 20000] [--repeat 5]

Both backends get identical inputs; their outputs are checked for equality
before anything is timed.
"""

import argparse
import random
import sys
import timeit

from unitlint.deduction import _kernels_py as py

try:
    from unitlint.deduction import _kernels as compiled
except ImportError:
    compiled = None


def make_inputs(n: int, seed: int = 1):
    rng = random.Random(seed)
    ta, t = [], 0
    for _ in range(n):
        t += rng.randint(50, 400)
        ta.append(t)
    va = [100 + 50 * ((i // 40) % 7) + rng.gauss(0, 0.5) for i in range(n)]
    tb = [x + rng.randint(-120, 120) for x in ta[::2]]
    tb.sort()
    vb = [v * (1 + rng.uniform(-0.01, 0.01)) for v in va[::2]]
    return ta, va, tb, vb


def cases(mod, data):
    ta, va, tb, vb = data
    pairs = mod.align_pairs(ta, va, tb, vb, 500)
    plats = mod.plateaus(ta, va, 0.05)
    return {
        "align_pairs": lambda: mod.align_pairs(ta, va, tb, vb, 500),
        "approx_check": lambda: mod.approx_check(pairs, 0.05),
        "plateaus": lambda: mod.plateaus(ta, va, 0.05),
        "later_hits": lambda: mod.later_hits(plats, tb, vb, 0.05),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000, help="observations per series")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if compiled is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation` first", file=sys.stderr)
        return 1

    data = make_inputs(args.n)
    py_cases, c_cases = cases(py, data), cases(compiled, data)
    for name in py_cases:
        assert py_cases[name]() == c_cases[name](), f"{name}: backends disagree"

    print(f"{'kernel':<14}{'python ms':>12}{'compiled ms':>14}{'speedup':>10}")
    for name in py_cases:
        tp = min(timeit.repeat(py_cases[name], number=1, repeat=args.repeat)) * 1e3
        tc = min(timeit.repeat(c_cases[name], number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<14}{tp:>12.2f}{tc:>14.3f}{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
