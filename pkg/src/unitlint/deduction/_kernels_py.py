"""Pure-Python mining kernels.

Semantics are shared with the compiled ``_kernels`` module; the two are
checked against each other in the test suite.
"""

from __future__ import annotations

TINY = 1e-9


def rel_err(v: float, q: float) -> float:
    """Relative error of ``v`` against reference ``q``; absolute near zero."""
    d = abs(v - q)
    aq = abs(q)
    return d / aq if aq >= TINY else d


def align_pairs(ta, va, tb, vb, window_ms):
    """Greedy nearest-timestamp matching, each observation used once.

    Candidate pairs within the window are taken in order of ``|dt|``, ties by
    index in ``a`` then ``b``.  The result is ordered by position in ``a``.
    """
    nb = len(tb)
    cands = []
    lo = 0
    for i, t in enumerate(ta):
        while lo < nb and tb[lo] < t - window_ms:
            lo += 1
        j = lo
        while j < nb and tb[j] <= t + window_ms:
            cands.append((abs(tb[j] - t), i, j))
            j += 1
    cands.sort()
    used_a = bytearray(len(ta))
    used_b = bytearray(nb)
    chosen = []
    for _, i, j in cands:
        if not used_a[i] and not used_b[j]:
            used_a[i] = used_b[j] = 1
            chosen.append((i, j))
    chosen.sort()
    return [(va[i], vb[j]) for i, j in chosen]


def approx_check(pairs, eps):
    """``(all pairs within eps, mean relative error)``."""
    if not pairs:
        return False, 0.0
    ok = True
    total = 0.0
    for v, q in pairs:
        e = rel_err(v, q)
        if not e < eps:
            ok = False
        total += e
    return ok, total / len(pairs)


def plateaus(ts, vs, eps):
    """Maximal greedy runs whose members stay within eps of the run mean.

    Returns ``[(start_ms, mean, count), ...]``.
    """
    out = []
    n = len(vs)
    i = 0
    while i < n:
        s = vs[i]
        lo = hi = vs[i]
        k = i + 1
        while k < n:
            v = vs[k]
            ns = s + v
            m = ns / (k - i + 1)
            nlo = lo if lo < v else v
            nhi = hi if hi > v else v
            am = abs(m)
            tol = eps * am if am >= TINY else eps
            if m - nlo > tol or nhi - m > tol:
                break
            s, lo, hi = ns, nlo, nhi
            k += 1
        out.append((ts[i], s / (k - i), k - i))
        i = k
    return out


def later_hits(plats, ts, vs, eps):
    """Count plateaus whose value some observation at or after its start attains.

    Returns ``(hits, mean best error)`` with unmatched plateaus scoring 1.
    """
    hits = 0
    total = 0.0
    n = len(ts)
    for start, value, _ in plats:
        best = 1.0
        for k in range(n):
            if ts[k] < start:
                continue
            e = rel_err(vs[k], value)
            if e < best:
                best = e
        if best < eps:
            hits += 1
            total += best
        else:
            total += 1.0
    return hits, (total / len(plats) if plats else 0.0)
