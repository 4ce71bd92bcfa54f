# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled mining kernels; same semantics as ``_kernels_py``."""

from libc.math cimport fabs
from libc.stdlib cimport free, malloc, qsort, realloc

cdef double TINY = 1e-9


cdef struct Cand:
    long long dt
    Py_ssize_t i
    Py_ssize_t j


cdef int _cmp(const void *pa, const void *pb) noexcept nogil:
    cdef const Cand *a = <const Cand *> pa
    cdef const Cand *b = <const Cand *> pb
    if a.dt != b.dt:
        return -1 if a.dt < b.dt else 1
    if a.i != b.i:
        return -1 if a.i < b.i else 1
    if a.j != b.j:
        return -1 if a.j < b.j else 1
    return 0


cdef inline double _rel(double v, double q) nogil:
    cdef double d = fabs(v - q)
    cdef double aq = fabs(q)
    return d / aq if aq >= TINY else d


def rel_err(double v, double q):
    return _rel(v, q)


def align_pairs(ta, va, tb, vb, long long window_ms):
    cdef Py_ssize_t na = len(ta), nb = len(tb)
    cdef long long[::1] a_t = _ll(ta)
    cdef long long[::1] b_t = _ll(tb)
    cdef Py_ssize_t i, j, k, lo = 0, n = 0, cap = 16
    cdef long long t, d
    cdef Cand *cands = <Cand *> malloc(cap * sizeof(Cand))
    cdef Cand *grown
    cdef unsigned char[::1] used_a, used_b
    if cands == NULL:
        raise MemoryError()
    try:
        for i in range(na):
            t = a_t[i]
            while lo < nb and b_t[lo] < t - window_ms:
                lo += 1
            j = lo
            while j < nb and b_t[j] <= t + window_ms:
                if n == cap:
                    cap *= 2
                    grown = <Cand *> realloc(cands, cap * sizeof(Cand))
                    if grown == NULL:
                        raise MemoryError()
                    cands = grown
                d = b_t[j] - t
                cands[n].dt = d if d >= 0 else -d
                cands[n].i = i
                cands[n].j = j
                n += 1
                j += 1
        qsort(cands, n, sizeof(Cand), _cmp)
        used_a = bytearray(na)
        used_b = bytearray(nb)
        match = [-1] * na
        for k in range(n):
            i = cands[k].i
            j = cands[k].j
            if not used_a[i] and not used_b[j]:
                used_a[i] = 1
                used_b[j] = 1
                match[i] = j
    finally:
        free(cands)
    return [(va[i], vb[match[i]]) for i in range(na) if match[i] >= 0]


def _ll(seq):
    import array
    return array.array("q", seq)


def _dbl(seq):
    import array
    return array.array("d", seq)


def approx_check(pairs, double eps):
    cdef Py_ssize_t n = len(pairs), k
    cdef double total = 0.0, e
    cdef bint ok = True
    if n == 0:
        return False, 0.0
    for k in range(n):
        v, q = pairs[k]
        e = _rel(v, q)
        if not e < eps:
            ok = False
        total += e
    return ok, total / n


def plateaus(ts, vs, double eps):
    cdef double[::1] v = _dbl(vs)
    cdef Py_ssize_t n = v.shape[0], i = 0, k
    cdef double s, lo, hi, x, ns, m, nlo, nhi, am, tol
    out = []
    while i < n:
        s = v[i]
        lo = v[i]
        hi = v[i]
        k = i + 1
        while k < n:
            x = v[k]
            ns = s + x
            m = ns / (k - i + 1)
            nlo = lo if lo < x else x
            nhi = hi if hi > x else x
            am = fabs(m)
            tol = eps * am if am >= TINY else eps
            if m - nlo > tol or nhi - m > tol:
                break
            s = ns
            lo = nlo
            hi = nhi
            k += 1
        out.append((ts[i], s / (k - i), k - i))
        i = k
    return out


def later_hits(plats, ts, vs, double eps):
    cdef long long[::1] t = _ll(ts)
    cdef double[::1] v = _dbl(vs)
    cdef Py_ssize_t n = t.shape[0], k
    cdef long long start
    cdef double value, best, e, total = 0.0
    cdef Py_ssize_t hits = 0
    for p in plats:
        start = p[0]
        value = p[1]
        best = 1.0
        for k in range(n):
            if t[k] < start:
                continue
            e = _rel(v[k], value)
            if e < best:
                best = e
        if best < eps:
            hits += 1
            total += best
        else:
            total += 1.0
    return hits, (total / len(plats) if plats else 0.0)
