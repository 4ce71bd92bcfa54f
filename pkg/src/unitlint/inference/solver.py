"""Incremental constraint solver.

Dimensions and frames are solved separately; a constraint holds when both its
dimension part and its frame part are satisfiable together with everything
accepted before it.

Dimensions
    A dimension is the vector (log10 scalar, 7 integer exponents).  Equalities
    go into a union-find whose edges carry offsets (``d(x) = d(parent) + off``).
    Products and quotients become linear forms over class roots; a form with
    one unknown is solved (exponents must divide exactly), a form
    ``x - y = c`` becomes a union edge, and the rest stay pending and are
    checked exactly with :mod:`unitlint.inference.diophantine`.

Frames
    Each atom has a finite domain of lattice elements (``Any`` plus every
    non-empty subset of the frame names in play, with one extra name standing
    for "any other frame").  Constraints prune domains to arc consistency.
    Arc consistency can miss a global contradiction, so :func:`solve` runs a
    backtracking search at the end and, if that fails, replays the system with
    a search after every constraint to pin down the culprit.

Every change is trailed so that a rejected constraint is undone completely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from unitlint.inference import diophantine
from unitlint.inference.terms import EQ, SAME, Known, Product, Quotient, Reframe, Sum
from unitlint.units import ANY, Frame, UnitType, format_unit

OTHER_FRAME = "<other>"
_NE = 7
ZERO = (Fraction(0),) + (0,) * _NE


def dim_of(u: UnitType) -> tuple:
    return (u.scalar,) + u.exponents


def unit_of_dim(d: tuple, frame: Frame = ANY) -> UnitType:
    return UnitType(d[0], d[1:], frame)


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _scale(a, k: int):
    return tuple(x * k for x in a)


def _div(a, k: int):
    """``a / k`` or ``None`` when an exponent is not divisible by ``k``."""
    if any(e % k for e in a[1:]):
        return None
    return (a[0] / k,) + tuple(e // k for e in a[1:])


class _Conflict(Exception):
    pass


class _Dims:
    """Undoable union-find with offsets and pending linear forms."""

    def __init__(self):
        self.parent: list = []
        self.off: list = []
        self.size: list = []
        self.value: list = []
        self.trail: list = []
        self.forms: dict = {}  # id -> (((node, coeff), ...), const)
        self._next_form = 0
        self._consts: dict = {}
        self._forms_changed = False
        self._verdicts: dict = {}  # normalized component -> solvable
        self._watch: dict = {}  # root -> ids of forms mentioning its class
        self._norm: dict = {}  # form id -> cached normalized row
        self._dirty: set = set()

    def new_node(self) -> int:
        self.parent.append(len(self.parent))
        self.off.append(ZERO)
        self.size.append(1)
        self.value.append(None)
        return len(self.parent) - 1

    def const_node(self, d: tuple) -> int:
        node = self._consts.get(d)
        if node is None:
            node = self._consts[d] = self.new_node()
            self.value[node] = d
        return node

    def find(self, x: int):
        off = ZERO
        while self.parent[x] != x:
            off = _add(off, self.off[x])
            x = self.parent[x]
        return x, off

    def dim(self, x: int):
        r, off = self.find(x)
        v = self.value[r]
        return None if v is None else _add(v, off)

    # -- trail ----------------------------------------------------------------

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int):
        while len(self.trail) > mark:
            entry = self.trail.pop()
            tag = entry[0]
            if tag == "link":
                _, child, root, old_size = entry
                self.parent[child] = child
                self.off[child] = ZERO
                self.size[root] = old_size
            elif tag == "value":
                self.value[entry[1]] = entry[2]
            elif tag == "form+":
                del self.forms[entry[1]]
            elif tag == "form-":
                self.forms[entry[1]] = entry[2]
            elif tag == "watch":
                self._watch[entry[1]] -= entry[2]
        # cheap to rebuild, and undo is rare next to forward propagation
        self._norm.clear()
        self._dirty = set(self.forms)

    def _set_value(self, root: int, v):
        self.trail.append(("value", root, self.value[root]))
        self.value[root] = v
        self._touch(root)
        self._forms_changed = self._forms_changed or bool(self.forms)

    # -- operations -------------------------------------------------------------

    def relate(self, x: int, y: int, k=ZERO):
        """Require ``d(x) = d(y) + k``."""
        rx, ox = self.find(x)
        ry, oy = self.find(y)
        delta = _sub(_add(oy, k), ox)  # d(rx) = d(ry) + delta
        if rx == ry:
            if delta != ZERO:
                raise _Conflict
            return
        vx, vy = self.value[rx], self.value[ry]
        if vx is not None and vy is not None and vx != _add(vy, delta):
            raise _Conflict
        if self.size[rx] > self.size[ry]:
            rx, ry, delta, vx, vy = ry, rx, _sub(ZERO, delta), vy, vx
        self.trail.append(("link", rx, ry, self.size[ry]))
        self.parent[rx] = ry
        self.off[rx] = delta
        self.size[ry] += self.size[rx]
        moved = self._watch.get(rx, set()) - self._watch.get(ry, set())
        if moved:
            self._watch.setdefault(ry, set()).update(moved)
            self.trail.append(("watch", ry, moved))
        self._touch(ry)
        self._forms_changed = self._forms_changed or bool(self.forms)
        if vy is None and vx is not None:
            self._set_value(ry, _sub(vx, delta))
        self._settle()

    def add_form(self, terms, const=ZERO):
        """Require ``sum(coeff * d(node)) = const``."""
        fid = self._next_form
        self._next_form += 1
        self.forms[fid] = (tuple(terms), const)
        self.trail.append(("form+", fid))
        for node, _ in terms:
            r = self.find(node)[0]
            if fid not in self._watch.setdefault(r, set()):
                self._watch[r].add(fid)
                self.trail.append(("watch", r, {fid}))
        self._dirty.add(fid)
        self._forms_changed = True
        self._settle()

    def _touch(self, root: int):
        for fid in self._watch.get(root, ()):
            self._norm.pop(fid, None)
            self._dirty.add(fid)

    def _normalized(self, fid: int):
        row = self._norm.get(fid)
        if row is None:
            row = self._norm[fid] = self._normalize(self.forms[fid])
        return row

    def _normalize(self, form):
        terms, const = form
        coeffs: dict = {}
        c = const
        for node, k in terms:
            r, o = self.find(node)
            c = _sub(c, _scale(o, k))
            v = self.value[r]
            if v is not None:
                c = _sub(c, _scale(v, k))
            else:
                coeffs[r] = coeffs.get(r, 0) + k
        return {r: k for r, k in coeffs.items() if k}, c

    def _settle(self):
        while self._dirty:
            fid = min(self._dirty)
            self._dirty.discard(fid)
            form = self.forms.get(fid)
            if form is None:  # resolved, or removed by undo
                continue
            coeffs, c = self._normalized(fid)
            if coeffs:
                g = 0
                for k in coeffs.values():
                    g = gcd(g, k)
                c = _div(c, g)
                if c is None:
                    raise _Conflict
                coeffs = {r: k // g for r, k in coeffs.items()}
            if len(coeffs) > 2 or (len(coeffs) == 2 and sorted(coeffs.values()) != [-1, 1]):
                continue
            self.trail.append(("form-", fid, form))
            del self.forms[fid]
            self._forms_changed = True
            if not coeffs:
                if c != ZERO:
                    raise _Conflict
            elif len(coeffs) == 1:
                (r, k), = coeffs.items()
                v = _div(c, k)
                if v is None:
                    raise _Conflict
                self._set_value(r, v)
            else:
                pos = next(r for r, k in coeffs.items() if k == 1)
                neg = next(r for r, k in coeffs.items() if k == -1)
                self.relate(pos, neg, c)

    def check_residual(self):
        """Exact check of the pending forms; raises on no solution."""
        if not self._forms_changed:
            return
        self._forms_changed = False
        rows = [self._normalized(fid) for fid in sorted(self.forms)]
        for comp in self._components(rows):
            key = tuple((tuple(sorted(coeffs.items())), c) for coeffs, c in comp)
            ok = self._verdicts.get(key)
            if ok is None:
                ok = self._verdicts[key] = self._solve_rows(comp) is not None
            if not ok:
                raise _Conflict

    @staticmethod
    def _components(rows):
        """Split rows into groups that share no unknowns."""
        owner: dict = {}
        groups: list = []
        for row in rows:
            hit = sorted({owner[r] for r in row[0] if r in owner})
            if hit:
                g = hit[0]
                for other in hit[1:]:
                    groups[g].extend(groups[other])
                    for r2 in groups[other]:
                        for r in r2[0]:
                            owner[r] = g
                    groups[other] = []
            else:
                g = len(groups)
                groups.append([])
            groups[g].append(row)
            for r in row[0]:
                owner[r] = g
        return [g for g in groups if g]

    def residual_solution(self):
        """``{root: dim}`` solving the pending forms, or ``None``."""
        return self._solve_rows([self._normalize(f) for _, f in sorted(self.forms.items())])

    @staticmethod
    def _solve_rows(rows):
        if not rows:
            return {}
        roots = sorted({r for coeffs, _ in rows for r in coeffs})
        index = {r: i for i, r in enumerate(roots)}
        A = []
        for coeffs, _ in rows:
            line = [0] * len(roots)
            for r, k in coeffs.items():
                line[index[r]] = k
            A.append(line)
        cols = []
        scal = diophantine.solve_rational(A, [c[0] for _, c in rows])
        if scal is None:
            return None
        cols.append(scal)
        for e in range(1, _NE + 1):
            sol = diophantine.solve_integer(A, [c[e] for _, c in rows])
            if sol is None:
                return None
            cols.append(sol)
        return {r: tuple(col[i] for col in cols) for r, i in index.items()}


# -- frames -------------------------------------------------------------------


class _Frames:
    """Finite-domain frame variables with trailed arc-consistency propagation."""

    def __init__(self, names):
        self.names = sorted(set(names)) + [OTHER_FRAME]
        self.bit = {n: i for i, n in enumerate(self.names)}
        n = len(self.names)
        self.ncodes = 1 << n  # code 0 is Any, other codes are name masks
        self.full = (1 << self.ncodes) - 1
        codes = range(self.ncodes)
        self.up = [sum(1 << y for y in codes if self._le(x, y)) for x in codes]
        self.down = [sum(1 << x for x in codes if self._le(x, y)) for y in codes]
        self.dom: list = []
        self.trail: list = []
        self.props: list = []
        self.watch: list = []
        self._consts: dict = {}
        self._cache: dict = {}

    @staticmethod
    def _le(x, y):
        return y == 0 or (x != 0 and x & ~y == 0)

    @staticmethod
    def _meet(x, y):
        if x == 0:
            return y
        if y == 0:
            return x
        m = x & y
        return m if m else None

    def _max(self, x, y):
        if self._le(x, y):
            return y
        if self._le(y, x):
            return x
        return None

    def encode(self, frame: Frame) -> int:
        if frame.names is None:
            return 0
        mask = 0
        for name in frame.names:
            mask |= 1 << self.bit.get(name, self.bit[OTHER_FRAME])
        return mask

    def decode(self, code: int) -> Frame:
        if code == 0:
            return ANY
        return Frame(frozenset(n for n, i in self.bit.items() if code >> i & 1))

    def new_var(self, domain=None) -> int:
        self.dom.append(self.full if domain is None else domain)
        self.watch.append([])
        return len(self.dom) - 1

    def const_var(self, frame: Frame) -> int:
        code = self.encode(frame)
        v = self._consts.get(code)
        if v is None:
            v = self._consts[code] = self.new_var(1 << code)
        return v

    def mark(self):
        return len(self.trail)

    def undo(self, mark):
        while len(self.trail) > mark:
            entry = self.trail.pop()
            if entry[0] == "dom":
                self.dom[entry[1]] = entry[2]
            else:
                pid = entry[1]
                for v in set(self.props[pid][1:]):
                    self.watch[v].pop()
                self.props.pop()

    def _set(self, v, d):
        if d == self.dom[v]:
            return False
        if not d:
            raise _Conflict
        self.trail.append(("dom", v, self.dom[v]))
        self.dom[v] = d
        return True

    @staticmethod
    def _bits(d):
        while d:
            low = d & -d
            yield low.bit_length() - 1
            d ^= low

    def _revise(self, prop):
        kind = prop[0]
        if kind == "eq":
            _, a, b = prop
            d = self.dom[a] & self.dom[b]
            return ((a, d), (b, d))
        if kind == "le":
            _, a, b = prop
            key = ("le", self.dom[a], self.dom[b])
            hit = self._cache.get(key)
            if hit is None:
                da, db = self.dom[a], self.dom[b]
                na = sum(1 << x for x in self._bits(da) if self.up[x] & db)
                nb = sum(1 << y for y in self._bits(db) if self.down[y] & da)
                hit = self._cache[key] = (na, nb)
            return ((a, hit[0]), (b, hit[1]))
        _, r, a, b = prop
        key = (kind, self.dom[r], self.dom[a], self.dom[b])
        hit = self._cache.get(key)
        if hit is None:
            op = self._meet if kind == "meet" else self._max
            dr, da, db = key[1:]
            sr = sa = sb = 0
            ys = list(self._bits(db))
            for x in self._bits(da):
                for y in ys:
                    z = op(x, y)
                    if z is not None and dr >> z & 1:
                        sr |= 1 << z
                        sa |= 1 << x
                        sb |= 1 << y
            hit = self._cache[key] = (sr, sa, sb)
        return ((r, hit[0]), (a, hit[1]), (b, hit[2]))

    def _propagate(self, queue):
        pending = set(queue)
        queue = list(queue)
        while queue:
            pid = queue.pop(0)
            pending.discard(pid)
            for v, d in self._revise(self.props[pid]):
                if self._set(v, d):
                    for other in self.watch[v]:
                        if other != pid and other not in pending:
                            pending.add(other)
                            queue.append(other)

    def add(self, kind, *vs):
        pid = len(self.props)
        self.props.append((kind,) + vs)
        for v in set(vs):
            self.watch[v].append(pid)
        self.trail.append(("prop", pid))
        self._propagate([pid])
        return pid

    def restrict(self, v, code):
        if self._set(v, self.dom[v] & (1 << code)):
            self._propagate(list(self.watch[v]))
        elif not self.dom[v] >> code & 1:
            raise _Conflict

    def component(self, start) -> list:
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for pid in self.watch[v]:
                for w in self.props[pid][1:]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return sorted(seen)

    def search(self, variables) -> bool:
        """Backtracking search; on success the domains hold a solution."""
        open_vars = [v for v in variables if self.dom[v] & (self.dom[v] - 1)]
        if not open_vars:
            return True
        v = min(open_vars, key=lambda u: (bin(self.dom[u]).count("1"), u))
        for code in list(self._bits(self.dom[v])):
            mark = self.mark()
            try:
                self.restrict(v, code)
                if self.search(variables):
                    return True
            except _Conflict:
                pass
            self.undo(mark)
        return False


# -- solver -------------------------------------------------------------------


def frame_names(constraints) -> set:
    names = set()
    for c in constraints:
        for k in c.knowns():
            if k.unit.frame.names:
                names |= k.unit.frame.names
        for side in (c.left, c.right):
            if isinstance(side, Reframe) and side.frame.names:
                names |= side.frame.names
    return names


@dataclass
class TypeView:
    """What the solver knows about a term: a dimension (or ``None``) and a frame (or ``None``)."""

    dim: tuple | None
    frame: Frame | None

    def __str__(self):
        d = "?" if self.dim is None else format_unit(unit_of_dim(self.dim))
        f = "?" if self.frame is None else str(self.frame)
        return f"({d}, {f})"

    def unit(self) -> UnitType | None:
        if self.dim is None or self.frame is None:
            return None
        return unit_of_dim(self.dim, self.frame)


class Solver:
    def __init__(self, names=(), exact: bool = False):
        self.dims = _Dims()
        self.frames = _Frames(names)
        self.exact = exact
        self.node: dict = {}  # atom -> (dim node, frame var)

    def atom(self, term):
        slot = self.node.get(term)
        if slot is None:
            slot = self.node[term] = (self.dims.new_node(), self.frames.new_var())
        return slot

    def _slot(self, term):
        if isinstance(term, Known):
            return self.dims.const_node(dim_of(term.unit)), self.frames.const_var(term.unit.frame)
        return self.atom(term)

    def add(self, c) -> str | None:
        """Add ``c``; returns ``None`` or the failing part (``"dimension"``/``"frame"``)."""
        dmark, fmark = self.dims.mark(), self.frames.mark()
        ld, lf = self._slot(c.left)
        right = c.right
        try:
            if isinstance(right, (Product, Quotient)):
                ad, _ = self._slot(right.left)
                bd, _ = self._slot(right.right)
                sign = -1 if isinstance(right, Product) else 1
                self.dims.add_form([(ld, 1), (ad, -1), (bd, sign)])
            elif isinstance(right, Sum):
                self.dims.relate(ld, self._slot(right.left)[0])
            elif isinstance(right, Reframe):
                self.dims.relate(ld, self._slot(right.base)[0])
            else:
                self.dims.relate(ld, self._slot(right)[0])
            self.dims.check_residual()
        except _Conflict:
            self.dims.undo(dmark)
            self.frames.undo(fmark)
            self.dims._forms_changed = False
            return "dimension"
        try:
            if isinstance(right, (Product, Quotient, Sum)):
                kind = "max" if isinstance(right, Sum) else "meet"
                self.frames.add(kind, lf, self._slot(right.left)[1], self._slot(right.right)[1])
                touched = lf
            elif isinstance(right, Reframe):
                self.frames.restrict(lf, self.frames.encode(right.frame))
                touched = lf
            elif c.kind == SAME:
                touched = None
            else:
                rf = self._slot(right)[1]
                self.frames.add("eq" if c.kind == EQ else "le", lf, rf)
                touched = lf
            if self.exact and touched is not None:
                inner = self.frames.mark()
                if not self.frames.search(self.frames.component(touched)):
                    raise _Conflict
                self.frames.undo(inner)
        except _Conflict:
            self.dims.undo(dmark)
            self.frames.undo(fmark)
            return "frame"
        return None

    # -- inspection -----------------------------------------------------------

    def view(self, term) -> TypeView:
        if isinstance(term, Known):
            return TypeView(dim_of(term.unit), term.unit.frame)
        if isinstance(term, (Product, Quotient)):
            a, b = self.view(term.left), self.view(term.right)
            dim = None
            if a.dim is not None and b.dim is not None:
                dim = _add(a.dim, b.dim) if isinstance(term, Product) else _sub(a.dim, b.dim)
            frame = None
            if a.frame is not None and b.frame is not None:
                frame = b.frame if a.frame.is_any else a.frame if b.frame.is_any else (
                    Frame(a.frame.names & b.frame.names) if a.frame.names & b.frame.names else None)
            return TypeView(dim, frame)
        if isinstance(term, Sum):
            return self.view(term.left)
        if isinstance(term, Reframe):
            return TypeView(self.view(term.base).dim, term.frame)
        dn, fv = self.atom(term)
        d = self.frames.dom[fv]
        frame = self.frames.decode(d.bit_length() - 1) if d and not d & (d - 1) else None
        return TypeView(self.dims.dim(dn), frame)

    def finish(self) -> bool:
        """Search for a full frame assignment; ``False`` if there is none."""
        done = set()
        for fv in range(len(self.frames.dom)):
            if fv in done:
                continue
            comp = self.frames.component(fv)
            done.update(comp)
            if not self.frames.search(comp):
                return False
        return True

    def model(self) -> dict:
        """``{atom: UnitType | None}``; ``None`` marks an unconstrained dimension.

        Only valid after a successful :meth:`finish`.
        """
        residual = self.dims.residual_solution() or {}
        out = {}
        for term, (dn, fv) in self.node.items():
            r, off = self.dims.find(dn)
            v = self.dims.value[r]
            if v is None and r in residual:
                v = residual[r]
            d = self.frames.dom[fv]
            frame = self.frames.decode(d.bit_length() - 1)
            out[term] = None if v is None else unit_of_dim(_add(v, off), frame)
        return out

    def frame_of(self, term) -> Frame:
        d = self.frames.dom[self.atom(term)[1]]
        return self.frames.decode(d.bit_length() - 1)


@dataclass
class Rejection:
    index: int  # position in the constraint list
    constraint: object
    part: str
    left: TypeView
    right: TypeView


@dataclass
class SolveResult:
    constraints: list
    accepted: list = field(default_factory=list)  # indices
    rejected: list = field(default_factory=list)  # Rejection
    solver: Solver | None = None

    @property
    def sat(self) -> bool:
        return not self.rejected

    def model(self) -> dict:
        return self.solver.model()


def _conflict_views(solver: Solver, c):
    right = c.right
    if isinstance(right, (Sum, Product, Quotient)) and c.kind == EQ:
        return solver.view(right.left), solver.view(right.right)
    if isinstance(right, Reframe):
        return solver.view(c.left), solver.view(right)
    return solver.view(c.left), solver.view(right)


def _run(constraints, exact: bool) -> SolveResult:
    solver = Solver(frame_names(constraints), exact=exact)
    result = SolveResult(list(constraints), solver=solver)
    for i, c in enumerate(constraints):
        part = solver.add(c)
        if part is None:
            result.accepted.append(i)
        else:
            lv, rv = _conflict_views(solver, c)
            result.rejected.append(Rejection(i, c, part, lv, rv))
    return result


def solve(constraints) -> SolveResult:
    """Process ``constraints`` in order, dropping (and recording) each one that conflicts."""
    result = _run(constraints, exact=False)
    if not result.solver.finish():
        result = _run(constraints, exact=True)
        if not result.solver.finish():  # pragma: no cover - exact mode keeps a solution
            raise AssertionError("frame search failed after exact replay")
    return result


__all__ = ["Solver", "SolveResult", "Rejection", "TypeView", "solve", "dim_of", "unit_of_dim", "frame_names"]
