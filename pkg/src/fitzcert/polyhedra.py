"""Exact rational polyhedra in low dimension (d <= 3).

Everything here works over ``fractions.Fraction`` so that inequality and
vertex descriptions of the indicator-heavy fixtures come out bit-exact.  The
H->V and V->H conversions enumerate subsets of constraints/generators, which
is cheap for the handful of constraints a graph on the line produces.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
import math


def F(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError("exact polyhedra need finite coordinates")
    return Fraction(x)


def vec(v):
    return tuple(F(x) for x in v)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def rref(rows, ncols):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(rows, d):
    return len(rref(rows, d)[1]) if rows else 0


def nullspace(rows, d):
    """Basis of {z : row . z = 0 for all rows}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)]
    R, piv = rref(rows, d)
    free = [c for c in range(d) if c not in piv]
    basis = []
    for f in free:
        z = [Fraction(0)] * d
        z[f] = Fraction(1)
        for row, p in zip(R, piv):
            z[p] = -row[f]
        basis.append(tuple(z))
    return basis


def normalize(v, signed=True):
    """Scale so the first nonzero entry has absolute value 1 (positive if not signed)."""
    lead = next((x for x in v if x != 0), None)
    if lead is None:
        return tuple(v)
    s = abs(lead) if signed else lead
    return tuple(x / s for x in v)


def h_to_v(ineqs, eqs, d):
    """Generators of {z : a.z <= b (ineqs), a.z = b (eqs)}.

    Returns (points, rays, lines); points is empty iff the set is empty.
    """
    ineqs = [(vec(a), F(b)) for a, b in ineqs]
    eqs = [(vec(a), F(b)) for a, b in eqs]
    normals = [a for a, _ in ineqs] + [a for a, _ in eqs]
    lines = [normalize(l) for l in nullspace(normals, d)] if normals else \
        [tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)]
    base = eqs + [(l, Fraction(0)) for l in lines]
    base_rank = rank([a for a, _ in base], d)
    k = d - base_rank

    def feasible(z):
        return all(dot(a, z) <= b for a, b in ineqs) and all(dot(a, z) == b for a, b in eqs)

    points = []
    for sub in combinations(range(len(ineqs)), k):
        rows = base + [ineqs[i] for i in sub]
        A = [a for a, _ in rows]
        if rank(A, d) < d:
            continue
        z = _solve_overdetermined(A, [b for _, b in rows], d)
        if z is not None and feasible(z) and z not in points:
            points.append(z)
    rays = []
    if points and k > 0:
        hom = [a for a, _ in base]
        for sub in combinations(range(len(ineqs)), k - 1):
            A = hom + [ineqs[i][0] for i in sub]
            ns = nullspace(A, d)
            if len(ns) != 1:
                continue
            for sign in (1, -1):
                r = tuple(sign * x for x in ns[0])
                if all(dot(a, r) <= 0 for a, _ in ineqs):
                    r = normalize(r)
                    if r not in rays:
                        rays.append(r)
    points.sort()
    rays.sort()
    return points, rays, sorted(lines)


def _solve_overdetermined(A, b, d):
    aug = [tuple(a) + (bb,) for a, bb in zip(A, b)]
    R, piv = rref(aug, d + 1)
    if d in piv or len(piv) < d:
        return None
    z = [Fraction(0)] * d
    for row, p in zip(R, piv):
        z[p] = row[d]
    return tuple(z)


def v_to_h(points, rays=(), lines=(), d=None):
    """Irredundant (ineqs, eqs) for conv(points) + cone(rays) + span(lines)."""
    points = [vec(p) for p in points]
    if not points:
        raise ValueError("v_to_h needs at least one point")
    d = d or len(points[0])
    rays = [vec(r) for r in rays]
    lines = [vec(l) for l in lines]
    p0 = points[0]
    dirs = [tuple(a - b for a, b in zip(p, p0)) for p in points[1:]] + rays + lines
    dirs = [v for v in dirs if any(v)]
    eq_normals = nullspace(dirs, d) if dirs else nullspace([], d)
    eqs = [(n, dot(n, p0)) for n in eq_normals]
    k = d - len(eq_normals)
    ineqs = []
    if k > 0:
        gens = rays + lines
        for anchor in points:
            vecs = [tuple(a - b for a, b in zip(p, anchor)) for p in points if p != anchor] + gens
            for sub in combinations(range(len(vecs)), k - 1):
                ns = nullspace(list(eq_normals) + [vecs[i] for i in sub], d)
                if len(ns) != 1:
                    continue
                n = ns[0]
                for sign in (1, -1):
                    m = tuple(sign * x for x in n)
                    b = dot(m, anchor)
                    if (all(dot(m, p) <= b for p in points) and all(dot(m, r) <= 0 for r in rays)
                            and all(dot(m, l) == 0 for l in lines)):
                        if any(dot(m, p) < b for p in points) or any(dot(m, r) < 0 for r in rays):
                            ineqs.append((m, b))
    return canonical_h(ineqs, eqs, d)


def canonical_h(ineqs, eqs, d):
    """Canonical form: eqs in RREF, ineqs reduced modulo eqs, normalised, sorted, deduplicated."""
    eq_rows = [tuple(a) + (b,) for a, b in eqs]
    R, piv = rref(eq_rows, d + 1) if eq_rows else ([], [])
    if d in piv:
        # inconsistent equalities: the empty set
        return None
    E = [(row[:d], row[d]) for row in R]
    out = set()
    for a, b in ineqs:
        row = list(a) + [b]
        for (ea, eb), p in zip(E, piv):
            f = row[p]
            if f != 0:
                row = [x - f * y for x, y in zip(row, list(ea) + [eb])]
        if not any(row[:d]):
            if row[d] < 0:
                return None
            continue
        row = normalize(tuple(row))
        out.add((tuple(row[:d]), row[d]))
    return sorted(out), E


# ----------------------------------------------------------------------
# planar sets


@dataclass(frozen=True)
class PolyhedralSet2D:
    """Closed polyhedral subset of the plane (or its relative interior when ``strict``).

    ``ineqs`` holds ((a1, a2), b) meaning a1 z1 + a2 z2 <= b (strict: <),
    ``eqs`` holds ((a1, a2), b) meaning equality.  ``empty`` marks the empty set.
    """

    ineqs: tuple = ()
    eqs: tuple = ()
    empty: bool = False
    strict: bool = False

    @classmethod
    def from_constraints(cls, ineqs=(), eqs=()):
        ineqs = [(vec(a), F(b)) for a, b in ineqs]
        eqs = [(vec(a), F(b)) for a, b in eqs]
        pts, rays, lines = h_to_v(ineqs, eqs, 2)
        if not pts:
            return cls.empty_set()
        return cls.from_generators(pts, rays, lines)

    @classmethod
    def from_generators(cls, points, rays=(), lines=()):
        res = v_to_h(points, rays, lines, 2)
        if res is None:
            return cls.empty_set()
        ineqs, eqs = res
        return cls(tuple(ineqs), tuple(eqs))

    @classmethod
    def empty_set(cls):
        return cls((), (), True)

    @classmethod
    def plane(cls):
        return cls((), ())

    @classmethod
    def box(cls, x_range, y_range):
        """Product of two (possibly unbounded) closed intervals."""
        ineqs = []
        for axis, (lo, hi) in enumerate((x_range, y_range)):
            e = [0, 0]
            e[axis] = 1
            if lo is not None and math.isfinite(lo):
                ineqs.append(((-e[0], -e[1]), -lo))
            if hi is not None and math.isfinite(hi):
                ineqs.append(((e[0], e[1]), hi))
        return cls.from_constraints(ineqs)

    @property
    def is_empty(self):
        return self.empty

    @property
    def is_whole_plane(self):
        return not self.empty and not self.ineqs and not self.eqs

    def generators(self):
        if self.empty:
            return [], [], []
        return h_to_v(self.ineqs, self.eqs, 2)

    @property
    def dimension(self):
        if self.empty:
            return -1
        return 2 - len(self.eqs)

    def contains(self, z):
        if self.empty:
            return False
        z = vec(z)
        if any(dot(a, z) != b for a, b in self.eqs):
            return False
        if self.strict:
            return all(dot(a, z) < b for a, b in self.ineqs)
        return all(dot(a, z) <= b for a, b in self.ineqs)

    __contains__ = contains

    def closure(self):
        return PolyhedralSet2D(self.ineqs, self.eqs, self.empty, False)

    def relative_interior(self):
        if self.empty:
            return self
        return PolyhedralSet2D(self.ineqs, self.eqs, False, True)

    def interior(self):
        """Topological interior; equals the algebraic interior (core) of a convex set in R^2."""
        if self.empty or self.eqs:
            return PolyhedralSet2D.empty_set()
        return self.relative_interior()

    core = interior

    def lineality(self):
        return self.generators()[2]

    def contains_line(self, point, direction):
        """Whether {point + t direction : t real} lies inside this set."""
        if self.empty:
            return False
        d = vec(direction)
        if any(dot(a, d) != 0 for a, _ in self.ineqs) or any(dot(a, d) != 0 for a, _ in self.eqs):
            return False
        return self.contains(point)

    def minkowski_sum(self, other):
        if self.empty or other.empty:
            return PolyhedralSet2D.empty_set()
        p1, r1, l1 = self.closure().generators()
        p2, r2, l2 = other.closure().generators()
        pts = sorted({tuple(a + b for a, b in zip(u, v)) for u in p1 for v in p2})
        return PolyhedralSet2D.from_generators(pts, r1 + r2, l1 + l2)

    def __add__(self, other):
        return self.minkowski_sum(other)

    def negate(self):
        if self.empty:
            return self
        ineqs = [((-a[0], -a[1]), b) for a, b in self.ineqs]
        eqs = [((-a[0], -a[1]), b) for a, b in self.eqs]
        res = canonical_h(ineqs, eqs, 2)
        return PolyhedralSet2D(tuple(res[0]), tuple(res[1]), False, self.strict)

    def __neg__(self):
        return self.negate()

    def reflect_second(self):
        """Image under (z1, z2) -> (z1, -z2)."""
        if self.empty:
            return self
        ineqs = [((a[0], -a[1]), b) for a, b in self.ineqs]
        eqs = [((a[0], -a[1]), b) for a, b in self.eqs]
        res = canonical_h(ineqs, eqs, 2)
        return PolyhedralSet2D(tuple(res[0]), tuple(res[1]), False, self.strict)

    def __sub__(self, other):
        return self.minkowski_sum(other.negate())

    def translate(self, t):
        if self.empty:
            return self
        t = vec(t)
        ineqs = [(a, b + dot(a, t)) for a, b in self.ineqs]
        eqs = [(a, b + dot(a, t)) for a, b in self.eqs]
        res = canonical_h(ineqs, eqs, 2)
        return PolyhedralSet2D(tuple(res[0]), tuple(res[1]), False, self.strict)

    def intersect(self, other):
        if self.empty or other.empty:
            return PolyhedralSet2D.empty_set()
        return PolyhedralSet2D.from_constraints(self.ineqs + other.ineqs, self.eqs + other.eqs)

    def intersects(self, other):
        return not self.intersect(other).is_empty

    # ------------------------------------------------------------------
    # rendering

    def as_box(self):
        """((lo, hi, lo_closed, hi_closed) per axis) when the set is a product, else None."""
        if self.empty:
            return None
        bounds = [[-math.inf, math.inf, False, False], [-math.inf, math.inf, False, False]]
        closed = not self.strict
        for a, b in self.eqs:
            if a[0] != 0 and a[1] != 0:
                return None
            axis = 0 if a[0] != 0 else 1
            v = b / a[axis]
            bounds[axis] = [v, v, True, True]
        for a, b in self.ineqs:
            if a[0] != 0 and a[1] != 0:
                return None
            axis = 0 if a[0] != 0 else 1
            v = b / a[axis]
            if a[axis] > 0:
                bounds[axis][1], bounds[axis][3] = v, closed
            else:
                bounds[axis][0], bounds[axis][2] = v, closed
        return [tuple(b) for b in bounds]

    def describe(self):
        if self.empty:
            return "{}"
        if self.is_whole_plane and not self.strict:
            return "R x R"
        box = self.as_box()
        if box is not None:
            return " x ".join(_fmt_interval(*b) for b in box)
        op = "<" if self.strict else "<="
        parts = [f"{_fmt_lin(a)} {op} {_fmt_num(b)}" for a, b in self.ineqs]
        parts += [f"{_fmt_lin(a)} = {_fmt_num(b)}" for a, b in self.eqs]
        return "{" + ", ".join(parts) + "}"

    __str__ = describe

    def to_json(self):
        return {
            "ineqs": [[[str(x) for x in a], str(b)] for a, b in self.ineqs],
            "eqs": [[[str(x) for x in a], str(b)] for a, b in self.eqs],
            "empty": self.empty,
            "strict": self.strict,
            "text": self.describe(),
        }


def _fmt_num(x):
    if isinstance(x, Fraction) and x.denominator != 1:
        return str(x)
    if x == math.inf:
        return "+inf"
    if x == -math.inf:
        return "-inf"
    return str(int(x)) if x == int(x) else str(x)


def _fmt_interval(lo, hi, lc, hc):
    if lo == -math.inf and hi == math.inf:
        return "R"
    if lo == hi:
        return "{" + _fmt_num(lo) + "}"
    return ("[" if lc else "(") + _fmt_num(lo) + ", " + _fmt_num(hi) + ("]" if hc else ")")


def _fmt_lin(a):
    terms = []
    for coef, name in zip(a, ("z1", "z2")):
        if coef == 0:
            continue
        c = "" if coef == 1 else "-" if coef == -1 else _fmt_num(coef) + "*"
        terms.append(f"{c}{name}")
    return " + ".join(terms).replace("+ -", "- ")
