"""Representative functions of monotone operators on the real line.

Functions on the plane are written in coordinates (z1, z2).  A
representative of T takes (x, x*) and its conjugate takes (x*, x): the first
argument of the conjugate pairs with the first argument of the function, so
the formulas need no swapping, only the ``arg_order`` label changes.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from .extreal import INF
from .grid import Axis, GridFn, llt_2d, default_box, default_n
from .operators import MonotoneGraph, antiderivative, maximality_check, GraphError
from .plq import PlqFunction, conjugate, convexity_check, pointwise_max, NotConvexError
from .polyhedra import PolyhedralSet2D, h_to_v, v_to_h, vec, F, dot

PRIMAL = ("x", "xs")
DUAL = ("xs", "x")

_FEAS_TOL = 1e-12


def _swap(order):
    return DUAL if order == PRIMAL else PRIMAL


class BivariateFn:
    """Common interface: evaluation, domain, hat, conjugate, JSON."""

    tag = "abstract"
    arg_order = PRIMAL
    represents = None

    def __call__(self, a, b):
        return float(self.evaluate_grid(np.array(float(a)), np.array(float(b))))

    def evaluate_grid(self, A, B):
        raise NotImplementedError

    def domain_set(self):
        """Exact polyhedral domain, or None when only grid samples are known."""
        return None

    @property
    def is_polyhedral(self):
        return False

    @property
    def is_exact(self):
        return True

    def hat(self):
        raise NotImplementedError

    def conjugate(self):
        raise NotImplementedError

    def _meta(self, **kw):
        meta = {"arg_order": list(self.arg_order), "represents": self.represents}
        meta.update(kw)
        return meta


def _frac_str(x):
    return str(x)


# ----------------------------------------------------------------------
# polyhedral


@dataclass(frozen=True, eq=False)
class PolyhedralFn(BivariateFn):
    """max_i (alpha_i z1 + beta_i z2 + gamma_i) on {a.z <= b (ineqs), a.z = b (eqs)}."""

    minorants: tuple
    ineqs: tuple = ()
    eqs: tuple = ()
    arg_order: tuple = PRIMAL
    represents: str | None = None
    tag = "polyhedral"

    def __post_init__(self):
        if not self.minorants:
            raise ValueError("a polyhedral function needs at least one affine minorant")
        object.__setattr__(self, "minorants", tuple(vec(m) for m in self.minorants))
        object.__setattr__(self, "ineqs", tuple((vec(a), F(b)) for a, b in self.ineqs))
        object.__setattr__(self, "eqs", tuple((vec(a), F(b)) for a, b in self.eqs))
        object.__setattr__(self, "_float", (
            np.array([[float(v) for v in m] for m in self.minorants]),
            [(float(a[0]), float(a[1]), float(b)) for a, b in self.ineqs],
            [(float(a[0]), float(a[1]), float(b)) for a, b in self.eqs],
        ))
        if self.domain_set().is_empty:
            raise ValueError("polyhedral function with empty domain is not proper")

    @classmethod
    def indicator(cls, ineqs=(), eqs=(), **kw):
        return cls(((0, 0, 0),), tuple(ineqs), tuple(eqs), **kw)

    @property
    def is_polyhedral(self):
        return True

    def evaluate_grid(self, A, B):
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        M, ineqs, eqs = self._float
        val = np.full(A.shape, -INF)
        for al, be, ga in M:
            val = np.maximum(val, al * A + be * B + ga)
        ok = np.ones(A.shape, dtype=bool)
        for a1, a2, b in ineqs:
            ok &= a1 * A + a2 * B <= b + _FEAS_TOL * (1 + abs(b))
        for a1, a2, b in eqs:
            ok &= np.abs(a1 * A + a2 * B - b) <= _FEAS_TOL * (1 + abs(b))
        return np.where(ok, val, INF)

    def exact_value(self, z):
        """Exact rational value at a rational point (None means +inf)."""
        z = vec(z)
        if any(dot(a, z) > b for a, b in self.ineqs) or any(dot(a, z) != b for a, b in self.eqs):
            return None
        return max(m[0] * z[0] + m[1] * z[1] + m[2] for m in self.minorants)

    def domain_set(self):
        return PolyhedralSet2D.from_constraints(self.ineqs, self.eqs)

    def epigraph(self):
        """(ineqs, eqs) of the epigraph in (z1, z2, t)."""
        ineqs = [((m[0], m[1], Fraction(-1)), -m[2]) for m in self.minorants]
        ineqs += [((a[0], a[1], Fraction(0)), b) for a, b in self.ineqs]
        eqs = [((a[0], a[1], Fraction(0)), b) for a, b in self.eqs]
        return ineqs, eqs

    def canonical(self):
        """Generators of the epigraph; equal functions give equal tuples."""
        ineqs, eqs = self.epigraph()
        pts, rays, lines = h_to_v(ineqs, eqs, 3)
        return tuple(pts), tuple(rays), tuple(lines)

    def same_function(self, other):
        return isinstance(other, PolyhedralFn) and self.canonical() == other.canonical()

    def hat(self):
        return PolyhedralFn(
            tuple((m[0], -m[1], m[2]) for m in self.minorants),
            tuple(((a[0], -a[1]), b) for a, b in self.ineqs),
            tuple(((a[0], -a[1]), b) for a, b in self.eqs),
            self.arg_order, self.represents)

    def conjugate(self):
        pts, rays, lines = self.canonical()
        minorants = [(p[0], p[1], -p[2]) for p in pts]
        ineqs = [((r[0], r[1]), r[2]) for r in rays if r[0] != 0 or r[1] != 0]
        eqs = [((l[0], l[1]), l[2]) for l in lines]
        return PolyhedralFn(tuple(minorants), tuple(ineqs), tuple(eqs),
                            _swap(self.arg_order), self.represents).simplified()

    def add_linear(self, c1, c2):
        """z -> h(z) + c1 z1 + c2 z2."""
        c1, c2 = F(c1), F(c2)
        return PolyhedralFn(tuple((m[0] + c1, m[1] + c2, m[2]) for m in self.minorants),
                            self.ineqs, self.eqs, self.arg_order, self.represents)

    def restrict_first(self, a0):
        """The univariate function b -> h(a0, b), or None when it is identically +inf."""
        a0 = F(a0)
        lo, hi = -INF, INF
        for a, b in self.ineqs:
            rhs = b - a[0] * a0
            if a[1] == 0:
                if rhs < 0:
                    return None
            elif a[1] > 0:
                hi = min(hi, float(rhs / a[1]))
            else:
                lo = max(lo, float(rhs / a[1]))
        for a, b in self.eqs:
            rhs = b - a[0] * a0
            if a[1] == 0:
                if rhs != 0:
                    return None
            else:
                v = float(rhs / a[1])
                lo, hi = max(lo, v), min(hi, v)
        if lo > hi:
            return None
        lines = [PlqFunction.linear(float(m[1]), float(m[0] * a0 + m[2])) for m in self.minorants]
        return pointwise_max(lines) + PlqFunction.indicator(lo, hi)

    def simplified(self):
        """Rebuild from the epigraph's facets, dropping redundant pieces."""
        ineqs, eqs = self.epigraph()
        pts, rays, lines = h_to_v(ineqs, eqs, 3)
        H = v_to_h(pts, rays, lines, 3)
        return _from_epigraph_h(H, self.arg_order, self.represents)

    def to_json(self):
        return {
            "tag": self.tag,
            "minorants": [[_frac_str(v) for v in m] for m in self.minorants],
            "domain": {
                "ineqs": [[[_frac_str(v) for v in a], _frac_str(b)] for a, b in self.ineqs],
                "eqs": [[[_frac_str(v) for v in a], _frac_str(b)] for a, b in self.eqs],
            },
            **self._meta(),
        }

    def describe(self):
        dom = self.domain_set()
        parts = []
        for m in self.minorants:
            parts.append(_affine_str(m))
        body = parts[0] if len(parts) == 1 else "max(" + ", ".join(parts) + ")"
        return f"{body} on {dom.describe()}"

    __str__ = describe


def _affine_str(m):
    names = ("z1", "z2")
    terms = []
    for c, n in zip(m[:2], names):
        if c != 0:
            terms.append(f"{c}*{n}" if c not in (1, -1) else (n if c == 1 else f"-{n}"))
    if m[2] != 0 or not terms:
        terms.append(str(m[2]))
    return " + ".join(terms).replace("+ -", "- ")


def _from_epigraph_h(H, arg_order, represents):
    ineqs3, eqs3 = H
    minorants, ineqs, eqs = [], [], []
    for a, b in ineqs3:
        if a[2] < 0:
            s = -a[2]
            minorants.append((a[0] / s, a[1] / s, -b / s))
        elif a[2] == 0:
            ineqs.append(((a[0], a[1]), b))
        else:
            raise ValueError("epigraph facet opens downwards")
    for a, b in eqs3:
        if a[2] != 0:
            # t is pinned on the whole domain: an affine function
            s = -a[2]
            minorants.append((a[0] / s, a[1] / s, -b / s))
        else:
            eqs.append(((a[0], a[1]), b))
    if not minorants:
        minorants = [(0, 0, 0)]
    return PolyhedralFn(tuple(sorted(minorants)), tuple(ineqs), tuple(eqs), arg_order, represents)


# ----------------------------------------------------------------------
# quadratic


class QuadraticFn(BivariateFn):
    """1/2 z'Qz + l.z + k restricted to the affine set {E z = e}."""

    tag = "quadratic"

    def __init__(self, Q, l, k=0.0, E=None, e=None, arg_order=PRIMAL, represents=None):
        self.Q = np.array(Q, dtype=float).reshape(2, 2)
        self.l = np.array(l, dtype=float).reshape(2)
        self.k = float(k)
        self.E = np.zeros((0, 2)) if E is None else np.array(E, dtype=float).reshape(-1, 2)
        self.e = np.zeros(0) if e is None else np.array(e, dtype=float).reshape(-1)
        self.arg_order = arg_order
        self.represents = represents
        if np.linalg.eigvalsh(0.5 * (self.Q + self.Q.T)).min() < -1e-12:
            raise NotConvexError("quadratic form is not positive semidefinite")

    def evaluate_grid(self, A, B):
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        Q, l = self.Q, self.l
        val = 0.5 * (Q[0, 0] * A * A + (Q[0, 1] + Q[1, 0]) * A * B + Q[1, 1] * B * B) \
            + l[0] * A + l[1] * B + self.k
        ok = np.ones(A.shape, dtype=bool)
        for (a1, a2), b in zip(self.E, self.e):
            ok &= np.abs(a1 * A + a2 * B - b) <= 1e-9 * (1 + np.abs(A) + np.abs(B))
        return np.where(ok, val, INF)

    def domain_set(self):
        eqs = [((Fraction(a1).limit_denominator(10**9), Fraction(a2).limit_denominator(10**9)),
                Fraction(b).limit_denominator(10**9)) for (a1, a2), b in zip(self.E, self.e)]
        return PolyhedralSet2D.from_constraints((), eqs)

    def hat(self):
        D = np.diag([1.0, -1.0])
        return QuadraticFn(D @ self.Q @ D, D @ self.l, self.k, self.E @ D, self.e,
                           self.arg_order, self.represents)

    def add_linear(self, c1, c2):
        return QuadraticFn(self.Q, self.l + np.array([c1, c2], dtype=float), self.k,
                           self.E if len(self.E) else None, self.e if len(self.E) else None,
                           self.arg_order, self.represents)

    def restrict_first(self, a0):
        a0 = float(a0)
        fixed = None
        for (e0, e1), rhs in zip(self.E, self.e):
            if abs(e1) > 1e-12:
                v = (rhs - e0 * a0) / e1
                if fixed is not None and abs(v - fixed) > 1e-9 * (1 + abs(v)):
                    return None
                fixed = v
            elif abs(e0 * a0 - rhs) > 1e-9 * (1 + abs(rhs)):
                return None
        Q, l = self.Q, self.l
        q = PlqFunction.quadratic(0.5 * Q[1, 1], 0.5 * (Q[0, 1] + Q[1, 0]) * a0 + l[1],
                                  0.5 * Q[0, 0] * a0 * a0 + l[0] * a0 + self.k)
        if fixed is None:
            return q
        return q + PlqFunction.indicator(fixed, fixed)

    def _affine_param(self):
        """z = z0 + N y parametrises {E z = e}."""
        if len(self.E) == 0:
            return np.zeros(2), np.eye(2)
        z0, *_ = np.linalg.lstsq(self.E, self.e, rcond=None)
        if np.abs(self.E @ z0 - self.e).max() > 1e-9:
            raise ValueError("inconsistent affine constraints")
        _, s, vt = np.linalg.svd(self.E)
        r = int((s > 1e-12).sum())
        return z0, vt[r:].T

    def conjugate(self):
        z0, N = self._affine_param()
        Q, l = self.Q, self.l
        H = N.T @ Q @ N
        Hp = np.linalg.pinv(H, rcond=1e-12) if H.size else H
        c0 = N.T @ (l + Q @ z0)
        if H.size:
            w, v = np.linalg.eigh(H)
            M = v[:, np.abs(w) <= 1e-12]
        else:
            M = np.zeros((0, 0))
        Qs = N @ Hp @ N.T if H.size else np.zeros((2, 2))
        ls = z0 - (N @ Hp @ c0 if H.size else 0)
        ks = -0.5 * z0 @ Q @ z0 - l @ z0 - self.k + (0.5 * c0 @ Hp @ c0 if H.size else 0.0)
        # directions along which the sup is linear: constraint on w
        free = N @ M if M.size else np.zeros((2, 0))
        fixed = np.eye(2) if N.shape[1] == 0 else None
        if fixed is not None:
            # domain is a point: conjugate is affine
            return QuadraticFn(np.zeros((2, 2)), z0, -(0.5 * z0 @ Q @ z0 + l @ z0 + self.k),
                               None, None, _swap(self.arg_order), self.represents)
        E = free.T
        e = free.T @ (l + Q @ z0)
        return QuadraticFn(_clean(Qs), _clean(ls), float(_clean(np.array(ks))),
                           _clean(E) if E.size else None, _clean(e) if E.size else None,
                           _swap(self.arg_order), self.represents)

    def to_json(self):
        return {
            "tag": self.tag,
            "formula": {"Q": self.Q.tolist(), "l": self.l.tolist(), "k": self.k,
                        "E": self.E.tolist(), "e": self.e.tolist()},
            **self._meta(),
        }

    def describe(self):
        s = f"1/2 z'{self.Q.tolist()}z + {self.l.tolist()}.z + {self.k:g}"
        if len(self.E):
            s += f" on {{{self.E.tolist()} z = {self.e.tolist()}}}"
        return s

    __str__ = describe


def _clean(a):
    a = np.array(a, dtype=float)
    a[np.abs(a) < 1e-13] = 0.0
    return a + 0.0


# ----------------------------------------------------------------------
# separable


class SeparableFn(BivariateFn):
    """(z1, z2) -> f1(z1) + f2(z2) with exact univariate PLQ parts."""

    tag = "separable"

    def __init__(self, f1, f2, arg_order=PRIMAL, represents=None):
        self.f1, self.f2 = f1, f2
        self.arg_order = arg_order
        self.represents = represents

    def evaluate_grid(self, A, B):
        return self.f1.evaluate(A) + self.f2.evaluate(B)

    def __call__(self, a, b):
        u, v = self.f1(a), self.f2(b)
        return u + v

    @property
    def is_piecewise_linear(self):
        return self.f1.is_piecewise_linear and self.f2.is_piecewise_linear

    def domain_set(self):
        d1, d2 = self.f1.domain(), self.f2.domain()
        return PolyhedralSet2D.box((d1.lo, d1.hi), (d2.lo, d2.hi))

    def hat(self):
        return SeparableFn(self.f1, self.f2.reflect(), self.arg_order, self.represents)

    def conjugate(self):
        return SeparableFn(conjugate(self.f1), conjugate(self.f2),
                           _swap(self.arg_order), self.represents)

    def add_linear(self, c1, c2):
        return SeparableFn(self.f1.add_linear(c1), self.f2.add_linear(c2),
                           self.arg_order, self.represents)

    def restrict_first(self, a0):
        v = self.f1(a0)
        return None if v == INF else self.f2 + v

    def to_quadratic(self):
        """Exact quadratic form when both parts are one quadratic on the whole line."""
        parts = []
        for f in (self.f1, self.f2):
            if f.breakpoints or f.pieces[0] is None:
                return None
            parts.append(f.pieces[0])
        (a1, b1, c1), (a2, b2, c2) = parts
        return QuadraticFn(np.diag([2 * a1, 2 * a2]), [b1, b2], c1 + c2,
                           arg_order=self.arg_order, represents=self.represents)

    def to_polyhedral(self):
        """Exact polyhedral form when both parts are piecewise linear."""
        if not self.is_piecewise_linear:
            raise ValueError("separable function has quadratic pieces")
        m1, c1 = _univariate_pl(self.f1)
        m2, c2 = _univariate_pl(self.f2)
        minorants = [(a1, a2, b1 + b2) for a1, b1 in m1 for a2, b2 in m2]
        ineqs = [((s, 0), b) for s, b in c1[0]] + [((0, s), b) for s, b in c2[0]]
        eqs = [((1, 0), b) for b in c1[1]] + [((0, 1), b) for b in c2[1]]
        return PolyhedralFn(tuple(minorants), tuple(ineqs), tuple(eqs),
                            self.arg_order, self.represents).simplified()

    def to_json(self):
        return {"tag": self.tag,
                "formula": {"f1": self.f1.to_json(), "f2": self.f2.to_json()},
                **self._meta()}

    def describe(self):
        return f"f1(z1) + f2(z2) with f1 = {self.f1}, f2 = {self.f2}"

    __str__ = describe


def _univariate_pl(f):
    """Affine minorants (slope, intercept) and domain constraints of a convex PL function."""
    minorants = [(p[1], p[2]) for p in f.pieces if p is not None]
    dom = f.domain()
    ineqs, eqs = [], []
    if dom.lo == dom.hi:
        eqs.append(dom.lo)
        if not minorants:
            minorants = [(0.0, f(dom.lo))]
    else:
        if math.isfinite(dom.lo):
            ineqs.append((-1, -dom.lo))
        if math.isfinite(dom.hi):
            ineqs.append((1, dom.hi))
    return minorants, (ineqs, eqs)


# ----------------------------------------------------------------------
# sloped pieces and grids


class SegmentwiseFn(BivariateFn):
    """max of a polyhedral part and closed-form sups over sloped graph pieces.

    Each sloped term (y0, s0, dy, ds, tmax) contributes
    sup_{0 <= t <= tmax} (s0 + t ds) x + (y0 + t dy) x* - (y0 + t dy)(s0 + t ds).
    """

    tag = "segmentwise"

    def __init__(self, base, terms, sign2=1.0, arg_order=PRIMAL, represents=None):
        self.base = base
        self.terms = tuple(terms)
        self.sign2 = sign2
        self.arg_order = arg_order
        self.represents = represents

    def evaluate_grid(self, A, B):
        A = np.asarray(A, dtype=float)
        B = self.sign2 * np.asarray(B, dtype=float)
        val = self.base.evaluate_grid(A, B)
        fin = np.isfinite(val)
        for y0, s0, dy, ds, tmax in self.terms:
            L = ds * A + dy * B - (y0 * ds + s0 * dy)
            k = dy * ds
            t = np.clip(L / (2 * k), 0.0, tmax)
            v = s0 * A + y0 * B - y0 * s0 + t * L - t * t * k
            val = np.where(fin, np.maximum(val, v), val)
        return val

    def domain_set(self):
        d = self.base.domain_set()
        return d if self.sign2 > 0 else d.reflect_second()

    @property
    def is_exact(self):
        return True

    def hat(self):
        return SegmentwiseFn(self.base, self.terms, -self.sign2, self.arg_order, self.represents)

    def conjugate(self, axes=None):
        axes = axes or (Axis.symmetric(), Axis.symmetric())
        G = GridFn.sample(self, axes)
        return GridBivariate(llt_2d(G, axes), _swap(self.arg_order), self.represents)

    def to_json(self):
        return {"tag": self.tag,
                "formula": {"base": self.base.to_json(),
                            "sloped_terms": [list(t) for t in self.terms],
                            "sign2": self.sign2},
                **self._meta()}

    def describe(self):
        return f"max({self.base}, {len(self.terms)} sloped pieces)"

    __str__ = describe


class GridBivariate(BivariateFn):
    """Grid-sampled function (nearest-node evaluation, +inf off the grid)."""

    tag = "grid"

    def __init__(self, grid, arg_order=PRIMAL, represents=None):
        self.grid = grid
        self.arg_order = arg_order
        self.represents = represents

    @property
    def is_exact(self):
        return False

    def evaluate_grid(self, A, B):
        return self.grid.lookup(np.asarray(A, dtype=float), np.asarray(B, dtype=float))

    def hat(self):
        ax, ay = self.grid.axes
        if not math.isclose(ay.lo, -ay.hi):
            raise ValueError("hat of a grid function needs a symmetric second axis")
        return GridBivariate(GridFn(self.grid.axes, self.grid.values[:, ::-1]),
                             self.arg_order, self.represents)

    def conjugate(self, axes=None):
        return GridBivariate(llt_2d(self.grid, axes), _swap(self.arg_order), self.represents)

    def to_json(self):
        return {"tag": self.tag, "grid": self.grid.to_json(), **self._meta()}

    def describe(self):
        return f"grid {self.grid.axes}"

    __str__ = describe


class TiltedFn(BivariateFn):
    """h + c1 z1 + c2 z2 for representatives without a closed-form tilt."""

    tag = "tilted"

    def __init__(self, base, c1, c2):
        self.base, self.c = base, (float(c1), float(c2))
        self.arg_order, self.represents = base.arg_order, base.represents

    @property
    def is_exact(self):
        return self.base.is_exact

    def evaluate_grid(self, A, B):
        return self.base.evaluate_grid(A, B) + self.c[0] * np.asarray(A) + self.c[1] * np.asarray(B)

    def domain_set(self):
        return self.base.domain_set()

    def to_json(self):
        return {"tag": self.tag, "formula": {"base": self.base.to_json(), "tilt": list(self.c)},
                **self._meta()}


def add_linear(h, c1, c2):
    if hasattr(h, "add_linear"):
        return h.add_linear(c1, c2)
    return TiltedFn(h, c1, c2)


# ----------------------------------------------------------------------
# constructors


def _outward_pieces(T):
    """Vertices, finite segments and rays (with outward directions) of a graph."""
    v = T.vertices
    rays = []
    if T.left is not None:
        rays.append((v[0], (-T.left[0], -T.left[1])))
    if T.right is not None:
        rays.append((v[-1], T.right))
    return v, list(zip(v, v[1:])), rays


def fitzpatrick_fn(T, name=None):
    """Exact Fitzpatrick function of a maximal monotone polyline graph."""
    if not maximality_check(T):
        raise GraphError("the Fitzpatrick function is built for maximal monotone graphs")
    verts, segs, rays = _outward_pieces(T)
    if len(verts) == 1 and T.left == T.right and T.left[0] > 0 and T.left[1] > 0:
        # a full sloped line s = a y + b
        a = T.left[1] / T.left[0]
        y0, s0 = verts[0]
        b = s0 - a * y0
        Q = np.array([[a * a, a], [a, 1.0]]) / (2 * a)
        return QuadraticFn(Q, [b / 2, -b / (2 * a)], b * b / (4 * a), represents=name)
    minorants = [(s, y, -y * s) for y, s in verts]
    ineqs, terms = [], []
    for (y0, s0), (y1, s1) in segs:
        dy, ds = y1 - y0, s1 - s0
        if dy * ds != 0:
            terms.append((y0, s0, dy, ds, 1.0))
    for (y0, s0), (dy, ds) in rays:
        if dy * ds == 0:
            ineqs.append(((F(ds), F(dy)), F(y0) * F(ds) + F(s0) * F(dy)))
        else:
            terms.append((y0, s0, dy, ds, INF))
    base = PolyhedralFn(tuple(minorants), tuple(ineqs), (), PRIMAL, name)
    if not terms:
        return base.simplified()
    return SegmentwiseFn(base, terms, represents=name)


def fenchel_representative(f, name=None):
    """(x, x*) -> f(x) + f*(x*) for a convex lsc PLQ f, or for T via its potential."""
    if isinstance(f, MonotoneGraph):
        f = antiderivative(f).simplify()
    if not convexity_check(f) or not f.is_lsc():
        raise NotConvexError("the Fenchel representative needs a convex lsc function")
    return SeparableFn(f, conjugate(f), PRIMAL, name)


def infconv_polyhedral(f, g):
    """Exact (f □ g) for polyhedral f, g: the epigraph is epi f + epi g."""
    p1, r1, l1 = f.canonical()
    p2, r2, l2 = g.canonical()
    pts = sorted({tuple(a + b for a, b in zip(u, v)) for u in p1 for v in p2})
    H = v_to_h(pts, list(r1) + list(r2), list(l1) + list(l2), 3)
    return _from_epigraph_h(H, f.arg_order, None)


def hat_transform(h):
    return h.hat()


def conjugate_bivariate(h):
    return h.conjugate()


def _lifted_generators(T):
    verts, _, rays = _outward_pieces(T)
    pts = [(F(y), F(s), F(y) * F(s)) for y, s in verts]
    dirs = [(Fraction(0), Fraction(0), Fraction(1))]
    for (y0, s0), (dy, ds) in rays:
        if dy * ds != 0:
            raise ValueError("psi_T without a sample needs an axis-parallel graph")
        dirs.append((F(dy), F(ds), F(y0) * F(ds) + F(s0) * F(dy)))
    return pts, dirs


def psi_T(T, sample=None, name=None):
    """Closed convex hull of c + indicator of the graph (or of a finite sample of it)."""
    if sample is None:
        pts, dirs = _lifted_generators(T)
    else:
        sample = list(sample)
        if not sample:
            raise ValueError("psi_T needs a nonempty sample")
        for y, s in sample:
            if not T(y).contains(s, 1e-12):
                raise ValueError(f"sample point ({y}, {s}) is not on the graph")
        pts = sorted({(F(y), F(s), F(y) * F(s)) for y, s in sample})
        dirs = [(Fraction(0), Fraction(0), Fraction(1))]
    H = v_to_h(pts, dirs, (), 3)
    return _from_epigraph_h(H, PRIMAL, name)


def graph_sample(T, box=None, per_piece=5):
    """Points of the graph inside a box: vertices, interior segment points, ray points."""
    box = default_box() if box is None else box
    verts, segs, rays = _outward_pieces(T)
    out = list(verts)
    for (y0, s0), (y1, s1) in segs:
        for t in np.linspace(0, 1, per_piece + 2)[1:-1]:
            out.append((y0 + t * (y1 - y0), s0 + t * (s1 - s0)))
    for (y0, s0), (dy, ds) in rays:
        tmax = 2 * box / max(abs(dy), abs(ds))
        for t in np.linspace(0, tmax, per_piece + 1)[1:]:
            out.append((y0 + t * dy, s0 + t * ds))
    return [(float(y), float(s)) for y, s in out if abs(y) <= box and abs(s) <= box]


def graph_distance(T, X, Y):
    """Euclidean distance from each (X, Y) to the graph (vectorised)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    verts, segs, rays = _outward_pieces(T)
    best = np.full(X.shape, INF)
    for y, s in verts:
        best = np.minimum(best, np.hypot(X - y, Y - s))
    for (y0, s0), (y1, s1) in segs:
        best = np.minimum(best, _seg_dist(X, Y, y0, s0, y1 - y0, s1 - s0, 1.0))
    for (y0, s0), (dy, ds) in rays:
        best = np.minimum(best, _seg_dist(X, Y, y0, s0, dy, ds, INF))
    return best


def _seg_dist(X, Y, y0, s0, dy, ds, tmax):
    n2 = dy * dy + ds * ds
    t = np.clip(((X - y0) * dy + (Y - s0) * ds) / n2, 0.0, tmax)
    return np.hypot(X - (y0 + t * dy), Y - (s0 + t * ds))


# ----------------------------------------------------------------------
# validity


@dataclass
class ValidityReport:
    dominates_c: bool
    conjugate_dominates_c: bool
    equality_on_graph: bool
    strict_off_graph: bool
    equality_only_near_graph: bool
    midpoint_convex: bool
    min_gap: float
    max_graph_gap: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return (self.dominates_c and self.conjugate_dominates_c and self.equality_on_graph
                and self.strict_off_graph and self.midpoint_convex)

    def to_json(self):
        return {k: (v if not isinstance(v, float) else float(v)) for k, v in self.__dict__.items()}


def _midpoint_convex(V, tol):
    """Discrete midpoint convexity along both axes and both diagonals (finite triples)."""
    ok = True
    triples = [
        (V[:-2, :], V[1:-1, :], V[2:, :]),
        (V[:, :-2], V[:, 1:-1], V[:, 2:]),
        (V[:-2, :-2], V[1:-1, 1:-1], V[2:, 2:]),
        (V[:-2, 2:], V[1:-1, 1:-1], V[2:, :-2]),
    ]
    for a, m, b in triples:
        fin = np.isfinite(a) & np.isfinite(m) & np.isfinite(b)
        with np.errstate(invalid="ignore"):
            bad = fin & (a + b - 2 * m < -tol * (1 + np.abs(m)))
        ok &= not bad.any()
    return bool(ok)


def representative_validity_check(h, T, axes=None, tol=1e-9, conj=None):
    """Check h >= c, h* >= c, h = c on G(T), h > c away from G(T), midpoint convexity."""
    axes = axes or (Axis.symmetric(), Axis.symmetric())
    X, Xs = np.meshgrid(axes[0].nodes, axes[1].nodes, indexing="ij")
    evaluate = h.evaluate_grid if hasattr(h, "evaluate_grid") else np.vectorize(h)
    V = evaluate(X, Xs)
    C = X * Xs
    with np.errstate(invalid="ignore"):
        gap = V - C
    dominates = bool(np.all(gap >= -tol * (1 + np.abs(C))))
    if conj is None and hasattr(h, "conjugate"):
        conj = h.conjugate()
    if conj is not None:
        Vs = conj.evaluate_grid(Xs, X)
        ctol = tol if getattr(conj, "is_exact", True) else 4 * axes[0].h * (1 + np.abs(C))
        conj_ok = bool(np.all(Vs - C >= -ctol - tol * (1 + np.abs(C))))
    else:
        conj_ok = False
    dist = graph_distance(T, X, Xs)
    step = max(a.h for a in axes)
    on_graph = dist <= 1e-12
    near = dist <= step * (1 + 1e-9)
    far = dist >= 2 * step
    is_eq = np.abs(gap) <= tol * (1 + np.abs(C))
    eq_on_graph = bool(np.all(is_eq[on_graph]))
    samples = graph_sample(T, min(abs(axes[0].lo), abs(axes[1].lo), axes[0].hi, axes[1].hi))
    sample_gap = 0.0
    for y, s in samples:
        g = abs(float(evaluate(np.array(y), np.array(s))) - y * s)
        sample_gap = max(sample_gap, g)
    eq_on_graph = eq_on_graph and sample_gap <= tol * (1 + max((abs(y * s) for y, s in samples), default=0))
    strict = bool(np.all(gap[far] > tol * (1 + np.abs(C[far]))))
    only_near = bool(np.all(near[is_eq]))
    finite_gap = gap[np.isfinite(gap)]
    return ValidityReport(
        dominates_c=dominates,
        conjugate_dominates_c=conj_ok,
        equality_on_graph=eq_on_graph,
        strict_off_graph=strict,
        equality_only_near_graph=only_near,
        midpoint_convex=_midpoint_convex(V, tol),
        min_gap=float(finite_gap.min()) if finite_gap.size else INF,
        max_graph_gap=float(sample_gap),
        details={"nodes": int(V.size), "on_graph_nodes": int(on_graph.sum())},
    )


def representative(T, kind="fitzpatrick", name=None):
    if kind == "fitzpatrick":
        return fitzpatrick_fn(T, name)
    if kind == "fenchel":
        return fenchel_representative(T, name)
    raise ValueError(f"unknown representative kind {kind!r}")


def bivariate_from_json(data):
    order = tuple(data.get("arg_order", PRIMAL))
    rep = data.get("represents")
    tag = data.get("tag")
    if tag == "polyhedral":
        dom = data.get("domain", {})
        return PolyhedralFn(
            tuple(tuple(Fraction(v) for v in m) for m in data["minorants"]),
            tuple((tuple(Fraction(v) for v in a), Fraction(b)) for a, b in dom.get("ineqs", [])),
            tuple((tuple(Fraction(v) for v in a), Fraction(b)) for a, b in dom.get("eqs", [])),
            order, rep)
    if tag == "quadratic":
        f = data["formula"]
        E = f.get("E") or None
        return QuadraticFn(f["Q"], f["l"], f["k"], E, f.get("e") if E else None, order, rep)
    if tag == "separable":
        f = data["formula"]
        return SeparableFn(PlqFunction.from_json(f["f1"]), PlqFunction.from_json(f["f2"]), order, rep)
    if tag == "grid":
        return GridBivariate(GridFn.from_json(data["grid"]), order, rep)
    if tag == "tilted":
        f = data["formula"]
        return TiltedFn(bivariate_from_json(f["base"]), *f["tilt"])
    if tag == "segmentwise":
        f = data["formula"]
        return SegmentwiseFn(bivariate_from_json(f["base"]), [tuple(t) for t in f["sloped_terms"]],
                             f.get("sign2", 1.0), order, rep)
    raise ValueError(f"unknown bivariate tag {tag!r}")
