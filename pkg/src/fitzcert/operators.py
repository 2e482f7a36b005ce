"""Maximal monotone operators on the real line as monotone polylines.

A :class:`MonotoneGraph` stores the graph of an operator as a chain of
vertices ``(x, s)`` whose coordinates are both nondecreasing, plus an
optional ray at each end.  Rays are kept symbolically (anchor vertex plus a
nonnegative direction), so unbounded graphs are never truncated.  The left
ray is ``v_0 - t d`` and the right ray ``v_m + t d`` for ``t >= 0``.
"""

from dataclasses import dataclass
import json
import math
import re

from .extreal import INF, from_json as _ext_from_json
from .plq import PlqFunction, convexity_check, _snap, _walk, NotConvexError
from .sets import Interval, SetOnLine


class GraphError(ValueError):
    """Malformed or non-monotone operator description."""


def _dir(d):
    if d is None:
        return None
    dx, ds = float(d[0]), float(d[1])
    if dx < 0 or ds < 0 or (dx == 0 and ds == 0) or not (math.isfinite(dx) and math.isfinite(ds)):
        raise GraphError(f"ray direction must be nonnegative and nonzero, got {d!r}")
    n = dx + ds
    return (dx / n, ds / n)


@dataclass(frozen=True)
class Segment:
    """One piece of the graph; endpoints may be infinite for rays."""

    x0: float
    s0: float
    x1: float
    s1: float

    @property
    def kind(self):
        if self.x0 == self.x1 and self.s0 == self.s1:
            return "point"
        if self.x0 == self.x1:
            return "vertical"
        return "sloped"


@dataclass(frozen=True)
class MonotoneGraph:
    vertices: tuple
    left: tuple | None = None
    right: tuple | None = None

    def __post_init__(self):
        verts = tuple((float(x) + 0.0, float(s) + 0.0) for x, s in self.vertices)
        if not verts:
            raise GraphError("a graph needs at least one vertex")
        for x, s in verts:
            if not (math.isfinite(x) and math.isfinite(s)):
                raise GraphError("vertices must be finite")
        for (x0, s0), (x1, s1) in zip(verts, verts[1:]):
            if x1 < x0 or s1 < s0:
                raise GraphError(f"graph is not monotone between ({x0}, {s0}) and ({x1}, {s1})")
            if x1 == x0 and s1 == s0:
                raise GraphError(f"repeated vertex ({x0}, {s0})")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "left", _dir(self.left))
        object.__setattr__(self, "right", _dir(self.right))

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def from_polyline(cls, vertices, left_dir=None, right_dir=None):
        return cls(tuple(vertices), left_dir, right_dir)

    @classmethod
    def line(cls, slope, intercept=0.0):
        """The full line s = slope * x + intercept (slope >= 0)."""
        if slope < 0:
            raise GraphError("a decreasing line is not monotone")
        x0 = -intercept / (1.0 + slope)
        d = (1.0, slope)
        return cls(((x0, slope * x0 + intercept),), d, d)

    @classmethod
    def vertical_line(cls, x0):
        return cls(((x0, -x0),), (0.0, 1.0), (0.0, 1.0))

    # ------------------------------------------------------------------
    # structure

    @property
    def is_maximal(self):
        return maximality_check(self)

    def segments(self):
        segs = []
        v = self.vertices
        if self.left is not None:
            dx, ds = self.left
            segs.append(Segment(-INF if dx > 0 else v[0][0], -INF if ds > 0 else v[0][1],
                                v[0][0], v[0][1]))
        if len(v) == 1 and self.left is None and self.right is None:
            segs.append(Segment(v[0][0], v[0][1], v[0][0], v[0][1]))
        for (x0, s0), (x1, s1) in zip(v, v[1:]):
            segs.append(Segment(x0, s0, x1, s1))
        if self.right is not None:
            dx, ds = self.right
            segs.append(Segment(v[-1][0], v[-1][1], INF if dx > 0 else v[-1][0],
                                INF if ds > 0 else v[-1][1]))
        return segs

    def _pieces(self):
        """("left", v0, d), ("seg", a, b) and ("right", vm, d) pieces in curve order."""
        out = []
        v = self.vertices
        if self.left is not None:
            out.append(("left", v[0], self.left))
        for a, b in zip(v, v[1:]):
            out.append(("seg", a, b))
        if self.right is not None:
            out.append(("right", v[-1], self.right))
        return out

    @property
    def has_sloped_part(self):
        for piece in self._pieces():
            if piece[0] == "seg":
                (x0, s0), (x1, s1) = piece[1], piece[2]
                if x1 > x0 and s1 > s0:
                    return True
            elif piece[2][0] > 0 and piece[2][1] > 0:
                return True
        return False

    # ------------------------------------------------------------------
    # evaluation

    def __call__(self, x):
        return evaluate(self, x)

    def limit_value(self, x, side):
        """Value of the single-valued branch near x from the given side (+1/-1).

        ``side == 0`` asks for the value at a point where T is single valued.
        """
        x = float(x)
        if side == 0:
            return evaluate(self, x).lo
        for kind, *data in self._pieces():
            if kind == "seg":
                (x0, s0), (x1, s1) = data
                if x0 < x1:
                    if x == x0 and side > 0:
                        return s0
                    if x == x1 and side < 0:
                        return s1
                    if x0 < x < x1:
                        return s0 + (s1 - s0) * (x - x0) / (x1 - x0)
            elif kind == "left":
                (x0, s0), (dx, ds) = data
                if dx > 0:
                    if x == x0 and side < 0:
                        return s0
                    if x < x0:
                        return s0 - ds / dx * (x0 - x)
            else:
                (x0, s0), (dx, ds) = data
                if dx > 0:
                    if x == x0 and side > 0:
                        return s0
                    if x > x0:
                        return s0 + ds / dx * (x - x0)
        return None

    def slope_at(self, x):
        """Slope of the single-valued branch at a non-vertex x, or None."""
        for kind, *data in self._pieces():
            if kind == "seg":
                (x0, s0), (x1, s1) = data
                if x0 < x < x1:
                    return (s1 - s0) / (x1 - x0)
            elif kind == "left":
                (x0, _), (dx, ds) = data
                if dx > 0 and x < x0:
                    return ds / dx
            else:
                (x0, _), (dx, ds) = data
                if dx > 0 and x > x0:
                    return ds / dx
        return None

    def minty(self):
        """Range of x + s over the graph as a set on the line."""
        parts = []
        v = self.vertices
        for x, s in v:
            parts.append(Interval.point(x + s))
        for (x0, s0), (x1, s1) in zip(v, v[1:]):
            parts.append(Interval.closed(x0 + s0, x1 + s1))
        if self.left is not None:
            parts.append(Interval(-INF, v[0][0] + v[0][1], False, True))
        if self.right is not None:
            parts.append(Interval(v[-1][0] + v[-1][1], INF, True, False))
        return SetOnLine(parts)

    # ------------------------------------------------------------------
    # canonical form

    def canonical(self):
        """Equal graphs have equal canonical forms (collinear vertices merged)."""
        verts = list(self.vertices)
        pts = []
        for i, p in enumerate(verts):
            prev = verts[i - 1] if i > 0 else None
            nxt = verts[i + 1] if i + 1 < len(verts) else None
            d_in = _unit(p[0] - prev[0], p[1] - prev[1]) if prev else self.left
            d_out = _unit(nxt[0] - p[0], nxt[1] - p[1]) if nxt else self.right
            if d_in is not None and d_out is not None and _same_dir(d_in, d_out):
                continue
            pts.append(p)
        if not pts:
            # a full straight line: anchor at Minty parameter zero
            dx, ds = self.left
            x0, s0 = verts[0]
            t = -(x0 + s0) / (dx + ds)
            pts = [(x0 + t * dx, s0 + t * ds)]
        return MonotoneGraph(tuple(pts), self.left, self.right)

    def isclose(self, other, tol=1e-9):
        a, b = self.canonical(), other.canonical()
        if len(a.vertices) != len(b.vertices):
            return False
        for (x0, s0), (x1, s1) in zip(a.vertices, b.vertices):
            if abs(x0 - x1) > tol or abs(s0 - s1) > tol:
                return False
        for d, e in ((a.left, b.left), (a.right, b.right)):
            if (d is None) != (e is None):
                return False
            if d is not None and (abs(d[0] - e[0]) > tol or abs(d[1] - e[1]) > tol):
                return False
        return True

    # ------------------------------------------------------------------
    # serialisation

    def to_json(self):
        segs = []
        v = self.vertices
        if self.left is not None:
            segs.append({"from": list(v[0]), "dir": [-self.left[0], -self.left[1]]})
        for a, b in zip(v, v[1:]):
            segs.append({"from": list(a), "to": list(b)})
        if len(v) == 1 and self.left is None and self.right is None:
            segs.append({"from": list(v[0]), "to": list(v[0])})
        if self.right is not None:
            segs.append({"from": list(v[-1]), "dir": list(self.right)})
        return {"segments": segs}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        if "vertices" in data:
            return cls(tuple(tuple(map(float, p)) for p in data["vertices"]),
                       data.get("left"), data.get("right"))
        segs = data.get("segments")
        if not segs:
            raise GraphError("operator needs a nonempty 'segments' list")
        verts, left, right = [], None, None
        for k, seg in enumerate(segs):
            start = tuple(_ext_from_json(v) for v in seg["from"])
            if "dir" in seg:
                dx, ds = (float(v) for v in seg["dir"])
                if dx <= 0 and ds <= 0:
                    if verts:
                        raise GraphError(f"segments[{k}]: a left ray must come first")
                    left = (-dx, -ds)
                    verts.append(start)
                elif dx >= 0 and ds >= 0:
                    if k != len(segs) - 1:
                        raise GraphError(f"segments[{k}]: a right ray must come last")
                    right = (dx, ds)
                    if not verts or verts[-1] != start:
                        verts.append(start)
                else:
                    raise GraphError(f"segments[{k}]: ray direction is not monotone")
                continue
            end = tuple(_ext_from_json(v) for v in seg["to"])
            if verts and verts[-1] != start:
                raise GraphError(f"segments[{k}] does not start where the previous one ends")
            if not verts:
                verts.append(start)
            if end != start:
                verts.append(end)
        try:
            return cls(tuple(verts), left, right)
        except GraphError as exc:
            raise GraphError(f"segments: {exc}") from None

    def __str__(self):
        parts = []
        if self.left is not None:
            parts.append(f"ray<-{self.left}")
        parts.append(" -> ".join(f"({x:g},{s:g})" for x, s in self.vertices))
        if self.right is not None:
            parts.append(f"ray->{self.right}")
        return "Graph[" + " ".join(parts) + "]"


def _unit(dx, ds):
    n = dx + ds
    return (dx / n, ds / n)


def _same_dir(d, e, tol=1e-12):
    return abs(d[0] - e[0]) <= tol and abs(d[1] - e[1]) <= tol


# ----------------------------------------------------------------------
# constructors


def from_subdifferential(f):
    """Graph of the subdifferential of a convex lsc PLQ function."""
    if not convexity_check(f):
        raise NotConvexError("subdifferential graph needs a convex function")
    if not f.is_lsc():
        raise NotConvexError("subdifferential graph needs a lower semicontinuous function")
    items = _walk(f)
    verts, left, right = [], None, None

    def push(p):
        x, s = _snap(p[0]), _snap(p[1])
        if verts:
            # one-sided derivatives and piece slopes can disagree by an ulp
            px, ps = verts[-1]
            if px - 1e-12 * max(1.0, abs(px)) <= x < px:
                x = px
            if ps - 1e-12 * max(1.0, abs(ps)) <= s < ps:
                s = ps
            if (x, s) == verts[-1]:
                return
        verts.append((x, s))

    for k, item in enumerate(items):
        first, last = k == 0, k == len(items) - 1
        if item[0] == "node":
            _, x, _, dm, dp = item
            if dm == -INF:
                left = (0.0, 1.0)
            else:
                push((x, dm))
            if dp == INF:
                right = (0.0, 1.0)
            else:
                push((x, dp))
            if dm == -INF and dp == INF:
                push((x, -x))
        else:
            _, lo, hi, (a, b, _) = item
            d = (1.0, 2.0 * a)
            if lo == -INF:
                left = d
            else:
                push((lo, 2.0 * a * lo + b))
            if hi == INF:
                right = d
            else:
                push((hi, 2.0 * a * hi + b))
            if lo == -INF and hi == INF:
                x0 = -b / (1.0 + 2.0 * a)
                push((x0, 2.0 * a * x0 + b))
    return MonotoneGraph(tuple(verts), left, right)


def normal_cone(lo, hi=None):
    """Normal cone of a closed interval, given by ends or a SetOnLine."""
    if isinstance(lo, SetOnLine):
        U = lo
        if U.is_empty or not U.is_interval:
            raise GraphError("normal cone needs a nonempty interval")
        iv = U.components[0]
        if (math.isfinite(iv.lo) and not iv.lo_closed) or (math.isfinite(iv.hi) and not iv.hi_closed):
            raise GraphError("normal cone needs a closed interval")
        lo, hi = iv.lo, iv.hi
    if hi is None or lo > hi:
        raise GraphError("normal cone needs a nonempty closed interval")
    return from_subdifferential(PlqFunction.indicator(lo, hi))


def duality_map():
    """The duality map on the real line, s = x."""
    return MonotoneGraph.line(1.0, 0.0)


def subdifferential_graph(text_or_f):
    f = PlqFunction.parse(text_or_f) if isinstance(text_or_f, str) else text_or_f
    return from_subdifferential(f)


# ----------------------------------------------------------------------
# queries


def evaluate(T, x):
    """Exact set value T(x) as a closed interval (possibly empty)."""
    x = float(x)
    parts = []
    for kind, *data in T._pieces():
        if kind == "seg":
            (x0, s0), (x1, s1) = data
            if x0 == x1:
                if x == x0:
                    parts.append(Interval.closed(s0, s1))
            elif x == x0:
                parts.append(Interval.point(s0))
            elif x == x1:
                parts.append(Interval.point(s1))
            elif x0 < x < x1:
                parts.append(Interval.point(s0 + (s1 - s0) * (x - x0) / (x1 - x0)))
        elif kind == "left":
            (x0, s0), (dx, ds) = data
            if dx == 0:
                if x == x0:
                    parts.append(Interval(-INF, s0, False, True))
            elif x == x0:
                parts.append(Interval.point(s0))
            elif x < x0:
                parts.append(Interval.point(s0 - ds / dx * (x0 - x)))
        else:
            (x0, s0), (dx, ds) = data
            if dx == 0:
                if x == x0:
                    parts.append(Interval(s0, INF, True, False))
            elif x == x0:
                parts.append(Interval.point(s0))
            elif x > x0:
                parts.append(Interval.point(s0 + ds / dx * (x - x0)))
    if len(T.vertices) == 1 and T.left is None and T.right is None and x == T.vertices[0][0]:
        parts.append(Interval.point(T.vertices[0][1]))
    return SetOnLine(parts)


def domain(T):
    v = T.vertices
    lo = -INF if T.left is not None and T.left[0] > 0 else v[0][0]
    hi = INF if T.right is not None and T.right[0] > 0 else v[-1][0]
    return SetOnLine([Interval(lo, hi, True, True)])


def range_(T):
    v = T.vertices
    lo = -INF if T.left is not None and T.left[1] > 0 else v[0][1]
    hi = INF if T.right is not None and T.right[1] > 0 else v[-1][1]
    return SetOnLine([Interval(lo, hi, True, True)])


def shift(T, p):
    """Graph of x -> T(p + x): translate by -p in x."""
    p = float(p)
    return MonotoneGraph(tuple((x - p, s) for x, s in T.vertices), T.left, T.right)


def maximality_check(T):
    """Monotone chain whose Minty image x + s is the whole line."""
    try:
        MonotoneGraph(T.vertices, T.left, T.right)
    except GraphError:
        return False
    return T.minty().is_real_line


def sum_range_oracle(S, T, p=0.0):
    """Exact range of x -> S(p + x) + T(x) as a union of intervals."""
    Sp = shift(S, p)
    crit = sorted({x for x, _ in Sp.vertices} | {x for x, _ in T.vertices})
    dS, dT = domain(Sp), domain(T)
    parts = []
    for c in crit:
        a, b = evaluate(Sp, c), evaluate(T, c)
        if not a.is_empty and not b.is_empty:
            parts.extend((a + b).components)
    edges = [-INF] + crit + [INF]
    for lo, hi in zip(edges, edges[1:]):
        mid = _mid(lo, hi)
        if not (dS.contains(mid) and dT.contains(mid)):
            continue
        slope = Sp.slope_at(mid) + T.slope_at(mid)
        ends = []
        for x, side in ((lo, +1), (hi, -1)):
            if math.isinf(x):
                ends.append(x if slope > 0 else Sp.limit_value(mid, 0) + T.limit_value(mid, 0))
            else:
                ends.append(Sp.limit_value(x, side) + T.limit_value(x, side))
        if ends[0] == ends[1]:
            parts.append(Interval.point(ends[0]))
        else:
            parts.append(Interval(ends[0], ends[1], False, False))
    return SetOnLine(parts)


def _mid(lo, hi):
    if lo == -INF and hi == INF:
        return 0.0
    if lo == -INF:
        return hi - 1.0
    if hi == INF:
        return lo + 1.0
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------
# potentials


def antiderivative(T):
    """Convex lsc PLQ F with dF = T and F = 0 at the first vertex."""
    if not maximality_check(T):
        raise GraphError("antiderivative needs a maximal monotone graph")
    v = T.vertices
    xs = sorted({x for x, _ in v})
    # F at each distinct vertex abscissa, integrating along non-vertical pieces
    Fval = {xs[0]: 0.0}
    pieces_mid = {}
    for (x0, s0), (x1, s1) in zip(v, v[1:]):
        if x1 > x0:
            Fval[x1] = Fval[x0] + 0.5 * (s0 + s1) * (x1 - x0)
            a = (s1 - s0) / (x1 - x0)
            pieces_mid[(x0, x1)] = _quad_from(x0, s0, a, Fval[x0])
    bps = xs
    pieces = []
    if T.left[0] > 0:
        x0, s0 = v[0]
        pieces.append(_quad_from(x0, s0, T.left[1] / T.left[0], Fval[x0]))
    else:
        pieces.append(None)
    for x0, x1 in zip(xs, xs[1:]):
        pieces.append(pieces_mid[(x0, x1)])
    if T.right[0] > 0:
        x0, s0 = v[-1]
        pieces.append(_quad_from(x0, s0, T.right[1] / T.right[0], Fval[x0]))
    else:
        pieces.append(None)
    return PlqFunction(tuple(bps), tuple(pieces), tuple(Fval[x] for x in xs)).simplify()


def _quad_from(x0, s0, a, F0):
    """Coefficients of F0 + s0 (x - x0) + a/2 (x - x0)^2."""
    return (0.5 * a, s0 - a * x0, F0 - s0 * x0 + 0.5 * a * x0 * x0)


# ----------------------------------------------------------------------
# random generation and parsing


def random_maximal_graph(rng, max_vertices=4, step=0.5, span=3):
    """Random maximal monotone polyline with vertices on a half-integer lattice.

    Vertices are generated along increasing Minty parameter, each step being
    horizontal, vertical or sloped, so maximality holds by construction.
    """
    m = int(rng.integers(1, max_vertices + 1))
    x = step * int(rng.integers(-2 * span, 2 * span + 1)) / 2
    s = step * int(rng.integers(-2 * span, 2 * span + 1)) / 2
    verts = [(x, s)]
    for _ in range(m - 1):
        kind = rng.integers(0, 3)
        dx = step * int(rng.integers(1, 4))
        ds = step * int(rng.integers(1, 4))
        if kind == 0:
            ds = 0.0
        elif kind == 1:
            dx = 0.0
        x, s = x + dx, s + ds
        verts.append((x, s))

    def ray():
        kind = rng.integers(0, 3)
        if kind == 0:
            return (1.0, 0.0)
        if kind == 1:
            return (0.0, 1.0)
        return (1.0, float(rng.choice([0.5, 1.0, 2.0])))

    return MonotoneGraph(tuple(verts), ray(), ray())


_NCONE = re.compile(r"ncone\s*\[\s*([^,\]]+)\s*,\s*([^\]]+)\s*\]")
_SUBDIFF = re.compile(r"subdiff\s*\((.*)\)")


def parse_operator(text, resolve=None):
    """Parse ``J``, ``ncone[l,u]`` or ``subdiff(<plq or name>)``."""
    s = text.strip()
    if s == "J":
        return duality_map()
    m = _NCONE.fullmatch(s)
    if m:
        lo = _ext_from_json(m.group(1).strip())
        hi = _ext_from_json(m.group(2).strip())
        return normal_cone(lo, hi)
    m = _SUBDIFF.fullmatch(s)
    if m:
        inner = m.group(1).strip()
        if resolve is not None:
            f = resolve(inner)
            if f is not None:
                return from_subdifferential(f)
        return from_subdifferential(PlqFunction.parse(inner))
    raise GraphError(f"unknown operator builtin {text!r}")
