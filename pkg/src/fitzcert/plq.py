"""Exact calculus for univariate piecewise linear-quadratic (PLQ) functions.

A :class:`PlqFunction` is described by strictly increasing breakpoints
``b_0 < ... < b_{k-1}``, one quadratic piece ``a x^2 + b x + c`` (or ``None``
for the constant +inf) on each of the ``k + 1`` open intervals they cut the
line into, and an explicit value at every breakpoint.  Infinite values are
carried as ``math.inf``; nothing is ever replaced by a large sentinel, which
keeps indicator functions and their conjugates exact.
"""

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
import json
import math
import re

import numpy as np

from .extreal import INF, ext_add, to_json as _ext_to_json, from_json as _ext_from_json
from .sets import Interval, SetOnLine

COEF_TOL = 1e-9


class PlqError(ValueError):
    """Malformed PLQ description."""


class ImproperError(ValueError):
    """An operation produced (or was handed) an improper function."""


class NotConvexError(ValueError):
    """A convex input was required."""


def _peval(piece, x):
    if piece is None:
        return INF
    a, b, c = piece
    if math.isinf(x):
        # only reached for limits along unbounded pieces
        if a != 0:
            return INF if a > 0 else -INF
        if b != 0:
            return INF if (b > 0) == (x > 0) else -INF
        return c
    return (a * x + b) * x + c


def _pderiv(piece, x):
    a, b, _ = piece
    return 2.0 * a * x + b


def _clean(x):
    x = float(x)
    return 0.0 if x == 0 else x


def _snap(x, tol=1e-12, max_den=1 << 16):
    """Pull x onto a nearby small-denominator rational, undoing rounding noise."""
    x = _clean(x)
    if not math.isfinite(x):
        return x
    q = float(Fraction(x).limit_denominator(max_den))
    return q if abs(q - x) <= tol * max(1.0, abs(x)) else x


def _close(u, v, tol):
    if math.isinf(u) or math.isinf(v):
        return u == v
    return abs(u - v) <= tol * max(1.0, abs(u), abs(v))


def _pieces_close(p, q, tol):
    if p is None or q is None:
        return p is None and q is None
    return all(_close(u, v, tol) for u, v in zip(p, q))


@dataclass(frozen=True)
class PlqFunction:
    """Proper extended-real piecewise linear-quadratic function on the line."""

    breakpoints: tuple = ()
    pieces: tuple = (None,)
    values: tuple = ()

    def __post_init__(self):
        bps = tuple(_snap(b) for b in self.breakpoints)
        pieces = tuple(None if p is None else tuple(_clean(v) for v in p)
                       for p in self.pieces)
        values = tuple(_clean(v) for v in self.values)
        if len(pieces) != len(bps) + 1:
            raise PlqError(f"need {len(bps) + 1} pieces for {len(bps)} breakpoints, "
                           f"got {len(pieces)}")
        if len(values) != len(bps):
            raise PlqError(f"need one value per breakpoint, got {len(values)} "
                           f"for {len(bps)}")
        for b in bps:
            if not math.isfinite(b):
                raise PlqError("breakpoints must be finite")
        for u, v in zip(bps, bps[1:]):
            if not u < v:
                raise PlqError(f"breakpoints must be strictly increasing ({u} !< {v})")
        for p in pieces:
            if p is not None:
                if len(p) != 3 or not all(math.isfinite(v) for v in p):
                    raise PlqError(f"bad piece coefficients {p!r}")
        for v in values:
            if math.isnan(v) or v == -INF:
                raise ImproperError("PLQ values must not be -inf or nan")
        if all(p is None for p in pieces) and all(v == INF for v in values):
            raise ImproperError("function is identically +inf")
        # unbounded-below pieces on unbounded intervals make the function
        # take -inf only in the limit; values stay finite, so properness holds.
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "values", values)

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def quadratic(cls, a=0.0, b=0.0, c=0.0):
        return cls((), ((a, b, c),), ())

    @classmethod
    def linear(cls, slope, intercept=0.0):
        return cls.quadratic(0.0, slope, intercept)

    @classmethod
    def zero(cls):
        return cls.quadratic()

    @classmethod
    def indicator(cls, lo, hi):
        """Indicator of the closed interval [lo, hi] (ends may be infinite)."""
        lo, hi = float(lo), float(hi)
        if lo > hi:
            raise PlqError("indicator of an empty set is not proper")
        zero = (0.0, 0.0, 0.0)
        if lo == -INF and hi == INF:
            return cls.zero()
        if lo == -INF:
            return cls((hi,), (zero, None), (0.0,))
        if hi == INF:
            return cls((lo,), (None, zero), (0.0,))
        if lo == hi:
            return cls((lo,), (None, None), (0.0,))
        return cls((lo, hi), (None, zero, None), (0.0, 0.0))

    @classmethod
    def support(cls, lo, hi):
        """Support function s -> sup{s x : x in [lo, hi]}."""
        lo, hi = float(lo), float(hi)
        if lo > hi:
            raise PlqError("support function of an empty set is not proper")
        left = None if lo == -INF else (0.0, lo, 0.0)
        right = None if hi == INF else (0.0, hi, 0.0)
        return cls((0.0,), (left, right), (0.0,)).simplify()

    @classmethod
    def abs(cls):
        return cls((0.0,), ((0.0, -1.0, 0.0), (0.0, 1.0, 0.0)), (0.0,))

    @classmethod
    def from_pieces(cls, breakpoints, pieces, values=None):
        """Build from pieces; missing breakpoint values default to the lsc choice."""
        f = cls(tuple(breakpoints), tuple(pieces),
                tuple(values) if values is not None else
                tuple(min(_peval(pieces[i], b), _peval(pieces[i + 1], b))
                      for i, b in enumerate(breakpoints)))
        return f

    # ------------------------------------------------------------------
    # evaluation

    def __call__(self, x):
        x = float(x)
        i = bisect_left(self.breakpoints, x)
        if i < len(self.breakpoints) and self.breakpoints[i] == x:
            return self.values[i]
        return _peval(self.pieces[i], x)

    def evaluate(self, xs):
        """Vectorised evaluation on an array of points."""
        xs = np.asarray(xs, dtype=float)
        out = np.empty(xs.shape)
        bps = np.asarray(self.breakpoints, dtype=float)
        idx = np.searchsorted(bps, xs, side="left")
        for i, piece in enumerate(self.pieces):
            mask = idx == i
            if piece is None:
                out[mask] = INF
            else:
                a, b, c = piece
                xm = xs[mask]
                out[mask] = (a * xm + b) * xm + c
        if len(bps):
            hit = (idx < len(bps)) & (bps[np.minimum(idx, len(bps) - 1)] == xs)
            vals = np.asarray(self.values, dtype=float)
            out[hit] = vals[idx[hit]]
        return out

    def left_limit(self, i):
        return _peval(self.pieces[i], self.breakpoints[i])

    def right_limit(self, i):
        return _peval(self.pieces[i + 1], self.breakpoints[i])

    def interval(self, i):
        lo = self.breakpoints[i - 1] if i > 0 else -INF
        hi = self.breakpoints[i] if i < len(self.breakpoints) else INF
        return lo, hi

    def domain(self):
        parts = []
        for i, p in enumerate(self.pieces):
            if p is not None:
                lo, hi = self.interval(i)
                parts.append(Interval(lo, hi, False, False))
        for b, v in zip(self.breakpoints, self.values):
            if v < INF:
                parts.append(Interval.point(b))
        return SetOnLine(parts)

    @property
    def is_piecewise_linear(self):
        return all(p is None or p[0] == 0.0 for p in self.pieces)

    # ------------------------------------------------------------------
    # structure

    def simplify(self, tol=1e-12):
        """Drop breakpoints across which nothing changes."""
        bps, pieces, values = [], [self.pieces[0]], []
        for i, b in enumerate(self.breakpoints):
            left, right, v = pieces[-1], self.pieces[i + 1], self.values[i]
            if _pieces_close(left, right, tol):
                lim = _peval(left, b)
                if _close(v, lim, tol):
                    continue
            bps.append(b)
            values.append(v)
            pieces.append(right)
        return PlqFunction(tuple(bps), tuple(pieces), tuple(values))

    def is_lsc(self, tol=COEF_TOL):
        for i, v in enumerate(self.values):
            lim = min(self.left_limit(i), self.right_limit(i))
            if v > lim and not _close(v, lim, tol):
                return False
        return True

    def lsc_hull(self):
        vals = tuple(min(v, self.left_limit(i), self.right_limit(i))
                     for i, v in enumerate(self.values))
        return PlqFunction(self.breakpoints, self.pieces, vals)

    def is_convex(self, tol=COEF_TOL):
        return convexity_check(self, tol)

    def isclose(self, other, tol=COEF_TOL):
        """Piece-by-piece comparison after dropping redundant breakpoints."""
        f, g = self.simplify(tol), other.simplify(tol)
        if len(f.breakpoints) != len(g.breakpoints):
            return False
        return (all(_close(u, v, tol) for u, v in zip(f.breakpoints, g.breakpoints))
                and all(_pieces_close(p, q, tol) for p, q in zip(f.pieces, g.pieces))
                and all(_close(u, v, tol) for u, v in zip(f.values, g.values)))

    # ------------------------------------------------------------------
    # elementary transforms

    def reflect(self):
        """x -> f(-x)."""
        bps = tuple(-b for b in reversed(self.breakpoints))
        pieces = tuple(None if p is None else (p[0], -p[1], p[2])
                       for p in reversed(self.pieces))
        return PlqFunction(bps, pieces, tuple(reversed(self.values)))

    def add_linear(self, slope, intercept=0.0):
        return transform_shift_tilt(self, 0.0, -slope) + intercept

    def __add__(self, other):
        if isinstance(other, PlqFunction):
            return add(self, other)
        t = float(other)
        pieces = tuple(None if p is None else (p[0], p[1], p[2] + t) for p in self.pieces)
        return PlqFunction(self.breakpoints, pieces, tuple(v + t for v in self.values))

    __radd__ = __add__

    def scale(self, lam):
        """x -> lam * f(x) for lam > 0."""
        if not lam > 0:
            raise ValueError("scale factor must be positive")
        pieces = tuple(None if p is None else tuple(lam * v for v in p) for p in self.pieces)
        return PlqFunction(self.breakpoints, pieces, tuple(lam * v for v in self.values))

    # ------------------------------------------------------------------
    # serialisation

    def to_json(self):
        return {
            "breakpoints": list(self.breakpoints),
            "pieces": ["inf" if p is None else {"a": p[0], "b": p[1], "c": p[2]}
                       for p in self.pieces],
            "values": [_ext_to_json(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        try:
            bps = [float(b) for b in data.get("breakpoints", [])]
            pieces = []
            for p in data["pieces"]:
                if p == "inf" or p is None:
                    pieces.append(None)
                elif isinstance(p, dict):
                    pieces.append((float(p.get("a", 0.0)), float(p.get("b", 0.0)),
                                   float(p.get("c", 0.0))))
                else:
                    pieces.append(tuple(float(v) for v in p))
            values = data.get("values")
            if values is not None:
                values = [_ext_from_json(v) for v in values]
        except (KeyError, TypeError) as exc:
            raise PlqError(f"malformed PLQ description: {exc}") from exc
        return cls.from_pieces(bps, pieces, values)

    @classmethod
    def parse(cls, text):
        """Parse a builtin name: ``ind[l,u]``, ``sup[l,u]``, ``quad(a,b,c)``, ``abs``."""
        s = text.strip()
        m = re.fullmatch(r"(ind|sup)\s*\[\s*([^,\]]+)\s*,\s*([^\]]+)\s*\]", s)
        if m:
            lo, hi = _num(m.group(2)), _num(m.group(3))
            return cls.indicator(lo, hi) if m.group(1) == "ind" else cls.support(lo, hi)
        m = re.fullmatch(r"quad\s*\(([^)]*)\)", s)
        if m:
            args = [a for a in m.group(1).split(",") if a.strip()]
            if not 1 <= len(args) <= 3:
                raise PlqError(f"quad expects 1 to 3 coefficients: {text!r}")
            coefs = [_num(a) for a in args] + [0.0] * (3 - len(args))
            return cls.quadratic(*coefs)
        if s == "abs":
            return cls.abs()
        if s == "zero":
            return cls.zero()
        raise PlqError(f"unknown PLQ builtin {text!r}")

    def __str__(self):
        parts = []
        for i, p in enumerate(self.pieces):
            lo, hi = self.interval(i)
            body = "+inf" if p is None else f"{p[0]:g}x^2{p[1]:+g}x{p[2]:+g}"
            parts.append(f"({lo:g},{hi:g}): {body}")
            if i < len(self.breakpoints):
                parts.append(f"@{self.breakpoints[i]:g}: {self.values[i]:g}")
        return "PLQ[" + "; ".join(parts) + "]"

    @cached_property
    def _conjugate(self):
        return _conjugate_impl(self)


def _num(text):
    t = text.strip().lower()
    if t in ("inf", "+inf", "oo"):
        return INF
    if t in ("-inf", "-oo"):
        return -INF
    try:
        return float(t)
    except ValueError:
        raise PlqError(f"malformed number {text!r}") from None


# ----------------------------------------------------------------------
# convexity


def convexity_check(f, tol=COEF_TOL):
    """Exact test that f is convex: a >= 0, contiguous domain, monotone slopes."""
    finite = [p is not None for p in f.pieces]
    for p in f.pieces:
        if p is not None and p[0] < -tol:
            return False
    # the set of finite pieces/breakpoints must be an interval
    cells = []
    for i in range(len(f.pieces)):
        cells.append(finite[i])
        if i < len(f.breakpoints):
            cells.append(f.values[i] < INF)
    idx = [k for k, fin in enumerate(cells) if fin]
    if idx and idx[-1] - idx[0] + 1 != len(idx):
        return False
    for i, b in enumerate(f.breakpoints):
        left, right = f.pieces[i], f.pieces[i + 1]
        v = f.values[i]
        if left is not None and right is not None:
            lim_l, lim_r = _peval(left, b), _peval(right, b)
            if not (_close(v, lim_l, tol) and _close(v, lim_r, tol)):
                return False
            if _pderiv(left, b) > _pderiv(right, b) + tol * max(1.0, abs(_pderiv(left, b))):
                return False
        elif left is not None or right is not None:
            lim = _peval(left if left is not None else right, b)
            if v < lim and not _close(v, lim, tol):
                return False
    return True


# ----------------------------------------------------------------------
# sums and transforms


def add(f, g):
    """Exact pointwise sum; raises ImproperError when the domains are disjoint."""
    bps = sorted(set(f.breakpoints) | set(g.breakpoints))
    pieces, values = [], []
    edges = [-INF] + bps + [INF]
    for lo, hi in zip(edges, edges[1:]):
        if lo == -INF and hi == INF:
            mid = 0.0
        elif lo == -INF:
            mid = hi - 1.0
        elif hi == INF:
            mid = lo + 1.0
        else:
            mid = 0.5 * (lo + hi)
        pf = f.pieces[bisect_left(f.breakpoints, mid)]
        pg = g.pieces[bisect_left(g.breakpoints, mid)]
        if pf is None or pg is None:
            pieces.append(None)
        else:
            pieces.append(tuple(u + v for u, v in zip(pf, pg)))
    for b in bps:
        values.append(ext_add(f(b), g(b)))
    try:
        return PlqFunction(tuple(bps), tuple(pieces), tuple(values)).simplify()
    except ImproperError:
        raise ImproperError("sum is identically +inf (domains do not meet)") from None


def transform_shift_tilt(f, p, ps):
    """x -> f(x - p) - ps * x."""
    p, ps = float(p), float(ps)
    bps = tuple(b + p for b in f.breakpoints)
    pieces = []
    for piece in f.pieces:
        if piece is None:
            pieces.append(None)
            continue
        a, b, c = piece
        pieces.append((a, b - 2.0 * a * p - ps, a * p * p - b * p + c))
    values = tuple(v if v == INF else v - ps * bp for v, bp in zip(f.values, bps))
    return PlqFunction(bps, tuple(pieces), values)


# ----------------------------------------------------------------------
# subgradient structure of a convex function


def _walk(f):
    """Domain elements of a convex f in increasing x.

    Yields ("node", x, fx, d_minus, d_plus) for breakpoints in the domain and
    ("piece", lo, hi, coefs) for finite open pieces.
    """
    items = []
    for i, piece in enumerate(f.pieces):
        if piece is not None:
            lo, hi = f.interval(i)
            items.append(("piece", lo, hi, piece))
        if i < len(f.breakpoints) and f.values[i] < INF:
            b = f.breakpoints[i]
            left, right = f.pieces[i], f.pieces[i + 1]
            dm = _pderiv(left, b) if left is not None else -INF
            dp = _pderiv(right, b) if right is not None else INF
            items.append(("node", b, f.values[i], dm, dp))
    return items


def _require_convex(f, what="function"):
    if not convexity_check(f):
        raise NotConvexError(f"{what} is not convex")


def subdifferential(f, x):
    """Convex subdifferential of f at x as a (possibly empty) closed interval."""
    x = float(x)
    fx = f(x)
    if fx == INF:
        return SetOnLine.empty()
    i = bisect_left(f.breakpoints, x)
    if i < len(f.breakpoints) and f.breakpoints[i] == x:
        left, right = f.pieces[i], f.pieces[i + 1]
        dm = _pderiv(left, x) if left is not None else -INF
        dp = _pderiv(right, x) if right is not None else INF
        if left is not None and fx > _peval(left, x) + 1e-12 * max(1.0, abs(fx)):
            return SetOnLine.empty()
        if right is not None and fx > _peval(right, x) + 1e-12 * max(1.0, abs(fx)):
            return SetOnLine.empty()
        if dm > dp:
            if dm - dp > 1e-12 * max(1.0, abs(dm)):
                return SetOnLine.empty()
            dm = dp = _snap(dp)  # smooth node; the two slopes differ only by rounding
        return SetOnLine.interval(dm, dp)
    return SetOnLine.point(_pderiv(f.pieces[i], x))


# ----------------------------------------------------------------------
# conjugation


def conjugate(f):
    """Exact Fenchel conjugate (of the closed convex hull when f is not convex)."""
    return f._conjugate


def _conjugate_impl(f):
    if convexity_check(f) and f.is_lsc():
        return _convex_conjugate(f)
    return _general_conjugate(f)


def _convex_conjugate(f):
    tiles = []
    items = _walk(f)
    for item in items:
        if item[0] == "node":
            _, x, fx, dm, dp = item
            if _wide(dm, dp):
                tiles.append((dm, dp, (0.0, x, -fx)))
        else:
            _, lo, hi, (a, b, c) = item
            if a > 0:
                slo = 2.0 * a * lo + b if math.isfinite(lo) else -INF
                shi = 2.0 * a * hi + b if math.isfinite(hi) else INF
                if _wide(slo, shi):
                    tiles.append((slo, shi, (0.25 / a, -b / (2.0 * a), b * b / (4.0 * a) - c)))
    if not tiles:
        # f is affine on the whole line
        (_, _, _, (a, b, c)), = items
        return PlqFunction((b,), (None, None), (-c,))
    bps, pieces, values = [], [], []
    s_min = tiles[0][0]
    if math.isfinite(s_min):
        bps.append(s_min)
        pieces.append(None)
        values.append(_peval(tiles[0][2], s_min))
    for k, (slo, shi, coefs) in enumerate(tiles):
        pieces.append(coefs)
        if k + 1 < len(tiles):
            bps.append(shi)
            values.append(_peval(coefs, shi))
    s_max = tiles[-1][1]
    if math.isfinite(s_max):
        bps.append(s_max)
        values.append(_peval(tiles[-1][2], s_max))
        pieces.append(None)
    return PlqFunction(tuple(bps), tuple(pieces), tuple(values)).simplify()


def _wide(lo, hi):
    """Slope intervals thinner than rounding noise carry no conjugate piece."""
    if math.isinf(lo) or math.isinf(hi):
        return lo < hi
    return hi - lo > 1e-12 * max(1.0, abs(lo), abs(hi))


def _point_conjugate(x0, v):
    return PlqFunction.quadratic(0.0, x0, -v)


def _general_conjugate(f):
    atoms = []
    for i, piece in enumerate(f.pieces):
        if piece is None:
            continue
        lo, hi = f.interval(i)
        if piece[0] >= 0:
            bps, pieces, vals = [], [], []
            if math.isfinite(lo):
                bps.append(lo)
                pieces.append(None)
                vals.append(_peval(piece, lo))
            pieces.append(piece)
            if math.isfinite(hi):
                bps.append(hi)
                vals.append(_peval(piece, hi))
                pieces.append(None)
            atoms.append(_convex_conjugate(PlqFunction(tuple(bps), tuple(pieces), tuple(vals))))
        else:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ImproperError("conjugate is identically +inf (concave piece on a ray)")
            atoms.append(_point_conjugate(lo, _peval(piece, lo)))
            atoms.append(_point_conjugate(hi, _peval(piece, hi)))
    for b, v in zip(f.breakpoints, f.values):
        if v < INF:
            atoms.append(_point_conjugate(b, v))
    return pointwise_max(atoms)


def _quad_roots(p, q, lo, hi):
    a, b, c = (u - v for u, v in zip(p, q))
    scale = max(1.0, *(abs(u) for u in p), *(abs(u) for u in q))
    roots = []
    if abs(a) <= 1e-14 * scale:
        if abs(b) > 1e-14 * scale:
            roots.append(-c / b)
    else:
        disc = b * b - 4 * a * c
        if disc > 1e-12 * scale * scale:
            r = math.sqrt(disc)
            roots.extend(((-b - r) / (2 * a), (-b + r) / (2 * a)))
    return [r for r in roots if lo + 1e-12 < r < hi - 1e-12]


def pointwise_max(fs):
    """Exact upper envelope of finitely many PLQ functions."""
    fs = list(fs)
    if not fs:
        raise ValueError("pointwise_max of nothing")
    bps = sorted(set().union(*(f.breakpoints for f in fs)))
    edges = [-INF] + bps + [INF]
    out_bps, out_pieces, out_vals = [], [], []
    for k, (lo, hi) in enumerate(zip(edges, edges[1:])):
        if k > 0:
            out_bps.append(lo)
            out_vals.append(max(f(lo) for f in fs))
        probe = _interior_point(lo, hi)
        cand = [f.pieces[bisect_left(f.breakpoints, probe)] for f in fs]
        if any(p is None for p in cand):
            out_pieces.append(None)
            continue
        uniq = sorted(set(cand))
        cuts = sorted({r for i, p in enumerate(uniq) for q in uniq[i + 1:]
                       for r in _quad_roots(p, q, lo, hi)})
        sub_edges = [lo] + cuts + [hi]
        for j, (u, v) in enumerate(zip(sub_edges, sub_edges[1:])):
            if j > 0:
                out_bps.append(u)
                out_vals.append(max(_peval(p, u) for p in uniq))
            t = _interior_point(u, v)
            out_pieces.append(max(uniq, key=lambda p: (_peval(p, t), p)))
    return PlqFunction(tuple(out_bps), tuple(out_pieces), tuple(out_vals)).simplify()


def _interior_point(lo, hi):
    if lo == -INF and hi == INF:
        return 0.0
    if lo == -INF:
        return hi - 1.0
    if hi == INF:
        return lo + 1.0
    return 0.5 * (lo + hi)


def convex_hull(f):
    """Closed convex hull cl co f, computed as the biconjugate."""
    return conjugate(conjugate(f))


def fenchel_young_gap(f, x, xs):
    """f(x) + f*(xs) - x*xs, which is >= 0 and vanishes iff xs lies in df(x)."""
    fx = f(x)
    fs = conjugate(f)(xs)
    if fx == INF or fs == INF:
        return INF
    return fx + fs - float(x) * float(xs)


# ----------------------------------------------------------------------
# minimisation and infimal convolution


@dataclass(frozen=True)
class MinResult:
    value: float
    argmin: SetOnLine | None

    @property
    def attained(self):
        return self.argmin is not None and not self.argmin.is_empty

    @property
    def point(self):
        """Representative minimiser: smallest one, else the finite upper end, else 0."""
        if not self.attained:
            return None
        lo, hi = self.argmin.lo, self.argmin.hi
        if math.isfinite(lo):
            return lo
        if math.isfinite(hi):
            return hi
        return 0.0


def minimize(f, tol=1e-12):
    """Minimum value and minimiser set of a convex PLQ function."""
    _require_convex(f)
    cands = []
    for item in _walk(f):
        if item[0] == "node":
            _, x, fx, dm, dp = item
            if dm <= tol * max(1.0, abs(dm)) and dp >= -tol * max(1.0, abs(dp)):
                cands.append((fx, Interval.point(x)))
        else:
            _, lo, hi, (a, b, c) = item
            if a > 0:
                x0 = -b / (2.0 * a)
                if lo - tol <= x0 <= hi + tol:
                    x0 = min(max(x0, lo), hi)
                    if math.isfinite(x0):
                        cands.append((_peval((a, b, c), x0), Interval.point(x0)))
            elif abs(b) <= tol:
                cands.append((c, Interval(lo, hi, False, False)))
    if not cands:
        return MinResult(-INF, None)
    best = min(v for v, _ in cands)
    keep = [iv for v, iv in cands if v <= best + 1e-12 * max(1.0, abs(best))]
    return MinResult(best, SetOnLine(keep))


def direct_infconv_value(f, g, a):
    """inf_x f(x) + g(a - x) by exact minimisation at the single point a."""
    try:
        phi = add(f, transform_shift_tilt(g.reflect(), a, 0.0))
    except ImproperError:
        return MinResult(INF, None)
    return minimize(phi)


class InfConvolution:
    """Value function of f □ g together with an exactness witness.

    ``value`` is the closed function (f* + g*)*; calling the object at ``a``
    returns the smallest attaining x of inf_x f(x) + g(a - x), or None.
    """

    def __init__(self, f, g):
        _require_convex(f, "first argument")
        _require_convex(g, "second argument")
        self.f, self.g = f, g
        try:
            dual = add(conjugate(f), conjugate(g))
        except ImproperError:
            raise ImproperError("infimal convolution takes the value -inf") from None
        self.value = conjugate(dual)

    def direct(self, a):
        return direct_infconv_value(self.f, self.g, a)

    def __call__(self, a):
        return self.direct(a).point

    def is_exact_at(self, a):
        return self.direct(a).attained

    def is_lsc_at(self, a, tol=COEF_TOL):
        """f □ g is lsc at a iff its value there equals the closure value."""
        direct = self.direct(a).value
        closed = self.value(a)
        return _close(direct, closed, tol) or direct == closed


def inf_convolution(f, g):
    """Return (value function, witness) for f □ g; witness(a) is a minimiser or None."""
    ic = InfConvolution(f, g)
    return ic.value, ic
