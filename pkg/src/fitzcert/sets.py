"""Finite unions of intervals on the real line."""

from dataclasses import dataclass
import math

from .extreal import INF, to_json, from_json


@dataclass(frozen=True)
class Interval:
    """A nonempty interval; infinite ends are always open."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be nan")
        if lo > hi:
            raise ValueError(f"empty interval: lo={lo} > hi={hi}")
        lo_closed = self.lo_closed and lo != -INF
        hi_closed = self.hi_closed and hi != INF
        if lo == hi and not (lo_closed and hi_closed):
            raise ValueError("degenerate interval must be a closed point")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "lo_closed", lo_closed)
        object.__setattr__(self, "hi_closed", hi_closed)

    @classmethod
    def point(cls, x):
        return cls(x, x, True, True)

    @classmethod
    def closed(cls, lo, hi):
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo, hi):
        return cls(lo, hi, False, False)

    @classmethod
    def make(cls, lo, hi, lo_closed, hi_closed):
        """Like the constructor but returns None for an empty result."""
        if lo > hi:
            return None
        if lo == hi and not (lo_closed and hi_closed and math.isfinite(lo)):
            return None
        return cls(lo, hi, lo_closed, hi_closed)

    @property
    def is_point(self):
        return self.lo == self.hi

    def contains(self, x, tol=0.0):
        if x < self.lo - tol or x > self.hi + tol:
            return False
        if tol == 0.0:
            if x == self.lo and not self.lo_closed:
                return False
            if x == self.hi and not self.hi_closed:
                return False
        return True

    def __add__(self, other):
        lo = self.lo + other.lo
        hi = self.hi + other.hi
        return Interval(lo, hi, self.lo_closed and other.lo_closed,
                        self.hi_closed and other.hi_closed)

    def __neg__(self):
        return Interval(-self.hi, -self.lo, self.hi_closed, self.lo_closed)

    def shift(self, t):
        return Interval(self.lo + t, self.hi + t, self.lo_closed, self.hi_closed)

    def __str__(self):
        if self.is_point:
            return "{%s}" % _fmt(self.lo)
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{_fmt(self.lo)}, {_fmt(self.hi)}{right}"

    def to_json(self):
        return [to_json(self.lo), to_json(self.hi), self.lo_closed, self.hi_closed]

    @classmethod
    def from_json(cls, data):
        lo, hi, lc, hc = data
        return cls(from_json(lo), from_json(hi), bool(lc), bool(hc))


def _fmt(x):
    if x == INF:
        return "+inf"
    if x == -INF:
        return "-inf"
    return f"{x:g}"


def _touch(a, b):
    """True when sorted intervals a, b (a.lo <= b.lo) overlap or join without a gap."""
    if b.lo < a.hi:
        return True
    if b.lo == a.hi:
        return a.hi_closed or b.lo_closed
    return False


class SetOnLine:
    """Sorted, pairwise disjoint, maximally merged union of intervals."""

    __slots__ = ("components",)

    def __init__(self, intervals=()):
        items = sorted((iv for iv in intervals if iv is not None),
                       key=lambda iv: (iv.lo, not iv.lo_closed))
        merged = []
        for iv in items:
            if merged and _touch(merged[-1], iv):
                last = merged[-1]
                if iv.hi > last.hi:
                    hi, hc = iv.hi, iv.hi_closed
                elif iv.hi == last.hi:
                    hi, hc = last.hi, last.hi_closed or iv.hi_closed
                else:
                    hi, hc = last.hi, last.hi_closed
                lc = last.lo_closed or (iv.lo == last.lo and iv.lo_closed)
                merged[-1] = Interval(last.lo, hi, lc, hc)
            else:
                merged.append(iv)
        self.components = tuple(merged)

    @classmethod
    def empty(cls):
        return cls()

    @classmethod
    def real_line(cls):
        return cls([Interval(-INF, INF, False, False)])

    @classmethod
    def point(cls, x):
        return cls([Interval.point(x)])

    @classmethod
    def interval(cls, lo, hi, lo_closed=True, hi_closed=True):
        return cls([Interval.make(lo, hi, lo_closed, hi_closed)])

    @property
    def is_empty(self):
        return not self.components

    @property
    def is_real_line(self):
        return (len(self.components) == 1 and self.components[0].lo == -INF
                and self.components[0].hi == INF)

    @property
    def is_interval(self):
        return len(self.components) == 1

    @property
    def lo(self):
        return self.components[0].lo if self.components else INF

    @property
    def hi(self):
        return self.components[-1].hi if self.components else -INF

    def contains(self, x, tol=0.0):
        return any(iv.contains(x, tol) for iv in self.components)

    __contains__ = contains

    def union(self, other):
        return SetOnLine(self.components + other.components)

    __or__ = union

    def __add__(self, other):
        return SetOnLine(a + b for a in self.components for b in other.components)

    def __neg__(self):
        return SetOnLine(-iv for iv in self.components)

    def shift(self, t):
        return SetOnLine(iv.shift(t) for iv in self.components)

    def intersects(self, other):
        for a in self.components:
            for b in other.components:
                lo, lc = max((a.lo, a.lo_closed), (b.lo, b.lo_closed),
                             key=lambda e: (e[0], not e[1]))
                hi, hc = min((a.hi, a.hi_closed), (b.hi, b.hi_closed),
                             key=lambda e: (e[0], e[1]))
                if Interval.make(lo, hi, lc, hc) is not None:
                    return True
        return False

    def __eq__(self, other):
        if not isinstance(other, SetOnLine):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def isclose(self, other, tol=1e-9):
        if len(self.components) != len(other.components):
            return False
        for a, b in zip(self.components, other.components):
            if (a.lo_closed, a.hi_closed) != (b.lo_closed, b.hi_closed):
                return False
            for u, v in ((a.lo, b.lo), (a.hi, b.hi)):
                if math.isinf(u) or math.isinf(v):
                    if u != v:
                        return False
                elif abs(u - v) > tol:
                    return False
        return True

    def __repr__(self):
        return f"SetOnLine({str(self)})"

    def __str__(self):
        if not self.components:
            return "{}"
        if self.is_real_line:
            return "R"
        return " u ".join(str(iv) for iv in self.components)

    def to_json(self):
        return [iv.to_json() for iv in self.components]

    @classmethod
    def from_json(cls, data):
        return cls(Interval.from_json(d) for d in data)
