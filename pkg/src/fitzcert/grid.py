"""Discrete Legendre-Fenchel transforms and min-plus convolution on uniform grids.

Infinite values are carried as ``inf`` and skipped.  The one-dimensional
transform builds the lower convex hull of the finite samples and reads off
each dual slope's maximiser by a sorted merge, which is linear after the
sort.  When the maximiser of a dual slope sits on the first or last grid node
the supremum is very likely cut off by the box; such values are marked +inf.
"""

from dataclasses import dataclass
import json
import math
import os

import numpy as np

from .extreal import INF, to_json as _ext_to_json, from_json as _ext_from_json

DEFAULT_BOX = 8.0
DEFAULT_N = 257
DEFAULT_TOL = 1e-6


class GridError(ValueError):
    """Malformed grid function or incompatible grids."""


def default_box():
    return float(os.environ.get("FITZCERT_BOX", DEFAULT_BOX))


def default_n():
    return int(os.environ.get("FITZCERT_GRID_N", DEFAULT_N))


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if int(self.n) < 2:
            raise GridError("an axis needs at least two nodes")
        if not float(self.lo) < float(self.hi):
            raise GridError("axis needs lo < hi")
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def symmetric(cls, box=None, n=None):
        box = default_box() if box is None else box
        return cls(-box, box, default_n() if n is None else n)

    @property
    def h(self):
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def nodes(self):
        return np.linspace(self.lo, self.hi, self.n)

    def snap(self, x):
        """Index of the nearest node (ties to the lower index), or -1 when off-grid."""
        t = (np.asarray(x, dtype=float) - self.lo) / self.h
        idx = np.ceil(t - 0.5).astype(int)
        return np.where((idx < 0) | (idx >= self.n), -1, idx)

    def to_json(self):
        return {"lo": self.lo, "hi": self.hi, "n": self.n}


class GridFn:
    """Samples of an extended-real function on a uniform 1D or 2D grid."""

    def __init__(self, axes, values):
        self.axes = tuple(axes)
        values = np.array(values, dtype=float)
        if len(self.axes) not in (1, 2):
            raise GridError("only 1D and 2D grids are supported")
        shape = tuple(a.n for a in self.axes)
        if values.shape != shape:
            raise GridError(f"values have shape {values.shape}, axes need {shape}")
        if np.isnan(values).any() or (values == -INF).any():
            raise GridError("grid values must not be nan or -inf")
        if not np.isfinite(values).any():
            raise GridError("grid function is identically +inf")
        values.setflags(write=False)
        self.values = values

    @property
    def dim(self):
        return len(self.axes)

    @classmethod
    def sample(cls, fn, axes):
        """Sample a callable, a PlqFunction (1D) or a bivariate function (2D)."""
        axes = tuple(axes)
        if len(axes) == 1:
            xs = axes[0].nodes
            if hasattr(fn, "evaluate"):
                vals = fn.evaluate(xs)
            else:
                vals = np.array([fn(x) for x in xs], dtype=float)
        else:
            X, Y = np.meshgrid(axes[0].nodes, axes[1].nodes, indexing="ij")
            if hasattr(fn, "evaluate_grid"):
                vals = fn.evaluate_grid(X, Y)
            else:
                vals = np.vectorize(lambda a, b: float(fn(a, b)))(X, Y)
        return cls(axes, vals)

    def __call__(self, *pt):
        """Nearest-node lookup; +inf off the grid."""
        idx = [int(a.snap(p)) for a, p in zip(self.axes, pt)]
        if any(i < 0 for i in idx):
            return INF
        return float(self.values[tuple(idx)])

    def lookup(self, *coords):
        idx = [a.snap(c) for a, c in zip(self.axes, coords)]
        off = np.zeros(np.shape(idx[0]), dtype=bool)
        for i in idx:
            off |= i < 0
        safe = [np.where(i < 0, 0, i) for i in idx]
        out = self.values[tuple(safe)]
        return np.where(off, INF, out)

    def to_json(self):
        flat = [_ext_to_json(v) for v in self.values.ravel()]
        if self.dim == 2:
            n = self.axes[1].n
            flat = [flat[i:i + n] for i in range(0, len(flat), n)]
        return {"axes": [a.to_json() for a in self.axes], "values": flat}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        axes = [Axis(a["lo"], a["hi"], a["n"]) for a in data["axes"]]
        vals = np.array([[_ext_from_json(v) for v in row] for row in data["values"]]
                        if len(axes) == 2 else [_ext_from_json(v) for v in data["values"]],
                        dtype=float)
        return cls(axes, vals)


# ----------------------------------------------------------------------
# one-dimensional transform


def _lower_hull(x, f):
    """Indices of the lower convex hull of (x, f), collinear points kept."""
    hull = []
    for i in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (x[b] - x[a]) * (f[i] - f[a]) - (f[b] - f[a]) * (x[i] - x[a])
            if cross < 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def _llt_values(x, f, s, boundary_idx, mark_boundary):
    """Discrete conjugate values at dual slopes s (x sorted, f may hold inf)."""
    fin = np.isfinite(f)
    if not fin.any():
        raise GridError("all-infinite input to the discrete transform")
    idx_fin = np.flatnonzero(fin)
    xf, ff = x[fin], f[fin]
    hull = _lower_hull(xf, ff)
    hx, hf = xf[hull], ff[hull]
    nodes = idx_fin[hull]
    out = np.empty(len(s))
    if len(hull) == 1:
        out[:] = s * hx[0] - hf[0]
        if mark_boundary and nodes[0] in boundary_idx:
            out[:] = INF
        return out
    c = np.diff(hf) / np.diff(hx)
    lo = np.searchsorted(c, s, side="left")
    hi = np.searchsorted(c, s, side="right")
    for k in range(len(s)):
        # tie range lo..hi of hull vertices all attain the supremum
        j = lo[k]
        if mark_boundary and nodes[j] in boundary_idx:
            for jj in range(lo[k], hi[k] + 1):
                if nodes[jj] not in boundary_idx:
                    j = jj
                    break
        if mark_boundary and nodes[j] in boundary_idx:
            out[k] = INF
        else:
            out[k] = s[k] * hx[j] - hf[j]
    return out


def slope_range_axis(F, n=None, widen=0.0):
    """Dual axis spanning the slope range of the hull of a 1D grid function."""
    x = F.axes[0].nodes
    fin = np.isfinite(F.values)
    xf, ff = x[fin], F.values[fin]
    hull = _lower_hull(xf, ff)
    if len(hull) < 2:
        lo, hi = -1.0, 1.0
    else:
        c = np.diff(ff[hull]) / np.diff(xf[hull])
        lo, hi = float(c[0]), float(c[-1])
        if hi - lo < 1e-12:
            lo, hi = lo - 1.0, hi + 1.0
    return Axis(lo - widen, hi + widen, n or F.axes[0].n)


def llt_1d(F, dual=None, mark_boundary=True):
    """Discrete conjugate of a 1D grid function on the dual axis."""
    if F.dim != 1:
        raise GridError("llt_1d needs a one-dimensional grid function")
    dual = dual or slope_range_axis(F)
    ax = F.axes[0]
    vals = _llt_values(ax.nodes, F.values, dual.nodes, {0, ax.n - 1}, mark_boundary)
    return GridFn((dual,), vals)


def llt_2d(F, dual_axes=None, mark_boundary=True):
    """Discrete bivariate conjugate by two passes of the 1D transform."""
    if F.dim != 2:
        raise GridError("llt_2d needs a two-dimensional grid function")
    ax, ay = F.axes
    du, dv = dual_axes if dual_axes is not None else (ax, ay)
    xs, ys = ax.nodes, ay.nodes
    # pass 1: G(x, v) = sup_y v y - F(x, y)
    G = np.full((ax.n, dv.n), -INF)
    for i in range(ax.n):
        row = F.values[i]
        if np.isfinite(row).any():
            G[i] = _llt_values(ys, row, dv.nodes, {0, ay.n - 1}, mark_boundary)
    # pass 2: H(u, v) = sup_x u x + G(x, v) = conjugate of -G in x
    H = np.empty((du.n, dv.n))
    bx = {0, ax.n - 1}
    for j in range(dv.n):
        col = -G[:, j]
        if (col == -INF).any():
            H[:, j] = INF
            continue
        H[:, j] = _llt_values(xs, col, du.nodes, bx, mark_boundary)
    return GridFn((du, dv), H)


# ----------------------------------------------------------------------
# min-plus convolution and attainment


def _as_callable(F):
    if isinstance(F, GridFn):
        return F.lookup
    if hasattr(F, "evaluate_grid"):
        return F.evaluate_grid
    if hasattr(F, "evaluate"):
        return F.evaluate
    return np.vectorize(lambda *a: float(F(*a)))


def discrete_infconv(F, G, tilt=None, points=None):
    """H(w) = min over nodes u of F(w - u) + G(u) + tilt . u (direct evaluation).

    ``points`` lists the w at which to evaluate; by default every node of G's
    grid (only sensible for 1D or small 2D grids).
    """
    if F.dim != G.dim:
        raise GridError("incompatible grid dimensions")
    for a, b in zip(F.axes, G.axes):
        if not math.isclose(a.h, b.h, rel_tol=1e-12):
            raise GridError("grids need a common step")
    tilt = np.zeros(G.dim) if tilt is None else np.asarray(tilt, dtype=float)
    nodes = [a.nodes for a in G.axes]
    if G.dim == 1:
        U = (nodes[0],)
    else:
        U = np.meshgrid(*nodes, indexing="ij")
    base = G.values + sum(t * u for t, u in zip(tilt, U))
    if points is None:
        pts = list(zip(*(u.ravel() for u in U)))
    else:
        pts = [tuple(np.atleast_1d(p)) for p in points]
    out = []
    for w in pts:
        fv = F.lookup(*(wi - ui for wi, ui in zip(w, U)))
        out.append(float(np.min(fv + base)))
    if points is None:
        return GridFn(G.axes, np.array(out).reshape(G.values.shape))
    return np.array(out)


@dataclass(frozen=True)
class ProbeResult:
    status: str  # "attained", "boundary" or "infeasible"
    point: tuple | None
    value: float

    @property
    def attained(self):
        return self.status == "attained"


def attainment_probe(F, G, tilt, w, tol=DEFAULT_TOL, refinements=3, axes=None):
    """Search for u minimising F(w - u) + G(u) + tilt . u on a grid, then refine.

    F and G are grid functions or callables on arrays.  The incumbent is
    reported as "boundary" when it lies on the outer grid boundary, because the
    true minimiser may then sit outside the box.  Local refinement only runs
    when both inputs are exact callables.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    dim = len(w)
    if axes is None:
        if isinstance(G, GridFn):
            axes = G.axes
        else:
            axes = tuple(Axis.symmetric() for _ in range(dim))
    tilt = np.zeros(dim) if tilt is None else np.asarray(tilt, dtype=float)
    f, g = _as_callable(F), _as_callable(G)

    def objective(U):
        with np.errstate(invalid="ignore"):
            v = f(*(wi - ui for wi, ui in zip(w, U))) + g(*U) + sum(t * u for t, u in zip(tilt, U))
        return np.where(np.isnan(v), INF, v)

    grids = [a.nodes for a in axes]
    U = np.meshgrid(*grids, indexing="ij")
    vals = objective(U)
    k = np.unravel_index(int(np.argmin(vals)), vals.shape)
    best = float(vals[k])
    if not math.isfinite(best):
        return ProbeResult("infeasible", None, INF)
    if any(ki in (0, a.n - 1) for ki, a in zip(k, axes)):
        return ProbeResult("boundary", tuple(float(U[d][k]) for d in range(dim)), best)
    point = tuple(float(U[d][k]) for d in range(dim))
    if isinstance(F, GridFn) or isinstance(G, GridFn):
        # off-node lookups snap w - u and u independently and can undercut the true minimum
        refinements = 0
    steps = [a.h for a in axes]
    outer = [(a.lo, a.hi) for a in axes]
    for _ in range(refinements):
        local = [np.clip(np.linspace(p - 2 * h, p + 2 * h, 9), lo, hi)
                 for p, h, (lo, hi) in zip(point, steps, outer)]
        U = np.meshgrid(*local, indexing="ij")
        vals = objective(U)
        k = np.unravel_index(int(np.argmin(vals)), vals.shape)
        if float(vals[k]) <= best:
            best = float(vals[k])
            point = tuple(float(U[d][k]) for d in range(dim))
        steps = [h / 4 for h in steps]
    return ProbeResult("attained", point, best)
