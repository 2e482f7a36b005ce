"""Range-membership certificates and surjectivity checks for S(p + .) + T(.).

The central quantity, for representatives h_S of S and h_T of T, is

    V(p*, p) = inf over w = (u*, u) of
               h_S*(p* - u*, p - u) + (h_T^)*(u*, u) + p* u + p u*,

which never drops below p p*.  The query p* in R(S(p + .) + T) is certified
(verdict YES) when the infimum equals p p* and is attained; the two
Fenchel-Young residuals at the minimiser then vanish.  Every verdict is
compared with the exact range computed by ``sum_range_oracle``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from fractions import Fraction
import math

import numpy as np
from scipy.optimize import linprog

from .extreal import INF, to_json as ext_json
from .fitzpatrick import (PolyhedralFn, QuadraticFn, SeparableFn, fitzpatrick_fn,
                          fenchel_representative, add_linear)
from .grid import Axis, attainment_probe, default_box, default_n
from .operators import (GraphError, MonotoneGraph, duality_map, from_subdifferential,
                        maximality_check, normal_cone, random_maximal_graph, range_,
                        sum_range_oracle)
from .plq import (ImproperError, InfConvolution, PlqFunction, conjugate, convexity_check,
                  direct_infconv_value, fenchel_young_gap, minimize, add)
from .polyhedra import PolyhedralSet2D

YES, NO = "YES", "NO"
BOUNDARY = "INCONCLUSIVE-boundary"
RESOLUTION = "INCONCLUSIVE-resolution"
PASS, FAIL, UNKNOWN = "PASS", "FAIL", "UNKNOWN"


class VerifyError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    tol: float = 1e-9
    grid_tol: float = 1e-6
    box: float | None = None
    grid_n: int | None = None
    reps: str = "auto"
    workers: int = 1

    @property
    def axes(self):
        box = default_box() if self.box is None else self.box
        n = default_n() if self.grid_n is None else self.grid_n
        return (Axis(-box, box, n), Axis(-box, box, n))


DEFAULT = Config()


def default_ps_grid():
    return [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]


# ----------------------------------------------------------------------
# representative pairs


@dataclass
class RepPair:
    """Representatives of S and T, their conjugates and the solution route."""

    S: MonotoneGraph
    T: MonotoneGraph
    kind: str
    hS: object
    hT: object
    route: str
    fS_star: object = None
    hT_hat_star: object = None

    def describe(self):
        return {"kind": self.kind, "route": self.route,
                "S": self.hS.to_json(), "T": self.hT.to_json()}


def _normalise(h, other):
    """Bring a separable representative into the form its partner uses."""
    if isinstance(h, SeparableFn) and isinstance(other, PolyhedralFn) and h.is_piecewise_linear:
        return h.to_polyhedral()
    if isinstance(h, SeparableFn) and isinstance(other, QuadraticFn):
        q = h.to_quadratic()
        return q if q is not None else h
    return h


def _route(hS, hT):
    hS, hT = _normalise(hS, hT), _normalise(hT, hS)
    if isinstance(hS, SeparableFn) and isinstance(hT, SeparableFn):
        return hS, hT, "separable"
    if isinstance(hS, PolyhedralFn) and isinstance(hT, PolyhedralFn):
        return hS, hT, "lp"
    if isinstance(hS, QuadraticFn) and isinstance(hT, QuadraticFn):
        return hS, hT, "qp"
    return hS, hT, "grid"


def _build(kind, G, name):
    if kind == "fitzpatrick":
        return fitzpatrick_fn(G, name)
    if kind == "fenchel":
        return fenchel_representative(G, name)
    raise VerifyError(f"unknown representative kind {kind!r}")


def representative_pair(S, T, reps="auto", cfg=DEFAULT):
    """Pick representatives and precompute the conjugates the route needs.

    ``reps`` is "auto", "fitzpatrick", "fenchel" or a pair of the latter two.
    "auto" keeps the Fitzpatrick functions when both are polyhedral or both
    quadratic (exact LP/QP) and otherwise switches both to Fenchel
    representatives, whose univariate parts are handled exactly.
    """
    for name, G in (("S", S), ("T", T)):
        if not maximality_check(G):
            raise GraphError(f"operator {name} is not maximal monotone")
    if reps == "auto":
        hS, hT, route = _route(fitzpatrick_fn(S, "S"), fitzpatrick_fn(T, "T"))
        kind = "fitzpatrick"
        if route == "grid":
            hS, hT, route = _route(fenchel_representative(S, "S"), fenchel_representative(T, "T"))
            kind = "fenchel"
    else:
        kS, kT = (reps, reps) if isinstance(reps, str) else tuple(reps)
        hS, hT, route = _route(_build(kS, S, "S"), _build(kT, T, "T"))
        kind = kS if kS == kT else f"{kS}/{kT}"
    pair = RepPair(S, T, kind, hS, hT, route)
    pair.fS_star = hS.conjugate() if route != "grid" else _grid_conj(hS, cfg)
    hat = hT.hat()
    pair.hT_hat_star = hat.conjugate() if route != "grid" else _grid_conj(hat, cfg)
    return pair


def _grid_conj(h, cfg):
    if isinstance(h, (PolyhedralFn, QuadraticFn, SeparableFn)):
        return h.conjugate()
    return h.conjugate(cfg.axes)


# ----------------------------------------------------------------------
# solvers: min over w of F1(c - w) + F2(w) + lin . w


@dataclass
class _Solve:
    value: float
    witness: tuple | None
    lsc_point: bool | None = None
    lsc_line: bool | None = None
    lsc_basis: str = "structural"
    status: str = "attained"
    args: tuple | None = None  # argument of the first function, c - w, when known exactly


def _lp_terms(terms, lin, dim=2):
    """LP for min sum_i h_i(M_i z + c_i) + lin . z with polyhedral h_i."""
    nt = len(terms)
    nv = dim + nt
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for i, (h, M, c) in enumerate(terms):
        M = np.asarray(M, dtype=float)
        c = np.asarray(c, dtype=float)
        for al, be, ga in h._float[0]:
            a = np.array([al, be])
            row = np.zeros(nv)
            row[:dim] = a @ M
            row[dim + i] = -1.0
            A_ub.append(row)
            b_ub.append(-(a @ c) - ga)
        for a1, a2, b in h._float[1]:
            a = np.array([a1, a2])
            row = np.zeros(nv)
            row[:dim] = a @ M
            A_ub.append(row)
            b_ub.append(b - a @ c)
        for a1, a2, b in h._float[2]:
            a = np.array([a1, a2])
            row = np.zeros(nv)
            row[:dim] = a @ M
            A_eq.append(row)
            b_eq.append(b - a @ c)
    cost = np.concatenate([np.asarray(lin, dtype=float), np.ones(nt)])
    res = linprog(cost, A_ub=np.array(A_ub) if A_ub else None, b_ub=b_ub or None,
                  A_eq=np.array(A_eq) if A_eq else None, b_eq=b_eq or None,
                  bounds=[(None, None)] * nv, method="highs")
    if res.status == 2:
        return INF, None
    if res.status == 3:
        return -INF, None
    if res.status != 0:
        raise VerifyError(f"LP solver failed: {res.message}")
    z = res.x[:dim]
    snapped = _snap_exact(terms, z, lin)
    if snapped is not None and snapped[0] <= res.fun + 1e-9 * (1 + abs(res.fun)):
        return snapped
    return float(res.fun), tuple(float(v) for v in z)


def _snap_exact(terms, z, lin):
    """Round the LP solution to small rationals and re-evaluate exactly."""
    zq = [Fraction(float(v)).limit_denominator(1 << 12) for v in z]
    total = Fraction(0)
    for h, M, c in terms:
        arg = [sum(Fraction(float(M[r][k])) * zq[k] for k in range(len(zq))) + Fraction(float(c[r]))
               for r in range(2)]
        v = h.exact_value(arg)
        if v is None:
            return None
        total += v
    total += sum(Fraction(float(l)) * q for l, q in zip(lin, zq))
    return float(total), tuple(float(q) for q in zq)


def _qp_terms(terms, lin, dim=2):
    """Exact min of a sum of quadratics on affine sets (None witness when unbounded)."""
    H = np.zeros((dim, dim))
    g = np.asarray(lin, dtype=float).copy()
    const = 0.0
    Es, es = [], []
    for q, M, c in terms:
        M = np.asarray(M, dtype=float)
        c = np.asarray(c, dtype=float)
        H += M.T @ q.Q @ M
        g += M.T @ (q.Q @ c + q.l)
        const += 0.5 * c @ q.Q @ c + q.l @ c + q.k
        for row, rhs in zip(q.E, q.e):
            Es.append(row @ M)
            es.append(rhs - row @ c)
    if Es:
        E, e = np.array(Es), np.array(es)
        w0, *_ = np.linalg.lstsq(E, e, rcond=None)
        if np.abs(E @ w0 - e).max() > 1e-9 * (1 + np.abs(e).max()):
            return INF, None
        _, s, vt = np.linalg.svd(E)
        N = vt[int((s > 1e-12).sum()):].T
    else:
        w0, N = np.zeros(dim), np.eye(dim)
    if N.shape[1] == 0:
        w = w0
    else:
        Hr = N.T @ H @ N
        gr = N.T @ (H @ w0 + g)
        y = -np.linalg.pinv(Hr, rcond=1e-12) @ gr
        if np.abs(Hr @ y + gr).max() > 1e-9 * (1 + np.abs(gr).max()):
            return -INF, None
        w = w0 + N @ y
    val = 0.5 * w @ H @ w + g @ w + const
    return float(val), tuple(float(v) for v in w)


def _univariate_part(phi, psi, slope, c):
    """inf_w phi(c - w) + psi(w) + slope w: value, minimiser w, lsc at c, lsc everywhere."""
    k = psi.add_linear(slope)
    res = direct_infconv_value(phi, k, c)
    x = None if not res.attained else float(res.point)
    w = None if x is None else float(c - x)
    try:
        ic = InfConvolution(phi, k)
        lsc_pt = ic.is_lsc_at(c)
        lsc_all = _lsc_everywhere(ic, phi, k)
    except ImproperError:
        lsc_pt = lsc_all = True  # identically -inf on its domain; lsc in the extended sense
    return res.value, (x, w), lsc_pt, lsc_all


def _lsc_everywhere(ic, phi, k):
    """A convex univariate function can only fail lsc at the ends of its domain."""
    d1, d2 = phi.domain(), k.domain()
    if d1.is_empty or d2.is_empty:
        return True
    ends = [d1.lo + d2.lo, d1.hi + d2.hi]
    return all(ic.is_lsc_at(x) for x in ends if math.isfinite(x))


def _solve(pair, F1, F2, c, lin, cfg, route=None):
    route = route or pair.route
    c = np.asarray(c, dtype=float)
    if route == "lp":
        v, w = _lp_terms([(F1, -np.eye(2), c), (F2, np.eye(2), np.zeros(2))], lin)
        return _Solve(v, w, True, True, "polyhedral", "attained" if w else "infeasible")
    if route == "qp":
        v, w = _qp_terms([(F1, -np.eye(2), c), (F2, np.eye(2), np.zeros(2))], lin)
        return _Solve(v, w, True, True, "quadratic", "attained" if w else "infeasible")
    if route == "separable":
        vB, (a, ws), lB_pt, lB_all = _univariate_part(F1.f1, F2.f1, lin[0], c[0])
        vA, (b, wu), lA_pt, lA_all = _univariate_part(F1.f2, F2.f2, lin[1], c[1])
        if vA == INF or vB == INF:
            return _Solve(INF, None, lA_pt and lB_pt, lA_pt and lB_all, "exact-univariate", "infeasible")
        if None in (ws, wu):
            return _Solve(vA + vB, None, lA_pt and lB_pt, lA_pt and lB_all, "exact-univariate",
                          "not-attained")
        return _Solve(vA + vB, (ws, wu), lA_pt and lB_pt, lA_pt and lB_all, "exact-univariate",
                      "attained", (a, b))
    probe = attainment_probe(F1, F2, lin, c, cfg.grid_tol, axes=cfg.axes)
    return _Solve(probe.value, probe.point, None, None, "unknown", probe.status)


# ----------------------------------------------------------------------
# range membership


@dataclass
class RangeCheckReport:
    p: float
    ps: float
    representatives: dict
    value: float
    target: float
    gap: float
    witness: tuple | None
    residuals: tuple | None
    oracle: bool
    verdict: str
    reason: str = ""
    tilt: str = "standard"
    lsc: dict = field(default_factory=dict)
    domain_clause: bool = True

    @property
    def agrees(self):
        """True/False for decided verdicts, None when inconclusive."""
        if self.verdict not in (YES, NO):
            return None
        return (self.verdict == YES) == self.oracle

    @property
    def exact_at_query(self):
        return self.witness is not None and self.verdict == YES

    def to_json(self):
        return {
            "query": {"p": self.p, "ps": self.ps, "tilt": self.tilt},
            "representatives": self.representatives,
            "value": ext_json(self.value),
            "target": self.target,
            "gap": ext_json(self.gap),
            "witness": None if self.witness is None else list(self.witness),
            "residuals": None if self.residuals is None else [ext_json(r) for r in self.residuals],
            "oracle": self.oracle,
            "verdict": self.verdict,
            "agrees": self.agrees,
            "reason": self.reason,
            "conditions": {"domain_clause": self.domain_clause, **self.lsc},
        }


def _domain_clause(pair, p, ps):
    """dom h_S meets dom h_T^ + (p, p*); None when a domain is only sampled."""
    dS = pair.hS.domain_set()
    dT = pair.hT.hat().domain_set()
    if dS is None or dT is None:
        return None
    return dS.intersects(dT.translate((Fraction(p), Fraction(ps))))


def range_membership(S, T, p, ps, reps="auto", cfg=DEFAULT, tilt="standard", pair=None):
    """Decide p* in R(S(p + .) + T) from the representative inf-convolution value."""
    pair = pair or representative_pair(S, T, reps, cfg)
    p, ps = float(p), float(ps)
    target = p * ps
    oracle = sum_range_oracle(S, T, p).contains(ps, 1e-12)
    rep_info = {"kind": pair.kind, "route": pair.route}

    def report(value, witness, residuals, verdict, reason, lsc=None, clause=True):
        gap = value - target if math.isfinite(value) else value
        return RangeCheckReport(p, ps, rep_info, value, target, gap, witness, residuals,
                                oracle, verdict, reason, tilt, lsc or {}, clause)

    clause = _domain_clause(pair, p, ps)
    if clause is False:
        return report(INF, None, None, NO, "domain clause fails: dom h_S misses dom h_T^ + (p, p*)",
                      clause=False)
    c = (ps, p)
    if tilt == "standard":
        sol = _solve(pair, pair.fS_star, pair.hT_hat_star, c, (p, ps), cfg)
        value = sol.value
    elif tilt == "alternative":
        # tilt moved onto the first function: (h_S* - <(p*, p), .>) □ (h_T^)*
        F1 = add_linear(pair.fS_star, -p, -ps)
        sol = _solve(pair, F1, pair.hT_hat_star, c, (0.0, 0.0), cfg)
        value = sol.value + 2 * target if math.isfinite(sol.value) else sol.value
    else:
        raise VerifyError(f"unknown tilt placement {tilt!r}")
    lsc = {"lsc_at_query": sol.lsc_point, "lsc_on_line": sol.lsc_line, "lsc_basis": sol.lsc_basis}
    exact = pair.route != "grid"
    if not exact and value == INF:
        return report(value, None, None, BOUNDARY, "grid conjugates infinite on the sampled box", lsc, clause)
    if value == INF:
        return report(value, None, None, NO, "inf-convolution is +inf at the query", lsc, clause)
    if value == -INF:
        raise VerifyError("inf-convolution value -inf contradicts the Fenchel-Young bound")
    w = sol.witness
    residuals = None
    if w is not None:
        us, u = w
        a, b = sol.args or (ps - us, p - u)
        residuals = (_eval_near(pair.fS_star, a, b) - a * b,
                     _eval_near(pair.hT_hat_star, us, u) + us * u)
    gap = value - target
    tol = cfg.tol * (1 + abs(target)) if exact else cfg.grid_tol * (1 + abs(target))
    if sol.status == "boundary":
        return report(value, w, residuals, BOUNDARY, "minimiser on the truncation box", lsc, clause)
    ok_res = residuals is not None and all(abs(r) <= tol for r in residuals)
    if gap <= tol and w is not None and ok_res:
        return report(value, w, residuals, YES, "value equals p p* and is attained", lsc, clause)
    if not exact:
        # grid conjugates carry truncation error of unknown sign near the box,
        # so a positive gap is not evidence against membership
        return report(value, w, residuals, RESOLUTION, f"grid gap {gap:.3g} above tolerance", lsc, clause)
    why = "infimum not attained" if w is None else f"value exceeds p p* by {gap:.3g}"
    return report(value, w, residuals, NO, why, lsc, clause)


def _eval_near(h, a, b, tol=1e-9):
    """h(a, b), retried at the nearest small rational point when rounding leaves the domain."""
    v = h(a, b)
    if v < INF:
        return v
    qa, qb = (float(Fraction(x).limit_denominator(1 << 16)) for x in (a, b))
    if abs(qa - a) <= tol * (1 + abs(a)) and abs(qb - b) <= tol * (1 + abs(b)):
        return h(qa, qb)
    return v


def _map(fn, items, cfg):
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


@dataclass
class SweepReport:
    p: float
    reports: list
    oracle_range: str
    oracle_is_real_line: bool
    summary: str

    @property
    def all_yes(self):
        return all(r.verdict == YES for r in self.reports)

    @property
    def disagreements(self):
        return [r for r in self.reports if r.agrees is False]

    def to_json(self):
        return {"p": self.p, "oracle_range": self.oracle_range,
                "oracle_is_real_line": self.oracle_is_real_line, "summary": self.summary,
                "reports": [r.to_json() for r in self.reports]}


def surjectivity_sweep(S, T, p, ps_grid, cfg=DEFAULT, reps=None, tilt="standard"):
    """Range membership at every grid p*; surjectivity is only claimed on the grid."""
    pair = representative_pair(S, T, reps or cfg.reps, cfg)
    reports = _map(lambda ps: range_membership(S, T, p, ps, pair=pair, cfg=cfg, tilt=tilt),
                   list(ps_grid), cfg)
    rng = sum_range_oracle(S, T, p)
    n_yes = sum(r.verdict == YES for r in reports)
    if n_yes == len(reports):
        summary = "surjective on tested grid"
    else:
        summary = f"{n_yes}/{len(reports)} grid points certified"
    return SweepReport(float(p), reports, str(rng), rng.is_real_line, summary)


def zero_in_range(S, T, reps=None, cfg=DEFAULT):
    """Query (p, p*) = (0, 0); a YES is followed by the total duality check."""
    rep = range_membership(S, T, 0.0, 0.0, reps or cfg.reps, cfg)
    duality = total_duality_check(S, T, reps, cfg) if rep.verdict == YES else None
    return rep, duality


# ----------------------------------------------------------------------
# total duality


@dataclass
class TotalDualityReport:
    primal_value: float
    dual_value: float
    primal_attained: bool
    dual_attained: bool
    primal_witness: tuple | None
    dual_witness: tuple | None
    eq_S: float | None
    eq_T: float | None
    passed: bool

    def to_json(self):
        d = asdict(self)
        for k in ("primal_value", "dual_value", "eq_S", "eq_T"):
            if d[k] is not None:
                d[k] = ext_json(d[k])
        return d


def _primal(pair):
    """min over z of h_S(z) + h_T^(z): value and a minimiser."""
    hS, hTh = pair.hS, pair.hT.hat()
    if pair.route == "lp":
        return _lp_terms([(hS, np.eye(2), np.zeros(2)), (hTh, np.eye(2), np.zeros(2))], (0.0, 0.0))
    if pair.route == "qp":
        return _qp_terms([(hS, np.eye(2), np.zeros(2)), (hTh, np.eye(2), np.zeros(2))], (0.0, 0.0))
    if pair.route == "separable":
        try:
            m1 = minimize(add(hS.f1, hTh.f1))
            m2 = minimize(add(hS.f2, hTh.f2))
        except ImproperError:
            return INF, None
        if not (m1.attained and m2.attained):
            return m1.value + m2.value, None
        return m1.value + m2.value, (m1.point, m2.point)
    raise VerifyError("total duality needs an exact representative route")


def total_duality_check(S, T, reps=None, cfg=DEFAULT, tol=1e-6):
    """Primal min of h_S + h_T^ against the dual max, and the equalities at the witness."""
    pair = representative_pair(S, T, reps or cfg.reps, cfg)
    if not sum_range_oracle(S, T, 0.0).contains(0.0, 1e-12):
        raise VerifyError("total duality check needs 0 in R(S + T)")
    pv, z = _primal(pair)
    dual = _solve(pair, pair.fS_star, pair.hT_hat_star, (0.0, 0.0), (0.0, 0.0), cfg)
    dv = 0.0 - dual.value
    eq_S = eq_T = None
    if z is not None:
        x, xs = z
        eq_S = _eval_near(pair.hS, x, xs) - x * xs
        eq_T = _eval_near(pair.hT.hat(), x, xs) + x * xs
    passed = (z is not None and dual.witness is not None
              and abs(pv) <= tol and abs(dv) <= tol
              and abs(eq_S) <= tol and abs(eq_T) <= tol)
    return TotalDualityReport(pv, dv, z is not None, dual.witness is not None, z, dual.witness,
                              eq_S, eq_T, passed)


# ----------------------------------------------------------------------
# classical conditions


@dataclass
class RegularityReport:
    conditions: dict
    sets: dict
    chain_consistent: bool
    rc: dict

    def to_json(self):
        return {"conditions": self.conditions, "sets": self.sets,
                "chain_consistent": self.chain_consistent, "rc": self.rc}


def _verdict(flag):
    return UNKNOWN if flag is None else (PASS if flag else FAIL)


def _closed_hull(G):
    """Closure of the convex hull of a polyline graph as a polyhedral set."""
    pts = [(Fraction(x), Fraction(s)) for x, s in G.vertices]
    rays = []
    if G.left is not None:
        rays.append((-Fraction(G.left[0]), -Fraction(G.left[1])))
    if G.right is not None:
        rays.append((Fraction(G.right[0]), Fraction(G.right[1])))
    return PolyhedralSet2D.from_generators(pts, rays)


def _negate_values(G):
    """Graph of -T: reflect the value coordinate."""
    return [(x, -s) for x, s in G.vertices], \
        None if G.left is None else (G.left[0], -G.left[1]), \
        None if G.right is None else (G.right[0], -G.right[1])


def _closed_hull_neg(G):
    verts, left, right = _negate_values(G)
    pts = [(Fraction(x), Fraction(s)) for x, s in verts]
    rays = []
    if left is not None:
        rays.append((-Fraction(left[0]), -Fraction(left[1])))
    if right is not None:
        rays.append((Fraction(right[0]), Fraction(right[1])))
    return PolyhedralSet2D.from_generators(pts, rays)


def classical_conditions(S, T, reps="fitzpatrick", cfg=DEFAULT, ps_grid=None):
    """The literature conditions next to the representative-based ones.

    Conditions on domains are decided exactly on polyhedral sets; the
    inf-convolution conditions are evidenced on the p* grid.
    """
    hS, hT = _build_pair(S, T, reps)
    dS = hS.domain_set()
    dT = hT.domain_set()
    dTh = hT.hat().domain_set()
    conds, sets = {}, {}
    if dS is None or dT is None or dTh is None:
        for k in ("dom_fT_full", "difference_full", "sqri_line", "sqri_origin", "core_origin"):
            conds[k] = UNKNOWN
        chain = True
    else:
        D = dS - dTh
        ri = D.relative_interior()
        full = dT.is_whole_plane
        diff_full = D.is_whole_plane
        sqri_line = ri.contains((0, 0)) and D.contains_line((0, 0), (0, 1))
        sqri_origin = ri.contains((0, 0))
        hull = _closed_hull(S) - _closed_hull_neg(T)
        core = hull.interior()
        conds = {
            "dom_fT_full": _verdict(full),
            "difference_full": _verdict(diff_full),
            "sqri_line": _verdict(sqri_line),
            "sqri_origin": _verdict(sqri_origin),
            "core_origin": _verdict(core.contains((0, 0))),
        }
        sets = {"dom_fS": dS.describe(), "dom_fT": dT.describe(), "dom_fT_hat": dTh.describe(),
                "difference": D.describe(), "sqri_difference": ri.describe(),
                "core_hull_difference": core.describe()}
        chain = (not full or diff_full) and (not diff_full or sqri_line)
    grid = list(ps_grid if ps_grid is not None else default_ps_grid())
    # (RC)-type conditions only ask for some pair of representatives
    sweep = surjectivity_sweep(S, T, 0.0, grid, cfg, reps="auto")
    rbar = all(r.domain_clause is not False and r.lsc.get("lsc_on_line") and r.verdict == YES
               for r in sweep.reports)
    zero = next((r for r in sweep.reports if r.ps == 0.0), None) or range_membership(
        S, T, 0.0, 0.0, "auto", cfg)
    rtilde = bool(zero.domain_clause is not False and zero.lsc.get("lsc_on_line") and zero.verdict == YES)
    rc = {
        "RC_bar": "grid-YES" if rbar else "grid-NO",
        "RC_tilde": YES if rtilde else NO,
        "ps_grid": grid,
        "witnesses": {str(r.ps): None if r.witness is None else list(r.witness) for r in sweep.reports},
        "oracle_range": sweep.oracle_range,
    }
    if conds.get("sqri_line") == PASS and not rbar:
        chain = False
    return RegularityReport(conds, sets, chain, rc)


def _build_pair(S, T, reps):
    if reps == "auto":
        p = representative_pair(S, T, "auto")
        return p.hS, p.hT
    kS, kT = (reps, reps) if isinstance(reps, str) else tuple(reps)
    return _build(kS, S, "S"), _build(kT, T, "T")


# ----------------------------------------------------------------------
# single operator, normal cones, subdifferentials


@dataclass
class SingleReport:
    ps: float
    verdict: str
    witness: float | None
    gap: float | None
    oracle: bool

    @property
    def agrees(self):
        return (self.verdict == YES) == self.oracle

    def to_json(self):
        return {"ps": self.ps, "verdict": self.verdict, "witness": self.witness,
                "gap": None if self.gap is None else ext_json(self.gap),
                "oracle": self.oracle, "agrees": self.agrees}


def single_surjectivity(S, reps=None, ps_grid=None, cfg=DEFAULT):
    """p* in R(S) iff some x has p* in the subdifferential of h_S*(p*, .) at x."""
    kind = reps or cfg.reps
    if kind == "auto":
        h = fitzpatrick_fn(S, "S")
        if not isinstance(h, (PolyhedralFn, QuadraticFn)):
            h = fenchel_representative(S, "S")
    else:
        h = _build(kind, S, "S")
    hs = h.conjugate()
    rng = range_(S)
    out = []
    for ps in (ps_grid if ps_grid is not None else default_ps_grid()):
        ps = float(ps)
        k = hs.restrict_first(ps)
        oracle = rng.contains(ps, 1e-12)
        if k is None:
            out.append(SingleReport(ps, NO, None, None, oracle))
            continue
        m = minimize(k.add_linear(-ps))
        if not m.attained:
            out.append(SingleReport(ps, NO, None, None, oracle))
            continue
        x = m.point
        gap = fenchel_young_gap(k, x, ps)
        verdict = YES if gap <= cfg.tol * (1 + abs(ps * x)) else NO
        out.append(SingleReport(ps, verdict, x, gap, oracle))
    return out


def normal_cone_driver(S, U, p, ps_grid, cfg=DEFAULT):
    """Range of S(p + .) + N_U using delta_U + sigma_U for the normal cone."""
    lo, hi = U
    T = normal_cone(lo, hi)
    return surjectivity_sweep(S, T, p, ps_grid, cfg, reps=(_kind_for(S), "fenchel"))


def _kind_for(S):
    h = fitzpatrick_fn(S)
    return "fitzpatrick" if isinstance(h, PolyhedralFn) else "fenchel"


@dataclass
class SubdiffReport:
    ps: float
    verdict: str
    reason: str
    primal_lsc: bool | None
    primal_exact: bool | None
    dual_lsc: bool | None
    dual_exact: bool | None
    oracle: bool

    @property
    def agrees(self):
        return (self.verdict == YES) == self.oracle

    def to_json(self):
        return {**asdict(self), "agrees": self.agrees}


def subdiff_driver(f, g, p, ps_grid, cfg=DEFAULT):
    """Both univariate conditions for p* in R(df(p + .) + dg), plq calculus only.

    f □ (g^ + p* .) must be lsc and exact at p, and f* □ (g* + p .) lsc and
    exact at p*, where g^(x) = g(-x).
    """
    for name, h in (("f", f), ("g", g)):
        if not convexity_check(h) or not h.is_lsc():
            raise VerifyError(f"{name} must be convex and lsc")
    p = float(p)
    dom_ok = f.domain().intersects(g.domain().shift(p))
    S, T = from_subdifferential(f), from_subdifferential(g)
    fs, gs = conjugate(f), conjugate(g)
    out = []
    for ps in ps_grid:
        ps = float(ps)
        oracle = sum_range_oracle(S, T, p).contains(ps, 1e-12)
        if not dom_ok:
            out.append(SubdiffReport(ps, NO, "dom f misses p + dom g", None, None, None, None, oracle))
            continue
        if not fs.domain().intersects((-gs.domain()).shift(ps)):
            out.append(SubdiffReport(ps, NO, "dom f* misses p* - dom g*", None, None, None, None, oracle))
            continue
        vals = []
        for phi, psi, at in ((f, g.reflect().add_linear(ps), p), (fs, gs.add_linear(p), ps)):
            try:
                ic = InfConvolution(phi, psi)
                lsc = ic.is_lsc_at(at)
            except ImproperError:
                lsc = True
            exact = direct_infconv_value(phi, psi, at).attained
            vals += [lsc, exact]
        verdict = YES if all(vals) else NO
        reason = "both inf-convolutions lsc and exact" if verdict == YES else "a condition fails"
        out.append(SubdiffReport(ps, verdict, reason, *vals, oracle))
    return out


# ----------------------------------------------------------------------
# randomised suite


@dataclass
class FuzzReport:
    seed: int
    count: int
    reports: list
    disagreements: int
    inconclusive: int
    duality: list

    @property
    def inconclusive_rate(self):
        return self.inconclusive / max(1, self.count)

    def to_json(self):
        return {"seed": self.seed, "count": self.count, "disagreements": self.disagreements,
                "inconclusive": self.inconclusive,
                "inconclusive_rate": self.inconclusive_rate,
                "duality_checked": len(self.duality),
                "duality_failed": sum(not d.passed for d in self.duality),
                "instances": [r.to_json() for r in self.reports]}


def random_instance(rng):
    S = random_maximal_graph(rng)
    T = random_maximal_graph(rng)
    p = 0.5 * int(rng.integers(-6, 7))
    ps = 0.5 * int(rng.integers(-8, 9))
    return S, T, p, ps


def fuzz(seed, count=200, cfg=DEFAULT, reps=None, check_duality=True):
    """Seeded random pairs: verdicts against the oracle, plus total duality where 0 is in range."""
    rng = np.random.default_rng(seed)
    instances = [random_instance(rng) for _ in range(count)]

    def run(inst):
        S, T, p, ps = inst
        rep = range_membership(S, T, p, ps, reps or cfg.reps, cfg)
        dual = None
        if check_duality and sum_range_oracle(S, T, 0.0).contains(0.0, 1e-12):
            dual = total_duality_check(S, T, reps, cfg)
        return rep, dual

    results = _map(run, instances, cfg)
    reports = [r for r, _ in results]
    duality = [d for _, d in results if d is not None]
    dis = sum(r.agrees is False for r in reports)
    inc = sum(r.agrees is None for r in reports)
    return FuzzReport(seed, count, reports, dis, inc, duality)
