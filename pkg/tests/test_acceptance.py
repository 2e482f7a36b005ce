"""Acceptance gate: one pass/fail line per criterion, printed in the pytest summary.

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE, example1, operator_fixtures  # noqa: E402
from fitzcert.fitzpatrick import (PolyhedralFn, add_linear, fitzpatrick_fn, graph_sample,
                                  infconv_polyhedral, psi_T, representative_validity_check)
from fitzcert.grid import Axis, GridFn, llt_1d
from fitzcert.operators import (antiderivative, duality_map, from_subdifferential,
                                normal_cone, random_maximal_graph, sum_range_oracle)
from fitzcert.plq import ImproperError, InfConvolution, PlqFunction, conjugate
from fitzcert.polyhedra import PolyhedralSet2D
from fitzcert.verify import (YES, classical_conditions, fuzz, subdiff_driver,
                             surjectivity_sweep)

INF = math.inf
PS_GRID_1 = [-2, -1, -0.5, 0, 0.5, 1, 2]


def record(k, ok, detail):
    ACCEPTANCE[k] = (bool(ok), detail)
    return ok


# frozen expected descriptions (coordinates z = (z1, z2) in each function's own order)
PHI_S = PolyhedralFn.indicator(ineqs=[((-1, 0), 0), ((0, 1), 0)])  # x >= 0, x* <= 0
PHI_T = PolyhedralFn.indicator(eqs=[((1, 0), 0)])                  # x = 0
PHI_S_STAR = PolyhedralFn.indicator(ineqs=[((1, 0), 0), ((0, -1), 0)])  # x* <= 0, x >= 0
PHI_T_STAR = PolyhedralFn.indicator(eqs=[((0, 1), 0)])             # (x*, x) with x = 0
INFCONV = PolyhedralFn.indicator(ineqs=[((0, -1), 0)])             # (x*, x) with x >= 0


def test_criterion_1_example1_exact():
    t0 = time.perf_counter()
    S, T = example1()
    phS, phT = fitzpatrick_fn(S), fitzpatrick_fn(T)
    checks = {
        "phi_S": phS.same_function(PHI_S),
        "phi_T": phT.same_function(PHI_T),
        "phi_S*": phS.conjugate().same_function(PHI_S_STAR),
        "phi_T*": phT.conjugate().same_function(PHI_T_STAR),
    }
    hat_star = phT.hat().conjugate()
    for ps in PS_GRID_1:
        h = infconv_polyhedral(phS.conjugate(), add_linear(hat_star, 0, ps))
        checks[f"infconv p*={ps}"] = h.same_function(INFCONV)
    elapsed = time.perf_counter() - t0
    ok = all(checks.values()) and elapsed < 1.0
    failed = [k for k, v in checks.items() if not v]
    record(1, ok, f"N[0,inf) and N{{0}}: exact polyhedral forms; failed={failed} runtime={elapsed:.3f}s")
    assert all(checks.values()), failed
    assert elapsed < 1.0


def test_criterion_2_example1_conditions():
    t0 = time.perf_counter()
    S, T = example1()
    rep = classical_conditions(S, T, "fitzpatrick", ps_grid=PS_GRID_1)
    c = rep.conditions
    expected_ri = PolyhedralSet2D.from_constraints([((-1, 0), 0)]).relative_interior()
    elapsed = time.perf_counter() - t0
    checks = {
        "dom f_T full FAIL": c["dom_fT_full"] == "FAIL",
        "difference FAIL": c["difference_full"] == "FAIL",
        "sqri FAIL": c["sqri_line"] == "FAIL",
        "core FAIL": c["core_origin"] == "FAIL",
        "sqri set": rep.sets["sqri_difference"] == expected_ri.describe() == "(0, +inf) x R",
        "core set": rep.sets["core_hull_difference"] == "(0, +inf) x R",
        "RC-bar YES": rep.rc["RC_bar"] == "grid-YES",
        "RC-tilde YES": rep.rc["RC_tilde"] == "YES",
        "oracle R": sum_range_oracle(S, T, 0.0).is_real_line,
    }
    ok = all(checks.values()) and elapsed < 1.0
    record(2, ok, f"condition table; failed={[k for k, v in checks.items() if not v]} "
                  f"runtime={elapsed:.3f}s")
    assert all(checks.values())
    assert elapsed < 1.0


def test_criterion_3_rockafellar():
    t0 = time.perf_counter()
    J = duality_map()
    ops = {
        "N[0,inf)": normal_cone(0.0, INF),
        "d|x|": from_subdifferential(PlqFunction.abs()),
        "d(x^2/2)": from_subdifferential(PlqFunction.quadratic(0.5)),
        "N[-1,1]": normal_cone(-1.0, 1.0),
    }
    grid = list(np.linspace(-5, 5, 21))
    worst_gap = worst_res = 0.0
    all_yes = oracle_ok = True
    for S in ops.values():
        sw = surjectivity_sweep(S, J, 0.0, grid)
        all_yes &= sw.all_yes
        oracle_ok &= sw.oracle_is_real_line
        for r in sw.reports:
            worst_gap = max(worst_gap, abs(r.gap))
            worst_res = max(worst_res, *(abs(x) for x in r.residuals))
    elapsed = time.perf_counter() - t0
    ok = all_yes and oracle_ok and worst_gap <= 1e-6 and worst_res <= 1e-6 and elapsed < 5
    record(3, ok, f"all YES={all_yes} oracle R={oracle_ok} max|gap|={worst_gap:.2e} "
                  f"max residual={worst_res:.2e} runtime={elapsed:.2f}s")
    assert ok


# C pins the constant of the O(h) bound; errors are measured on interior dual nodes
LLT_C = 1.0
LLT_CASES = {
    "x^2/2": (PlqFunction.quadratic(0.5), Axis(-4.0, 4.0, 129)),
    "|x|": (PlqFunction.abs(), Axis(-0.999, 0.999, 129)),
    "ind[0,1]": (PlqFunction.indicator(0.0, 1.0), Axis(-4.0, 4.0, 129)),
}


def _llt_error(f, dual, n, box=8.0):
    ax = Axis(-box, box, n)
    F = GridFn.sample(f, (ax,))
    G = llt_1d(F, dual, mark_boundary=False)
    exact = conjugate(f).evaluate(dual.nodes)
    inner = slice(1, -1)
    return float(np.max(np.abs(G.values[inner] - exact[inner]))), ax.h


def test_criterion_4_llt_convergence():
    lines, ok = [], True
    for name, (f, dual) in LLT_CASES.items():
        errs = {}
        for n in (129, 257, 513):
            err, h = _llt_error(f, dual, n)
            errs[n] = err
            ok &= err <= LLT_C * h
        ok &= errs[513] <= 0.55 * errs[257]
        lines.append(f"{name}: " + ", ".join(f"n={n} err={e:.2e}" for n, e in errs.items()))
    record(4, ok, "; ".join(lines))
    assert ok


def _plq_suite(n=50, seed=5):
    rng = np.random.default_rng(seed)
    return [antiderivative(random_maximal_graph(rng)) for _ in range(n)]


def test_criterion_5_exact_kernel():
    suite = _plq_suite()
    biconj = [conjugate(conjugate(f)).isclose(f, 1e-9) for f in suite]
    pts = np.linspace(-5, 5, 101)
    worst = 0.0
    direct_ok = True
    for f, g in zip(suite[::2], suite[1::2]):
        try:
            ic = InfConvolution(f, g)
        except ImproperError:
            continue  # f* + g* improper: the inf-convolution is -inf, identity not applicable
        lhs = conjugate(ic.value).evaluate(pts)
        rhs = conjugate(f).evaluate(pts) + conjugate(g).evaluate(pts)
        both = np.isfinite(lhs) & np.isfinite(rhs)
        direct_ok &= bool(np.array_equal(np.isfinite(lhs), np.isfinite(rhs)))
        if both.any():
            worst = max(worst, float(np.max(np.abs(lhs[both] - rhs[both]))))
        for a in pts[::10]:
            d = ic.direct(a).value
            v = ic.value(a)
            direct_ok &= (d == v) or abs(d - v) <= 1e-9 * max(1, abs(v))
    ok = all(biconj) and worst <= 1e-9 and direct_ok
    record(5, ok, f"biconjugation {sum(biconj)}/{len(biconj)}; inf-conv identity max err "
                  f"{worst:.1e}; direct=closed values {direct_ok}")
    assert ok


def test_criterion_6_representatives():
    ax = Axis.symmetric(8.0, 257)
    X, Xs = np.meshgrid(ax.nodes, ax.nodes, indexing="ij")
    fails = []
    for name, T in operator_fixtures().items():
        phi = fitzpatrick_fn(T)
        rep = representative_validity_check(phi, T, (ax, ax))
        if not (rep.dominates_c and rep.equality_on_graph and rep.equality_only_near_graph):
            fails.append(f"{name}: {rep}")
        psi = psi_T(T, graph_sample(T, 8.0))
        V, W = phi.evaluate_grid(X, Xs), psi.evaluate_grid(X, Xs)
        if np.any(V > W + 1e-9 * (1 + np.abs(W))):
            fails.append(f"{name}: phi > psi(sample)")
    phiJ = fitzpatrick_fn(duality_map())
    errJ = float(np.max(np.abs(phiJ.evaluate_grid(X, Xs) - (X + Xs) ** 2 / 4)))
    if errJ > 1e-9:
        fails.append(f"phi_J error {errJ}")
    ok = not fails
    record(6, ok, f"{len(operator_fixtures())} operator fixtures on 257^2 nodes; "
                  f"phi_J err={errJ:.1e}; failures={fails}")
    assert ok, fails


@pytest.fixture(scope="module")
def fuzz_run():
    t0 = time.perf_counter()
    fr = fuzz(7, 200)
    return fr, time.perf_counter() - t0


def test_criterion_7_fuzz(fuzz_run):
    fr, elapsed = fuzz_run
    ok = fr.disagreements == 0 and fr.inconclusive_rate <= 0.10 and elapsed < 60
    record(7, ok, f"200 instances seed 7: disagreements={fr.disagreements} "
                  f"inconclusive={100 * fr.inconclusive_rate:.1f}% runtime={elapsed:.1f}s")
    assert ok


def test_criterion_8_total_duality(fuzz_run):
    fr, _ = fuzz_run
    bad = [d for d in fr.duality if not d.passed]
    worst = max((max(abs(d.primal_value), abs(d.dual_value), abs(d.eq_S), abs(d.eq_T))
                 for d in fr.duality if d.passed), default=0.0)
    ok = fr.duality and not bad
    record(8, ok, f"{len(fr.duality)} instances with 0 in R(S+T); failed={len(bad)} "
                  f"max deviation={worst:.1e}")
    assert ok


def test_criterion_9_two_sided_univariate():
    grid = [-3, -2, -1, -0.5, 0, 0.5, 1, 2, 3]
    pairs = {
        "(ind[0,inf), ind{0})": (PlqFunction.indicator(0.0, INF), PlqFunction.indicator(0.0, 0.0)),
        "(x^2/2, x^2/2)": (PlqFunction.quadratic(0.5), PlqFunction.quadratic(0.5)),
    }
    mismatches = []
    for name, (f, g) in pairs.items():
        uni = subdiff_driver(f, g, 0.0, grid)
        sw = surjectivity_sweep(from_subdifferential(f), from_subdifferential(g), 0.0, grid)
        for u, b in zip(uni, sw.reports):
            if not ((u.verdict == YES) == (b.verdict == YES) == u.oracle):
                mismatches.append((name, u.ps))
    ok = not mismatches
    record(9, ok, f"univariate vs bivariate vs oracle on {len(grid)} points x 2 pairs; "
                  f"mismatches={mismatches}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
