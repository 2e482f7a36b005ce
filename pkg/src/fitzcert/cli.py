"""Scenario runner: JSON scenario in, deterministic JSON or text report out."""

import argparse
from dataclasses import dataclass, field, replace
import json
import math
import sys

from .extreal import from_json as ext_from_json
from .grid import default_box, default_n
from .operators import GraphError, MonotoneGraph, parse_operator
from .plq import ImproperError, NotConvexError, PlqError, PlqFunction
from . import verify

SCENARIO_SCHEMA = "fitzcert-scenario/1"
REPORT_SCHEMA = "fitzcert-report/1"

TASKS = ("range", "sweep", "zero", "single", "normal-cone", "subdiff", "conditions",
         "total-duality", "fuzz")
OPERATOR_HEADS = ("J", "ncone", "subdiff")
PARAM_KEYS = ("S", "T", "f", "g", "U", "p", "ps", "ps_grid", "grid", "tol", "reps",
              "seed", "count", "tilt")


class ScenarioError(ValueError):
    """Invalid scenario; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass
class Scenario:
    task: str
    definitions: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    name: str = ""


# ----------------------------------------------------------------------
# parsing


def _number(value, path):
    if isinstance(value, bool):
        raise ScenarioError(path, f"malformed number {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return ext_from_json(value)
        except ValueError:
            pass
    raise ScenarioError(path, f"malformed number {value!r}")


def _is_operator_text(text):
    s = text.strip()
    return s == "J" or s.startswith("ncone") or s.startswith("subdiff")


def parse_scenario(text):
    """Validate scenario JSON; errors name the field (or line and column)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    if not isinstance(data, dict):
        raise ScenarioError("", "scenario must be a JSON object")
    schema = data.get("schema", SCENARIO_SCHEMA)
    if schema != SCENARIO_SCHEMA:
        raise ScenarioError("schema", f"unsupported schema {schema!r}")
    task = data.get("task")
    if not task:
        raise ScenarioError("task", "task required")
    if task not in TASKS:
        raise ScenarioError("task", f"unknown task {task!r}; expected one of {', '.join(TASKS)}")
    defs = data.get("definitions", {})
    if not isinstance(defs, dict):
        raise ScenarioError("definitions", "must be an object of name -> builtin")
    for name, body in defs.items():
        _check_definition(name, body)
    unknown = set(data) - set(PARAM_KEYS) - {"schema", "task", "definitions", "name"}
    if unknown:
        raise ScenarioError(sorted(unknown)[0], "unknown field")
    params = {k: data[k] for k in PARAM_KEYS if k in data}
    sc = Scenario(task, dict(defs), params, str(data.get("name", "")))
    _validate(sc)
    return sc


def _check_definition(name, body):
    path = f"definitions.{name}"
    if isinstance(body, dict):
        try:
            if "graph" in body:
                MonotoneGraph.from_json(body["graph"])
            elif "plq" in body:
                PlqFunction.from_json(body["plq"])
            else:
                raise ScenarioError(path, "object definitions need a 'graph' or 'plq' key")
        except (GraphError, PlqError, ImproperError, KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(path, str(exc)) from None
        return
    if not isinstance(body, str):
        raise ScenarioError(path, "definition must be a builtin string or an object")
    s = body.strip()
    head = s.split("(")[0].split("[")[0].strip()
    if _is_operator_text(s):
        if s.startswith("subdiff"):
            inner = s[len("subdiff"):].strip()
            if not (inner.startswith("(") and inner.endswith(")")):
                raise ScenarioError(path, f"malformed builtin {body!r}")
            return
        try:
            parse_operator(s)
        except (GraphError, PlqError, ValueError) as exc:
            raise ScenarioError(path, str(exc)) from None
        return
    try:
        PlqFunction.parse(s)
    except (PlqError, ValueError) as exc:
        if head not in ("ind", "sup", "quad", "abs", "zero"):
            raise ScenarioError(path, f"unknown builtin {body!r}") from None
        raise ScenarioError(path, str(exc)) from None


def _require(sc, key):
    if key not in sc.params:
        raise ScenarioError(key, f"required for task {sc.task!r}")
    return sc.params[key]


def _check_ref(sc, key, kind):
    ref = _require(sc, key)
    if not isinstance(ref, str):
        raise ScenarioError(key, "must be a name or a builtin string")
    if ref in sc.definitions:
        body = sc.definitions[ref]
        if isinstance(body, str):
            _check_subdiff_ref(sc, f"definitions.{ref}", body)
        return
    if ref.isidentifier() and ref not in ("J", "abs", "zero"):
        raise ScenarioError(key, f"dangling reference {ref!r}")
    _check_definition(key, ref)
    _check_subdiff_ref(sc, key, ref)


def _check_subdiff_ref(sc, path, text):
    s = text.strip()
    if s.startswith("subdiff"):
        inner = s[len("subdiff"):].strip()[1:-1].strip()
        if inner.isidentifier() and inner not in ("abs", "zero"):
            if inner not in sc.definitions:
                raise ScenarioError(path, f"dangling reference {inner!r}")


def _validate(sc):
    t = sc.task
    p = sc.params
    if t in ("range", "sweep", "zero", "conditions", "total-duality", "normal-cone", "single"):
        _check_ref(sc, "S", "operator")
    if t in ("range", "sweep", "zero", "conditions", "total-duality"):
        _check_ref(sc, "T", "operator")
    if t == "subdiff":
        _check_ref(sc, "f", "function")
        _check_ref(sc, "g", "function")
    if t in ("range",):
        _number(_require(sc, "p"), "p")
        _number(_require(sc, "ps"), "ps")
    if "p" in p:
        _number(p["p"], "p")
    if t in ("sweep", "normal-cone", "subdiff", "single"):
        grid = _require(sc, "ps_grid")
        if not isinstance(grid, list) or not grid:
            raise ScenarioError("ps_grid", "grid must be a nonempty list")
        for i, v in enumerate(grid):
            _number(v, f"ps_grid[{i}]")
    elif "ps_grid" in p:
        if not isinstance(p["ps_grid"], list) or not p["ps_grid"]:
            raise ScenarioError("ps_grid", "grid must be a nonempty list")
    if t == "normal-cone":
        U = _require(sc, "U")
        if not isinstance(U, list) or len(U) != 2:
            raise ScenarioError("U", "expected [lo, hi]")
        lo, hi = _number(U[0], "U[0]"), _number(U[1], "U[1]")
        if lo > hi:
            raise ScenarioError("U", "empty interval")
    if t == "fuzz":
        if "seed" not in p:
            raise ScenarioError("seed", "required for task 'fuzz' (reproducibility)")
        if not isinstance(p["seed"], int) or isinstance(p["seed"], bool):
            raise ScenarioError("seed", "must be an integer")
        if "count" in p and (not isinstance(p["count"], int) or p["count"] < 1):
            raise ScenarioError("count", "must be a positive integer")
    if "grid" in p:
        g = p["grid"]
        if not isinstance(g, dict) or set(g) - {"n", "box"}:
            raise ScenarioError("grid", "expected {\"n\": int, \"box\": real}")
        if "n" in g and (not isinstance(g["n"], int) or g["n"] < 3):
            raise ScenarioError("grid.n", "must be an integer >= 3")
        if "box" in g and _number(g["box"], "grid.box") <= 0:
            raise ScenarioError("grid.box", "must be positive")
    if "tol" in p and _number(p["tol"], "tol") <= 0:
        raise ScenarioError("tol", "must be positive")
    if "reps" in p and p["reps"] not in ("auto", "fitzpatrick", "fenchel"):
        raise ScenarioError("reps", f"unknown representative selection {p['reps']!r}")
    if "tilt" in p and p["tilt"] not in ("standard", "alternative"):
        raise ScenarioError("tilt", f"unknown tilt placement {p['tilt']!r}")


def render_scenario(sc):
    """Canonical JSON text; parse_scenario(render_scenario(sc)) == sc."""
    data = {"schema": SCENARIO_SCHEMA, "task": sc.task, "definitions": sc.definitions}
    if sc.name:
        data["name"] = sc.name
    data.update(sc.params)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


# ----------------------------------------------------------------------
# resolution


class _Resolver:
    def __init__(self, sc):
        self.sc = sc

    def _body(self, ref):
        return self.sc.definitions.get(ref, ref)

    def function(self, ref, path):
        body = self._body(ref)
        where = f"definitions.{ref}" if ref in self.sc.definitions else path
        if isinstance(body, dict):
            if "plq" not in body:
                raise ScenarioError(where, "is an operator, not a function")
            return PlqFunction.from_json(body["plq"])
        if _is_operator_text(body):
            raise ScenarioError(where, "is an operator, not a function")
        return PlqFunction.parse(body)

    def operator(self, ref, path):
        body = self._body(ref)
        where = f"definitions.{ref}" if ref in self.sc.definitions else path
        if isinstance(body, dict):
            if "graph" not in body:
                raise ScenarioError(where, "is a function, not an operator")
            return MonotoneGraph.from_json(body["graph"])
        if not _is_operator_text(body):
            raise ScenarioError(where, "is a function, not an operator; wrap it in subdiff(...)")

        def resolve(name):
            if name in self.sc.definitions:
                return self.function(name, where)
            return None

        try:
            return parse_operator(body, resolve)
        except NotConvexError as exc:
            raise ScenarioError(where, f"{body}: {exc}") from None
        except (GraphError, PlqError, ImproperError) as exc:
            raise ScenarioError(where, str(exc)) from None


# ----------------------------------------------------------------------
# running


def config_for(sc, grid_n=None, box=None, tol=None):
    g = sc.params.get("grid", {})
    return verify.Config(
        tol=tol if tol is not None else float(sc.params.get("tol", verify.DEFAULT.tol)),
        box=box if box is not None else (float(g["box"]) if "box" in g else None),
        grid_n=grid_n if grid_n is not None else g.get("n"),
        reps=sc.params.get("reps", "auto"),
    )


def _grid(sc):
    return [_number(v, f"ps_grid[{i}]") for i, v in enumerate(sc.params["ps_grid"])]


def run(sc, cfg=None, seed=None):
    """Execute a scenario; returns (report dict, number of oracle disagreements)."""
    cfg = cfg or config_for(sc)
    R = _Resolver(sc)
    P = sc.params
    box = cfg.box if cfg.box is not None else default_box()
    n = cfg.grid_n if cfg.grid_n is not None else default_n()
    header = {"schema": REPORT_SCHEMA, "scenario": sc.name, "task": sc.task,
              "config": {"tol": cfg.tol, "grid_tol": cfg.grid_tol, "box": box, "grid_n": n,
                         "reps": cfg.reps}}
    body, dis = {}, 0
    t = sc.task
    try:
        if t in ("range", "sweep", "zero", "conditions", "total-duality"):
            S, T = R.operator(P["S"], "S"), R.operator(P["T"], "T")
            body["operators"] = {"S": S.to_json(), "T": T.to_json()}
        if t == "range":
            pair = verify.representative_pair(S, T, cfg.reps, cfg)
            rep = verify.range_membership(S, T, _number(P["p"], "p"), _number(P["ps"], "ps"),
                                          cfg=cfg, pair=pair, tilt=P.get("tilt", "standard"))
            body.update(representatives=pair.describe(), result=rep.to_json())
            dis = int(rep.agrees is False)
        elif t == "sweep":
            p = _number(P.get("p", 0.0), "p")
            pair = verify.representative_pair(S, T, cfg.reps, cfg)
            sw = verify.surjectivity_sweep(S, T, p, _grid(sc), cfg, tilt=P.get("tilt", "standard"))
            body.update(representatives=pair.describe(), sweep=sw.to_json())
            dis = len(sw.disagreements)
            if p == 0.0:
                body["conditions"] = _conditions(S, T, cfg, _grid(sc))
        elif t == "zero":
            rep, dual = verify.zero_in_range(S, T, cfg.reps, cfg)
            body.update(result=rep.to_json(), total_duality=None if dual is None else dual.to_json())
            dis = int(rep.agrees is False) + int(dual is not None and not dual.passed)
        elif t == "conditions":
            grid = _grid(sc) if "ps_grid" in P else None
            body["conditions"] = _conditions(S, T, cfg, grid)
            dis = int(not body["conditions"]["chain_consistent"])
        elif t == "total-duality":
            d = verify.total_duality_check(S, T, cfg.reps, cfg)
            body["total_duality"] = d.to_json()
            dis = int(not d.passed)
        elif t == "single":
            S = R.operator(P["S"], "S")
            out = verify.single_surjectivity(S, cfg.reps, _grid(sc), cfg)
            body.update(operators={"S": S.to_json()}, results=[r.to_json() for r in out])
            dis = sum(not r.agrees for r in out)
        elif t == "normal-cone":
            S = R.operator(P["S"], "S")
            U = tuple(_number(v, f"U[{i}]") for i, v in enumerate(P["U"]))
            sw = verify.normal_cone_driver(S, U, _number(P.get("p", 0.0), "p"), _grid(sc), cfg)
            body.update(operators={"S": S.to_json()}, U=[_num_out(u) for u in U], sweep=sw.to_json())
            dis = len(sw.disagreements)
        elif t == "subdiff":
            f, g = R.function(P["f"], "f"), R.function(P["g"], "g")
            try:
                out = verify.subdiff_driver(f, g, _number(P.get("p", 0.0), "p"), _grid(sc), cfg)
            except verify.VerifyError as exc:
                raise ScenarioError("f" if "f must" in str(exc) else "g", str(exc)) from None
            body.update(functions={"f": f.to_json(), "g": g.to_json()},
                        results=[r.to_json() for r in out])
            dis = sum(not r.agrees for r in out)
        elif t == "fuzz":
            s = seed if seed is not None else P["seed"]
            fr = verify.fuzz(s, P.get("count", 200), cfg)
            body["fuzz"] = fr.to_json()
            body["fuzz"]["duality"] = [d.to_json() for d in fr.duality]
            dis = fr.disagreements + sum(not d.passed for d in fr.duality)
    except (NotConvexError, GraphError) as exc:
        raise ScenarioError(sc.task, str(exc)) from None
    report = {"header": header, **body, "disagreements": dis,
              "status": "ok" if dis == 0 else "disagreement"}
    return report, dis


def _num_out(x):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _conditions(S, T, cfg, grid):
    reps = cfg.reps if cfg.reps != "auto" else "fitzpatrick"
    try:
        return verify.classical_conditions(S, T, reps, cfg, grid).to_json()
    except verify.VerifyError:
        return verify.classical_conditions(S, T, "fenchel", cfg, grid).to_json()


# ----------------------------------------------------------------------
# rendering


def render_json(report):
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _table(headers, rows):
    cols = [[str(h)] + [_fmt(r[i]) for r in rows] for i, h in enumerate(headers)]
    widths = [max(len(c) for c in col) for col in cols]
    lines = ["  ".join(c[k].ljust(w) for c, w in zip(cols, widths)).rstrip()
             for k in range(len(rows) + 1)]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return lines


def _range_rows(reports):
    return [(r["query"]["ps"], r["verdict"], r["value"], r["gap"], r["oracle"], r["agrees"])
            for r in reports]


RANGE_HEAD = ("p*", "verdict", "value", "gap", "oracle", "agrees")

CONDITION_LABELS = (
    ("dom_fT_full", "dom f_T = R x R"),
    ("difference_full", "dom f_S - dom f_T^ = R x R"),
    ("sqri_line", "{0} x R in sqri(dom f_S - dom f_T^)"),
    ("sqri_origin", "(0,0) in sqri(dom f_S - dom f_T^)"),
    ("core_origin", "(0,0) in core(co G(S) - co G(-T))"),
)


def _condition_lines(c):
    lines = ["conditions:"]
    rows = [(label, c["conditions"][key]) for key, label in CONDITION_LABELS]
    rows.append(("(RC-bar) on the p* grid", c["rc"]["RC_bar"]))
    rows.append(("(RC-tilde)", c["rc"]["RC_tilde"]))
    rows.append(("oracle range of S + T", c["rc"]["oracle_range"]))
    lines += ["  " + ln for ln in _table(("condition", "verdict"), rows)]
    if c.get("sets"):
        lines.append("  sets:")
        lines += [f"    {k} = {v}" for k, v in sorted(c["sets"].items())]
    return lines


def render_text(report):
    h = report["header"]
    lines = [f"# {h['schema']}  task={h['task']}  scenario={h['scenario'] or '-'}",
             f"# tol={h['config']['tol']:g} box={h['config']['box']:g} n={h['config']['grid_n']}"
             f" reps={h['config']['reps']}"]
    t = h["task"]
    if "representatives" in report:
        r = report["representatives"]
        lines.append(f"representatives: {r['kind']} (route {r['route']})")
    if t == "range":
        lines += _table(RANGE_HEAD, _range_rows([report["result"]]))
    elif t in ("sweep", "normal-cone"):
        sw = report["sweep"]
        lines.append(f"p = {sw['p']:g}: {sw['summary']}; oracle range = {sw['oracle_range']}")
        lines += _table(RANGE_HEAD, _range_rows(sw["reports"]))
    elif t == "zero":
        lines += _table(RANGE_HEAD, _range_rows([report["result"]]))
        d = report["total_duality"]
        if d:
            lines.append(f"total duality: primal {_fmt(d['primal_value'])}, dual {_fmt(d['dual_value'])}, "
                         f"passed {_fmt(d['passed'])}")
    elif t == "total-duality":
        d = report["total_duality"]
        lines += _table(("primal", "dual", "primal attained", "dual attained", "f_S - c", "f_T^ + c", "passed"),
                        [(d["primal_value"], d["dual_value"], d["primal_attained"], d["dual_attained"],
                          d["eq_S"], d["eq_T"], d["passed"])])
    elif t == "single":
        lines += _table(("p*", "verdict", "witness", "gap", "oracle", "agrees"),
                        [(r["ps"], r["verdict"], r["witness"], r["gap"], r["oracle"], r["agrees"])
                         for r in report["results"]])
    elif t == "subdiff":
        lines += _table(("p*", "verdict", "primal lsc", "primal exact", "dual lsc", "dual exact",
                         "oracle", "agrees"),
                        [(r["ps"], r["verdict"], r["primal_lsc"], r["primal_exact"], r["dual_lsc"],
                          r["dual_exact"], r["oracle"], r["agrees"]) for r in report["results"]])
    elif t == "fuzz":
        f = report["fuzz"]
        lines.append(f"fuzz seed {f['seed']}: {f['count']} instances, {f['disagreements']} disagreements, "
                     f"{f['inconclusive']} inconclusive ({100 * f['inconclusive_rate']:.1f}%)")
        lines.append(f"total duality: {f['duality_checked']} checked, {f['duality_failed']} failed")
    if "conditions" in report:
        lines += _condition_lines(report["conditions"])
    lines.append(f"status: {report['status']} ({report['disagreements']} disagreements)")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# entry point


def build_parser():
    ap = argparse.ArgumentParser(prog="fitzcert", description=__doc__)
    ap.add_argument("--scenario", required=True, help="scenario JSON file ('-' for stdin)")
    ap.add_argument("--format", choices=("json", "text"), default="text")
    ap.add_argument("--grid-n", type=int, help="grid nodes per axis")
    ap.add_argument("--box", type=float, help="half-width of the sampling box")
    ap.add_argument("--tol", type=float, help="tolerance of exact comparisons")
    ap.add_argument("--seed", type=int, help="override the fuzz seed")
    ap.add_argument("--out", help="write the report here instead of stdout")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.scenario == "-":
            text = sys.stdin.read()
        else:
            with open(args.scenario, encoding="utf-8") as fh:
                text = fh.read()
        sc = parse_scenario(text)
        cfg = config_for(sc, args.grid_n, args.box, args.tol)
        report, dis = run(sc, cfg, args.seed)
    except ScenarioError as exc:
        print(f"fitzcert: scenario error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"fitzcert: {exc}", file=sys.stderr)
        return 2
    out = render_json(report) if args.format == "json" else render_text(report)
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out)
    except OSError as exc:
        print(f"fitzcert: {exc}", file=sys.stderr)
        return 2
    return 0 if dis == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
