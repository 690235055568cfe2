"""Batch experiment harness: JSON config in, CSV out.

Binds the sampling, k-edge, estimator, curve, and translation modules into
reproducible batch runs.  All randomness flows from the single configured
seed: trial i of a parallel grid cell derives its seed as seed + i, and each
estimator-backed unit uses seed + (its index in the grid) as the unit master
seed, so output is a pure function of the config.  Trials run in a process
pool whose results are consumed in submission order; aggregation therefore
does not depend on the worker count, and reruns produce byte-identical CSV.

Exit status: 0 on success, 1 when any bound-check statistic reports a
violation, 2 for an invalid or unreadable config.
"""

from __future__ import annotations

import argparse
import ast
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .curves import (
    CurveError,
    PointOnCurve,
    _gen_curve,
    _gen_points,
    curve_graph_intersections,
    question1_search,
    search_to_csv,
)
from .dist import spec_from_json, spec_id
from .estimator import (
    _certified_sample,
    _mean_stderr,
    check_count_bound,
    direct_expected_k_edges_multi,
    formula_expected_k_edges,
)
from .kfacet import chain_decomposition, count_k_facets, enumerate_k_edges_sweep, k_edge_graph
from . import translations as tc


class ConfigInvalid(Exception):
    def __init__(self, path, violations):
        self.path = str(path)
        self.violations = list(violations)
        super().__init__(f"{self.path}: {len(self.violations)} violation(s)")


EXPERIMENTS = ("kedges", "chains", "expected", "curve-intersect", "question1",
               "tc-count", "tc-scaling", "growth")

CSV_HEADER = "experiment,distribution,body,n,k,r,statistic,value,stderr,satisfied,seed"


@dataclass(frozen=True)
class ResultRecord:
    experiment: str
    statistic: str
    value: str
    distribution: str = ""
    body: str = ""
    n: Optional[int] = None
    k: Optional[int] = None
    r: Optional[int] = None
    stderr: str = ""
    satisfied: str = ""
    seed: int = 0

    def line(self) -> str:
        cells = [self.experiment, self.distribution, self.body,
                 "" if self.n is None else str(self.n),
                 "" if self.k is None else str(self.k),
                 "" if self.r is None else str(self.r),
                 self.statistic, self.value, self.stderr, self.satisfied,
                 str(self.seed)]
        return ",".join(cells)


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


# ---------------------------------------------------------------------------
# configuration


def resolve_k(entry, n: int) -> int:
    """k-grid entries may be integers or expressions in n: "half" is the
    balanced level (n-2)//2, otherwise +-*/ arithmetic on n and integer
    literals (division is floor division)."""
    if isinstance(entry, bool):
        raise ValueError("k entry must be an integer or expression")
    if isinstance(entry, int):
        return entry
    text = str(entry).strip()
    if text == "half":
        return (n - 2) // 2

    def ev(e):
        if isinstance(e, ast.Expression):
            return ev(e.body)
        if isinstance(e, ast.BinOp) and isinstance(e.op, (ast.Add, ast.Sub, ast.Mult,
                                                          ast.Div, ast.FloorDiv)):
            a, b = ev(e.left), ev(e.right)
            if isinstance(e.op, ast.Add):
                return a + b
            if isinstance(e.op, ast.Sub):
                return a - b
            if isinstance(e.op, ast.Mult):
                return a * b
            return a // b
        if isinstance(e, ast.UnaryOp) and isinstance(e.op, ast.USub):
            return -ev(e.operand)
        if isinstance(e, ast.Name) and e.id == "n":
            return n
        if isinstance(e, ast.Constant) and isinstance(e.value, int):
            return e.value
        raise ValueError(f"unsupported k expression {text!r}")

    try:
        return int(ev(ast.parse(text, mode="eval")))
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad k expression {text!r}: {exc}") from None


_REQUIRED: Dict[str, Tuple[str, ...]] = {
    "kedges": ("distribution", "n", "k", "trials"),
    "chains": ("distribution", "n", "k", "trials"),
    "expected": ("distribution", "n", "k", "trials"),
    "curve-intersect": ("n", "r", "trials"),
    "question1": ("n", "r", "budget"),
    "tc-count": ("body", "source", "n", "k"),
    "tc-scaling": ("rho", "side", "n", "trials"),
    "growth": ("body", "n", "trials"),
}

_OPTIONAL: Dict[str, Tuple[str, ...]] = {
    "kedges": (),
    "chains": (),
    "expected": ("pair_samples",),
    "curve-intersect": (),
    "question1": ("keep",),
    "tc-count": ("trials",),
    "tc-scaling": (),
    "growth": (),
}

_COMMON = ("experiment", "seed", "workers", "out")


def _check_grid(data, key, out, *, minimum=1):
    grid = data.get(key)
    if not isinstance(grid, list) or not grid:
        out.append(f"{key} grid must be a non-empty list")
        return
    for v in grid:
        if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
            out.append(f"{key} grid entries must be integers >= {minimum} (got {v!r})")
            return


def validate_config(data: dict) -> List[str]:
    """Exhaustive schema check; returns every violation found."""
    out: List[str] = []
    if not isinstance(data, dict):
        return ["config must be a JSON object"]
    kind = data.get("experiment")
    if kind is None:
        out.append("missing required field: experiment")
    elif kind not in EXPERIMENTS:
        out.append(f"unknown experiment kind {kind!r} (field: experiment)")
    seed = data.get("seed")
    if seed is None:
        out.append("missing required field: seed (explicit seeding required)")
    elif isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        out.append("seed must be a nonnegative integer")
    workers = data.get("workers")
    if workers is not None and (isinstance(workers, bool)
                                or not isinstance(workers, int) or workers < 1):
        out.append("workers must be an integer >= 1")
    if "out" in data and not isinstance(data["out"], str):
        out.append("out must be a path string")
    if kind not in EXPERIMENTS:
        return out

    required, optional = _REQUIRED[kind], _OPTIONAL[kind]
    allowed = set(_COMMON) | set(required) | set(optional)
    for key in sorted(data):
        if key not in allowed:
            out.append(f"unknown field {key!r} for experiment {kind!r}")
    for key in required:
        if key not in data:
            out.append(f"missing required field: {key}")

    if "trials" in data or "trials" in required:
        trials = data.get("trials")
        if trials is None:
            if "trials" in required:
                pass  # already reported as missing
        elif isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
            out.append("trials must be an integer >= 1 (trials >= 1)")
    if "n" in data and "n" in required:
        _check_grid(data, "n", out, minimum=1)
    if "r" in data and "r" in required:
        _check_grid(data, "r", out, minimum=1)
    if "k" in required and "k" in data:
        kgrid = data["k"]
        if kgrid != "all" and (not isinstance(kgrid, list) or not kgrid):
            out.append("k grid must be \"all\" or a non-empty list")
        elif isinstance(kgrid, list):
            for entry in kgrid:
                try:
                    resolve_k(entry, 100)
                except ValueError as exc:
                    out.append(str(exc))
    if "distribution" in required and "distribution" in data:
        try:
            spec_from_json(data["distribution"])
        except Exception as exc:
            out.append(f"distribution does not parse: {exc}")
    if "body" in required and "body" in data:
        try:
            tc.body_from_json(data["body"])
        except Exception as exc:
            out.append(f"body does not parse: {exc}")
    if kind == "expected":
        ps = data.get("pair_samples")
        if ps is not None and (isinstance(ps, bool) or not isinstance(ps, int) or ps < 1):
            out.append("pair_samples must be an integer >= 1")
    if kind == "question1":
        budget = data.get("budget")
        if budget is not None and (isinstance(budget, bool)
                                   or not isinstance(budget, int) or budget < 1):
            out.append("budget must be an integer >= 1")
        keep = data.get("keep")
        if keep is not None and (isinstance(keep, bool) or not isinstance(keep, int) or keep < 1):
            out.append("keep must be an integer >= 1")
    if kind == "tc-count":
        source = data.get("source")
        if source is not None and source not in ("square_cross", "curved_cross", "random"):
            out.append(f"source must be square_cross | curved_cross | random (got {source!r})")
        if source == "random" and "trials" not in data:
            out.append("missing required field: trials (random source)")
        if source in ("square_cross", "curved_cross") and isinstance(data.get("n"), list):
            mod = 4 if source == "square_cross" else 8
            for v in data["n"]:
                if isinstance(v, int) and v % mod != 0:
                    out.append(f"n={v} is not a multiple of {mod} for {source}")
    if kind == "tc-scaling":
        for key in ("rho", "side"):
            v = data.get(key)
            if v is not None and (isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0):
                out.append(f"{key} must be a positive number")
    return out


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigInvalid(path, ["file not found"]) from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(path, [f"not valid JSON: {exc}"]) from None


# ---------------------------------------------------------------------------
# worker pool


def _pool_map(fn: Callable, items: Sequence, workers: int) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(a) for a in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        chunk = max(1, len(items) // (workers * 4))
        return list(ex.map(fn, items, chunksize=chunk))


def _resolve_ks(kgrid, n: int) -> List[int]:
    if kgrid == "all":
        return list(range(0, max(n - 1, 1)))
    return [resolve_k(entry, n) for entry in kgrid]


# ---------------------------------------------------------------------------
# experiment runners (module-level workers keep the pool picklable)


def _kedges_trial(args):
    spec_json, n, ks, trial_seed = args
    spec = spec_from_json(spec_json)
    s, _ = _certified_sample(spec, n, trial_seed)
    table = enumerate_k_edges_sweep(s)
    edges = [len(table.bucket(k)) for k in ks]
    facets = [count_k_facets(table, k) for k in ks]
    return edges, facets


def run_kedges(cfg: dict) -> List[ResultRecord]:
    spec = spec_from_json(cfg["distribution"])
    sid = spec_id(spec)
    seed, trials, workers = cfg["seed"], cfg["trials"], cfg.get("workers", 1)
    records = []
    for n in cfg["n"]:
        ks = sorted(set(_resolve_ks(cfg["k"], n)))
        args = [(cfg["distribution"], n, tuple(ks), seed + t) for t in range(trials)]
        results = _pool_map(_kedges_trial, args, workers)
        for j, k in enumerate(ks):
            edge_counts = [res[0][j] for res in results]
            facet_counts = [res[1][j] for res in results]
            m, se = _mean_stderr(edge_counts)
            records.append(ResultRecord("kedges", "mean_k_edges", fmt(m), distribution=sid,
                                        n=n, k=k, stderr=fmt(se), seed=seed))
            m, se = _mean_stderr(facet_counts)
            records.append(ResultRecord("kedges", "mean_k_facets", fmt(m), distribution=sid,
                                        n=n, k=k, stderr=fmt(se), seed=seed))
    return records


def _chains_trial(args):
    spec_json, n, ks, trial_seed = args
    spec = spec_from_json(spec_json)
    s, _ = _certified_sample(spec, n, trial_seed)
    table = enumerate_k_edges_sweep(s)
    out = []
    for k in ks:
        graph = k_edge_graph(s, k, table=table)
        conv = chain_decomposition(graph, "convex")
        conc = chain_decomposition(graph, "concave")
        conv.validate()
        conc.validate()
        ok = len(conv.chains) <= k + 1 and len(conc.chains) <= n - k - 1
        out.append((len(conv.chains), len(conc.chains), ok))
    return out


def run_chains(cfg: dict) -> List[ResultRecord]:
    spec = spec_from_json(cfg["distribution"])
    sid = spec_id(spec)
    seed, trials, workers = cfg["seed"], cfg["trials"], cfg.get("workers", 1)
    records = []
    for n in cfg["n"]:
        ks = sorted(set(_resolve_ks(cfg["k"], n)))
        args = [(cfg["distribution"], n, tuple(ks), seed + t) for t in range(trials)]
        results = _pool_map(_chains_trial, args, workers)
        for j, k in enumerate(ks):
            conv = [res[j][0] for res in results]
            conc = [res[j][1] for res in results]
            all_ok = all(res[j][2] for res in results)
            m, se = _mean_stderr(conv)
            records.append(ResultRecord("chains", "mean_convex_chains", fmt(m),
                                        distribution=sid, n=n, k=k, stderr=fmt(se), seed=seed))
            m, se = _mean_stderr(conc)
            records.append(ResultRecord("chains", "mean_concave_chains", fmt(m),
                                        distribution=sid, n=n, k=k, stderr=fmt(se), seed=seed))
            records.append(ResultRecord("chains", "chain_count_bound",
                                        fmt(min(k + 1, n - k - 1)),
                                        distribution=sid, n=n, k=k,
                                        satisfied="yes" if all_ok else "VIOLATION",
                                        seed=seed))
    return records


def _expected_unit(args):
    spec_json, n, ks, trials, pair_samples, unit_seed = args
    spec = spec_from_json(spec_json)
    direct = direct_expected_k_edges_multi(spec, n, ks, trials, unit_seed)
    rows = []
    for k in ks:
        rec = direct[k]
        form = formula_expected_k_edges(spec, n, k, pair_samples, unit_seed + 1)
        bound = check_count_bound(rec)
        if bound.violation:
            flag = "VIOLATION"
        elif bound.satisfied_within:
            flag = "yes"
        else:
            flag = ""
        rows.append((k, rec.mean, rec.stderr, form.mean, form.stderr, bound.bound, flag))
    return rows


def run_expected(cfg: dict) -> List[ResultRecord]:
    spec = spec_from_json(cfg["distribution"])
    sid = spec_id(spec)
    seed, workers = cfg["seed"], cfg.get("workers", 1)
    pair_samples = cfg.get("pair_samples", 20000)
    units = []
    for idx, n in enumerate(cfg["n"]):
        ks = sorted(set(_resolve_ks(cfg["k"], n)))
        units.append((cfg["distribution"], n, tuple(ks), cfg["trials"],
                      pair_samples, seed + idx))
    results = _pool_map(_expected_unit, units, workers)
    records = []
    for (_, n, _, _, _, _), rows in zip(units, results):
        for k, dm, dse, fm, fse, bound, flag in rows:
            records.append(ResultRecord("expected", "direct_mean_k_edges", fmt(dm),
                                        distribution=sid, n=n, k=k, stderr=fmt(dse), seed=seed))
            records.append(ResultRecord("expected", "formula_mean_k_edges", fmt(fm),
                                        distribution=sid, n=n, k=k, stderr=fmt(fse), seed=seed))
            records.append(ResultRecord("expected", "count_bound", fmt(bound),
                                        distribution=sid, n=n, k=k, satisfied=flag, seed=seed))
    return records


def _curve_trial(args):
    n, r, trial_seed = args
    rng = np.random.default_rng(trial_seed)
    s = _gen_points("uniform", n, rng, seed=trial_seed & 0x3FFFFFFF)
    k = int(rng.integers(0, n - 1))
    graph = k_edge_graph(s, k)
    for _ in range(6):
        f = _gen_curve("random", r, rng)
        try:
            rep = curve_graph_intersections(f, graph)
        except PointOnCurve:
            continue
        except CurveError:
            return (None, True)  # bound violated inside the counter
        return (rep.total, False)
    return (None, False)  # could not place a curve off the points


def run_curve_intersect(cfg: dict) -> List[ResultRecord]:
    seed, trials, workers = cfg["seed"], cfg["trials"], cfg.get("workers", 1)
    records = []
    for n in cfg["n"]:
        for r in cfg["r"]:
            args = [(n, r, seed + t) for t in range(trials)]
            results = _pool_map(_curve_trial, args, workers)
            totals = [t for t, _ in results if t is not None]
            violated = any(v for _, v in results)
            if totals:
                m, se = _mean_stderr(totals)
                records.append(ResultRecord("curve-intersect", "mean_intersections",
                                            fmt(m), n=n, r=r, stderr=fmt(se), seed=seed))
                records.append(ResultRecord("curve-intersect", "max_intersections",
                                            fmt(max(totals)), n=n, r=r, seed=seed))
            records.append(ResultRecord("curve-intersect", "intersection_bound",
                                        fmt(13 * n * r * r), n=n, r=r,
                                        satisfied="VIOLATION" if violated else "yes",
                                        seed=seed))
    return records


def run_question1(cfg: dict) -> str:
    """question1 emits the search leaderboard schema directly."""
    all_hits = []
    idx = 0
    for n in cfg["n"]:
        for r in cfg["r"]:
            hits, _ = question1_search(n, r, seed=cfg["seed"] + idx,
                                       budget=cfg["budget"], keep=cfg.get("keep", 10))
            all_hits.extend(hits)
            idx += 1
    return search_to_csv(all_hits)


def _tc_random_instance(body, n: int, trial_seed: int):
    """Random distinct rational points scaled to the body, certified for
    relative general position (retry with derived seeds on the rare exact
    degeneracy)."""
    if isinstance(body, tc.Disk):
        scale = body.radius
    elif isinstance(body, tc.Ellipse):
        scale = max(abs(body.m11) + abs(body.m12), abs(body.m21) + abs(body.m22))
    else:
        scale = Fraction(1)
    for attempt in range(50):
        rng = np.random.default_rng([trial_seed, attempt])
        pts = set()
        while len(pts) < n:
            x = scale * Fraction(int(rng.integers(-24, 25)), 8)
            y = scale * Fraction(int(rng.integers(-24, 25)), 8)
            pts.add((x, y))
        pts = sorted(pts)
        if not tc.is_strictly_convex(body):
            return pts
        if tc.certify_relative_position(body, pts, antipodal=True).ok:
            return pts
    raise tc.TcError("could not draw a certified instance")


def _tc_count_trial(args):
    body_json, n, ks, trial_seed = args
    body = tc.body_from_json(body_json)
    pts = _tc_random_instance(body, n, trial_seed)
    fam = tc.induced_family(body, pts)
    a = [tc.tc_k_sets(body, pts, k, family=fam)[0] for k in ks]
    if tc.is_strictly_convex(body):
        levels = tc.tc_k_edge_levels(body, pts)
        e = [sum(1 for lv in levels.values() if lv == k) for k in ks]
        ineq = [tc.check_subset_edge_inequality(body, pts, k, family=fam,
                                                levels=levels).holds
                for k in ks if k >= 2]
    else:
        e, ineq = [], []
    return a, e, ineq


def run_tc_count(cfg: dict) -> List[ResultRecord]:
    body = tc.body_from_json(cfg["body"])
    bid = _body_id(body)
    seed, workers = cfg["seed"], cfg.get("workers", 1)
    source = cfg["source"]
    records = []
    for n in cfg["n"]:
        ks = sorted(set(_resolve_ks(cfg["k"], n)))
        if source == "random":
            args = [(cfg["body"], n, tuple(ks), seed + t) for t in range(cfg["trials"])]
            results = _pool_map(_tc_count_trial, args, workers)
            for j, k in enumerate(ks):
                m, se = _mean_stderr([res[0][j] for res in results])
                records.append(ResultRecord("tc-count", "mean_tc_k_sets", fmt(m),
                                            body=bid, n=n, k=k, stderr=fmt(se), seed=seed))
                if tc.is_strictly_convex(body):
                    m, se = _mean_stderr([res[1][j] for res in results])
                    records.append(ResultRecord("tc-count", "mean_tc_k_edges", fmt(m),
                                                body=bid, n=n, k=k, stderr=fmt(se), seed=seed))
            kge2 = [k for k in ks if k >= 2]
            if tc.is_strictly_convex(body) and kge2:
                for j, k in enumerate(kge2):
                    ok = all(res[2][j] for res in results)
                    records.append(ResultRecord("tc-count", "subset_edge_bound", fmt(4),
                                                body=bid, n=n, k=k,
                                                satisfied="yes" if ok else "VIOLATION",
                                                seed=seed))
        else:
            if source == "square_cross":
                pts = tc.cross_construction_square(n)
            else:
                pts = tc.cross_construction_c2(body, n)
            fam = tc.induced_family(body, pts)
            levels = None
            if tc.is_strictly_convex(body):
                levels = tc.tc_k_edge_levels(body, pts, antipodal_check=False)
            for k in ks:
                cnt, _ = tc.tc_k_sets(body, pts, k, family=fam)
                records.append(ResultRecord("tc-count", "tc_k_sets", fmt(cnt),
                                            body=bid, n=n, k=k, seed=seed))
                if levels is not None:
                    e_k = sum(1 for lv in levels.values() if lv == k)
                    records.append(ResultRecord("tc-count", "tc_k_edges", fmt(e_k),
                                                body=bid, n=n, k=k, seed=seed))
                    if k >= 2:
                        rep = tc.check_subset_edge_inequality(
                            body, pts, k, family=fam, levels=levels,
                            antipodal_check=False)
                        records.append(ResultRecord(
                            "tc-count", "subset_edge_bound", fmt(4 * sum(rep.e_counts)),
                            body=bid, n=n, k=k,
                            satisfied="yes" if rep.holds else "VIOLATION", seed=seed))
    return records


def _scaling_trial(args):
    n, rho, side, trial_seed = args
    return tc.tc_scaling_trial(n, rho, side, trial_seed)


def run_tc_scaling(cfg: dict) -> List[ResultRecord]:
    seed, trials, workers = cfg["seed"], cfg["trials"], cfg.get("workers", 1)
    rho, side = float(cfg["rho"]), float(cfg["side"])
    ns = cfg["n"]
    flat = []
    for n in ns:
        for ts in tc.tc_scaling_trial_seeds(seed, n, trials):
            flat.append((n, rho, side, ts))
    results = _pool_map(_scaling_trial, flat, workers)
    hists: Dict[int, list] = {n: [] for n in ns}
    for (n, _, _, _), h in zip(flat, results):
        hists[n].append(h)
    report = tc.tc_scaling_experiment(rho=rho, side=side, ns=ns, trials=trials,
                                      seed=seed, trial_histograms=hists)
    records = []
    for row in report.rows:
        records.append(ResultRecord("tc-scaling", "max_mean_level_count",
                                    fmt(row.max_mean), body=f"disk:{fmt(rho)}",
                                    n=row.n, k=row.argmax_k, seed=seed))
        records.append(ResultRecord("tc-scaling", "argmax_drift", fmt(row.argmax_drift),
                                    body=f"disk:{fmt(rho)}", n=row.n, k=row.argmax_k,
                                    seed=seed))
    records.append(ResultRecord("tc-scaling", "loglog_slope", fmt(report.slope),
                                body=f"disk:{fmt(rho)}", seed=seed))
    records.append(ResultRecord("tc-scaling", "point_fraction", fmt(report.point_fraction),
                                body=f"disk:{fmt(rho)}", seed=seed))
    return records


def _growth_trial(args):
    body_json, n, trial_seed = args
    body = tc.body_from_json(body_json)
    pts = _tc_random_instance(body, n, trial_seed)
    return tc.growth_count(body, pts, max_n=max(12, n))


def run_growth(cfg: dict) -> List[ResultRecord]:
    body = tc.body_from_json(cfg["body"])
    bid = _body_id(body)
    seed, trials, workers = cfg["seed"], cfg["trials"], cfg.get("workers", 1)
    records = []
    for n in cfg["n"]:
        args = [(cfg["body"], n, seed + t) for t in range(trials)]
        counts = _pool_map(_growth_trial, args, workers)
        m, se = _mean_stderr(counts)
        records.append(ResultRecord("growth", "mean_induced_subsets", fmt(m),
                                    body=bid, n=n, stderr=fmt(se), seed=seed))
        records.append(ResultRecord("growth", "max_induced_subsets", fmt(max(counts)),
                                    body=bid, n=n, seed=seed))
        if tc.is_strictly_convex(body):
            bound = n * n - n + 2
            ok = max(counts) <= bound
            records.append(ResultRecord("growth", "growth_bound", fmt(bound),
                                        body=bid, n=n,
                                        satisfied="yes" if ok else "VIOLATION",
                                        seed=seed))
    return records


def _body_id(body) -> str:
    if isinstance(body, tc.Disk):
        return f"disk:{body.radius}"
    if isinstance(body, tc.Ellipse):
        return f"ellipse:{body.m11};{body.m12};{body.m21};{body.m22}"
    return "square"


_RUNNERS = {
    "kedges": run_kedges,
    "chains": run_chains,
    "expected": run_expected,
    "curve-intersect": run_curve_intersect,
    "tc-count": run_tc_count,
    "tc-scaling": run_tc_scaling,
    "growth": run_growth,
}


# ---------------------------------------------------------------------------
# CSV emission and entry point


def _sort_key(rec: ResultRecord):
    return (rec.distribution, rec.body,
            rec.n if rec.n is not None else -1,
            rec.k if rec.k is not None else -1,
            rec.r if rec.r is not None else -1,
            rec.statistic)


def records_to_csv(records: Sequence[ResultRecord]) -> str:
    lines = [CSV_HEADER]
    lines.extend(rec.line() for rec in sorted(records, key=_sort_key))
    return "\n".join(lines) + "\n"


def run(config: dict, *, out_path: Optional[str] = None) -> Tuple[int, str]:
    """Execute a validated config; returns (exit_status, csv_text)."""
    violations = validate_config(config)
    if violations:
        raise ConfigInvalid("<config>", violations)
    kind = config["experiment"]
    if kind == "question1":
        csv_text = run_question1(config)
        status = 0
    else:
        records = _RUNNERS[kind](config)
        csv_text = records_to_csv(records)
        status = 1 if any(r.satisfied == "VIOLATION" for r in records) else 0
    target = out_path or config.get("out")
    if target:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
    return status, csv_text


def _add_common(sub):
    sub.add_argument("--config", required=True, help="path to the JSON experiment config")
    sub.add_argument("--out", help="CSV output path (overrides config)")
    sub.add_argument("--workers", type=int, help="worker processes (overrides config)")
    sub.add_argument("--seed", type=int, help="seed override")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="kedgelab",
        description="batch experiments over k-edge graphs, estimators, curves, "
                    "and translation range systems")
    subs = parser.add_subparsers(dest="command", required=True)
    for kind in EXPERIMENTS:
        _add_common(subs.add_parser(kind, help=f"run a {kind} experiment config"))
    vp = subs.add_parser("validate", help="check a config file, print violations")
    vp.add_argument("--config", required=True)
    ns = parser.parse_args(argv)

    try:
        config = load_config(ns.config)
    except ConfigInvalid as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return 2

    if ns.command == "validate":
        violations = validate_config(config)
        if violations:
            for v in violations:
                print(v)
            return 2
        print("ok")
        return 0

    if config.get("experiment") != ns.command:
        print(f"config error: experiment {config.get('experiment')!r} does not match "
              f"subcommand {ns.command!r}", file=sys.stderr)
        return 2
    if ns.seed is not None:
        config["seed"] = ns.seed
    if ns.workers is not None:
        config["workers"] = ns.workers
    try:
        status, csv_text = run(config, out_path=ns.out)
    except ConfigInvalid as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return 2
    if not ns.out and not config.get("out"):
        sys.stdout.write(csv_text)
    return status


if __name__ == "__main__":
    sys.exit(main())
