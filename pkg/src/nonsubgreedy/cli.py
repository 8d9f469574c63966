"""Command-line front end.

Exit codes: 0 success, 1 a certificate failed, 2 validation or parse
error, 3 capacity exceeded, 4 uncertifiable (infinite eta or vacuous bound).
"""

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import bos
from .bounds import brute_force_optimum, certify
from .curvature import CURVATURE_BUDGET, CurvatureEstimator
from .exceptions import (CapacityError, DegenerateBoundError, DomainError, NonSubGreedyError,
                         UncertifiableError)
from .graphs import enumerate_cliques, fractional_clique_cover, load_graph
from .greedy import GreedyPlanner
from .instances import run_t1_suite, run_t2_suite
from .matroid import MAXIMAL_BUDGET, PartitionMatroid
from .setfn import elements_from_json, load_tabular

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_CAPACITY, EXIT_UNCERTIFIABLE = 0, 1, 2, 3, 4


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return "inf" if math.isinf(v) else v
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _emit(text, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, output):
    _emit(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n", output)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _load_oracle(args):
    """Tabular set function, or candidate paths scored against a map."""
    obj = _load_json(args.input)
    if getattr(args, "map", None):
        grid = bos.load_map(_load_json(args.map))
        items = obj["elements"] if isinstance(obj, dict) and "elements" in obj else obj
        return bos.bos_oracle(grid, elements_from_json(items), k_cap=args.k_cap)
    return load_tabular(obj)


def _load_graph(args):
    return load_graph(_load_json(args.graph)) if args.graph else None


def _order(args):
    return tuple(args.order) if args.order else None


def cmd_plan(args):
    oracle = _load_oracle(args)
    planner = GreedyPlanner(selector=args.selector, mode=args.mode, graph=_load_graph(args), order=_order(args))
    planner.fit(oracle)
    _emit_json(planner.trace_.to_dict(), args.output)
    return EXIT_OK


def _certify_one(args):
    oracle = _load_oracle(args)
    g = _load_graph(args)
    m = PartitionMatroid.from_elements(oracle.elements, order=_order(args))
    if args.mode == "limited" and g is None:
        raise DomainError("--mode limited needs --graph")
    est = CurvatureEstimator(budget=args.curvature_budget, total=False).fit(oracle)
    try:
        cert = certify(oracle, m, mode=args.mode, g=g, selector=args.selector,
                       declared_eta=args.eta, curvature_report=est.report_)
    except UncertifiableError as exc:
        print(f"UNCERTIFIABLE {exc}")
        return EXIT_UNCERTIFIABLE
    if args.output:
        _emit_json(cert.to_dict(), args.output)
    print(cert.verdict())
    if cert.vacuous:
        return EXIT_UNCERTIFIABLE
    return EXIT_OK if cert.holds else EXIT_FAIL


def _certify_suite(args):
    if args.suite == "t1":
        res = run_t1_suite(n_instances=args.n or 1000, seed=args.seed)
    else:
        if args.graphs != "random":
            raise DomainError("--suite t2 supports --graphs random only")
        res = run_t2_suite(n_graphs=args.n or 200, seed=args.seed)
    if args.output:
        _emit_json({k: v for k, v in res.to_dict().items() if k != "seconds"}, args.output)
    print(res.summary())
    return EXIT_OK if res.all_hold else EXIT_FAIL


def cmd_certify(args):
    if args.suite:
        return _certify_suite(args)
    if not args.input:
        raise DomainError("certify needs --input or --suite")
    return _certify_one(args)


def cmd_curvature(args):
    oracle = _load_oracle(args)
    est = CurvatureEstimator(budget=args.curvature_budget, method=args.method).fit(oracle)
    _emit_json(est.report_.to_dict(), args.output)
    return EXIT_OK


def cmd_cliquecover(args):
    g = _load_graph(args)
    if g is None:
        raise DomainError("cliquecover needs --graph")
    sol = fractional_clique_cover(g, enumerate_cliques(g, budget=args.graph_budget))
    print(f"{sol.objective:.10g}")
    if args.output:
        _emit_json(sol.to_dict(), args.output)
    return EXIT_OK


def cmd_bos_table(args):
    grid = bos.load_map(_load_json(args.map)) if args.map else bos.synthetic_map()
    k_top = max(args.k)
    if args.threads and args.threads > 1:
        with ThreadPoolExecutor(args.threads) as pool:
            list(pool.map(lambda c: grid.benefits(c.id, k_top), grid.cells))
    table = bos.cell_curvature_table(grid, args.k, truncate=args.truncate)
    _emit(table.to_csv(), args.output)
    if args.summary:
        Path(args.summary).write_text(table.summary_csv())
    if table.truncated:
        t = table.truncated
        print(f"truncated k_cap={t['k_cap']} alpha={t['alpha']:.6g} beta={t['beta']:.6g}", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args):
    oracle = _load_oracle(args)
    m = PartitionMatroid.from_elements(oracle.elements)
    sel, val = brute_force_optimum(oracle, m, budget=args.budget)
    _emit_json({"optimum": list(sel), "value": val}, args.output)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="nonsubgreedy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        sp.add_argument("--input", required=needs_input, help="set-function JSON, or path list with --map")
        sp.add_argument("--map", help="map JSON; --input then lists candidate paths")
        sp.add_argument("--k-cap", type=int, default=None, help="visits past this cap earn nothing")
        sp.add_argument("--output", help="write the artifact here instead of stdout")
        sp.add_argument("--seed", type=int, default=7)
        sp.add_argument("--threads", type=int, default=1)

    def planning(sp):
        sp.add_argument("--selector", default="exact", help="exact or epsilon:<eps>")
        sp.add_argument("--mode", choices=("full", "limited"), default="full")
        sp.add_argument("--graph", help="communication graph JSON (limited mode)")
        sp.add_argument("--order", type=int, nargs="+", help="planning order as a permutation of block numbers")

    sp = sub.add_parser("plan", help="run greedy and write the trace")
    common(sp)
    planning(sp)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("certify", help="certify a guarantee on one instance or a seeded suite")
    common(sp, needs_input=False)
    planning(sp)
    sp.add_argument("--eta", type=float, default=None, help="declared eta (>= 1)")
    sp.add_argument("--curvature-budget", type=int, default=CURVATURE_BUDGET)
    sp.add_argument("--suite", choices=("t1", "t2"))
    sp.add_argument("--n", type=int, default=None, help="instances (t1) or graphs (t2)")
    sp.add_argument("--graphs", default="random")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("curvature", help="alpha, beta (and alpha_c when submodular) with witnesses")
    common(sp)
    sp.add_argument("--method", choices=("dp", "enumerate"), default="dp")
    sp.add_argument("--curvature-budget", type=int, default=CURVATURE_BUDGET)
    sp.set_defaults(func=cmd_curvature)

    sp = sub.add_parser("cliquecover", help="fractional clique cover number of a graph")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--graph-budget", type=int, default=20)
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_cliquecover)

    sp = sub.add_parser("bos-table", help="per-cell curvature CSV for a map")
    sp.add_argument("--map", help="map JSON (default: the shipped synthetic map)")
    sp.add_argument("--k", type=int, nargs="+", default=[1, 2, 3, 4])
    sp.add_argument("--truncate", action="store_true", help="report the global pair under zero gain past max k")
    sp.add_argument("--summary", help="also write per-k maxima CSV here")
    sp.add_argument("--output")
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(func=cmd_bos_table)

    sp = sub.add_parser("oracle", help="brute-force optimum")
    common(sp)
    sp.add_argument("--budget", type=int, default=MAXIMAL_BUDGET)
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UncertifiableError, DegenerateBoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNCERTIFIABLE
    except (NonSubGreedyError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
