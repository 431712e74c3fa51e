"""Command-line front end.

Exit codes: 0 success, 1 runtime error, 2 configuration error (reported
before any sampling).  Every command writes ``<command>.config.json`` with
its fully resolved settings next to its outputs.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
import warnings
from pathlib import Path

from . import datasets
from .access import CapabilityError, Visibility
from .edge_estimators import EDGE_ESTIMATORS, estimate_edge
from .evaluation import (ConfigError, TrialConfig, detection_trials, draw_stream, make_labeler, make_labels,
                         path_summary, path_trials, random_pairs, resolve_budget, run_trials)
from .graph import GraphError, LabelTable, generate_synthetic, largest_connected_component, load_edge_list
from .node_estimators import EstimatorError, estimate_node
from .sampling import read_stream, resolve_seed, write_stream

logger = logging.getLogger("graphcrawl")

OUTPUT_ENV = "GRAPHCRAWL_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _common(p: argparse.ArgumentParser, graph=True, seed=True):
    if graph:
        p.add_argument("--graph", required=True,
                       help=f"edge list path, or a named dataset ({', '.join(datasets.names())})")
        p.add_argument("--directed", action="store_true", help="read the edge list as directed")
        p.add_argument("--no-lcc", action="store_true", help="keep the whole graph instead of its LCC")
        p.add_argument("--labels", default="degree",
                       help="degree, in-degree, out-degree, or a 'node_id label' file (default: degree)")
        p.add_argument("--visibility", default="nbr-degrees-labels",
                       choices=[v.value for v in Visibility])
    if seed:
        p.add_argument("--seed", type=int, default=None, help="master seed (generated and logged if absent)")
    p.add_argument("--output-dir", default=None, help=f"output directory (default: ${OUTPUT_ENV} or ./out)")
    p.add_argument("-v", "--verbose", action="store_true")


def _sampling_flags(p):
    p.add_argument("--method", default="fs", choices=["uni", "rw", "fs", "wrw"])
    p.add_argument("--walkers", type=int, default=10, help="FS walkers m")
    p.add_argument("--budget", default="0.001V", help="samples: integer or fraction of |V| like 0.001V")
    p.add_argument("--beta", type=float, default=0.5, help="WRW exponent")
    p.add_argument("--uni-cost", type=float, default=1.0, help="UNI cost c per delivered sample")
    p.add_argument("--charge-seeds", action="store_true", help="walk seeds are paid out of the budget")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="graphcrawl", description="Budgeted crawling estimators for social graphs.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", help="graph statistics after loading")
    _common(p, seed=False)

    p = sub.add_parser("generate", help="write a seeded synthetic edge list")
    p.add_argument("--kind", required=True, choices=["erdos-renyi", "configuration-power-law"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--param", type=float, required=True, help="edge probability or power-law exponent")
    p.add_argument("--out", default="synthetic.txt")
    _common(p, graph=False)

    p = sub.add_parser("sample", help="draw one sample stream and write its record file")
    _common(p)
    _sampling_flags(p)
    p.add_argument("--out", default="stream.txt")

    for name in ("estimate-node", "estimate-edge"):
        p = sub.add_parser(name, help=f"{name.split('-')[1]} label density estimation")
        _common(p)
        _sampling_flags(p)
        p.add_argument("--runs", type=int, default=1, help="independent runs; >1 writes nmse.csv")
        p.add_argument("--stream", default=None, help="estimate from a recorded stream file instead")
        p.add_argument("--jobs", type=int, default=1)
        if name == "estimate-node":
            p.add_argument("--estimator", default="simple",
                           choices=["simple", "neighbor", "mixture", "directed-neighbor", "out-neighbor"])
            p.add_argument("--gamma", type=float, default=1.0)
            p.add_argument("--subsets", type=int, default=100)
            p.add_argument("--mixture-neighbor", default="undirected", choices=["undirected", "directed", "out"])
        else:
            p.add_argument("--estimator", default="edge-neighbor", choices=sorted(EDGE_ESTIMATORS))
            p.add_argument("--labeler", default="degree-pair",
                           choices=["degree-pair", "label-pair", "label-pair-directed"])

    p = sub.add_parser("detect", help="top-N high degree node detection")
    _common(p)
    p.add_argument("--method", default="mxs", choices=["mxs", "xs", "xs-free", "wrw", "rw", "rw-sampled-only"])
    p.add_argument("--budget", default="0.01V")
    p.add_argument("--top", type=int, default=100)
    p.add_argument("--seeds", type=int, default=1, help="number of random start nodes")
    p.add_argument("--beta", type=float, default=1.0)

    p = sub.add_parser("shortpath", help="short-path discovery between random pairs")
    _common(p)
    p.add_argument("--strategy", nargs="+", default=["RW", "WRW", "MXS"], choices=["RW", "WRW", "MXS"])
    p.add_argument("--B", type=int, default=20, help="steps per walker")
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--beta", type=float, default=1.0)

    p = sub.add_parser("eval", help="Monte Carlo trials from a key=value config file or flags")
    _common(p)
    p.add_argument("--config", default=None, help="key=value file with TrialConfig fields")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one field")
    return ap


# -- helpers ------------------------------------------------------------------

def _outdir(args) -> Path:
    d = Path(args.output_dir or os.environ.get(OUTPUT_ENV, "out"))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _load_graph(args):
    if args.graph in datasets.names() and not Path(args.graph).exists():
        g, info = datasets.load(args.graph, lcc=not args.no_lcc)
        return g, info
    path = Path(args.graph)
    if not path.exists():
        raise UsageError(f"graph file not found: {path}")
    g = load_edge_list(path, directed=args.directed)
    n0 = g.node_count
    if not args.no_lcc:
        g = largest_connected_component(g)
    return g, {"name": str(path), "source": "file", "nodes_before_lcc": n0, "nodes": g.node_count}


def _labels(args, g) -> LabelTable:
    if args.labels not in ("degree", "in-degree", "out-degree", "in", "out") and not Path(args.labels).exists():
        raise UsageError(f"label file not found: {args.labels}")
    return make_labels(args.labels, g)


def _write_config(outdir: Path, command: str, resolved: dict) -> None:
    with open(outdir / f"{command}.config.json", "w") as fh:
        json.dump(resolved, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([r[h] for h in header])


def _trial_config(args, estimator: str, runs: int, seed: int) -> TrialConfig:
    extra = {}
    if args.command == "estimate-edge":
        extra = {"edge_labeler": args.labeler}
    elif args.command == "estimate-node":
        extra = {"gamma": args.gamma, "subset_count": args.subsets, "mixture_neighbor": args.mixture_neighbor}
    return TrialConfig(method=args.method, estimator=estimator, budget=args.budget, runs=max(runs, 2),
                       seed=seed, visibility=args.visibility, uni_cost_c=args.uni_cost,
                       charge_seeds=args.charge_seeds, walkers=args.walkers, beta=args.beta,
                       labels=args.labels, jobs=getattr(args, "jobs", 1), **extra)


def _seed(args) -> int:
    seed = resolve_seed(args.seed)
    if args.seed is None:
        print(f"no --seed given, using {seed}", file=sys.stderr)
    return seed


# -- commands -----------------------------------------------------------------

def cmd_stats(args):
    g, info = _load_graph(args)
    out = _outdir(args)
    stats = dict(g.stats(), **{k: v for k, v in info.items() if k != "params"})
    _write_config(out, "stats", {"args": vars(args), "dataset": info})
    with open(out / "stats.json", "w") as fh:
        json.dump(stats, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    print(json.dumps(stats, sort_keys=True, default=str))


def cmd_generate(args):
    seed = _seed(args)
    try:
        g = generate_synthetic(args.kind, args.n, args.param, seed)
    except GraphError as e:
        raise UsageError(str(e)) from None
    out = _outdir(args)
    src, dst = g.edges(directed=False)
    with open(out / args.out, "w") as fh:
        fh.write(f"# {args.kind} n={args.n} param={args.param} seed={seed}\n")
        for u, v in zip(src.tolist(), dst.tolist()):
            fh.write(f"{u}\t{v}\n")
    _write_config(out, "generate", dict(vars(args), seed=seed, edges=int(src.size),
                                        lcc_fraction=g.load_report.get("lcc_fraction")))
    print(f"wrote {src.size} edges to {out / args.out}")


def _prepare(args):
    """Load, validate, and resolve everything a sampling command needs."""
    g, info = _load_graph(args)
    seed = _seed(args)
    labels = _labels(args, g)
    budget = resolve_budget(args.budget, g.node_count)
    return g, info, seed, labels, budget


def cmd_sample(args):
    g, info, seed, labels, budget = _prepare(args)
    cfg = _trial_config(args, "simple", 2, seed)
    cfg.estimator = "simple"
    try:
        cfg.validate(g)
    except ConfigError as e:
        raise UsageError(str(e)) from None
    out = _outdir(args)
    _write_config(out, "sample", {"args": vars(args), "seed": seed, "budget_resolved": budget, "dataset": info})
    stream = draw_stream(g, cfg, budget, seed)
    write_stream(out / args.out, stream, labels)
    print(f"wrote {len(stream)} samples to {out / args.out}")


def cmd_estimate(args):
    if args.stream is not None and not Path(args.stream).exists():
        raise UsageError(f"stream file not found: {args.stream}")
    g, info, seed, labels, budget = _prepare(args)
    node = args.command == "estimate-node"
    cfg = _trial_config(args, args.estimator, args.runs, seed)
    try:
        cfg.validate(g)
    except ConfigError as e:
        raise UsageError(str(e)) from None
    out = _outdir(args)
    resolved = {"args": vars(args), "seed": seed, "budget_resolved": budget, "dataset": info,
                "trial_config": dataclasses.asdict(cfg)}
    _write_config(out, args.command, resolved)
    if args.runs > 1 and args.stream is None:
        table = run_trials(cfg, g, labels if (node or args.labeler != "degree-pair") else None)
        table.write(out)
        print(f"{args.runs} runs, nmse.csv and runs.csv in {out}")
        return
    if args.stream is not None:
        stream = read_stream(args.stream, LabelTable.space(labels.label_names))
    else:
        stream = draw_stream(g, cfg, budget, seed)
    if node:
        est = estimate_node(args.estimator, stream, labels, subset_count=args.subsets,
                            neighbor=args.mixture_neighbor, gamma=args.gamma)
        rows = list(est.csv_rows())
        _write_csv(out / "estimate.csv", ["label", "mass", "estimator", "n_used"], rows)
    else:
        est = estimate_edge(args.estimator, stream, make_labeler(args.labeler, labels), labels)
        rows = [dict(r, label="|".join(map(str, r["label"])) if isinstance(r["label"], tuple) else r["label"])
                for r in est.csv_rows()]
        _write_csv(out / "estimate.csv", ["label", "mass", "estimator"], rows)
    print(f"wrote {len(rows)} labels to {out / 'estimate.csv'}")


def cmd_detect(args):
    g, info = _load_graph(args)
    seed = _seed(args)
    budget = resolve_budget(args.budget, g.node_count)
    vis = Visibility.parse(args.visibility)
    if args.method in ("mxs", "wrw") and not vis.grants("nbr_degree"):
        raise UsageError(f"{args.method} requires neighbor degrees, not granted at visibility {vis.value}")
    if args.method == "rw" and not vis.grants("nbr_degree"):
        raise UsageError("rw with a neighborhood pool requires neighbor degrees; use rw-sampled-only")
    out = _outdir(args)
    _write_config(out, "detect", {"args": vars(args), "seed": seed, "budget_resolved": budget, "dataset": info})
    summary = detection_trials(g, args.method, budget, args.top, args.seeds, seed, beta=args.beta,
                               keep_results=True)
    rows = []
    for i, (res, rec) in enumerate(zip(summary["results"], summary["recalls"].tolist())):
        for r in res.csv_rows():
            rows.append(dict(r, seed_index=i, recall=repr(rec)))
    _write_csv(out / "detection.csv", ["rank", "node_id", "degree", "found_by", "seed_index", "recall"], rows)
    _write_csv(out / "recall.csv", ["method", "budget", "recall_mean", "recall_std", "seeds"], [summary])
    print(f"{args.method}: mean recall {summary['recall_mean']:.4f} over {args.seeds} seeds")


def cmd_shortpath(args):
    g, info = _load_graph(args)
    seed = _seed(args)
    if "WRW" in args.strategy or "MXS" in args.strategy:
        if not Visibility.parse(args.visibility).grants("nbr_degree"):
            raise UsageError("WRW and MXS require neighbor degrees")
    out = _outdir(args)
    _write_config(out, "shortpath", {"args": vars(args), "seed": seed, "dataset": info})
    pairs = random_pairs(g, args.pairs, seed)
    results = path_trials(g, args.strategy, args.B, pairs, seed, beta=args.beta)
    rows = [r.csv_row() for s in args.strategy for r in results[s]]
    _write_csv(out / "paths.csv", ["u", "v", "true_d", "d_star", "found", "strategy", "B"], rows)
    for s in args.strategy:
        summ = path_summary(results[s], g)
        print(f"{s}: failure {summ['failure_fraction']:.4f}, mean excess {summ['mean_excess']:.4f}, "
              f"edge coverage {summ['edge_coverage']:.4f}")


def cmd_eval(args):
    if args.config and not Path(args.config).exists():
        raise UsageError(f"config file not found: {args.config}")
    g, info = _load_graph(args)
    try:
        base = TrialConfig.from_file(args.config) if args.config else TrialConfig()
        sets = dict(s.split("=", 1) for s in args.set)
        if args.seed is not None:
            sets["seed"] = args.seed
        if args.visibility != "nbr-degrees-labels" and "visibility" not in sets:
            sets["visibility"] = args.visibility
        cfg = base
        if sets:
            merged = {k: str(v) for k, v in dataclasses.asdict(base).items()}
            merged.update({k.replace("-", "_"): str(v) for k, v in sets.items()})
            cfg = TrialConfig.from_mapping(merged)
        B = cfg.validate(g)
    except (ValueError, OSError) as e:
        raise UsageError(str(e)) from None
    out = _outdir(args)
    _write_config(out, "eval", {"trial_config": dataclasses.asdict(cfg), "budget_resolved": B, "dataset": info})
    labels = make_labels(cfg.labels, g) if (not cfg.is_edge or cfg.edge_labeler != "degree-pair") else None
    table = run_trials(cfg, g, labels)
    table.write(out)
    print(f"{cfg.runs} runs of {cfg.method}/{cfg.estimator} at B={B}; nmse.csv and runs.csv in {out}")


COMMANDS = {"stats": cmd_stats, "generate": cmd_generate, "sample": cmd_sample,
            "estimate-node": cmd_estimate, "estimate-edge": cmd_estimate, "detect": cmd_detect,
            "shortpath": cmd_shortpath, "eval": cmd_eval}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore")
    try:
        COMMANDS[args.command](args)
    except (UsageError, ConfigError, CapabilityError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (GraphError, EstimatorError, OSError, RuntimeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
