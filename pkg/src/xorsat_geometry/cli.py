"""Command-line entry point: ``xorsat [--seed S] [--format csv|jsonl] [--out PATH] <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from contextlib import contextmanager
from typing import TextIO

import numpy as np

from .clusters import (build_cluster_structure, cluster_count, cluster_walk, frozen_variables,
                       hamming_steps)
from .experiments import ExperimentConfig, RowWriter, run_oracle_suite, run_sweep
from .flip import cycle_mass_statistic, find_core_flippable_cycles
from .gf2 import Gf2System
from .hypergraph import gen_hnm, gen_hnp, read_instance, write_instance
from .peeling import build_digraph, r_core, reach_stats
from .theory import sat_threshold_estimate, threshold_profile


@contextmanager
def _sink(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(obj: dict, args, sink: TextIO) -> None:
    if args.format == "csv":
        flat = {k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in obj.items()}
        w = csv.DictWriter(sink, fieldnames=list(flat), lineterminator="\n")
        w.writeheader()
        w.writerow(flat)
    else:
        sink.write(json.dumps(obj) + "\n")


def read_assignment(path: str) -> np.ndarray:
    """A 0/1 string (whitespace ignored), one character per variable."""
    with open(path) as fh:
        text = "".join(fh.read().split())
    if set(text) - {"0", "1"}:
        raise ValueError(f"{path}: assignment must contain only 0 and 1")
    return np.frombuffer(text.encode(), dtype=np.uint8) - ord("0")


def cmd_gen(args) -> None:
    if args.c is not None:
        h = gen_hnp(args.n, args.c, args.k, args.seed)
    else:
        m = args.m if args.m is not None else int(round(args.density * args.n))
        h = gen_hnm(args.n, m, args.k, args.seed)
    with _sink(args.out) as fh:
        write_instance(h, fh, comments=[f"seed {args.seed}"])


def cmd_peel(args) -> None:
    h = read_instance(args.instance)
    core, trace = r_core(h, args.r)
    stats = reach_stats(build_digraph(trace, h))
    out = {"n": h.n, "m": h.m, "r": args.r, "core_size": int(np.count_nonzero(core.degree)),
           "core_edges": core.m, "rounds": trace.num_rounds,
           "round_sizes": [len(r) for r in trace.rounds()], "max_reach": stats.max_size,
           "reach_histogram": {str(s): c for s, c in stats.histogram.items()}}
    with _sink(args.out) as fh:
        _emit(out, args, fh)


def cmd_cycles(args) -> None:
    h = read_instance(args.instance)
    core, _ = r_core(h, 2)
    cycles = find_core_flippable_cycles(core)
    stat = cycle_mass_statistic(core, cycles)
    out = {"cycles": [list(c.vertices) for c in cycles], "total_mass": stat.total_vertices,
           "disjoint": stat.disjoint}
    with _sink(args.out) as fh:
        _emit(out, args, fh)


def cmd_clusters(args) -> None:
    h = read_instance(args.instance)
    cs = build_cluster_structure(h)
    out = {"B_size": len(cs.B), "log2_clusters": cluster_count(cs, Gf2System.from_hypergraph(h))[0],
           "frozen_count": len(frozen_variables(cs)), "max_toggle_support": cs.max_toggle_support()}
    with _sink(args.out) as fh:
        _emit(out, args, fh)


def cmd_walk(args) -> None:
    h = read_instance(args.instance)
    cs = build_cluster_structure(h)
    walk = cluster_walk(cs, read_assignment(args.src), read_assignment(args.dst))
    out = {"steps": ["".join(map(str, w.tolist())) for w in walk], "hamming": hamming_steps(walk)}
    with _sink(args.out) as fh:
        _emit(out, args, fh)


def cmd_thresholds(args) -> None:
    c = args.c if args.c is not None else args.density * math.factorial(args.k)
    out = threshold_profile(args.k, args.r, c).to_dict()
    if args.k >= 3:
        out["sat_threshold_m_over_n"] = sat_threshold_estimate(args.k)
    with _sink(args.out) as fh:
        _emit(out, args, fh)


def cmd_sweep(args) -> None:
    cfg = ExperimentConfig(command="sweep", k=args.k, r=args.r, sizes=args.sizes,
                           densities=args.densities, trials=args.trials, seed=args.seed,
                           out=args.out, fmt=args.format, measures=tuple(args.measures),
                           oracle=args.oracle, workers=args.workers)
    cfg.validate()
    with _sink(args.out) as fh:
        run_sweep(cfg, sink=fh)


def cmd_oracle(args) -> None:
    rep = run_oracle_suite(args.k, args.n_max, args.trials, args.seed, density=args.density)
    with _sink(args.out) as fh:
        if args.format == "csv":
            w = RowWriter(fh, "csv", ["check", "runs", "failures"], schema="xorsat-oracle/1")
            for name, runs in sorted(rep.by_check.items()):
                w.write({"check": name, "runs": runs, "failures": rep.failed.get(name, 0)})
        else:
            fh.write(json.dumps(rep.to_dict()) + "\n")
    if not rep.ok:
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xorsat", description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "jsonl"), default="jsonl")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    # Global flags are also accepted after the subcommand; SUPPRESS keeps the top-level values.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("csv", "jsonl"), default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a random instance in p xnf format")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, default=3)
    dens = g.add_mutually_exclusive_group()
    dens.add_argument("--m", type=int)
    dens.add_argument("--density", type=float, default=0.9, help="m/n for the fixed-m model")
    dens.add_argument("--c", type=float, help="edge probability c/n^(k-1) model")
    g.set_defaults(func=cmd_gen)

    pe = sub.add_parser("peel", parents=[common], help="r-core, rounds and max |R+|")
    pe.add_argument("instance")
    pe.add_argument("--r", type=int, default=2)
    pe.set_defaults(func=cmd_peel)

    cy = sub.add_parser("cycles", parents=[common], help="core flippable cycles")
    cy.add_argument("instance")
    cy.set_defaults(func=cmd_cycles)

    cl = sub.add_parser("clusters", parents=[common], help="free set, cluster count and frozen variables")
    cl.add_argument("instance")
    cl.set_defaults(func=cmd_clusters)

    w = sub.add_parser("walk", parents=[common], help="walk between two solutions of one cluster")
    w.add_argument("instance")
    w.add_argument("--from", dest="src", required=True)
    w.add_argument("--to", dest="dst", required=True)
    w.set_defaults(func=cmd_walk)

    t = sub.add_parser("thresholds", parents=[common], help="predicted core statistics")
    t.add_argument("--k", type=int, default=3)
    t.add_argument("--r", type=int, default=2)
    td = t.add_mutually_exclusive_group()
    td.add_argument("--c", type=float)
    td.add_argument("--density", type=float, default=0.9)
    t.set_defaults(func=cmd_thresholds)

    s = sub.add_parser("sweep", parents=[common], help="seeded sweep over sizes and densities")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--r", type=int, default=2)
    s.add_argument("--sizes", type=int, nargs="+", required=True)
    s.add_argument("--densities", type=float, nargs="+", required=True, help="m/n values")
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--measures", nargs="+", default=["core", "depth", "cycles", "clusters", "components"],
                   choices=["core", "depth", "cycles", "clusters", "components"])
    s.add_argument("--oracle", action="store_true", help="add brute-force checks (n <= 24)")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("oracle", parents=[common], help="brute-force cross-checks on small instances")
    o.add_argument("--k", type=int, default=3)
    o.add_argument("--n-max", type=int, default=18)
    o.add_argument("--trials", type=int, default=100)
    o.add_argument("--density", type=float, default=1.0)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
