"""Seeded sweeps over (n, m/n) grids and the brute-force oracle suite."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import random
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, TextIO

import numpy as np

from .clusters import (OverlappingCycles, build_cluster_structure, cluster_count, cluster_id,
                       cluster_walk, extend_core_solution, frozen_variables, is_d_connected,
                       same_cluster, toggle_vectors, z_values)
from .flip import (cycle_mass_statistic, find_core_flippable_cycles, is_flippable_cycle,
                   is_flippable_set, minimal_flippable_sets)
from .gf2 import CapExceeded, Gf2System, enumerate_solutions, is_solution, rank
from .hypergraph import Hypergraph, gen_hnm, max_component_size
from .peeling import build_digraph, r_core, reach_stats
from .theory import threshold_profile

SCHEMA = "xorsat-sweep/1"
CORE_DEGREES = range(2, 7)
ALL_MEASURES = ("core", "depth", "cycles", "clusters", "components")
NO_PREDICTION = "no_prediction"
LOG2_CLUSTER_LIMIT = 4096


def trial_seed(master: int, n: int, density: float, trial: int) -> int:
    """64-bit instance seed: blake2b of ``"master:n:repr(density):trial"``.

    Cells and trials can run in any order without changing results.
    """
    key = f"{int(master)}:{int(n)}:{float(density)!r}:{int(trial)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass
class ExperimentConfig:
    command: str = "sweep"
    k: int = 3
    r: int = 2
    sizes: list[int] = field(default_factory=lambda: [10_000])
    densities: list[float] = field(default_factory=lambda: [0.9])   # m/n
    trials: int = 1
    seed: int = 0
    out: str | None = None
    fmt: str = "jsonl"
    measures: tuple[str, ...] = ALL_MEASURES
    oracle: bool = False
    workers: int = 1

    def validate(self) -> None:
        if not self.sizes or not self.densities:
            raise ValueError("size and density grids must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.k < 2 or self.r < 2:
            raise ValueError("need k >= 2 and r >= 2")
        if any(n < self.k for n in self.sizes):
            raise ValueError("every n must be at least k")
        if any(d < 0 for d in self.densities):
            raise ValueError("densities must be nonnegative")
        if self.fmt not in ("csv", "jsonl"):
            raise ValueError("format must be csv or jsonl")
        unknown = set(self.measures) - set(ALL_MEASURES)
        if unknown:
            raise ValueError(f"unknown measures {sorted(unknown)}")
        if self.oracle and max(self.sizes) > 24:
            raise ValueError("oracle checks need n <= 24")


def columns(cfg: ExperimentConfig) -> list[str]:
    cols = ["n", "m_over_n", "c", "trial", "seed", "m"]
    if "core" in cfg.measures:
        cols += ["num_rounds", "has_core", "core_vertices", "pred_core_vertices",
                 "core_edges", "pred_core_edges"]
        for j in CORE_DEGREES:
            cols += [f"core_deg{j}_frac", f"pred_core_deg{j}_frac"]
    if "depth" in cfg.measures:
        cols += ["max_reach", "pred_max_reach", "max_reach_over_log_n"]
    if "cycles" in cfg.measures:
        cols += ["cycle_count", "cycle_mass", "pred_cycle_mass", "cycles_disjoint", "cycle_flip_ok"]
    if "clusters" in cfg.measures:
        cols += ["B_size", "pred_B_size", "log2_clusters", "pred_log2_clusters",
                 "frozen_count", "pred_frozen_count", "max_walk_step", "pred_max_walk_step"]
    if "components" in cfg.measures:
        cols += ["max_component", "pred_max_component"]
    if cfg.oracle:
        cols += ["oracle_ok"]
    return cols


def _flip_ok(h: Hypergraph, cycles) -> bool:
    for c in cycles:
        x = np.zeros(h.n, dtype=np.uint8)
        x[list(c.vertices)] = 1
        if h.m and np.any(x[h.edges].sum(axis=1) & 1):
            return False
    return True


def measure_trial(k: int, r: int, n: int, density: float, trial: int, seed: int,
                  measures: Iterable[str] = ALL_MEASURES, oracle: bool = False) -> dict:
    measures = set(measures)
    m = int(round(density * n))
    c = density * math.factorial(k)
    h = gen_hnm(n, m, k, seed)
    row: dict = {"n": n, "m_over_n": density, "c": c, "trial": trial, "seed": seed, "m": m}
    prof = threshold_profile(k, r, c) if k + r > 4 else None
    core, trace = r_core(h, r)
    if "core" in measures:
        deg = core.degree
        nv = int(np.count_nonzero(deg))
        row.update(num_rounds=trace.num_rounds, has_core=nv > 0, core_vertices=nv, core_edges=core.m)
        above = prof is not None and prof.mu is not None
        row["pred_core_vertices"] = prof.core_vertex_fraction * n if above else 0.0
        row["pred_core_edges"] = prof.core_edge_density * n if above else 0.0
        for j in CORE_DEGREES:
            row[f"core_deg{j}_frac"] = float(np.count_nonzero(deg == j)) / n
            if prof is None or j < r:
                row[f"pred_core_deg{j}_frac"] = NO_PREDICTION
            else:
                row[f"pred_core_deg{j}_frac"] = prof.core_degree_pred.get(j, 0.0) if above else 0.0
    if "depth" in measures:
        stats = reach_stats(build_digraph(trace, h))
        row["max_reach"] = stats.max_size
        row["pred_max_reach"] = NO_PREDICTION
        row["max_reach_over_log_n"] = stats.max_size / math.log(n)
    cycles = None
    if ("cycles" in measures or "clusters" in measures) and r == 2:
        cycles = find_core_flippable_cycles(core)
    if "cycles" in measures:
        if cycles is None:
            row.update(cycle_count=None, cycle_mass=None, cycles_disjoint=None, cycle_flip_ok=None)
        else:
            stat = cycle_mass_statistic(core, cycles)
            row.update(cycle_count=stat.cycle_count, cycle_mass=stat.total_vertices,
                       cycles_disjoint=stat.disjoint, cycle_flip_ok=_flip_ok(core, cycles))
        row["pred_cycle_mass"] = NO_PREDICTION
    if "clusters" in measures:
        vals = dict(B_size=None, log2_clusters=None, frozen_count=None, max_walk_step=None)
        if r == 2:
            try:
                cs = build_cluster_structure(h, trace)
            except OverlappingCycles:
                cs = None
            if cs is not None:
                vals.update(B_size=len(cs.B), frozen_count=len(frozen_variables(cs)),
                            max_walk_step=cs.max_toggle_support())
                if n <= LOG2_CLUSTER_LIMIT:
                    vals["log2_clusters"] = cluster_count(cs, Gf2System.from_hypergraph(h))[0]
        row.update(vals)
        for key in ("B_size", "log2_clusters", "frozen_count", "max_walk_step"):
            row[f"pred_{key}"] = NO_PREDICTION
    if "components" in measures:
        row["max_component"] = max_component_size(h)
        row["pred_max_component"] = NO_PREDICTION
    if oracle:
        report = check_instance(h, random.Random(seed))
        row["oracle_ok"] = report.failures == 0
    return row


def _cells(cfg: ExperimentConfig) -> Iterator[tuple]:
    for n in cfg.sizes:
        for dens in cfg.densities:
            for t in range(cfg.trials):
                yield (cfg.k, cfg.r, n, dens, t, trial_seed(cfg.seed, n, dens, t),
                       tuple(cfg.measures), cfg.oracle)


def _run_cell(args: tuple) -> dict:
    return measure_trial(*args)


class RowWriter:
    """Streams rows to a text sink as CSV or JSON lines, schema in a header comment."""

    def __init__(self, sink: TextIO, fmt: str, cols: list[str], schema: str = SCHEMA):
        self.sink, self.fmt, self.cols = sink, fmt, cols
        sink.write(f"# schema: {schema}\n")
        if fmt == "csv":
            self._csv = csv.DictWriter(sink, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
            self._csv.writeheader()

    def write(self, row: dict) -> None:
        if self.fmt == "csv":
            self._csv.writerow({c: _cell(row.get(c)) for c in self.cols})
        else:
            self.sink.write(json.dumps({c: row.get(c) for c in self.cols}) + "\n")
        self.sink.flush()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def run_sweep(cfg: ExperimentConfig, sink: TextIO | None = None) -> list[dict]:
    """One row per (n, density, trial), written to ``sink`` (or ``cfg.out``) as completed."""
    cfg.validate()
    close = False
    if sink is None and cfg.out:
        sink, close = open(cfg.out, "w", newline=""), True
    writer = RowWriter(sink, cfg.fmt, columns(cfg)) if sink is not None else None
    rows: list[dict] = []
    try:
        cells = list(_cells(cfg))
        if cfg.workers > 1:
            with ProcessPoolExecutor(cfg.workers) as pool:
                results = pool.map(_run_cell, cells)
                for row in results:
                    rows.append(row)
                    if writer:
                        writer.write(row)
        else:
            for cell in cells:
                row = _run_cell(cell)
                rows.append(row)
                if writer:
                    writer.write(row)
    finally:
        if sink is not None:
            sink.flush()
        if close:
            sink.close()
    return rows


def core_emergence(rows: list[dict]) -> dict[tuple[int, float], float]:
    """Fraction of trials with a nonempty core per (n, m/n) cell."""
    hits: dict[tuple[int, float], list[bool]] = defaultdict(list)
    for row in rows:
        hits[(row["n"], row["m_over_n"])].append(bool(row["has_core"]))
    return {key: sum(v) / len(v) for key, v in sorted(hits.items())}


# ----------------------------------------------------------------- oracle


@dataclass
class OracleReport:
    instances: int = 0
    checks: int = 0
    failures: int = 0
    by_check: Counter = field(default_factory=Counter)
    failed: Counter = field(default_factory=Counter)
    overlapping: int = 0
    cycle_instances: int = 0
    notes: list[str] = field(default_factory=list)

    def record(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks += 1
        self.by_check[name] += 1
        if not ok:
            self.failures += 1
            self.failed[name] += 1
            if len(self.notes) < 20:
                self.notes.append(f"{name}: {detail}")

    def merge(self, other: "OracleReport") -> None:
        self.instances += other.instances
        self.checks += other.checks
        self.failures += other.failures
        self.by_check.update(other.by_check)
        self.failed.update(other.failed)
        self.overlapping += other.overlapping
        self.cycle_instances += other.cycle_instances
        self.notes.extend(other.notes[: max(0, 20 - len(self.notes))])

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {"instances": self.instances, "checks": self.checks, "failures": self.failures,
                "by_check": dict(self.by_check), "failed": dict(self.failed),
                "overlapping": self.overlapping, "cycle_instances": self.cycle_instances,
                "notes": self.notes}


def _pairs(count: int, rng: random.Random, limit: int = 400) -> list[tuple[int, int]]:
    if count * (count - 1) // 2 <= limit:
        return list(combinations(range(count), 2))
    return [tuple(rng.sample(range(count), 2)) for _ in range(limit)]


def check_instance(h: Hypergraph, rng: random.Random, cap: int = 1 << 16) -> OracleReport:
    """Every cluster-structure claim on one instance against full enumeration."""
    rep = OracleReport(instances=1)
    system = Gf2System.from_hypergraph(h)
    try:
        sols = enumerate_solutions(system, cap)
    except CapExceeded:
        rep.notes.append("skipped: too many solutions")
        return rep
    core, trace = r_core(h, 2)
    cycles = find_core_flippable_cycles(core)
    rep.cycle_instances += bool(cycles)
    cycle_sets = {frozenset(c.vertices) for c in cycles}
    core_system = Gf2System.from_hypergraph(core)

    # Cycles against exhaustive minimal flippable sets of the core.
    minimal = minimal_flippable_sets(core, cap=cap)
    cyc_from_min = {s for s in minimal if is_flippable_cycle(core, s)}
    rep.record("cycles_equal_minimal_cycle_sets", cyc_from_min == cycle_sets,
               f"{sorted(map(sorted, cycle_sets))} vs {sorted(map(sorted, cyc_from_min))}")
    for c in cycles:
        x = np.zeros(h.n, dtype=np.uint8)
        x[list(c.vertices)] = 1
        rep.record("cycle_flip_is_solution", is_solution(core_system, x))
    for s in minimal:
        ok = is_flippable_set(core, s) and all(
            not is_flippable_set(core, sub) for size in range(1, len(s))
            for sub in combinations(sorted(s), size)) if len(s) <= 12 else is_flippable_set(core, s)
        rep.record("minimal_sets_minimal", ok, str(sorted(s)))

    try:
        cs = build_cluster_structure(h, trace)
    except OverlappingCycles:
        rep.overlapping += 1
        return rep

    # Reference partition: core restriction with each cycle's phase quotiented out.
    core_mask = trace.in_core
    reps_of = [(list(c.vertices), min(c.vertices)) for c in cs.cycles]

    def reference_key(x: np.ndarray) -> bytes:
        y = np.where(core_mask, x, 0).astype(np.uint8)
        for verts, v_c in reps_of:
            if y[v_c]:
                y[verts] ^= 1
        return y.tobytes()

    groups: dict[bytes, list[int]] = defaultdict(list)
    for i, x in enumerate(sols):
        groups[reference_key(x)].append(i)
    ids = [cluster_id(cs, x) for x in sols]
    for i, j in _pairs(len(sols), rng):
        same_ref = reference_key(sols[i]) == reference_key(sols[j])
        rep.record("partition_same_cluster", same_cluster(cs, sols[i], sols[j]) == same_ref, f"{i},{j}")
        rep.record("partition_cluster_id", (ids[i] == ids[j]) == same_ref, f"{i},{j}")

    log2_clusters, log2_size = cluster_count(cs, system)
    rep.record("cluster_count", len(groups) == 1 << log2_clusters, f"{len(groups)} vs 2^{log2_clusters}")
    frozen = frozen_variables(cs)
    for members in groups.values():
        rep.record("cluster_size", len(members) == 1 << log2_size, f"{len(members)} vs 2^{log2_size}")
        block = np.array([sols[i] for i in members])
        constant = frozenset(np.flatnonzero(np.all(block == block[0], axis=0)).tolist())
        rep.record("frozen_variables", constant == frozen, f"{sorted(constant)} vs {sorted(frozen)}")
        zs = np.array([z_values(cs, sols[i]) for i in members])
        rep.record("chi_identity", bool(np.all(zs == zs[0])))

    # Toggle vectors form an independent family of kernel vectors.
    tv = toggle_vectors(cs)
    rep.record("toggle_vectors_in_kernel", all(is_solution(system, v) for v in tv))
    rows = [np.flatnonzero(v).tolist() for v in tv]
    rep.record("toggle_vectors_independent", rank(Gf2System.from_rows(h.n, rows)) == len(tv))

    # Walks inside clusters.
    step_cap = cs.max_toggle_support()
    for members in groups.values():
        if len(members) < 2:
            continue
        for _ in range(3):
            i, j = rng.sample(members, 2)
            walk = cluster_walk(cs, sols[i], sols[j])
            ok = (np.array_equal(walk[0], sols[i]) and np.array_equal(walk[-1], sols[j])
                  and all(is_solution(system, w) for w in walk) and len(walk) - 1 <= len(cs.B)
                  and all(int(np.count_nonzero(a != b)) <= step_cap for a, b in zip(walk, walk[1:])))
            rep.record("walk_valid", ok)
        i, j = rng.sample(members, 2)
        if len(sols) <= 4096:
            rep.record("walk_d_connected", is_d_connected(sols, sols[i], sols[j], step_cap))

    # Extensions of core solutions land in the right cluster.
    for members in list(groups.values())[:4]:
        x = sols[members[0]]
        free = [int(x[v]) for v in cs.free_stripped]
        y = extend_core_solution(cs, x, free)
        rep.record("extension_matches", np.array_equal(x, y))

    # Different clusters disagree on at least the smallest non-cycle minimal flippable set.
    non_cycle = [len(s) for s in minimal if s not in cycle_sets]
    if len(groups) > 1 and non_cycle:
        bound = min(non_cycle)
        keys = list(groups)
        for _ in range(10):
            a, b = rng.sample(keys, 2)
            x, y = sols[groups[a][0]], sols[groups[b][0]]
            rep.record("dichotomy", int(np.count_nonzero(x != y)) >= bound)
    return rep


def run_oracle_suite(k: int, n_max: int, trials: int, seed: int, density: float = 1.0,
                     extra: Iterable[Hypergraph] = ()) -> OracleReport:
    """Random H_k(n, m) instances with n = n_max, m = round(density * n), checked exactly."""
    if n_max > 24:
        raise ValueError("oracle suite needs n_max <= 24")
    report = OracleReport()
    m = min(int(round(density * n_max)), math.comb(n_max, k))
    for t in range(trials):
        s = trial_seed(seed, n_max, density, t)
        h = gen_hnm(n_max, m, k, s)
        report.merge(check_instance(h, random.Random(s)))
    for h in extra:
        report.merge(check_instance(h, random.Random(seed)))
    return report
