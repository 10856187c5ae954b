import io
import json

import numpy as np
import pytest

from xorsat_geometry.cli import main
from xorsat_geometry.experiments import (NO_PREDICTION, ExperimentConfig, columns, core_emergence,
                                         run_oracle_suite, run_sweep, trial_seed)
from xorsat_geometry.hypergraph import write_instance

from conftest import triangle_hub


def sweep_text(cfg: ExperimentConfig) -> str:
    buf = io.StringIO()
    run_sweep(cfg, sink=buf)
    return buf.getvalue()


@pytest.mark.parametrize("fmt", ["csv", "jsonl"])
def test_sweep_is_byte_identical(fmt):
    cfg = ExperimentConfig(sizes=[2000], densities=[0.9], trials=1, seed=5, fmt=fmt)
    a, b = sweep_text(cfg), sweep_text(cfg)
    assert a == b
    assert a.startswith("# schema: xorsat-sweep/1\n")


def test_every_measurement_has_prediction_column():
    cfg = ExperimentConfig(sizes=[500], densities=[0.9], trials=1)
    cols = columns(cfg)
    measured = [c for c in cols if not c.startswith("pred_") and f"pred_{c}" in cols]
    assert {"core_vertices", "core_edges", "max_reach", "cycle_mass", "B_size", "log2_clusters",
            "frozen_count", "max_walk_step", "max_component"} <= set(measured)
    row = run_sweep(cfg)[0]
    assert row["pred_max_reach"] == NO_PREDICTION
    assert isinstance(row["pred_core_deg3_frac"], float)


def test_oracle_cell_rows():
    cfg = ExperimentConfig(sizes=[16], densities=[1.0], trials=3, oracle=True, seed=2)
    rows = run_sweep(cfg)
    assert len(rows) == 3 and all(r["oracle_ok"] is True for r in rows)


def test_config_validation():
    for bad in (dict(sizes=[]), dict(trials=0), dict(fmt="xml"), dict(measures=("nope",)),
                dict(oracle=True, sizes=[100])):
        with pytest.raises(ValueError):
            ExperimentConfig(**bad).validate()


def test_trial_seeds_distinct():
    seeds = {trial_seed(1, n, d, t) for n in (100, 1000) for d in (0.8, 0.9) for t in range(50)}
    assert len(seeds) == 200
    assert trial_seed(1, 100, 0.8, 0) == trial_seed(1, 100, 0.8, 0)


def test_oracle_suite_small_and_empty():
    rep = run_oracle_suite(3, 4, 5, seed=1, density=0.75)
    assert rep.ok and rep.cycle_instances == 5 and rep.checks > 0
    empty = run_oracle_suite(3, 18, 0, seed=1)
    assert empty.instances == 0 and empty.checks == 0


def test_core_emergence_crosses_threshold():
    grid = [round(0.70 + 0.02 * i, 2) for i in range(16)]
    cfg = ExperimentConfig(sizes=[10_000, 100_000], densities=grid, trials=20, seed=3,
                           measures=("core",))
    prob = core_emergence(run_sweep(cfg))
    for n in cfg.sizes:
        ps = [prob[(n, d)] for d in grid]
        i = next(i for i, p in enumerate(ps) if p >= 0.5)
        lo, hi = grid[i - 1], grid[i]
        crossing = lo + (0.5 - ps[i - 1]) / (ps[i] - ps[i - 1]) * (hi - lo)
        assert abs(crossing - 0.818) <= 0.02, (n, ps)


def run_cli(capsys, *argv) -> str:
    main(list(argv))
    return capsys.readouterr().out


def test_cli_round_trip(tmp_path, capsys):
    inst = tmp_path / "hub.xnf"
    write_instance(triangle_hub(), inst)
    peel = json.loads(run_cli(capsys, "peel", str(inst)))
    assert peel["core_size"] == 4 and peel["max_reach"] == 0
    cyc = json.loads(run_cli(capsys, "cycles", str(inst)))
    assert cyc == {"cycles": [[0, 1, 2]], "total_mass": 3, "disjoint": True}
    cl = json.loads(run_cli(capsys, "clusters", str(inst)))
    assert cl == {"B_size": 1, "log2_clusters": 0, "frozen_count": 1, "max_toggle_support": 3}
    (tmp_path / "a").write_text("0000\n")
    (tmp_path / "b").write_text("1110\n")
    walk = json.loads(run_cli(capsys, "walk", str(inst), "--from", str(tmp_path / "a"),
                              "--to", str(tmp_path / "b")))
    assert walk == {"steps": ["0000", "1110"], "hamming": [3]}


def test_cli_gen_and_flags(tmp_path, capsys):
    out = tmp_path / "g.xnf"
    main(["--seed", "4", "gen", "--n", "30", "--density", "0.9", "--out", str(out)])
    main(["gen", "--n", "30", "--density", "0.9", "--seed", "4", "--out", str(tmp_path / "h.xnf")])
    assert out.read_text() == (tmp_path / "h.xnf").read_text()
    assert "p xnf 30 27 3" in out.read_text()
    prof = json.loads(run_cli(capsys, "thresholds", "--k", "3", "--r", "2", "--c", "5.4"))
    assert 0.817 <= prof["c_star_m_over_n"] <= 0.820 and prof["mu"] > prof["lambda_star"]
    text = run_cli(capsys, "--format", "csv", "sweep", "--sizes", "300", "--densities", "0.9",
                   "--measures", "core")
    lines = text.splitlines()
    assert lines[0] == "# schema: xorsat-sweep/1" and lines[1].startswith("n,m_over_n,c,")
    rep = json.loads(run_cli(capsys, "oracle", "--n-max", "10", "--trials", "10"))
    assert rep["failures"] == 0
