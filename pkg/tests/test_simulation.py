import json

import jsonschema
import pytest

from graph_concordance import ConfigError, SimulationConfig, emit_report, run_coverage_experiment
from graph_concordance.dataio import load_schema
from graph_concordance.simulation import GraphSpec


def _cfg(**kw):
    base = dict(
        graph={"family": "er", "n": 60, "lambda": 2.0},
        c=0.3,
        mc_reps=20,
        permutations=50,
        true_gc_reps=2000,
        master_seed=4,
    )
    base.update(kw)
    return SimulationConfig.from_dict(base)


@pytest.mark.parametrize(
    "bad",
    [
        {"mc_reps": 0},
        {"permutations": 0},
        {"alpha": 1.0},
        {"c": 1.0},
        {"true_gc_reps": 1},
        {"graph": {"family": "sbm", "n": 10}},
        {"graph": {"family": "er", "n": 10}},
        {"graph": {"family": "ba", "n": 100}},
        {"bogus": 1},
    ],
)
def test_config_guards(bad):
    with pytest.raises(ConfigError):
        _cfg(**bad)


def test_config_roundtrip():
    cfg = _cfg()
    assert SimulationConfig.from_dict(cfg.to_dict()) == cfg
    assert GraphSpec.from_dict({"family": "BA", "n": 30, "m": 2}).family == "ba"


def test_report_reproducible_and_valid():
    cfg = _cfg()
    a = run_coverage_experiment(cfg)
    b = run_coverage_experiment(cfg)
    da, db = a.to_dict(True), b.to_dict(True)
    da.pop("wall_time"), db.pop("wall_time")
    assert da == db
    assert 0 <= a.coverage_perm <= 1 and 0 <= a.coverage_asym <= 1
    assert a.mean_ci_length >= 0
    assert a.n_valid + a.degenerate_count == 20
    assert len(a.per_replication) == a.n_valid
    doc = json.loads(emit_report(a, "json"))
    jsonschema.validate(doc, load_schema("simulation_report"))


def test_workers_irrelevant():
    a = run_coverage_experiment(_cfg(mc_reps=8))
    b = run_coverage_experiment(_cfg(mc_reps=8, workers=3))
    assert a.per_replication == b.per_replication
    assert a.coverage_perm == b.coverage_perm


def test_file_graph(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("".join(f"{i} {i + 1}\n" for i in range(0, 40, 2)), encoding="utf-8")
    rep = run_coverage_experiment(_cfg(graph={"family": "file", "path": str(p)}, mc_reps=5))
    assert rep.graph_stats["n"] == 40
