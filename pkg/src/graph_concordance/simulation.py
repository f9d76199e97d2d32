"""Coverage and interval-length experiments on a fixed random graph."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .dgp import generate_batch, true_gc_monte_carlo
from .errors import ConfigError, DegeneracyError
from .graph import Graph, degree_stats
from .permutation import asymptotic_ci, confidence_interval, observed, sampled_draws
from .random_graphs import barabasi_albert, erdos_renyi
from .rng import (
    STREAM_GRAPH,
    STREAM_OUTCOMES,
    STREAM_PERMUTATIONS,
    STREAM_TRUE_GC,
    seed_path,
    substream,
)

REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class GraphSpec:
    family: str  # "er", "ba" or "file"
    n: int | None = None
    lam: float | None = None
    m: int | None = None
    path: str | None = None
    vertices: str | None = None
    seed: int | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "GraphSpec":
        d = dict(d)
        family = str(d.pop("family", "")).lower()
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        unknown = set(d) - {"n", "lam", "m", "path", "vertices", "seed"}
        if unknown:
            raise ConfigError(f"unknown graph keys: {sorted(unknown)}")
        spec = cls(family=family, **d)
        spec.check()
        return spec

    def check(self):
        if self.family == "er":
            if self.n is None or self.lam is None:
                raise ConfigError("ER graph needs 'n' and 'lambda'")
        elif self.family == "ba":
            if self.n is None or self.m is None:
                raise ConfigError("BA graph needs 'n' and 'm'")
        elif self.family == "file":
            if not self.path:
                raise ConfigError("file graph needs 'path'")
        else:
            raise ConfigError(f"graph family must be 'er', 'ba' or 'file', got {self.family!r}")

    def to_dict(self) -> dict:
        out = {"family": self.family}
        for k, v in asdict(self).items():
            if k != "family" and v is not None:
                out["lambda" if k == "lam" else k] = v
        return out

    def build(self, master_seed: int) -> Graph:
        seed = self.seed if self.seed is not None else seed_path(master_seed, STREAM_GRAPH)
        if self.family == "er":
            return erdos_renyi(int(self.n), float(self.lam), seed)
        if self.family == "ba":
            return barabasi_albert(int(self.n), int(self.m), seed)
        from .dataio import load_graph

        return load_graph(self.path, self.vertices)


@dataclass(frozen=True)
class SimulationConfig:
    graph: GraphSpec
    c: float
    mc_reps: int = 500
    permutations: int = 300
    alpha: float = 0.05
    true_gc_reps: int = 100_000
    master_seed: int = 0
    zero_gamma_c: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.mc_reps < 1:
            raise ConfigError(f"mc_reps must be at least 1, got {self.mc_reps}")
        if self.permutations < 1:
            raise ConfigError(f"permutations must be at least 1, got {self.permutations}")
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 <= self.c < 1:
            raise ConfigError(f"c must lie in [0, 1), got {self.c}")
        if self.true_gc_reps < 2:
            raise ConfigError(f"true_gc_reps must be at least 2, got {self.true_gc_reps}")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be non-negative")

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationConfig":
        d = dict(d)
        if "graph" not in d or "c" not in d:
            raise ConfigError("simulation config needs 'graph' and 'c'")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown simulation keys: {sorted(unknown)}")
        d["graph"] = GraphSpec.from_dict(d["graph"])
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["graph"] = self.graph.to_dict()
        return out


@dataclass
class SimulationReport:
    true_gc: float
    true_gc_se: float
    coverage_perm: float
    coverage_asym: float
    mean_ci_length: float
    mean_ci_length_asym: float
    rejection_rate: float
    n_valid: int
    degenerate_count: int
    degenerate_draw_total: int
    wall_time: float
    graph_stats: dict
    config: dict
    schema_version: int = REPORT_SCHEMA_VERSION
    per_replication: list = field(default_factory=list, repr=False)

    def to_dict(self, include_replications: bool = False) -> dict:
        out = asdict(self)
        if not include_replications:
            out.pop("per_replication")
        return out


def _replication(g: Graph, cfg: SimulationConfig, r: int, truth: float):
    y = generate_batch(g, cfg.c, substream(cfg.master_seed, STREAM_OUTCOMES, r), 1)[:, 0]
    try:
        est, var = observed(g, y, cfg.zero_gamma_c)
        draws = sampled_draws(
            g,
            est.residuals,
            cfg.permutations,
            seed_path(cfg.master_seed, STREAM_PERMUTATIONS, r),
            cfg.zero_gamma_c,
        )
        perm = confidence_interval(est, var, draws, cfg.alpha, g.n, zero_gamma_c=cfg.zero_gamma_c)
    except DegeneracyError:
        return None
    asym = asymptotic_ci(est, var, cfg.alpha, g.n, cfg.zero_gamma_c)
    return {
        "rep": r,
        "c_hat": perm.c_hat,
        "ci_lower": perm.ci_lower,
        "ci_upper": perm.ci_upper,
        "asym_lower": asym.ci_lower,
        "asym_upper": asym.ci_upper,
        "covered_perm": perm.ci_lower <= truth <= perm.ci_upper,
        "covered_asym": asym.ci_lower <= truth <= asym.ci_upper,
        "reject": perm.reject,
        "degenerate_draws": perm.degenerate_draw_count,
    }


def run_coverage_experiment(cfg: SimulationConfig, graph: Graph | None = None) -> SimulationReport:
    """Coverage of the true concordance by permutation and normal intervals.

    The graph is built once and held fixed. Its true concordance is
    estimated by Monte Carlo; each replication then draws fresh outcomes and
    builds both intervals. Replications whose variance is degenerate are
    dropped from all averages and counted in ``degenerate_count``.
    """
    start = time.perf_counter()
    g = graph if graph is not None else cfg.graph.build(cfg.master_seed)
    truth = true_gc_monte_carlo(
        g, cfg.c, cfg.true_gc_reps, seed_path(cfg.master_seed, STREAM_TRUE_GC)
    )

    def one(r):
        return _replication(g, cfg, r, truth.value)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(one, range(cfg.mc_reps)))
    else:
        rows = [one(r) for r in range(cfg.mc_reps)]
    ok = [row for row in rows if row is not None]
    n_ok = len(ok)

    def mean(key):
        return float(np.mean([row[key] for row in ok])) if ok else math.nan

    return SimulationReport(
        true_gc=truth.value,
        true_gc_se=truth.std_error,
        coverage_perm=mean("covered_perm"),
        coverage_asym=mean("covered_asym"),
        mean_ci_length=float(np.mean([r["ci_upper"] - r["ci_lower"] for r in ok])) if ok else math.nan,
        mean_ci_length_asym=float(np.mean([r["asym_upper"] - r["asym_lower"] for r in ok]))
        if ok
        else math.nan,
        rejection_rate=mean("reject"),
        n_valid=n_ok,
        degenerate_count=cfg.mc_reps - n_ok,
        degenerate_draw_total=int(sum(r["degenerate_draws"] for r in ok)),
        wall_time=time.perf_counter() - start,
        graph_stats=degree_stats(g).to_dict(),
        config=cfg.to_dict(),
        per_replication=ok,
    )
