"""Erdos-Renyi and Barabasi-Albert generators for the simulation study."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GraphValidationError
from .graph import Graph
from .rng import Seed, substream

log = logging.getLogger(__name__)

MAX_ATTEMPTS = 100
BA_SEED_SIZE = 20
BA_SEED_LAMBDA = 1.0


@dataclass(frozen=True)
class ERConfig:
    n: int
    lam: float
    seed: Seed = 0


@dataclass(frozen=True)
class BAConfig:
    n: int
    m: int
    seed: Seed = 0
    seed_graph_size: int = BA_SEED_SIZE
    seed_lambda: float = BA_SEED_LAMBDA


def unrank_pairs(t: np.ndarray, n: int) -> np.ndarray:
    """Map indices ``0..n(n-1)/2-1`` to pairs ``i < j`` in row-major order."""
    t = np.asarray(t, dtype=np.int64)
    # rows are counted from the end: row i has n-1-i entries
    total = n * (n - 1) // 2
    rest = total - 1 - t
    k = np.floor((np.sqrt(8.0 * rest + 1) - 1) / 2).astype(np.int64)
    # repair float error in the square root
    k -= (k * (k + 1) // 2 > rest).astype(np.int64)
    k += ((k + 1) * (k + 2) // 2 <= rest).astype(np.int64)
    i = n - 2 - k
    start = i * (2 * n - i - 1) // 2
    j = t - start + i + 1
    return np.stack([i, j], axis=1)


def _er_edges(n: int, lam: float, rng: np.random.Generator) -> np.ndarray:
    """Each unordered pair is an edge independently with probability lam/(n-1).

    Draws the edge count from its binomial law, then a uniform subset of
    pairs of that size.
    """
    total = n * (n - 1) // 2
    p = lam / (n - 1)
    k = int(rng.binomial(total, p))
    idx = np.sort(rng.choice(total, size=k, replace=False)) if k else np.empty(0, np.int64)
    return unrank_pairs(idx, n)


def _validated(build, seed: Seed, what: str) -> Graph:
    for attempt in range(MAX_ATTEMPTS):
        n, edges = build(substream(seed, attempt))
        try:
            return Graph(n, edges)
        except GraphValidationError as exc:
            log.warning("%s draw %d rejected (%s); resampling", what, attempt, exc)
    raise ConfigError(f"{what}: no valid graph after {MAX_ATTEMPTS} attempts")


def erdos_renyi(n: int, lam: float, seed: Seed = 0) -> Graph:
    """Erdos-Renyi graph with expected degree ``lam``.

    Draws that are complete or contain a vertex linked to all others are
    rejected and redrawn from the next stream.
    """
    if n < 2:
        raise ConfigError(f"Erdos-Renyi graph needs n >= 2, got {n}")
    if not 0 <= lam <= n - 1:
        raise ConfigError(f"lambda must lie in [0, n-1] = [0, {n - 1}], got {lam}")
    return _validated(lambda rng: (n, _er_edges(n, lam, rng)), seed, f"ER(n={n}, lambda={lam})")


def _ba_edges(n, m, n0, lam0, rng):
    if n0 < 2:
        raise ConfigError("seed graph needs at least two vertices")
    edges = [tuple(e) for e in _er_edges(n0, lam0, rng).tolist()]
    deg = np.zeros(n, dtype=np.float64)
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
    for v in range(n0, n):
        w = deg[:v]
        pos = np.flatnonzero(w > 0)
        if len(pos) >= m:
            targets = rng.choice(v, size=m, replace=False, p=w / w.sum())
        else:
            # too few vertices with links: take them all, fill uniformly
            zero = np.flatnonzero(w == 0)
            fill = rng.choice(zero, size=m - len(pos), replace=False)
            targets = np.concatenate([pos, fill])
        for u in targets.tolist():
            edges.append((u, v))
            deg[u] += 1
        deg[v] += m
    return n, np.array(edges, dtype=np.int64).reshape(-1, 2)


def barabasi_albert(
    n: int,
    m: int,
    seed: Seed = 0,
    seed_graph_size: int = BA_SEED_SIZE,
    seed_lambda: float = BA_SEED_LAMBDA,
) -> Graph:
    """Preferential-attachment graph grown from a sparse Erdos-Renyi seed graph.

    Every new vertex links to ``m`` distinct existing vertices, chosen with
    probability proportional to current degree.
    """
    if m < 1:
        raise ConfigError(f"m must be at least 1, got {m}")
    if m > seed_graph_size:
        raise ConfigError(f"m={m} exceeds the {seed_graph_size} vertices of the seed graph")
    if n <= seed_graph_size:
        raise ConfigError(f"n must exceed the seed graph size {seed_graph_size}, got {n}")
    return _validated(
        lambda rng: _ba_edges(n, m, seed_graph_size, seed_lambda, rng),
        seed,
        f"BA(n={n}, m={m})",
    )


def generate(config) -> Graph:
    if isinstance(config, ERConfig):
        return erdos_renyi(config.n, config.lam, config.seed)
    if isinstance(config, BAConfig):
        return barabasi_albert(
            config.n, config.m, config.seed, config.seed_graph_size, config.seed_lambda
        )
    raise ConfigError(f"unknown graph config {config!r}")


def expected_ba_edges(seed_edges: int, n: int, m: int, n0: int = BA_SEED_SIZE) -> int:
    return seed_edges + (n - n0) * m


def ba_seed_edge_count(g: Graph, n0: int = BA_SEED_SIZE) -> int:
    """Edges among the first ``n0`` vertices, i.e. those of the seed graph."""
    return int(np.sum(g.edges[:, 1] < n0))

