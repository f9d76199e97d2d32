"""Edge-sequential outcome process and Monte Carlo true concordance.

Outcomes start i.i.d. standard normal. Edges ``(i, j)`` with ``i < j`` are
visited in lexicographic order; each draws a fresh shock ``Z`` and replaces
``(Y_i, Y_j)`` by ``sqrt(1 - c^2) * (Y_i, Y_j) + c * Z``. Every update keeps
unit variance, and vertices that share no edge stay independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import Graph
from .rng import Seed, substream

DEFAULT_CHUNK = 10_000


@dataclass(frozen=True)
class DgpConfig:
    c: float
    seed: Seed = 0

    def __post_init__(self):
        if not 0 <= self.c < 1:
            raise ConfigError(f"dependence strength c must lie in [0, 1), got {self.c}")


def edge_order(g: Graph) -> np.ndarray:
    """Unique edges ``i < j`` sorted by first endpoint, ties by the second."""
    e = g.edges
    return e[np.lexsort((e[:, 1], e[:, 0]))]


def generate_batch(g: Graph, c: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent outcome vectors as an ``(n, size)`` array.

    Draw order from ``rng``: all base outcomes, then all edge shocks.
    """
    if not 0 <= c < 1:
        raise ConfigError(f"dependence strength c must lie in [0, 1), got {c}")
    edges = edge_order(g)
    y = rng.standard_normal((g.n, size))
    z = rng.standard_normal((len(edges), size))
    if c == 0:
        return y
    keep = math.sqrt(1 - c * c)
    for s, (i, j) in enumerate(edges.tolist()):
        shock = c * z[s]
        y[i] *= keep
        y[i] += shock
        y[j] *= keep
        y[j] += shock
    return y


def generate_outcomes(g: Graph, cfg: DgpConfig) -> np.ndarray:
    """One outcome vector for graph ``g``."""
    return generate_batch(g, cfg.c, substream(cfg.seed), 1)[:, 0]


@dataclass(frozen=True)
class TrueGC:
    value: float
    std_error: float
    gamma: float
    gamma_c: float
    reps: int


def _moments(g: Graph, y: np.ndarray) -> np.ndarray:
    """Per-vertex raw moment sums over the columns of ``y``.

    Rows: sum Y, sum Ybar, sum Ybar^c, sum Y^2, sum Y*Ybar, sum Y*Ybar^c.
    """
    nsum = g.adjacency_matrix @ y
    ybar = nsum * g.inverse_degree()[:, None]
    ybar_c = (y.sum(axis=0) - y - nsum) * g.inverse_nondegree()[:, None]
    return np.stack(
        [
            y.sum(axis=1),
            ybar.sum(axis=1),
            ybar_c.sum(axis=1),
            (y * y).sum(axis=1),
            (y * ybar).sum(axis=1),
            (y * ybar_c).sum(axis=1),
        ]
    )


def _gc_from_moments(mom: np.ndarray, reps: int) -> tuple[float, float]:
    m = mom / reps
    mean_y, mean_b, mean_bc, m_yy, m_yb, m_ybc = m
    var_y = m_yy - mean_y**2
    cov_b = m_yb - mean_y * mean_b
    cov_bc = m_ybc - mean_y * mean_bc
    n = len(mean_y)
    v2 = math.fsum(var_y) / n
    return math.fsum(cov_b) / (n * v2), math.fsum(cov_bc) / (n * v2)


def true_gc_monte_carlo(
    g: Graph, c: float, reps: int, seed: Seed = 0, chunk: int = DEFAULT_CHUNK
) -> TrueGC:
    """Monte Carlo graph concordance of the edge-sequential process on ``g``.

    Covariances and variances are replaced by sample moments across ``reps``
    independent replications, vertex by vertex, and then averaged. Chunk
    ``k`` of the replications uses stream ``(seed, k)``; the standard error
    comes from the spread of the per-chunk estimates (batch means). Chunks
    are processed serially in a fixed order, so the result depends only on
    ``(g, c, reps, seed, chunk)``.
    """
    if reps < 2:
        raise ConfigError(f"need at least 2 replications, got {reps}")
    if chunk < 2:
        raise ConfigError(f"chunk must be at least 2, got {chunk}")
    # at least ~20 batches so the batch-means standard error is usable
    chunk = min(chunk, max(2, math.ceil(reps / 20)))
    sizes = [min(chunk, reps - lo) for lo in range(0, reps, chunk)]
    parts = []
    for k, size in enumerate(sizes):
        y = generate_batch(g, c, substream(seed, k), size)
        parts.append(_moments(g, y))
    total = np.sum(parts, axis=0)
    gamma, gamma_c = _gc_from_moments(total, reps)
    value = gamma - gamma_c

    full = [(p, s) for p, s in zip(parts, sizes) if s == chunk]
    se = math.nan
    if len(full) >= 2:
        per = np.array([np.subtract(*_gc_from_moments(p, s)) for p, s in full])
        se = float(np.std(per, ddof=1) / math.sqrt(len(per)))
    return TrueGC(value, se, gamma, gamma_c, reps)
