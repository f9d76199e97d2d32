"""Point estimation of graph concordance and inbreeding homophily.

Graph concordance compares how strongly an outcome co-moves with the
outcomes of a vertex's neighbors versus its non-neighbors. Outcomes are
first standardized to residuals ``e``; then for each vertex ``i``::

    a_i   = mean of e over neighbors of i        (0 if i is isolated)
    a_i^c = mean of e over non-neighbors of i    (excluding i)

and the estimate is ``mean(e * a) - mean(e * a^c)``.

Two independent routes are provided: :func:`estimate_gc` walks vertices one
by one and sums each non-neighborhood explicitly, :func:`estimate_gc_matrix`
uses sparse matrix products. They must agree to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlignmentError,
    DegenerateTypeError,
    DegenerateVarianceError,
    NoTypedEdgesError,
)
from .graph import Graph


@dataclass(frozen=True)
class ConcordanceEstimate:
    gamma_hat: float
    gamma_hat_c: float
    c_hat: float
    residuals: np.ndarray
    v_hat: float
    a_hat: np.ndarray
    a_hat_c: np.ndarray

    @property
    def n(self):
        return len(self.residuals)


@dataclass(frozen=True)
class HomophilyEstimate:
    ih: float
    ih_prime: float
    h: float
    h_prime: float
    w: float


def as_outcomes(g: Graph, y) -> np.ndarray:
    g.check_estimable()
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or len(y) != g.n:
        raise AlignmentError(f"outcome vector has length {y.size}, graph has {g.n} vertices")
    if not np.all(np.isfinite(y)):
        bad = [g.labels[i] for i in np.flatnonzero(~np.isfinite(y))]
        raise AlignmentError("non-finite outcome values", bad)
    return y


def standardize(y) -> tuple[np.ndarray, float]:
    """Center and scale ``y`` with the population (1/n) variance.

    Returns ``(residuals, v_hat)``. Raises :class:`DegenerateVarianceError`
    for constant input.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 2:
        raise DegenerateVarianceError("need at least two outcomes to standardize")
    centered = y - math.fsum(y) / n
    # re-center once more so the returned mean is zero to working precision
    centered -= math.fsum(centered) / n
    v2 = math.fsum(centered * centered) / n
    if not v2 > 0.0:
        raise DegenerateVarianceError("outcomes are constant; sample variance is zero")
    v = math.sqrt(v2)
    return centered / v, v


def neighbor_averages(g: Graph, residuals) -> tuple[np.ndarray, np.ndarray]:
    """Per-vertex mean residual over neighbors and over non-neighbors.

    Each non-neighborhood is enumerated explicitly, so this costs O(n^2);
    it is the reference route for :func:`estimate_gc_matrix`.
    """
    g.check_estimable()
    e = np.asarray(residuals, dtype=float)
    n = g.n
    a = np.zeros(n)
    ac = np.empty(n)
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        nbrs = g.adjacency[i]
        d = len(nbrs)
        if d:
            a[i] = math.fsum(e[nbrs]) / d
        mask[nbrs] = False
        mask[i] = False
        ac[i] = np.sum(e[mask]) / (n - 1 - d)
        mask[nbrs] = True
        mask[i] = True
    return a, ac


def estimate_gc(g: Graph, y, zero_gamma_c: bool = False) -> ConcordanceEstimate:
    """Graph concordance estimate, computed vertex by vertex.

    With ``zero_gamma_c`` the non-neighbor term is fixed at 0, which is
    appropriate when the graph is assumed to be a dependency graph.
    """
    y = as_outcomes(g, y)
    e, v = standardize(y)
    a, ac = neighbor_averages(g, e)
    n = g.n
    gamma = math.fsum(e * a) / n
    gamma_c = 0.0 if zero_gamma_c else math.fsum(e * ac) / n
    return ConcordanceEstimate(gamma, gamma_c, gamma - gamma_c, e, v, a, ac)


def estimate_gc_matrix(g: Graph, y, zero_gamma_c: bool = False) -> ConcordanceEstimate:
    """Vectorized graph concordance estimate via sparse adjacency products.

    The non-neighbor sums use the complement identity
    ``A^c e = (1'e) 1 - e - A e`` instead of materializing the dense
    complement matrix.
    """
    y = as_outcomes(g, y)
    e, v = standardize(y)
    return estimate_from_residuals(g, e, v, zero_gamma_c)


def estimate_from_residuals(
    g: Graph, e: np.ndarray, v_hat: float = 1.0, zero_gamma_c: bool = False
) -> ConcordanceEstimate:
    """Matrix-route estimate from already standardized residuals."""
    a, ac = _averages_matrix(g, e)
    n = g.n
    gamma = math.fsum(e * a) / n
    gamma_c = 0.0 if zero_gamma_c else math.fsum(e * ac) / n
    return ConcordanceEstimate(gamma, gamma_c, gamma - gamma_c, e, v_hat, a, ac)


def _averages_matrix(g: Graph, e: np.ndarray):
    """Neighbor and non-neighbor means; ``e`` may be (n,) or (n, k)."""
    nsum = g.adjacency_matrix @ e
    csum = e.sum(axis=0) - e - nsum
    if e.ndim == 1:
        return nsum * g.inverse_degree(), csum * g.inverse_nondegree()
    return nsum * g.inverse_degree()[:, None], csum * g.inverse_nondegree()[:, None]


def type_indicator(types, t) -> np.ndarray:
    return np.array([1.0 if x == t else 0.0 for x in types])


def inbreeding_homophily(g: Graph, types, t) -> HomophilyEstimate:
    """Plug-in inbreeding homophily of type ``t``.

    Population expectations are replaced by their sample counterparts with
    ``Y_i = 1{type_i == t}``. ``h`` is the share of type-``t`` edge ends whose
    partner is also type ``t``; ``h_prime`` weights every type-``t`` vertex
    equally instead of by degree.
    """
    if len(types) != g.n:
        raise AlignmentError(f"type vector has length {len(types)}, graph has {g.n} vertices")
    y = type_indicator(types, t)
    n_t = math.fsum(y)
    w = n_t / g.n
    if n_t == 0 or n_t == g.n:
        raise DegenerateTypeError(
            f"type {t!r} is held by {int(n_t)} of {g.n} vertices; need some but not all"
        )
    nsum = g.adjacency_matrix @ y
    ybar = nsum * g.inverse_degree()
    denom_h = math.fsum(y * g.degree)
    if denom_h == 0:
        raise NoTypedEdgesError(f"no edges touch a vertex of type {t!r}")
    h = math.fsum(y * nsum) / denom_h
    h_prime = math.fsum(y * ybar) / n_t
    return HomophilyEstimate(
        ih=(h - w) / (1 - w),
        ih_prime=(h_prime - w) / (1 - w),
        h=h,
        h_prime=h_prime,
        w=w,
    )
