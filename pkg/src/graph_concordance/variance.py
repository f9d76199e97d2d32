"""Dependency-graph variance estimate and studentized statistics.

The per-vertex influence ``q_i = e_i (a_i - e_i * gamma)`` is centered at the
mean of its degree class, and the variance sums products of centered
influences over every pair of vertices at most two edges apart. When that
sum is not positive the plain mean square of the centered influences is
used instead.

All helpers accept either a single vector of length ``n`` or an ``(n, k)``
matrix holding ``k`` columns (one per permutation) and work column-wise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateVarianceError
from .estimator import ConcordanceEstimate
from .graph import Graph

# sigma_+^2 at or below this is treated as zero; residuals are standardized,
# so genuine variances are O(1) and round-off zeros are O(1e-30).
DEGENERACY_TOL = 1e-20
# The two-hop sum is exactly zero whenever each closed two-hop neighborhood
# covers whole degree classes (common on small or dense graphs); in floating
# point it then comes out as +/- round-off. It counts as positive only above
# this multiple of the mean square.
POSITIVE_REL_TOL = 1e-10


@dataclass(frozen=True)
class VarianceEstimate:
    sigma2: float
    sigma2_fallback: float
    sigma2_plus: float
    q_hat: np.ndarray
    q_bar: np.ndarray

    @property
    def sigma_plus(self) -> float:
        return math.sqrt(self.sigma2_plus)


def q_values(g: Graph, est: ConcordanceEstimate) -> np.ndarray:
    """Influence values ``e_i * (a_i - e_i * gamma_hat)``."""
    e = est.residuals
    return e * (est.a_hat - e * est.gamma_hat)


def _class_indicator(g: Graph) -> sp.csr_matrix:
    cls, sizes = g.degree_class_index
    return sp.csr_matrix(
        (np.ones(g.n), (cls, np.arange(g.n))), shape=(len(sizes), g.n)
    )


def degree_class_means(g: Graph, q_hat) -> np.ndarray:
    """Replace each entry by the mean over vertices of the same degree."""
    q = np.asarray(q_hat, dtype=float)
    cls, sizes = g.degree_class_index
    if q.ndim == 1:
        sums = np.bincount(cls, weights=q, minlength=len(sizes))
        return (sums / sizes)[cls]
    sums = _class_indicator(g) @ q
    return (sums / sizes[:, None])[cls]


def two_hop_quadratic(g: Graph, r) -> np.ndarray | float:
    """``(1/n) sum_i r_i (r_i + sum_{j in N2(i)} r_j)``, column-wise."""
    r = np.asarray(r, dtype=float)
    s = g.closed_two_hop_matrix @ r
    if r.ndim == 1:
        return math.fsum(r * s) / g.n
    return np.sum(r * s, axis=0) / g.n


def select_positive(sigma2, sigma1):
    """``sigma2`` where it is clearly positive, else ``sigma1``; works element-wise."""
    positive = (sigma2 > POSITIVE_REL_TOL * sigma1) & (sigma2 > DEGENERACY_TOL)
    return np.where(positive, sigma2, sigma1)


def variance_estimate(g: Graph, q_hat, q_bar, raise_on_degenerate: bool = True) -> VarianceEstimate:
    """Variance of the concordance estimate under two-edge dependence.

    Raises :class:`DegenerateVarianceError` when the result is zero, unless
    ``raise_on_degenerate`` is false.
    """
    q_hat = np.asarray(q_hat, dtype=float)
    q_bar = np.asarray(q_bar, dtype=float)
    r = q_hat - q_bar
    sigma2 = two_hop_quadratic(g, r)
    sigma1 = math.fsum(r * r) / g.n
    plus = float(select_positive(sigma2, sigma1))
    if raise_on_degenerate and plus <= DEGENERACY_TOL:
        raise DegenerateVarianceError(
            "studentizing variance is zero: every influence value equals its "
            "degree-class mean, so the statistic cannot be scaled"
        )
    return VarianceEstimate(sigma2, sigma1, plus, q_hat, q_bar)


def estimate_variance(g: Graph, est: ConcordanceEstimate, **kwargs) -> VarianceEstimate:
    q = q_values(g, est)
    return variance_estimate(g, q, degree_class_means(g, q), **kwargs)


def t_statistic(c_hat: float, c_null: float, sigma_plus: float, n: int) -> float:
    """``sqrt(n) * (c_hat - c_null) / sigma_plus``."""
    if not sigma_plus > 0:
        raise DegenerateVarianceError(f"scale must be positive, got {sigma_plus!r}")
    return math.sqrt(n) * (c_hat - c_null) / sigma_plus
