"""Immutable undirected simple graphs with the indexes the estimators need."""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    ClosedNeighborhoodError,
    CompleteGraphError,
    EmptyGraphError,
    SelfLoopError,
)


class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Construction validates the structural requirements of the concordance
    estimator: no self-loops, not complete, and every vertex has at least
    one non-neighbor (``degree <= n - 2``). Instances are treated as
    immutable; derived indexes are computed once and cached.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : array-like of shape (m, 2)
        Undirected edges as id pairs. Duplicates and reversed duplicates
        are collapsed.
    labels : sequence of str, optional
        External label of each vertex. Defaults to ``"0".."n-1"``.
    validate : bool
        Run the estimator requirements at construction (default). With
        ``False`` the graph can still be described (degrees, two-hop sets)
        and the checks run later, when an estimator calls
        :meth:`check_estimable`.
    """

    def __init__(self, n: int, edges, labels: Sequence[str] | None = None, validate: bool = True):
        n = int(n)
        if n < 1:
            raise EmptyGraphError("graph must have at least one vertex")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise IndexError(f"edge endpoint outside 0..{n - 1}")
        loops = e[:, 0] == e[:, 1]
        if loops.any():
            v = int(e[loops][0, 0])
            name = labels[v] if labels is not None else v
            raise SelfLoopError(f"self-loop at vertex {name!r}")
        e = np.sort(e, axis=1)
        e = np.unique(e, axis=0) if e.size else e
        self.n = n
        self.edges = e
        self.edges.setflags(write=False)
        self.labels = tuple(str(x) for x in labels) if labels is not None else tuple(
            str(i) for i in range(n)
        )
        if len(self.labels) != n:
            raise ValueError("labels must have length n")

        deg = np.bincount(e.ravel(), minlength=n).astype(np.int64)
        deg.setflags(write=False)
        self.degree = deg
        self.validated = False
        if validate:
            self.check_estimable()

    def check_estimable(self):
        """Raise unless the graph is non-complete and every vertex has a non-neighbor."""
        if self.validated:
            return
        n = self.n
        if len(self.edges) == n * (n - 1) // 2:
            raise CompleteGraphError(
                f"graph on {n} vertices is complete; unlinked pairs are required"
            )
        full = np.flatnonzero(self.degree > n - 2)
        if full.size:
            shown = ", ".join(repr(self.labels[i]) for i in full[:10])
            raise ClosedNeighborhoodError(
                f"{full.size} vertex(es) adjacent to every other vertex: {shown}",
                vertices=[self.labels[i] for i in full],
            )
        self.validated = True

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.n_edges})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.labels == other.labels
            and np.array_equal(self.edges, other.edges)
        )

    __hash__ = None

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency_matrix(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix in CSR form."""
        n = self.n
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        a = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        a.sort_indices()
        return a

    @cached_property
    def adjacency(self) -> tuple:
        """Per-vertex sorted neighbor id arrays."""
        a = self.adjacency_matrix
        return tuple(a.indices[a.indptr[i]:a.indptr[i + 1]] for i in range(self.n))

    @cached_property
    def degree_classes(self) -> dict:
        """Map from degree to the sorted ids of the vertices with that degree."""
        out = {}
        for d in np.unique(self.degree):
            out[int(d)] = np.flatnonzero(self.degree == d)
        return out

    @cached_property
    def degree_class_index(self) -> tuple[np.ndarray, np.ndarray]:
        """``(cls, sizes)``: class id per vertex and vertex count per class."""
        _, cls, sizes = np.unique(self.degree, return_inverse=True, return_counts=True)
        return cls.ravel(), sizes

    @cached_property
    def two_hop_matrix(self) -> sp.csr_matrix:
        """0/1 matrix with ``[i, j] = 1`` iff ``j != i`` is within two edges of ``i``."""
        a = self.adjacency_matrix
        b = (a + a @ a).tocsr()
        b.setdiag(0)
        b.eliminate_zeros()
        b.data[:] = 1.0
        b.sort_indices()
        return b

    @cached_property
    def two_neighborhoods(self) -> tuple:
        b = self.two_hop_matrix
        return tuple(b.indices[b.indptr[i]:b.indptr[i + 1]] for i in range(self.n))

    @cached_property
    def closed_two_hop_matrix(self) -> sp.csr_matrix:
        """Two-hop matrix plus the identity; the quadratic form behind the variance."""
        return (self.two_hop_matrix + sp.identity(self.n, format="csr")).tocsr()

    def inverse_degree(self) -> np.ndarray:
        """``1/d_i`` for non-isolated vertices, 0 for isolated ones."""
        out = np.zeros(self.n)
        nz = self.degree > 0
        out[nz] = 1.0 / self.degree[nz]
        return out

    def inverse_nondegree(self) -> np.ndarray:
        """``1/(n - 1 - d_i)``, the inverse non-neighbor count."""
        self.check_estimable()
        return 1.0 / (self.n - 1 - self.degree)

    def relabel(self, perm) -> "Graph":
        """Graph with vertex ``i`` moved to position ``perm[i]``."""
        perm = np.asarray(perm)
        labels = [None] * self.n
        for i, p in enumerate(perm):
            labels[p] = self.labels[i]
        return Graph(self.n, perm[self.edges], labels, validate=self.validated)


@dataclass(frozen=True)
class DegreeStats:
    d_mx: int
    d_av: float
    d_avi: float
    d_med: float
    d_mx2: int
    denseness_ratio: float
    n: int
    n_edges: int
    n_isolated: int

    def to_dict(self):
        return dict(self.__dict__)


def build_graph(
    edge_pairs: Iterable[tuple[str, str]],
    vertices: Iterable[str] | None = None,
    return_duplicates: bool = False,
    validate: bool = True,
):
    """Build a :class:`Graph` from labelled edge pairs.

    Labels become dense ids in first-appearance order, declared vertices
    first. Repeated and reversed pairs are collapsed. Isolated vertices
    exist only when listed in ``vertices``.

    With ``return_duplicates=True`` the result is ``(graph, n_duplicates)``.
    """
    ids: dict[str, int] = {}
    if vertices is not None:
        for v in vertices:
            ids.setdefault(str(v), len(ids))
    pairs = []
    for a, b in edge_pairs:
        a, b = str(a), str(b)
        if a == b:
            raise SelfLoopError(f"self-loop at vertex {a!r}")
        pairs.append((ids.setdefault(a, len(ids)), ids.setdefault(b, len(ids))))
    if not ids:
        raise EmptyGraphError("no edges and no vertex list given")
    g = Graph(len(ids), pairs, labels=list(ids), validate=validate)
    if return_duplicates:
        return g, len(pairs) - g.n_edges
    return g


def two_neighborhood(g: Graph, i: int) -> np.ndarray:
    """Vertices other than ``i`` reachable from ``i`` in at most two edges."""
    if not 0 <= i < g.n:
        raise IndexError(f"vertex id {i} out of range 0..{g.n - 1}")
    return g.two_neighborhoods[i]


def degree_stats(g: Graph) -> DegreeStats:
    deg = g.degree
    nz = deg[deg > 0]
    d_mx2 = int(np.diff(g.two_hop_matrix.indptr).max()) if g.n else 0
    return DegreeStats(
        d_mx=int(deg.max()),
        d_av=float(deg.mean()),
        d_avi=float(np.sum(1.0 / nz) / g.n) if nz.size else 0.0,
        d_med=float(statistics.median(deg.tolist())),
        d_mx2=d_mx2,
        denseness_ratio=d_mx2**4 / g.n,
        n=g.n,
        n_edges=g.n_edges,
        n_isolated=int(np.sum(deg == 0)),
    )
