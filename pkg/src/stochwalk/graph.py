"""Weighted directed graphs and the generators used in quantum-walk studies.

Adjacency follows the column-source convention: ``adjacency[i, j]`` is the
weight of the edge j -> i. Vertex labels in user-facing calls are 1-based;
the stored matrix is indexed from zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import sparse


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    adjacency: sparse.csr_matrix = field(repr=False)
    directed: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        a = sparse.csr_matrix(self.adjacency, dtype=float)
        if a.shape != (self.n, self.n):
            raise ValueError(f"adjacency shape {a.shape} does not match n={self.n}")
        a.sum_duplicates()
        a.eliminate_zeros()
        a.sort_indices()
        if a.nnz and (not np.all(np.isfinite(a.data)) or a.data.min() <= 0):
            raise ValueError("edge weights must be finite and strictly positive")
        if not self.directed and (a != a.T).nnz:
            raise ValueError("undirected graph requires a symmetric adjacency matrix")
        a.data.flags.writeable = False
        object.__setattr__(self, "adjacency", a)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int] | tuple[int, int, float]],
        directed: bool = True,
    ) -> Graph:
        """Build from 1-based ``(src, dst[, weight])`` tuples.

        Undirected graphs store each edge in both directions.
        """
        rows, cols, vals = [], [], []
        for edge in edges:
            src, dst = int(edge[0]), int(edge[1])
            w = float(edge[2]) if len(edge) > 2 else 1.0
            if not (1 <= src <= n and 1 <= dst <= n):
                raise ValueError(f"edge ({src}, {dst}) has a vertex outside 1..{n}")
            rows.append(dst - 1)
            cols.append(src - 1)
            vals.append(w)
            if not directed and src != dst:
                rows.append(src - 1)
                cols.append(dst - 1)
                vals.append(w)
        a = sparse.coo_matrix((vals, (rows, cols)), shape=(n, n))
        return cls(n, a.tocsr(), directed)

    @property
    def num_edges(self) -> int:
        """Directed edge count; an undirected edge counts once."""
        a = self.adjacency
        if self.directed:
            return a.nnz
        loops = int(np.count_nonzero(a.diagonal()))
        return (a.nnz - loops) // 2 + loops

    def edges(self) -> list[tuple[int, int, float]]:
        """All stored entries as 1-based ``(src, dst, weight)``, sorted by (src, dst)."""
        coo = self.adjacency.tocoo()
        order = np.lexsort((coo.row, coo.col))
        return [(int(coo.col[k]) + 1, int(coo.row[k]) + 1, float(coo.data[k])) for k in order]

    def degrees(self) -> np.ndarray:
        """Out-degree of every vertex (self-loops excluded)."""
        a = self.adjacency
        return np.asarray(a.sum(axis=0)).ravel() - a.diagonal()

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.directed == other.directed
            and (self.adjacency != other.adjacency).nnz == 0
        )

    __hash__ = None


def out_degree(g: Graph, j: int) -> float:
    """Total weight leaving vertex ``j`` (1-based), excluding any self-loop."""
    if not 1 <= j <= g.n:
        raise IndexError(f"vertex {j} outside 1..{g.n}")
    col = g.adjacency[:, j - 1].toarray().ravel()
    return float(col.sum() - col[j - 1])


def symmetrize(g: Graph) -> Graph:
    a = g.adjacency
    return Graph(g.n, a.maximum(a.T), directed=False)


def line_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("line graph needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(1, n)], directed=False)


def cayley_tree(d: int, n: int) -> Graph:
    """Generation-``n`` Cayley tree: root of degree ``d``, inner vertices branch ``d-1`` ways."""
    if d < 3:
        raise ValueError("Cayley tree order d must be >= 3")
    if n < 0:
        raise ValueError("Cayley tree generation n must be >= 0")
    edges = []
    frontier = [1]
    count = 1
    for gen in range(n):
        branching = d if gen == 0 else d - 1
        nxt = []
        for parent in frontier:
            for _ in range(branching):
                count += 1
                edges.append((parent, count))
                nxt.append(count)
        frontier = nxt
    return Graph.from_edges(count, edges, directed=False)


def _binary_tree_edges(levels: int, offset: int) -> list[tuple[int, int]]:
    size = 2**levels - 1
    return [(offset + (k // 2), offset + k) for k in range(2, size + 1)]


def _glued(n: int, perm: np.ndarray) -> Graph:
    if n < 1:
        raise ValueError("glued binary tree needs n >= 1")
    size = 2 ** (n + 1) - 1
    leaves = np.arange(2**n, size + 1)
    edges = _binary_tree_edges(n + 1, 0) + _binary_tree_edges(n + 1, size)
    edges += [(int(leaves[i]), int(size + leaves[perm[i]])) for i in range(leaves.size)]
    return Graph.from_edges(2 * size, edges, directed=False)


def glued_binary_tree(n: int) -> Graph:
    """Two complete (n+1)-level binary trees joined leaf to leaf in order.

    Both trees are numbered in heap order; the second tree's labels follow
    the first's.
    """
    return _glued(n, np.arange(2**n) if n >= 1 else np.arange(0))


def random_glued_binary_tree(n: int, seed: int) -> Graph:
    if n < 1:
        raise ValueError("glued binary tree needs n >= 1")
    perm = np.random.default_rng(seed).permutation(2**n)
    return _glued(n, perm)


def erdos_renyi(n: int, m: int, seed: int, directed: bool = True) -> Graph:
    """``m`` distinct unit-weight edges drawn uniformly among ``n`` vertices, no self-loops."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pairs = n * (n - 1) if directed else n * (n - 1) // 2
    if not 0 <= m <= pairs:
        raise ValueError(f"cannot place {m} edges on {n} vertices")
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(pairs, size=m, replace=False))
    edges = []
    if directed:
        for k in chosen:
            src, r = divmod(int(k), n - 1)
            dst = r if r < src else r + 1
            edges.append((src + 1, dst + 1))
    else:
        iu, ju = np.triu_indices(n, k=1)
        edges = [(int(iu[k]) + 1, int(ju[k]) + 1) for k in chosen]
    return Graph.from_edges(n, edges, directed=directed)
