"""Walk operators derived from a graph: generator, Hamiltonian, Lindblad sets, Google matrix."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .graph import Graph, symmetrize


def _check_gamma(gamma: float) -> None:
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")


def generator_matrix(g: Graph, gamma: float = 1.0) -> sparse.csr_matrix:
    """Classical generator: ``-gamma*A`` off the diagonal, ``gamma*outDeg`` on it.

    Self-loops do not enter either part, so every column sums to zero.
    """
    _check_gamma(gamma)
    a = g.adjacency.copy()
    a.setdiag(0)
    a.eliminate_zeros()
    outdeg = np.asarray(a.sum(axis=0)).ravel()
    m = -gamma * a + sparse.diags(gamma * outdeg)
    m = sparse.csr_matrix(m)
    m.eliminate_zeros()
    m.sort_indices()
    return m


def hamiltonian(g: Graph, gamma: float = 1.0) -> sparse.csr_matrix:
    """Real symmetric Hamiltonian from the max-symmetrized graph (positive diagonal)."""
    return generator_matrix(symmetrize(g), gamma)


@dataclass(frozen=True, eq=False)
class LindbladSet:
    """Ordered Lindblad operators.

    Rank-one members ``amp * |row><col|`` are kept as index/amplitude arrays
    (0-based); arbitrary operators go in ``general``. Rank-one members come
    first in iteration order.
    """

    n: int
    rows: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    cols: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    amps: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    general: tuple = ()

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.intp)
        cols = np.asarray(self.cols, dtype=np.intp)
        amps = np.asarray(self.amps, dtype=complex)
        if not rows.shape == cols.shape == amps.shape or rows.ndim != 1:
            raise ValueError("rows, cols and amps must be equal-length 1-d arrays")
        if rows.size and (rows.min() < 0 or cols.min() < 0 or max(rows.max(), cols.max()) >= self.n):
            raise ValueError(f"Lindblad operator index outside 0..{self.n - 1}")
        general = tuple(sparse.csr_matrix(op, dtype=complex) for op in self.general)
        for op in general:
            if op.shape != (self.n, self.n):
                raise ValueError(f"Lindblad operator shape {op.shape} does not match n={self.n}")
        for arr in (rows, cols, amps):
            arr.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "general", general)

    @classmethod
    def from_matrices(cls, ops) -> LindbladSet:
        """Wrap arbitrary operators, keeping single-entry ones in compact form."""
        ops = [sparse.csr_matrix(op, dtype=complex) for op in ops]
        if not ops:
            raise ValueError("from_matrices needs at least one operator to fix the dimension")
        n = ops[0].shape[0]
        rows, cols, amps, general = [], [], [], []
        for op in ops:
            op.eliminate_zeros()
            if op.nnz == 1 and op.shape == (n, n):
                coo = op.tocoo()
                rows.append(coo.row[0])
                cols.append(coo.col[0])
                amps.append(coo.data[0])
            else:
                general.append(op)
        return cls(n, rows, cols, amps, tuple(general))

    @property
    def rank_one_count(self) -> int:
        return int(self.amps.size)

    def __len__(self) -> int:
        return self.rank_one_count + len(self.general)

    def __add__(self, other: LindbladSet) -> LindbladSet:
        if not isinstance(other, LindbladSet):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("cannot combine Lindblad sets of different dimension")
        return LindbladSet(
            self.n,
            np.concatenate([self.rows, other.rows]),
            np.concatenate([self.cols, other.cols]),
            np.concatenate([self.amps, other.amps]),
            self.general + other.general,
        )

    def entries(self) -> list[tuple[int, int, complex]]:
        """Rank-one members as 1-based ``(i, j, amplitude)``."""
        return [(int(i) + 1, int(j) + 1, complex(c)) for i, j, c in zip(self.rows, self.cols, self.amps)]

    def matrices(self) -> list[sparse.csr_matrix]:
        """Materialize every member as an ``n x n`` sparse matrix."""
        out = [
            sparse.csr_matrix(([c], ([i], [j])), shape=(self.n, self.n), dtype=complex)
            for i, j, c in zip(self.rows, self.cols, self.amps)
        ]
        return out + list(self.general)


def lindblad_set(m) -> LindbladSet:
    """One operator ``sqrt|m_ij| |i><j|`` per nonzero entry, column-major order.

    Diagonal entries are included; they act as weighted dephasing.
    """
    m = sparse.csc_matrix(m)
    m.eliminate_zeros()
    m.sort_indices()
    coo = m.tocoo()
    order = np.lexsort((coo.row, coo.col))
    rows, cols = coo.row[order], coo.col[order]
    amps = np.sqrt(np.abs(coo.data[order])).astype(complex)
    return LindbladSet(m.shape[0], rows, cols, amps)


def dephasing_set(n: int) -> LindbladSet:
    """Pure dephasing: ``|k><k|`` for every vertex."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = np.arange(n)
    return LindbladSet(n, idx, idx, np.ones(n, dtype=complex))


def google_matrix(g: Graph, alpha: float = 0.85) -> np.ndarray:
    """Column-stochastic Google matrix with damping ``alpha``.

    Columns of vertices without out-edges are uniform.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    n = g.n
    a = g.adjacency.toarray()
    np.fill_diagonal(a, 0.0)
    outdeg = a.sum(axis=0)
    out = np.full((n, n), 1.0 / n)
    live = outdeg > 0
    out[:, live] = alpha * a[:, live] / outdeg[live] + (1.0 - alpha) / n
    return out


def pagerank_lindblad_set(g: Graph, alpha: float = 0.85, gamma: float = 1.0) -> LindbladSet:
    """Operators ``sqrt(gamma * G_ij) |i><j|`` from the Google matrix."""
    _check_gamma(gamma)
    return lindblad_set(gamma * google_matrix(g, alpha))


def classical_pagerank(
    g: Graph, alpha: float = 0.85, tol: float = 1e-13, max_iter: int = 10_000
) -> np.ndarray:
    """Stationary vector of the Google matrix by power iteration."""
    gm = google_matrix(g, alpha)
    p = np.full(g.n, 1.0 / g.n)
    for _ in range(max_iter):
        nxt = gm @ p
        nxt /= nxt.sum()
        if np.abs(nxt - p).max() < tol:
            return nxt
        p = nxt
    raise RuntimeError(f"PageRank power iteration did not converge in {max_iter} iterations")
