"""Graph ingestion (edge lists, Matrix Market) and result files."""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np
import scipy.io
from scipy import sparse

from .graph import Graph


class GraphFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_edge_list(path) -> Graph:
    """Parse ``src dst [weight]`` lines (1-based) into a :class:`Graph`.

    An optional ``# vertices N`` line fixes the vertex count; other lines
    starting with ``#`` are comments. The graph is marked undirected when
    the resulting adjacency is symmetric.
    """
    declared = None
    edges: dict[tuple[int, int], float] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if parts and parts[0] == "vertices":
                    if len(parts) != 2:
                        raise GraphFormatError("malformed '# vertices N' header", lineno)
                    try:
                        declared = int(parts[1])
                    except ValueError:
                        raise GraphFormatError(f"bad vertex count {parts[1]!r}", lineno) from None
                    if declared < 1:
                        raise GraphFormatError("vertex count must be positive", lineno)
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(f"expected 'src dst [weight]', got {line!r}", lineno)
            try:
                src, dst = int(parts[0]), int(parts[1])
                weight = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise GraphFormatError(f"cannot parse {line!r}", lineno) from None
            if src < 1 or dst < 1:
                raise GraphFormatError("vertex indices start at 1", lineno)
            if not (weight > 0 and np.isfinite(weight)):
                raise GraphFormatError(f"weight must be positive, got {parts[2]}", lineno)
            if (src, dst) in edges:
                raise GraphFormatError(f"duplicate edge {src} -> {dst}", lineno)
            edges[(src, dst)] = weight

    n = max((max(s, d) for s, d in edges), default=0)
    if declared is not None:
        if n > declared:
            raise GraphFormatError(f"edge references vertex {n} but header declares {declared}")
        n = declared
    if n < 1:
        raise GraphFormatError("edge list defines no vertices")
    rows = [d - 1 for _, d in edges]
    cols = [s - 1 for s, _ in edges]
    a = sparse.csr_matrix((list(edges.values()), (rows, cols)), shape=(n, n))
    return Graph(n, a, directed=bool((a != a.T).nnz))


def format_edge_list(g: Graph) -> str:
    lines = [f"# vertices {g.n}"]
    lines += [f"{s} {d} {_fmt(w)}" for s, d, w in g.edges()]
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path) -> None:
    """Write every stored entry, so undirected edges appear in both directions."""
    atomic_write(path, format_edge_list(g))


def read_matrix_market(path) -> Graph:
    """Read a real or pattern coordinate Matrix Market file.

    Entry ``(row, col)`` is the edge col -> row. Symmetric files give
    undirected graphs.
    """
    try:
        rows, cols, _, fmt, field, symmetry = scipy.io.mminfo(path)
    except (ValueError, IndexError) as exc:
        raise GraphFormatError(f"not a Matrix Market file: {exc}") from None
    if fmt != "coordinate":
        raise GraphFormatError(f"only coordinate format is supported, got {fmt}")
    if field not in ("real", "integer", "pattern"):
        raise GraphFormatError(f"unsupported field {field!r}; weights must be real")
    if symmetry not in ("general", "symmetric"):
        raise GraphFormatError(f"unsupported symmetry {symmetry!r}")
    if rows != cols:
        raise GraphFormatError(f"adjacency must be square, got {rows}x{cols}")
    try:
        a = sparse.csr_matrix(scipy.io.mmread(path), dtype=float)
    except ValueError as exc:
        raise GraphFormatError(f"malformed Matrix Market body: {exc}") from None
    a.sum_duplicates()
    a.eliminate_zeros()
    if a.nnz and a.data.min() <= 0:
        raise GraphFormatError("edge weights must be positive")
    return Graph(rows, a, directed=(symmetry == "general"))


def write_populations(result, path, metadata: dict | None = None) -> Path:
    """Write ``t,p1..pN`` rows with 17 significant digits, plus a JSON sidecar.

    Returns the sidecar path.
    """
    path = Path(path)
    pops = np.asarray(result.populations, dtype=float)
    n = pops.shape[1]
    lines = [",".join(["t"] + [f"p{i}" for i in range(1, n + 1)])]
    for t, row in zip(result.times, pops):
        lines.append(",".join([_fmt(t)] + [_fmt(x) for x in row]))
    atomic_write(path, "\n".join(lines) + "\n")
    sidecar = path.with_suffix(".json")
    if metadata is not None:
        write_metadata(metadata, sidecar)
    return sidecar


def write_metadata(metadata: dict, path) -> None:
    atomic_write(path, json.dumps(metadata, indent=2, sort_keys=True) + "\n")


def read_populations(path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`write_populations`; returns ``(times, populations)``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "t":
            raise GraphFormatError("population file must start with a 't' column", 1)
        rows = [[float(x) for x in row] for row in reader if row]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return data[:, 0], data[:, 1:]


def write_density_matrix(rho, path) -> None:
    """Flat ``i,j,re,im`` rows (1-based) for every entry of ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    lines = ["i,j,re,im"]
    for i in range(rho.shape[0]):
        for j in range(rho.shape[1]):
            z = rho[i, j]
            lines.append(f"{i + 1},{j + 1},{_fmt(z.real)},{_fmt(z.imag)}")
    atomic_write(path, "\n".join(lines) + "\n")


def read_density_matrix(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        entries = [(int(i), int(j), float(re), float(im)) for i, j, re, im in reader]
    n = max(max(i, j) for i, j, _, _ in entries)
    rho = np.zeros((n, n), dtype=complex)
    for i, j, re, im in entries:
        rho[i - 1, j - 1] = complex(re, im)
    return rho
