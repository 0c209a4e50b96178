"""Ready-made case studies: line-graph transition, pure dephasing, FMO sink, quantum PageRank."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np

from . import io
from .graph import Graph, line_graph
from .linalg import DEFAULT_TOL
from .operators import (
    LindbladSet,
    classical_pagerank,
    dephasing_set,
    generator_matrix,
    hamiltonian,
    lindblad_set,
    pagerank_lindblad_set,
)
from .walk import Superoperator, WalkResult, maximally_mixed, pure_state, walk_series

LINE_DEFAULTS = {"n": 51, "gamma": 1.0, "omegas": (0.0, 0.1, 0.5, 1.0), "t": 10.0, "steps": 20}
FMO_DEFAULTS = {"gamma": 1.0, "omega": 0.1, "alpha": 100.0, "t": 2.0, "steps": 40, "init": 6}
PAGERANK_DEFAULTS = {"gamma": 1.0, "omega": 0.8, "alpha": 0.85, "t": 100.0}

# Seven-chromophore FMO Hamiltonian in cm^-1; one time unit is 5.309 ps.
FMO_HAMILTONIAN = np.array(
    [
        [200.0, -96.0, 5.0, -4.4, 4.7, -12.6, -6.2],
        [-96.0, 320.0, 33.1, 6.8, 4.5, 7.4, -0.3],
        [5.0, 33.1, 0.0, -51.1, 0.8, -8.4, 7.6],
        [-4.4, 6.8, -51.1, 110.0, -76.6, -14.2, -67.0],
        [4.7, 4.5, 0.8, -76.6, 270.0, 78.3, -0.1],
        [-12.6, 7.4, -8.4, -14.2, 78.3, 420.0, 38.3],
        [-6.2, -0.3, 7.6, -67.0, -0.1, 38.3, 230.0],
    ]
)
FMO_TIME_UNIT_PS = 5.309
FMO_SINK = 8
FMO_TRAP = 3


def line_operators(n: int = 51, gamma: float = 1.0, lindblad: str = "canonical"):
    g = line_graph(n)
    h = hamiltonian(g, gamma)
    if lindblad == "canonical":
        lk = lindblad_set(generator_matrix(g, gamma))
    elif lindblad == "dephasing":
        lk = dephasing_set(n)
    else:
        raise ValueError(f"unknown Lindblad kind {lindblad!r}")
    return h, lk


def run_line(
    omegas=LINE_DEFAULTS["omegas"],
    n: int = 51,
    gamma: float = 1.0,
    t: float = 10.0,
    steps: int = 20,
    init: int | None = None,
    lindblad: str = "canonical",
    tol: float = DEFAULT_TOL,
    jobs: int = 1,
) -> dict[float, WalkResult]:
    """Population series for each omega, starting at the middle vertex by default."""
    init = (n + 1) // 2 if init is None else init
    h, lk = line_operators(n, gamma, lindblad)
    rho0 = pure_state(n, init)

    def one(omega):
        return walk_series(Superoperator(h, lk, omega), rho0, t / steps, steps, tol)

    omegas = [float(w) for w in omegas]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, omegas))
    else:
        results = [one(w) for w in omegas]
    return dict(zip(omegas, results))


def fmo_operators(gamma: float = 1.0, alpha: float = 100.0):
    """Padded 8x8 Hamiltonian and Lindblad set with a sink fed from chromophore 3."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    h = np.zeros((FMO_SINK, FMO_SINK))
    h[:7, :7] = FMO_HAMILTONIAN
    sink = LindbladSet(FMO_SINK, [FMO_SINK - 1], [FMO_TRAP - 1], [np.sqrt(alpha * gamma)])
    return h, lindblad_set(h) + sink


def run_fmo(
    gamma: float = 1.0,
    omega: float = 0.1,
    alpha: float = 100.0,
    t: float = 2.0,
    steps: int = 40,
    init: int = 6,
    tol: float = DEFAULT_TOL,
) -> WalkResult:
    h, lk = fmo_operators(gamma, alpha)
    return walk_series(Superoperator(h, lk, omega), pure_state(FMO_SINK, init), t / steps, steps, tol)


def pagerank_graph() -> Graph:
    """The bundled seven-vertex directed graph (a reconstruction, see the data file)."""
    ref = resources.files("stochwalk") / "data" / "pagerank_graph.txt"
    with resources.as_file(ref) as path:
        return io.read_edge_list(path)


def quantum_pagerank(
    g: Graph,
    omega: float = 0.8,
    alpha: float = 0.85,
    gamma: float = 1.0,
    t: float = 100.0,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Populations at time ``t`` starting from the maximally mixed state."""
    so = Superoperator(hamiltonian(g, gamma), pagerank_lindblad_set(g, alpha, gamma), omega)
    return so.populations(so.propagate(maximally_mixed(g.n), t, tol))


def run_pagerank(
    g: Graph | None = None,
    omega: float = 0.8,
    alpha: float = 0.85,
    gamma: float = 1.0,
    t: float = 100.0,
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """``(classical, quantum)`` ranks."""
    g = pagerank_graph() if g is None else g
    return classical_pagerank(g, alpha), quantum_pagerank(g, omega, alpha, gamma, t, tol)
