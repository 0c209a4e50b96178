"""Classical, quantum and quantum stochastic walks on weighted directed graphs."""

__version__ = "0.1.0"

from .graph import (
    Graph,
    cayley_tree,
    erdos_renyi,
    glued_binary_tree,
    line_graph,
    out_degree,
    random_glued_binary_tree,
    symmetrize,
)
from .linalg import ConvergenceError, dense_expm, expm_action, kron, matricize, vectorize
from .operators import (
    LindbladSet,
    classical_pagerank,
    dephasing_set,
    generator_matrix,
    google_matrix,
    hamiltonian,
    lindblad_set,
    pagerank_lindblad_set,
)
from .walk import (
    ClassicalPropagator,
    QuantumPropagator,
    Superoperator,
    WalkResult,
    assemble_superoperator,
    classical_random_walk,
    maximally_mixed,
    pure_state,
    purity,
    quantum_stochastic_walk,
    quantum_walk,
    stationary_state,
    walk_series,
)
