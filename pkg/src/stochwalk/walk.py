"""Propagators for classical, quantum and quantum stochastic walks."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .linalg import DEFAULT_TOL, expm_action, kron, matricize, vectorize
from .operators import LindbladSet

logger = logging.getLogger(__name__)

STATE_TOL = 1e-10
# states produced by a previous step carry the integrator's error
CHAIN_TOL = 1e-6


def _square(h, name: str) -> sparse.csr_matrix:
    h = sparse.csr_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"{name} must be square, got shape {h.shape}")
    return h


def _check_time(t: float) -> None:
    if not t >= 0:
        raise ValueError(f"time must be nonnegative, got {t}")


def check_density_matrix(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Validate Hermiticity, unit trace and populations of ``rho``; return it as an array."""
    if sparse.issparse(rho):
        rho = rho.toarray()
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max(initial=0.0) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real:.12g}, expected 1")
    diag = rho.diagonal().real
    if diag.min() < -tol or diag.max() > 1.0 + tol:
        raise ValueError("density matrix populations must lie in [0, 1]")
    return rho


def pure_state(n: int, vertex: int) -> np.ndarray:
    """``|q><q|`` for a 1-based vertex ``q``."""
    if not 1 <= vertex <= n:
        raise ValueError(f"vertex {vertex} outside 1..{n}")
    rho = np.zeros((n, n), dtype=complex)
    rho[vertex - 1, vertex - 1] = 1.0
    return rho


def maximally_mixed(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex) / n


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.vdot(rho.conj().T, rho)))


@dataclass(frozen=True)
class PropagationInfo:
    asymmetry: float
    trace_drift: float


class Superoperator:
    """Vectorized QSW generator for fixed ``(H, Lindblad set, omega)``.

    Built once and reused for any number of propagations; instances are
    read-only after construction.
    """

    def __init__(self, h, lindblads: LindbladSet, omega: float, method: str = "closed"):
        h = _square(h, "Hamiltonian")
        n = h.shape[0]
        if lindblads.n != n:
            raise ValueError(f"Lindblad operators are {lindblads.n}x{lindblads.n}, Hamiltonian is {n}x{n}")
        if not 0.0 <= omega <= 1.0:
            raise ValueError(f"omega must lie in [0, 1], got {omega}")
        if method not in ("closed", "kron"):
            raise ValueError(f"unknown assembly method {method!r}")
        self.n = n
        self.omega = float(omega)
        self.hamiltonian = h
        self.lindblads = lindblads
        self.matrix = _assemble(h, lindblads, self.omega, method)

    @property
    def shape(self):
        return self.matrix.shape

    def propagate(
        self,
        rho0,
        t: float,
        tol: float = DEFAULT_TOL,
        *,
        dense_limit: int | None = None,
        return_info: bool = False,
        state_tol: float = STATE_TOL,
    ):
        """Evolve ``rho0`` to time ``t``.

        The result is re-Hermitized; its trace is left alone so that drift
        stays visible. With ``return_info`` the pre-repair asymmetry and
        trace drift are returned alongside.
        """
        rho0 = check_density_matrix(rho0, state_tol)
        if rho0.shape[0] != self.n:
            raise ValueError(f"density matrix is {rho0.shape[0]}x{rho0.shape[0]}, walk is {self.n}x{self.n}")
        _check_time(t)
        if t == 0:
            rho = rho0.copy()
            info = PropagationInfo(0.0, abs(np.trace(rho) - 1.0))
            return (rho, info) if return_info else rho

        rho = matricize(expm_action(self.matrix, vectorize(rho0), t, tol, dense_limit=dense_limit))
        asym = float(np.abs(rho - rho.conj().T).max())
        rho = 0.5 * (rho + rho.conj().T)
        drift = float(abs(np.trace(rho) - 1.0))
        if asym > 1e-8 or drift > 1e-8:
            logger.warning("QSW state drift: asymmetry %.3e, trace error %.3e", asym, drift)
        else:
            logger.debug("QSW state drift: asymmetry %.3e, trace error %.3e", asym, drift)
        info = PropagationInfo(asym, drift)
        return (rho, info) if return_info else rho

    step = propagate

    @staticmethod
    def populations(rho) -> np.ndarray:
        return np.real(np.diagonal(rho)).copy()


def _assemble(h, lk: LindbladSet, omega: float, method: str) -> sparse.csr_matrix:
    n = h.shape[0]
    eye = sparse.identity(n, dtype=complex, format="csr")
    total = sparse.csr_matrix((n * n, n * n), dtype=complex)
    if omega < 1.0:
        coherent = kron(eye, h) - kron(h.T, eye)
        total = total + (-(1.0 - omega) * 1j) * coherent
    if omega > 0.0 and len(lk):
        if method == "closed":
            dissipator = _rank_one_dissipator(lk) + _generic_dissipator(lk.general, n)
        else:
            dissipator = _generic_dissipator(lk.matrices(), n)
        total = total + omega * dissipator
    total = sparse.csr_matrix(total)
    total.sum_duplicates()
    total.eliminate_zeros()
    total.sort_indices()
    return total


def _rank_one_dissipator(lk: LindbladSet) -> sparse.csr_matrix:
    # c|i><j| jumps vec index j*n+j -> i*n+i with weight |c|^2 and damps every
    # coherence touching column j by |c|^2/2.
    n = lk.n
    weights = np.abs(lk.amps) ** 2
    jump = sparse.coo_matrix(
        (weights.astype(complex), (lk.rows * (n + 1), lk.cols * (n + 1))), shape=(n * n, n * n)
    )
    outflow = np.bincount(lk.cols, weights=weights, minlength=n)
    damping = -0.5 * np.add.outer(outflow, outflow).ravel()
    return sparse.csr_matrix(jump) + sparse.diags(damping.astype(complex), format="csr")


def _generic_dissipator(ops, n: int) -> sparse.csr_matrix:
    eye = sparse.identity(n, dtype=complex, format="csr")
    out = sparse.csr_matrix((n * n, n * n), dtype=complex)
    for op in ops:
        op = sparse.csr_matrix(op, dtype=complex)
        ldl = op.conj().T @ op
        out = out + kron(op.conj(), op) - 0.5 * (kron(eye, ldl) + kron(ldl.T, eye))
    return out


def assemble_superoperator(h, lindblads: LindbladSet, omega: float, method: str = "closed") -> Superoperator:
    return Superoperator(h, lindblads, omega, method)


def quantum_stochastic_walk(
    h,
    lindblads: LindbladSet,
    omega: float,
    rho0,
    t: float,
    tol: float = DEFAULT_TOL,
    *,
    dense_limit: int | None = None,
) -> np.ndarray:
    """Density matrix at time ``t`` of the QSW started from ``rho0``."""
    return Superoperator(h, lindblads, omega).propagate(rho0, t, tol, dense_limit=dense_limit)


class QuantumPropagator:
    """Unitary walk ``exp(-iHt)`` on state vectors."""

    def __init__(self, h):
        h = _square(h, "Hamiltonian")
        if abs(h - h.conj().T).max() > STATE_TOL:
            raise ValueError("Hamiltonian must be Hermitian")
        self.n = h.shape[0]
        self.hamiltonian = h
        self._generator = sparse.csr_matrix(-1j * h)

    def step(
        self, psi0, t: float, tol: float = DEFAULT_TOL, *, dense_limit: int | None = None, state_tol: float = STATE_TOL
    ) -> np.ndarray:
        psi0 = np.asarray(psi0, dtype=complex)
        if psi0.shape != (self.n,):
            raise ValueError(f"state has shape {psi0.shape}, expected ({self.n},)")
        if abs(np.linalg.norm(psi0) - 1.0) > state_tol:
            raise ValueError("initial state must have unit norm")
        _check_time(t)
        return expm_action(self._generator, psi0, t, tol, dense_limit=dense_limit)

    @staticmethod
    def populations(psi) -> np.ndarray:
        return np.abs(psi) ** 2


class ClassicalPropagator:
    """Continuous-time random walk ``exp(-Mt)`` on probability vectors."""

    def __init__(self, m):
        m = _square(m, "generator matrix")
        self.n = m.shape[0]
        self.generator = m
        self._neg = sparse.csr_matrix(-m.astype(float))

    def step(
        self, p0, t: float, tol: float = DEFAULT_TOL, *, dense_limit: int | None = None, state_tol: float = STATE_TOL
    ) -> np.ndarray:
        p0 = np.asarray(p0, dtype=float)
        if p0.shape != (self.n,):
            raise ValueError(f"probability vector has shape {p0.shape}, expected ({self.n},)")
        if p0.min(initial=0.0) < -state_tol or abs(p0.sum() - 1.0) > state_tol:
            raise ValueError("initial probabilities must be nonnegative and sum to 1")
        _check_time(t)
        return np.real(expm_action(self._neg, p0, t, tol, dense_limit=dense_limit))

    @staticmethod
    def populations(p) -> np.ndarray:
        return np.asarray(p, dtype=float).copy()


def quantum_walk(h, psi0, t: float, tol: float = DEFAULT_TOL, *, dense_limit: int | None = None) -> np.ndarray:
    return QuantumPropagator(h).step(psi0, t, tol, dense_limit=dense_limit)


def classical_random_walk(m, p0, t: float, tol: float = DEFAULT_TOL, *, dense_limit: int | None = None) -> np.ndarray:
    return ClassicalPropagator(m).step(p0, t, tol, dense_limit=dense_limit)


@dataclass
class WalkResult:
    times: np.ndarray
    states: list
    populations: np.ndarray


def walk_series(
    propagator,
    state0,
    dt: float,
    steps: int,
    tol: float = DEFAULT_TOL,
    *,
    dense_limit: int | None = None,
) -> WalkResult:
    """Evolve in ``steps`` increments of ``dt``, feeding each state into the next step.

    ``propagator`` is a :class:`Superoperator`, :class:`QuantumPropagator`
    or :class:`ClassicalPropagator`.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    states = [state0]
    state = state0
    for k in range(steps):
        state_tol = STATE_TOL if k == 0 else CHAIN_TOL
        state = propagator.step(state, dt, tol, dense_limit=dense_limit, state_tol=state_tol)
        states.append(state)
    times = dt * np.arange(steps + 1)
    pops = np.array([propagator.populations(s) for s in states])
    return WalkResult(times, states, pops)


def stationary_state(
    propagator,
    state0,
    dt: float,
    eps: float = 1e-8,
    max_steps: int = 10_000,
    tol: float = DEFAULT_TOL,
    *,
    dense_limit: int | None = None,
):
    """Step until the largest population change per step drops below ``eps``.

    Returns ``(state, converged, steps_used)``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not dt > 0:
        raise ValueError("dt must be positive")
    state = state0
    prev = propagator.populations(state)
    for k in range(1, max_steps + 1):
        state_tol = STATE_TOL if k == 1 else CHAIN_TOL
        state = propagator.step(state, dt, tol, dense_limit=dense_limit, state_tol=state_tol)
        pops = propagator.populations(state)
        if np.abs(pops - prev).max() < eps:
            return state, True, k
        prev = pops
    return state, False, max_steps
