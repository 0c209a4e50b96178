"""Sparse complex kernels: Kronecker products, vectorization, exponential action."""

from __future__ import annotations

import logging
import math
import os

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import norm as sparse_norm

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DENSE_LIMIT_ENV = "STOCHWALK_DENSE_LIMIT"
MAX_KRON_DIM = 2**31 - 1


class ConvergenceError(RuntimeError):
    """Raised when the exponential action misses its tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (estimated error {residual:.3e})")
        self.residual = residual


def default_dense_limit() -> int:
    """Dimension up to which dense exponentials are used; overridable by env."""
    raw = os.environ.get(DENSE_LIMIT_ENV)
    if raw is None:
        return 256
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{DENSE_LIMIT_ENV} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError(f"{DENSE_LIMIT_ENV} must be nonnegative")
    return value


def as_sparse(a) -> sparse.csr_matrix:
    """Canonical CSR form: duplicates summed, explicit zeros dropped."""
    m = sparse.csr_matrix(a, dtype=np.result_type(getattr(a, "dtype", float), float))
    m.sum_duplicates()
    m.eliminate_zeros()
    return m


def kron(a, b, max_dim: int = MAX_KRON_DIM) -> sparse.csr_matrix:
    """Sparse Kronecker product ``a ⊗ b``."""
    a = sparse.coo_matrix(a)
    b = sparse.coo_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > max_dim or cols > max_dim:
        raise ValueError(f"Kronecker product dimension {rows}x{cols} exceeds limit {max_dim}")
    return as_sparse(sparse.kron(a, b, format="csr"))


def vectorize(m) -> np.ndarray:
    """Stack the columns of a square matrix into one vector."""
    if sparse.issparse(m):
        m = m.toarray()
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"vectorize expects a square matrix, got shape {m.shape}")
    return m.reshape(-1, order="F").copy()


def matricize(v) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    v = np.asarray(v).ravel()
    n = math.isqrt(v.size)
    if n * n != v.size:
        raise ValueError("length of vec must be an integer squared")
    return v.reshape((n, n), order="F").copy()


def dense_expm(a, limit: int | None = None) -> np.ndarray:
    """Matrix exponential of a dense square matrix (scaling and squaring, Padé)."""
    if sparse.issparse(a):
        a = a.toarray()
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"dense_expm expects a square matrix, got shape {a.shape}")
    if limit is None:
        limit = default_dense_limit()
    if a.shape[0] > limit:
        raise ValueError(f"dimension {a.shape[0]} exceeds dense limit {limit}")
    return scipy.linalg.expm(a)


def _round_step(step: float) -> float:
    # keep two significant digits, rounding up
    scale = 10.0 ** (math.floor(math.log10(step)) - 1)
    return math.ceil(step / scale) * scale


def expm_action(
    a,
    v,
    t: float = 1.0,
    tol: float = DEFAULT_TOL,
    *,
    krylov_dim: int = 30,
    dense_limit: int | None = None,
    max_steps: int = 100_000,
) -> np.ndarray:
    """Return ``exp(t*a) @ v`` without forming the exponential of a large ``a``.

    Below ``dense_limit`` the dense exponential is used. Otherwise an
    Arnoldi approximation with adaptive sub-steps and a corrected local
    error estimate keeps the accumulated error near ``tol`` relative to
    the solution norm.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"expected a square operator, got shape {a.shape}")
    v = np.asarray(v)
    if v.shape != (n,):
        raise ValueError(f"vector length {v.shape} does not match operator dimension {n}")
    dtype = np.result_type(a.dtype, v.dtype, float)
    v = v.astype(dtype, copy=True)
    if dense_limit is None:
        dense_limit = default_dense_limit()

    if t == 0:
        return v
    if n <= dense_limit:
        return dense_expm(t * (a.toarray() if sparse.issparse(a) else a), limit=n) @ v

    a = sparse.csr_matrix(a)
    return _krylov_expv(a, v, t, tol, min(krylov_dim, n), max_steps)


def _krylov_expv(a, v, t, tol, m, max_steps):
    """Adaptive Arnoldi exponential integrator (after Sidje's expv)."""
    beta = np.linalg.norm(v)
    if beta == 0.0:
        return v
    anorm = sparse_norm(a, np.inf)
    if anorm == 0.0:
        return v

    t_out = abs(t)
    sign = 1.0 if t > 0 else -1.0
    # local tolerance is per unit time, relative to the current solution norm
    abs_tol = tol * beta / t_out
    breakdown_tol = 1e-13 * anorm
    safety, delta, max_reject = 0.9, 1.2, 10
    eps = np.finfo(float).eps
    rndoff = anorm * eps

    fact = ((m + 1) / math.e) ** (m + 1) * math.sqrt(2.0 * math.pi * (m + 1))
    t_new = (1.0 / anorm) * ((fact * abs_tol) / (4.0 * beta * anorm)) ** (1.0 / m)
    t_new = _round_step(t_new)

    w = v
    t_now = 0.0
    total_error = 0.0
    steps = 0
    dtype = v.dtype if np.iscomplexobj(v) else np.result_type(a.dtype, float)
    while t_now < t_out:
        steps += 1
        if steps > max_steps:
            raise ConvergenceError(f"exponential action exceeded {max_steps} sub-steps", total_error)
        t_step = min(t_out - t_now, t_new)

        basis = np.zeros((m + 1, w.size), dtype=dtype)
        hess = np.zeros((m + 2, m + 2), dtype=dtype)
        basis[0] = w / beta
        happy = False
        mb = m
        for j in range(m):
            p = a @ basis[j]
            for i in range(j + 1):
                h = np.vdot(basis[i], p)
                hess[i, j] = h
                p -= h * basis[i]
            s = np.linalg.norm(p)
            if s < breakdown_tol:
                happy = True
                mb = j + 1
                t_step = t_out - t_now
                break
            hess[j + 1, j] = s
            basis[j + 1] = p / s

        if not happy:
            hess[m + 1, m] = 1.0
            avnorm = np.linalg.norm(a @ basis[m])

        rejects = 0
        while True:
            mx = mb if happy else m + 2
            f = scipy.linalg.expm(sign * t_step * hess[:mx, :mx])
            if happy:
                err_loc = rndoff
                xm = 1.0 / m
                break
            phi1 = abs(beta * f[m, 0])
            phi2 = abs(beta * f[m + 1, 0] * avnorm)
            if phi1 > 10.0 * phi2:
                err_loc, xm = phi2, 1.0 / m
            elif phi1 > phi2:
                err_loc, xm = phi1 * phi2 / (phi1 - phi2), 1.0 / m
            else:
                err_loc, xm = phi1, 1.0 / max(m - 1, 1)
            if err_loc <= delta * t_step * abs_tol:
                break
            rejects += 1
            if rejects > max_reject:
                raise ConvergenceError("exponential action step rejected too often", err_loc)
            t_step = _round_step(safety * t_step * (t_step * abs_tol / err_loc) ** xm)

        mx = mb if happy else m + 1
        w = basis[:mx].T @ (beta * f[:mx, 0])
        beta = np.linalg.norm(w)
        abs_tol = tol * beta / t_out
        t_now += t_step
        total_error += max(err_loc, rndoff)
        if beta == 0.0:
            break
        if not happy:
            t_new = _round_step(safety * t_step * (t_step * abs_tol / max(err_loc, rndoff)) ** xm)

    logger.debug("expm_action: %d sub-steps, error estimate %.3e", steps, total_error)
    return w
