"""Acceptance gate. Each test prints one PASS/FAIL line with the measured quantity."""

import resource
import time

import numpy as np
import pytest
import scipy.linalg
from scipy import sparse

from oracles import line_crw_closed_form, power_pagerank, random_adjacency, superoperator_by_columns
from stochwalk import cases
from stochwalk.graph import Graph, erdos_renyi, line_graph
from stochwalk.linalg import kron, matricize, vectorize
from stochwalk.operators import dephasing_set, generator_matrix, hamiltonian, lindblad_set
from stochwalk.walk import (
    Superoperator,
    classical_random_walk,
    pure_state,
    quantum_walk,
    walk_series,
)


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return emit


def canonical(g, gamma=1.0):
    return hamiltonian(g, gamma), lindblad_set(generator_matrix(g, gamma))


def limit_sweep():
    """Criterion-1 runs: 20 random directed weighted graphs, two times each."""
    rng = np.random.default_rng(2024)
    runs = []
    for _ in range(20):
        n = int(rng.integers(2, 13))
        g = Graph(n, sparse.csr_matrix(random_adjacency(rng, n, density=0.4)))
        h, lk = canonical(g)
        start = int(rng.integers(1, n + 1))
        for t in (0.5, 5.0):
            runs.append((g, h, lk, start, t))
    return runs


def test_1_limit_equivalence(report):
    t0 = time.perf_counter()
    worst_qw = worst_crw = 0.0
    for g, h, lk, start, t in limit_sweep():
        e = np.eye(g.n)[start - 1]
        rho0 = pure_state(g.n, start)
        coherent = Superoperator(h, lk, 0.0).propagate(rho0, t).diagonal().real
        qw = np.abs(quantum_walk(h, e.astype(complex), t)) ** 2
        incoherent = Superoperator(h, lk, 1.0).propagate(rho0, t).diagonal().real
        crw = classical_random_walk(generator_matrix(g, 1.0), e, t)
        worst_qw = max(worst_qw, np.abs(coherent - qw).max())
        worst_crw = max(worst_crw, np.abs(incoherent - crw).max())
    elapsed = time.perf_counter() - t0
    ok = worst_qw <= 1e-8 and worst_crw <= 1e-8 and elapsed < 60
    report("1 limit equivalence", ok, f"|QSW0-QW|={worst_qw:.2e} |QSW1-CRW|={worst_crw:.2e} in {elapsed:.1f}s")


def test_2_dense_oracle(report):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 11))
        g = Graph(n, sparse.csr_matrix(random_adjacency(rng, n, density=0.4)))
        h, lk = canonical(g)
        omega, t = rng.uniform(), rng.uniform(0.1, 5.0)
        x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        rho0 = x @ x.conj().T
        rho0 /= np.trace(rho0)
        sup = superoperator_by_columns(h.toarray(), [m.toarray() for m in lk.matrices()], omega)
        expected = matricize(scipy.linalg.expm(t * sup) @ vectorize(rho0))
        # force the Krylov path so the comparison is not dense against dense
        got = Superoperator(h, lk, omega).propagate(rho0, t, dense_limit=0)
        worst = max(worst, np.abs(got - expected).max())
    elapsed = time.perf_counter() - t0
    report("2 dense oracle", worst <= 1e-8 and elapsed < 60, f"max error {worst:.2e} over 50 trials in {elapsed:.1f}s")


def test_3_physical_invariants(report):
    drift = asym = 0.0
    min_eig = np.inf
    for g, h, lk, start, t in limit_sweep():
        for omega in (0.0, 0.5, 1.0):
            rho, info = Superoperator(h, lk, omega).propagate(pure_state(g.n, start), t, return_info=True)
            drift = max(drift, info.trace_drift)
            asym = max(asym, info.asymmetry)
            min_eig = min(min_eig, np.linalg.eigvalsh(rho).min())
    ok = drift <= 1e-8 and asym <= 1e-8 and min_eig >= -1e-8
    report("3 physical invariants", ok, f"trace drift {drift:.2e}, asymmetry {asym:.2e}, min eigenvalue {min_eig:.2e}")


def test_4_vectorization_identity(report):
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        x, y, z = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3))
        worst = max(worst, np.abs(vectorize(x @ y @ z) - kron(z.T, x) @ vectorize(y)).max())
    report("4 vectorization identity", worst <= 1e-12, f"max error {worst:.2e} over 100 triples")


def test_5_line_transition(report):
    n, mid, t = 51, 26, 5.0
    h, lk = canonical(line_graph(n))
    rho0 = pure_state(n, mid)
    coherent = Superoperator(h, lk, 0.0).propagate(rho0, t).diagonal().real
    incoherent = Superoperator(h, lk, 1.0).propagate(rho0, t).diagonal().real

    asym = np.abs(coherent - coherent[::-1]).max()
    peak = int(np.argmax(coherent)) + 1
    crw_err = np.abs(incoherent - line_crw_closed_form(n, 1.0, mid, t)).max()
    left, right = np.diff(incoherent[:mid]), np.diff(incoherent[mid - 1 :])
    unimodal = bool(np.all(left > 0) and np.all(right < 0))
    ok = asym <= 1e-8 and abs(peak - mid) > 5 and crw_err <= 1e-8 and unimodal
    detail = (f"omega=0 asymmetry {asym:.2e}, peak at vertex {peak}; "
              f"omega=1 closed-form error {crw_err:.2e}, unimodal={unimodal}")
    report("5 line-graph transition", ok, detail)


def test_6_dephasing_fixed_point(report):
    n = 51
    h, _ = canonical(line_graph(n))
    rho0 = pure_state(n, 26)
    rho = Superoperator(h, dephasing_set(n), 1.0).propagate(rho0, 10.0)
    err = np.abs(rho - rho0).max()
    report("6 dephasing fixed point", err <= 1e-10, f"max |rho(10)-rho(0)| = {err:.2e}")


@pytest.fixture(scope="module")
def fmo_series():
    h, lk = cases.fmo_operators(gamma=1.0, alpha=100.0)
    return walk_series(Superoperator(h, lk, 0.1), pure_state(8, 6), 0.05, 40)


def test_7a_fmo_sink_monotone(report, fmo_series):
    sink = fmo_series.populations[:, 7]
    worst = np.diff(sink).min()
    report("7a FMO sink nondecreasing", worst >= -1e-12, f"smallest increment {worst:.2e} over t=0..2")


def test_7b_fmo_sink_threshold(report, fmo_series):
    final = fmo_series.populations[-1, 7]
    report("7b FMO sink > 0.9 by t=2", final > 0.9, f"rho_88(2) = {final:.4f}")


def test_8_quantum_pagerank(report):
    g = cases.pagerank_graph()
    oracle = power_pagerank(g.adjacency.toarray(), 0.85)
    _, incoherent = cases.run_pagerank(g, omega=1.0, alpha=0.85, gamma=1.0, t=100.0)
    match = np.abs(incoherent - oracle).max()
    _, quantum = cases.run_pagerank(g, omega=0.8, alpha=0.85, gamma=1.0, t=100.0)
    lifted = [
        (i + 1, j + 1, abs(quantum[i] - quantum[j]))
        for i in range(g.n)
        for j in range(i + 1, g.n)
        if abs(oracle[i] - oracle[j]) < 1e-6 and abs(quantum[i] - quantum[j]) > 1e-3
    ]
    ok = match <= 1e-6 and bool(lifted)
    pairs = ", ".join(f"({i},{j}) dQ={d:.2e}" for i, j, d in lifted) or "none"
    report("8 quantum PageRank", ok, f"omega=1 vs power iteration {match:.2e}; degeneracy lifted: {pairs}")


def _er_run(n, seed=0):
    g = erdos_renyi(n, 4 * n, seed=seed)
    h, lk = canonical(g)
    t0 = time.perf_counter()
    Superoperator(h, lk, 0.5).propagate(pure_state(n, 1), 10.0)
    return time.perf_counter() - t0


def test_9_scaling(report):
    elapsed = _er_run(150)
    peak_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    sizes = [40, 80, 160]
    times = [_er_run(n) for n in sizes]
    slope = np.polyfit(np.log(sizes), np.log(times), 1)[0]
    ok = elapsed < 600 and peak_mb < 4096
    detail = (f"N=150 in {elapsed:.2f}s, peak RSS {peak_mb:.0f} MB; "
              f"times {', '.join(f'{s:.2f}s' for s in times)} for N={sizes}, log-log slope {slope:.2f}")
    report("9 scaling sanity", ok, detail)


def test_10_walk_series_composition(report):
    h, lk = canonical(line_graph(51))
    so = Superoperator(h, lk, 0.5)
    rho0 = pure_state(51, 26)
    stepped = walk_series(so, rho0, 1.0, 10).states[-1]
    single = so.propagate(rho0, 10.0)
    err = np.abs(stepped - single).max()
    report("10 walk_series composition", err <= 1e-7, f"max difference {err:.2e}")
