import numpy as np
import pytest

from stochwalk import cases
from stochwalk.walk import Superoperator, pure_state


def test_fmo_hamiltonian():
    h = cases.FMO_HAMILTONIAN
    assert h[0, 1] == -96.0
    np.testing.assert_array_equal(h, h.T)
    assert np.diag(h).tolist() == [200, 320, 0, 110, 270, 420, 230]


def test_fmo_operators_padded_with_sink():
    h, lk = cases.fmo_operators(gamma=1.0, alpha=100.0)
    assert h.shape == (8, 8)
    assert not h[7].any() and not h[:, 7].any()
    sink = [(i, j, c) for i, j, c in lk.entries() if i == 8]
    assert sink == [(8, 3, 10.0)]


def test_fmo_negative_alpha():
    with pytest.raises(ValueError):
        cases.fmo_operators(alpha=-1.0)


def test_fmo_defaults():
    assert cases.FMO_DEFAULTS["omega"] == 0.1
    assert cases.FMO_DEFAULTS["alpha"] == 100.0
    assert cases.FMO_DEFAULTS["init"] == 6
    assert cases.FMO_TIME_UNIT_PS == 5.309


def test_fmo_sink_fills():
    h, lk = cases.fmo_operators()
    rho = Superoperator(h, lk, 0.1).propagate(pure_state(8, 6), 20.0)
    assert rho[7, 7].real > 0.999


def test_fmo_series_monotone():
    res = cases.run_fmo(t=1.0, steps=10)
    sink = res.populations[:, 7]
    assert sink[0] == 0.0
    assert np.all(np.diff(sink) >= -1e-12)


def test_line_defaults_and_sweep():
    assert cases.LINE_DEFAULTS["omegas"] == (0.0, 0.1, 0.5, 1.0)
    out = cases.run_line((0.0, 1.0), n=11, t=2.0, steps=4, jobs=2)
    assert list(out) == [0.0, 1.0]
    for res in out.values():
        assert res.populations.shape == (5, 11)
        np.testing.assert_allclose(res.populations[:, 5], res.populations[:, 5].clip(0, 1))
        np.testing.assert_allclose(res.populations.sum(axis=1), 1, atol=1e-8)


def test_line_jobs_match_serial():
    a = cases.run_line((0.1, 0.5), n=9, t=1.0, steps=2, jobs=1)
    b = cases.run_line((0.1, 0.5), n=9, t=1.0, steps=2, jobs=2)
    for w in a:
        assert a[w].populations.tobytes() == b[w].populations.tobytes()


def test_line_unknown_lindblad():
    with pytest.raises(ValueError):
        cases.line_operators(5, lindblad="amplitude")


def test_pagerank_graph_bundled():
    g = cases.pagerank_graph()
    assert g.n == 7 and g.directed
    assert cases.PAGERANK_DEFAULTS == {"gamma": 1.0, "omega": 0.8, "alpha": 0.85, "t": 100.0}


def test_pagerank_sums_to_one():
    classical, quantum = cases.run_pagerank()
    assert classical.sum() == pytest.approx(1.0)
    assert quantum.sum() == pytest.approx(1.0, abs=1e-8)
