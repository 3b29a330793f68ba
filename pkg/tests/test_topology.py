import numpy as np
import pytest

from bitcusum import (
    DisconnectedGraph,
    DomainError,
    NetworkTopology,
    build_laplacian_weights,
    mesh12_topology,
    parse_topology_file,
    ring_topology,
    validate_condition1,
    write_topology_file,
)
from conftest import random_connected_topology


def test_four_cycle_weights(ring4_weights):
    w = ring4_weights.matrix
    # Laplacian eigenvalues {0,2,2,4}; rule gives W = I - 0.1 L
    adj = np.array([[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]], dtype=float)
    lap = np.diag(adj.sum(axis=1)) - adj
    np.testing.assert_allclose(w, np.eye(4) - 0.1 * lap, atol=1e-12)
    eigvals = np.sort(np.linalg.eigvalsh(w))[::-1]
    np.testing.assert_allclose(eigvals, [1.0, 0.8, 0.8, 0.6], atol=1e-12)
    assert ring4_weights.sigma2 == pytest.approx(0.8, abs=1e-12)


def test_complete_pair_weights():
    # K2 Laplacian has eigenvalues {0, 2}; second smallest nonzero equals the
    # largest, so the rule gives W = I - 0.25 L with sigma2 = 0.5
    topo = NetworkTopology(2, ((0, 1),), ())
    w = build_laplacian_weights(topo)
    np.testing.assert_allclose(w.matrix, [[0.75, 0.25], [0.25, 0.75]], atol=1e-12)
    assert w.sigma2 == pytest.approx(0.5, abs=1e-12)
    assert w.report.ok


def test_path_graph_stochasticity():
    topo = NetworkTopology(3, ((0, 1), (1, 2)), ())
    w = build_laplacian_weights(topo).matrix
    np.testing.assert_allclose(w.sum(axis=0), 1.0, atol=1e-12)
    np.testing.assert_allclose(w.sum(axis=1), 1.0, atol=1e-12)


def test_identity_fails_spectral_gap():
    report = validate_condition1(np.eye(5))
    assert not report.ok
    assert report.sigma2 == pytest.approx(1.0, abs=1e-12)


def test_validate_passes_on_built_weights(ring4_weights):
    report = validate_condition1(ring4_weights.matrix)
    assert report.ok
    assert report.sigma2 == pytest.approx(0.8, abs=1e-9)


def test_disconnected_graph_rejected():
    with pytest.raises(DisconnectedGraph):
        NetworkTopology(4, ((0, 1), (2, 3)), ())


def test_edge_validation():
    with pytest.raises(DomainError):
        NetworkTopology(3, ((0, 0), (0, 1), (1, 2)), ())
    with pytest.raises(DomainError):
        NetworkTopology(3, ((0, 3), (0, 1), (1, 2)), ())
    with pytest.raises(DomainError):
        NetworkTopology(3, ((0, 1), (1, 2)), secure=(5,))


def test_edges_canonicalized():
    topo = NetworkTopology(3, ((1, 0), (0, 1), (2, 1)), ())
    assert topo.edges == ((0, 1), (1, 2))


def test_insecure_complement():
    topo = ring_topology(5, secure=(1, 3))
    assert topo.insecure == (0, 2, 4)


def test_mesh12_shape():
    topo = mesh12_topology()
    assert topo.n_sensors == 12
    assert topo.secure == (0, 1, 2, 3)
    assert len(topo.edges) == 18
    w = build_laplacian_weights(topo)
    assert 0.0 < w.sigma2 < 1.0
    assert w.sigma2 == pytest.approx(0.9030255810348295, abs=1e-12)


def test_sigma2_equals_deflated_top_singular_value():
    rng = np.random.default_rng(5)
    for _ in range(10):
        topo = random_connected_topology(rng, int(rng.integers(3, 12)))
        w = build_laplacian_weights(topo)
        n = topo.n_sensors
        j = np.ones((n, n)) / n
        top = np.linalg.svd(w.matrix - j, compute_uv=False)[0]
        assert w.sigma2 == pytest.approx(top, abs=1e-9)


def test_topology_file_round_trip(tmp_path, mesh12):
    path = tmp_path / "mesh.topology"
    write_topology_file(str(path), mesh12)
    back = parse_topology_file(str(path))
    assert back == mesh12


def test_topology_file_diagnostics(tmp_path):
    bad = tmp_path / "bad.topology"
    bad.write_text("n_sensors 3\nedge 1 2\nedge 2 9\n")
    with pytest.raises(DomainError) as err:
        parse_topology_file(str(bad))
    assert "bad.topology:3" in str(err.value)


def test_topology_file_comments_and_one_based(tmp_path):
    path = tmp_path / "ring.topology"
    path.write_text(
        "# a square\nn_sensors 4\nedge 1 2\nedge 2 3\nedge 3 4\nedge 4 1  # close\nsecure 1 3\n")
    topo = parse_topology_file(str(path))
    assert topo.n_sensors == 4
    assert topo.secure == (0, 2)
    assert (3, 0) not in topo.edges and (0, 3) in topo.edges
