import numpy as np
import pytest

from bitcusum import (
    NetworkTopology,
    NoiseModel,
    ScenarioConfig,
    build_laplacian_weights,
    mesh12_topology,
    ring_topology,
)


@pytest.fixture
def gaussian():
    return NoiseModel("gaussian", 1.0)


@pytest.fixture
def logistic():
    return NoiseModel("logistic", 1.0)


@pytest.fixture
def ring4():
    return ring_topology(4, secure=(0, 2))


@pytest.fixture
def ring4_weights(ring4):
    return build_laplacian_weights(ring4)


@pytest.fixture
def mesh12():
    return mesh12_topology()


def random_connected_topology(rng: np.random.Generator, n: int,
                              n_secure: int = 0) -> NetworkTopology:
    """Random spanning tree plus a few extra edges; connected by construction."""
    order = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        a = int(order[i])
        b = int(order[rng.integers(0, i)])
        edges.add((min(a, b), max(a, b)))
    extra = int(rng.integers(0, n))
    for _ in range(extra):
        a, b = rng.choice(n, size=2, replace=False)
        a, b = int(min(a, b)), int(max(a, b))
        edges.add((a, b))
    secure = tuple(int(j) for j in rng.choice(n, size=n_secure, replace=False))
    return NetworkTopology(n_sensors=n, edges=tuple(sorted(edges)), secure=secure)


@pytest.fixture
def small_scenario(ring4):
    return ScenarioConfig(
        theta=0.0, tau=0.0, b=0.5,
        mu=tuple((j, 1.0) for j in ring4.insecure),
        attack_time=5, secure_len=30,
        q_rounds=5, alpha=0.9, master_seed=11,
    )
