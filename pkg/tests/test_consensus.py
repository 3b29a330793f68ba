import numpy as np
import pytest

from bitcusum import (
    ConsensusState,
    DimensionMismatch,
    DomainError,
    advance_streams,
    build_laplacian_weights,
    consensus_interval,
    lemma1_bound,
    local_lambda,
    verification_errors,
)
from conftest import random_connected_topology

import oracles


def test_lemma_bound_values():
    # direct evaluations of N^1.5 s^Q / (1 - s^Q)
    assert lemma1_bound(12, 0.6511, 10) == pytest.approx(0.57708, abs=5e-5)
    assert lemma1_bound(2, 0.5, 1) == pytest.approx(2.0 ** 1.5, rel=1e-12)


def test_lemma_bound_limits():
    assert lemma1_bound(5, 1e-12, 3) == pytest.approx(0.0, abs=1e-20)
    # doubling Q at least halves the bound once s^Q <= 1/2
    for sigma2 in (0.3, 0.6, 0.9):
        for q in (2, 5, 9):
            if sigma2 ** q <= 0.5:
                assert lemma1_bound(6, sigma2, 2 * q) <= lemma1_bound(6, sigma2, q) / 2


def test_lemma_bound_domain():
    with pytest.raises(DomainError):
        lemma1_bound(4, 1.0, 3)
    with pytest.raises(DomainError):
        lemma1_bound(4, 0.5, 0)


def test_interval_matches_matrix_power_oracle(ring4_weights):
    rng = np.random.default_rng(3)
    q_rounds = 3
    state = ConsensusState.create(ring4_weights, q_rounds)
    fed = []
    for _ in range(7):
        g = rng.random(4)
        fed.append(g.copy())
        consensus_interval(state, g, np.zeros(4), np.zeros(4))
    expect = oracles.consensus_matrix_powers(ring4_weights.matrix, fed, q_rounds)
    np.testing.assert_allclose(state.gamma_check, expect, atol=1e-12)
    assert state.l == 7


def test_streams_evolve_independently(ring4_weights):
    rng = np.random.default_rng(4)
    state = ConsensusState.create(ring4_weights, 2)
    a = rng.random(4)
    b = rng.random(4)
    c = rng.random(4)
    consensus_interval(state, a, b, c)
    sa = oracles.consensus_matrix_powers(ring4_weights.matrix, [a], 2)
    sb = oracles.consensus_matrix_powers(ring4_weights.matrix, [b], 2)
    sc = oracles.consensus_matrix_powers(ring4_weights.matrix, [c], 2)
    np.testing.assert_allclose(state.gamma_check, sa, atol=1e-13)
    np.testing.assert_allclose(state.gamma, sb, atol=1e-13)
    np.testing.assert_allclose(state.gamma_tilde, sc, atol=1e-13)


def test_sum_conservation(ring4_weights):
    # 1^T acc is invariant under W rounds: column sums are 1
    rng = np.random.default_rng(5)
    state = ConsensusState.create(ring4_weights, 4)
    total = np.zeros(4)
    for _ in range(25):
        inn = [rng.random(4) for _ in range(4)]
        advance_streams(state, dict(enumerate(inn)))
        total += [v.sum() for v in inn]
    for acc, t in zip((state.gamma_check, state.gamma, state.gamma_tilde, state.xi), total):
        assert acc.sum() == pytest.approx(t, rel=1e-12)


def test_partial_advance_leaves_other_streams(ring4_weights):
    state = ConsensusState.create(ring4_weights, 1)
    advance_streams(state, {0: np.ones(4)})
    assert np.all(state.gamma == 0.0)
    assert np.all(state.xi == 0.0)
    assert np.any(state.gamma_check != 0.0)


def test_lambda_estimates_within_lemma_bound(ring4_weights):
    rng = np.random.default_rng(6)
    state = ConsensusState.create(ring4_weights, 5, track_truth=True)
    true = np.zeros(3)
    for _ in range(60):
        bits = [(rng.random(4) > 0.5).astype(float) for _ in range(3)]
        consensus_interval(state, *bits)
        true += [v.sum() for v in bits]
    for j in range(4):
        est = local_lambda(state, j)
        for got, want, bound in zip(
                (est.lambda_m_hat, est.lambda_n_hat, est.lambda_s_hat),
                true, est.error_bounds):
            assert abs(got - want) <= bound + 1e-9


def test_random_topologies_within_lemma_bound():
    rng = np.random.default_rng(7)
    for _ in range(5):
        topo = random_connected_topology(rng, int(rng.integers(3, 10)))
        w = build_laplacian_weights(topo)
        n = topo.n_sensors
        for q_rounds in (1, 5):
            state = ConsensusState.create(w, q_rounds, track_truth=True)
            for _ in range(40):
                consensus_interval(state, (rng.random(n) > 0.4).astype(float),
                                   rng.random(n), rng.random(n))
            errors = verification_errors(state)
            for i in range(3):
                bound = lemma1_bound(n, w.sigma2, q_rounds)
                assert errors[i].max() <= bound + 1e-9


def test_verification_needs_tracking(ring4_weights):
    state = ConsensusState.create(ring4_weights, 2)
    with pytest.raises(DomainError):
        verification_errors(state)


def test_advance_validation(ring4_weights):
    state = ConsensusState.create(ring4_weights, 2)
    with pytest.raises(DomainError):
        advance_streams(state, {7: np.zeros(4)})
    with pytest.raises(DimensionMismatch):
        advance_streams(state, {0: np.zeros(3)})


def test_create_validation(ring4_weights):
    with pytest.raises(DomainError):
        ConsensusState.create(ring4_weights, 0)
    from bitcusum import ring_topology
    w5 = build_laplacian_weights(ring_topology(5))
    with pytest.raises(DimensionMismatch):
        ConsensusState.create(ring4_weights, 2,
                              per_stream=(ring4_weights, w5, ring4_weights, ring4_weights))


def test_matrix_powers_never_formed_in_library():
    # the library must do repeated matvecs, not matrix powers
    import inspect
    import bitcusum.consensus as c
    src = inspect.getsource(c)
    assert "matrix_power" not in src
