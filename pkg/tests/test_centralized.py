import numpy as np
import pytest

from bitcusum import (
    CusumOracle,
    DegenerateBits,
    DimensionMismatch,
    DomainError,
    GcusumDetector,
    NoiseModel,
    ring_topology,
    sample_bit_streams,
)
from bitcusum.centralized import write_statistic_trace

import oracles


def _random_streams(rng, m, big_k, n, p_secure=0.5, p_monitor=0.5):
    secure = (rng.random((m, n)) < p_secure).astype(np.uint8)
    monitor = (rng.random((big_k, n)) < p_monitor).astype(np.uint8)
    # keep pools non-degenerate
    secure[0, 0] = 0
    secure[-1, -1] = 1
    monitor[0, 0] = 0
    monitor[-1, -1] = 1
    return secure, monitor


def test_exact_cusum_recursion_equals_exhaustive():
    rng = np.random.default_rng(0)
    for _ in range(40):
        inc = rng.normal(size=int(rng.integers(1, 20)))
        rec = oracles.page_recursion(inc)
        brute = oracles.exhaustive_max_over_k(inc)
        np.testing.assert_allclose(rec, brute, atol=1e-12)


def test_exact_cusum_known_path(ring4, gaussian):
    oracle = CusumOracle(ring4, gaussian, theta=0.0,
                         mu=np.array([0.0, 1.0, 0.0, 1.0]), tau=0.0, h=10.0)
    # hand-check the reflection: increments (-1, 2, -0.5) walk to (-1, 2, 1.5)
    assert oracles.page_recursion([-1.0, 2.0, -0.5]) == [-1.0, 2.0, 1.5]
    bits = (np.arange(12).reshape(3, 4) % 3 == 0).astype(np.uint8)
    path = oracle.run(bits)
    stepper = CusumOracle(ring4, gaussian, 0.0, np.array([0.0, 1.0, 0.0, 1.0]),
                          0.0, 10.0)
    for i, row in enumerate(bits):
        s, _ = stepper.step(row)
        assert s == pytest.approx(path[i], abs=1e-12)


def test_exact_cusum_validation(ring4, gaussian):
    with pytest.raises(DomainError):
        CusumOracle(ring4, gaussian, 0.0, np.array([0.0, 1.0, 0.5, 1.0]), 0.0, 5.0)
    with pytest.raises(DimensionMismatch):
        CusumOracle(ring4, gaussian, 0.0, np.zeros(3), 0.0, 5.0)


def test_gcusum_matches_brute_force(ring4, gaussian):
    rng = np.random.default_rng(1)
    for trial in range(25):
        m = int(rng.integers(6, 25))
        big_k = int(rng.integers(2, 14))
        secure, monitor = _random_streams(rng, m, big_k, 4,
                                          p_monitor=float(rng.uniform(0.3, 0.7)))
        det = GcusumDetector(ring4, gaussian, secure, tau=0.0, b=0.3, h=1e9)
        run = det.run(monitor)
        want_g, want_a, want_k = oracles.brute_force_gcusum(
            secure, monitor, insecure=[1, 3], tau=0.0, b=0.3)
        assert run.h_g[-1] == pytest.approx(want_g, abs=1e-9), f"trial {trial}"
        assert run.h_a[-1] == pytest.approx(want_a, abs=1e-9), f"trial {trial}"
        assert int(run.k_hat[-1]) == want_k, f"trial {trial}"


def test_gcusum_matches_brute_force_logistic(ring4):
    noise = NoiseModel("logistic", 0.8)
    rng = np.random.default_rng(2)
    for _ in range(10):
        secure, monitor = _random_streams(rng, 15, 8, 4)
        det = GcusumDetector(ring4, noise, secure, tau=0.4, b=0.25, h=1e9)
        run = det.run(monitor)
        want_g, want_a, want_k = oracles.brute_force_gcusum(
            secure, monitor, insecure=[1, 3], tau=0.4, b=0.25,
            family="logistic", scale=0.8)
        assert run.h_g[-1] == pytest.approx(want_g, abs=1e-9)
        assert run.h_a[-1] == pytest.approx(want_a, abs=1e-9)
        assert int(run.k_hat[-1]) == want_k


def test_gcusum_tau_invariance(ring4, gaussian):
    # the counts are all that matter: shifting tau shifts the fitted theta
    # but the statistic depends on fitted bit probabilities only
    rng = np.random.default_rng(3)
    secure, monitor = _random_streams(rng, 20, 10, 4)
    runs = []
    for tau in (0.0, 1.3):
        det = GcusumDetector(ring4, gaussian, secure, tau=tau, b=0.3, h=1e9)
        runs.append(det.run(monitor))
    np.testing.assert_allclose(runs[0].h_g, runs[1].h_g, atol=1e-10)
    np.testing.assert_allclose(runs[0].h_a, runs[1].h_a, atol=1e-10)


def test_step_equals_run(ring4, gaussian):
    rng = np.random.default_rng(4)
    secure, monitor = _random_streams(rng, 30, 150, 4)  # forces buffer growth
    det_run = GcusumDetector(ring4, gaussian, secure, 0.0, 0.3, h=1e9)
    full = det_run.run(monitor)
    det_step = GcusumDetector(ring4, gaussian, secure, 0.0, 0.3, h=1e9)
    for i, row in enumerate(monitor):
        st = det_step.step(row)
        assert st.h_g == pytest.approx(full.h_g[i], abs=1e-10)
        assert st.h_a == pytest.approx(full.h_a[i], abs=1e-10)
        assert st.k_hat == int(full.k_hat[i])
    assert det_step.recount_consistent()


def test_statistic_at_matches_kernel(ring4, gaussian):
    rng = np.random.default_rng(5)
    secure, monitor = _random_streams(rng, 18, 9, 4)
    det = GcusumDetector(ring4, gaussian, secure, 0.7, 0.3, h=1e9)
    last = None
    for row in monitor:
        last = det.step(row)
    # the reference path recomputes candidate scores through the estimators
    best = max(det.statistic_at(k) for k in range(1, det.k + 1))
    assert best == pytest.approx(last.h_g, abs=1e-9)
    assert det.statistic_at(int(last.k_hat)) == pytest.approx(last.h_g, abs=1e-9)


def test_tie_break_smallest_candidate(ring4, gaussian):
    # all-equal candidate scores arise when the clamp is active everywhere;
    # engineered case: identical monitoring rows
    secure = np.zeros((12, 4), dtype=np.uint8)
    secure[::2] = 1
    monitor = np.tile([1, 0, 1, 0], (6, 1)).astype(np.uint8)
    det = GcusumDetector(ring4, gaussian, secure, 0.0, 0.3, h=1e9)
    run = det.run(monitor)
    want_g, want_a, want_k = oracles.brute_force_gcusum(
        secure, monitor, insecure=[1, 3], tau=0.0, b=0.3)
    assert int(run.k_hat[-1]) == want_k
    assert run.h_g[-1] == pytest.approx(want_g, abs=1e-9)


def test_degenerate_bits_raise(ring4, gaussian):
    # an all-zero pool pins s_u at 0: no finite parameter fits, so raise
    det = GcusumDetector(ring4, gaussian, np.zeros((10, 4), np.uint8), 0.0, 0.3, h=1e9)
    with pytest.raises(DegenerateBits):
        det.run(np.zeros((40, 4), dtype=np.uint8))
    det2 = GcusumDetector(ring4, gaussian, np.ones((10, 4), np.uint8), 0.0, 0.3, h=1e9)
    with pytest.raises(DegenerateBits):
        det2.run(np.ones((40, 4), dtype=np.uint8))
    # the step interface raises too
    det3 = GcusumDetector(ring4, gaussian, np.zeros((10, 4), np.uint8), 0.0, 0.3, h=1e9)
    with pytest.raises(DegenerateBits):
        det3.step(np.zeros(4, dtype=np.uint8))


def test_first_crossing(ring4, gaussian, small_scenario):
    streams = sample_bit_streams(small_scenario, gaussian, ring4, 80, rep=2,
                                 attacked=True)
    det = GcusumDetector(ring4, gaussian, streams.secure, 0.0, 0.5, h=3.0)
    run = det.run(streams.monitor)
    t = run.first_crossing(3.0)
    assert t is not None
    assert run.h_g[t - 1] >= 3.0
    assert np.all(run.h_g[: t - 1] < 3.0)
    assert run.first_crossing(1e9) is None


def test_early_stop(ring4, gaussian, small_scenario):
    streams = sample_bit_streams(small_scenario, gaussian, ring4, 80, rep=2,
                                 attacked=True)
    det = GcusumDetector(ring4, gaussian, streams.secure, 0.0, 0.5, h=3.0)
    full = det.run(streams.monitor)
    early = det.run(streams.monitor, h_stop=3.0)
    assert not early.complete
    assert early.n_steps < full.n_steps
    np.testing.assert_allclose(early.h_g, full.h_g[: early.n_steps], atol=1e-12)
    # stop requires BOTH statistics past the bar
    assert early.h_g[-1] >= 3.0 and early.h_a[-1] >= 3.0


def test_trace_csv(tmp_path, ring4, gaussian, small_scenario):
    streams = sample_bit_streams(small_scenario, gaussian, ring4, 12, rep=0)
    det = GcusumDetector(ring4, gaussian, streams.secure, 0.0, 0.5, h=5.0)
    run = det.run(streams.monitor)
    path = tmp_path / "trace.csv"
    write_statistic_trace(str(path), run)
    lines = path.read_text().splitlines()
    assert lines[0] == "K,H_G,H_A,k_hat"
    assert len(lines) == run.n_steps + 1
    k, hg, ha, khat = lines[3].split(",")
    assert int(k) == 3
    assert float(hg) == pytest.approx(run.h_g[2], rel=1e-10)


def test_no_secure_sensors_all_insecure(gaussian):
    # N_S = 0: the attack-proof pool is the secure phase alone
    topo = ring_topology(3, secure=())
    rng = np.random.default_rng(6)
    secure = (rng.random((25, 3)) < 0.5).astype(np.uint8)
    monitor = (rng.random((7, 3)) < 0.6).astype(np.uint8)
    secure[0, 0] = 0
    secure[1, 0] = 1
    det = GcusumDetector(topo, gaussian, secure, 0.0, 0.3, h=1e9)
    run = det.run(monitor)
    want_g, want_a, want_k = oracles.brute_force_gcusum(
        secure, monitor, insecure=[0, 1, 2], tau=0.0, b=0.3)
    assert run.h_g[-1] == pytest.approx(want_g, abs=1e-9)
    assert run.h_a[-1] == pytest.approx(want_a, abs=1e-9)
