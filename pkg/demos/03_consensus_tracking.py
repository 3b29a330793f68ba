"""Running consensus on growing sums, checked against ground truth.

Four accumulators ride the same schedule: add this interval's local
value, then average Q times with the neighbors. Rescaling any sensor's
accumulator by N recovers the network-wide running sum up to an error
that the spectral gap bounds uniformly in time.
"""

import numpy as np

from bitcusum import (
    ConsensusState,
    advance_streams,
    build_laplacian_weights,
    lemma1_bound,
    mesh12_topology,
    verification_errors,
)

rng = np.random.default_rng(3)
topo = mesh12_topology()
w = build_laplacian_weights(topo)
n = topo.n_sensors

for q_rounds in (2, 10):
    state = ConsensusState.create(w, q_rounds, track_truth=True)
    bound = lemma1_bound(n, w.sigma2, q_rounds)
    worst = 0.0
    for interval in range(1, 301):
        advance_streams(state, {
            0: rng.integers(0, 2, n).astype(float),
            1: rng.integers(0, 2, n).astype(float),
            2: rng.integers(0, 2, n).astype(float),
            3: rng.uniform(-1.0, 1.0, n),
        })
        worst = max(worst, float(verification_errors(state).max()))
    total = n * float(state.gamma.mean())
    print(f"Q = {q_rounds:2d}: after 300 intervals the stream-1 running sum "
          f"is {total:7.1f} bits;")
    print(f"        worst |N*accumulator - truth| anywhere = {worst:9.4f}, "
          f"bound = {bound:9.4f}")

print("\nThe bound holds at every interval, not just in the limit, and "
      "does not grow with time.")
