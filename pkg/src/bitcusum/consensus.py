"""Running-consensus message passing over the sensor network.

Each sampling interval, every sensor adds its innovation to a running
accumulator and the network performs Q synchronous rounds of weighted
averaging:

    acc <- W^Q (acc + innovation),      acc starts at zero.

Unrolled over L intervals this is sum_l W^{Q(L-l+1)} innovation^(l). Because
W is doubly stochastic the total 1^T acc is conserved exactly, and because
sigma_2(W) < 1 each sensor's entry converges to the network average, so
N * acc_j tracks the network-wide running sum with error at most

    N^{3/2} * sigma_2^Q / (1 - sigma_2^Q)

for innovation entries in [0, 1], uniformly in time.

Four accumulators run side by side: secure-phase bits, monitoring bits,
monitoring bits of secure sensors only, and the detector's score
increments. Matrix powers are never formed; each interval costs Q
matrix-vector products per stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DomainError
from .topology import WeightMatrix

STREAMS = ("secure_bits", "monitor_bits", "secure_sensor_bits", "score")


def lemma1_bound(n: int, sigma2: float, q_rounds: int) -> float:
    """Uniform-in-time error of N * acc_j against the true running sum."""
    if not 0.0 < sigma2 < 1.0:
        raise DomainError(f"sigma2 must lie in (0, 1), got {sigma2}")
    if q_rounds < 1:
        raise DomainError("q_rounds must be at least 1")
    s = sigma2 ** q_rounds
    return n ** 1.5 * s / (1.0 - s)


@dataclass(frozen=True)
class LocalLambdaEstimates:
    """Per-sensor running-sum estimates with their worst-case errors."""

    lambda_m_hat: float
    lambda_n_hat: float
    lambda_s_hat: float
    error_bounds: tuple[float, float, float]


@dataclass
class ConsensusState:
    """Accumulators for the four streams plus per-stream weight matrices.

    track_truth keeps centrally-summed ground truth per stream alongside the
    distributed state so tests can certify the error bound; production runs
    leave it off and never touch global information.
    """

    weights: tuple[WeightMatrix, WeightMatrix, WeightMatrix, WeightMatrix]
    q_rounds: int
    gamma_check: np.ndarray
    gamma: np.ndarray
    gamma_tilde: np.ndarray
    xi: np.ndarray
    l: int = 0
    track_truth: bool = False
    true_sums: np.ndarray = field(default_factory=lambda: np.zeros(4))

    @classmethod
    def create(
        cls,
        weights: WeightMatrix,
        q_rounds: int,
        track_truth: bool = False,
        per_stream: tuple[WeightMatrix, ...] | None = None,
    ) -> "ConsensusState":
        if q_rounds < 1:
            raise DomainError("q_rounds must be at least 1")
        mats = per_stream if per_stream is not None else (weights,) * 4
        if len(mats) != 4:
            raise DomainError("need one weight matrix per stream (4)")
        n = mats[0].n
        if any(m.n != n for m in mats):
            raise DimensionMismatch("per-stream weight matrices disagree on N")
        zeros = lambda: np.zeros(n)
        return cls(
            weights=tuple(mats),
            q_rounds=q_rounds,
            gamma_check=zeros(),
            gamma=zeros(),
            gamma_tilde=zeros(),
            xi=zeros(),
            track_truth=track_truth,
        )

    @property
    def n(self) -> int:
        return self.weights[0].n


def _rounds(w: np.ndarray, v: np.ndarray, q: int) -> np.ndarray:
    for _ in range(q):
        v = w @ v
    return v


def advance_streams(state: ConsensusState, innovations: dict[int, np.ndarray]) -> ConsensusState:
    """Add-then-average on the listed streams only; others are untouched.

    The score stream's innovation is computed from this interval's bit
    streams, so a protocol step advances streams 0..2 first, does local
    work, then advances stream 3. Each stream still gets exactly one
    add-then-Q-rounds application per interval.
    """
    n = state.n
    accs = [state.gamma_check, state.gamma, state.gamma_tilde, state.xi]
    for idx, raw in innovations.items():
        if not 0 <= idx < 4:
            raise DomainError(f"stream index {idx} outside 0..3")
        v = np.asarray(raw, dtype=float)
        if v.shape != (n,):
            raise DimensionMismatch(f"innovation shape {v.shape} does not match N = {n}")
        accs[idx] = _rounds(state.weights[idx].matrix, accs[idx] + v, state.q_rounds)
        if state.track_truth:
            state.true_sums[idx] += v.sum()
    state.gamma_check, state.gamma, state.gamma_tilde, state.xi = accs
    return state


def consensus_interval(
    state: ConsensusState,
    gamma_check: np.ndarray,
    gamma: np.ndarray,
    gamma_tilde: np.ndarray,
    xi: np.ndarray | None = None,
) -> ConsensusState:
    """One sampling interval: add innovations, run Q rounds on every stream."""
    n = state.n
    advance_streams(
        state,
        {
            0: gamma_check,
            1: gamma,
            2: gamma_tilde,
            3: np.zeros(n) if xi is None else xi,
        },
    )
    state.l += 1
    return state


def local_lambda(state: ConsensusState, sensor: int) -> LocalLambdaEstimates:
    """N times the sensor's accumulator entries, with Lemma-style bounds."""
    if not 0 <= sensor < state.n:
        raise DomainError(f"sensor {sensor} outside 0..{state.n - 1}")
    n = state.n
    bounds = tuple(
        lemma1_bound(n, state.weights[i].sigma2, state.q_rounds) for i in range(3)
    )
    return LocalLambdaEstimates(
        lambda_m_hat=n * float(state.gamma_check[sensor]),
        lambda_n_hat=n * float(state.gamma[sensor]),
        lambda_s_hat=n * float(state.gamma_tilde[sensor]),
        error_bounds=bounds,
    )


def verification_errors(state: ConsensusState) -> np.ndarray:
    """|N * acc_j - true running sum| per (stream, sensor); needs track_truth."""
    if not state.track_truth:
        raise DomainError("state was created without truth tracking")
    accs = np.stack([state.gamma_check, state.gamma, state.gamma_tilde, state.xi])
    return np.abs(state.n * accs - state.true_sums[:, None])
