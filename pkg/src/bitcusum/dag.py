"""Distributed per-sensor detector driven by running consensus.

Each sensor maintains its own copy of the centralized pooled blocks using
consensus estimates of the network-wide bit sums (eta1_hat, eta2_hat), a
local window block built from its own bits with exponential weighting
(psi/phi4), and a consensus-aggregated attack block (eta3_hat). The
statistic at sensor j is

    H_D = eta1_hat + eta2_hat + eta3_hat,

and every sensor stops independently when H_D reaches the threshold.

Protocol per monitoring step: exchange the three bit streams, read the
local sums, update the exponentially-weighted own-bit mean, rebuild the
pooled blocks, advance the local window recursion, then exchange the
window increments as the score stream. Per-sensor work per step is O(1);
the consensus work is Q matrix-vector products per stream.

Consensus estimates can transiently push a pooled fraction outside (0,1)
early in the run. Those steps hold the affected quantity at its previous
value, count the event, and log a warning; halting a replication instead
would bias Monte Carlo summaries.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from .consensus import ConsensusState, LocalLambdaEstimates, advance_streams, lemma1_bound, local_lambda
from .errors import DegenerateLogArgument, DimensionMismatch, DomainError
from .noise import NoiseModel
from .topology import NetworkTopology, WeightMatrix

logger = logging.getLogger(__name__)


def lambda_a_update(prev: float, new_bit: int, k: int, alpha: float) -> float:
    """Exponentially weighted own-bit mean over monitoring steps 1..k.

    Equals sum_i alpha^{k-i} u^{(i)} / sum_i alpha^{k-i}; the recursion
    form needs only the previous value.
    """
    if k < 1:
        raise DomainError("k must be at least 1")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    ak = alpha ** k
    return ((alpha - ak) * prev + (1.0 - alpha) * new_bit) / (1.0 - ak)


def psi_update(psi_prev: float, phi4: float) -> float:
    return max(psi_prev, 0.0) + phi4


def eta12_hat(
    lam_m_hat: float,
    lam_n_hat: float,
    lam_s_hat: float,
    m: int,
    k: int,
    n: int,
    n_s: int,
) -> tuple[float, float]:
    """Pooled blocks from one sensor's consensus sums.

    Same algebra as the centralized blocks with estimated sums plugged in.
    """
    s_u = (lam_m_hat + lam_n_hat) / ((m + k) * n)
    s_a = (lam_m_hat + lam_s_hat) / (m * n + k * n_s)
    if not 0.0 < s_u < 1.0:
        raise DegenerateLogArgument(f"estimated pooled fraction {s_u} outside (0, 1)")
    if not 0.0 < s_a < 1.0:
        raise DegenerateLogArgument(f"estimated secure-pool fraction {s_a} outside (0, 1)")
    g1 = math.log((1.0 - s_a) / (1.0 - s_u))
    g2 = math.log(s_a / s_u)
    eta1 = (m * n - lam_m_hat) * g1 + lam_m_hat * g2
    eta2 = (k * n_s - lam_s_hat) * g1 + lam_s_hat * g2
    return eta1, eta2


def phi4_hat(
    lam_m_hat: float,
    lam_n_hat: float,
    lam_s_hat: float,
    lam_a_hat: float,
    new_bit: int,
    m: int,
    k: int,
    n: int,
    n_s: int,
    noise: NoiseModel,
    b: float,
) -> float:
    """One window-block increment from a sensor's own bit.

    The fitted post-change bit-zero probability zeta is 1 - lam_a_hat when
    the implied shift estimate clears the floor b, and the floor value
    F(F^-1(q_a_hat) - b) otherwise; the branch test compares lam_a_hat
    against 1 - zeta_floor, which is equivalent to comparing the shift
    estimate against b without extra CDF evaluations.
    """
    s_u = (lam_m_hat + lam_n_hat) / ((m + k) * n)
    s_a = (lam_m_hat + lam_s_hat) / (m * n + k * n_s)
    if not 0.0 < s_u < 1.0:
        raise DegenerateLogArgument(f"estimated pooled fraction {s_u} outside (0, 1)")
    if not 0.0 < s_a < 1.0:
        raise DegenerateLogArgument(f"estimated secure-pool fraction {s_a} outside (0, 1)")
    zeta_floor = noise.cdf(noise.quantile(1.0 - s_a) - b)
    if not 0.0 < zeta_floor < 1.0:
        raise DegenerateLogArgument("floor bit-zero probability left (0, 1)")
    if lam_a_hat >= 1.0 - zeta_floor:
        zeta = 1.0 - lam_a_hat
    else:
        zeta = zeta_floor
    if new_bit:
        if not zeta < 1.0 or not s_u > 0.0:
            raise DegenerateLogArgument("bit-one increment has no finite log")
        return math.log((1.0 - zeta) / s_u)
    if not zeta > 0.0:
        raise DegenerateLogArgument("bit-zero increment has no finite log")
    return math.log(zeta / (1.0 - s_u))


def eta12_error_constant(
    q: float,
    n: int,
    q_rounds: int,
    sigma_check: float,
    sigma_monitor: float,
    sigma_secure: float,
) -> float:
    """Deterministic large-M bound on |eta1_hat - eta1| + |eta2_hat - eta2|.

    q is the bit-zero probability (a plug-in estimate in practice); the
    three sigmas are the spectral gaps of the stream matrices. The secure
    stream's geometric term enters twice because lam_m_hat feeds both
    pooled fractions.
    """
    if not 0.0 < q < 1.0:
        raise DomainError("q must lie in (0, 1)")

    def geom(sig: float) -> float:
        s = sig ** q_rounds
        return s / (1.0 - s)

    factor = n * n * (2.0 - q) / (q * (1.0 - q))
    return factor * (2.0 * geom(sigma_check) + geom(sigma_monitor) + geom(sigma_secure))


@dataclass(frozen=True)
class DagSensorState:
    """Snapshot of one sensor's detector state."""

    sensor: int
    psi_hat: float
    lambda_a_hat: float
    lambdas: LocalLambdaEstimates
    eta1_hat: float
    eta2_hat: float
    eta3_hat: float
    h_d: float
    stopped: bool
    t_d: int | None


@dataclass(frozen=True)
class DagStepResult:
    k: int
    h_d: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    eta3: np.ndarray
    stopped: np.ndarray


@dataclass(frozen=True)
class DagRun:
    """Per-sensor statistic paths for monitoring steps 1..n_steps."""

    h_d: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    eta3: np.ndarray
    n_steps: int
    complete: bool

    def first_crossing(self, h: float, sensor: int) -> int | None:
        hits = np.nonzero(self.h_d[:, sensor] >= h)[0]
        return int(hits[0]) + 1 if hits.size else None


class DagCusumDetector:
    """All N sensors of one replication, advanced in lockstep.

    scale_eta3_by_n: the aggregated attack block is read out as the plain
    j-th entry of the score accumulator; with averaging weights that
    approximates 1/N of the network total, unlike the sum estimators
    which carry the factor N. The flag applies the same N to the read-out
    instead. Both variants are exposed because the block definitions
    disagree on this point; the default leaves the read-out unscaled.
    """

    def __init__(
        self,
        topology: NetworkTopology,
        weights: WeightMatrix,
        noise: NoiseModel,
        tau: float,
        b: float,
        alpha: float,
        q_rounds: int,
        h: float,
        scale_eta3_by_n: bool = False,
        track_truth: bool = False,
    ) -> None:
        if not b > 0.0:
            raise DomainError("shift floor b must be positive")
        if not 0.0 < alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")
        self.topology = topology
        self.noise = noise
        self.tau = float(tau)
        self.b = float(b)
        self.alpha = float(alpha)
        self.h = float(h)
        self.scale_eta3_by_n = bool(scale_eta3_by_n)
        self.state = ConsensusState.create(weights, q_rounds, track_truth=track_truth)
        n = topology.n_sensors
        self.n = n
        self.n_s = len(topology.secure)
        self._secure_mask = np.zeros(n)
        self._secure_mask[list(topology.secure)] = 1.0
        self._insecure = topology.insecure
        self.m = 0
        self.k = 0
        self.psi = np.zeros(n)
        self.lam_a = np.zeros(n)
        self.eta1 = np.zeros(n)
        self.eta2 = np.zeros(n)
        self.eta3 = np.zeros(n)
        self.h_d = np.zeros(n)
        self.stopped = np.zeros(n, dtype=bool)
        self.t_d = np.full(n, -1, dtype=np.int64)
        self.held_eta12 = 0
        self.held_phi4 = 0
        self._warm = False

    def warmup(self, secure_bits: np.ndarray) -> None:
        """Run the secure-phase consensus intervals (only the secure-bit
        stream carries innovations; the other accumulators stay zero)."""
        secure_bits = np.asarray(secure_bits, dtype=float)
        if secure_bits.ndim != 2 or secure_bits.shape[1] != self.n:
            raise DimensionMismatch("secure bits must be (M, N)")
        for m in range(secure_bits.shape[0]):
            advance_streams(self.state, {0: secure_bits[m]})
            self.state.l += 1
        self.m = secure_bits.shape[0]
        self._finish_warmup()

    def warmup_collapsed(self, secure_bits: np.ndarray) -> None:
        """Skip the M consensus intervals: plant the exact secure-phase
        average plus a sign-alternating zero-sum perturbation at the
        worst-case per-sensor error magnitude. Column sums (and so every
        later conservation property) match the faithful warm-up exactly;
        local read-outs start from the worst error the bound allows.
        """
        secure_bits = np.asarray(secure_bits, dtype=float)
        if secure_bits.ndim != 2 or secure_bits.shape[1] != self.n:
            raise DimensionMismatch("secure bits must be (M, N)")
        lam_m = float(secure_bits.sum())
        bound = lemma1_bound(self.n, self.state.weights[0].sigma2, self.state.q_rounds)
        pattern = np.zeros(self.n)
        pairs = self.n // 2
        pattern[: 2 * pairs : 2] = 1.0
        pattern[1 : 2 * pairs : 2] = -1.0
        self.state.gamma_check = np.full(self.n, lam_m / self.n) + (bound / self.n) * pattern
        if self.state.track_truth:
            self.state.true_sums[0] += lam_m
        self.state.l += secure_bits.shape[0]
        self.m = secure_bits.shape[0]
        self._finish_warmup()

    def _finish_warmup(self) -> None:
        for j in range(self.n):
            lam = local_lambda(self.state, j)
            try:
                self.eta1[j], self.eta2[j] = eta12_hat(
                    lam.lambda_m_hat, 0.0, 0.0, self.m, 0, self.n, self.n_s)
            except DegenerateLogArgument:
                self.eta1[j] = self.eta2[j] = 0.0
        self.h_d = self.eta1 + self.eta2 + self.eta3
        self._warm = True

    def step(self, bits_row: np.ndarray) -> DagStepResult:
        if not self._warm:
            raise DomainError("run the warm-up before monitoring steps")
        row = np.asarray(bits_row, dtype=float)
        if row.shape != (self.n,):
            raise DimensionMismatch("bit row length does not match the network")
        k = self.k + 1
        advance_streams(self.state, {0: np.zeros(self.n), 1: row, 2: row * self._secure_mask})
        lam_m = self.n * self.state.gamma_check
        lam_n = self.n * self.state.gamma
        lam_s = self.n * self.state.gamma_tilde
        for j in self._insecure:
            self.lam_a[j] = lambda_a_update(self.lam_a[j], int(row[j]), k, self.alpha)
        for j in range(self.n):
            try:
                self.eta1[j], self.eta2[j] = eta12_hat(
                    lam_m[j], lam_n[j], lam_s[j], self.m, k, self.n, self.n_s)
            except DegenerateLogArgument as exc:
                self._note_hold("pooled blocks", j, k, exc)
                self.held_eta12 += 1
        xi = np.zeros(self.n)
        for j in self._insecure:
            try:
                phi4 = phi4_hat(
                    lam_m[j], lam_n[j], lam_s[j], self.lam_a[j], int(row[j]),
                    self.m, k, self.n, self.n_s, self.noise, self.b)
            except DegenerateLogArgument as exc:
                self._note_hold("window block", j, k, exc)
                self.held_phi4 += 1
                continue
            psi_new = psi_update(self.psi[j], phi4)
            xi[j] = psi_new - self.psi[j]
            self.psi[j] = psi_new
        advance_streams(self.state, {3: xi})
        self.state.l += 1
        self.eta3 = (self.n if self.scale_eta3_by_n else 1.0) * self.state.xi.copy()
        self.h_d = self.eta1 + self.eta2 + self.eta3
        newly = ~self.stopped & (self.h_d >= self.h)
        self.t_d[newly] = k
        self.stopped |= newly
        self.k = k
        return DagStepResult(k=k, h_d=self.h_d.copy(), eta1=self.eta1.copy(),
                             eta2=self.eta2.copy(), eta3=self.eta3.copy(),
                             stopped=self.stopped.copy())

    def _note_hold(self, what: str, sensor: int, k: int, exc: Exception) -> None:
        if self.held_eta12 + self.held_phi4 == 0:
            logger.warning(
                "holding %s at sensor %d, step %d (%s); later holds logged at DEBUG",
                what, sensor + 1, k, exc)
        else:
            logger.debug("holding %s at sensor %d, step %d (%s)", what, sensor + 1, k, exc)

    def run(self, monitor_bits: np.ndarray, h_stop: float | None = None) -> DagRun:
        """Feed every monitoring row through step(), recording the paths;
        ends early once every sensor's statistic is at or above h_stop."""
        bits = np.asarray(monitor_bits, dtype=float)
        if bits.ndim != 2 or bits.shape[1] != self.n:
            raise DimensionMismatch("monitoring bits must be (K, N)")
        stop = math.inf if h_stop is None else float(h_stop)
        k_max = bits.shape[0]
        h_d = np.empty((k_max, self.n))
        eta1 = np.empty((k_max, self.n))
        eta2 = np.empty((k_max, self.n))
        eta3 = np.empty((k_max, self.n))
        n_steps = 0
        for t in range(k_max):
            res = self.step(bits[t])
            h_d[t] = res.h_d
            eta1[t] = res.eta1
            eta2[t] = res.eta2
            eta3[t] = res.eta3
            n_steps = t + 1
            if np.all(res.h_d >= stop):
                break
        return DagRun(h_d=h_d[:n_steps].copy(), eta1=eta1[:n_steps].copy(),
                      eta2=eta2[:n_steps].copy(), eta3=eta3[:n_steps].copy(),
                      n_steps=n_steps, complete=n_steps == k_max)

    def sensor_state(self, sensor: int) -> DagSensorState:
        if not 0 <= sensor < self.n:
            raise DomainError(f"sensor {sensor} outside 0..{self.n - 1}")
        t = int(self.t_d[sensor])
        return DagSensorState(
            sensor=sensor,
            psi_hat=float(self.psi[sensor]),
            lambda_a_hat=float(self.lam_a[sensor]),
            lambdas=local_lambda(self.state, sensor),
            eta1_hat=float(self.eta1[sensor]),
            eta2_hat=float(self.eta2[sensor]),
            eta3_hat=float(self.eta3[sensor]),
            h_d=float(self.h_d[sensor]),
            stopped=bool(self.stopped[sensor]),
            t_d=t if t >= 0 else None,
        )

    def eta12_verification(self) -> tuple[np.ndarray, float]:
        """Per-sensor |eta1_hat - eta1| + |eta2_hat - eta2| against the
        deterministic constant, with a plug-in q from the secure phase.
        Needs truth tracking and at least one monitoring step."""
        if not self.state.track_truth:
            raise DomainError("detector was created without truth tracking")
        if self.k < 1:
            raise DomainError("no monitoring steps taken yet")
        lam_m, lam_n, lam_s, _ = self.state.true_sums
        true1, true2 = eta12_hat(lam_m, lam_n, lam_s, self.m, self.k, self.n, self.n_s)
        gap = np.abs(self.eta1 - true1) + np.abs(self.eta2 - true2)
        q_hat = 1.0 - lam_m / (self.m * self.n)
        sig = [w.sigma2 for w in self.state.weights]
        const = eta12_error_constant(q_hat, self.n, self.state.q_rounds, sig[0], sig[1], sig[2])
        return gap, const


def write_dag_trace(path: str, run: DagRun, h: float) -> None:
    """Dump per-sensor statistics as CSV `K,sensor,eta1,eta2,eta3,H_D,stopped`."""
    stopped = np.zeros(run.h_d.shape[1], dtype=bool)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["K", "sensor", "eta1", "eta2", "eta3", "H_D", "stopped"])
        for t in range(run.n_steps):
            stopped |= run.h_d[t] >= h
            for j in range(run.h_d.shape[1]):
                writer.writerow([
                    t + 1, j + 1, f"{run.eta1[t, j]:.12g}", f"{run.eta2[t, j]:.12g}",
                    f"{run.eta3[t, j]:.12g}", f"{run.h_d[t, j]:.12g}", int(stopped[j]),
                ])
