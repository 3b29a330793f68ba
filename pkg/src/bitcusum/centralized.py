"""Centralized sequential detectors over the fusion center's bit history.

Three statistics, all driven by the same monitoring stream:

  * oracle CUSUM: true theta and shifts known, textbook Page recursion on
    the exact log-likelihood ratio (benchmark only);
  * generalized statistic H_G: unknowns replaced by their closed-form
    estimates, maximized over the candidate attack step k <= K;
  * alternative statistic H_A: H_G with the attack-step block dropped,
    keeping only the window block under the inner max.

The candidate scan re-runs every step because the pooled estimates move
with K; grouped bit counts keep each (k, K) cell at O(N) and the compiled
kernel keeps the K^2 total affordable. A per-candidate reference
evaluation (statistic_at) goes the long way through the estimator
functions and exists to cross-check the kernel's algebra.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateBits, DimensionMismatch, DomainError
from .estimators import SumStatistics, theta_hat_a, theta_mle_unattacked
from .noise import NoiseModel
from .topology import NetworkTopology


@dataclass(frozen=True)
class GcusumStep:
    k: int
    h_g: float
    h_a: float
    k_hat: int
    stopped_g: bool
    stopped_a: bool


@dataclass(frozen=True)
class GcusumRun:
    """Statistic paths for monitoring steps 1..n_steps.

    complete is False when the pass ended early because both statistics
    reached the stop threshold; entries past n_steps were never computed.
    """

    h_g: np.ndarray
    h_a: np.ndarray
    k_hat: np.ndarray
    n_steps: int
    complete: bool

    def first_crossing(self, h: float, statistic: str = "h_g") -> int | None:
        """Smallest K with the statistic at or above h, or None."""
        path = getattr(self, statistic)
        hits = np.nonzero(path >= h)[0]
        return int(hits[0]) + 1 if hits.size else None


class CusumOracle:
    """Page recursion on the exact log-likelihood ratio (true parameters).

    Entries of mu at secure sensors must be zero; sensors with zero shift
    contribute nothing to the increment.
    """

    def __init__(
        self,
        topology: NetworkTopology,
        noise: NoiseModel,
        theta: float,
        mu: np.ndarray,
        tau: float,
        h: float,
    ) -> None:
        mu = np.asarray(mu, dtype=float)
        if mu.shape != (topology.n_sensors,):
            raise DimensionMismatch("mu must have one entry per sensor")
        if any(mu[list(topology.secure)] != 0.0):
            raise DomainError("secure sensors cannot carry a shift")
        q = noise.q(theta, tau)
        if not 0.0 < q < 1.0:
            raise DomainError("q(theta) must lie in (0, 1)")
        qt = np.array([noise.qtilde(theta, m, tau) for m in mu])
        l0 = np.log(qt / q)
        l1 = np.log((1.0 - qt) / (1.0 - q))
        self.h = float(h)
        self._base = float(l0.sum())
        self._delta = l1 - l0
        self._s = 0.0

    @property
    def statistic(self) -> float:
        return self._s

    def step(self, bits_row: np.ndarray) -> tuple[float, bool]:
        row = np.asarray(bits_row, dtype=float)
        if row.shape != self._delta.shape:
            raise DimensionMismatch("bit row length does not match the network")
        inc = self._base + float(row @ self._delta)
        self._s = max(self._s, 0.0) + inc
        return self._s, self._s >= self.h

    def run(self, monitor_bits: np.ndarray) -> np.ndarray:
        """Whole path at once via the reflected-cumsum identity.

        With c the increment cumsum, s_k = c_k - min(0, c_1, .., c_{k-1}),
        which equals the step recursion exactly.
        """
        bits = np.asarray(monitor_bits, dtype=float)
        inc = bits @ self._delta + self._base
        c = np.cumsum(inc)
        lowest = np.minimum.accumulate(np.concatenate(([0.0], c[:-1])))
        return c - lowest


class GcusumDetector:
    """Shared state for H_G and H_A with step and whole-run interfaces.

    Construct with the secure-phase bits, then either feed monitoring rows
    through step() or hand a full monitoring matrix to run(). The two
    interfaces keep independent histories; use one per instance.
    """

    def __init__(
        self,
        topology: NetworkTopology,
        noise: NoiseModel,
        secure_bits: np.ndarray,
        tau: float,
        b: float,
        h: float,
    ) -> None:
        secure_bits = np.asarray(secure_bits)
        if secure_bits.ndim != 2 or secure_bits.shape[1] != topology.n_sensors:
            raise DimensionMismatch("secure bits must be (M, N)")
        if not b > 0.0:
            raise DomainError("shift floor b must be positive")
        self.topology = topology
        self.noise = noise
        self.tau = float(tau)
        self.b = float(b)
        self.h = float(h)
        self.m = secure_bits.shape[0]
        self.n = topology.n_sensors
        self._secure = np.array(topology.secure, dtype=np.int64)
        self._insecure = np.array(topology.insecure, dtype=np.int64)
        self.n_s = len(self._secure)
        self.lambda_m = int(secure_bits.sum())
        self.k = 0
        self._lam_n = 0
        self._lam_s = 0
        cap = 64
        self._rows = np.zeros((cap, self.n), dtype=np.uint8)
        self._prefix = np.zeros((len(self._insecure), cap + 1), dtype=np.int64)
        self._a_prefix = np.zeros(cap + 1, dtype=np.int64)
        self._lam_n_cum = np.zeros(cap, dtype=np.int64)
        self._lam_s_cum = np.zeros(cap, dtype=np.int64)
        self._xlx = _kernels.xlogx_table(cap)

    def _grow(self, need: int) -> None:
        cap = self._rows.shape[0]
        if need <= cap:
            return
        new_cap = max(2 * cap, need)
        for name, axis in (("_rows", 0), ("_prefix", 1), ("_a_prefix", 0),
                           ("_lam_n_cum", 0), ("_lam_s_cum", 0)):
            old = getattr(self, name)
            shape = list(old.shape)
            shape[axis] = new_cap + (1 if name in ("_prefix", "_a_prefix") else 0)
            fresh = np.zeros(shape, dtype=old.dtype)
            sl = [slice(None)] * old.ndim
            sl[axis] = slice(0, old.shape[axis])
            fresh[tuple(sl)] = old
            setattr(self, name, fresh)
        self._xlx = _kernels.xlogx_table(new_cap)

    def step(self, bits_row: np.ndarray) -> GcusumStep:
        """Ingest one monitoring row and rescan all candidate attack steps."""
        row = np.asarray(bits_row)
        if row.shape != (self.n,):
            raise DimensionMismatch("bit row length does not match the network")
        row = row.astype(np.uint8)
        k = self.k + 1
        self._grow(k)
        self._rows[k - 1] = row
        col = row[self._insecure].astype(np.int64)
        self._prefix[:, k] = self._prefix[:, k - 1] + col
        self._a_prefix[k] = self._a_prefix[k - 1] + col.sum()
        self._lam_n += int(row.sum())
        self._lam_s += int(row[self._secure].sum()) if self.n_s else 0
        self._lam_n_cum[k - 1] = self._lam_n
        self._lam_s_cum[k - 1] = self._lam_s
        self.k = k
        h_g, h_a, k_hat, status = _kernels.scan_candidates(
            self._prefix, self._a_prefix, self._xlx, k, self.lambda_m,
            self._lam_n, self._lam_s, self.m, self.n, self.n_s, self.b,
            self.noise.code, self.noise.scale)
        if status != _kernels.STATUS_OK:
            raise DegenerateBits(f"pooled bit fraction hit 0 or 1 at monitoring step {k}")
        return GcusumStep(k=k, h_g=h_g, h_a=h_a, k_hat=int(k_hat),
                          stopped_g=h_g >= self.h, stopped_a=h_a >= self.h)

    def run(self, monitor_bits: np.ndarray, h_stop: float | None = None) -> GcusumRun:
        """Evaluate the full monitoring pass, stopping once both statistics
        reach h_stop (defaults to never stopping early)."""
        bits = np.asarray(monitor_bits)
        if bits.ndim != 2 or bits.shape[1] != self.n:
            raise DimensionMismatch("monitoring bits must be (K, N)")
        bits = bits.astype(np.uint8)
        bits_att = np.ascontiguousarray(bits[:, self._insecure].T)
        lam_n_cum = np.cumsum(bits.sum(axis=1, dtype=np.int64))
        if self.n_s:
            lam_s_cum = np.cumsum(bits[:, self._secure].sum(axis=1, dtype=np.int64))
        else:
            lam_s_cum = np.zeros(bits.shape[0], dtype=np.int64)
        stop = math.inf if h_stop is None else float(h_stop)
        h_g, h_a, k_hat, n_steps, status = _kernels.gcusum_run(
            bits_att, lam_n_cum, lam_s_cum, self.lambda_m, self.m, self.n,
            self.n_s, self.b, self.noise.code, self.noise.scale, stop)
        if status != _kernels.STATUS_OK:
            raise DegenerateBits(f"pooled bit fraction hit 0 or 1 at monitoring step {n_steps + 1}")
        return GcusumRun(
            h_g=h_g[:n_steps].copy(),
            h_a=h_a[:n_steps].copy(),
            k_hat=k_hat[:n_steps].copy(),
            n_steps=n_steps,
            complete=n_steps == bits.shape[0],
        )

    def sum_statistics(self) -> SumStatistics:
        return SumStatistics(
            lambda_m=self.lambda_m, lambda_n=self._lam_n, lambda_s=self._lam_s,
            m=self.m, k=self.k, n=self.n, n_s=self.n_s)

    def recount_consistent(self) -> bool:
        """Recount the pooled sums from the stored rows (consistency check)."""
        rows = self._rows[: self.k]
        lam_n = int(rows.sum())
        lam_s = int(rows[:, self._secure].sum()) if self.n_s else 0
        a_pref = int(rows[:, self._insecure].sum())
        return (lam_n == self._lam_n and lam_s == self._lam_s
                and a_pref == int(self._a_prefix[self.k]))

    def statistic_at(self, k: int) -> float:
        """Reference evaluation of the candidate-k statistic at the current K.

        Goes through the estimator functions (so through F and F^-1 with
        tau) instead of the kernel's count algebra. Quadratic and slow;
        for verification only.
        """
        if not 1 <= k <= self.k:
            raise DomainError(f"candidate step {k} outside 1..{self.k}")
        stats = self.sum_statistics()
        noise, tau = self.noise, self.tau
        th_u = theta_mle_unattacked(stats, noise, tau)
        th_a = theta_hat_a(stats, noise, tau)
        q_u = noise.q(th_u, tau)
        q_a = noise.q(th_a, tau)
        g1 = math.log(q_a / q_u)
        g2 = math.log((1.0 - q_a) / (1.0 - q_u))
        e1 = (self.m * self.n - self.lambda_m) * g1 + self.lambda_m * g2
        e2 = (self.k * self.n_s - self._lam_s) * g1 + self._lam_s * g2
        a_before = int(self._a_prefix[k - 1])
        e3 = ((k - 1) * len(self._insecure) - a_before) * g1 + a_before * g2
        e4 = 0.0
        window = self.k - k + 1
        for idx in range(len(self._insecure)):
            m1 = int(self._prefix[idx, self.k] - self._prefix[idx, k - 1])
            m0 = window - m1
            wbar = m1 / window
            mu_t = tau - th_a - noise.quantile(1.0 - wbar)
            qt = noise.qtilde(th_a, max(mu_t, self.b), tau)
            if m0 > 0:
                e4 += m0 * math.log(qt / q_u)
            if m1 > 0:
                e4 += m1 * math.log((1.0 - qt) / (1.0 - q_u))
        return e1 + e2 + e3 + e4


def write_statistic_trace(path: str, run: GcusumRun) -> None:
    """Dump per-step statistics as CSV `K,H_G,H_A,k_hat`."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["K", "H_G", "H_A", "k_hat"])
        for i in range(run.n_steps):
            writer.writerow([i + 1, f"{run.h_g[i]:.12g}", f"{run.h_a[i]:.12g}",
                             int(run.k_hat[i])])
