"""Closed-form estimators of the parameter and the attack shifts.

All estimators act through bit sums. With F the noise CDF and tau the
quantizer threshold, the bit-one fraction of a clean pool concentrates at
1 - q(theta) = 1 - F(tau - theta), so inverting F on a pooled fraction s
gives the estimate

    theta_hat = tau - F^-1(1 - s).

Two pools matter:
    unattacked pool   s_u = (lambda_M + lambda_N) / ((M + K) N)
                      (all bits, valid when no sensor is compromised)
    secure-only pool  s_a = (lambda_M + lambda_S) / (M N + K N_S)
                      (secure-phase bits plus monitoring bits from secure
                      sensors, valid under attack)

Shift estimates at a compromised sensor invert F on that sensor's windowed
bit mean and clamp at the known floor b. A small-instance numeric maximizer
of the exact constrained likelihood is included for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateBits, DomainError, OracleScaleExceeded
from .noise import NoiseModel
from .scenario import BitStreams
from .topology import NetworkTopology

ORACLE_MAX_SENSORS = 4
ORACLE_MAX_STEPS = 50


@dataclass(frozen=True)
class SumStatistics:
    """Bit sums by phase and sensor class.

    lambda_m: secure-phase sum over all sensors (M steps, N sensors)
    lambda_n: monitoring-phase sum over all sensors (K steps)
    lambda_s: monitoring-phase sum over the N_S secure sensors only
    """

    lambda_m: int
    lambda_n: int
    lambda_s: int
    m: int
    k: int
    n: int
    n_s: int

    def __post_init__(self) -> None:
        if not 0 <= self.lambda_s <= self.lambda_n:
            raise DomainError("need 0 <= lambda_s <= lambda_n")
        if not 0 <= self.lambda_m <= self.m * self.n:
            raise DomainError("lambda_m outside [0, M*N]")
        if self.lambda_n > self.k * self.n:
            raise DomainError("lambda_n exceeds K*N")
        if self.lambda_s > self.k * self.n_s:
            raise DomainError("lambda_s exceeds K*N_S")
        if not 0 <= self.n_s <= self.n:
            raise DomainError("need 0 <= N_S <= N")

    @property
    def s_u(self) -> float:
        """Bit-one fraction of the all-sensor pool."""
        return (self.lambda_m + self.lambda_n) / ((self.m + self.k) * self.n)

    @property
    def s_a(self) -> float:
        """Bit-one fraction of the attack-proof pool."""
        return (self.lambda_m + self.lambda_s) / (self.m * self.n + self.k * self.n_s)


def sum_statistics(streams: BitStreams, topology: NetworkTopology, k: int | None = None) -> SumStatistics:
    """Pool the first k monitoring steps of a sampled run into sums."""
    if k is None:
        k = streams.monitor.shape[0]
    if k > streams.monitor.shape[0]:
        raise DomainError(f"k = {k} exceeds the {streams.monitor.shape[0]} sampled monitoring steps")
    mon = streams.monitor[:k]
    sec_idx = list(topology.secure)
    return SumStatistics(
        lambda_m=int(streams.secure.sum()),
        lambda_n=int(mon.sum()),
        lambda_s=int(mon[:, sec_idx].sum()) if sec_idx else 0,
        m=streams.secure.shape[0],
        k=k,
        n=topology.n_sensors,
        n_s=len(sec_idx),
    )


def _invert_fraction(fraction: float, noise: NoiseModel, tau: float, what: str) -> float:
    if not 0.0 < fraction < 1.0:
        raise DegenerateBits(f"{what} bit fraction is {fraction}; estimator diverges")
    return tau - noise.quantile(1.0 - fraction)


def theta_mle_unattacked(stats: SumStatistics, noise: NoiseModel, tau: float) -> float:
    """tau - F^-1(1 - s_u); exact MLE when no sensor is compromised."""
    return _invert_fraction(stats.s_u, noise, tau, "pooled")


def theta_hat_a(stats: SumStatistics, noise: NoiseModel, tau: float) -> float:
    """tau - F^-1(1 - s_a); uses only attack-proof bits."""
    return _invert_fraction(stats.s_a, noise, tau, "secure-pool")


def mu_tilde(theta_a: float, window_bit_mean: float, noise: NoiseModel, tau: float) -> float:
    """Unclamped shift estimate from a sensor's windowed bit mean."""
    if not 0.0 < window_bit_mean < 1.0:
        raise DegenerateBits(f"window bit mean is {window_bit_mean}; estimator diverges")
    return tau - theta_a - noise.quantile(1.0 - window_bit_mean)


def mu_hat(theta_a: float, window_bit_mean: float, noise: NoiseModel, tau: float, b: float) -> float:
    """Shift estimate clamped at the floor: max{mu_tilde, b}."""
    return max(mu_tilde(theta_a, window_bit_mean, noise, tau), b)


def loglike_f0(streams: BitStreams, theta: float, noise: NoiseModel, tau: float) -> float:
    """Bernoulli log-likelihood of every bit under no attack."""
    q = noise.q(theta, tau)
    ones = int(streams.secure.sum()) + int(streams.monitor.sum())
    total = streams.secure.size + streams.monitor.size
    return ones * np.log(1.0 - q) + (total - ones) * np.log(q)


def loglike_f1(
    streams: BitStreams,
    topology: NetworkTopology,
    theta: float,
    mu: np.ndarray,
    k: int,
    noise: NoiseModel,
    tau: float,
) -> float:
    """Log-likelihood with per-sensor shifts active from monitoring step k.

    mu is a length-N vector; entries at secure sensors must be zero. With
    mu identically zero this reduces to loglike_f0 at the same theta.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (topology.n_sensors,):
        raise DomainError("mu must have one entry per sensor")
    if any(mu[list(topology.secure)] != 0.0):
        raise DomainError("secure sensors cannot carry a shift")
    if not 1 <= k <= streams.monitor.shape[0] + 1:
        raise DomainError("candidate attack step k outside 1..K+1")
    q = noise.q(theta, tau)
    total = 0.0
    ones_clean = int(streams.secure.sum()) + int(streams.monitor[: k - 1].sum())
    n_clean = streams.secure.size + (k - 1) * topology.n_sensors
    post = streams.monitor[k - 1 :]
    for j in range(topology.n_sensors):
        col_ones = int(post[:, j].sum())
        col_len = post.shape[0]
        if mu[j] == 0.0:
            ones_clean += col_ones
            n_clean += col_len
            continue
        qt = noise.qtilde(theta, mu[j], tau)
        total += col_ones * np.log(1.0 - qt) + (col_len - col_ones) * np.log(qt)
    total += ones_clean * np.log(1.0 - q) + (n_clean - ones_clean) * np.log(q)
    return float(total)


def mle_attack_oracle(
    streams: BitStreams,
    topology: NetworkTopology,
    noise: NoiseModel,
    tau: float,
    b: float,
    k: int,
) -> tuple[float, np.ndarray]:
    """Numerically maximize loglike_f1 over theta and mu_j >= b.

    Small instances only. For fixed theta the per-sensor window likelihood
    is unimodal in mu_j with stationary point where qtilde matches the
    window bit mean, so the inner maximizer is closed-form and clamped to
    [b, b + 6*scale]; the outer theta search is a dense grid refined by a
    bounded scalar minimization around the best cell.
    """
    n = topology.n_sensors
    total_steps = streams.secure.shape[0] + streams.monitor.shape[0]
    if n > ORACLE_MAX_SENSORS or total_steps > ORACLE_MAX_STEPS:
        raise OracleScaleExceeded(
            f"oracle limited to {ORACLE_MAX_SENSORS} sensors and {ORACLE_MAX_STEPS} total steps; "
            f"got N={n}, M+K={total_steps}"
        )
    insecure = topology.insecure
    window = streams.monitor[k - 1 :]
    means = {j: float(window[:, j].mean()) if window.shape[0] else 0.0 for j in insecure}
    scale = noise.scale
    mu_hi = b + 6.0 * scale

    def best_mu(theta: float) -> np.ndarray:
        out = np.zeros(n)
        for j in insecure:
            # Interior stationary point: qtilde = 1 - window mean.
            star = tau - theta - noise.quantile(1.0 - means[j])
            out[j] = float(np.clip(star, b, mu_hi))
        return out

    def profile(theta: float) -> float:
        return loglike_f1(streams, topology, theta, best_mu(theta), k, noise, tau)

    grid = np.linspace(tau - 6.0 * scale, tau + 6.0 * scale, 400)
    values = np.array([profile(t) for t in grid])
    i = int(np.argmax(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda t: -profile(t), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    theta_star = float(res.x) if -res.fun >= values[i] else float(grid[i])
    return theta_star, best_mu(theta_star)
