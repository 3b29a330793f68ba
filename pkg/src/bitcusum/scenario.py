"""Scenario parameters and reproducible bit-stream generation.

Timeline: a secure phase of length M during which every sensor is known to be
clean, then an open-ended monitoring phase. In the attacked arm, insecure
sensors get a mean shift mu_j from monitoring step t_a onward; secure sensors
are never shifted.

Each (arm, replication, sensor) triple owns an independent counter-seeded
random stream, so replications are exchangeable and can run in parallel
without coordination.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .noise import NoiseModel
from .topology import NetworkTopology

ARM_ATTACKED = 0
ARM_CLEAN = 1

PHASE_SECURE = "secure"
PHASE_MONITOR = "monitor"


@dataclass(frozen=True)
class ScenarioConfig:
    """Scenario parameters: signal, quantizer, attack, and run lengths.

    mu lists (sensor, shift) pairs for the attacked sensors; attack_time is
    the first attacked monitoring step (1-based), or None for a clean run.
    """

    theta: float
    tau: float
    b: float
    mu: tuple[tuple[int, float], ...]
    attack_time: int | None
    secure_len: int
    q_rounds: int = 10
    alpha: float = 0.9
    threshold: float | None = None
    target_kappa: float | None = None
    master_seed: int = 0

    def __post_init__(self) -> None:
        if not self.b > 0.0:
            raise DomainError("attack magnitude floor b must be positive")
        for j, m in self.mu:
            if m < self.b:
                raise DomainError(f"sensor {j + 1}: shift mu = {m} is below the floor b = {self.b}")
        if self.attack_time is not None and self.attack_time < 1:
            raise DomainError("attack_time must be a positive step index")
        if self.secure_len < 1:
            raise DomainError("secure_len must be at least 1")
        if self.q_rounds < 1:
            raise DomainError("q_rounds must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")

    def mu_full(self, topology: NetworkTopology) -> np.ndarray:
        """Length-N shift vector, zero at unlisted sensors.

        Listed sensors must be insecure members of the topology.
        """
        out = np.zeros(topology.n_sensors)
        secure = set(topology.secure)
        for j, m in self.mu:
            if not 0 <= j < topology.n_sensors:
                raise DomainError(f"attacked sensor {j + 1} outside the network")
            if j in secure:
                raise DomainError(f"sensor {j + 1} is secure and cannot carry a shift")
            out[j] = m
        return out


def uniform_attack(topology: NetworkTopology, mu: float) -> tuple[tuple[int, float], ...]:
    """The same shift at every insecure sensor."""
    return tuple((j, mu) for j in topology.insecure)


@dataclass(frozen=True)
class BitRecord:
    """One quantizer output."""

    phase: str
    time_index: int
    sensor: int
    bit: int


@dataclass(frozen=True)
class BitStreams:
    """Bits laid out as (time, sensor); secure and monitoring phases separate."""

    secure: np.ndarray
    monitor: np.ndarray

    @property
    def n_sensors(self) -> int:
        return self.secure.shape[1]


def sample_bit(
    config: ScenarioConfig,
    noise: NoiseModel,
    topology: NetworkTopology,
    sensor: int,
    phase: str,
    time_index: int,
    rng: np.random.Generator,
    attacked: bool = True,
) -> int:
    """Draw one bit 1{theta + shift + noise > tau}.

    The shift applies only in the attacked arm, at an attacked sensor, at
    monitoring steps at or past attack_time.
    """
    shift = 0.0
    if attacked and phase == PHASE_MONITOR and config.attack_time is not None and time_index >= config.attack_time:
        shift = float(config.mu_full(topology)[sensor])
    x = config.theta + shift + noise.scale * _standard_draw(noise, rng)
    return int(x > config.tau)


def _standard_draw(noise: NoiseModel, rng: np.random.Generator) -> float:
    if noise.family == "gaussian":
        return float(rng.standard_normal())
    return float(noise.quantile(rng.random()) / noise.scale)


def sample_bit_streams(
    config: ScenarioConfig,
    noise: NoiseModel,
    topology: NetworkTopology,
    n_monitor: int,
    rep: int = 0,
    attacked: bool = True,
    master_seed: int | None = None,
) -> BitStreams:
    """Sample the full (secure + monitoring) bit matrix for one replication.

    A bit is 1 exactly when its uniform draw exceeds the step's bit-zero
    probability, so a stream is reproducible from (seed, arm, rep, sensor)
    alone regardless of how many other sensors exist.
    """
    if n_monitor < 0:
        raise DomainError("n_monitor must be nonnegative")
    seed = config.master_seed if master_seed is None else master_seed
    arm = ARM_ATTACKED if attacked else ARM_CLEAN
    n = topology.n_sensors
    m = config.secure_len
    q0 = noise.q(config.theta, config.tau)
    mu = config.mu_full(topology)
    total = m + n_monitor
    bits = np.empty((total, n), dtype=np.uint8)
    for j in range(n):
        rng = np.random.default_rng(np.random.SeedSequence([seed, arm, rep, j]))
        u = rng.random(total)
        p0 = np.full(total, q0)
        if attacked and config.attack_time is not None and mu[j] != 0.0:
            start = m + config.attack_time - 1
            if start < total:
                p0[start:] = noise.qtilde(config.theta, mu[j], config.tau)
        bits[:, j] = u > p0
    return BitStreams(secure=bits[:m], monitor=bits[m:])


def dump_bit_trace(path: str, streams: BitStreams) -> None:
    """Write bits as CSV `phase,time,sensor,bit` (1-based sensors)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phase", "time", "sensor", "bit"])
        for phase, block in ((PHASE_SECURE, streams.secure), (PHASE_MONITOR, streams.monitor)):
            for t in range(block.shape[0]):
                for j in range(block.shape[1]):
                    writer.writerow([phase, t + 1, j + 1, int(block[t, j])])


def read_bit_trace(path: str) -> BitStreams:
    """Replay a dumped trace, bypassing the RNG."""
    cells: dict[str, dict[tuple[int, int], int]] = {PHASE_SECURE: {}, PHASE_MONITOR: {}}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            phase = row["phase"]
            if phase not in cells:
                raise DomainError(f"{path}: unknown phase {phase!r}")
            bit = int(row["bit"])
            if bit not in (0, 1):
                raise DomainError(f"{path}: bit must be 0 or 1, got {bit}")
            cells[phase][(int(row["time"]) - 1, int(row["sensor"]) - 1)] = bit
    blocks = {}
    n_sensors = 1 + max((j for d in cells.values() for _, j in d), default=0)
    for phase, d in cells.items():
        n_t = 1 + max((t for t, _ in d), default=-1)
        block = np.zeros((n_t, n_sensors), dtype=np.uint8)
        for (t, j), bit in d.items():
            block[t, j] = bit
        if len(d) != n_t * n_sensors:
            raise DomainError(f"{path}: {phase} phase is missing entries")
        blocks[phase] = block
    return BitStreams(secure=blocks[PHASE_SECURE], monitor=blocks[PHASE_MONITOR])
