"""Monte Carlo orchestration: delay and false-alarm curves per detector.

Each replication runs two arms from independent streams: an attacked arm
whose stopping times become delay samples (T - t_a)+, and a clean arm
whose stopping times become false-alarm-period samples, right-censored at
the horizon. Statistic paths do not depend on the threshold, so one
simulated pass per arm serves the whole threshold grid: the pass ends
once every statistic has crossed the largest threshold, and the stopping
time for any smaller threshold is read off the stored path.

Replications are independent; with a worker pool the results are reduced
in replication order, so the output is identical whatever the pool size.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from .centralized import CusumOracle, GcusumDetector
from .dag import DagCusumDetector
from .errors import ConfigError
from .noise import NoiseModel
from .scenario import ScenarioConfig, sample_bit_streams
from .topology import NetworkTopology, build_laplacian_weights

logger = logging.getLogger(__name__)

DETECTOR_ORACLE = "oracle-cusum"
DETECTOR_GCUSUM = "gcusum"
DETECTOR_ALTERNATIVE = "alternative"
DETECTOR_DAG = "dag-cusum"
DETECTORS = (DETECTOR_ORACLE, DETECTOR_GCUSUM, DETECTOR_ALTERNATIVE, DETECTOR_DAG)

CENTRAL = "central"

OUTPUT_DIR_ENV = "BITCUSUM_OUTPUT_DIR"

CSV_COLUMNS = ("detector", "sensor", "h", "false_alarm_period", "mean_delay",
               "delay_ci", "censored_frac", "reps", "seed")


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything one sweep needs; replications only read it."""

    scenario: ScenarioConfig
    topology: NetworkTopology
    noise: NoiseModel
    detectors: tuple[str, ...]
    h_grid: tuple[float, ...]
    replications: int
    horizon: int
    output_path: str | None = None
    scale_eta3_by_n: bool = False
    collapsed_warmup: bool = False

    def __post_init__(self) -> None:
        for d in self.detectors:
            if d not in DETECTORS:
                raise ConfigError(f"unknown detector id {d!r}; known: {', '.join(DETECTORS)}")
        if not self.detectors:
            raise ConfigError("detectors must not be empty")
        if not self.h_grid:
            raise ConfigError("h_grid must not be empty")
        if any(b <= a for a, b in zip(self.h_grid, self.h_grid[1:])):
            raise ConfigError("h_grid must be strictly increasing")
        if self.replications < 1:
            raise ConfigError("replications must be at least 1")
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")


@dataclass(frozen=True)
class RunResult:
    """One (detector, sensor, threshold) summary row."""

    detector: str
    sensor: str
    h: float
    false_alarm_period: float
    mean_delay: float
    delay_ci: float
    censored_frac: float
    reps: int
    seed: int

    def __post_init__(self) -> None:
        if not (math.isnan(self.censored_frac) or 0.0 <= self.censored_frac <= 1.0):
            raise ConfigError("censored_frac must lie in [0, 1]")
        if not math.isnan(self.mean_delay) and self.mean_delay < 0.0:
            raise ConfigError("mean delay cannot be negative")


def _crossings(path: np.ndarray, h_grid: tuple[float, ...]) -> np.ndarray:
    """First 1-based index at or above each threshold; -1 when never."""
    out = np.full(len(h_grid), -1, dtype=np.int64)
    for i, h in enumerate(h_grid):
        hits = np.nonzero(path >= h)[0]
        if hits.size:
            out[i] = int(hits[0]) + 1
    return out


def _replication_stop_times(plan: ExperimentPlan, rep: int) -> dict:
    """Stopping times for one replication: {detector: {sensor: {arm: T per h}}}."""
    scenario, topology, noise = plan.scenario, plan.topology, plan.noise
    h_max = max(plan.h_grid)
    want_central = DETECTOR_GCUSUM in plan.detectors or DETECTOR_ALTERNATIVE in plan.detectors
    out: dict = {d: {} for d in plan.detectors}
    arms = []
    if scenario.attack_time is not None:
        arms.append(("attacked", True))
    arms.append(("clean", False))
    for arm_name, attacked in arms:
        streams = sample_bit_streams(scenario, noise, topology, plan.horizon,
                                     rep=rep, attacked=attacked)
        if DETECTOR_ORACLE in plan.detectors:
            oracle = CusumOracle(topology, noise, scenario.theta,
                                 scenario.mu_full(topology), scenario.tau, h_max)
            path = oracle.run(streams.monitor)
            out[DETECTOR_ORACLE].setdefault(CENTRAL, {})[arm_name] = _crossings(path, plan.h_grid)
        if want_central:
            det = GcusumDetector(topology, noise, streams.secure, scenario.tau,
                                 scenario.b, h_max)
            run = det.run(streams.monitor, h_stop=h_max)
            if DETECTOR_GCUSUM in plan.detectors:
                out[DETECTOR_GCUSUM].setdefault(CENTRAL, {})[arm_name] = _crossings(run.h_g, plan.h_grid)
            if DETECTOR_ALTERNATIVE in plan.detectors:
                out[DETECTOR_ALTERNATIVE].setdefault(CENTRAL, {})[arm_name] = _crossings(run.h_a, plan.h_grid)
        if DETECTOR_DAG in plan.detectors:
            weights = build_laplacian_weights(topology)
            det = DagCusumDetector(topology, weights, noise, scenario.tau,
                                   scenario.b, scenario.alpha, scenario.q_rounds,
                                   h_max, scale_eta3_by_n=plan.scale_eta3_by_n)
            if plan.collapsed_warmup:
                det.warmup_collapsed(streams.secure)
            else:
                det.warmup(streams.secure)
            run = det.run(streams.monitor, h_stop=h_max)
            for j in range(topology.n_sensors):
                out[DETECTOR_DAG].setdefault(str(j + 1), {})[arm_name] = _crossings(
                    run.h_d[:, j], plan.h_grid)
    return out


def _sensor_order(labels) -> list[str]:
    return sorted(labels, key=lambda s: (s != CENTRAL, int(s) if s != CENTRAL else 0))


def run_experiment(plan: ExperimentPlan, parallel: int = 1) -> list[RunResult]:
    """All replications, reduced into one RunResult per (detector, sensor, h).

    Ordering of the result list is deterministic: detectors in canonical
    order, then sensors (central first), then thresholds ascending.
    """
    if plan.horizon ** 2 * plan.topology.n_sensors * plan.replications > 5e10:
        logger.warning(
            "centralized scan cost grows with horizon^2; this plan is large "
            "(horizon=%d, replications=%d)", plan.horizon, plan.replications)
    worker = partial(_replication_stop_times, plan)
    if parallel <= 1:
        per_rep = [worker(r) for r in range(plan.replications)]
    else:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            per_rep = list(pool.map(worker, range(plan.replications)))
    t_a = plan.scenario.attack_time
    results: list[RunResult] = []
    for det in (d for d in DETECTORS if d in plan.detectors):
        for sensor in _sensor_order(per_rep[0][det].keys()):
            for i, h in enumerate(plan.h_grid):
                fa_samples = []
                fa_censored = []
                delays = []
                for r in range(plan.replications):
                    arms = per_rep[r][det][sensor]
                    t_clean = int(arms["clean"][i])
                    fa_censored.append(t_clean < 0)
                    fa_samples.append(plan.horizon if t_clean < 0 else t_clean)
                    if t_a is not None:
                        t_att = int(arms["attacked"][i])
                        if t_att < 0:
                            delays.append(max(plan.horizon - t_a, 0))
                        else:
                            delays.append(max(t_att - t_a, 0))
                if delays:
                    mean_delay = float(np.mean(delays))
                    if len(delays) > 1:
                        ci = 1.96 * float(np.std(delays, ddof=1)) / math.sqrt(len(delays))
                    else:
                        ci = 0.0
                else:
                    mean_delay = math.nan
                    ci = math.nan
                results.append(RunResult(
                    detector=det,
                    sensor=sensor,
                    h=float(h),
                    false_alarm_period=float(np.mean(fa_samples)),
                    mean_delay=mean_delay,
                    delay_ci=ci,
                    censored_frac=float(np.mean(fa_censored)),
                    reps=plan.replications,
                    seed=plan.scenario.master_seed,
                ))
    return results


def resolve_output_path(path: str) -> str:
    """Relative outputs land in the directory named by the environment
    override, when set; absolute paths are used as given."""
    override = os.environ.get(OUTPUT_DIR_ENV)
    if override and not os.path.isabs(path):
        return os.path.join(override, path)
    return path


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_csv(results: list[RunResult], path: str) -> str:
    """Write summary rows sorted by (detector, sensor, h); returns the path.

    Floats are written in shortest round-trip form, so parsing the file
    reproduces the RunResult values exactly.
    """
    path = resolve_output_path(path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    order = {d: i for i, d in enumerate(DETECTORS)}
    rows = sorted(results, key=lambda r: (
        order.get(r.detector, len(order)),
        (r.sensor != CENTRAL, int(r.sensor) if r.sensor != CENTRAL else 0),
        r.h,
    ))
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in rows:
                writer.writerow([
                    r.detector, r.sensor, _fmt(r.h), _fmt(r.false_alarm_period),
                    _fmt(r.mean_delay), _fmt(r.delay_ci), _fmt(r.censored_frac),
                    r.reps, r.seed,
                ])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def parse_results_csv(path: str) -> list[RunResult]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
                raise ConfigError(f"{path}: unexpected results header {reader.fieldnames}")
            return [
                RunResult(
                    detector=row["detector"],
                    sensor=row["sensor"],
                    h=float(row["h"]),
                    false_alarm_period=float(row["false_alarm_period"]),
                    mean_delay=float(row["mean_delay"]),
                    delay_ci=float(row["delay_ci"]),
                    censored_frac=float(row["censored_frac"]),
                    reps=int(row["reps"]),
                    seed=int(row["seed"]),
                )
                for row in reader
            ]
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc


def paper_scale(plan: ExperimentPlan) -> ExperimentPlan:
    """Restore the publication-scale secure phase and replication count."""
    return replace(plan,
                   scenario=replace(plan.scenario, secure_len=5000),
                   replications=2000)
