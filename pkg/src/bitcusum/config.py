"""Experiment configuration files.

INI-style text with three sections:

    [scenario]    theta, tau, b, mu, attack_time, secure_len, q_rounds,
                  alpha, master_seed, noise_family, noise_scale,
                  optional threshold / kappa
    [topology]    file = <path relative to the config file>, or builtin = mesh12
    [experiment]  detectors, h_grid, replications, horizon, output,
                  optional scale_eta3_by_n / collapsed_warmup booleans

mu is either a single number, applied to every insecure sensor, or a list
of sensor:value pairs with 1-based sensors, e.g. "5:0.2 6:0.25".
attack_time accepts "none" for a clean (false-alarm only) run. Errors
name the offending section and option.
"""

from __future__ import annotations

import configparser
import os

from .errors import ConfigError, DomainError
from .experiment import ExperimentPlan
from .noise import FAMILY_CODES, NoiseModel
from .scenario import ScenarioConfig
from .topology import NetworkTopology, mesh12_topology, parse_topology_file

_BUILTIN_TOPOLOGIES = {"mesh12": mesh12_topology}


def _get(parser: configparser.ConfigParser, section: str, option: str, default=None):
    if not parser.has_option(section, option):
        if default is not None:
            return default
        raise ConfigError(f"missing [{section}] {option}")
    return parser.get(section, option)


def _typed(section: str, option: str, raw: str, convert):
    try:
        return convert(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {option}: cannot parse {raw!r}") from exc


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "yes", "true", "on"):
        return True
    if lowered in ("0", "no", "false", "off"):
        return False
    raise ValueError(lowered)


def _parse_mu(raw: str, topology: NetworkTopology) -> tuple[tuple[int, float], ...]:
    tokens = raw.replace(",", " ").split()
    if not tokens:
        raise ConfigError("[scenario] mu: empty value")
    if any(":" in t for t in tokens):
        pairs = []
        for tok in tokens:
            try:
                sensor, value = tok.split(":")
                pairs.append((int(sensor) - 1, float(value)))
            except ValueError as exc:
                raise ConfigError(f"[scenario] mu: cannot parse pair {tok!r}") from exc
        return tuple(pairs)
    if len(tokens) != 1:
        raise ConfigError("[scenario] mu: give one number or sensor:value pairs")
    value = _typed("scenario", "mu", tokens[0], float)
    return tuple((j, value) for j in topology.insecure)


def _parse_topology(parser: configparser.ConfigParser, config_dir: str) -> NetworkTopology:
    has_file = parser.has_option("topology", "file")
    has_builtin = parser.has_option("topology", "builtin")
    if has_file == has_builtin:
        raise ConfigError("[topology]: give exactly one of `file` or `builtin`")
    if has_builtin:
        name = parser.get("topology", "builtin").strip()
        if name not in _BUILTIN_TOPOLOGIES:
            raise ConfigError(f"[topology] builtin: unknown name {name!r}; "
                              f"known: {', '.join(sorted(_BUILTIN_TOPOLOGIES))}")
        return _BUILTIN_TOPOLOGIES[name]()
    path = parser.get("topology", "file").strip()
    if not os.path.isabs(path):
        path = os.path.join(config_dir, path)
    try:
        return parse_topology_file(path)
    except OSError as exc:
        raise ConfigError(f"[topology] file: cannot read {path}: {exc}") from exc
    except DomainError as exc:
        raise ConfigError(f"[topology] file: {exc}") from exc


def load_experiment(path: str) -> ExperimentPlan:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for section in ("scenario", "topology", "experiment"):
        if not parser.has_section(section):
            raise ConfigError(f"missing [{section}] section")

    topology = _parse_topology(parser, os.path.dirname(os.path.abspath(path)))

    family = _get(parser, "scenario", "noise_family", "gaussian").strip()
    if family not in FAMILY_CODES:
        raise ConfigError(f"[scenario] noise_family: unknown family {family!r}")
    noise = NoiseModel(
        family=family,
        scale=_typed("scenario", "noise_scale",
                     _get(parser, "scenario", "noise_scale", "1.0"), float),
    )

    raw_attack = _get(parser, "scenario", "attack_time").strip().lower()
    attack_time = None if raw_attack == "none" else _typed(
        "scenario", "attack_time", raw_attack, int)

    threshold = kappa = None
    if parser.has_option("scenario", "threshold"):
        threshold = _typed("scenario", "threshold", parser.get("scenario", "threshold"), float)
    if parser.has_option("scenario", "kappa"):
        kappa = _typed("scenario", "kappa", parser.get("scenario", "kappa"), float)

    try:
        scenario = ScenarioConfig(
            theta=_typed("scenario", "theta", _get(parser, "scenario", "theta"), float),
            tau=_typed("scenario", "tau", _get(parser, "scenario", "tau"), float),
            b=_typed("scenario", "b", _get(parser, "scenario", "b"), float),
            mu=_parse_mu(_get(parser, "scenario", "mu"), topology),
            attack_time=attack_time,
            secure_len=_typed("scenario", "secure_len", _get(parser, "scenario", "secure_len"), int),
            q_rounds=_typed("scenario", "q_rounds", _get(parser, "scenario", "q_rounds", "10"), int),
            alpha=_typed("scenario", "alpha", _get(parser, "scenario", "alpha", "0.979"), float),
            threshold=threshold,
            target_kappa=kappa,
            master_seed=_typed("scenario", "master_seed",
                               _get(parser, "scenario", "master_seed", "0"), int),
        )
        scenario.mu_full(topology)
    except DomainError as exc:
        raise ConfigError(f"[scenario]: {exc}") from exc

    detectors = tuple(_get(parser, "experiment", "detectors").replace(",", " ").split())
    h_grid_raw = _get(parser, "experiment", "h_grid").replace(",", " ").split()
    h_grid = tuple(_typed("experiment", "h_grid", tok, float) for tok in h_grid_raw)

    return ExperimentPlan(
        scenario=scenario,
        topology=topology,
        noise=noise,
        detectors=detectors,
        h_grid=h_grid,
        replications=_typed("experiment", "replications",
                            _get(parser, "experiment", "replications"), int),
        horizon=_typed("experiment", "horizon", _get(parser, "experiment", "horizon"), int),
        output_path=_get(parser, "experiment", "output", "results.csv"),
        scale_eta3_by_n=_typed("experiment", "scale_eta3_by_n",
                               _get(parser, "experiment", "scale_eta3_by_n", "false"), _parse_bool),
        collapsed_warmup=_typed("experiment", "collapsed_warmup",
                                _get(parser, "experiment", "collapsed_warmup", "false"), _parse_bool),
    )
