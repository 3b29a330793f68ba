"""Sequential detection of data-injection attacks from one-bit sensor reports.

A network of N sensors observes a scalar parameter in additive noise and
reports one-bit quantized measurements.  After a secure phase of M steps an
adversary may capture a subset of sensors and inject a positive shift into
their observations.  This package implements the centralized generalized
CUSUM detector for that change, a cheaper asymptotically equivalent variant,
and a fully distributed version built on average consensus, together with
the false-alarm certificates that make the threshold choice auditable.
"""

from .bounds import (
    FalseAlarmCertificate,
    MODE_BENCHMARK,
    MODE_DEPLOYMENT,
    build_certificate,
    epsilons,
    format_certificate,
    plugin_q,
    rate_functions,
    theorem1_probability_floor,
    threshold_for_kappa,
)
from .centralized import CusumOracle, GcusumDetector, GcusumRun, GcusumStep
from .config import load_experiment
from .consensus import (
    ConsensusState,
    LocalLambdaEstimates,
    advance_streams,
    consensus_interval,
    lemma1_bound,
    local_lambda,
    verification_errors,
)
from .dag import DagCusumDetector, DagRun, DagStepResult, eta12_error_constant
from .errors import (
    ConfigError,
    DegenerateBits,
    DegenerateLogArgument,
    DimensionMismatch,
    DisconnectedGraph,
    DomainError,
    InfeasibleMN,
    OracleScaleExceeded,
    SpectralGapViolation,
)
from .estimators import (
    SumStatistics,
    loglike_f0,
    loglike_f1,
    mle_attack_oracle,
    mu_hat,
    mu_tilde,
    sum_statistics,
    theta_hat_a,
    theta_mle_unattacked,
)
from .experiment import (
    ExperimentPlan,
    RunResult,
    emit_csv,
    paper_scale,
    parse_results_csv,
    run_experiment,
)
from .noise import NoiseModel
from .scenario import (
    BitStreams,
    ScenarioConfig,
    dump_bit_trace,
    read_bit_trace,
    sample_bit,
    sample_bit_streams,
    uniform_attack,
)
from .topology import (
    NetworkTopology,
    WeightMatrix,
    build_laplacian_weights,
    mesh12_topology,
    parse_topology_file,
    ring_topology,
    validate_condition1,
    write_topology_file,
)

__version__ = "0.1.0"

__all__ = [
    "BitStreams",
    "ConfigError",
    "ConsensusState",
    "CusumOracle",
    "DagCusumDetector",
    "DagRun",
    "DagStepResult",
    "DegenerateBits",
    "DegenerateLogArgument",
    "DimensionMismatch",
    "DisconnectedGraph",
    "DomainError",
    "ExperimentPlan",
    "FalseAlarmCertificate",
    "GcusumDetector",
    "GcusumRun",
    "GcusumStep",
    "InfeasibleMN",
    "LocalLambdaEstimates",
    "MODE_BENCHMARK",
    "MODE_DEPLOYMENT",
    "NetworkTopology",
    "NoiseModel",
    "OracleScaleExceeded",
    "RunResult",
    "ScenarioConfig",
    "SpectralGapViolation",
    "SumStatistics",
    "WeightMatrix",
    "advance_streams",
    "build_certificate",
    "build_laplacian_weights",
    "consensus_interval",
    "dump_bit_trace",
    "emit_csv",
    "epsilons",
    "eta12_error_constant",
    "format_certificate",
    "lemma1_bound",
    "load_experiment",
    "local_lambda",
    "loglike_f0",
    "loglike_f1",
    "mesh12_topology",
    "mle_attack_oracle",
    "mu_hat",
    "mu_tilde",
    "paper_scale",
    "parse_results_csv",
    "parse_topology_file",
    "plugin_q",
    "rate_functions",
    "read_bit_trace",
    "ring_topology",
    "run_experiment",
    "sample_bit",
    "sample_bit_streams",
    "sum_statistics",
    "theorem1_probability_floor",
    "theta_hat_a",
    "theta_mle_unattacked",
    "threshold_for_kappa",
    "uniform_attack",
    "validate_condition1",
    "verification_errors",
    "write_topology_file",
]
