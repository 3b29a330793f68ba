"""Command line front end.

Three subcommands:

    simulate        run a Monte Carlo sweep described by a config file
    bounds          print the false-alarm certificate for given q, kappa, M, N
    topology-check  validate a topology file and report its spectral gap

Exit codes: 0 success, 1 configuration or input error, 2 infeasible
parameters (the certificate cannot guarantee anything at this M*N).
Errors go to standard error as single `error: ...` lines.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .bounds import MODE_BENCHMARK, build_certificate, format_certificate
from .config import load_experiment
from .errors import ConfigError, InfeasibleMN
from .experiment import emit_csv, paper_scale, run_experiment
from .topology import build_laplacian_weights, parse_topology_file


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="bitcusum",
                     description="Sequential detection of data-injection attacks "
                                 "from one-bit sensor reports.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo sweep from a config file")
    sim.add_argument("--config", required=True, help="experiment config file")
    sim.add_argument("--out", help="results CSV path (overrides the config)")
    sim.add_argument("--seed", type=int, help="master seed (overrides the config)")
    sim.add_argument("--parallel", type=int, default=1, help="worker processes")
    sim.add_argument("--paper-scale", action="store_true",
                     help="publication scale: secure phase 5000, 2000 replications")

    bnd = sub.add_parser("bounds", help="print the false-alarm certificate")
    bnd.add_argument("--q", type=float, help="bit-zero probability")
    bnd.add_argument("--from-config", help="take q (and defaults for M, N) from a config file")
    bnd.add_argument("--kappa", type=float, required=True, help="target false-alarm period")
    bnd.add_argument("--m", type=int, help="secure-phase length M")
    bnd.add_argument("--n", type=int, help="number of sensors N")

    top = sub.add_parser("topology-check", help="validate a topology file")
    top.add_argument("--topology", required=True, help="topology file")
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    plan = load_experiment(args.config)
    if args.paper_scale:
        plan = paper_scale(plan)
    if args.seed is not None:
        plan = replace(plan, scenario=replace(plan.scenario, master_seed=args.seed))
    if args.out:
        plan = replace(plan, output_path=args.out)
    results = run_experiment(plan, parallel=max(args.parallel, 1))
    path = emit_csv(results, plan.output_path)
    print(f"wrote {len(results)} result rows to {path}")
    return 0


def _cmd_bounds(args: argparse.Namespace) -> int:
    if (args.q is None) == (args.from_config is None):
        raise ConfigError("give exactly one of --q or --from-config")
    if args.from_config:
        plan = load_experiment(args.from_config)
        q = plan.noise.q(plan.scenario.theta, plan.scenario.tau)
        m = args.m if args.m is not None else plan.scenario.secure_len
        n = args.n if args.n is not None else plan.topology.n_sensors
    else:
        q = args.q
        if args.m is None or args.n is None:
            raise ConfigError("--m and --n are required with --q")
        m, n = args.m, args.n
    cert = build_certificate(q, args.kappa, m, n, mode=MODE_BENCHMARK)
    print(format_certificate(cert))
    return 0


def _cmd_topology_check(args: argparse.Namespace) -> int:
    topology = parse_topology_file(args.topology)
    weights = build_laplacian_weights(topology)
    secure = " ".join(str(j + 1) for j in topology.secure) or "none"
    print(f"sensors   {topology.n_sensors}")
    print(f"edges     {len(topology.edges)}")
    print(f"secure    {secure}")
    print("connected yes")
    print(f"sigma2 = {weights.sigma2:.6g}")
    rep = weights.report
    print(f"row/col sum error {max(rep.row_sum_error, rep.col_sum_error):.3g}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "bounds": _cmd_bounds,
        "topology-check": _cmd_topology_check,
    }
    try:
        return handlers[args.command](args)
    except InfeasibleMN as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
