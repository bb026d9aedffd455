"""Command-line front end.

Exit codes: 0 success, 2 validation failure, 1 config error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import flooding, harness, network
from . import rng as rng_mod


def _add_output_flags(p):
    p.add_argument("--raw-csv", help="write per-trial CSV here")
    p.add_argument("--aggregate-csv", help="write aggregate CSV here")
    p.add_argument("--json", action="store_true",
                   help="print a JSON mirror of the results")


def cmd_simulate(args):
    cfg = harness.parse_config(args.config)
    if args.trials:
        cfg.trials = args.trials
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers:
        cfg.workers = args.workers
    stats, records = harness.run_experiment(cfg)
    if args.raw_csv:
        harness.write_lines(harness.raw_csv_lines(cfg, records), args.raw_csv)
    if args.aggregate_csv:
        harness.write_lines(harness.aggregate_csv_lines([(cfg, stats)]),
                            args.aggregate_csv)
    if args.json:
        print(harness.results_json(cfg, stats, records))
    else:
        for line in harness.aggregate_csv_lines([(cfg, stats)]):
            print(line)
    return 0


def cmd_sweep(args):
    cfg = harness.parse_config(args.config)
    values = [int(v) for v in args.values.split(",")]
    rows = harness.sweep(cfg, args.axis, values)
    lines = list(harness.aggregate_csv_lines(rows))
    if args.aggregate_csv:
        harness.write_lines(lines, args.aggregate_csv)
    for line in lines:
        print(line)
    return 0


def cmd_flood(args):
    cfg = harness.parse_config(args.config)
    cdf = flooding.estimate_tail(
        cfg.comm_model, lambda: harness.make_adversary(cfg), cfg.n, {0},
        args.trials or cfg.trials, seed=cfg.seed, q=cfg.q,
        max_rounds=cfg.max_rounds or 10**6,
        pull_sampling=cfg.pull_sampling)
    if args.csv:
        cdf.to_csv(args.csv)
    print("trials=%d mean=%.4g median=%.4g p99=%.4g rng=%s"
          % (cdf.trials, cdf.mean(), cdf.quantile(0.5), cdf.quantile(0.99),
             rng_mod.ALGORITHM))
    return 0


def cmd_metrics(args):
    g = network.parse_graph_file(args.graph_file)
    if args.induce:
        g = network.induce_weighted(g, args.induce)
    if g.is_weighted:
        print("gamma %.10g" % network.min_cut_gamma(g))
    else:
        print("gamma n/a (unweighted; use --induce push|pull|exchange)")
    if not g.directed_edges:
        print("h %.10g" % network.isoperimetric_h(g))
        if g.is_weighted:
            print("lambda %.10g" % network.conductance_lambda(g))
    return 0


def cmd_validate(args):
    report = harness.validate(args.suite)
    print(json.dumps(report, indent=2, default=str))
    return 0 if report["passed"] else 2


def build_parser():
    ap = argparse.ArgumentParser(
        prog="rlnc-gossip",
        description="Monte Carlo toolkit for network-coding gossip")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario")
    p.add_argument("config")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    _add_output_flags(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("sweep", help="sweep one config axis")
    p.add_argument("config")
    p.add_argument("--axis", required=True)
    p.add_argument("--values", required=True,
                   help="comma-separated integers")
    p.add_argument("--aggregate-csv")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("flood", help="single-message faulty flooding")
    p.add_argument("config")
    p.add_argument("--trials", type=int)
    p.add_argument("--csv", help="write the survival CDF here")
    p.set_defaults(fn=cmd_flood)

    p = sub.add_parser("metrics", help="print gamma, h, lambda")
    p.add_argument("graph_file")
    p.add_argument("--induce", choices=["push", "pull", "exchange"],
                   help="weight an unweighted graph first")
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("validate", help="run a validation suite")
    p.add_argument("suite", choices=sorted(harness.VALIDATION_SUITES))
    p.set_defaults(fn=cmd_validate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except harness.ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
