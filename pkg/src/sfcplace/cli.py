"""Command-line interface.

Subcommands: train, evaluate, sweep, scenario-series, report and a small
rbd debugger that prints the availability tree of a hand-written placement.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import core, experiments, rbd
from .core import ConfigurationError


def _add_common(parser: argparse.ArgumentParser, config_required: bool = True):
    parser.add_argument("--config", required=config_required, help="experiment config JSON")
    parser.add_argument("--seed", type=int, default=None, help="base seed override")
    parser.add_argument("--reps", type=int, default=None, help="repetition override")
    parser.add_argument("--steps", type=int, default=None, help="training-step override")
    parser.add_argument(
        "--horizon-hours", type=float, default=None, help="evaluation horizon override"
    )
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument(
        "--servers", type=int, default=None, help="scale the server count"
    )


def _load(args) -> experiments.ExperimentConfig:
    cfg = experiments.load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if getattr(args, "reps", None) is not None:
        cfg = dataclasses.replace(cfg, repetitions=args.reps)
    if getattr(args, "servers", None) is not None:
        cfg = cfg.with_servers(args.servers)
    if getattr(args, "horizon_hours", None) is not None:
        cfg = dataclasses.replace(cfg, eval_horizon_hours=args.horizon_hours)
    return cfg.validate()


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfcplace",
        description="Availability- and energy-aware VNF chain placement experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the configured learning agent")
    _add_common(p_train)

    p_eval = sub.add_parser("evaluate", help="run seeded evaluation repetitions")
    _add_common(p_eval)
    p_eval.add_argument("--checkpoint", default=None, help="trained network file")
    p_eval.add_argument("--trace", default=None, help="write first run's event log CSV")

    p_sweep = sub.add_parser("sweep", help="learning-rate x discount grid")
    _add_common(p_sweep)
    p_sweep.add_argument("--alphas", type=_floats, required=True)
    p_sweep.add_argument("--gammas", type=_floats, required=True)

    p_series = sub.add_parser(
        "scenario-series", help="train+evaluate across one scenario axis"
    )
    _add_common(p_series)
    p_series.add_argument("--axis", choices=experiments.AXIS_CHOICES, required=True)
    p_series.add_argument("--values", type=_floats, required=True)

    p_report = sub.add_parser("report", help="summarise a metrics CSV")
    p_report.add_argument("--input", required=True, help="metrics CSV to read")
    p_report.add_argument("--svg", default=None, help="optional box-plot output")

    p_rbd = sub.add_parser("rbd", help="print a placement's availability tree")
    p_rbd.add_argument("--config", required=True)
    p_rbd.add_argument(
        "--assign",
        required=True,
        help="comma-separated server:redundancy pairs, one per chain position",
    )
    p_rbd.add_argument(
        "--vnfs", default=None, help="comma-separated catalog VNF names per position"
    )
    return parser


def _cmd_rbd(args) -> int:
    cfg = experiments.load_config(args.config)
    servers = core.build_infrastructure(cfg)
    assignments = []
    for pair in args.assign.split(","):
        server_id, q = pair.split(":")
        assignments.append((int(server_id), int(q)))
    catalog = cfg.catalog
    if args.vnfs:
        by_name = {v.name: v for v in catalog}
        try:
            sequence = tuple(by_name[name] for name in args.vnfs.split(","))
        except KeyError as exc:
            raise ConfigurationError(f"unknown VNF name {exc}")
    else:
        sequence = tuple(catalog[i % len(catalog)] for i in range(len(assignments)))
    if len(sequence) != len(assignments):
        raise ConfigurationError("--vnfs and --assign lengths differ")
    customer = core.Customer(0, cfg.base_lambda, cfg.base_mu, cfg.theta)
    request = core.SfcRequest(
        id=0, customer=customer, vnf_sequence=sequence, arrival_time=0.0, lifetime=1.0
    )
    placement = core.Placement(request, assignments)
    vnf_availability = rbd.steady_state_availability(cfg.vnf_mttf, cfg.vnf_mttr)
    tree = rbd.sfc_rbd(placement, servers, vnf_availability)
    print(rbd.format_tree(tree))
    print(f"availability: {rbd.evaluate(tree):.9f} (requirement {cfg.theta})")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            cfg = _load(args)
            checkpoint, curve, _ = experiments.cmd_train(
                cfg, args.out, steps=args.steps, seed=args.seed
            )
            print(f"checkpoint: {checkpoint}")
            print(f"training curve: {curve}")
        elif args.command == "evaluate":
            cfg = _load(args)
            metrics, _, _ = experiments.cmd_evaluate(
                cfg,
                args.out,
                checkpoint=args.checkpoint,
                reps=args.reps,
                horizon=args.horizon_hours,
                trace_path=args.trace,
            )
            print(f"metrics: {metrics}")
        elif args.command == "sweep":
            cfg = _load(args)
            files, summary = experiments.cmd_sweep(
                cfg, args.alphas, args.gammas, args.out,
                reps=args.reps, steps=args.steps,
            )
            for path in files:
                print(f"curve: {path}")
            print(f"summary: {summary}")
        elif args.command == "scenario-series":
            cfg = _load(args)
            path, _ = experiments.cmd_scenario_series(
                cfg, args.axis, args.values, args.out,
                reps=args.reps, steps=args.steps,
            )
            print(f"series: {path}")
        elif args.command == "report":
            print(experiments.cmd_report(args.input, svg_path=args.svg))
        elif args.command == "rbd":
            return _cmd_rbd(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
