"""Command line interface.

Verbs:
  run    execute a scenario from a JSON config (seed/out/workers overridable)
  emit   re-emit a stored report as structured text, CSV or plot data
  net    build and verify an eps-net, writing the coordinate table
  fit    fit symbolic certificate constants against a stored empirical tail
  check  check a certificate document against a stored empirical tail

Exit code 0 iff every verdict in play passed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .certificates import TailCertificate
from .errors import IoFailureError, TailcertError
from .nets import (
    BallSpec,
    ProductSpec,
    SphereSpec,
    StopRule,
    build_net,
    verify_covering,
)
from .report import emit as emit_report
from .report import load_report
from .scenarios import ScenarioConfig, run_scenario
from .util import canonical_json
from .verify import EmpiricalTail, check_certificate, fit_constants


def _write(path, text):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)


def _cmd_run(args) -> int:
    config = ScenarioConfig.from_json_file(
        args.config, seed=args.seed, workers=args.workers,
        out_dir=args.out)
    report = run_scenario(config)
    out_dir = args.out or config.out_dir
    path = os.path.join(out_dir, f"{config.scenario}_report.json")
    _write(path, canonical_json(report.to_document()) + "\n")
    ok = report.all_passed()
    print(f"{config.scenario}: {'PASS' if ok else 'FAIL'} "
          f"({len(report.verdicts)} verdicts, digest {report.content_digest()})")
    print(f"report written to {path}")
    return 0 if ok else 1


def _cmd_emit(args) -> int:
    report = load_report(args.report)
    paths = emit_report(report, args.format, args.out,
                        basename=os.path.splitext(os.path.basename(args.report))[0])
    for p in paths:
        print(p)
    return 0


def _space_from_args(args):
    if args.space == "sphere":
        return SphereSpec(args.dim)
    if args.space == "ball":
        return BallSpec(args.dim, args.radius)
    raise TailcertError(f"unknown space {args.space!r}")


def _cmd_net(args) -> int:
    space = _space_from_args(args)
    stop = StopRule(coverage_probes=args.coverage_probes,
                    coverage_factor=1.0,
                    max_points=args.max_points)
    net = build_net(space, args.epsilon, args.seed, strategy=args.strategy,
                    stop=stop)
    report = verify_covering(net, args.probes, args.seed + 1,
                             tolerance=args.tolerance)
    net = net.with_verification(report)
    _write(args.out, net.to_table_text())
    print(f"|net| = {net.cardinality}, max probe distance "
          f"{report.max_probe_distance:.6f} "
          f"({'pass' if report.passed else 'FAIL'} at tolerance "
          f"{args.tolerance}), written to {args.out}")
    return 0 if report.passed else 1


def _load_tail(path) -> EmpiricalTail:
    try:
        with open(path) as fh:
            return EmpiricalTail.from_document(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailureError(f"cannot read tail {path}: {exc}") from exc


def _load_cert(path) -> TailCertificate:
    try:
        with open(path) as fh:
            return TailCertificate.from_document(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailureError(f"cannot read certificate {path}: {exc}") from exc


def _cmd_fit(args) -> int:
    shape = _load_cert(args.cert)
    tail = _load_tail(args.tail)
    search = {}
    for spec in args.search:
        name, bounds = spec.split("=")
        lo, hi = bounds.split(":")
        search[name] = (float(lo), float(hi))
    fitted, verdict = fit_constants(shape, tail, search)
    _write(args.out, canonical_json(fitted.to_document()) + "\n")
    consts = ", ".join(f"{k}={v:.6g}" for k, v in verdict.fitted_constants)
    print(f"fitted {consts}; worst slack {verdict.worst_slack:.4f}; "
          f"written to {args.out}")
    return 0 if verdict.passed else 1


def _cmd_check(args) -> int:
    cert = _load_cert(args.cert)
    tail = _load_tail(args.tail)
    verdict = check_certificate(cert, tail)
    print(canonical_json(verdict.to_obj()))
    return 0 if verdict.passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tailcert",
        description="tail-bound certificates: build, verify, fit, report")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario from a JSON config")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--workers", type=int, default=None)
    p_run.set_defaults(fn=_cmd_run)

    p_emit = sub.add_parser("emit", help="emit a stored report")
    p_emit.add_argument("report")
    p_emit.add_argument("--format", default="structured-text",
                        choices=["structured-text", "csv", "plotdata"])
    p_emit.add_argument("--out", default=".")
    p_emit.set_defaults(fn=_cmd_emit)

    p_net = sub.add_parser("net", help="build and verify an eps-net")
    p_net.add_argument("--space", default="sphere", choices=["sphere", "ball"])
    p_net.add_argument("--dim", type=int, required=True)
    p_net.add_argument("--radius", type=float, default=1.0)
    p_net.add_argument("--epsilon", type=float, required=True)
    p_net.add_argument("--seed", type=int, default=0)
    p_net.add_argument("--strategy", default="greedy_packing",
                       choices=["greedy_packing", "angular_lattice",
                                "lattice_shell"])
    p_net.add_argument("--probes", type=int, default=100000)
    p_net.add_argument("--tolerance", type=float, default=0.05)
    p_net.add_argument("--coverage-probes", type=int, default=65536)
    p_net.add_argument("--max-points", type=int, default=None)
    p_net.add_argument("--out", required=True)
    p_net.set_defaults(fn=_cmd_net)

    p_fit = sub.add_parser("fit", help="fit symbolic constants to a tail")
    p_fit.add_argument("--cert", required=True)
    p_fit.add_argument("--tail", required=True)
    p_fit.add_argument("--search", nargs="+", required=True,
                       metavar="NAME=LO:HI")
    p_fit.add_argument("--out", required=True)
    p_fit.set_defaults(fn=_cmd_fit)

    p_check = sub.add_parser("check", help="check a certificate against a tail")
    p_check.add_argument("--cert", required=True)
    p_check.add_argument("--tail", required=True)
    p_check.set_defaults(fn=_cmd_check)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except TailcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
