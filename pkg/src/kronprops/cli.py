"""Command-line interface: ``kronprops {predict,generate,verify,sweep,regime}``.

Exit status is 0 on success, 1 when an argument fails validation (including
an initiator that breaks ``gamma <= beta <= alpha``) and 2 when output
cannot be written.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Sequence

from . import analytic, experiments
from .edgelist import format_edgelist
from .errors import KroneckerError
from .model import ModelParams, validate_initiator
from .sampler import sample

#: Seed used when ``--seed`` is not given.
DEFAULT_SEED = 20110101

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise _UsageError(f"{self.prog}: error: {message}")


def _add_theta(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--alpha", type=float, required=required)
    p.add_argument("--beta", type=float, required=required)
    p.add_argument("--gamma", type=float, required=required)


def _add_k(p: argparse.ArgumentParser) -> None:
    p.add_argument("-k", "--k", dest="k", type=int, required=True, help="Kronecker power")


def _add_output(p: argparse.ArgumentParser, formats: Sequence[str], default: str) -> None:
    p.add_argument("-o", "--output", help="output path (default: stdout)")
    p.add_argument("--format", choices=formats, default=default)


def _add_sampling(p: argparse.ArgumentParser, replicates: int | None) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--sampler", choices=("auto", "dense", "stratified"), default="auto")
    if replicates is not None:
        p.add_argument("--replicates", type=int, default=replicates)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kronprops", description="Stochastic Kronecker graph toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("predict", help="print every analytic prediction and the regime report")
    _add_theta(p)
    _add_k(p)
    _add_output(p, ("json", "csv"), "json")

    p = sub.add_parser("generate", help="sample one graph and write it as an edge list")
    _add_theta(p)
    _add_k(p)
    _add_sampling(p, None)
    p.add_argument("--replicate", type=int, default=0)
    _add_output(p, ("edgelist",), "edgelist")

    p = sub.add_parser("verify", help="Monte Carlo comparison against the predictions")
    _add_theta(p)
    _add_k(p)
    _add_sampling(p, experiments.DEFAULT_VERIFY_REPLICATES)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument(
        "--record-wall-time",
        action="store_true",
        help="store the measured wall time in the report (output is then not byte-reproducible)",
    )
    _add_output(p, ("json", "csv"), "json")

    p = sub.add_parser("sweep", help="P[no edges] / P[no loops] along a one-parameter path")
    _add_theta(p, required=False)
    p.add_argument("--vary", choices=("alpha", "beta", "gamma"), required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("-k", "--k", dest="k", type=int, nargs="+", required=True)
    p.add_argument("--feature", choices=("edges", "loops"), default="edges")
    _add_sampling(p, experiments.DEFAULT_SWEEP_REPLICATES)
    _add_output(p, ("json", "csv"), "json")

    p = sub.add_parser("regime", help="which no-feature conditions hold for theta")
    _add_theta(p)
    _add_output(p, ("json", "csv"), "json")
    return parser


def _predict(args) -> bytes:
    params = ModelParams.of(args.alpha, args.beta, args.gamma, args.k)
    preds = analytic.all_predictions(params)
    regime = analytic.regime_report(params.initiator)
    if args.format == "csv":
        rows = [(name,) + tuple(pred.to_dict().values()) for name, pred in preds.items()]
        header = ("name", "feature", "kind", "value", "formula_id", "underflow")
        return experiments.csv_text(header, rows).encode("utf-8")
    doc = {
        "params": experiments.params_dict(params),
        "expected_total_degree": analytic.expected_total_degree(params),
        "predictions": {name: pred.to_dict() for name, pred in preds.items()},
        "regime": regime.to_dict(),
    }
    return (experiments.dumps_json(doc) + "\n").encode("utf-8")


def _generate(args) -> bytes:
    params = ModelParams.of(args.alpha, args.beta, args.gamma, args.k)
    g = sample(params, args.seed, args.replicate, args.sampler)
    return format_edgelist(g).encode("utf-8")


def _verify(args) -> bytes:
    params = ModelParams.of(args.alpha, args.beta, args.gamma, args.k)
    report = experiments.run_monte_carlo(params, args.replicates, args.seed, args.sampler, args.workers)
    print(f"wall time: {report.wall_time:.3f} s", file=sys.stderr)
    if not args.record_wall_time:
        # keep identical invocations byte-identical
        report = dataclasses.replace(report, wall_time=0.0)
    return experiments.emit_report(report, args.format)


def _sweep(args) -> bytes:
    fixed = {name: getattr(args, name) for name in ("alpha", "beta", "gamma") if name != args.vary}
    missing = [name for name, value in fixed.items() if value is None]
    if missing:
        raise _UsageError(f"sweep needs --{' and --'.join(missing)} when varying {args.vary}")
    fixed[args.vary] = 0.0
    path = experiments.parameter_path(args.vary, args.start, args.stop, args.steps, **fixed)
    for k in args.k:
        ModelParams(path[0], k)
    spec = experiments.SweepSpec(path, tuple(args.k), args.replicates, args.seed, args.feature, args.sampler)
    return experiments.emit_report(experiments.run_sweep(spec), args.format)


def _regime(args) -> bytes:
    theta = validate_initiator(args.alpha, args.beta, args.gamma)
    doc = {"alpha": theta.alpha, "beta": theta.beta, "gamma": theta.gamma}
    doc.update(analytic.regime_report(theta).to_dict())
    if args.format == "csv":
        return experiments.csv_text(tuple(doc), [tuple(doc.values())]).encode("utf-8")
    return (experiments.dumps_json(doc) + "\n").encode("utf-8")


_COMMANDS = {
    "predict": _predict,
    "generate": _generate,
    "verify": _verify,
    "sweep": _sweep,
    "regime": _regime,
}


def _validate_theta(args) -> None:
    # fail on a bad initiator before any sampling or file creation
    if args.command == "sweep":
        return
    validate_initiator(args.alpha, args.beta, args.gamma)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _validate_theta(args)
        if args.command == "verify" and args.replicates < 2:
            raise _UsageError("--replicates must be at least 2")
        if args.command == "sweep" and args.replicates < 0:
            raise _UsageError("--replicates must be >= 0")
        payload = _COMMANDS[args.command](args)
    except (_UsageError, KroneckerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        if args.output:
            with open(args.output, "wb") as fh:
                fh.write(payload)
        else:
            sys.stdout.buffer.write(payload)
            sys.stdout.flush()
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
