"""Command line entry point: ``sparselae {encode,sweep,gen,metrics}``."""

import argparse
import sys

from . import __version__
from .encoder import dense_encoder
from .errors import SparseLAEError
from .harness import (
    ALGORITHMS,
    DEFAULT_REPETITIONS,
    ExperimentConfig,
    SweepSpec,
    error_document,
    execute,
    exit_code_for,
    load_input,
    reports_to_json,
    rows_to_csv,
    single_row,
    sweep,
    default_seed,
)
from .io import FORMATS, format_matrix, load_matrix, save_matrix
from .metrics import build_report
from .synthetic import KINDS, generate_synthetic


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1); 2 is reserved for numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $SPARSELAE_SEED or 0)")
    p.add_argument("--trials", type=int, default=1, help="best-of trials for randomized selection")
    p.add_argument("--format", dest="fmt", default=None, help="output format")
    p.add_argument("-o", "--output", default=None, help="output path (default: stdout)")


def _input(p):
    p.add_argument("-i", "--input", required=True, help="matrix file (headerless CSV or MatrixMarket)")
    p.add_argument("--input-format", choices=FORMATS, default=None)
    p.add_argument("--dataset", default=None, help="check the input against a known dataset shape")


def _encoder_opts(p):
    p.add_argument("--algorithm", choices=ALGORITHMS, default="batch")
    p.add_argument("--strategy", choices=("greedy", "randomized"), default="greedy")
    p.add_argument("--max-iters", type=int, default=1000, help="TPower iteration cap")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings (not reproducible)")


def build_parser():
    parser = _Parser(prog="sparselae", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", help="build one sparse encoder and report its losses")
    _input(p)
    _common(p)
    _encoder_opts(p)
    p.add_argument("-k", type=int, required=True)
    spars = p.add_mutually_exclusive_group(required=True)
    spars.add_argument("-r", type=int, help="sparsity per column")
    spars.add_argument("--schedule", type=int, nargs="+", help="per-column sparsities (iterative)")
    spars.add_argument("--eps", type=float, help="accuracy for the adaptive schedule (iterative)")
    p.add_argument("--encoder-out", default=None, help="also write H as CSV")

    p = sub.add_parser("sweep", help="run a grid of k and sparsity values")
    _input(p)
    _common(p)
    _encoder_opts(p)
    p.add_argument("-k", type=int, nargs="+", required=True)
    spars = p.add_mutually_exclusive_group(required=True)
    spars.add_argument("-r", type=int, nargs="+")
    spars.add_argument("--eps", type=float, nargs="+")
    p.add_argument("--reps", type=int, default=DEFAULT_REPETITIONS)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("gen", help="generate a synthetic matrix")
    _common(p)
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--decay", type=float, default=1.0)
    p.add_argument("--spikes", type=int, default=3)
    p.add_argument("--spike", type=float, default=10.0)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--value", type=float, default=1.0)

    p = sub.add_parser("metrics", help="report losses of a given encoder matrix")
    _input(p)
    _common(p)
    p.add_argument("--encoder", required=True, help="d x k encoder matrix file")
    p.add_argument("-k", type=int, default=None, help="PCA rank for normalisation (default: columns of H)")
    return parser


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _config(args, **over):
    seed = args.seed if args.seed is not None else default_seed()
    fields = dict(
        input_path=args.input,
        input_format=args.input_format,
        dataset=args.dataset,
        algorithm=args.algorithm,
        strategy=args.strategy,
        trials=args.trials,
        seed=seed,
        output_path=args.output,
        output_format=args.fmt or "json",
        max_iters=args.max_iters,
    )
    fields.update(over)
    return ExperimentConfig(**fields)


def cmd_encode(args):
    config = _config(
        args,
        k=args.k,
        r=args.r,
        schedule=tuple(args.schedule) if args.schedule else None,
        eps=args.eps,
    ).validate()
    enc, _, report = execute(config)
    if args.encoder_out:
        save_matrix(args.encoder_out, enc.H, "csv")
    if config.output_format == "csv":
        return rows_to_csv([single_row(config, report)])
    return reports_to_json([report], include_timings=args.timings)


def cmd_sweep(args):
    base = _config(args, k=args.k[0], r=args.r[0] if args.r else None, eps=args.eps[0] if args.eps else None)
    spec = SweepSpec(
        k_values=tuple(args.k),
        r_values=tuple(args.r) if args.r else None,
        eps_values=tuple(args.eps) if args.eps else None,
        repetitions=args.reps,
    )
    base.validate()
    rows = sweep(spec, base, load_input(base), workers=args.workers)
    if base.output_format == "csv":
        return rows_to_csv(rows)
    return reports_to_json(rows, include_timings=args.timings)


def cmd_gen(args):
    seed = args.seed if args.seed is not None else default_seed()
    params = dict(decay=args.decay, spikes=args.spikes, spike=args.spike, noise=args.noise, value=args.value)
    X = generate_synthetic(args.kind, args.n, args.d, params, seed)
    return format_matrix(X, args.fmt or "csv")


def cmd_metrics(args):
    X = load_matrix(args.input, args.input_format)
    H = load_matrix(args.encoder)
    enc = dense_encoder(H, mode="external")
    k = args.k if args.k is not None else enc.k
    report = build_report(X, enc, k, algorithm="external")
    return reports_to_json([report])


COMMANDS = {"encode": cmd_encode, "sweep": cmd_sweep, "gen": cmd_gen, "metrics": cmd_metrics}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = COMMANDS[args.command](args)
        _emit(text, args.output)
        return 0
    except (SparseLAEError, OSError) as exc:
        code = exit_code_for(exc)
        sys.stderr.write(f"sparselae: {type(exc).__name__}: {exc}\n")
        try:
            _emit(error_document(exc), args.output)
        except OSError:
            pass
        return code


if __name__ == "__main__":
    sys.exit(main())
