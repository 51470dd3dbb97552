"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data or format error, 4 numerical
failure. Every stochastic subcommand requires ``--seed`` and its output
does not depend on ``--threads``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from .analytic import IsingParams, RepetitiveParams, gen_ising, gen_repetitive
from .audit import UNITS, audit, build_vocab, ingest_text, log_lag_grid
from .benchmark import benchmark_estimator, child_seed
from .copula import MODES, build_covariance, sample_binary
from .estimation import ESTIMATORS, Corpus, auto_mi_curve
from .exceptions import MiScalingError, NumericalError
from .fitting import DEFAULT_THRESHOLD, compare_models, fit_exponential, fit_powerlaw
from .io import (
    fit_record,
    format_curve_csv,
    format_record,
    read_corpus,
    read_curve_csv,
    read_params,
    write_corpus,
    write_curve_csv,
)
from .linear_rnn import mi_curve_linear_rnn, poles, sample_linear_rnn

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 2, 3, 4

log = logging.getLogger("miscaling")


# -- argument types ---------------------------------------------------------

def parse_lags(spec: str) -> list:
    """Lag spec: ``a:b`` (inclusive range), ``a,b,c`` or ``log:min:max:ppd``."""
    try:
        if spec.startswith("log:"):
            lo, hi, ppd = (int(x) for x in spec[4:].split(":"))
            return log_lag_grid(lo, hi, ppd)
        if ":" in spec:
            lo, hi = (int(x) for x in spec.split(":"))
            lags = list(range(lo, hi + 1))
        else:
            lags = [int(x) for x in spec.split(",") if x.strip()]
    except (ValueError, MiScalingError) as exc:
        raise argparse.ArgumentTypeError(f"bad lag spec {spec!r}: {exc}") from None
    if not lags or min(lags) < 1:
        raise argparse.ArgumentTypeError(f"bad lag spec {spec!r}: need positive lags")
    return sorted(set(lags))


def _float_list(spec: str) -> list:
    try:
        values = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {spec!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list is empty")
    return values


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _split(text: str):
    label, sep, path = text.partition("=")
    if not sep or not label or not path:
        raise argparse.ArgumentTypeError(f"expected LABEL=PATH, got {text!r}")
    return label, path


# -- output helpers ---------------------------------------------------------

def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as f:
            f.write(text)


def _emit_curve(curve, out: str) -> None:
    if out == "-":
        sys.stdout.write(format_curve_csv(curve))
    else:
        write_curve_csv(curve, out)


def _threads(args) -> int | None:
    return args.threads if args.threads > 1 else None


# -- subcommands ------------------------------------------------------------

def cmd_generate_copula(args) -> int:
    cov = build_covariance(args.amplitude, args.power, args.length, args.mode)
    corpus = sample_binary(cov, args.n_seqs, args.seed, _threads(args))
    if cov.repaired:
        log.warning("covariance repaired, clipped eigenvalue mass %.3g", cov.clipped_mass)
    write_corpus(corpus, args.out)
    return EXIT_OK


def _multi(gen, params, n_seqs, seed) -> Corpus:
    seqs = [gen(params, child_seed(seed, i)) for i in range(n_seqs)]
    return Corpus.from_array(np.vstack([s.symbols for s in seqs]), 2)


def cmd_generate_repetitive(args) -> int:
    corpus = _multi(gen_repetitive, RepetitiveParams(args.p, args.length), args.n_seqs, args.seed)
    write_corpus(corpus, args.out)
    return EXIT_OK


def cmd_generate_ising(args) -> int:
    corpus = _multi(gen_ising, IsingParams(args.beta_j, args.length), args.n_seqs, args.seed)
    write_corpus(corpus, args.out)
    return EXIT_OK


def cmd_estimate_mi(args) -> int:
    corpus = read_corpus(args.corpus)
    longest = int(corpus.lengths.max())
    lags = [lag for lag in args.lags if lag < longest]
    if len(lags) < len(args.lags):
        log.warning("dropped %d lag(s) not shorter than the longest sequence (%d)",
                    len(args.lags) - len(lags), longest)
    curve = auto_mi_curve(corpus, lags, args.estimator, _threads(args))
    _emit_curve(curve, args.out)
    return EXIT_OK


def cmd_fit(args) -> int:
    curve = read_curve_csv(args.curve)
    window = (args.threshold, args.tau_min, args.tau_max)
    if args.model == "exponential":
        rec = fit_record(fit_exponential(curve, *window))
    elif args.model == "powerlaw":
        rec = fit_record(fit_powerlaw(curve, *window))
    else:
        choice, exp_fit, pow_fit = compare_models(curve, *window)
        rec = {"choice": choice}
        rec.update(fit_record(exp_fit, "exponential."))
        rec.update(fit_record(pow_fit, "powerlaw."))
    _emit(format_record(rec), args.out)
    return EXIT_OK


def cmd_benchmark(args) -> int:
    rows = benchmark_estimator(
        args.gammas, args.n_seqs, args.length, args.seed, args.amplitude, args.mode,
        args.estimator, args.threshold, n_jobs=_threads(args),
    )
    lines = ["gamma,gamma_hat,ci95,covered,points_used,r_squared"]
    for r in rows:
        lines.append(
            f"{r.gamma:.10g},{r.gamma_hat:.10g},{r.ci95:.10g},"
            f"{'true' if r.covered else 'false'},{r.fit.points_used},{r.fit.r_squared:.10g}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _pole_record(params, report) -> dict:
    rec = {"m": params.m, "d": params.d, "stability": report.stability,
           "feedback": report.feedback}
    if report.z_min is None:
        rec["z_min"] = "none"
    else:
        rec["z_min"] = report.z_min
        rec["abs_z_min"] = abs(report.z_min)
        rec["covariance_decay_rate"] = report.predicted_rate
        rec["mi_decay_rate"] = 2.0 * report.predicted_rate
    rec["n_poles"] = len(report.poles)
    for i, (z, k) in enumerate(zip(report.poles, report.multiplicity)):
        rec[f"pole.{i}"] = complex(z)
        rec[f"pole.{i}.multiplicity"] = int(k)
    return rec


def cmd_linrnn_analyze(args) -> int:
    params = read_params(args.params)
    report = poles(params)
    curve = mi_curve_linear_rnn(params, args.t_max)
    text = format_record(_pole_record(params, report))
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        write_curve_csv(curve, os.path.join(args.out_dir, "mi_curve.csv"))
        _emit(text, os.path.join(args.out_dir, "poles.txt"))
    sys.stdout.write(text)
    return EXIT_OK


def cmd_linrnn_sample(args) -> int:
    params = read_params(args.params)
    x = sample_linear_rnn(params, args.n_seqs, args.steps, args.seed)
    np.save(args.out, x)
    return EXIT_OK


def cmd_audit(args) -> int:
    paths = {args.train_label: args.train}
    for label, path in args.split:
        if label in paths:
            raise argparse.ArgumentTypeError(f"split label {label!r} given twice")
        paths[label] = path
    if len(paths) < 2:
        raise argparse.ArgumentTypeError("give at least one --split LABEL=PATH")
    raw = {}
    for label, path in paths.items():
        with open(path, "rb") as f:
            raw[label] = f.read()
    vocab = build_vocab(raw.values(), args.unit)
    seqs = {label: ingest_text(data, args.unit, vocab)[0] for label, data in raw.items()}
    train = seqs.pop(args.train_label)
    report = audit(train, seqs, args.lags, args.estimator, train_label=args.train_label)
    rec = {"unit": args.unit, "vocab_size": vocab.size}
    rec.update(report.to_record())
    text = format_record(rec)
    os.makedirs(args.out_dir, exist_ok=True)
    for label, curve in report.curves.items():
        write_curve_csv(curve, os.path.join(args.out_dir, f"curve_{label}.csv"))
    _emit(text, os.path.join(args.out_dir, "report.txt"))
    sys.stdout.write(text)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="miscaling",
        description="Mutual-information scaling of symbol sequences.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_, seed=False):
        p = sub.add_parser(name, help=help_, description=help_)
        p.set_defaults(func=func)
        p.add_argument("--threads", type=_positive, default=1,
                       help="worker threads (does not change results)")
        if seed:
            p.add_argument("--seed", type=_seed, required=True, help="64-bit integer seed")
        return p

    p = add("generate-copula", cmd_generate_copula,
            "binary corpus with power-law MI from a thresholded Gaussian", seed=True)
    p.add_argument("--amplitude", type=float, default=0.1)
    p.add_argument("--power", type=float, default=0.4)
    p.add_argument("--length", type=_positive, default=512)
    p.add_argument("--n-seqs", type=_positive, default=10000)
    p.add_argument("--mode", choices=MODES, default="approx")
    p.add_argument("--out", required=True)

    p = add("generate-repetitive", cmd_generate_repetitive,
            "repetitive binary process with lag-independent MI", seed=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--length", type=_positive, required=True)
    p.add_argument("--n-seqs", type=_positive, default=1)
    p.add_argument("--out", required=True)

    p = add("generate-ising", cmd_generate_ising, "nearest-neighbour Ising chain", seed=True)
    p.add_argument("--beta-j", type=float, required=True)
    p.add_argument("--length", type=_positive, required=True)
    p.add_argument("--n-seqs", type=_positive, default=1)
    p.add_argument("--out", required=True)

    p = add("estimate-mi", cmd_estimate_mi, "auto-MI curve of a corpus file")
    p.add_argument("corpus")
    p.add_argument("--lags", type=parse_lags, default=parse_lags("log:1:1000:10"),
                   help="a:b, a,b,c or log:min:max:per_decade")
    p.add_argument("--estimator", choices=ESTIMATORS, default="grassberger")
    p.add_argument("--out", default="-")

    p = add("fit", cmd_fit, "fit a decay law to an MI curve CSV")
    p.add_argument("curve")
    p.add_argument("--model", choices=("exponential", "powerlaw", "compare"), default="compare")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--tau-min", type=int)
    p.add_argument("--tau-max", type=int)
    p.add_argument("--out", default="-")

    p = add("benchmark-estimator", cmd_benchmark,
            "recover known power laws end to end", seed=True)
    p.add_argument("--gammas", type=_float_list, required=True, help="comma-separated")
    p.add_argument("--n-seqs", type=_positive, default=2000)
    p.add_argument("--length", type=_positive, default=1000)
    p.add_argument("--amplitude", type=float, default=0.1)
    p.add_argument("--mode", choices=MODES, default="exact")
    p.add_argument("--estimator", choices=ESTIMATORS, default="grassberger")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--out", default="-")

    p = add("linrnn-analyze", cmd_linrnn_analyze,
            "analytic MI curve, poles and stability of a linear RNN")
    p.add_argument("params")
    p.add_argument("--t-max", type=_positive, default=200)
    p.add_argument("--out-dir")

    p = add("linrnn-sample", cmd_linrnn_sample, "Monte Carlo runs of a linear RNN", seed=True)
    p.add_argument("params")
    p.add_argument("--n-seqs", type=_positive, required=True)
    p.add_argument("--steps", type=_positive, required=True)
    p.add_argument("--out", required=True, help=".npy file, shape (n_seqs, steps+1, d)")

    p = add("audit-dataset", cmd_audit, "compare MI profiles of text splits")
    p.add_argument("--train", required=True)
    p.add_argument("--train-label", default="train")
    p.add_argument("--split", type=_split, action="append", default=[],
                   metavar="LABEL=PATH", help="repeat for each split")
    p.add_argument("--unit", choices=UNITS, default="unicode_char")
    p.add_argument("--lags", type=parse_lags, default=parse_lags("log:1:1000:10"))
    p.add_argument("--estimator", choices=ESTIMATORS, default="grassberger")
    p.add_argument("--out-dir", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (np.linalg.LinAlgError, FloatingPointError, OverflowError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (MiScalingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
