"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 parse or usage error,
3 state invariant violation.
"""

import argparse
import os
import sys

import numpy as np

from . import experiments, verification
from .closed_forms import mod_trace_of_max_amplitude, pure_optimal_witness, qubit_optimal_set
from .estimators import closed_form_value, pure_vector
from .io import (SWEEP_COLUMNS, StateFileError, csv_text, fmt_float, format_state, load_state,
                 sweep_rows)
from .solver import SolverOptions, mod_trace_distance, trace_distance_coherence
from .states import haar_pure, random_density, substream
from .validation import ValidationError

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_INVARIANT = 0, 1, 2, 3
DEFAULT_SEED = 42


class UsageError(Exception):
    pass


def parse_range(text):
    """``"A..B"`` (inclusive) or a single integer ``"A"``."""
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B or an integer, got {text!r}") from None
    if b < a:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return range(a, b + 1)


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solver_options(args):
    if args.tol is None:
        return SolverOptions()
    return SolverOptions(target_accuracy=args.tol)


def _witness(kind, state, rho, result):
    """(p, delta) from the closed-form witness when one applies, else from the solver."""
    x = state if kind == "pure" else pure_vector(rho)
    if x is not None:
        wit = pure_optimal_witness(x)
        return wit.scale, wit.delta
    if rho.shape == (2, 2):
        wit = qubit_optimal_set(rho, 0.0)
        return wit.scale, wit.delta
    if result is None:
        return None
    d = result.diagonal
    p = float(d.sum())
    return p, (d / p if p > 0 else np.full(d.size, 1.0 / d.size))


def cmd_compute(args):
    if not args.state:
        raise UsageError("compute requires --state")
    kind, state = load_state(args.state)
    rho = np.outer(state, state.conj()) if kind == "pure" else state
    closed = closed_form_value(rho, args.measure) if args.method != "solver" else None
    if closed is None and args.method == "closed-form":
        raise UsageError(f"no closed form for {args.measure} on this input; use --method solver")
    result = None
    if args.measure != "l1" and args.method != "closed-form":
        solve = mod_trace_distance if args.measure == "mod-tr" else trace_distance_coherence
        result = solve(rho, _solver_options(args))
    record = {"measure": args.measure, "dim": rho.shape[0]}
    if closed is not None or result is None:
        record["method"] = "closed-form"
        record["value"] = closed if closed is not None else closed_form_value(rho, "l1")
    else:
        record["method"] = "solver"
        record["value"] = result.value
    if args.measure == "mod-tr":
        wit = _witness(kind, state, rho, result)
        if wit is not None:
            record["witness_p"] = wit[0]
            record["witness_delta"] = " ".join(fmt_float(v) for v in wit[1])
    if result is not None:
        record["dual_lower_bound"] = result.best_lower_bound
        record["solver_value"] = result.value
        record["solver_converged"] = result.converged
        if closed is not None:
            record["solver_discrepancy"] = abs(result.value - closed)
    for key, val in record.items():
        print(f"{key}: {fmt_float(val) if isinstance(val, float) else val}")
    return EXIT_OK


def cmd_sample(args):
    n = args.dims.start if args.dims else 2
    k = args.ranks.start if args.ranks else 1
    if not 1 <= k <= n:
        raise UsageError(f"rank {k} must lie in 1..{n}")
    texts = []
    for i in range(args.samples or 1):
        rng = substream(args.seed, n, k, i)
        state = haar_pure(n, rng) if k == 1 else random_density(n, k, rng)
        texts.append(format_state(state))
    if len(texts) == 1:
        _emit(texts[0], args.out)
    elif args.out:
        os.makedirs(args.out, exist_ok=True)
        for i, text in enumerate(texts):
            with open(os.path.join(args.out, f"state_{i:05d}.txt"), "w", encoding="utf-8") as fh:
                fh.write(text)
    else:
        sys.stdout.write("\n".join(texts))
    return EXIT_OK


def _sweep_config(args, dims, ranks, samples):
    return experiments.SweepConfig(
        dims=args.dims or dims, ranks=args.ranks or ranks, samples=args.samples or samples,
        seed=args.seed,
        classification_tol=args.tol if args.tol is not None else experiments.DEFAULT_CLASSIFICATION_TOL)


def _run_sweep(config):
    for n, k in config.pairs():
        if k > n:
            print(f"warning: skipping infeasible pair n={n}, k={k}", file=sys.stderr)
    results = experiments.sweep(config)
    return csv_text(SWEEP_COLUMNS, sweep_rows(results, config.seed))


def cmd_sweep(args):
    config = _sweep_config(args, range(2, 7), range(1, 2), 10000)
    _emit(_run_sweep(config), args.out)
    return EXIT_OK


def cmd_figure(args):
    if args.which == "fig1":
        grid = np.linspace(0.0, 1.0, 201)
        rows = [[fmt_float(a), fmt_float(mod_trace_of_max_amplitude(a))] for a in grid]
        text = csv_text(["max_amplitude", "value"], rows)
    elif args.which == "fig2":
        rows = [[n, fmt_float(experiments.exact_proportion(n))] for n in range(2, 21)]
        text = csv_text(["n", "proportion"], rows)
    else:
        text = _run_sweep(_sweep_config(args, range(2, 13), range(1, 4), 1000))
    _emit(text, args.out)
    return EXIT_OK


SUITES = {
    "pure-formula": lambda a: verification.pure_formula_suite(a.dims or range(2, 13), a.samples or 100, a.seed),
    "qubit": lambda a: verification.qubit_suite(a.samples or 500, a.seed),
    "duality": lambda a: verification.duality_suite(a.dims or range(2, 13), a.samples or 100, a.seed),
    "block-additivity": lambda a: experiments.block_additivity_suite(a.samples or 50, a.seed),
    "proper-measure": lambda a: experiments.proper_measure_suite(a.samples or 50, a.seed),
    "gradient": lambda a: experiments.gradient_suite(a.samples or 100, a.seed),
}


def _serialize_input(payload):
    parts = []
    for key, val in payload.items():
        arr = np.asarray(val) if not isinstance(val, list) else None
        if arr is not None and arr.ndim in (1, 2) and arr.dtype.kind == "c":
            parts.append(f"# {key}\n{format_state(arr)}")
        elif isinstance(val, list):
            for j, item in enumerate(val):
                parts.append(f"# {key}[{j}]\n{format_state(item)}")
        else:
            parts.append(f"# {key} = {np.array2string(np.asarray(val), precision=17)}\n")
    return "".join(parts)


def cmd_verify(args):
    report = SUITES[args.suite](args)
    print(f"suite: {args.suite} seed: {args.seed}")
    for check in report.checks:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status} {check['name']}: max residual {check['residual']:.3e} "
              f"(threshold {check['threshold']:.1e})")
    if report.passed:
        return EXIT_OK
    worst = max((c for c in report.checks if not c["passed"]),
                key=lambda c: c["residual"] - c["threshold"])
    print(f"worst offender ({worst['name']}):")
    if worst["worst_input"]:
        print(_serialize_input(worst["worst_input"]), end="")
    return EXIT_VERIFY


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", help="state file path")
    common.add_argument("--measure", choices=["l1", "tr", "mod-tr"], default="mod-tr")
    common.add_argument("--method", choices=["closed-form", "solver", "auto"], default="auto")
    common.add_argument("--dims", type=parse_range, help="dimension range A..B")
    common.add_argument("--ranks", type=parse_range, help="rank range A..B")
    common.add_argument("--samples", type=int, help="sample count")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tol", type=float, help="solver accuracy (compute) or classification tolerance")
    common.add_argument("--out", help="output path (default: stdout)")

    parser = argparse.ArgumentParser(prog="modcoherence", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="coherence of a state file")
    sub.add_parser("sample", parents=[common], help="draw random states")
    sub.add_parser("sweep", parents=[common], help="proportion of states with C' = 1 per (n, k)")
    fig = sub.add_parser("figure", parents=[common], help="plot-ready CSV")
    fig.add_argument("which", choices=["fig1", "fig2", "fig3"])
    ver = sub.add_parser("verify", parents=[common], help="run a verification suite")
    ver.add_argument("suite", choices=sorted(SUITES))
    return parser


COMMANDS = {"compute": cmd_compute, "sample": cmd_sample, "sweep": cmd_sweep,
            "figure": cmd_figure, "verify": cmd_verify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except StateFileError as exc:
        print(f"error: {args.state}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"error: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
