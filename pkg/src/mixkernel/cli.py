"""Command-line interface.

Subcommands: simulate (write a dataset), fit (select weights for a dataset),
predict (apply saved weights to query rows), experiment (run a plan file),
diagnose (weight-growth summary of an experiment output directory).

Exit codes: 0 success, 1 validation or usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io as mio
from .estimator import predict_posterior_block, predict_regression_block
from .exceptions import MixKernelError
from .harness import plan_from_dict, rate_diagnostics, read_report, run_experiment
from .kernels import KernelSpec
from .selection import CvConfig, minimize_weights
from .simdata import ScenarioConfig, draw_scenario


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; the CLI contract wants 1
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="mixkernel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="generate a simulated dataset directory")
    sim.add_argument("--preset", choices=("minimal", "sparse"))
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--grid-length", type=int, default=300)
    sim.add_argument("--test-size", type=int, default=100)
    sim.add_argument("--p-fun", type=int)
    sim.add_argument("--q-fun", type=int)
    sim.add_argument("--p-cat", type=int)
    sim.add_argument("--q-cat", type=int)
    sim.set_defaults(func=_cmd_simulate)

    fit = sub.add_parser("fit", help="select weights for a dataset directory")
    fit.add_argument("--data", required=True, help="dataset directory")
    fit.add_argument("--out", required=True, help="fit result JSON path")
    fit.add_argument("--mode", choices=("free", "equal", "oracle"), default="free")
    fit.add_argument(
        "--oracle-indices",
        help="comma-separated 0-based covariate indices kept free in oracle mode",
    )
    fit.add_argument("--kernel", choices=("picard", "boxcar"), default="picard")
    fit.add_argument("--categorical-base", type=float, default=float(np.e))
    fit.add_argument("--starts", type=int, default=3)
    fit.add_argument("--max-evals", type=int)
    fit.add_argument("--rel-tol", type=float, default=1e-6)
    fit.add_argument("--weight-cap", type=float, default=1e6)
    fit.set_defaults(func=_cmd_fit)

    pred = sub.add_parser("predict", help="predict query rows with saved weights")
    pred.add_argument("--data", required=True, help="training dataset directory")
    pred.add_argument("--weights", required=True, help="fit result JSON path")
    pred.add_argument("--query", required=True, help="query dataset directory")
    pred.add_argument("--out", required=True, help="predictions CSV path")
    pred.set_defaults(func=_cmd_predict)

    exp = sub.add_parser("experiment", help="run an experiment plan file")
    exp.add_argument("--plan", required=True, help="plan JSON path")
    exp.add_argument("--threads", type=int, help="worker processes override")
    exp.add_argument("--out", help="output directory override")
    exp.set_defaults(func=_cmd_experiment)

    diag = sub.add_parser("diagnose", help="weight-growth summary of a report")
    diag.add_argument("--report", required=True, help="experiment output directory")
    diag.add_argument("--out", help="summary JSON path (default: stdout)")
    diag.set_defaults(func=_cmd_diagnose)

    return parser


def _cmd_simulate(args) -> int:
    overrides = {}
    for name in ("p_fun", "q_fun", "p_cat", "q_cat"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    common = dict(
        grid_length=args.grid_length, test_size=args.test_size, seed=args.seed
    )
    if args.preset is not None:
        cfg = ScenarioConfig.preset(args.preset, n=args.n, **common, **overrides)
    else:
        missing = [k for k in ("p_fun", "q_fun", "p_cat", "q_cat") if k not in overrides]
        if missing:
            raise MixKernelError(
                f"without --preset, set {', '.join('--' + m.replace('_', '-') for m in missing)}"
            )
        cfg = ScenarioConfig(n=args.n, **common, **overrides)
    draw = draw_scenario(cfg)
    mio.write_dataset(args.out, draw.dataset, truth=draw.truth)
    mio.write_dataset(f"{args.out}/test", draw.test, truth=draw.test_truth)
    print(f"wrote dataset (n={cfg.n}, p={cfg.p}) to {args.out}")
    return 0


def _cv_config_from_args(args) -> CvConfig:
    oracle = None
    if args.oracle_indices:
        oracle = tuple(int(tok) for tok in args.oracle_indices.split(","))
    return CvConfig(
        kernel=KernelSpec(args.kernel, args.categorical_base),
        mode=args.mode,
        oracle_indices=oracle,
        starts=args.starts,
        max_evals=args.max_evals,
        rel_tol=args.rel_tol,
        weight_cap=args.weight_cap,
    )


def _cmd_fit(args) -> int:
    ds, _ = mio.read_dataset(args.data)
    cfg = _cv_config_from_args(args)
    result = minimize_weights(ds, cfg)
    mio.write_fit_result(args.out, result, cfg.mode, cfg.kernel)
    print(
        f"fit: q={result.q_value:.6g} evaluations={result.evaluations} "
        f"weights={np.array2string(result.weights.omega, precision=4)}"
    )
    return 0


def _cmd_predict(args) -> int:
    ds, _ = mio.read_dataset(args.data)
    result, _, kernel = mio.read_fit_result(args.weights)
    block = mio.read_covariates(args.query)
    if ds.response_kind == "continuous":
        values, fallback = predict_regression_block(
            ds, result.weights, block, kernel
        )
        mio.write_predictions_csv(args.out, values, None, fallback)
    else:
        posterior, fallback = predict_posterior_block(
            ds, result.weights, block, kernel
        )
        mio.write_predictions_csv(args.out, None, posterior, fallback)
    print(f"wrote {block.n} predictions to {args.out}")
    return 0


def _cmd_experiment(args) -> int:
    with open(args.plan) as fh:
        payload = json.load(fh)
    plan = plan_from_dict(payload)
    if args.out is not None:
        from dataclasses import replace

        plan = replace(plan, output_dir=args.out)
    report = run_experiment(plan, threads=args.threads)
    where = plan.output_dir or "(memory only)"
    print(
        f"experiment: {len(report.rows)} rows, {len(report.failures)} failures, "
        f"output {where}"
    )
    return 0


def _cmd_diagnose(args) -> int:
    report = read_report(args.report)
    summary = rate_diagnostics(report)
    text = json.dumps(summary, indent=2, sort_keys=True)
    if args.out is None:
        print(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote diagnostics to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except MixKernelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        name = getattr(exc, "filename", None)
        print(f"i/o error: {exc}" + (f" (path: {name})" if name else ""), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
