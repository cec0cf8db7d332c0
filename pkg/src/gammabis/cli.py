"""Command-line entry point: ``gammabis <command> [flags]``.

Exit codes: 0 success, 2 usage or validation error, 3 enumeration guard.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from ._validation import SupportTooLarge, ValidationError
from .models import (
    BinaryBIS,
    DiscreteBIS,
    GaussianBIS,
    RateQuery,
    TestChannel,
    induced_joint,
    model_from_dict,
)
from .region_binary import DEFAULT_GRID as BINARY_GRID
from .region_binary import fig3_sweep
from .region_discrete import search_test_channel
from .region_gaussian import DEFAULT_GRID as GAUSSIAN_GRID
from .region_gaussian import gaussian_sweep
from .simulator import SimConfig, exact_leakage, generate_codebook, run_monte_carlo

EXIT_USAGE = 2
EXIT_GUARD = 3


class UsageError(Exception):
    pass


def fmt(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    if isinstance(value, bool):
        return "1" if value else "0"
    return format(float(value), ".12g")


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _csv_text(unit, header, rows):
    buf = io.StringIO()
    buf.write(f"# unit={unit}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _load_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} file {path} is not valid JSON: {exc}") from None


def cmd_binary_region(args):
    rows = fig3_sweep(args.pe, args.pd, args.gamma, args.ri, args.rc_rule, args.grid)
    body = [(r.param, r.izu, r.rj_min, r.rg_max, r.feasible) for r in rows]
    _emit(_csv_text("bits", ["gamma", "izu", "rj_min", "rg_max", "feasible"], body), args.out)
    return 0


def cmd_gaussian_region(args):
    if not (abs(args.rho1) < 1 and abs(args.rho2) < 1):
        raise UsageError("correlations must satisfy |rho| < 1")
    points, rows = gaussian_sweep(GaussianBIS(args.rho1, args.rho2), args.gamma, args.ri, args.rc_rule, args.grid)
    body = [(p.alpha, p.izu, p.iyu, p.ixu, r.rj_min, r.rg_max, r.feasible) for p, r in zip(points, rows)]
    header = ["alpha", "izu", "iyu", "ixu", "rj_min", "rg_max", "feasible"]
    _emit(_csv_text("nats", header, body), args.out)
    return 0


def cmd_membership(args):
    model = model_from_dict(_load_json(args.model, "model"))
    if isinstance(model, GaussianBIS):
        raise UsageError("membership search supports discrete and binary models only")
    rates = RateQuery.from_dict(_load_json(args.rates, "rates"))
    result = search_test_channel(
        model, rates, restarts=args.restarts, steps=args.steps, seed=args.seed, n_jobs=args.threads
    )
    verdict = {
        "unit": rates.base,
        "status": result.status,
        "found": result.found,
        "min_slack": result.min_slack,
        "restarts_run": result.restarts_run,
    }
    if result.found:
        verdict["restart"] = result.restart
        verdict["witness"] = result.witness.table.tolist()
    _emit(json.dumps(verdict, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def cmd_simulate(args):
    cfg = SimConfig.from_dict(_load_json(args.config, "config"))
    model = model_from_dict(_load_json(args.model, "model"))
    if not isinstance(model, (DiscreteBIS, BinaryBIS)):
        raise UsageError("simulation supports discrete and binary models only")
    test_data = _load_json(args.test, "test channel")
    if not isinstance(test_data, dict) or "table" not in test_data:
        raise UsageError("test channel JSON must be an object with a 'table' field")
    test = TestChannel(test_data["table"])

    discrete = model.to_discrete() if isinstance(model, BinaryBIS) else model
    p_u = induced_joint(discrete, test).marginal("U")
    codebook = generate_codebook(cfg, p_u, np.random.default_rng([cfg.seed, 0]))
    exact = None
    if args.exact:
        exact = exact_leakage(cfg, discrete, test, codebook)
    report = run_monte_carlo(
        cfg, discrete, test, n_jobs=args.threads, transcript=bool(args.transcript), codebook=codebook
    )
    out = report.to_dict()
    if exact is not None:
        out["key_correlation"] = {"value": exact.key_correlation, "exact": True}
        out["secrecy_leakage"] = {"value": exact.secrecy_leakage, "exact": True}
        out["privacy_leakage"] = {"value": exact.privacy_leakage, "exact": True}
        out["encoder_failure_prob"] = exact.encoder_failure_prob
    if args.transcript:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["trial", "event", "w", "w_hat", "correct"])
        for row in report.transcript:
            w_hat = "" if row["w_hat"] is None else row["w_hat"]
            writer.writerow([row["trial"], row["event"], row["w"], w_hat, int(row["correct"])])
        with open(args.transcript, "w", newline="") as fh:
            fh.write(buf.getvalue())
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _rule(text):
    if text not in ("full", "half", "full_izu", "half_izu"):
        raise argparse.ArgumentTypeError("rule must be 'full' or 'half'")
    return text


def _grid(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points")
    return value


def _nonneg(text):
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive, default=os.cpu_count() or 1, help="worker pool size")
    parser = argparse.ArgumentParser(prog="gammabis", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("binary-region", parents=[common], help="boundary sweep for binary sources (CSV, bits)")
    p.add_argument("--pe", type=float, required=True)
    p.add_argument("--pd", type=float, required=True)
    p.add_argument("--gamma", type=_nonneg, default=0.0, help="key-correlation budget")
    p.add_argument("--ri", type=_nonneg, default=0.0)
    p.add_argument("--rc-rule", type=_rule, default="full")
    p.add_argument("--grid", type=_grid, default=BINARY_GRID)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_binary_region)

    p = sub.add_parser("gaussian-region", parents=[common], help="boundary sweep for Gaussian sources (CSV, nats)")
    p.add_argument("--rho1", type=float, required=True)
    p.add_argument("--rho2", type=float, required=True)
    p.add_argument("--gamma", type=_nonneg, default=0.0)
    p.add_argument("--ri", type=_nonneg, default=0.0)
    p.add_argument("--rc-rule", type=_rule, default="full")
    p.add_argument("--grid", type=_grid, default=GAUSSIAN_GRID)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gaussian_region)

    p = sub.add_parser("membership", parents=[common], help="search for a witness test channel (JSON)")
    p.add_argument("--model", required=True)
    p.add_argument("--rates", required=True)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("simulate", parents=[common], help="run the coding scheme (JSON report)")
    p.add_argument("--config", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--exact", action="store_true", help="exact leakage by enumeration")
    p.add_argument("--transcript", metavar="PATH", help="per-trial CSV")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SupportTooLarge as exc:
        print(f"error: {exc} (size={exc.size}, limit={exc.limit})", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
