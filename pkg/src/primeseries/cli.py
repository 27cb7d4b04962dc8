"""Command-line front end.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Callable

import numpy as np

from . import dirichlet, harness, multiplicative
from ._backend import BACKEND
from .config import ConfigError, load_config
from .noise import KINDS, NoiseModel, SeedSpec
from .primes import PrimeTable, load_or_sieve, prime_count

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

NOISE_KEYS = {
    "noise.kind": "noise_kind",
    "noise.sigma2": "sigma2",
    "noise.two_point.a": "two_point_a",
    "noise.two_point.b": "two_point_b",
    "noise.two_point.q": "two_point_q",
}


class UsageError(Exception):
    pass


def parse_int(text: str) -> int:
    """Integer that may be written as 1e8 or 10**8."""
    text = str(text).strip()
    try:
        if "**" in text:
            base, exp = text.split("**", 1)
            return int(base) ** int(exp)
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def parse_grid(text: str) -> list[float]:
    values = parse_floats(text)
    if not values:
        raise argparse.ArgumentTypeError("empty grid")
    if any(b < a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError(f"grid must be ascending: {text!r}")
    return values


def parse_n_range(text: str) -> list[int]:
    """'1..12' (inclusive) or a comma list."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n range {text!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"n range must be nonempty and >= 1: {text!r}")
    return out


def _add_common(p: argparse.ArgumentParser, seeded: bool, cutoff_default: int | None) -> None:
    p.add_argument("--config", help="flat key = value file; flags override its values")
    p.add_argument("--out", help="output directory (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--prime-cache", help="binary prime cache to reuse or create")
    p.add_argument("--cutoff", type=parse_int, default=cutoff_default,
                   help="largest prime included (accepts 1e7)")
    if seeded:
        p.add_argument("--seed", type=parse_int, help="master seed (required)")


def _add_noise(p: argparse.ArgumentParser) -> None:
    p.add_argument("--noise-kind", choices=KINDS, default="rademacher")
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--two-point-a", type=float)
    p.add_argument("--two-point-b", type=float)
    p.add_argument("--two-point-q", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="primeseries", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("variance", help="truncated variance vs sigma2 log(1/s)")
    _add_common(p, False, 10**8)
    p.add_argument("--s", type=parse_floats, help="comma list of shifts (required)")
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--band", type=parse_floats, default=[0.85, 1.15])

    p = sub.add_parser("fclt", help="Monte Carlo covariance and marginal checks")
    _add_common(p, True, 10**7)
    _add_noise(p)
    p.add_argument("--replicas", type=parse_int, default=2000)
    p.add_argument("--mode", choices=dirichlet.MODES, default="exponential")
    p.add_argument("--scale", type=float, default=10.0,
                   help="S for exponential mode, base s for power mode")
    p.add_argument("--grid", type=parse_grid, default=[0.25, 0.5, 1.0])
    p.add_argument("--tolerance", type=float, default=4.0, help="standard errors")
    p.add_argument("--workers", type=parse_int)

    p = sub.add_parser("lil", help="iterated-logarithm trace along s_n")
    _add_common(p, True, 10**6)
    _add_noise(p)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--branch", choices=("minus", "plus"), default="minus")
    p.add_argument("--n", type=parse_n_range, default=list(range(2, 11)))
    p.add_argument("--replicas", type=parse_int, default=0,
                   help="also check the variance across this many replicas")

    p = sub.add_parser("euler", help="Euler product vs exhaustive smooth expansion")
    _add_common(p, True, None)
    p.add_argument("--P", type=parse_int, default=13)
    p.add_argument("--k", type=parse_int, default=2)
    p.add_argument("--seeds", type=parse_int, default=100)
    p.add_argument("--s", type=parse_floats, default=[0.01, 0.5, 2.0])
    p.add_argument("--tol", type=float, default=1e-12)

    p = sub.add_parser("decompose", help="log-decomposition of the truncated Euler product")
    _add_common(p, True, 10**4)
    p.add_argument("--k", type=parse_int, default=2)
    p.add_argument("--s", "--s-grid", dest="s", type=parse_floats, default=[0.5, 0.1, 0.01, 0.001])
    p.add_argument("--table-bound", type=parse_int,
                   help="also export f(n) for n <= min(bound, 10^4) as CSV")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--discrepancy-bound", type=float, default=1.0)

    p = sub.add_parser("lindeberg", help="closed-form Lindeberg profile")
    _add_common(p, False, 10**6)
    _add_noise(p)
    p.add_argument("--shifts", type=parse_floats, default=[0.001, 0.01, 0.1])
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--norms", type=parse_grid, default=[10.0, 100.0, 1000.0])

    p = sub.add_parser("sieve", help="sieve primes and optionally write the cache file")
    _add_common(p, False, None)
    p.add_argument("--prime-limit", type=parse_int, help="sieve bound (defaults to --cutoff)")
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    sub = _subparser(parser, args.command)
    dests = {a.dest for a in sub._actions} - {"help", "config"}
    allowed = dests | {k for k, d in NOISE_KEYS.items() if d in dests}
    try:
        cfg = load_config(args.config, allowed)
    except (ConfigError, OSError) as exc:
        raise UsageError(f"config file: {exc}") from None
    defaults = {NOISE_KEYS.get(k, k).replace("-", "_"): v for k, v in cfg.items()}
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:  # type: ignore[union-attr]
        if name in action.choices:
            return action.choices[name]
    raise KeyError(name)


def _noise_from(args) -> NoiseModel:
    if args.noise_kind == "two_point":
        if None in (args.two_point_a, args.two_point_b, args.two_point_q):
            raise UsageError("two_point noise needs --two-point-a, --two-point-b and --two-point-q")
        return NoiseModel.two_point(args.two_point_a, args.two_point_b, args.two_point_q)
    return NoiseModel(args.noise_kind, args.sigma2)


def _require(args, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _table(args, limit: int) -> PrimeTable:
    return load_or_sieve(limit, args.prime_cache)


def _echo(args, noise: NoiseModel | None = None) -> dict:
    skip = {"config", "out", "format", "prime_cache", "noise_kind", "sigma2",
            "two_point_a", "two_point_b", "two_point_q"}
    out = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    if noise is not None:
        out.update(noise.to_config())
    elif "sigma2" in vars(args):
        out["sigma2"] = args.sigma2
    return out


def config_to_text(echo: dict) -> str:
    """Render a config echo back into the key = value file format."""
    lines = []
    for key, value in sorted(echo.items()):
        if key == "command":
            continue
        if isinstance(value, (list, tuple)):
            value = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def _emit(args, name: str, document: dict, csv_rows: list[list] | None = None,
          extra_csv: dict[str, list[list]] | None = None) -> None:
    if args.format == "csv" and csv_rows is not None:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(csv_rows)
        text, suffix = buf.getvalue(), "csv"
    else:
        text, suffix = json.dumps(document, indent=2, allow_nan=True) + "\n", "json"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.{suffix}").write_text(text)
        if suffix == "csv":
            (out / f"{name}.json").write_text(json.dumps(document, indent=2) + "\n")
        for extra_name, rows in (extra_csv or {}).items():
            with open(out / f"{extra_name}.csv", "w", newline="") as fh:
                csv.writer(fh, lineterminator="\n").writerows(rows)
    else:
        sys.stdout.write(text)


def cmd_variance(args) -> int:
    _require(args, "s")
    if any(not 0 < s < 1 / math.e for s in args.s):
        raise UsageError(f"every s must lie in (0, 1/e), got {args.s}")
    if len(args.band) != 2:
        raise UsageError("--band takes two numbers lo,hi")
    table = _table(args, args.cutoff)
    rows = [dirichlet.g_hybrid(s, args.cutoff, args.sigma2, table) for s in args.s]
    lo, hi = args.band
    passed = all(lo <= r.ratio <= hi for r in rows)
    doc = harness.report_document("variance", _echo(args),
                                  {"breakdowns": [r.to_dict() for r in rows]}, passed)
    csv_rows = [["s", "partial", "tail_estimate", "total", "asymptote", "ratio"]]
    csv_rows += [[r.s, r.partial, r.tail_estimate, r.total, r.asymptote, r.ratio] for r in rows]
    _emit(args, "variance", doc, csv_rows)
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_fclt(args) -> int:
    _require(args, "seed")
    noise = _noise_from(args)
    cfg = harness.ExperimentConfig(replicas=args.replicas, cutoff_P=args.cutoff, mode=args.mode,
                                   base=args.scale, grid=tuple(args.grid), model=noise,
                                   master_seed=args.seed, tolerance_se=args.tolerance,
                                   workers=args.workers)
    report = harness.run_fclt_experiment(cfg, _table(args, args.cutoff))
    doc = harness.report_document("fclt", _echo(args, noise), report.to_dict(), report.passed)
    header = ["t"] + [f"t={t}" for t in report.grid]
    emp = [header] + [[t] + row for t, row in zip(report.grid, report.empirical_cov)]
    orc = [header] + [[t] + row for t, row in zip(report.grid, report.oracle_cov)]
    _emit(args, "fclt", doc, emp, {"fclt_oracle_cov": orc, "fclt_empirical_cov": emp})
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_lil(args) -> int:
    _require(args, "seed")
    noise = _noise_from(args)
    table = _table(args, args.cutoff)
    trace = harness.run_lil_trace(args.gamma, args.branch, args.n, args.cutoff, args.seed,
                                  noise, table)
    body = {"trace": trace.to_dict()}
    passed = (all(d <= 1e-12 for d in trace.algebra_defect)
              and all(b >= a for a, b in zip(trace.running_max, trace.running_max[1:]))
              and all(b <= a for a, b in zip(trace.running_min, trace.running_min[1:])))
    if args.replicas:
        var = harness.lil_replica_variance(args.gamma, args.branch, args.n, args.replicas,
                                           args.cutoff, args.seed, noise, table)
        body["variance"] = var.to_dict()
        passed = passed and var.passed
    for notice in trace.notices:
        print(f"notice: {notice}", file=sys.stderr)
    doc = harness.report_document("lil", _echo(args, noise), body, passed)
    rows = [["n", "s_n", "raw", "normalized", "running_max", "running_min"]]
    rows += [list(r) for r in zip(trace.n, trace.s_n, trace.raw, trace.normalized,
                                  trace.running_max, trace.running_min)]
    _emit(args, "lil", doc, rows)
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_euler(args) -> int:
    _require(args, "seed")
    if args.k < 2 or args.P < 2 or args.seeds < 1 or any(s <= 0 for s in args.s):
        raise UsageError("euler needs P >= 2, k >= 2, seeds >= 1 and s > 0")
    table = _table(args, max(args.P, 2))
    worst = 0.0
    rows = [["label", "s", "euler_product", "smooth_expansion", "relative_gap"]]
    for label in range(args.seeds):
        seed = SeedSpec(args.seed, label)
        for s in args.s:
            prod = multiplicative.euler_product(seed, s, args.P, args.k, table).value
            expansion = multiplicative.smooth_expansion_sum(seed, s, args.P, args.k, table)
            gap = abs(prod - expansion) / abs(expansion)
            worst = max(worst, gap)
            rows.append([label, s, prod, expansion, gap])
    passed = worst <= args.tol
    doc = harness.report_document("euler", _echo(args),
                                  {"max_relative_gap": worst, "cases": len(rows) - 1}, passed)
    _emit(args, "euler", doc, rows)
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_decompose(args) -> int:
    _require(args, "seed")
    if args.k < 2 or any(s <= 0 for s in args.s):
        raise UsageError("decompose needs k >= 2 and s > 0")
    table = _table(args, args.cutoff)
    seed = SeedSpec(args.seed)
    cor = harness.run_corollary_experiment(seed, args.s, args.cutoff, args.k, table,
                                           bound=args.discrepancy_bound)
    reports = cor.decompositions
    residual_ok = all(r.residual <= args.tol for r in reports)
    bound_ok = all(r.remainder_bound is None or abs(r.remainder) <= r.remainder_bound
                   for r in reports)
    passed = residual_ok and bound_ok and cor.passed
    doc = harness.report_document("decompose", _echo(args), {
        "reports": [r.to_dict() for r in reports],
        "corollary": {k: v for k, v in cor.to_dict().items() if k != "decompositions"},
    }, passed)
    extra = None
    if args.table_bound:
        mt = multiplicative.sieve_multiplicative(seed, min(args.table_bound, 10**4), args.k)
        extra = {"f_table": [["n", "f"]] + [list(r) for r in mt.to_csv_rows()]}
    rows = [["s", "log_product", "prime_sum", "half_variance_sum", "remainder", "residual",
             "remainder_bound"]]
    rows += [[r.s, r.log_product, r.prime_sum, r.half_variance_sum, r.remainder, r.residual,
              r.remainder_bound] for r in reports]
    _emit(args, "decompose", doc, rows, extra)
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_lindeberg(args) -> int:
    noise = _noise_from(args)
    table = _table(args, args.cutoff)
    profiles = np.array([harness.lindeberg_profile(noise, args.shifts, args.eps, args.cutoff,
                                                   norm, table) for norm in args.norms])
    passed = bool(np.all(np.diff(profiles, axis=0) <= 0))
    doc = harness.report_document("lindeberg", _echo(args, noise), {
        "shifts": args.shifts, "norms": args.norms, "profile": profiles.tolist()}, passed)
    rows = [["norm"] + [f"a={a}" for a in args.shifts]]
    rows += [[n] + list(p) for n, p in zip(args.norms, profiles.tolist())]
    _emit(args, "lindeberg", doc, rows)
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_sieve(args) -> int:
    limit = args.prime_limit or args.cutoff
    if limit is None:
        raise UsageError("--prime-limit (or --cutoff) is required")
    if limit < 2:
        raise UsageError(f"sieve limit must be >= 2, got {limit}")
    table = _table(args, limit)
    body = {"limit": limit, "count": prime_count(table, limit),
            "last_prime": int(table.primes[-1]), "backend": BACKEND}
    doc = harness.report_document("sieve", _echo(args), body, True)
    _emit(args, "sieve", doc, [["limit", "count", "last_prime"],
                               [limit, body["count"], body["last_prime"]]])
    return EXIT_PASS


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "variance": cmd_variance, "fclt": cmd_fclt, "lil": cmd_lil, "euler": cmd_euler,
    "decompose": cmd_decompose, "lindeberg": cmd_lindeberg, "sieve": cmd_sieve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config_file(parser, argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
