"""Command-line surface.

Subcommands:
  simulate  run a replicated experiment, one row per replication
  limit     evaluate a limit CDF on a t-grid
  compare   Poisson vs binomial process agreement (three KS statistics)
  table     KS distance to the limit law along an increasing n list
  oracle    self-check suites (kernel equivalence, exact finite-n CDF)

Exit codes: 0 success, 1 oracle/acceptance failure, 2 configuration error,
3 numerical error.  Output is CSV by default or JSON (--format json); JSON
validates against schemas/output.schema.json shipped with the package.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any, Sequence

import numpy as np

from diamlab import __version__, harness, limits, oracle, sampler
from diamlab.errors import ConfigurationError, NumericalError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _fmt(value: Any) -> str:
    """Floats at 17 significant digits; everything else as str."""
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ConfigurationError(f"{flag} expects comma-separated numbers") from exc


def _parse_vectors(text: str, flag: str) -> list[list[float]]:
    return [_parse_floats(part, flag) for part in text.split(";") if part.strip()]


def _spec_json_from_flags(args: argparse.Namespace) -> dict:
    """Assemble the sampler's JSON object from family flags."""
    family = args.family
    if family is None:
        raise ConfigurationError("--family is required")
    obj: dict[str, Any] = {"family": family}
    if family in ("uniform-ball", "uniform-sphere", "radial-power", "sector"):
        if args.d is None:
            raise ConfigurationError(f"--d is required for family {family}")
        obj["d"] = args.d
    if family in ("radial-power", "sector"):
        if args.alpha is not None:
            obj["alpha"] = args.alpha
        if args.atom is not None:
            obj["atom"] = args.atom
    if family == "sector":
        if args.cap_center is None or args.cap_angle is None:
            raise ConfigurationError(
                "--cap-center and --cap-angle are required for family sector"
            )
        obj["cap_center"] = _parse_floats(args.cap_center, "--cap-center")
        obj["cap_angle"] = args.cap_angle
    if family == "segments":
        if args.dirs is None or args.probs is None:
            raise ConfigurationError(
                "--dirs and --probs are required for family segments"
            )
        obj["directions"] = _parse_vectors(args.dirs, "--dirs")
        obj["probs"] = _parse_floats(args.probs, "--probs")
    if family == "circle-density":
        density: dict[str, Any] = {"kind": args.density, "params": {}}
        if args.density == "cosine_mix":
            if args.amplitudes is None:
                raise ConfigurationError(
                    "--amplitudes is required for --density cosine_mix"
                )
            density["params"]["amplitudes"] = _parse_floats(
                args.amplitudes, "--amplitudes"
            )
            if args.phases is not None:
                density["params"]["phases"] = _parse_floats(args.phases, "--phases")
        obj["density"] = density
        obj["d"] = 2
    return obj


def _resolved_config(args: argparse.Namespace, extra: dict) -> dict:
    cfg = dict(extra)
    cfg["format"] = args.format
    cfg["threads"] = harness.resolve_threads(args.threads)
    cfg["version"] = __version__
    return cfg


class _Output:
    """Collects rows and writes them as CSV (with # config header) or JSON."""

    def __init__(self, command: str, config: dict, columns: list[str]):
        self.command = command
        self.config = config
        self.columns = columns
        self.rows: list[list[Any]] = []
        self.summary: dict[str, Any] | None = None

    def add(self, *row: Any) -> None:
        self.rows.append(list(row))

    def render(self, fmt: str) -> str:
        if fmt == "json":
            payload = {
                "command": self.command,
                "config": _jsonable(self.config),
                "columns": self.columns,
                "rows": [[_jsonable(v) for v in row] for row in self.rows],
                "summary": _jsonable(self.summary),
            }
            return json.dumps(payload, indent=2, sort_keys=True) + "\n"
        buf = io.StringIO()
        for key in sorted(self.config):
            buf.write(f"# {key} = {_fmt_config(self.config[key])}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        if self.summary:
            for key in sorted(self.summary):
                buf.write(f"# {key} = {_fmt_config(self.summary[key])}\n")
        return buf.getvalue()


def _fmt_config(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(_jsonable(value), sort_keys=True)
    return _fmt(value)


def _jsonable(value: Any):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(args: argparse.Namespace) -> int:
    spec_json = _spec_json_from_flags(args)
    spec = sampler.spec_from_json(spec_json)
    gamma = args.gamma if args.gamma is not None else harness.auto_gamma(spec)
    config = harness.ExperimentConfig(
        spec=spec,
        n=args.n if args.process == "poisson" else int(args.n),
        process=args.process,
        replications=args.reps,
        seed=args.seed,
        gamma=gamma,
    )
    echo = _resolved_config(
        args,
        {
            "command": "simulate",
            "distribution": spec_json,
            "n": config.n,
            "process": config.process,
            "replications": config.replications,
            "seed": config.seed,
            "gamma": gamma,
        },
    )
    out = _Output("simulate", echo, ["replication", "n_points", "diameter", "scaled_deficit"])
    records = harness.replication_records(config, threads=args.threads)
    for r, n_points, diam, deficit, _ in records:
        out.add(r, n_points, diam, deficit)
    values = np.sort(np.array([rec[3] for rec in records]))
    ecdf = harness.EmpiricalCdf(values, degenerate_count=sum(r[4] for r in records))
    law = harness.auto_limit_law(spec)
    out.summary = {"degenerate_replications": ecdf.degenerate_count}
    if law is not None:
        out.summary["ks_vs_limit"] = harness.ks_distance(ecdf, law)
    _write(out.render(args.format), args.output)
    return EXIT_OK


def _cmd_limit(args: argparse.Namespace) -> int:
    spec_json = _spec_json_from_flags(args)
    spec = sampler.spec_from_json(spec_json)
    law = harness.auto_limit_law(spec)
    if law is None:
        raise ConfigurationError("no limit law exists for this distribution")
    if args.t_steps < 1:
        raise ConfigurationError("--t-steps must be at least 1")
    if args.t_min < 0 or args.t_max < args.t_min:
        raise ConfigurationError("need 0 <= t-min <= t-max")
    grid = np.linspace(args.t_min, args.t_max, args.t_steps)
    gamma = harness.auto_gamma(spec)
    echo = _resolved_config(
        args,
        {
            "command": "limit",
            "distribution": spec_json,
            "law": _law_json(law),
            "gamma": gamma,
            "t_min": args.t_min,
            "t_max": args.t_max,
            "t_steps": args.t_steps,
        },
    )
    with_envelope = isinstance(spec, sampler.UniformBall) and spec.d == 2
    columns = ["t", "cdf"]
    if with_envelope:
        columns += ["envelope_lower", "envelope_upper"]
    out = _Output("limit", echo, columns)
    cdf = np.atleast_1d(limits.limit_cdf(law, grid))
    for i, t in enumerate(grid):
        row = [float(t), float(cdf[i])]
        if with_envelope:
            if t > 0:
                lo, hi = limits.aprs_envelope(float(t))
            else:
                lo, hi = 0.0, 0.0  # continuity limit at t = 0
            row += [lo, hi]
        out.add(*row)
    _write(out.render(args.format), args.output)
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    spec_json = _spec_json_from_flags(args)
    spec = sampler.spec_from_json(spec_json)
    gamma = args.gamma if args.gamma is not None else harness.auto_gamma(spec)
    echo = _resolved_config(
        args,
        {
            "command": "compare",
            "distribution": spec_json,
            "n": args.n,
            "replications": args.reps,
            "seed": args.seed,
            "gamma": gamma,
        },
    )
    kp, kb, kx = harness.depoissonisation_compare(
        spec, args.n, gamma, args.reps, args.seed, threads=args.threads
    )
    out = _Output("compare", echo, ["statistic", "value"])
    out.add("ks_poisson_vs_law", kp)
    out.add("ks_binomial_vs_law", kb)
    out.add("ks_cross", kx)
    out.summary = {"ks_poisson_vs_law": kp, "ks_binomial_vs_law": kb, "ks_cross": kx}
    _write(out.render(args.format), args.output)
    return EXIT_OK


def _cmd_table(args: argparse.Namespace) -> int:
    spec_json = _spec_json_from_flags(args)
    spec = sampler.spec_from_json(spec_json)
    gamma = args.gamma if args.gamma is not None else harness.auto_gamma(spec)
    n_list = _parse_floats(args.n_list, "--n-list")
    if not n_list:
        raise ConfigurationError("--n-list must not be empty")
    process = args.process
    if process == "binomial":
        n_list = [int(n) for n in n_list]
    config = harness.ExperimentConfig(
        spec=spec,
        n=n_list[0],
        process=process,
        replications=args.reps,
        seed=args.seed,
        gamma=gamma,
    )
    echo = _resolved_config(
        args,
        {
            "command": "table",
            "distribution": spec_json,
            "n_list": n_list,
            "process": process,
            "replications": args.reps,
            "seed": args.seed,
            "gamma": gamma,
        },
    )
    rows = harness.convergence_table(config, n_list, threads=args.threads)
    out = _Output("table", echo, ["n", "ks_distance"])
    for n, ks in rows:
        out.add(n, ks)
    _write(out.render(args.format), args.output)
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace) -> int:
    echo = _resolved_config(
        args,
        {
            "command": "oracle",
            "cases": args.cases,
            "seed": args.seed,
            "check_n": args.check_n,
            "check_reps": args.check_reps,
        },
    )
    out = _Output("oracle", echo, ["check", "cases", "passed", "failed"])
    eq = oracle.diameter_equivalence_suite(args.cases, args.seed)
    out.add(eq.name, eq.cases, eq.passed, eq.failed)
    seg, stat, band = oracle.segment_exact_cdf_suite(
        n=args.check_n,
        replications=args.check_reps,
        seed=args.seed,
        threads=args.threads,
    )
    out.add(seg.name, seg.cases, seg.passed, seg.failed)
    all_ok = eq.ok and seg.ok
    out.summary = {
        "all_passed": all_ok,
        "segment_ks": stat,
        "segment_band": band,
        "message": f"{eq.passed + seg.passed}/{eq.cases + seg.cases} passed",
    }
    _write(out.render(args.format), args.output)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def _law_json(law: limits.LimitLaw) -> dict:
    if isinstance(law, limits.ContinuousLaw):
        return {"kind": "continuous", "gamma": law.gamma, "sigma0": law.sigma0}
    if isinstance(law, limits.SegmentsLaw):
        return {
            "kind": "segments",
            "probs": [float(p) for p in law.probs],
            "truncation": law.truncation,
        }
    return {"kind": "segments-zeta"}


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diamlab",
        description="Diameters of random point sets: simulation and limit laws.",
    )
    parser.add_argument("--version", action="version", version=f"diamlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    family = argparse.ArgumentParser(add_help=False)
    family.add_argument(
        "--family",
        choices=[
            "uniform-ball",
            "uniform-sphere",
            "radial-power",
            "sector",
            "segments",
            "circle-density",
        ],
    )
    family.add_argument("--d", type=int, default=None)
    family.add_argument("--alpha", type=float, default=None)
    family.add_argument("--atom", type=float, default=None)
    family.add_argument("--cap-center", type=str, default=None)
    family.add_argument("--cap-angle", type=float, default=None)
    family.add_argument("--dirs", type=str, default=None)
    family.add_argument("--probs", type=str, default=None)
    family.add_argument(
        "--density", choices=["uniform", "cosine_mix"], default="uniform"
    )
    family.add_argument("--amplitudes", type=str, default=None)
    family.add_argument("--phases", type=str, default=None)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--output", type=str, default=None)
    common.add_argument("--threads", type=int, default=None)

    p = sub.add_parser(
        "simulate", parents=[family, common], help="run a replicated experiment"
    )
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--process", choices=["binomial", "poisson"], default="binomial")
    p.add_argument("--gamma", type=float, default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser(
        "limit", parents=[family, common], help="evaluate a limit CDF on a grid"
    )
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--t-steps", type=int, default=51)
    p.set_defaults(func=_cmd_limit)

    p = sub.add_parser(
        "compare",
        parents=[family, common],
        help="Poisson vs binomial process agreement",
    )
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--gamma", type=float, default=None)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser(
        "table", parents=[family, common], help="KS distance along an n list"
    )
    p.add_argument("--n-list", type=str, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--process", choices=["binomial", "poisson"], default="binomial")
    p.add_argument("--gamma", type=float, default=None)
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("oracle", parents=[common], help="run the self-check suites")
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--seed", type=int, default=9)
    p.add_argument("--check-n", type=int, default=2000)
    p.add_argument("--check-reps", type=int, default=2000)
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags and 0 on --help/--version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
