"""Command-line interface.

Subcommands mirror the library: ``pmf`` (outbreak-size tables),
``estimate`` (SAR fit with confidence interval), ``glm`` (covariate
regression), ``bias`` (truncation-bias grid), ``simulate`` (write a
synthetic study in the dataset CSV schema) and ``coverage``
(interval-coverage experiment).  Results go to stdout as CSV (leading
``#`` comment lines carry run metadata) or, with ``--format json``, as a
``{"meta": ..., "results": ...}`` document.  Identical inputs and seeds
produce byte-identical output.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Diagnostics go to stderr only.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bias import best_final_approx
from .data import (
    DatasetFile,
    coronahouse_fixture,
    dumps_csv,
    load_csv,
    subset,
)
from .errors import (
    DataError,
    EnumerationCapError,
    EvaluationError,
    IntervalUnavailableError,
    SingularModelError,
)
from .estimate import fit_sar
from .glm import fit_glm
from .model import FINAL, HouseholdConfig, size_distribution
from .simulate import (
    DEFAULT_HOUSEHOLD_SIZES,
    RNG_ALGORITHM,
    SimConfig,
    coverage_experiment,
    replication_rng,
    simulate_study,
)

_USAGE_ERROR, _DATA_ERROR, _NUMERIC_ERROR = 1, 2, 3


def _floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok != ""]


def _ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok != ""]


def _size_dist(text: str) -> tuple[tuple[int, float], ...]:
    """Parse '2:0.28,3:0.23,...' into ((2, 0.28), (3, 0.23), ...)."""
    pairs = []
    for tok in text.split(","):
        size, _, weight = tok.partition(":")
        pairs.append((int(size), float(weight)))
    return tuple(pairs)


def _filters(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ValueError(f"--filter expects KEY=VALUE, got {item!r}")
        out[key] = value
    return out


def _load_dataset(spec: str) -> DatasetFile:
    if spec == "coronahouse":
        return coronahouse_fixture()
    return load_csv(spec)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit(args, meta: dict, fieldnames: list[str], rows: list[dict]) -> None:
    out = sys.stdout
    if args.format == "json":
        out.write(json.dumps({"meta": meta, "results": rows}, indent=2))
        out.write("\n")
    else:
        for key, value in meta.items():
            out.write(f"# {key}={_cell(value)}\n")
        out.write(",".join(fieldnames) + "\n")
        for row in rows:
            out.write(",".join(_cell(row[name]) for name in fieldnames) + "\n")


def _meta(command: str, **extra) -> dict:
    meta = {"command": command, "version": __version__}
    meta.update(extra)
    return meta


def _cmd_pmf(args) -> int:
    config = HouseholdConfig(s0=args.s0, i0=args.i0, sar=args.sar)
    pmf = size_distribution(config, args.generations)
    rows = [{"total": x, "probability": float(p)} for x, p in enumerate(pmf)]
    meta = _meta(
        "pmf",
        s0=args.s0,
        i0=args.i0,
        sar=args.sar,
        generations="final" if args.generations is FINAL else args.generations,
    )
    _emit(args, meta, ["total", "probability"], rows)
    return 0


def _cmd_estimate(args) -> int:
    dataset = _load_dataset(args.data)
    conditions = _filters(args.filter)
    if conditions:
        dataset = subset(dataset, conditions)
    if not dataset.records:
        raise DataError(f"no records left after filter {conditions}")
    estimate = fit_sar(list(dataset.records), ci_method=args.ci, ci_level=args.level)
    row = {
        "sar_hat": estimate.sar_hat,
        "std_error": estimate.std_error,
        "ci_lower": estimate.ci_lower,
        "ci_upper": estimate.ci_upper,
        "ci_method": estimate.ci_method,
        "ci_level": estimate.ci_level,
        "loglik": estimate.loglik,
        "n_households": len(dataset.records),
    }
    meta = _meta("estimate", data=args.data, filter=";".join(sorted(args.filter)))
    _emit(args, meta, list(row), [row])
    return 0


def _cmd_glm(args) -> int:
    dataset = _load_dataset(args.data)
    conditions = _filters(args.filter)
    if conditions:
        dataset = subset(dataset, conditions)
    predictors = [p for p in args.predictors.split(",") if p] if args.predictors else []
    fit = fit_glm(list(dataset.records), predictors, args.link)
    rows = [
        {"term": name, "estimate": est, "std_error": se, "ci_lower": lo, "ci_upper": hi}
        for name, est, se, lo, hi in fit.coefficient_intervals(args.level)
    ]
    meta = _meta(
        "glm",
        data=args.data,
        link=fit.link,
        level=args.level,
        loglik=fit.loglik,
        converged=fit.converged,
    )
    _emit(args, meta, ["term", "estimate", "std_error", "ci_lower", "ci_upper"], rows)
    return 0


def _cmd_bias(args) -> int:
    rows = []
    for s0 in args.s0:
        for i0 in args.i0:
            config = HouseholdConfig(s0=s0, i0=i0, sar=0.5)
            horizons = args.generations if args.generations else range(1, s0 + 1)
            for sar in args.sar:
                for d in horizons:
                    point = best_final_approx(sar, config, d)
                    rows.append(
                        {
                            "true_sar": sar,
                            "s0": s0,
                            "i0": i0,
                            "generations": d,
                            "approx_sar": point.approx_sar,
                            "relative_bias": point.relative_bias,
                            "kl_at_min": point.kl_at_min,
                        }
                    )
    meta = _meta(
        "bias",
        sar=",".join(map(str, args.sar)),
        s0=",".join(map(str, args.s0)),
        i0=",".join(map(str, args.i0)),
        generations=",".join(map(str, args.generations)) if args.generations else "1..s0",
    )
    _emit(
        args,
        meta,
        ["true_sar", "s0", "i0", "generations", "approx_sar", "relative_bias", "kl_at_min"],
        rows,
    )
    return 0


def _sim_config(args, replications: int = 1) -> SimConfig:
    return SimConfig(
        n_households=args.n,
        sar=args.sar,
        horizon=FINAL if args.final else args.generations,
        household_size_dist=args.sizes,
        i0_rule=args.i0,
        seed=args.seed,
        replications=replications,
    )


def _cmd_simulate(args) -> int:
    sim = _sim_config(args)
    records = simulate_study(sim, replication_rng(sim.seed, 0))
    if args.format == "json":
        rows = [
            {
                "id": r.id,
                "s0": r.s0,
                "i0": r.i0,
                "infected": r.infected,
                "generations": None if r.horizon is FINAL else r.horizon,
            }
            for r in records
        ]
        meta = _meta(
            "simulate",
            seed=sim.seed,
            rng=RNG_ALGORITHM,
            sar=sim.sar,
            sizes=_sizes_text(sim.household_size_dist),
        )
        _emit(args, meta, [], rows)
    else:
        sys.stdout.write(dumps_csv(records))
    return 0


def _sizes_text(dist) -> str:
    return ",".join(f"{size}:{weight}" for size, weight in dist)


def _cmd_coverage(args) -> int:
    sim = _sim_config(args, replications=args.replications)
    rows = [
        {
            "method": r.method,
            "nominal_level": r.nominal_level,
            "realized_coverage": r.realized_coverage,
            "n_households": r.n_households,
            "sar": r.sar,
            "horizon": "final" if r.horizon is FINAL else r.horizon,
            "n_estimable": r.n_estimable,
        }
        for r in coverage_experiment(sim, args.levels)
    ]
    meta = _meta(
        "coverage",
        seed=sim.seed,
        rng=RNG_ALGORITHM,
        replications=sim.replications,
        sizes=_sizes_text(sim.household_size_dist),
        i0=str(sim.i0_rule),
    )
    _emit(
        args,
        meta,
        [
            "method",
            "nominal_level",
            "realized_coverage",
            "n_households",
            "sar",
            "horizon",
            "n_estimable",
        ],
        rows,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainbinom",
        description="Chain binomial outbreak-size distributions and SAR inference.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("pmf", help="outbreak-size distribution table")
    p.add_argument("--s0", type=int, required=True)
    p.add_argument("--i0", type=int, default=1)
    p.add_argument("--sar", type=float, required=True)
    p.add_argument("--generations", type=int, default=None, help="omit for the final distribution")
    add_format(p)
    p.set_defaults(func=_cmd_pmf)

    p = sub.add_parser("estimate", help="fit a shared SAR by maximum likelihood")
    p.add_argument("--data", required=True, help="CSV path, or 'coronahouse' for the fixture")
    p.add_argument("--filter", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--ci", choices=("wilks", "normal"), default="wilks")
    p.add_argument("--level", type=float, default=0.95)
    add_format(p)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("glm", help="regress the SAR on covariates")
    p.add_argument("--data", required=True)
    p.add_argument("--filter", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--predictors", default="", help="comma-separated covariate names")
    p.add_argument("--link", choices=("logit", "log", "identity"), default="logit")
    p.add_argument("--level", type=float, default=0.95)
    add_format(p)
    p.set_defaults(func=_cmd_glm)

    p = sub.add_parser("bias", help="truncation bias of final-size estimation")
    p.add_argument("--sar", type=_floats, default=[round(0.1 * k, 1) for k in range(1, 10)])
    p.add_argument("--s0", type=_ints, default=list(range(2, 10)))
    p.add_argument("--i0", type=_ints, default=[1, 2, 3])
    p.add_argument("--generations", type=_ints, default=None, help="default: 1..s0 per s0")
    add_format(p)
    p.set_defaults(func=_cmd_bias)

    def add_sim_args(p):
        p.add_argument("--n", type=int, required=True, help="households per study")
        p.add_argument("--sar", type=float, required=True)
        group = p.add_mutually_exclusive_group()
        group.add_argument("--generations", type=int, default=None)
        group.add_argument("--final", action="store_true")
        p.add_argument("--sizes", type=_size_dist, default=DEFAULT_HOUSEHOLD_SIZES,
                       metavar="SIZE:WEIGHT,...")
        p.add_argument("--i0", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("simulate", help="write one simulated study as a dataset")
    add_sim_args(p)
    add_format(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("coverage", help="confidence-interval coverage experiment")
    add_sim_args(p)
    p.add_argument("--levels", type=_floats, default=[0.8, 0.95])
    p.add_argument("--replications", type=int, default=1000)
    add_format(p)
    p.set_defaults(func=_cmd_coverage)

    return parser


def run_command(argv: list[str]) -> int:
    """Parse and run one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else _USAGE_ERROR
    if getattr(args, "generations", None) is None and hasattr(args, "final"):
        args.final = True  # no horizon given means fully observed
    try:
        return args.func(args)
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DATA_ERROR
    except (
        EnumerationCapError,
        EvaluationError,
        IntervalUnavailableError,
        SingularModelError,
        np.linalg.LinAlgError,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return _NUMERIC_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
