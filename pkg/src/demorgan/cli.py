"""Command-line front end.

Sub-commands:

    classify-series   convergence verdict for a positive series
    classify-bdp      recurrence verdict for a birth-death chain
    classify-walk     recurrence verdict for a reflected random walk
    simulate-walk     Monte Carlo run of the reflected walk
    eval-iterlog      evaluate iterated logarithms and their weights

Series and rates come from a built-in family (``--family`` plus parameter
flags), an expression in the small DSL (``--a-n``, ``--delta-n``,
``--lambda``/``--mu``, ``--alpha``), or a two-column table file.  Exit codes:
0 for a decisive verdict (or a completed evaluation/simulation), 2 for an
inconclusive verdict, 1 for any error.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Any

from . import __version__
from .birthdeath import BirthDeathRates, bdp_classify
from .convergence import ClassifyConfig
from .errors import DemorganError, EvalError
from .expr import parse_expression
from .families import (
    RATE_FACTORIES,
    SERIES_FACTORIES,
    make_rate_family,
    make_series_family,
    make_walk_family,
)
from .iterlog import (
    K_MAX_NUMERIC,
    expansion_increment,
    iterlog,
    iterlog_product,
    min_domain,
    zeta_weight,
)
from .report import (
    Report,
    classification_to_dict,
    rw_classification_to_dict,
    simulation_to_dict,
    verdict_to_dict,
)
from .tables import KINDS, load_table
from .walk import DriftSpec, rw_classify, simulate
from .convergence import RatioSpec, adaptive_classify

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2

_PROBE_LIMIT = 10_000


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; this tool reserves 2 for
    # inconclusive verdicts, so usage problems are rerouted to exit 1.
    def error(self, message):
        raise _UsageError(message)


def _add_classify_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--K-start", type=int, default=1, dest="k_start",
                   help="depth at which the adaptive test starts (default 1)")
    p.add_argument("--K-max", type=int, default=K_MAX_NUMERIC, dest="k_max",
                   help=f"deepest level the adaptive test may reach (default {K_MAX_NUMERIC})")
    p.add_argument("--margin", type=float, default=0.2,
                   help="decision margin around the critical value (default 0.2)")
    p.add_argument("--band", type=float, default=0.5,
                   help="near-critical band that allows escalation (default 0.5)")
    p.add_argument("--window-lo", type=int, default=100,
                   help="sampling window floor (default 100)")
    p.add_argument("--window-hi", type=int, default=10_000_000,
                   help="sampling window ceiling (default 1e7)")
    p.add_argument("--samples", type=int, default=64,
                   help="sample count on the geometric grid (default 64)")
    p.add_argument("--no-guard", action="store_true",
                   help="disable the next-level consistency guard")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--no-timing", action="store_true",
                   help="omit the timing field (byte-reproducible output)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="demorgan", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("classify-series", help="convergence verdict for a positive series")
    src = ps.add_argument_group("series source (exactly one)")
    src.add_argument("--family", choices=sorted(SERIES_FACTORIES))
    src.add_argument("--p", type=float, help="p-series exponent")
    src.add_argument("--r", type=float, help="log-power / iterlog-power exponent")
    src.add_argument("--x", type=float, help="geometric base")
    src.add_argument("--K", type=int, dest="family_k",
                     help="iterlog-power family depth")
    src.add_argument("--a-n", dest="a_n", metavar="EXPR",
                     help="series term a_n as an expression in n")
    src.add_argument("--delta-n", dest="delta_n", metavar="EXPR",
                     help="a_n/a_{n+1} - 1 as an expression in n")
    src.add_argument("--table", metavar="PATH", help="two-column table file")
    src.add_argument("--table-kind", choices=KINDS, default="terms")
    src.add_argument("--first-index", type=int,
                     help="first index at which an expression source is valid (default: probed)")
    _add_classify_flags(ps)
    _add_output_flags(ps)

    pb = sub.add_parser("classify-bdp", help="recurrence verdict for a birth-death chain")
    srcb = pb.add_argument_group("rates source (exactly one)")
    srcb.add_argument("--family", choices=sorted(RATE_FACTORIES))
    srcb.add_argument("--c", type=float, help="rate family coefficient")
    srcb.add_argument("--K", type=int, dest="family_k", help="bd-iterlog family depth")
    srcb.add_argument("--lambda", dest="lam", metavar="EXPR", help="birth rate expression")
    srcb.add_argument("--mu", dest="mu", metavar="EXPR", help="death rate expression")
    srcb.add_argument("--first-index", type=int, default=1,
                      help="first index at which expression rates are valid (default 1)")
    _add_classify_flags(pb)
    _add_output_flags(pb)

    pw = sub.add_parser("classify-walk", help="recurrence verdict for the reflected walk")
    _add_walk_source(pw)
    _add_classify_flags(pw)
    _add_output_flags(pw)

    pm = sub.add_parser("simulate-walk", help="Monte Carlo run of the reflected walk")
    _add_walk_source(pm)
    pm.add_argument("--seed", type=int, default=1)
    pm.add_argument("--paths", type=int, default=1000)
    pm.add_argument("--horizon", type=int, default=10_000)
    pm.add_argument("--workers", type=int, default=1)
    pm.add_argument("--chunk-size", type=int, default=4096)
    _add_output_flags(pm)

    pe = sub.add_parser("eval-iterlog", help="evaluate iterated logarithms")
    pe.add_argument("--K", type=int, required=True, dest="level")
    pe.add_argument("--x", type=float, help="argument (required except for min-domain)")
    pe.add_argument("--what", choices=("log", "product", "zeta", "increment", "min-domain"),
                    default="log")
    _add_output_flags(pe)

    return parser


def _add_walk_source(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("drift source (exactly one)")
    src.add_argument("--alpha-const", type=float, metavar="A",
                     help="constant drift alpha(n) = A, 0 < A < 1/2")
    src.add_argument("--alpha", metavar="EXPR", help="drift alpha(n) as an expression in n")
    src.add_argument("--C", type=float, default=1.0, dest="cap",
                     help="drift cap C for expression drifts (default 1.0)")


def _classify_config(args: argparse.Namespace) -> ClassifyConfig:
    return ClassifyConfig(
        k_start=args.k_start,
        k_max=args.k_max,
        margin=args.margin,
        near_one_band=args.band,
        window_lo=args.window_lo,
        window_hi=args.window_hi,
        samples=args.samples,
        guard=not args.no_guard,
    )


def _config_echo(config: ClassifyConfig) -> dict[str, Any]:
    return {
        "k_start": config.k_start,
        "k_max": config.k_max,
        "margin": config.margin,
        "near_one_band": config.near_one_band,
        "window_lo": config.window_lo,
        "window_hi": config.window_hi,
        "samples": config.samples,
        "tail_fraction": config.tail_fraction,
        "use_delta": config.use_delta,
        "guard": config.guard,
        "guard_threshold": config.guard_threshold,
    }


def _probe_first_index(term, label: str) -> int:
    for n in range(1, _PROBE_LIMIT + 1):
        try:
            if term(n) > 0.0 and term(n + 1) > 0.0:
                return n
        except EvalError:
            continue
    raise _UsageError(
        f"could not find an index n <= {_PROBE_LIMIT} where {label!r} is positive; "
        f"pass --first-index explicitly"
    )


def _series_source(args: argparse.Namespace) -> tuple[RatioSpec, dict[str, Any]]:
    chosen = [
        name for name, flag in (
            ("family", args.family), ("a-n", args.a_n),
            ("delta-n", args.delta_n), ("table", args.table),
        ) if flag is not None
    ]
    if len(chosen) != 1:
        raise _UsageError(
            "choose exactly one of --family, --a-n, --delta-n, --table"
            + (f" (got {', '.join(chosen)})" if chosen else "")
        )
    if args.family:
        fam = make_series_family(
            args.family, p=args.p, r=args.r, x=args.x, K=args.family_k,
        )
        echo = {"kind": "family", "family": fam.name, "params": fam.params,
                "expression": fam.expression}
        return fam.ratio_spec, echo
    if args.a_n is not None:
        term = parse_expression(args.a_n)
        first = args.first_index or _probe_first_index(term, args.a_n)

        def ratio(n: int) -> float:
            return term(n) / term(n + 1)

        spec = RatioSpec(ratio=ratio, first_index=first, label=f"a_n = {args.a_n}")
        return spec, {"kind": "expression", "quantity": "a_n", "text": args.a_n,
                      "first_index": first}
    if args.delta_n is not None:
        delta = parse_expression(args.delta_n)
        first = args.first_index or _probe_first_index(
            lambda n: 1.0 + delta(n), args.delta_n
        )
        spec = RatioSpec(
            ratio=lambda n: 1.0 + delta(n), delta=delta, first_index=first,
            label=f"delta_n = {args.delta_n}",
        )
        return spec, {"kind": "expression", "quantity": "delta_n", "text": args.delta_n,
                      "first_index": first}
    spec = load_table(args.table, args.table_kind)
    echo = {"kind": "table", "path": args.table, "layout": args.table_kind,
            "rows": [[n, spec.ratio(n)] for n in spec.support]}
    return spec, echo


def _rates_source(args: argparse.Namespace) -> tuple[BirthDeathRates, dict[str, Any]]:
    has_family = args.family is not None
    has_expr = args.lam is not None or args.mu is not None
    if has_family == has_expr:
        raise _UsageError("choose exactly one of --family or --lambda/--mu")
    if has_family:
        fam = make_rate_family(args.family, c=args.c, K=args.family_k)
        return fam.rates, {"kind": "family", "family": fam.name, "params": fam.params}
    if args.lam is None or args.mu is None:
        raise _UsageError("expression rates need both --lambda and --mu")
    lam = parse_expression(args.lam)
    mu = parse_expression(args.mu)
    rates = BirthDeathRates(
        lam=lam, mu=mu, first_index=args.first_index,
        label=f"lambda = {args.lam}, mu = {args.mu}",
    )
    return rates, {"kind": "expression", "lambda": args.lam, "mu": args.mu,
                   "first_index": args.first_index}


def _drift_source(args: argparse.Namespace) -> tuple[DriftSpec, dict[str, Any]]:
    if (args.alpha_const is None) == (args.alpha is None):
        raise _UsageError("choose exactly one of --alpha-const or --alpha")
    if args.alpha_const is not None:
        fam = make_walk_family("alpha-const", a=args.alpha_const)
        return fam.drift, {"kind": "family", "family": fam.name, "params": fam.params}
    alpha = parse_expression(args.alpha)
    drift = DriftSpec(alpha=alpha, C=args.cap, label=f"alpha = {args.alpha}")
    return drift, {"kind": "expression", "alpha": args.alpha, "C": args.cap}


def _verdict_exit(decision) -> int:
    return EXIT_INCONCLUSIVE if decision in ("inconclusive",) else EXIT_OK


def _run_classify_series(args) -> tuple[Report, int]:
    spec, echo = _series_source(args)
    config = _classify_config(args)
    t0 = time.perf_counter()
    verdict = adaptive_classify(spec, config)
    elapsed = (time.perf_counter() - t0) * 1e3
    report = Report(
        mode="series",
        input={"source": echo, "config": _config_echo(config)},
        result=verdict_to_dict(verdict),
        timing_ms=elapsed,
    )
    return report, _verdict_exit(verdict.decision.value)


def _run_classify_bdp(args) -> tuple[Report, int]:
    rates, echo = _rates_source(args)
    config = _classify_config(args)
    t0 = time.perf_counter()
    result = bdp_classify(rates, config)
    elapsed = (time.perf_counter() - t0) * 1e3
    report = Report(
        mode="bdp",
        input={"source": echo, "config": _config_echo(config)},
        result=classification_to_dict(result),
        timing_ms=elapsed,
    )
    return report, _verdict_exit(result.decision.value)


def _run_classify_walk(args) -> tuple[Report, int]:
    drift, echo = _drift_source(args)
    config = _classify_config(args)
    t0 = time.perf_counter()
    result = rw_classify(drift, config)
    elapsed = (time.perf_counter() - t0) * 1e3
    report = Report(
        mode="rwalk",
        input={"source": echo, "config": _config_echo(config)},
        result=rw_classification_to_dict(result),
        timing_ms=elapsed,
    )
    return report, _verdict_exit(result.decision.value)


def _run_simulate(args) -> tuple[Report, int]:
    drift, echo = _drift_source(args)
    t0 = time.perf_counter()
    sim = simulate(drift, seed=args.seed, horizon=args.horizon, n_paths=args.paths,
                   workers=args.workers, chunk_size=args.chunk_size)
    elapsed = (time.perf_counter() - t0) * 1e3
    report = Report(
        mode="simulate",
        input={
            "source": echo,
            "seed": args.seed, "paths": args.paths, "horizon": args.horizon,
        },
        result=simulation_to_dict(sim),
        timing_ms=elapsed,
    )
    return report, EXIT_OK


def _run_eval_iterlog(args) -> tuple[Report, int]:
    level = args.level
    what = args.what
    if what != "min-domain" and args.x is None:
        raise _UsageError(f"--what {what} needs --x")
    t0 = time.perf_counter()
    if what == "min-domain":
        value = min_domain(level)
    elif what == "log":
        value = iterlog(level, args.x)
    elif what == "product":
        value = iterlog_product(level, _as_index(args.x))
    elif what == "zeta":
        value = zeta_weight(level, _as_index(args.x))
    else:
        value = expansion_increment(level, _as_index(args.x))
    elapsed = (time.perf_counter() - t0) * 1e3
    report = Report(
        mode="iterlog",
        input={"K": level, "x": args.x, "what": what},
        result={"value": value},
        timing_ms=elapsed,
    )
    return report, EXIT_OK


def _as_index(x: float) -> int:
    n = int(x)
    if n != x:
        raise _UsageError(f"this evaluation needs an integer index, got {x}")
    return n


def _print_text(report: Report, out) -> None:
    r = report.result
    print(f"mode: {report.mode}", file=out)
    if report.mode == "series":
        _print_verdict(r, out)
    elif report.mode == "bdp":
        print(f"decision: {r['decision']}", file=out)
        _print_verdict(r["series_verdict"], out, prefix="  series ")
    elif report.mode == "rwalk":
        print(f"decision: {r['decision']}", file=out)
        _print_verdict(r["chain"]["series_verdict"], out, prefix="  chain series ")
    elif report.mode == "simulate":
        print(f"paths: {r['n_paths']}  horizon: {r['horizon']}  seed: {r['seed']}", file=out)
        print(f"returned: {r['returned_paths']} ({r['returned_fraction']:.4f})", file=out)
        mfr = r["mean_first_return"]
        print(f"mean first return: {'n/a' if mfr is None else f'{mfr:.2f}'}", file=out)
        print(f"max excursion: {r['max_excursion']}", file=out)
        fp = r["final_positions"]
        print(f"final positions: mean={fp['mean']:.2f} median={fp['median']:.1f} "
              f"min={fp['min']} max={fp['max']}", file=out)
    elif report.mode == "iterlog":
        print(f"value: {r['value']!r}", file=out)
    if report.timing_ms is not None:
        print(f"elapsed: {report.timing_ms:.1f} ms", file=out)


def _print_verdict(v: dict[str, Any], out, prefix: str = "") -> None:
    print(f"{prefix}decision: {v['decision']}", file=out)
    print(f"{prefix}level: {v['level']}  window: {v['window']}  margin: {v['margin']}", file=out)
    if v["s_min"] is not None:
        print(f"{prefix}tail coefficient range: [{v['s_min']:.6g}, {v['s_max']:.6g}]", file=out)
    if v.get("note"):
        print(f"{prefix}note: {v['note']}", file=out)
    for step in v.get("trace", []):
        guard = step.get("guard")
        guard_txt = ""
        if guard is not None:
            guard_txt = f"  guard={'pass' if guard['passed'] else 'FAIL'}"
        esc = f"  -> {step['escalated']}" if step.get("escalated") else ""
        rng = ""
        if step["s_min"] is not None:
            rng = f"  s in [{step['s_min']:.6g}, {step['s_max']:.6g}]"
        print(f"{prefix}  depth {step['level']}: {step['decision']}{rng}{guard_txt}{esc}",
              file=out)


_RUNNERS = {
    "classify-series": _run_classify_series,
    "classify-bdp": _run_classify_bdp,
    "classify-walk": _run_classify_walk,
    "simulate-walk": _run_simulate,
    "eval-iterlog": _run_eval_iterlog,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report, code = _RUNNERS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (DemorganError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.no_timing:
        report.timing_ms = None
    if args.format == "json":
        print(report.to_json(include_timing=not args.no_timing))
    else:
        _print_text(report, sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
