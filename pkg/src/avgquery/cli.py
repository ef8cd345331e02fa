"""``avgquery`` command line.

Exit codes: 0 ok, 2 parse error, 3 limit exceeded, 4 precondition or domain
violation, 5 unknown experiment.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import bfcore, criticality, exact, experiments, families, randgen, strategies
from .errors import LimitExceeded, ParseError, PreconditionError
from .report import ExperimentReport, render

EXIT_OK, EXIT_PARSE, EXIT_LIMIT, EXIT_PRECONDITION, EXIT_UNKNOWN = 0, 2, 3, 4, 5


def _decimal(x) -> str:
    return f"{float(x):.12g}"


def load_function(path: str) -> bfcore.TruthTable:
    """Truth-table file, or a DNF file (first line ``n=<int>``); ``-`` reads stdin."""
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    if text.lstrip().startswith("n"):
        return families.dnf_parse(text).to_table()
    return bfcore.parse_table(text)


# ---------------------------------------------------------------------------
# subcommands; each returns a payload dict or a str to print verbatim

def cmd_exact(args) -> dict:
    f = load_function(args.file)
    dave = exact.dave_exact(f, args.dp_limit)
    return {
        "n": f.n,
        "weight": f.weight,
        "dave": str(dave),
        "dave_decimal": dave.decimal(),
        "D": exact.worst_depth(f, args.dp_limit),
        "dtsize": exact.dtsize_min(f, args.dp_limit),
        "min_certificate": bfcore.min_certificate(f) if f.n <= bfcore.CERTIFICATE_LIMIT else None,
    }


def _strategy_bound(name: str, f: bfcore.TruthTable, strat) -> tuple[str, float | Fraction | None]:
    m, n = f.weight, f.n
    if name == "naive":
        return "log2(wt) + 2", (math.log2(m) + 2 if m else None)
    if name == "ecs":
        return "5", 5
    if name == "partition":
        return "40", 40
    if name == "recursive":
        if n < 2:
            return "log2(r) + log2 log2(r) + 87, r = wt/log2 n", None
        if m <= 4 * math.log2(n):
            # this regime is handled by the partition procedure
            return "40 (wt <= 4 log2 n)", 40
        r = m / math.log2(n)
        return "log2(r) + log2 log2(r) + 87, r = wt/log2 n", math.log2(r) + math.log2(math.log2(r)) + 87
    # restriction: n(1-p) + E[D(f|rho)]
    return "n(1-p) + E[D(f|rho)]", n * (1 - strat.p) + strat.expected_depth_after()


def cmd_strategy(args) -> dict:
    f = load_function(args.file)
    name = args.name
    if name == "naive":
        strat = strategies.naive_strategy(f)
    elif name == "ecs":
        strat = strategies.ecs_strategy(f)
    elif name == "partition":
        strat = strategies.partition_strategy(f)
    elif name == "recursive":
        strat = strategies.recursive_strategy(f)
    elif name.startswith("restriction:"):
        p = Fraction(name.split(":", 1)[1])
        strat = strategies.RestrictionStrategy(f, p, args.seed, args.dp_limit)
        name = "restriction"
    else:
        raise ValueError(f"unknown strategy {name!r}")
    mode = "exact" if args.mode == "exact" else strategies.MonteCarlo(args.trials, args.seed)
    report = strategies.measure_cost(strat, f, mode, limit=args.measure_limit)
    formula, bound = _strategy_bound(name, f, strat)
    if report.exact is not None:
        measured = report.exact
        slack = 0
    else:
        measured = report.mean
        slack = 3 * f.n / math.sqrt(max(args.trials, 1))
    if bound is None:
        verdict = "vacuous"
    else:
        verdict = "pass" if measured <= bound + slack else "fail"
    payload = {
        "strategy": name,
        "n": f.n,
        "weight": f.weight,
        "mode": report.mode,
        "measured_decimal": _decimal(measured),
        "max_cost": report.max_cost,
        "bound": {"formula": formula, "value": None if bound is None else _decimal(bound)},
        "verdict": verdict,
    }
    if report.exact is not None:
        payload["measured"] = (str(exact.ExactRational(report.total, f.n)) if report.total is not None
                               else str(report.exact))
    else:
        payload["trials"] = args.trials
        payload["seed"] = args.seed
    return payload


def cmd_sample(args):
    f = randgen.sample_fixed_weight(args.n, args.m, args.seed)
    if args.emit == "table":
        return bfcore.format_table(f)
    return {"n": f.n, "m": args.m, "seed": args.seed, "table": bfcore.format_table(f).split("\n")[1]}


def _parse_path(text: str, n: int) -> bfcore.PathSpec:
    steps = []
    for item in text.split(","):
        var, _, val = item.strip().partition("=")
        var = var.strip().lstrip("x")
        if not var.isdigit() or val.strip() not in ("0", "1"):
            raise ParseError(f"bad path step {item.strip()!r}; expected x<i>=0|1")
        steps.append((int(var), int(val)))
    path = bfcore.PathSpec(tuple(steps))
    for v, _ in steps:
        if not 1 <= v <= n:
            raise PreconditionError("path variables in 1..n", f"x{v}")
    return path


def cmd_parity(args) -> dict:
    f = load_function(args.file)
    delta = Fraction(args.delta)
    out = {"n": f.n, "weight": f.weight, "delta": str(delta)}
    if args.path:
        path = _parse_path(args.path, f.n)
        out["path_weights"] = randgen.path_weights(f, path)
        out["delta_parity_path"] = randgen.is_delta_parity_path(f, path, delta)
    if args.t is not None:
        if not 0 <= args.t <= f.n:
            raise PreconditionError("t <= n", f"t={args.t}")
        out["t"] = args.t
        out["t_delta_parity"] = randgen.is_t_delta_parity(f, args.t, delta)
    return out


def cmd_construct(args) -> dict:
    inst = families.theorem13_construct(args.n, args.w, args.candidates, args.seed, args.threads)
    lower, upper = families.theorem13_bounds(inst)
    if args.dnf_out:
        families.write_dnf(inst.formula, args.dnf_out)
    return {
        "n": inst.n, "w": inst.w, "m": inst.m, "h": inst.h, "s": inst.s,
        "d": inst.d, "p": str(inst.p),
        "size": inst.formula.size, "width": inst.formula.width,
        "chosen_candidate": inst.candidate,
        "g": bfcore.format_table(inst.g).split("\n")[1],
        "bounds": {"lower": str(lower), "lower_decimal": _decimal(lower), "upper": _decimal(upper)},
    }


def cmd_criticality(args) -> dict:
    f = load_function(args.file)
    grid = tuple(Fraction(p) for p in args.p) if args.p else criticality.DEFAULT_GRID
    est = criticality.lambda_estimate(f, grid)
    dave = exact.dave_exact(f, args.dp_limit)
    bound = criticality.lemma43_bound(f.n, est.value)
    return {
        "n": f.n,
        "grid": [str(p) for p in grid],
        "lambda_hat": _decimal(est.value),
        "witnesses": [[str(p), t] for p, t in est.witnesses],
        "tails": {str(t.p): [str(x) for x in t.tail] for t in est.tails},
        "dave": str(dave),
        "dave_decimal": dave.decimal(),
        "lemma43_bound": _decimal(bound),
        "lemma43_p": _decimal(criticality.lemma43_p(f.n, est.value)),
        "verdict": "pass" if dave.value <= bound else "fail",
    }


def cmd_bounds(args) -> dict:
    kind, n, c = args.kind.strip(), args.n, args.c
    head, _, rest = kind.partition("(")
    vals = [experiments.parse_number(x) for x in rest.rstrip(")").split(",") if x.strip()]
    if head in ("width", "size", "circuit", "formula"):
        value = criticality.corollary_bounds(kind, n, c)
    elif head == "lemma43" and len(vals) == 1:
        value = criticality.lemma43_bound(n, float(vals[0]))
    elif head == "naive" and len(vals) == 1:
        value = math.log2(vals[0]) + 2
    elif head == "recursive" and len(vals) == 1:
        r = vals[0] / math.log2(n)
        if r <= 1:
            raise PreconditionError("wt > log2 n", f"wt={vals[0]}")
        value = math.log2(r) + math.log2(math.log2(r)) + 87
    elif head == "theorem12" and len(vals) == 1:
        value = randgen.theorem12_threshold(n, vals[0])
    elif head == "lemma36" and len(vals) == 3:
        value = randgen.lemma36_bound(vals[0], float(vals[1]), vals[2])
    else:
        raise ValueError(f"unknown bound {kind!r}")
    return {"kind": kind, "n": n, "c": c, "value": _decimal(value)}


def cmd_experiment(args) -> ExperimentReport:
    params = {}
    for item in args.params:
        key, sep, value = item.partition("=")
        if not sep:
            raise ParseError(f"expected key=value, got {item!r}")
        params[key.strip()] = value.strip()
    return experiments.run_experiment(args.name, params, args.seed, args.trials, args.threads)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="64-bit seed (default 0)")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output path (default stdout)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--dp-limit", type=int, default=argparse.SUPPRESS)
    common.add_argument("--measure-limit", type=int, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="avgquery", parents=[common],
                                     description="Average-case query complexity toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", parents=[common], help="exact D_ave, D, tree size, min certificate")
    p.add_argument("file")
    p.set_defaults(fn=cmd_exact)

    p = sub.add_parser("strategy", parents=[common], help="measure a query strategy")
    p.add_argument("file")
    p.add_argument("name", help="naive | ecs | partition | recursive | restriction:<p>")
    p.add_argument("--mode", choices=("exact", "monte-carlo"), default="exact")
    p.add_argument("--trials", type=int, default=10000)
    p.set_defaults(fn=cmd_strategy)

    p = sub.add_parser("sample", parents=[common], help="uniform fixed-weight function")
    p.add_argument("n", type=int)
    p.add_argument("m", type=experiments.parse_number)
    p.add_argument("--emit", choices=("table", "report"), default="table")
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("parity", parents=[common], help="delta-parity checks")
    p.add_argument("file")
    p.add_argument("--delta", required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--path", help="e.g. x1=1,x3=0")
    p.set_defaults(fn=cmd_parity)

    p = sub.add_parser("construct", parents=[common], help="block-OR DNF instance")
    p.add_argument("n", type=int)
    p.add_argument("w", type=int)
    p.add_argument("--candidates", type=int, default=32)
    p.add_argument("--dnf-out")
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("criticality", parents=[common], help="restriction tails and lambda estimate")
    p.add_argument("file")
    p.add_argument("--p", action="append", help="grid point (repeatable)")
    p.set_defaults(fn=cmd_criticality)

    p = sub.add_parser("bounds", parents=[common], help="evaluate a closed-form bound")
    p.add_argument("kind", help="width(w) size(s) circuit(d,s) formula(d,s) lemma43(l) "
                                "naive(m) recursive(m) theorem12(m) lemma36(m,eps,delta)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("experiment", parents=[common], help="run a named experiment")
    p.add_argument("name", help=" | ".join(experiments.EXPERIMENTS))
    p.add_argument("params", nargs="*", help="key=value")
    p.add_argument("--trials", type=int)
    p.set_defaults(fn=cmd_experiment)
    return parser


_DEFAULTS = {"seed": 0, "format": "json", "out": None, "threads": 1,
             "dp_limit": exact.DP_LIMIT, "measure_limit": strategies.MEASURE_LIMIT}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, value in _DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    try:
        result = args.fn(args)
    except ParseError as e:
        print(f"avgquery: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except LimitExceeded as e:
        print(f"avgquery: limit exceeded: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except PreconditionError as e:
        print(f"avgquery: precondition violated: {e.hypothesis}: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except experiments.UnknownExperiment as e:
        print(f"avgquery: unknown experiment {e.args[0]!r}; known: "
              f"{', '.join(experiments.EXPERIMENTS)}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (ValueError, OSError) as e:
        print(f"avgquery: {e}", file=sys.stderr)
        return EXIT_PRECONDITION if isinstance(e, ValueError) else EXIT_PARSE

    if isinstance(result, ExperimentReport):
        text = result.to_json() if args.format == "json" else result.to_csv()
    elif isinstance(result, str):
        text = result
    else:
        text = render(result, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
