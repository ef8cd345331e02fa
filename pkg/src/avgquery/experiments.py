"""Named experiments behind ``avgquery experiment``; each returns an ExperimentReport."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable

from .criticality import DEFAULT_GRID, lambda_estimate, lemma43_bound, prop41_check
from .errors import AvgQueryError, BoundViolation
from .exact import ExactRational, dave_exact, worst_depth
from .families import pso, random_dnf, theorem13_bounds, theorem13_construct, theorem13_strategy
from .randgen import lemma36_experiment, theorem12_harness
from .report import ExperimentReport, map_trials
from .rng import make_rng
from .strategies import measure_cost


class UnknownExperiment(AvgQueryError, KeyError):
    pass


def parse_number(text: str):
    """``12``, ``2^30``, ``1/30``, ``0.5`` -> int, Fraction or float."""
    text = text.strip()
    m = re.fullmatch(r"(-?\d+)\^(\d+)", text)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    if re.fullmatch(r"-?\d+/\d+", text):
        return Fraction(text)
    return float(text)


def parse_range(text) -> list[int]:
    """``0..5`` (inclusive) or a comma list or a single integer."""
    if isinstance(text, int):
        return [text]
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", str(text))
    if m:
        return list(range(int(m.group(1)), int(m.group(2)) + 1))
    return [int(parse_number(x)) for x in str(text).split(",")]


def exact_text(total: int, exponent: int) -> str:
    return str(ExactRational(total, exponent))


def _pso_table(params, seed, trials, threads):
    ns = parse_range(params.get("n", "0..5"))
    rows, ok = [], True
    for n in ns:
        f = pso(n)
        dave = dave_exact(f)
        depth = worst_depth(f)
        expected = 4 - Fraction(3, 1 << n)
        good = dave == expected and depth == 2 * n + 1
        ok &= good
        rows.append({
            "n": n, "variables": f.n, "weight": f.weight,
            "D": depth, "D_expected": 2 * n + 1,
            "dave": str(dave), "dave_decimal": dave.decimal(),
            "dave_expected": str(expected), "match": good,
        })
    return ExperimentReport("pso-table", {"n": ns}, seed, len(ns),
                            statistics={"rows": rows},
                            bound={"formula": "D = 2n+1, D_ave = 4 - 3/2^n"},
                            verdict="pass" if ok else "fail")


def _theorem13(params, seed, trials, threads):
    n = int(parse_number(str(params.get("n", 16))))
    w = int(parse_number(str(params.get("w", 8))))
    candidates = int(parse_number(str(params.get("candidates", 32))))
    inst = theorem13_construct(n, w, candidates, seed, threads)
    f = inst.formula.to_table()
    report = measure_cost(theorem13_strategy(inst, f), f)
    lower, upper = theorem13_bounds(inst)
    measured = report.exact
    structural = {
        "m_h_le_s": inst.m * inst.h <= inst.s,
        "p_le_1_over_n": inst.p <= Fraction(1, n),
        "width_eq_w": inst.formula.width == w,
        "size_eq_mh": inst.formula.size == inst.m * inst.h,
    }
    ok = lower <= measured <= upper and all(structural.values())
    return ExperimentReport(
        "theorem13", {"n": n, "w": w, "candidates": candidates}, seed, candidates,
        statistics={
            "m": inst.m, "h": inst.h, "s": inst.s, "size": inst.formula.size,
            "width": inst.formula.width, "d": inst.d, "p": inst.p,
            "chosen_candidate": inst.candidate,
            "candidate_certificates": list(inst.candidate_certificates),
            "measured": exact_text(report.total, n),
            "measured_decimal": f"{float(measured):.12g}",
            "structural": structural,
        },
        bound={"formula": "h*d*(1-p)^h <= cost <= h*(log2 m + 2)",
               "lower": lower, "lower_decimal": f"{float(lower):.12g}", "upper": upper},
        verdict="pass" if ok else "fail",
    )


def _criticality(params, seed, trials, threads):
    n = int(parse_number(str(params.get("n", 10))))
    width = int(parse_number(str(params.get("w", 3))))
    max_size = int(parse_number(str(params.get("size", 12))))
    trials = trials or 50

    def trial(i):
        rng = make_rng(seed, i)
        phi = random_dnf(n, width, int(rng.integers(1, max_size + 1)), rng)
        f = phi.to_table()
        est = lambda_estimate(f, DEFAULT_GRID)
        dave = dave_exact(f)
        bound = lemma43_bound(n, est.value)
        masses_ok = all(t.mass == 1 for t in est.tails)
        return {"size": phi.size, "lambda_hat": est.value, "dave": str(dave),
                "dave_decimal": dave.decimal(), "bound": bound,
                "violation": float(dave.value) > bound, "mass_one": masses_ok}

    rows = map_trials(trial, range(trials), threads)
    violations = sum(r["violation"] for r in rows)
    mass_ok = all(r["mass_one"] for r in rows)
    return ExperimentReport(
        "criticality", {"n": n, "w": width, "size": max_size, "grid": list(DEFAULT_GRID)},
        seed, trials,
        statistics={"violations": violations, "mass_one_everywhere": mass_ok,
                    "max_lambda_hat": max((r["lambda_hat"] for r in rows), default=None),
                    "rows": rows},
        bound={"formula": "D_ave(f) <= n(1 - 1/lambda) + 2 sqrt(n/lambda)"},
        verdict="pass" if violations == 0 and mass_ok else "fail",
    )


def _prop41(params, seed, trials, threads):
    max_n = int(parse_number(str(params.get("n", 12))))
    max_s = int(parse_number(str(params.get("s", 8))))
    max_w = int(parse_number(str(params.get("w", 4))))
    trials = trials or 200

    def trial(i):
        rng = make_rng(seed, i)
        n = int(rng.integers(1, max_n + 1))
        width = int(rng.integers(1, min(n, max_w) + 1))
        phi = random_dnf(n, width, int(rng.integers(1, max_s + 1)), rng)
        bound = 2 * (phi.size + 1)
        try:
            return prop41_check(phi).exact, bound, False
        except BoundViolation:
            return None, bound, True

    results = map_trials(trial, range(trials), threads)
    violations = sum(bad for _, _, bad in results)
    ratio = max((float(c) / b for c, b, _ in results if c is not None), default=0.0)
    return ExperimentReport(
        "prop41", {"n": max_n, "s": max_s, "w": max_w}, seed, trials,
        statistics={"violations": violations, "max_cost_over_bound": ratio,
                    "max_cost": max((c for c, _, _ in results if c is not None), default=0)},
        bound={"formula": "cost <= 2(s+1)"},
        verdict="pass" if violations == 0 else "fail",
    )


def _lemma36(params, seed, trials, threads):
    return lemma36_experiment(
        int(parse_number(str(params.get("n", 60)))),
        int(parse_number(str(params.get("m", "2^30")))),
        float(parse_number(str(params.get("eps", 0.5)))),
        Fraction(parse_number(str(params.get("delta", "1/30")))),
        int(parse_number(str(params.get("len", 15)))),
        trials or 100000, seed, threads)


def _theorem12(params, seed, trials, threads):
    delta = params.get("delta")
    return theorem12_harness(
        int(parse_number(str(params.get("n", 14)))),
        int(parse_number(str(params.get("m", "2^13")))),
        trials or 100, seed,
        t=int(parse_number(str(params.get("t", 3)))),
        delta=None if delta is None else Fraction(parse_number(str(delta))),
        threads=threads)


EXPERIMENTS: dict[str, Callable] = {
    "pso-table": _pso_table,
    "theorem13": _theorem13,
    "criticality": _criticality,
    "prop41": _prop41,
    "lemma36": _lemma36,
    "theorem12": _theorem12,
}


def run_experiment(name: str, params: dict | None = None, seed: int = 0,
                   trials: int | None = None, threads: int = 1) -> ExperimentReport:
    """Run a named experiment; ``trials=None`` uses the experiment's default."""
    if name not in EXPERIMENTS:
        raise UnknownExperiment(name)
    return EXPERIMENTS[name](dict(params or {}), seed, trials, threads)

