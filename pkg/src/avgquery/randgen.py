"""Fixed-weight sampling, the box process, delta-parity checks and harnesses.

The box process draws the weight trajectory ``t_0 = m, t_1, ..., t_k`` of a
uniformly random ``f`` in ``B_{n,m}`` along a fixed query path without
building ``f``: round ``j`` draws ``t_{j-1}`` values without replacement from
``2^(n-j)`` zeros and ``2^(n-j)`` ones and keeps those equal to the path value,
so ``t_j`` is one hypergeometric draw.
"""

from __future__ import annotations

import math
import statistics as stats
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product

import numpy as np

from .bfcore import MAX_VARS, PathSpec, TruthTable, min_certificate
from .errors import PreconditionError
from .report import ExperimentReport, map_trials
from .rng import hypergeometric, make_rng

BOX_MAX_VARS = 62


def sample_fixed_weight(n: int, m: int, seed: int = 0) -> TruthTable:
    """Uniform member of ``B_{n,m}``; deterministic in ``seed``."""
    if not 0 <= n <= MAX_VARS:
        raise ValueError(f"n = {n} outside 0..{MAX_VARS}")
    if not 0 <= m <= 1 << n:
        raise ValueError(f"weight {m} outside 0..2^{n}")
    rng = make_rng(seed)
    ones = rng.choice(1 << n, size=m, replace=False) if m else np.empty(0, dtype=np.int64)
    return TruthTable.from_ones(n, ones)


@dataclass(frozen=True)
class BoxProcessTrace:
    n: int
    m: int
    path: PathSpec
    t: tuple[int, ...]


def box_process(n: int, m: int, path: PathSpec, seed: int = 0) -> BoxProcessTrace:
    if not 0 <= n <= BOX_MAX_VARS:
        raise ValueError(f"n = {n} outside 0..{BOX_MAX_VARS}")
    if not 0 <= m <= 1 << n:
        raise ValueError(f"m = {m} outside 0..2^{n}")
    if len(path) > n:
        raise ValueError("path longer than n")
    rng = make_rng(seed)
    t = [m]
    for j, (_, v) in enumerate(path.steps, start=1):
        half = 1 << (n - j)
        prev = t[-1]
        assert prev <= 2 * half, "more vectors than box entries"
        ones = hypergeometric(rng, half, half, prev)
        t.append(ones if v == 1 else prev - ones)
    return BoxProcessTrace(n, m, path, tuple(t))


def _in_window(child: int, parent: int, delta: Fraction) -> bool:
    # (1 - delta)/2 <= child/parent <= (1 + delta)/2, exact
    if parent == 0:
        return False
    return (1 - delta) * parent <= 2 * child <= (1 + delta) * parent


def is_delta_parity_trace(t, delta) -> bool:
    delta = Fraction(delta)
    return all(_in_window(t[j], t[j - 1], delta) for j in range(1, len(t)))


def path_weights(f: TruthTable, path: PathSpec) -> list[int]:
    """``wt(f|rho_0), ..., wt(f|rho_k)`` along the path."""
    index: list = [slice(None)] * f.n
    cube = f.cube()
    out = [f.weight]
    for v, b in path.steps:
        index[v - 1] = b
        out.append(int(np.count_nonzero(cube[tuple(index)])))
    return out


def is_delta_parity_path(f: TruthTable, path: PathSpec, delta) -> bool:
    """Every consecutive weight ratio along ``path`` lies in ``[(1-d)/2, (1+d)/2]``.

    A zero intermediate weight makes the ratio undefined and the path fails.
    """
    for v, _ in path.steps:
        if not 1 <= v <= f.n:
            raise IndexError(f"variable x_{v} out of range 1..{f.n}")
    return is_delta_parity_trace(path_weights(f, path), delta)


def is_t_delta_parity(f: TruthTable, t: int, delta) -> bool:
    """Every path of length at most ``t`` is delta-parity.

    Walks restrictions level by level: the step condition only involves a
    restriction and one single-variable extension, so each restriction with
    fewer than ``t`` fixed variables is examined once instead of once per
    ordered path through it.
    """
    delta = Fraction(delta)
    n = f.n
    t = min(t, n)
    cube = f.cube().astype(np.int64)
    level = {(None,) * n}
    for depth in range(t):
        nxt = set()
        for rho in level:
            sub = cube[tuple(slice(None) if b is None else b for b in rho)]
            parent = int(sub.sum())
            free = [i for i, b in enumerate(rho) if b is None]
            for pos, var in enumerate(free):
                others = tuple(a for a in range(len(free)) if a != pos)
                marg = sub.sum(axis=others) if others else sub
                for b in (0, 1):
                    if not _in_window(int(marg[b]), parent, delta):
                        return False
                    if depth + 1 < t:
                        nxt.add(rho[:var] + (b,) + rho[var + 1:])
        level = nxt
    return True


def all_paths(n: int, max_len: int):
    """Every ordered query path of length ``0..max_len`` (small ``n`` only)."""
    for k in range(max_len + 1):
        for vars_ in combinations(range(1, n + 1), k):
            for order in permutations(vars_):
                for vals in product((0, 1), repeat=k):
                    yield PathSpec(tuple(zip(order, vals)))


# ---------------------------------------------------------------------------
# harnesses

def lemma36_bound(m: int, eps: float, delta) -> float:
    """``2 eps log2(m) exp(-delta^2 m^(1-eps) / 2)``."""
    return 2 * eps * math.log2(m) * math.exp(-0.5 * float(delta) ** 2 * m ** (1 - eps))


def lemma36_experiment(n: int, m: int, eps: float, delta, path_len: int, trials: int,
                       seed: int = 0, threads: int = 1) -> ExperimentReport:
    """Frequency of non-delta-parity box-process traces vs the analytic bound.

    The path fixes ``x_1..x_k`` to 1; trial ``i`` runs the box process with
    seed ``seed XOR i``.
    """
    delta = Fraction(delta)
    tol = 1e-9
    if not 0 < eps < 1:
        raise PreconditionError("0 < eps < 1")
    if not 1 <= m <= 1 << n or n > BOX_MAX_VARS:
        raise PreconditionError("1 <= m <= 2^n", f"n={n}, m={m}")
    logm = math.log2(m)
    if path_len < 0 or path_len > eps * logm + tol or path_len > n:
        raise PreconditionError("path length <= eps log m", f"len={path_len}, eps log m={eps * logm:.6g}")
    if delta < 0 or (eps * logm > 0 and float(delta) > 1 / (2 * eps * logm) + tol):
        raise PreconditionError("delta <= 1/(2 eps log m)")
    path = PathSpec(tuple((i, 1) for i in range(1, path_len + 1)))

    def trial(i):
        tr = box_process(n, m, path, seed ^ i)
        return (not is_delta_parity_trace(tr.t, delta)), tr.t[-1]

    results = map_trials(trial, range(trials), threads)
    failures = sum(bad for bad, _ in results)
    freq = failures / trials if trials else 0.0
    bound = lemma36_bound(m, eps, delta)
    pb = min(bound, 1.0)
    se = math.sqrt(pb * (1 - pb) / trials) if trials else 0.0
    if bound >= 1:
        verdict = "vacuous"
    else:
        verdict = "pass" if freq <= bound + 3 * se else "fail"
    return ExperimentReport(
        experiment="lemma36",
        params={"n": n, "m": m, "eps": eps, "delta": delta, "path_len": path_len},
        seed=seed,
        trials=trials,
        statistics={
            "failures": failures,
            "frequency": freq,
            "std_error": se,
            "mean_final_weight": sum(t for _, t in results) / trials if trials else 0.0,
            "expected_final_weight": m / 2 ** path_len,
        },
        bound={"formula": "2*eps*log2(m)*exp(-delta^2*m^(1-eps)/2)", "value": bound},
        verdict=verdict,
    )


def theorem12_threshold(n: int, m: int) -> float:
    """``log(m/log n) - 3 log log(m/log n) - 5`` (logs base 2)."""
    r = m / math.log2(n)
    return math.log2(r) - 3 * math.log2(math.log2(r)) - 5


def lemma37_applies(n: int, m: int, t: int, delta) -> bool:
    return 1 <= t <= math.log2(m) - 1 and Fraction(delta) <= Fraction(1, 2 * t) and m <= 1 << (n - 1)


def theorem12_harness(n: int, m: int, trials: int, seed: int = 0, t: int = 3,
                      delta=None, threads: int = 1) -> ExperimentReport:
    """Distribution of ``min_x C_x(f)`` over ``f ~ B_{n,m}`` plus the
    ``(t, delta)``-parity implication check on every sample."""
    if n < 2 or not 4 * math.log2(n) <= m <= 1 << (n - 1):
        raise PreconditionError("4 log n <= m <= 2^(n-1)", f"n={n}, m={m}")
    delta = Fraction(1, 2 * t) if delta is None else Fraction(delta)
    check = lemma37_applies(n, m, t, delta)

    def trial(i):
        f = sample_fixed_weight(n, m, seed ^ i)
        c = min_certificate(f)
        parity = is_t_delta_parity(f, t, delta) if check else None
        return c, parity

    results = map_trials(trial, range(trials), threads)
    certs = [c for c, _ in results]
    parity_hits = [c for c, p in results if p]
    counterexamples = sum(1 for c in parity_hits if c < t)
    threshold = theorem12_threshold(n, m)
    vacuous = threshold <= 0
    histogram = {str(k): certs.count(k) for k in sorted(set(certs))}
    return ExperimentReport(
        experiment="theorem12",
        params={"n": n, "m": m, "t": t, "delta": delta},
        seed=seed,
        trials=trials,
        statistics={
            "min_certificate_histogram": histogram,
            "median_min_certificate": stats.median(certs) if certs else None,
            "mean_min_certificate": stats.fmean(certs) if certs else None,
            "threshold_vacuous": vacuous,
            "fraction_meeting_threshold": None if vacuous else
            sum(c >= threshold for c in certs) / len(certs),
            "lemma37_applicable": check,
            "parity_samples": len(parity_hits),
            "lemma37_counterexamples": counterexamples,
        },
        bound={"formula": "log2(m/log2 n) - 3*log2(log2(m/log2 n)) - 5", "value": threshold},
        verdict="fail" if counterexamples else ("vacuous" if vacuous and not check else "pass"),
    )
