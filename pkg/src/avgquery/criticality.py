"""Exact restriction tails, grid criticality estimates and closed-form bounds."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bfcore import TruthTable
from .errors import BoundViolation, LimitExceeded
from .exact import _lattice, depth_lattice
from .strategies import MEASURE_LIMIT, CostReport, dnf_term_strategy, measure_cost

TAIL_LIMIT = 12
DEFAULT_GRID = tuple(Fraction(1, 1 << k) for k in range(1, 11))


@dataclass(frozen=True)
class RestrictionTail:
    """``tail[t] = Pr[D(f|rho) >= t]`` for ``t = 0..n`` under ``R_p``."""

    p: Fraction
    tail: tuple[Fraction, ...]
    mass: Fraction

    def __getitem__(self, t: int) -> Fraction:
        return self.tail[t] if t < len(self.tail) else Fraction(0)


def restriction_tail(f: TruthTable, p, limit: int = TAIL_LIMIT) -> RestrictionTail:
    """Exact tail of ``D(f|rho)`` over all ``3^n`` restrictions.

    Restrictions are grouped by (free count, depth); each group contributes
    ``count * p^free * ((1-p)/2)^fixed``.
    """
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"p = {p} outside [0, 1]")
    n = f.n
    if n > limit:
        raise LimitExceeded(f"n = {n} exceeds the restriction enumeration limit {limit}")
    _, free, _, _ = _lattice(f)
    depth = depth_lattice(f)
    counts = np.bincount((free * (n + 1) + depth).ravel(), minlength=(n + 1) ** 2)
    counts = counts.reshape(n + 1, n + 1)  # [free, depth]
    q = (1 - p) / 2
    by_depth = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        wk = p ** k * q ** (n - k)
        for d in range(n + 1):
            if counts[k, d]:
                by_depth[d] += int(counts[k, d]) * wk
    mass = sum(by_depth, Fraction(0))
    tail, acc = [], Fraction(0)
    for d in range(n, -1, -1):
        acc += by_depth[d]
        tail.append(acc)
    return RestrictionTail(p, tuple(reversed(tail)), mass)


@dataclass(frozen=True)
class LambdaEstimate:
    value: float
    grid: tuple[Fraction, ...]
    witnesses: tuple[tuple[Fraction, int], ...]
    tails: tuple[RestrictionTail, ...]


def _satisfies(tails: Sequence[RestrictionTail], lam: Fraction) -> bool:
    return all(tl.tail[t] <= (tl.p * lam) ** t for tl in tails for t in range(1, len(tl.tail)))


def lambda_estimate(f: TruthTable, grid: Sequence = DEFAULT_GRID) -> LambdaEstimate:
    """Least ``lambda >= 1`` with ``tail[t] <= (p lambda)^t`` on every grid point.

    The float result is nudged upward until the inequality holds exactly, so
    it is the smallest double consistent with the grid. This is a lower
    bound on the true criticality, which quantifies over all ``p``.
    """
    grid = tuple(Fraction(p) for p in grid)
    if not grid:
        raise ValueError("empty p grid")
    if any(p <= 0 for p in grid):
        raise ValueError("grid points must be positive")
    tails = tuple(restriction_tail(f, p) for p in grid)
    best, witnesses = 1.0, []
    for tl in tails:
        for t in range(1, len(tl.tail)):
            if tl.tail[t] == 0:
                continue
            r = math.exp(math.log(tl.tail[t]) / t) / float(tl.p)
            if r > best * (1 + 1e-12):
                best, witnesses = r, [(tl.p, t)]
            elif abs(r - best) <= best * 1e-12:
                witnesses.append((tl.p, t))
    while not _satisfies(tails, Fraction(best)):
        best = math.nextafter(best, math.inf)
    return LambdaEstimate(best, grid, tuple(witnesses), tails)


def lemma43_bound(n: int, lam: float) -> float:
    """``n (1 - 1/lambda) + 2 sqrt(n / lambda)``."""
    if n < 1 or lam < 1:
        raise ValueError("need n >= 1 and lambda >= 1")
    return n * (1 - 1 / lam) + 2 * math.sqrt(n / lam)


def lemma43_p(n: int, lam: float) -> float:
    """Restriction probability that attains :func:`lemma43_bound`.

    ``p = 1/((1 + e) lambda)`` with ``e = 1/(sqrt(n/lambda) - 1)``; zero when
    ``n <= lambda`` (query everything).
    """
    if n < 1 or lam < 1:
        raise ValueError("need n >= 1 and lambda >= 1")
    r = math.sqrt(n / lam)
    if r <= 1:
        return 0.0
    return (r - 1) / (r * lam)


_KIND = re.compile(r"\s*(width|size|circuit|formula)\s*\(\s*([^)]*)\)\s*")


def corollary_bounds(kind: str, n: int, c: float) -> float:
    """Evaluate a corollary bound with caller constant ``c``.

    ``kind`` is ``width(w)``, ``size(s)``, ``circuit(d,s)`` or ``formula(d,s)``.
    The constants are not known, so the values are for display only.
    """
    m = _KIND.fullmatch(kind)
    if not m:
        raise ValueError(f"unknown bound kind {kind!r}")
    name = m.group(1)
    args = [int(a) for a in m.group(2).split(",") if a.strip()]
    if n < 1 or c <= 0 or any(a <= 0 for a in args):
        raise ValueError("parameters must be positive")
    if name in ("width", "size"):
        if len(args) != 1:
            raise ValueError(f"{name} takes one argument")
        x = c * args[0] if name == "width" else c * math.log2(args[0])
    else:
        if len(args) != 2:
            raise ValueError(f"{name} takes (d, s)")
        d, s = args
        if d < 2:
            raise ValueError("depth d >= 2 required")
        base = c * math.log2(s) if name == "circuit" else (c / d) * math.log2(s)
        x = base ** (d - 1)
    if x <= 0:
        raise ValueError("degenerate bound (non-positive denominator)")
    return n * (1 - 1 / x)


def prop41_check(phi, limit: int = MEASURE_LIMIT) -> CostReport:
    """Exact cost of gate-by-gate DNF evaluation, checked against ``2(s + 1)``."""
    f = phi.to_table()
    report = measure_cost(dnf_term_strategy(f, phi.terms), f, limit=limit)
    bound = 2 * (phi.size + 1)
    if report.exact > bound:
        raise BoundViolation(f"gate-by-gate cost {report.exact} exceeds 2(s+1) = {bound}")
    return report
