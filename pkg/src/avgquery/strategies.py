"""Adaptive query strategies and exact / Monte Carlo cost measurement.

A strategy is a lazily unfolded decision tree: :meth:`DecisionStrategy.root`
returns a :class:`Leaf` or a :class:`Query` whose ``branch(bit)`` builds the
next node on demand. Procedures are written in continuation-passing style so
they compose (the partition strategy runs one sub-procedure per block and the
recursive strategy hands over to the others) without materializing trees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from .bfcore import TruthTable, ecs_partition
from .errors import LimitExceeded, PreconditionError, ZeroErrorViolation
from .exact import (DecisionTreeNode, ExactRational, _lattice,
                    _check_limit, worst_choice_lattice, worst_tree_cost_lattice)
from .rng import make_rng

MEASURE_LIMIT = 20
PARTITION_BLOCKS = 8


@dataclass(frozen=True)
class Leaf:
    value: int


@dataclass(frozen=True)
class Query:
    var: int
    branch: Callable[[int], "Node"]


Node = Union[Leaf, Query]
Answers = dict
Cont = Callable[[int, Answers], Node]


class SubFunction:
    """Current subfunction: a table over ``free`` (original 1-based indices).

    Table index ``sum(x_{free[q]} << q)``, matching :class:`TruthTable`.
    """

    __slots__ = ("bits", "free", "weight")

    def __init__(self, bits: np.ndarray, free: tuple[int, ...]):
        self.bits = bits
        self.free = free
        self.weight = int(np.count_nonzero(bits))

    @classmethod
    def of(cls, f: TruthTable) -> "SubFunction":
        return cls(f.bits, tuple(range(1, f.n + 1)))

    @property
    def constant(self) -> bool:
        return self.weight == 0 or self.weight == self.bits.size

    @property
    def value(self) -> int:
        return 1 if self.weight else 0

    def fix(self, var: int, bit: int) -> "SubFunction":
        p = self.free.index(var)
        k = len(self.free)
        bits = self.bits.reshape(1 << (k - p - 1), 2, 1 << p)[:, bit, :].reshape(-1)
        return SubFunction(bits, self.free[:p] + self.free[p + 1:])

    def depends_on(self, var: int) -> bool:
        p = self.free.index(var)
        halves = self.bits.reshape(-1, 2, 1 << p)
        return not np.array_equal(halves[:, 0, :], halves[:, 1, :])

    def fix_all(self, answers: Answers) -> "SubFunction":
        sub = self
        for v in sub.free[::-1]:
            if v in answers:
                sub = sub.fix(v, answers[v])
        return sub

    def table(self) -> TruthTable:
        return TruthTable(len(self.free), self.bits)


# ---------------------------------------------------------------------------
# procedures

def _naive(sub: SubFunction, answers: Answers, k: Cont, order=None) -> Node:
    if sub.constant:
        return k(sub.value, answers)
    v = _pick(sub, order)
    return Query(v, lambda b: _naive(sub.fix(v, b), {**answers, v: b}, k, order))


def _pick(sub: SubFunction, order) -> int:
    # first variable in the order that the (non-constant) subfunction reads
    free = set(sub.free)
    candidates = sub.free if order is None else (v for v in order if v in free)
    return next(v for v in candidates if sub.depends_on(v))


def _ecs(sub: SubFunction, answers: Answers, k: Cont) -> Node:
    if sub.constant:
        return k(sub.value, answers)
    nfree = len(sub.free)
    if sub.weight <= 2 or nfree <= 4:
        return _naive(sub, answers, k)
    part = ecs_partition(sub.table())
    big = next((c for c in part.classes if len(c) >= 3), None)
    if big is None or len(big) == nfree:
        return _naive(sub, answers, k)
    r1, r2 = big[0], big[1]
    same = part.correlation(r1, r2) == 1
    i1, i2 = sub.free[r1 - 1], sub.free[r2 - 1]
    outside = set(big)
    j = next(sub.free[r - 1] for r in range(1, nfree + 1) if r not in outside)

    def after_first(b1):
        s1 = sub.fix(i1, b1)
        a1 = {**answers, i1: b1}
        if s1.constant:
            return k(s1.value, a1)

        def after_second(b2):
            s2 = s1.fix(i2, b2)
            a2 = {**a1, i2: b2}
            if (b1 == b2) != same:
                # every black point agrees with the class polarity
                return k(0, a2)
            if s2.constant:
                return k(s2.value, a2)
            return Query(j, lambda b3: _ecs(s2.fix(j, b3), {**a2, j: b3}, k))

        return Query(i2, after_second)

    return Query(i1, after_first)


def _partition_blocks(sub: SubFunction, blocks: int = PARTITION_BLOCKS) -> list[np.ndarray]:
    ones = np.flatnonzero(sub.bits)
    out = []
    for chunk in np.array_split(ones, blocks):
        bits = np.zeros_like(sub.bits)
        bits[chunk] = 1
        out.append(bits)
    return out


def _partition(sub: SubFunction, answers: Answers, k: Cont) -> Node:
    if sub.constant:
        return k(sub.value, answers)
    parts = [SubFunction(bits, sub.free) for bits in _partition_blocks(sub)]

    def run(i: int, ans: Answers) -> Node:
        if i == len(parts):
            return k(0, ans)
        block = parts[i].fix_all(ans)
        return _ecs(block, ans, lambda val, a: k(1, a) if val else run(i + 1, a))

    return run(0, answers)


def recursive_query_count(m: int, n: int) -> int:
    r = m / math.log2(n)
    return math.ceil(math.log2(r) + math.log2(math.log2(r)) + 3)


def _recursive(sub: SubFunction, answers: Answers, k: Cont, order=None) -> Node:
    if sub.constant:
        return k(sub.value, answers)
    m, n = sub.weight, len(sub.free)
    if m >= n:
        return _naive(sub, answers, k, order)
    if n < 2 or m <= 4 * math.log2(n):
        return _partition(sub, answers, k)
    ell = min(recursive_query_count(m, n), n)

    def step(s: SubFunction, ans: Answers, left: int) -> Node:
        if left == 0 or s.constant:
            return _recursive(s, ans, k, order)
        v = _pick(s, order)
        return Query(v, lambda b: step(s.fix(v, b), {**ans, v: b}, left - 1))

    return step(sub, answers, ell)


def _done(value: int, answers: Answers) -> Node:
    return Leaf(value)


# ---------------------------------------------------------------------------
# strategy objects

class DecisionStrategy:
    """Deterministic adaptive policy for a fixed function ``f``."""

    def __init__(self, name: str, f: TruthTable, start: Callable[[], Node]):
        self.name = name
        self.f = f
        self._start = start

    def __repr__(self):
        return f"DecisionStrategy({self.name!r}, n={self.f.n})"

    def root(self) -> Node:
        return self._start()

    def run(self, x: int) -> tuple[int, int]:
        """``(output, number of queries)`` on table index ``x``."""
        node, cost = self.root(), 0
        while isinstance(node, Query):
            node = node.branch((x >> (node.var - 1)) & 1)
            cost += 1
        return node.value, cost

    def materialize(self) -> DecisionTreeNode:
        def build(node):
            if isinstance(node, Leaf):
                return DecisionTreeNode.leaf(node.value)
            return DecisionTreeNode.internal(node.var, build(node.branch(0)), build(node.branch(1)))
        return build(self.root())


def _order_from_seed(n: int, seed: int | None):
    if seed is None:
        return None
    return tuple(int(v) + 1 for v in make_rng(seed).permutation(n))


def naive_strategy(f: TruthTable, order_seed: int | None = None) -> DecisionStrategy:
    """Query variables in ascending order until the subfunction is constant.

    Variables the current subfunction does not depend on are skipped.
    """
    order = _order_from_seed(f.n, order_seed)
    return DecisionStrategy("naive", f, lambda: _naive(SubFunction.of(f), {}, _done, order))


def _log2n(f: TruthTable) -> float:
    return math.log2(f.n) if f.n >= 1 else float("-inf")


def ecs_strategy(f: TruthTable) -> DecisionStrategy:
    """Pairwise test on a large equivalent coordinate set, then recurse.

    Requires ``1 <= wt(f) < log2 n``. Falls back to the naive strategy when
    the weight is at most 2, at most four variables remain, or one class
    covers every free variable. Stops early once the subfunction is constant.
    """
    m = f.weight
    if m < 1:
        raise PreconditionError("wt(f) >= 1")
    if not m < _log2n(f):
        raise PreconditionError("wt(f) < log n", f"wt(f) = {m}, log2 n = {_log2n(f):.4g}")
    return DecisionStrategy("ecs", f, lambda: _ecs(SubFunction.of(f), {}, _done))


def partition_strategy(f: TruthTable, check: bool = True) -> DecisionStrategy:
    """Split the on-set into 8 blocks and evaluate their OR block by block.

    Each block function is evaluated by the ECS procedure on what is left of it
    after the answers so far. ``check=False`` skips the weight hypothesis
    ``wt(f) <= 4 log2 n``; the procedure itself is correct for any ``f``.
    """
    m = f.weight
    if check:
        if m < 1:
            raise PreconditionError("wt(f) >= 1")
        if not m <= 4 * _log2n(f):
            raise PreconditionError("wt(f) <= 4 log n", f"wt(f) = {m}, 4 log2 n = {4 * _log2n(f):.4g}")
    return DecisionStrategy("partition", f, lambda: _partition(SubFunction.of(f), {}, _done))


def recursive_strategy(f: TruthTable, order_seed: int | None = None) -> DecisionStrategy:
    """Naive when ``wt >= n``; partition when ``wt <= 4 log n``; otherwise query
    ``ceil(log(m/log n) + log log(m/log n) + 3)`` variables and recurse."""
    if f.weight < 1:
        raise PreconditionError("wt(f) >= 1")
    order = _order_from_seed(f.n, order_seed)
    return DecisionStrategy("recursive", f, lambda: _recursive(SubFunction.of(f), {}, _done, order))


def sequential_or_strategy(f: TruthTable, parts: list[TruthTable], name="sequential-or",
                           inner: str = "naive") -> DecisionStrategy:
    """Evaluate ``f = OR(parts)`` one part at a time, short-circuiting on a 1.

    Each part is run on what remains of it after the answers so far; ``inner``
    selects the per-part procedure (``naive`` or ``ecs``).
    """
    proc = {"naive": _naive, "ecs": _ecs}[inner]
    subs = [SubFunction.of(p) for p in parts]
    for p in parts:
        if p.n != f.n:
            raise ValueError("parts must share f's variables")

    def run(i, ans):
        if i == len(subs):
            return Leaf(0)
        return proc(subs[i].fix_all(ans), ans, lambda val, a: Leaf(1) if val else run(i + 1, a))

    return DecisionStrategy(name, f, lambda: run(0, {}))


def dnf_term_strategy(f: TruthTable, terms, name="dnf-gates") -> DecisionStrategy:
    """Gate-by-gate DNF evaluation.

    ``terms`` is a list of ``(positive, negative)`` variable sets. Each term is
    an AND: its literals are queried in ascending variable order, skipping
    known variables, and the term is abandoned at the first false literal.
    The first true term ends with output 1.
    """
    lits = [sorted([(v, 1) for v in pos] + [(v, 0) for v in neg]) for pos, neg in terms]

    def term(i, j, ans):
        if i == len(lits):
            return Leaf(0)
        if j == len(lits[i]):
            return Leaf(1)
        v, want = lits[i][j]
        if v in ans:
            return term(i, j + 1, ans) if ans[v] == want else term(i + 1, 0, ans)
        return Query(v, lambda b: term(i, j + 1, {**ans, v: b}) if b == want
                     else term(i + 1, 0, {**ans, v: b}))

    return DecisionStrategy(name, f, lambda: term(0, 0, {}))


class RestrictionStrategy:
    """Query each variable independently with probability ``1 - p``, then run
    the depth-optimal tree of the remaining subfunction.

    The set of pre-queried variables is internal randomness: realization ``k``
    draws it from stream ``seed XOR k``.
    """

    name = "restriction"

    def __init__(self, f: TruthTable, p, seed: int = 0, limit: int | None = None):
        _check_limit(f, limit)
        p = Fraction(p)
        if not 0 <= p <= 1:
            raise ValueError("p must lie in [0, 1]")
        self.f = f
        self.p = p
        self.seed = seed

    def __repr__(self):
        return f"RestrictionStrategy(p={self.p}, seed={self.seed})"

    def queried_set(self, rng: np.random.Generator) -> tuple[int, ...]:
        u = rng.random(self.f.n)
        return tuple(int(i) + 1 for i in np.flatnonzero(u >= float(self.p)))

    def realize(self, stream: int = 0) -> DecisionStrategy:
        return self.with_queried(self.queried_set(make_rng(self.seed, stream)), f"restriction[{stream}]")

    def with_queried(self, chosen: tuple[int, ...], name: str = "restriction") -> DecisionStrategy:
        f = self.f
        n = f.n
        choice = worst_choice_lattice(f)

        def follow(state: tuple):
            axis = int(choice[state])
            if axis < 0:
                w, _, _, _ = _lattice(f)
                return Leaf(1 if w[state] else 0)
            return Query(axis + 1, lambda b: follow(state[:axis] + (b,) + state[axis + 1:]))

        def pre(i: int, state: tuple):
            if i == len(chosen):
                return follow(state)
            a = chosen[i] - 1
            return Query(a + 1, lambda b: pre(i + 1, state[:a] + (b,) + state[a + 1:]))

        return DecisionStrategy(name, f, lambda: pre(0, (2,) * n))

    def expected_cost(self) -> Fraction:
        """Exact expectation over inputs and the internal randomness."""
        f, p = self.f, self.p
        n = f.n
        _, free, size, _ = _lattice(f)
        total = worst_tree_cost_lattice(f)
        out = Fraction(0)
        q = (1 - p) / 2
        for k in range(n + 1):
            mask = free == k
            count = int(np.count_nonzero(mask))
            if not count:
                continue
            prob = p ** k * q ** (n - k)
            # (fixed count) * count + sum of within-subcube average costs
            out += prob * ((n - k) * count + Fraction(int(total[mask].sum()), 1 << k))
        return out

    def expected_depth_after(self) -> Fraction:
        """``E_rho[D(f|rho)]`` for ``rho ~ R_p``."""
        from .exact import depth_lattice
        f, p = self.f, self.p
        n = f.n
        _, free, _, _ = _lattice(f)
        depth = depth_lattice(f)
        q = (1 - p) / 2
        return sum((p ** k * q ** (n - k) * int(depth[free == k].sum()) for k in range(n + 1)),
                   Fraction(0))


def restriction_strategy(f: TruthTable, p, seed: int = 0) -> RestrictionStrategy:
    return RestrictionStrategy(f, p, seed)


# ---------------------------------------------------------------------------
# measurement

@dataclass(frozen=True)
class CostReport:
    strategy: str
    n: int
    mode: str
    exact: Fraction | None
    mean: float
    trials: int | None
    seed: int | None
    max_cost: int
    total: int | None = None

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "n": self.n,
            "mode": self.mode,
            "exact": None if self.exact is None else str(self.exact),
            "total": self.total,
            "mean": self.mean,
            "trials": self.trials,
            "seed": self.seed,
            "max_cost": self.max_cost,
        }


@dataclass(frozen=True)
class MonteCarlo:
    trials: int
    seed: int = 0


def _exact_walk(s: DecisionStrategy, f: TruthTable) -> tuple[int, int]:
    n = f.n
    total = 0
    worst = 0

    def walk(node, fsub: SubFunction, answers: dict, depth: int):
        nonlocal total, worst
        if isinstance(node, Leaf):
            if not fsub.constant or fsub.value != node.value:
                bad = int(np.flatnonzero(fsub.bits != node.value)[0])
                x = sum(b << (v - 1) for v, b in answers.items())
                x += sum(((bad >> q) & 1) << (v - 1) for q, v in enumerate(fsub.free))
                raise ZeroErrorViolation(s.name, x, int(f.bits[x]), node.value)
            total += depth << (n - depth)
            worst = max(worst, depth)
            return
        v = node.var
        if v in answers or not 1 <= v <= n:
            raise ZeroErrorViolation(s.name, None, None, f"invalid query x_{v}")
        for b in (0, 1):
            walk(node.branch(b), fsub.fix(v, b), {**answers, v: b}, depth + 1)

    walk(s.root(), SubFunction.of(f), {}, 0)
    return total, worst


def measure_cost(s, f: TruthTable | None = None, mode="exact", limit: int = MEASURE_LIMIT) -> CostReport:
    """Expected number of queries of ``s`` on uniform inputs of ``f``.

    ``mode`` is ``"exact"`` (every input) or ``MonteCarlo(trials, seed)``;
    trial ``k`` draws its input from stream ``seed XOR k``. Every evaluated
    input is checked against ``f``; a wrong output raises
    :class:`ZeroErrorViolation` naming the input.
    """
    f = s.f if f is None else f
    if isinstance(s, RestrictionStrategy):
        return _measure_restriction(s, f, mode)
    if mode == "exact":
        if f.n > limit:
            raise LimitExceeded(f"exact measurement limited to n <= {limit}")
        total, worst = _exact_walk(s, f)
        exact = ExactRational(total, f.n).value
        return CostReport(s.name, f.n, "exact", exact, float(exact), None, None, worst, total)
    if not isinstance(mode, MonteCarlo):
        raise ValueError(f"unknown measurement mode {mode!r}")
    costs = []
    for t in range(mode.trials):
        x = int(make_rng(mode.seed, t).integers(1 << f.n))
        out, cost = s.run(x)
        if out != f.bits[x]:
            raise ZeroErrorViolation(s.name, x, int(f.bits[x]), out)
        costs.append(cost)
    return CostReport(s.name, f.n, "monte_carlo", None, float(np.mean(costs)) if costs else 0.0,
                      mode.trials, mode.seed, max(costs, default=0))


def _measure_restriction(s: RestrictionStrategy, f: TruthTable, mode) -> CostReport:
    if mode == "exact":
        worst = 0
        for k in range(4):
            _, w = _exact_walk(s.realize(k), f)
            worst = max(worst, w)
        exact = s.expected_cost()
        return CostReport(s.name, f.n, "exact", exact, float(exact), None, s.seed, worst)
    costs = []
    for t in range(mode.trials):
        rng = make_rng(mode.seed, t)
        strat = s.with_queried(s.queried_set(rng))
        x = int(rng.integers(1 << f.n))
        out, cost = strat.run(x)
        if out != f.bits[x]:
            raise ZeroErrorViolation(strat.name, x, int(f.bits[x]), out)
        costs.append(cost)
    return CostReport(s.name, f.n, "monte_carlo", None, float(np.mean(costs)) if costs else 0.0,
                      mode.trials, mode.seed, max(costs, default=0))
