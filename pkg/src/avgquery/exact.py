"""Exact optimal query quantities by dynamic programming over restrictions.

Every restriction of an ``n``-variable function is a cell of an array with
shape ``(3,)*n``: along axis ``i`` index 0/1 fixes ``x_{i+1}`` and index 2
leaves it free. Quantities are filled in by sweeping that array ``n`` times;
after sweep ``k`` every restriction with at most ``k`` free variables holds its
final value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering

import numpy as np

from .bfcore import TruthTable
from .errors import LimitExceeded

DP_LIMIT = 14
BRUTE_FORCE_LIMIT = 3


@total_ordering
@dataclass(frozen=True, eq=False)
class ExactRational:
    """``numerator / 2**exponent`` with exact comparison against numbers."""

    numerator: int
    exponent: int

    @property
    def denominator(self) -> int:
        return 1 << self.exponent

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __float__(self):
        return self.numerator / self.denominator

    def _coerce(self, other):
        if isinstance(other, ExactRational):
            return other.value
        if isinstance(other, (int, Fraction)):
            return Fraction(other)
        if isinstance(other, float):
            return Fraction(other)
        return None

    def __eq__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self.value == o

    def __lt__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self.value < o

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"

    def decimal(self, digits: int = 12) -> str:
        return f"{float(self):.{digits}g}"


@dataclass(frozen=True)
class DecisionTreeNode:
    """Leaf when ``var`` is None (output ``value``), else a query on ``x_var``."""

    var: int | None = None
    value: int | None = None
    zero: "DecisionTreeNode | None" = None
    one: "DecisionTreeNode | None" = None

    @classmethod
    def leaf(cls, value: int) -> "DecisionTreeNode":
        return cls(value=int(value))

    @classmethod
    def internal(cls, var, zero, one) -> "DecisionTreeNode":
        return cls(var=var, zero=zero, one=one)

    @property
    def is_leaf(self) -> bool:
        return self.var is None

    def evaluate(self, x: int) -> tuple[int, int]:
        """Return ``(output, cost)`` on table index ``x``."""
        node, cost = self, 0
        while not node.is_leaf:
            node = node.one if (x >> (node.var - 1)) & 1 else node.zero
            cost += 1
        return node.value, cost

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.zero.depth(), self.one.depth())

    def leaves(self) -> int:
        if self.is_leaf:
            return 1
        return self.zero.leaves() + self.one.leaves()

    def total_cost(self, n: int) -> int:
        """Sum of ``cost(T, x)`` over all ``2^n`` inputs."""
        def walk(node, d):
            if node.is_leaf:
                return d << (n - d)
            return walk(node.zero, d + 1) + walk(node.one, d + 1)
        return walk(self, 0)

    def computes(self, f: TruthTable) -> bool:
        return all(self.evaluate(x)[0] == f.bits[x] for x in range(1 << f.n))


def _check_limit(f: TruthTable, limit: int | None):
    limit = DP_LIMIT if limit is None else limit
    if f.n > limit:
        raise LimitExceeded(f"n = {f.n} exceeds the DP limit {limit}")


def _axis(n: int, axis: int, k) -> tuple:
    # trailing Ellipsis keeps 1-variable slices as writable 0-d views
    return (slice(None),) * axis + (k, Ellipsis)


@lru_cache(maxsize=4)
def _lattice(f: TruthTable):
    """Weights, free-variable counts and constancy of every restriction."""
    n = f.n
    w = f.cube().astype(np.int64)
    for axis in range(n):
        w = np.concatenate([w, w.sum(axis=axis, keepdims=True)], axis=axis)
    free = np.zeros((3,) * n, dtype=np.int64)
    for axis in range(n):
        shape = [1] * n
        shape[axis] = 3
        free = free + (np.arange(3) == 2).astype(np.int64).reshape(shape)
    size = np.left_shift(1, free)
    const = (w == 0) | (w == size)
    for arr in (w, free, size, const):
        arr.flags.writeable = False
    return w, free, size, const


def _sweep(f: TruthTable, base, combine, step):
    """Generic restriction-lattice DP.

    ``base``: values on constant restrictions. ``combine(a0, a1)``: merge the
    two children along one free axis. ``step(best)``: value from the best
    (minimum) combined candidate.
    """
    n = f.n
    _, _, _, const = _lattice(f)
    table = np.where(const, base, 0).astype(np.int64)
    big = np.iinfo(np.int64).max
    for _ in range(n):
        best = np.full(table.shape, big, dtype=np.int64)
        for axis in range(n):
            cand = combine(table[_axis(n, axis, 0)], table[_axis(n, axis, 1)])
            view = best[_axis(n, axis, 2)]
            np.minimum(view, cand, out=view)
        new = np.where(const, base, step(best))
        if np.array_equal(new, table):
            break
        table = new
    table.flags.writeable = False
    return table


@lru_cache(maxsize=4)
def cost_lattice(f: TruthTable) -> np.ndarray:
    """Optimal total cost (summed over the restriction's inputs) per restriction."""
    _, _, size, _ = _lattice(f)
    return _sweep(f, 0, np.add, lambda best: best + size)


@lru_cache(maxsize=4)
def depth_lattice(f: TruthTable) -> np.ndarray:
    """``D(f|rho)`` for every restriction ``rho``."""
    return _sweep(f, 0, np.maximum, lambda best: best + 1)


@lru_cache(maxsize=4)
def size_lattice(f: TruthTable) -> np.ndarray:
    """Minimum leaf count of a tree for ``f|rho``, per restriction."""
    return _sweep(f, 1, np.add, lambda best: best)


def root_index(n: int) -> tuple:
    return (2,) * n


def dave_exact(f: TruthTable, limit: int | None = None) -> ExactRational:
    """Exact ``D_ave(f)`` under the uniform distribution."""
    _check_limit(f, limit)
    return ExactRational(int(cost_lattice(f)[root_index(f.n)]), f.n)


def worst_depth(f: TruthTable, limit: int | None = None) -> int:
    _check_limit(f, limit)
    return int(depth_lattice(f)[root_index(f.n)])


def dtsize_min(f: TruthTable, limit: int | None = None) -> int:
    _check_limit(f, limit)
    return int(size_lattice(f)[root_index(f.n)])


def optimal_tree(f: TruthTable, limit: int | None = None) -> DecisionTreeNode:
    """A tree attaining ``dave_exact``; ties go to the lowest variable index."""
    _check_limit(f, limit)
    w, _, _, const = _lattice(f)
    cost = cost_lattice(f)

    def build(state: list[int]) -> DecisionTreeNode:
        key = tuple(state)
        if const[key]:
            return DecisionTreeNode.leaf(1 if w[key] else 0)
        best, best_axis = None, None
        for axis, digit in enumerate(state):
            if digit != 2:
                continue
            state[axis] = 0
            c0 = cost[tuple(state)]
            state[axis] = 1
            c = c0 + cost[tuple(state)]
            state[axis] = 2
            if best is None or c < best:
                best, best_axis = c, axis
        state[best_axis] = 0
        zero = build(state)
        state[best_axis] = 1
        one = build(state)
        state[best_axis] = 2
        return DecisionTreeNode.internal(best_axis + 1, zero, one)

    return build([2] * f.n)


@lru_cache(maxsize=4)
def worst_choice_lattice(f: TruthTable) -> np.ndarray:
    """Axis queried first by the depth-optimal tree at each restriction (-1 if constant).

    Ties go to the lowest variable index.
    """
    n = f.n
    depth = depth_lattice(f)
    _, _, _, const = _lattice(f)
    best = np.full(depth.shape, np.iinfo(np.int64).max, dtype=np.int64)
    choice = np.full(depth.shape, -1, dtype=np.int64)
    for axis in range(n):
        cand = np.maximum(depth[_axis(n, axis, 0)], depth[_axis(n, axis, 1)])
        bview = best[_axis(n, axis, 2)]
        cview = choice[_axis(n, axis, 2)]
        better = cand < bview
        bview[better] = cand[better]
        cview[better] = axis
    choice[const] = -1
    choice.flags.writeable = False
    return choice


@lru_cache(maxsize=4)
def worst_tree_cost_lattice(f: TruthTable) -> np.ndarray:
    """Total cost of the depth-optimal tree (tie-broken as above) per restriction."""
    n = f.n
    _, _, size, const = _lattice(f)
    choice = worst_choice_lattice(f)
    table = np.zeros(const.shape, dtype=np.int64)
    for _ in range(n):
        new = np.zeros_like(table)
        for axis in range(n):
            cand = table[_axis(n, axis, 0)] + table[_axis(n, axis, 1)]
            view = new[_axis(n, axis, 2)]
            sel = choice[_axis(n, axis, 2)] == axis
            view[sel] = cand[sel]
        new = np.where(const, 0, new + size)
        if np.array_equal(new, table):
            break
        table = new
    table.flags.writeable = False
    return table


def brute_force_dave(f: TruthTable) -> ExactRational:
    """Minimum average cost over every reasonable decision tree (n <= 3).

    Trees are enumerated explicitly and each is evaluated on all inputs; no
    memoization is shared with :func:`dave_exact`.
    """
    if f.n > BRUTE_FORCE_LIMIT:
        raise LimitExceeded(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}")
    n = f.n

    def consistent(fixed: dict[int, int]) -> list[int]:
        return [x for x in range(1 << n)
                if all(((x >> (v - 1)) & 1) == b for v, b in fixed.items())]

    def all_trees(fixed: dict[int, int]):
        outs = {int(f.bits[x]) for x in consistent(fixed)}
        if len(outs) == 1:
            yield DecisionTreeNode.leaf(outs.pop())
            return
        for v in range(1, n + 1):
            if v in fixed:
                continue
            zeros = list(all_trees({**fixed, v: 0}))
            ones = list(all_trees({**fixed, v: 1}))
            for t0, t1 in itertools.product(zeros, ones):
                yield DecisionTreeNode.internal(v, t0, t1)

    best = None
    for tree in all_trees({}):
        total = 0
        for x in range(1 << n):
            out, cost = tree.evaluate(x)
            assert out == f.bits[x]
            total += cost
        best = total if best is None else min(best, total)
    return ExactRational(best, n)
