import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from avgquery.bfcore import TruthTable
from avgquery.errors import LimitExceeded, PreconditionError, ZeroErrorViolation
from avgquery.exact import dave_exact, depth_lattice, _lattice
from avgquery.families import make_named
from avgquery.randgen import sample_fixed_weight
from avgquery.strategies import (
    DecisionStrategy, Leaf, MonteCarlo, Query, RestrictionStrategy, dnf_term_strategy,
    ecs_strategy, measure_cost, naive_strategy, partition_strategy, recursive_query_count,
    recursive_strategy, restriction_strategy, sequential_or_strategy,
)

from conftest import nonzero_tables, random_table, tables


def replay_cost(s, f):
    """Average cost by running every input separately."""
    total = 0
    for x in range(1 << f.n):
        out, cost = s.run(x)
        assert out == f.bits[x]
        total += cost
    return Fraction(total, 1 << f.n)


@given(nonzero_tables(max_n=6))
def test_zero_error_and_replay_agree(f):
    for s in (naive_strategy(f), naive_strategy(f, order_seed=3), recursive_strategy(f),
              partition_strategy(f, check=False)):
        rep = measure_cost(s, f)
        assert rep.exact == replay_cost(s, f)
        assert rep.exact >= dave_exact(f)
        assert s.materialize().computes(f)


def test_naive_examples():
    assert measure_cost(naive_strategy(make_named("and", 2))).exact == Fraction(3, 2)
    for n in (1, 4, 7):
        assert measure_cost(naive_strategy(make_named("xor", n))).exact == n
    zero = TruthTable.constant(5, 0)
    assert measure_cost(naive_strategy(zero)).exact == 0
    assert measure_cost(recursive_strategy(TruthTable.constant(5, 1))).exact == 0


def test_naive_skips_ignored_variables():
    f = TruthTable.from_callable(4, lambda x: x[3])
    assert measure_cost(naive_strategy(f)).exact == 1


@given(nonzero_tables(min_n=2, max_n=8))
def test_naive_weight_bound(f):
    assert measure_cost(naive_strategy(f)).exact <= math.log2(f.weight) + 2


def test_ecs_precondition():
    with pytest.raises(PreconditionError) as e:
        ecs_strategy(sample_fixed_weight(8, 3, 0))
    assert e.value.hypothesis == "wt(f) < log n"
    with pytest.raises(PreconditionError):
        ecs_strategy(TruthTable.constant(8, 0))
    with pytest.raises(PreconditionError) as e:
        partition_strategy(sample_fixed_weight(8, 13, 0))
    assert e.value.hypothesis == "wt(f) <= 4 log n"


def test_ecs_weight_one_matches_closed_form():
    for n in (5, 9):
        f = make_named("point", n, 0b10110 % (1 << n))
        assert measure_cost(ecs_strategy(f)).exact == 2 * (1 - Fraction(1, 1 << n))


@pytest.mark.parametrize("seed", range(12))
def test_ecs_small_weight(seed):
    n = 16
    m = 1 + seed % 3
    f = sample_fixed_weight(n, m, seed)
    assert measure_cost(ecs_strategy(f)).exact <= 5


def test_ecs_on_small_instances_matches_replay():
    for seed in range(4):
        f = sample_fixed_weight(9, 2 + seed % 2, seed)
        s = ecs_strategy(f)
        assert measure_cost(s).exact == replay_cost(s, f)


def test_partition_singletons():
    f = sample_fixed_weight(16, 8, 4)
    rep = measure_cost(partition_strategy(f))
    assert rep.exact <= 8 * 2


def test_recursive_query_count():
    assert recursive_query_count(2 ** 15, 16) == math.ceil(13 + math.log2(13) + 3)


def test_recursive_large_weight_branch():
    f = sample_fixed_weight(12, 40, 0)  # m >= n: hands over to naive
    rep = measure_cost(recursive_strategy(f))
    assert rep.exact == measure_cost(naive_strategy(f)).exact


def test_recursive_middle_branch():
    # 4 log2(20) ~ 17.3 < m = 18 < n: query a prefix, then recurse
    n, m = 20, 18
    f = sample_fixed_weight(n, m, 1)
    rep = measure_cost(recursive_strategy(f), f, MonteCarlo(500, 5))
    r = m / math.log2(n)
    assert rep.mean <= math.log2(r) + math.log2(math.log2(r)) + 87


def test_sequential_or_and_dnf_gates():
    a = TruthTable.from_callable(4, lambda x: x[0] and x[1])
    b = TruthTable.from_callable(4, lambda x: x[2] and not x[3])
    f = TruthTable(4, a.bits | b.bits)
    s = sequential_or_strategy(f, [a, b])
    assert measure_cost(s).exact == replay_cost(s, f)
    g = dnf_term_strategy(f, [({1, 2}, set()), ({3}, {4})])
    # first term: 1.5 queries; second reached w.p. 3/4 and costs 1.5
    assert measure_cost(g).exact == Fraction(3, 2) + Fraction(3, 4) * Fraction(3, 2)
    with pytest.raises(ValueError):
        sequential_or_strategy(f, [make_named("and", 3)])


def test_zero_error_violation_names_witness():
    f = make_named("and", 3)
    bad = DecisionStrategy("liar", f, lambda: Query(1, lambda b: Leaf(b)))
    with pytest.raises(ZeroErrorViolation) as e:
        measure_cost(bad)
    assert f.bits[e.value.witness] != e.value.got
    with pytest.raises(ZeroErrorViolation):
        measure_cost(bad, mode=MonteCarlo(50, 0))
    repeat = DecisionStrategy("repeat", f, lambda: Query(1, lambda b: Query(1, lambda c: Leaf(0))))
    with pytest.raises(ZeroErrorViolation):
        measure_cost(repeat)


def test_measure_limit():
    with pytest.raises(LimitExceeded):
        measure_cost(naive_strategy(make_named("and", 6)), limit=5)


def test_monte_carlo_close_to_exact():
    f = random_table(10, 8)
    s = naive_strategy(f)
    exact = measure_cost(s).exact
    trials = 4000
    mc = measure_cost(s, mode=MonteCarlo(trials, 11))
    assert abs(mc.mean - float(exact)) <= 3 * math.sqrt(100 / trials)
    again = measure_cost(s, mode=MonteCarlo(trials, 11))
    assert again.mean == mc.mean


def restriction_oracle(f, p):
    """Average over every pre-query set, each measured exactly."""
    rs = RestrictionStrategy(f, p)
    n = f.n
    total = Fraction(0)
    for k in range(n + 1):
        for chosen in combinations(range(1, n + 1), k):
            prob = (1 - p) ** k * p ** (n - k)
            total += prob * measure_cost(rs.with_queried(chosen), f).exact
    return total


@given(tables(max_n=4), st.sampled_from([Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1)]))
def test_restriction_expected_cost_oracle(f, p):
    rs = restriction_strategy(f, p)
    assert rs.expected_cost() == restriction_oracle(f, p)
    assert rs.expected_cost() <= f.n * (1 - p) + rs.expected_depth_after()


@pytest.mark.parametrize("p", [Fraction(0), Fraction(1, 4), Fraction(2, 3), Fraction(1)])
def test_restriction_examples(p):
    assert restriction_strategy(make_named("xor", 5), p).expected_cost() == 5
    const = TruthTable.constant(5, 0)
    assert restriction_strategy(const, p).expected_cost() == 5 * (1 - p)


def test_restriction_monte_carlo():
    f = sample_fixed_weight(10, 100, 0)
    rs = restriction_strategy(f, Fraction(1, 4), seed=3)
    exact = measure_cost(rs)
    assert exact.exact == rs.expected_cost()
    mc = measure_cost(rs, mode=MonteCarlo(3000, 1))
    assert abs(mc.mean - float(exact.exact)) <= 3 * math.sqrt(100 / 3000)
    realized = rs.realize(2)
    assert realized.materialize().computes(f)


def test_expected_depth_after_matches_enumeration():
    f = random_table(4, 2)
    p = Fraction(1, 3)
    _, free, _, _ = _lattice(f)
    depth = depth_lattice(f)
    want = Fraction(0)
    for idx in np.ndindex(*depth.shape):
        k = int(free[idx])
        want += p ** k * ((1 - p) / 2) ** (4 - k) * int(depth[idx])
    assert restriction_strategy(f, p).expected_depth_after() == want


def test_restriction_limit_and_domain():
    with pytest.raises(LimitExceeded):
        RestrictionStrategy(random_table(15, 0), Fraction(1, 2))
    with pytest.raises(ValueError):
        RestrictionStrategy(random_table(3, 0), Fraction(3, 2))


def test_cost_report_dict():
    rep = measure_cost(naive_strategy(make_named("and", 2)))
    d = rep.as_dict()
    assert d["exact"] == "3/2" and d["mode"] == "exact" and d["max_cost"] == 2
