from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from avgquery.bfcore import (
    PathSpec, Restriction, TruthTable, as_index, black_points_lex, certificate_complexity,
    ecs_partition, format_table, index_to_input, min_certificate, parse_table, read_table,
    restrict, weight, write_table,
)
from avgquery.errors import LimitExceeded, ParseError, PreconditionError
from avgquery.families import make_named

from conftest import nonzero_tables, random_table, tables


def brute_certificate(f, x):
    """Smallest S such that every y agreeing with x on S has f(y) = f(x)."""
    n = f.n
    xi = as_index(x, n)
    for k in range(n + 1):
        for S in combinations(range(n), k):
            mask = sum(1 << i for i in S)
            if all(f.bits[y] == f.bits[xi] for y in range(1 << n) if (y ^ xi) & mask == 0):
                return k
    raise AssertionError


def test_index_convention():
    f = TruthTable.from_callable(3, lambda x: x[0] and not x[2])
    # x_1 is the least significant bit
    assert f.bits.tolist() == [0, 1, 0, 1, 0, 0, 0, 0]
    assert f((1, 0, 0)) == 1 and f(1) == 1
    assert index_to_input(6, 3) == (0, 1, 1)
    assert as_index((0, 1, 1), 3) == 6


def test_cube_axes_match_variables():
    f = random_table(4, 1)
    cube = f.cube()
    for i in range(16):
        assert cube[index_to_input(i, 4)] == f.bits[i]


def test_table_validation():
    with pytest.raises(ValueError):
        TruthTable(2, np.zeros(3))
    with pytest.raises(ValueError):
        TruthTable(1, np.array([0, 2]))
    with pytest.raises(LimitExceeded):
        TruthTable(25, np.zeros(1))
    f = random_table(3, 0)
    with pytest.raises(ValueError):
        f.bits[0] = 1


@given(tables())
def test_weight_counts_ones(f):
    assert weight(f) == sum(int(b) for b in f.bits)
    assert 0 <= f.weight <= 1 << f.n
    assert f.negate().weight == (1 << f.n) - f.weight


@given(tables(min_n=2), st.data())
def test_restrict_composes(f, data):
    n = f.n
    vars_ = data.draw(st.permutations(list(range(1, n + 1))))
    k1 = data.draw(st.integers(0, n))
    k2 = data.draw(st.integers(0, n - k1))
    vals = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    rho1 = Restriction(tuple((v, vals[v - 1]) for v in vars_[:k1]))
    rho2 = Restriction(tuple((v, vals[v - 1]) for v in vars_[k1:k1 + k2]))
    both = restrict(f, rho1 | rho2)
    # rho2 in the renumbered variables of f|rho1
    free = [v for v in range(1, n + 1) if v not in rho1.fixed]
    renamed = Restriction(tuple((free.index(v) + 1, b) for v, b in rho2.items))
    assert restrict(restrict(f, rho1), renamed) == both
    assert both.n == n - k1 - k2


@given(tables(max_n=4), st.data())
def test_restrict_matches_pointwise(f, data):
    n = f.n
    fixed = data.draw(st.dictionaries(st.integers(1, n), st.integers(0, 1)))
    sub = restrict(f, fixed)
    free = [v for v in range(1, n + 1) if v not in fixed]
    for j in range(1 << len(free)):
        x = [0] * n
        for v, b in fixed.items():
            x[v - 1] = b
        for q, v in enumerate(free):
            x[v - 1] = (j >> q) & 1
        assert sub.bits[j] == f(tuple(x))


def test_restriction_type():
    r = Restriction.of({3: 1, 1: 0})
    assert r.fixed == {1, 3} and r.values == {1: 0, 3: 1} and len(r) == 2
    assert Restriction.of(x2=1).values == {2: 1}
    with pytest.raises(ValueError):
        Restriction(((1, 0), (1, 1)))
    with pytest.raises(ValueError):
        r | Restriction.of({1: 1})
    with pytest.raises(ValueError):
        Restriction(((1, 2),))


def test_path_prefix():
    p = PathSpec(((3, 1), (1, 0), (2, 1)))
    assert p.prefix(0) == Restriction()
    assert p.prefix(2).values == {3: 1, 1: 0}
    with pytest.raises(ValueError):
        PathSpec(((1, 0), (1, 1)))


def test_permute_and_flip():
    f = TruthTable.from_callable(3, lambda x: x[0] and not x[1])
    g = f.permute([2, 3, 1])  # old x1 -> new x2, old x2 -> new x3
    assert g == TruthTable.from_callable(3, lambda x: x[1] and not x[2])
    h = f.flip_input(2)
    assert h == TruthTable.from_callable(3, lambda x: x[0] and x[1])


def test_black_points_lex_order():
    f = TruthTable.from_ones(3, [0b001, 0b110, 0b100])
    X = black_points_lex(f)
    rows = [tuple(r) for r in X]
    assert rows == sorted(rows)
    assert set(rows) == {(1, 0, 0), (0, 1, 1), (0, 0, 1)}


@given(nonzero_tables())
def test_ecs_partition_matches_grouping(f):
    part = ecs_partition(f)
    X = black_points_lex(f)
    cols = [tuple(X[:, i]) for i in range(f.n)]
    for i in range(1, f.n + 1):
        for j in range(1, f.n + 1):
            same = cols[i - 1] == cols[j - 1]
            comp = cols[i - 1] == tuple(1 - b for b in cols[j - 1])
            assert (part.class_index(i) == part.class_index(j)) == (same or comp)
            if same:
                assert part.correlation(i, j) == 1
            elif comp:
                assert part.correlation(i, j) == -1
            else:
                assert part.correlation(i, j) == 0
    assert sorted(v for c in part.classes for v in c) == list(range(1, f.n + 1))
    for c, pure in zip(part.classes, part.pure):
        assert pure == (len(set(cols[c[0] - 1])) == 1)


def test_ecs_examples():
    f = make_named("point", 4, 0b0101)
    part = ecs_partition(f)
    assert part.classes == ((1, 2, 3, 4),) and part.pure == (True,)
    assert part.correlation(1, 2) == -1 and part.correlation(1, 3) == 1
    with pytest.raises(PreconditionError):
        ecs_partition(TruthTable.constant(3, 0))


@given(tables(max_n=4), st.data())
def test_certificate_complexity_oracle(f, data):
    x = data.draw(st.integers(0, (1 << f.n) - 1))
    assert certificate_complexity(f, x) == brute_certificate(f, x)


@given(tables(max_n=4))
def test_min_certificate_is_min_over_inputs(f):
    assert min_certificate(f) == min(certificate_complexity(f, x) for x in range(1 << f.n))


def test_certificate_examples():
    assert min_certificate(make_named("xor", 3)) == 3
    assert min_certificate(make_named("and", 3)) == 1
    assert certificate_complexity(make_named("and", 3), (0, 1, 1)) == 1
    assert certificate_complexity(make_named("and", 3), (1, 1, 1)) == 3
    assert min_certificate(TruthTable.constant(4, 1)) == 0


def test_min_certificate_random_larger():
    for seed in range(3):
        f = random_table(9, seed, density=0.1)
        assert min_certificate(f) == min(certificate_complexity(f, x) for x in range(1 << 9))


@given(tables(max_n=6))
def test_table_text_round_trip(f):
    assert parse_table(format_table(f)) == f
    assert parse_table(format_table(f, "hex")) == f


def test_hex_layout():
    f = TruthTable(3, np.array([1, 0, 0, 0, 0, 0, 0, 1], dtype=np.uint8))
    assert format_table(f, "hex") == "3\nhex:81\n"
    g = TruthTable(1, np.array([1, 1], dtype=np.uint8))
    assert format_table(g, "hex") == "1\nhex:C\n"
    assert parse_table("1\nhex:C\n") == g


def test_large_tables_default_to_hex():
    f = random_table(17, 0)
    assert format_table(f).split("\n")[1].startswith("hex:")


@pytest.mark.parametrize("text,line", [
    ("x\n0101\n", 1),
    ("2\n010\n", 2),
    ("2\n01a1\n", 2),
    ("2\n0101\nextra\n", 3),
    ("3\nhex:8G\n", 2),
    ("1\nhex:D\n", 2),
])
def test_parse_errors_name_line(text, line):
    with pytest.raises(ParseError) as e:
        parse_table(text)
    assert e.value.line == line


def test_parse_error_column():
    with pytest.raises(ParseError) as e:
        parse_table("2\n01a1\n")
    assert e.value.column == 3


def test_file_round_trip(tmp_path):
    f = random_table(5, 3)
    write_table(f, tmp_path / "f.tt")
    assert read_table(tmp_path / "f.tt") == f


def test_all_two_variable_functions_distinct():
    tabs = {TruthTable(2, np.array(b, dtype=np.uint8)) for b in product((0, 1), repeat=4)}
    assert len(tabs) == 16
