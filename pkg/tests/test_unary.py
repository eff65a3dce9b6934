import pytest
from hypothesis import given, settings, strategies as st

from app.errors import ExpressionSyntaxError
from app.unary import (
    EMPTY,
    Concat,
    Pow,
    Star,
    Union,
    compile_guard,
    denote,
    format_expr,
    intersects_from,
    member,
    multiples,
    normalize,
    parse_expr,
    shift,
    singleton,
    tail_cycle,
)

LIMIT = 500


def brute_force(e, limit: int = LIMIT) -> set[int]:
    """Members up to ``limit`` by direct enumeration of the expression."""
    if isinstance(e, Pow):
        return {e.n} if e.n <= limit else set()
    if isinstance(e, Star):
        return set(range(0, limit + 1, e.p))
    if isinstance(e, Concat):
        found = {0}
        for part in e.parts:
            other = brute_force(part, limit)
            found = {a + b for a in found for b in other if a + b <= limit}
        return found
    return set().union(*(brute_force(a, limit) for a in e.alternatives))


atoms = st.one_of(st.builds(Pow, st.integers(1, 7)), st.builds(Star, st.integers(1, 6)))
expressions = st.recursive(
    atoms,
    lambda children: st.one_of(
        st.builds(Concat, st.lists(children, min_size=2, max_size=3).map(tuple)),
        st.builds(Union, st.lists(children, min_size=2, max_size=3).map(tuple)),
    ),
    max_leaves=6,
)


def test_parse_builds_concat_of_pow_and_star():
    assert parse_expr("s^2(s^16)*") == Concat((Pow(2), Star(16)))
    assert parse_expr("s") == Pow(1)
    assert parse_expr("(s)*") == Star(1)


def test_parse_union():
    assert parse_expr("s | s^3") == Union((Pow(1), Pow(3)))


@pytest.mark.parametrize("text", ["s^", "s^0", "(s^2)", "t", "s^2)*", ""])
def test_malformed_expressions_raise(text):
    with pytest.raises(ExpressionSyntaxError):
        parse_expr(text)


def test_exponent_zero_reports_position():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expr("s^0")
    assert info.value.column == 3


def test_format_is_parsed_back():
    for text in ["s^2(s^16)*", "(s)*", "s | s^3", "s^16(s^16)*s^5"]:
        assert format_expr(parse_expr(text)) == text


def test_offset_multiples():
    guard = compile_guard("s^2(s^16)*")
    assert [k for k in range(60) if member(guard, k)] == [2, 18, 34, 50]


def test_denotation_is_extensional():
    assert compile_guard("s^2(s^16)*").members_upto(100) == compile_guard("(s^16)*s^2").members_upto(100)


def test_canonical_offset_multiples():
    # {2, 18, 34, ...} is the residue class 2 mod 16, so no prefix is needed
    guard = compile_guard("s^2(s^16)*")
    assert (guard.threshold, guard.period, guard.prefix) == (0, 16, ())
    assert [j for j, bit in enumerate(guard.cycle) if bit] == [2]


def test_canonical_universal_and_finite_sets():
    everything = compile_guard("(s)*")
    assert (everything.threshold, everything.period, everything.cycle) == (0, 1, (True,))
    pair = compile_guard("s^3 | s^5")
    assert (pair.threshold, pair.period, pair.cycle) == (6, 1, (False,))
    assert pair.members_upto(20) == [3, 5]


def test_sum_of_three_and_five_multiples():
    semigroup = normalize([multiples(3), multiples(5)], "sum")
    assert (semigroup.threshold, semigroup.period, semigroup.cycle) == (8, 1, (True,))
    assert semigroup.members_upto(12) == [0, 3, 5, 6, 8, 9, 10, 11, 12]


@settings(max_examples=100, deadline=None)
@given(st.lists(expressions, min_size=1, max_size=3))
def test_normalize_is_idempotent(es):
    sets = [denote(e) for e in es]
    once = normalize(sets, "union")
    assert normalize([once], "union") == once
    assert normalize([normalize(sets, "sum")], "sum") == normalize(sets, "sum")


def test_singleton_and_shift():
    assert singleton(3).members_upto(10) == [3]
    assert shift(compile_guard("(s^4)*"), 1).members_upto(12) == [1, 5, 9]
    assert shift(EMPTY, 4).is_empty()


def test_intersections_above_a_floor():
    a = compile_guard("(s^16)*s^5")
    b = compile_guard("s^5")
    assert intersects_from(a, b, 1)
    assert not intersects_from(a, b, 6)
    assert not intersects_from(compile_guard("(s^2)*"), compile_guard("(s^2)*s"), 0)


def test_tail_cycle_for_odd_counts():
    cycle = tail_cycle(compile_guard("(s^2)*s"), 2)
    assert (cycle.x, cycle.y) == (3, 4)
    assert cycle.accepts == frozenset({4})
    assert [k for k in range(12) if cycle.accepts_count(k)] == [3, 5, 7, 9, 11]


@settings(max_examples=100, deadline=None)
@given(expressions)
def test_membership_matches_enumeration(e):
    expected = brute_force(e)
    denoted = denote(e)
    assert {k for k in range(LIMIT + 1) if member(denoted, k)} == expected


@settings(max_examples=60, deadline=None)
@given(expressions, st.integers(1, 8))
def test_tail_cycle_accepts_guard_above_consumption(e, b):
    guard = denote(e)
    cycle = tail_cycle(guard, b)
    assert cycle.x > b
    for k in range(120):
        assert cycle.accepts_count(k) == (k >= b and member(guard, k))
        assert cycle.run(k) == cycle.state_after(k)
