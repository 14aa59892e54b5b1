import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxrefactor.pb import lower_pb


def _lower(n, bound, guarded, weights=None):
    counter = itertools.count(n + 2)
    lits = list(range(1, n + 1))
    guard = n + 1 if guarded else None
    clauses = lower_pb(lits, bound, guard, lambda: next(counter), weights)
    return lits, guard, clauses, next(counter) - 1


def _projected_models(nvars, clauses, shown):
    """Assignments of ``shown`` that extend to a model of ``clauses`` (brute force)."""
    out = set()
    for bits in itertools.product((False, True), repeat=nvars):
        val = lambda l: bits[abs(l) - 1] == (l > 0)  # noqa: E731
        if all(any(val(l) for l in cl) for cl in clauses):
            out.add(tuple(bits[v - 1] for v in shown))
    return out


@settings(max_examples=80, deadline=None)
@given(
    st.integers(1, 5),
    st.integers(0, 6),
    st.booleans(),
    st.data(),
)
def test_lowering_matches_bruteforce(n, bound, guarded, data):
    weights = data.draw(st.lists(st.integers(1, 3), min_size=n, max_size=n))
    lits, guard, clauses, top = _lower(n, bound, guarded, weights)
    shown = lits + ([guard] if guard else [])
    got = _projected_models(top, clauses, shown)
    want = set()
    for bits in itertools.product((False, True), repeat=len(shown)):
        active = bits[-1] if guarded else True
        total = sum(w for w, b in zip(weights, bits[:n]) if b)
        if not active or total <= bound:
            want.add(bits)
    assert got == want


def test_at_most_one_of_two_is_a_single_clause():
    lits, guard, clauses, _ = _lower(2, 1, True)
    assert clauses == [[-guard, -1, -2]]


def test_single_literal_within_bound_needs_nothing():
    assert lower_pb([7], 1, 9, lambda: 100) == []


def test_single_literal_over_bound():
    assert lower_pb([7], 0, 9, lambda: 100) == [[-9, -7]]


def test_bad_arguments():
    with pytest.raises(ValueError):
        lower_pb([1, 2], -1, None, lambda: 3)
    with pytest.raises(ValueError):
        lower_pb([1, 2], 1, None, lambda: 3, weights=[1])
    with pytest.raises(ValueError):
        lower_pb([1, 2], 1, None, lambda: 3, weights=[1, 0])
