import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxrefactor import fixtures
from maxrefactor.logic import (
    ArityError,
    LinearAuxRule,
    Literal,
    ParseError,
    Program,
    Rule,
    UnfoldError,
    alpha_equal,
    alpha_equal_modulo_aux,
    check_invented,
    first_mismatch,
    format_program,
    format_rule,
    linearize,
    parse_program,
    parse_rule,
    predicates,
    program_size,
    relinearize_literal,
    unfold,
    unfold_all,
)

from .strategies import programs


def test_parse_p1():
    p = fixtures.p1()
    assert len(p) == 4
    assert program_size(p) == 20
    assert p[0].head == Literal("g", (0,))
    assert p[0].body[1] == Literal("q", (0, 1))


def test_sizes_of_intro_programs():
    assert fixtures.p2().size == 18
    assert fixtures.p3().size == 16
    assert fixtures.q1().size == 30
    assert fixtures.q2().size == 22


def test_zero_arity_and_facts():
    p = parse_program("p :- q1, q2.\nfact.\n")
    assert p[0].body == (Literal("q1"), Literal("q2"))
    assert p[1].body == ()
    assert program_size(p) == 4
    assert format_program(p) == "p :- q1, q2.\nfact.\n"


def test_comments_and_multiline():
    p = parse_program("% header\ng(A) :-\n  p(A), % trailing\n  q(A,B).\n")
    assert len(p) == 1 and len(p[0].body) == 2


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("g(A) :- p(a).", 1, 11),
        ("g(A) :- p(f(A)).", 1, 11),
        ("g(A) :- p(A)\n", 2, 1),
        ("g(A) :- p(A) ; q(A).", 1, 14),
        ("g(A) :- 3.", 1, 9),
    ],
)
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_program(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_constant_message():
    with pytest.raises(ParseError, match="constant"):
        parse_program("g(A) :- p(a).")


def test_arity_mismatch():
    with pytest.raises(ArityError):
        parse_program("g(A) :- p(A), p(A,B).")


def test_duplicate_body_literal_dropped_with_warning():
    with pytest.warns(UserWarning, match="duplicate"):
        p = parse_program("g(A) :- p(A), p(A), q(A).")
    assert program_size(p) == 3


def test_canonical_variable_names():
    r = parse_rule("g(X) :- p(Y), q(X, Y).")
    assert format_rule(r) == "g(V0) :- p(V1), q(V0,V1)."


def test_predicates_excludes_head_only():
    assert predicates(fixtures.p1()) == {"p": 1, "q": 2, "r": 1, "s": 2, "t": 2, "w": 2, "z": 2}
    assert predicates(Program(())) == {}


def test_unfold_example():
    p = parse_program(fixtures.UNFOLD_INPUT_TEXT)
    r = parse_rule(fixtures.UNFOLD_RULE_TEXT)
    assert alpha_equal(unfold(p, r), parse_program(fixtures.UNFOLD_RESULT_TEXT))


def test_unfold_rejects_body_only_variables():
    with pytest.raises(UnfoldError):
        unfold(fixtures.p1(), parse_rule("aux(A) :- p(A), q(A,B)."))


def test_unfold_leaves_other_rules():
    p = parse_program("g(A) :- p(A).\n")
    assert unfold(p, parse_rule("aux(A) :- q(A).")) == p


def _split(program, name):
    inv = [r for r in program if r.head.predicate == name]
    rest = [r for r in program if r.head.predicate != name]
    return rest, inv


@pytest.mark.parametrize(
    "refactored, name, original",
    [(fixtures.p2, "aux1", fixtures.p1), (fixtures.p3, "aux2", fixtures.p1), (fixtures.q2, "aux3", fixtures.q1)],
)
def test_intro_refactorings_unfold_to_input(refactored, name, original):
    rest, inv = _split(refactored(), name)
    assert alpha_equal(unfold_all(rest, inv), original())


def test_unfold_all_rejects_aux_calling_aux():
    rules = [parse_rule("a1(A) :- a2(A)."), parse_rule("a2(A) :- p(A).")]
    with pytest.raises(UnfoldError):
        unfold_all(parse_program("g(A) :- a1(A)."), rules)


def test_alpha_equal_examples():
    p1 = fixtures.p1()
    renamed = parse_program(fixtures.P1_TEXT.replace("A", "X").replace("B", "A").replace("X", "B"))
    assert alpha_equal(p1, renamed)
    assert not alpha_equal(p1, fixtures.p2())
    assert alpha_equal(parse_program("g(A) :- p(A), q(A)."), parse_program("g(A) :- q(A), p(A)."))


def test_alpha_equal_distinguishes_variable_patterns():
    with pytest.warns(UserWarning, match="duplicate"):
        single = parse_program("g(A) :- q(A,B), q(A,B).")
    assert not alpha_equal(parse_program("g(A) :- q(A,B), q(B,A)."), single)
    assert not alpha_equal(parse_program("g(A) :- q(A,B)."), parse_program("g(A) :- q(B,A)."))


def test_first_mismatch():
    assert first_mismatch(fixtures.p1(), fixtures.p1()) is None
    assert first_mismatch(fixtures.p1(), fixtures.q1()) is not None


def test_linearize():
    lin = linearize(parse_rule("aux(A,B,C) :- p(A), q(B,C), r(C)."))
    assert lin.count_map == {"p": 1, "q": 1, "r": 1}
    assert lin.head_arity == 4
    assert lin.size == 4
    assert linearize(lin.to_rule()) == lin


def test_linear_rule_layout():
    lin = LinearAuxRule("aux3", {"p": 2, "q": 2, "r": 1}, {"p": 1, "q": 2, "r": 1})
    assert lin.slot_order == [("p", 0), ("p", 1), ("q", 0), ("q", 1), ("r", 0)]
    assert lin.to_rule() == parse_rule("aux3(A,B,C,D,E,F,G) :- p(A), p(B), q(C,D), q(E,F), r(G).")


def test_relinearize_p3():
    # the non-linear aux2 of P3 rewritten as a call to its linearization
    p3 = fixtures.p3()
    aux2 = p3[0]
    lin = linearize(aux2, "aux2")
    rewritten = [aux2.__class__(r.head, tuple(
        relinearize_literal(aux2, l, lin) if l.predicate == "aux2" else l for l in r.body)) for r in p3[1:]]
    assert alpha_equal(unfold_all(rewritten, [lin.to_rule()]), fixtures.p1())


def test_check_invented():
    p = fixtures.p1()
    check_invented(parse_rule("aux(A,B) :- p(A), q(A,B)."), p)
    with pytest.raises(ValueError, match="head predicate"):
        check_invented(parse_rule("g(A) :- p(A)."), p)
    with pytest.raises(ValueError, match="body predicate"):
        check_invented(parse_rule("aux(A) :- nope(A)."), p)
    with pytest.raises(ValueError, match="head variables"):
        check_invented(parse_rule("aux(A) :- q(A,B)."), p)


def test_alpha_equal_modulo_aux_argument_order():
    a = parse_program("aux(A,B) :- p(A), q(B).\ng(A) :- aux(A,B), r(B).")
    b = parse_program("aux(B,A) :- p(A), q(B).\ng(A) :- aux(B,A), r(B).")
    c = parse_program("aux(B,A) :- p(A), q(B).\ng(A) :- aux(A,B), r(B).")
    assert not alpha_equal(a, b)
    assert alpha_equal_modulo_aux(a, b, ["aux"])
    assert not alpha_equal_modulo_aux(a, c, ["aux"])


@settings(max_examples=60, deadline=None)
@given(programs())
def test_round_trip_preserves_size_and_rules(p):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        back = parse_program(format_program(p))
    assert program_size(back) == program_size(p)
    assert alpha_equal(back, p)


@settings(max_examples=60, deadline=None)
@given(programs(), st.randoms(use_true_random=False))
def test_alpha_equal_is_renaming_invariant(p, rnd):
    renamed = []
    for r in p:
        vs = list(r.variables)
        perm = vs[:]
        rnd.shuffle(perm)
        body = list(r.body)
        rnd.shuffle(body)
        renamed.append(Rule(r.head, tuple(body)).rename(dict(zip(vs, perm))))
    assert alpha_equal(p, renamed)
    assert alpha_equal(renamed, p)


@settings(max_examples=60, deadline=None)
@given(programs())
def test_linearize_idempotent(p):
    for r in p:
        if not r.body:
            continue
        lin = linearize(Rule(Literal("aux", r.variables), r.body), "aux")
        assert linearize(lin.to_rule()) == lin
        assert lin.head_arity == sum(m * dict(lin.arities)[q] for q, m in lin.counts)


@settings(max_examples=40, deadline=None)
@given(programs(), programs())
def test_unfold_keeps_rule_count(p, q):
    r = next((x for x in q if x.body), None)
    if r is None:
        return
    aux = Rule(Literal("auxz", r.variables), r.body)
    calls = Program(tuple(Rule(c.head, c.body + (Literal("auxz", tuple(range(len(r.variables)))),)) for c in p))
    assert len(unfold(calls, aux)) == len(p)
