import pytest
from hypothesis import given, settings

from maxrefactor import fixtures
from maxrefactor.decode import verify
from maxrefactor.logic import parse_program
from maxrefactor.oracle import OracleBoundsError, OracleConfig, check_linear_sufficiency, oracle_optimum

from .strategies import programs

WIDE = dict(max_rules=6, max_body=4, max_predicates=7)


def test_p1_optimum():
    res = oracle_optimum(fixtures.p1(), OracleConfig(k=1, **WIDE))
    assert res.min_size == 16
    assert verify(fixtures.p1(), res.witness)
    assert res.witness.output_size == 16


def test_q1_optimum():
    res = oracle_optimum(fixtures.q1(), OracleConfig(k=1, **WIDE))
    assert res.min_size == 22
    assert verify(fixtures.q1(), res.witness)


def test_two_rules_optimum():
    res = oracle_optimum(fixtures.two_rules(), OracleConfig(k=1))
    assert res.min_size == 10
    assert verify(fixtures.two_rules(), res.witness)


def test_nothing_to_share():
    prog = parse_program("g(A) :- p(A).\ng(A) :- q(A,A).")
    res = oracle_optimum(prog, OracleConfig(k=2))
    assert res.min_size == prog.size
    assert res.witness.invented == ()


def test_bounds_enforced():
    with pytest.raises(OracleBoundsError, match="max_rules"):
        oracle_optimum(fixtures.p1(), OracleConfig())
    with pytest.raises(OracleBoundsError, match="max_predicates"):
        oracle_optimum(fixtures.p1(), OracleConfig(max_rules=6))
    with pytest.raises(OracleBoundsError, match="max_body"):
        oracle_optimum(parse_program("g(A) :- p(A), q(A,B), r(B), s(A), t(B)."), OracleConfig(max_predicates=9))
    with pytest.raises(ValueError):
        OracleConfig(k=0)
    with pytest.raises(ValueError):
        OracleConfig(space="other")


def test_more_rules_never_hurt():
    prog = fixtures.two_rules()
    sizes = [oracle_optimum(prog, OracleConfig(k=k)).min_size for k in (1, 2)]
    assert sizes[1] <= sizes[0]


def test_result_dict():
    d = oracle_optimum(fixtures.two_rules(), OracleConfig(k=1)).to_dict()
    assert d["min_size"] == 10 and d["space"] == "linear"
    assert d["witness"]["output_size"] == 10


def test_linear_sufficiency_two_rules():
    assert check_linear_sufficiency(fixtures.two_rules(), OracleConfig(k=1))


@settings(max_examples=25, deadline=None)
@given(programs(max_rules=3, max_body=3))
def test_witness_always_verifies(p):
    res = oracle_optimum(p, OracleConfig(k=2, max_predicates=4))
    assert res.min_size <= p.size
    assert res.witness.output_size == res.min_size
    assert verify(p, res.witness)
