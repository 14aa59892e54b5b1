"""Hypothesis strategies for small programs."""

from hypothesis import strategies as st

from maxrefactor.logic import Literal, Program, Rule

ARITIES = {"p": 1, "q": 2, "r": 1, "s": 0}


@st.composite
def rules(draw, max_body=4, preds=ARITIES):
    n = draw(st.integers(1, max_body))
    pool = draw(st.integers(1, 4))
    body = []
    for _ in range(n):
        p = draw(st.sampled_from(sorted(preds)))
        body.append(Literal(p, tuple(draw(st.integers(0, pool - 1)) for _ in range(preds[p]))))
    head = Literal("g", (draw(st.integers(0, pool - 1)),))
    r = Rule(head, tuple(body))
    return r.normalized()


@st.composite
def programs(draw, max_rules=3, max_body=4):
    n = draw(st.integers(1, max_rules))
    return Program(tuple(draw(rules(max_body)) for _ in range(n)))
