"""Small programs used throughout the docs and tests.

``P1``/``Q1`` are the motivating inputs; ``P2``, ``P3`` and ``Q2`` are the
refactorings discussed alongside them.  ``TWO_RULES`` is the two-rule program
used to walk through the encoding, with ``TWO_RULES_ASSIGNMENT`` the
assignment of decision variables that is true in that walk-through and
``TWO_RULES_REFACTORED`` the refactored rules it describes.  The
``UNFOLD_*`` texts are a small unfolding example: input, rule, and result.
"""

from __future__ import annotations

from .logic import Program, parse_program

P1_TEXT = """\
g(A) :- p(A), q(A,B), r(B), s(A,B).
g(A) :- p(A), q(A,B), r(B), t(A,B).
g(A) :- p(B), q(B,C), r(C), w(A,B).
g(A) :- p(A), q(B,A), r(A), z(A,B).
"""

P2_TEXT = """\
aux1(A,B) :- p(A), q(A,B), r(B).
g(A) :- aux1(A,B), s(A,B).
g(A) :- aux1(A,B), t(A,B).
g(A) :- aux1(B,C), w(A,B).
g(A) :- p(A), q(B,A), r(A), z(A,B).
"""

P3_TEXT = """\
aux2(A,B,C) :- p(A), q(B,C), r(C).
g(A) :- aux2(A,A,B), s(A,B).
g(A) :- aux2(A,A,B), t(A,B).
g(A) :- aux2(B,B,C), w(A,B).
g(A) :- aux2(A,B,A), z(A,B).
"""

Q1_TEXT = P1_TEXT + """\
g(A) :- p(A), p(B), q(A,B), r(B).
g(A) :- p(A), q(A,B), q(B,C), r(C).
"""

Q2_TEXT = """\
aux3(A,B,C,D,E,F,G) :- p(A), p(B), q(C,D), q(E,F), r(G).
g(A) :- aux3(A,A,A,B,A,B,B), s(A,B).
g(A) :- aux3(A,A,A,B,A,B,B), t(A,B).
g(A) :- aux3(B,B,B,C,B,C,C), w(A,B).
g(A) :- aux3(A,A,B,A,B,A,A), z(A,B).
g(A) :- aux3(A,B,A,B,A,B,B).
g(A) :- aux3(A,A,A,B,B,C,C).
"""

UNFOLD_INPUT_TEXT = """\
g(A) :- p(A), aux(A,B).
g(A) :- p(B), p(C), aux(A,B), aux(A,C).
g(A) :- p(B), q(A,B), r(B).
"""

UNFOLD_RULE_TEXT = "aux(A,B) :- p(B), q(A,B)."

UNFOLD_RESULT_TEXT = """\
g(A) :- p(A), p(B), q(A,B).
g(A) :- p(B), p(C), q(A,B), q(A,C).
g(A) :- p(B), q(A,B), r(B).
"""

TWO_RULES_TEXT = """\
g(A) :- p(B), p(C), q(A,B), q(B,C).
g(A) :- p(B), q(A,B), q(A,C), s(C).
"""

# (family, key) pairs set true; keys use 0-based rule/literal indices and
# 1-based aux/call indices.  Everything else is false.
TWO_RULES_ASSIGNMENT = (
    ("r", (1, "p", 1)),
    ("r", (1, "q", 1)),
    ("use", (0, 1, 1)),
    ("use", (0, 1, 2)),
    ("use", (1, 1, 1)),
    ("cover", (0, 0, 1, 1)),
    ("cover", (0, 1, 1, 2)),
    ("cover", (0, 2, 1, 1)),
    ("cover", (0, 3, 1, 2)),
    ("cover", (1, 0, 1, 1)),
    ("cover", (1, 1, 1, 1)),
)

TWO_RULES_REFACTORED_TEXT = """\
aux1(A,B,C) :- p(A), q(B,C).
g(A) :- aux1(B,A,B), aux1(C,B,C).
g(A) :- aux1(B,A,B), q(A,C), s(C).
"""


def p1() -> Program:
    return parse_program(P1_TEXT)


def p2() -> Program:
    return parse_program(P2_TEXT)


def p3() -> Program:
    return parse_program(P3_TEXT)


def q1() -> Program:
    return parse_program(Q1_TEXT)


def q2() -> Program:
    return parse_program(Q2_TEXT)


def two_rules() -> Program:
    return parse_program(TWO_RULES_TEXT)


def two_rules_refactored() -> Program:
    return parse_program(TWO_RULES_REFACTORED_TEXT)
