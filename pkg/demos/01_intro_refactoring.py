"""Refactor the two motivating programs and check the answers by unfolding.

Run with ``python demos/01_intro_refactoring.py``.
"""

#%%
from maxrefactor import fixtures, format_program, refactor
from maxrefactor.decode import verify, verify_program

#%% four rules sharing p, q, r in different variable patterns
p1 = fixtures.p1()
print(format_program(p1))
print("size", p1.size)

#%% one invented rule is enough to get from 20 to 16
out = refactor(p1, k=1, timeout=30)
print(out.status, out.size)
print(out.solution.to_text())
print("unfolds back:", bool(verify(p1, out.solution)))

#%% the hand-made refactoring has the same size and also unfolds to P1
hand = fixtures.p3()
print("hand-made size", hand.size, "valid:", bool(verify_program(p1, hand)))

#%% two more rules that use p and q twice; the best aux now has duplicate predicates
q1 = fixtures.q1()
out = refactor(q1, k=1, timeout=30)
print(out.status, q1.size, "->", out.size)
print(format_program(out.solution.program))
