"""Walk through the MaxSAT encoding on a two-rule program.

The layout maps every decision to a variable id; a hand-written assignment
is checked against the constraints, decoded, and compared with the solver.
"""

#%%
from maxrefactor import fixtures, format_program
from maxrefactor.decode import decode
from maxrefactor.encoder import encode, objective_value
from maxrefactor.solver import solve

prog = fixtures.two_rules()
enc = encode(prog, k=1)
lay = enc.layout
print(format_program(prog))

#%% variables per family
for fam in ("r", "use", "cover", "used", "covered"):
    table = getattr(lay, fam)
    print(f"{fam:8s} {len(table):3d} vars, e.g. {next(iter(table.items()))}")
print("total incl. helpers:", lay.num_vars, "hard clauses:", len(enc.formula.hard))

#%% the assignment: aux1 :- p, q, called twice in rule 0 and once in rule 1
true_keys = list(fixtures.TWO_RULES_ASSIGNMENT)
true_keys += [("used", (1,))] + [("covered", key[:2]) for fam, key in true_keys if fam == "cover"]
model = frozenset(lay.lookup(f, k) for f, k in true_keys)
print("violated:", enc.ir.violations(model))
print("size change:", objective_value(lay, model))

#%% decoded program
sol = decode(model, enc)
print(format_program(sol.program))

#%% the solver agrees that no refactoring beats size 10 here
res = solve(enc.formula, budget=10, hint=enc.identity_hint())
print(res.status, "best size", prog.size + res.cost + enc.formula.objective_offset)

#%% first lines of the WCNF file an external solver would get
print("\n".join(enc.formula.to_dimacs().splitlines()[:5]))
