"""Compare the engine with the exhaustive oracle on random tiny programs.

The oracle enumerates invented rules directly, linear or not, so agreement
here checks the encoder, the solver and the decoder at once.
"""

#%%
from maxrefactor import refactor
from maxrefactor.generate import tiny_corpus
from maxrefactor.oracle import OracleConfig, oracle_optimum

#%%
rows = []
for i, prog in enumerate(tiny_corpus(15, seed=7)):
    lin = oracle_optimum(prog, OracleConfig(k=2)).min_size
    gen = oracle_optimum(prog, OracleConfig(k=2, space="general")).min_size
    eng = refactor(prog, k=2, timeout=30)
    rows.append((i, prog.size, lin, gen, eng.size, eng.status))

#%%
print(" id  input  linear  general  engine  status")
for row in rows:
    print("{:3d} {:6d} {:7d} {:8d} {:7d}  {}".format(*row))
print("all equal:", all(r[2] == r[3] == r[4] for r in rows))
