"""Anytime behaviour on a generated program with shared motifs.

The incumbent trace only goes down; the normalized gap is measured against
the best size seen in this run.
"""

#%%
from maxrefactor import refactor
from maxrefactor.decode import normalized_gap
from maxrefactor.generate import motif_program

prog = motif_program(num_rules=60, seed=0)
print(len(prog), "rules, size", prog.size)

#%%
out = refactor(prog, k=2, timeout=20)
best = out.trace[-1][1]
for t, size in out.trace:
    gap = normalized_gap(size, best, prog.size) if best < prog.size else 0
    print(f"{t:7.2f}s  size {size:4d}  gap {float(gap):.3f}")
print(out.status, "cr", round(float(out.solution.cr), 3))
