"""Graph-induced instances and the block-design program.

Each vertex of a 3-regular graph becomes a candidate invented rule over the
atoms of its three edges, so two candidates share an atom iff the vertices
are adjacent.  The optimum should pick an independent set.
"""

#%%
from maxrefactor import refactor
from maxrefactor.decode import verify_program
from maxrefactor.hardness import (
    bibd_instance,
    bibd_pair_refactoring,
    chosen_vertices,
    induced_instance,
    is_independent,
    k_bound,
    mis_bruteforce,
    named_graph,
)

#%% K4: every pair adjacent, so one candidate at a time
g = named_graph("k4")
inst = induced_instance(g)
out = refactor(inst.program, k=4, timeout=60, candidates=inst.candidate_counts())
print("K4:", out.status, inst.program.size, "->", out.size, "chosen", chosen_vertices(inst, out.solution.invented))

#%% independence numbers by enumeration
for name in ("k4", "cube", "q3", "prism4"):
    print(name, "alpha =", mis_bruteforce(named_graph(name))[0])

#%% block design: 12 rules of 6 atoms, every atom in 4 rules
prog, claimed = bibd_instance()
print("bound on useful invented rules:", k_bound(12, 7))
pairs = bibd_pair_refactoring()
print("pair refactoring size", pairs.size, "valid:", bool(verify_program(prog, pairs)))

#%% a short search already beats the pair refactoring
out = refactor(prog, k=9, timeout=20)
print(out.status, "size", out.size, "claimed optimum", claimed)
print(out.solution.to_text())
