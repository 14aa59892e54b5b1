"""BDD-style translation of guarded pseudo-Boolean upper bounds to CNF.

A node (i, r) stands for "the weighted sum of xs[i:] is at most r".  Only the
downward implications are emitted, which is enough for the guarded form
``guard -> sum(w * x) <= bound``: every satisfying assignment of the original
literals extends to the node variables, and no violating one does.
"""

from __future__ import annotations

from typing import Callable, Sequence

_TRUE = "T"
_FALSE = "F"


def lower_pb(
    lits: Sequence[int],
    bound: int,
    guard: int | None,
    fresh: Callable[[], int],
    weights: Sequence[int] | None = None,
) -> list[list[int]]:
    """Clauses for ``guard -> sum(weights[i] * lits[i]) <= bound``.

    ``guard=None`` makes the bound unconditional.  ``fresh`` allocates a new
    variable id for each internal BDD node.
    """
    if bound < 0:
        raise ValueError("bound must be non-negative")
    n = len(lits)
    w = list(weights) if weights is not None else [1] * n
    if len(w) != n or any(x <= 0 for x in w):
        raise ValueError("weights must be positive and match lits")
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + w[i]
    if suffix[0] <= bound:
        return []

    clauses: list[list[int]] = []
    nodes: dict[tuple[int, int], object] = {}
    guard_prefix = [] if guard is None else [-guard]

    def node(i: int, r: int):
        if r < 0:
            return _FALSE
        if suffix[i] <= r:
            return _TRUE
        # last position with r < w: the node is just "x is false"
        if i == n - 1:
            return -lits[i]
        key = (i, r)
        if key not in nodes:
            v = fresh()
            nodes[key] = v
            expand(v, i, r)
        return nodes[key]

    def implies(premise: list[int], target):
        if target is _TRUE:
            return
        if target is _FALSE:
            clauses.append(premise)
        else:
            clauses.append(premise + [target])

    def expand(v, i: int, r: int):
        prem = [] if v is None else [-v]
        implies(prem + [-lits[i]], node(i + 1, r - w[i]))
        implies(prem, node(i + 1, r))

    # the root node is the guard itself
    i, r = 0, bound
    if n == 1:
        # single literal that exceeds the bound on its own
        clauses.append(guard_prefix + [-lits[0]])
        return clauses
    implies(guard_prefix + [-lits[i]], node(i + 1, r - w[i]))
    implies(list(guard_prefix), node(i + 1, r))
    return clauses
