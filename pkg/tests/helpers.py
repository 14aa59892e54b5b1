"""Building assignments of the encoding's decision variables by hand."""

from maxrefactor.encoder import VariableLayout


def assignment(lay: VariableLayout, true_keys) -> frozenset[int]:
    """Model (set of true variable ids) from (family, key) pairs; everything else false."""
    return frozenset(lay.lookup(fam, key) for fam, key in true_keys)


def complete(lay: VariableLayout, true_keys) -> frozenset[int]:
    """Add the ``used`` and ``covered`` variables implied by r/use/cover keys."""
    keys = list(true_keys)
    for fam, key in list(keys):
        if fam == "r":
            keys.append(("used", (key[0],)))
        if fam == "cover":
            keys.append(("covered", key[:2]))
    return frozenset(lay.lookup(fam, key) for fam, key in set(keys))


def full_cover(lay: VariableLayout, counts: dict[str, int], covers: dict[int, list[int]]) -> frozenset[int]:
    """One aux rule with body ``counts``, one call in each rule c covering ``covers[c]``."""
    keys = [("r", (1, p, m)) for p, m in counts.items()]
    for c, lits in covers.items():
        keys.append(("use", (c, 1, 1)))
        keys.extend(("cover", (c, a, 1, 1)) for a in lits)
    return complete(lay, keys)


def extends(enc, model) -> bool:
    """Whether the primary assignment ``model`` extends to a model of the hard clauses."""
    from pysat.solvers import Solver

    prim = enc.layout.primary_vars
    with Solver(name="minisat22", bootstrap_with=[list(c) for c in enc.formula.hard]) as s:
        return s.solve(assumptions=[v if v in model else -v for v in prim])
