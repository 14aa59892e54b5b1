"""Literal-based refactoring model and its weighted MaxSAT lowering.

Decision variables (all Boolean):

* ``r[k, p, m]``       aux rule k has exactly m body literals with predicate p
* ``use[c, k, t]``     input rule c is refactored with at least t calls of aux k
* ``cover[c, a, k, t]`` body literal a of rule c is produced by the t-th call of aux k
* ``used[k]``          aux k is called anywhere
* ``covered[c, a]``    body literal a of rule c is removed from its rule

Minimising ``sum used + sum m*r + sum use - sum covered`` gives the size change
of the refactored program.  MaxSAT only minimises falsified positive weights,
so ``covered`` is rewarded through a unit soft clause and the constant
``-(number of body literals)`` is carried as ``objective_offset``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .logic import Program, predicates
from .pb import lower_pb

MAX_TOTAL_WEIGHT = 2**63 - 1

FAMILIES = ("r", "use", "cover", "used", "covered")


class EncodingError(ValueError):
    pass


def lit_value(model: frozenset[int] | set[int], lit: int) -> bool:
    """Truth value of a DIMACS literal under a model given as its set of true variables."""
    return (abs(lit) in model) == (lit > 0)


@dataclass
class VariableLayout:
    """Bijection between decision variables and solver ids.

    Ids are dense, starting at 1, allocated family by family in the order of
    FAMILIES; auxiliary ids (encoding helpers) follow.
    """

    program: Program
    k: int
    preds: tuple[str, ...]
    m_max: dict[str, int]
    t_max: tuple[int, ...]
    r: dict[tuple[int, str, int], int] = field(default_factory=dict)
    use: dict[tuple[int, int, int], int] = field(default_factory=dict)
    cover: dict[tuple[int, int, int, int], int] = field(default_factory=dict)
    used: dict[int, int] = field(default_factory=dict)
    covered: dict[tuple[int, int], int] = field(default_factory=dict)
    info: list[tuple[str, tuple]] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return len(self.info)

    def _alloc(self, family: str, key: tuple) -> int:
        self.info.append((family, key))
        return len(self.info)

    def fresh(self, tag: str = "aux") -> int:
        return self._alloc(tag, (len(self.info) + 1,))

    def describe(self, var: int) -> tuple[str, tuple]:
        return self.info[var - 1]

    def lookup(self, family: str, key: tuple) -> int:
        table = getattr(self, family)
        return table[key if family != "used" else key[0]]

    @property
    def primary_vars(self) -> range:
        n = len(self.r) + len(self.use) + len(self.cover) + len(self.used) + len(self.covered)
        return range(1, n + 1)

    def r_vars(self, k: int, p: str) -> list[tuple[int, int]]:
        """(m, id) pairs for aux k and predicate p."""
        return [(m, self.r[k, p, m]) for m in range(1, self.m_max[p] + 1)]


def layout(program: Program, k: int) -> VariableLayout:
    if k < 1:
        raise EncodingError("K must be at least 1 (K = 0 means no refactoring)")
    if len(program) == 0:
        raise EncodingError("empty program")
    preds = tuple(sorted(predicates(program)))
    counts = [Counter(l.predicate for l in rule.body) for rule in program]
    m_max = {p: max(c[p] for c in counts) for p in preds}
    t_max = tuple(max(c.values(), default=0) for c in counts)
    lay = VariableLayout(program, k, preds, m_max, t_max)
    for kk in range(1, k + 1):
        for p in preds:
            for m in range(1, m_max[p] + 1):
                lay.r[kk, p, m] = lay._alloc("r", (kk, p, m))
    for c in range(len(program)):
        for kk in range(1, k + 1):
            for t in range(1, t_max[c] + 1):
                lay.use[c, kk, t] = lay._alloc("use", (c, kk, t))
    for c, rule in enumerate(program):
        for a in range(len(rule.body)):
            for kk in range(1, k + 1):
                for t in range(1, t_max[c] + 1):
                    lay.cover[c, a, kk, t] = lay._alloc("cover", (c, a, kk, t))
    for kk in range(1, k + 1):
        lay.used[kk] = lay._alloc("used", (kk,))
    for c, rule in enumerate(program):
        for a in range(len(rule.body)):
            lay.covered[c, a] = lay._alloc("covered", (c, a))
    return lay


@dataclass(frozen=True)
class CardinalityAtom:
    """``guard -> sum(lits) <= bound``."""

    guard: int
    lits: tuple[int, ...]
    bound: int
    tag: str = ""

    def holds(self, model) -> bool:
        if not lit_value(model, self.guard):
            return True
        return sum(lit_value(model, l) for l in self.lits) <= self.bound


@dataclass
class ConstraintIR:
    layout: VariableLayout
    clauses: list[tuple[int, ...]] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)
    cards: list[CardinalityAtom] = field(default_factory=list)
    soft: list[tuple[int, int]] = field(default_factory=list)
    offset: int = 0

    def add(self, clause: Iterable[int], tag: str) -> None:
        self.clauses.append(tuple(clause))
        self.tags.append(tag)

    def violations(self, model) -> list[str]:
        """Tags of violated constraints (clauses and cardinality atoms)."""
        bad = [
            tag
            for clause, tag in zip(self.clauses, self.tags)
            if not any(lit_value(model, l) for l in clause)
        ]
        bad.extend(a.tag for a in self.cards if not a.holds(model))
        return bad

    def objective(self, model) -> int:
        """Objective value (size change) of an assignment."""
        falsified = sum(w for lit, w in self.soft if not lit_value(model, lit))
        return falsified + self.offset


def _lex_geq(ir: ConstraintIR, xs: Sequence[int], ys: Sequence[int]) -> None:
    """xs >= ys lexicographically (True > False)."""
    lay = ir.layout
    eq = None  # None stands for the constant "prefix equal so far"
    for i, (x, y) in enumerate(zip(xs, ys)):
        prem = [] if eq is None else [-eq]
        ir.add(prem + [x, -y], "symmetry")
        if i == len(xs) - 1:
            break
        nxt = lay.fresh("sym")
        ir.add(prem + [x, y, nxt], "symmetry")
        ir.add(prem + [-x, -y, nxt], "symmetry")
        eq = nxt


def emit_constraints(
    lay: VariableLayout,
    symmetry: bool = True,
    candidates: Sequence[Mapping[str, int]] | None = None,
) -> ConstraintIR:
    """Hard constraints of the model; cardinality bounds kept as atoms."""
    ir = ConstraintIR(lay)
    program, K = lay.program, lay.k
    ks = range(1, K + 1)

    for kk in ks:
        for p in lay.preds:
            rv = [v for _, v in lay.r_vars(kk, p)]
            for a, b in itertools.combinations(rv, 2):
                ir.add((-a, -b), "mutex")

    for c, rule in enumerate(program):
        present = {l.predicate for l in rule.body}
        tm = lay.t_max[c]
        for kk in ks:
            # (1) calls are numbered contiguously
            for t in range(2, tm + 1):
                ir.add((-lay.use[c, kk, t], lay.use[c, kk, t - 1]), "(1)")
            # (2) an aux that calls a predicate missing from c cannot be used in c
            for p in lay.preds:
                if p in present:
                    continue
                for t in range(1, tm + 1):
                    for _, rv in lay.r_vars(kk, p):
                        ir.add((-lay.use[c, kk, t], -rv), "(2)")
            for t in range(1, tm + 1):
                for a, lit in enumerate(rule.body):
                    cv = lay.cover[c, a, kk, t]
                    # (3) covering needs the call and the predicate in the aux body
                    ir.add((-cv, lay.use[c, kk, t]), "(3)")
                    ir.add((-cv, *(v for _, v in lay.r_vars(kk, lit.predicate))), "(3)")
                # (4) one call covers at most m literals of predicate p
                for p in sorted(present):
                    group = tuple(
                        lay.cover[c, a, kk, t] for a, l in enumerate(rule.body) if l.predicate == p
                    )
                    for m, rv in lay.r_vars(kk, p):
                        if len(group) > m:
                            ir.cards.append(CardinalityAtom(rv, group, m, "(4)"))

    # (5) used_k <-> some call of k
    calls_of: dict[int, list[int]] = {kk: [] for kk in ks}
    for (c, kk, t), v in lay.use.items():
        calls_of[kk].append(v)
    for kk in ks:
        calls = calls_of[kk]
        for v in calls:
            ir.add((-v, lay.used[kk]), "(5)")
        ir.add((-lay.used[kk], *calls), "(5)")
    # (6) covered_{c,a} <-> some cover
    by_literal: dict[tuple[int, int], list[int]] = {}
    for (c, a, kk, t), v in lay.cover.items():
        by_literal.setdefault((c, a), []).append(v)
    for (c, a), cv in lay.covered.items():
        covers = by_literal[c, a]
        for v in covers:
            ir.add((-v, cv), "(6)")
        ir.add((-cv, *covers), "(6)")

    # unused aux rules have empty bodies and used ones have non-empty bodies
    for kk in ks:
        rv = [v for p in lay.preds for _, v in lay.r_vars(kk, p)]
        for v in rv:
            ir.add((-v, lay.used[kk]), "tidy")
        ir.add((-lay.used[kk], *rv), "tidy")

    if candidates is not None:
        _restrict_to_candidates(ir, candidates)

    if symmetry and K > 1:
        order = [(p, m) for p in lay.preds for m in range(1, lay.m_max[p] + 1)]
        for kk in range(1, K):
            xs = [lay.r[kk, p, m] for p, m in order]
            ys = [lay.r[kk + 1, p, m] for p, m in order]
            _lex_geq(ir, xs, ys)
    return ir


def _restrict_to_candidates(ir: ConstraintIR, candidates: Sequence[Mapping[str, int]]) -> None:
    """Pin every used aux body to one of the given predicate count maps."""
    lay = ir.layout
    for cand in candidates:
        for p, m in cand.items():
            if p not in lay.m_max or m > lay.m_max[p]:
                raise EncodingError(f"candidate uses {p}x{m}, outside the layout")
    for kk in range(1, lay.k + 1):
        sel = [lay.fresh("sel") for _ in candidates]
        ir.add((-lay.used[kk], *sel), "candidate")
        for a, b in itertools.combinations(sel, 2):
            ir.add((-a, -b), "candidate")
        for s, cand in zip(sel, candidates):
            for p in lay.preds:
                for m, rv in lay.r_vars(kk, p):
                    ir.add((-s, rv) if cand.get(p, 0) == m else (-s, -rv), "candidate")


def emit_objective(ir: ConstraintIR) -> ConstraintIR:
    """Unit soft clauses (literal, weight) and the constant offset."""
    lay = ir.layout
    soft: list[tuple[int, int]] = []
    for kk, v in lay.used.items():
        soft.append((-v, 1))
    for (kk, p, m), v in lay.r.items():
        soft.append((-v, m))
    for v in lay.use.values():
        soft.append((-v, 1))
    for v in lay.covered.values():
        soft.append((v, 1))
    ir.soft = soft
    ir.offset = -len(lay.covered)
    return ir


def objective_value(lay: VariableLayout, model) -> int:
    """Size change of the refactoring encoded by ``model`` (direct evaluation)."""
    used = sum(lit_value(model, v) for v in lay.used.values())
    body = sum(m for (kk, p, m), v in lay.r.items() if lit_value(model, v))
    calls = sum(lit_value(model, v) for v in lay.use.values())
    covered = sum(lit_value(model, v) for v in lay.covered.values())
    return used + body + calls - covered


@dataclass(frozen=True)
class WcnfFormula:
    num_vars: int
    hard: tuple[tuple[int, ...], ...]
    soft: tuple[tuple[int, tuple[int, ...]], ...]
    objective_offset: int = 0

    @property
    def top(self) -> int:
        return 1 + sum(w for w, _ in self.soft)

    def cost(self, model) -> int:
        return sum(w for w, cl in self.soft if not any(lit_value(model, l) for l in cl))

    def first_violated(self, model) -> tuple[int, ...] | None:
        for clause in self.hard:
            if not any(lit_value(model, l) for l in clause):
                return clause
        return None

    def satisfies_hard(self, model) -> bool:
        return self.first_violated(model) is None

    def to_dimacs(self, wcnf_2022: bool = False) -> str:
        lines = []
        if wcnf_2022:
            lines.extend("h " + " ".join(map(str, cl)) + " 0" for cl in self.hard)
            lines.extend(f"{w} " + " ".join(map(str, cl)) + " 0" for w, cl in self.soft)
        else:
            top = self.top
            lines.append(f"p wcnf {self.num_vars} {len(self.hard) + len(self.soft)} {top}")
            lines.extend(f"{top} " + " ".join(map(str, cl)) + " 0" for cl in self.hard)
            lines.extend(f"{w} " + " ".join(map(str, cl)) + " 0" for w, cl in self.soft)
        return "\n".join(lines) + "\n"

    def write(self, path, wcnf_2022: bool = False) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_dimacs(wcnf_2022))


def read_wcnf(text: str) -> WcnfFormula:
    """Parse classic (``p wcnf``) or 2022 (``h``-prefixed) WCNF text."""
    top = None
    hard, soft = [], []
    num_vars = 0
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            num_vars = int(parts[2])
            top = int(parts[4]) if len(parts) > 4 else None
            continue
        nums = parts[1:] if parts[0] == "h" else parts[1:]
        lits = tuple(int(x) for x in nums)
        if lits and lits[-1] == 0:
            lits = lits[:-1]
        num_vars = max([num_vars, *(abs(l) for l in lits)])
        if parts[0] == "h" or (top is not None and int(parts[0]) >= top):
            hard.append(lits)
        else:
            soft.append((int(parts[0]), lits))
    return WcnfFormula(num_vars, tuple(hard), tuple(soft))


def to_wcnf(ir: ConstraintIR) -> WcnfFormula:
    lay = ir.layout
    hard = [tuple(cl) for cl in ir.clauses]
    for atom in ir.cards:
        hard.extend(tuple(cl) for cl in lower_pb(atom.lits, atom.bound, atom.guard, lambda: lay.fresh("pb")))
    if any(len(cl) == 0 for cl in hard):
        raise EncodingError("empty hard clause")
    soft = tuple((w, (lit,)) for lit, w in ir.soft)
    total = sum(w for w, _ in soft)
    if total + 1 > MAX_TOTAL_WEIGHT:
        raise EncodingError("total soft weight overflows 2^63 - 1")
    if any(w < 1 for w, _ in soft):
        raise EncodingError("soft weights must be positive")
    return WcnfFormula(lay.num_vars, tuple(hard), soft, ir.offset)


@dataclass(frozen=True)
class Encoding:
    program: Program
    layout: VariableLayout
    ir: ConstraintIR
    formula: WcnfFormula

    def identity_hint(self) -> list[int]:
        """Assumptions selecting the do-nothing refactoring."""
        return [-v for v in self.layout.primary_vars]


def encode(
    program: Program,
    k: int,
    symmetry: bool = True,
    candidates: Sequence[Mapping[str, int]] | None = None,
) -> Encoding:
    lay = layout(program, k)
    ir = emit_objective(emit_constraints(lay, symmetry=symmetry, candidates=candidates))
    return Encoding(program, lay, ir, to_wcnf(ir))
