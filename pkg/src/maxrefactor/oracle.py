"""Exhaustive optimal refactoring for tiny programs.

Ground truth for the encoder and solver.  It never looks at the constraint
model: it enumerates candidate invented rules, computes for every input rule
which literal sets a single call of each candidate can reproduce, and then
searches all candidate sets of size at most K.

Two candidate spaces are supported:

``linear``
    every multiset of body predicates up to ``max_aux_body_size`` literals,
    with all body variables distinct.
``general``
    every body (up to renaming) whose literals can be mapped into some input
    rule, over a variable pool of ``max_aux_body_size * max_arity`` variables.
    An invented rule with no such mapping can never be called, so nothing
    usable is skipped; the pool is exactly the number of argument positions,
    which is the most distinct variables a body of that size can mention.

Given a candidate set, input rules are independent, so each rule is solved
alone by a breadth-first search over the union of reproduced literals.
"""

from __future__ import annotations

import itertools
import time
from collections import Counter
from dataclasses import dataclass, field

from .decode import RefactoringSolution, aux_name
from .logic import Literal, Program, Rule, program_size, predicates


class OracleBoundsError(ValueError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    max_rules: int = 3
    max_body: int = 4
    max_predicates: int = 3
    k: int = 1
    max_aux_body_size: int = 4
    space: str = "linear"

    def __post_init__(self):
        if min(self.max_rules, self.max_body, self.max_predicates, self.k, self.max_aux_body_size) < 1:
            raise ValueError("oracle bounds must be at least 1")
        if self.space not in ("linear", "general"):
            raise ValueError(f"unknown space {self.space!r}")

    def check(self, program: Program) -> None:
        if len(program) > self.max_rules:
            raise OracleBoundsError(f"{len(program)} rules > max_rules={self.max_rules}")
        if any(len(r.body) > self.max_body for r in program):
            raise OracleBoundsError(f"a rule body exceeds max_body={self.max_body}")
        if len(predicates(program)) > self.max_predicates:
            raise OracleBoundsError(f"more than max_predicates={self.max_predicates} body predicates")


@dataclass
class _Candidate:
    body: tuple[Literal, ...]  # variables 0..n-1
    # per input rule: image bitmask -> call arguments (in the rule's variables)
    images: list[dict[int, tuple[int, ...]]]

    @property
    def size(self) -> int:
        return len(self.body) + 1

    @property
    def head_vars(self) -> tuple[int, ...]:
        return tuple(dict.fromkeys(v for l in self.body for v in l.args))


@dataclass
class OracleResult:
    min_size: int
    witness: RefactoringSolution
    nodes_explored: int
    wall_time: float
    space: str
    candidates: int = 0

    def to_dict(self) -> dict:
        return {
            "min_size": self.min_size,
            "space": self.space,
            "nodes_explored": self.nodes_explored,
            "candidates": self.candidates,
            "wall_time": round(self.wall_time, 6),
            "witness": self.witness.to_dict(),
        }


# ---------------------------------------------------------------------------
# Images of a single call

def _homomorphisms(body: tuple[Literal, ...], rule: Rule):
    """Yield (image bitmask, variable binding) for every mapping of body into rule.body."""
    targets: dict[str, list[tuple[int, Literal]]] = {}
    for i, lit in enumerate(rule.body):
        targets.setdefault(lit.predicate, []).append((i, lit))
    binding: dict[int, int] = {}

    def go(j: int, mask: int):
        if j == len(body):
            yield mask, dict(binding)
            return
        lit = body[j]
        for i, target in targets.get(lit.predicate, ()):
            added = []
            ok = True
            for v, w in zip(lit.args, target.args):
                if v in binding:
                    if binding[v] != w:
                        ok = False
                        break
                else:
                    binding[v] = w
                    added.append(v)
            if ok:
                yield from go(j + 1, mask | (1 << i))
            for v in added:
                del binding[v]

    yield from go(0, 0)


def _images(body: tuple[Literal, ...], rule: Rule) -> dict[int, tuple[int, ...]]:
    head = tuple(dict.fromkeys(v for l in body for v in l.args))
    out: dict[int, tuple[int, ...]] = {}
    for mask, binding in _homomorphisms(body, rule):
        out.setdefault(mask, tuple(binding[v] for v in head))
    return out


def _linear_images(counts: dict[str, int], arities: dict[str, int], rule: Rule) -> dict[int, tuple[int, ...]]:
    """Images of a linear rule: per predicate, a non-empty set of at most m literals."""
    per_pred = []
    for p, m in sorted(counts.items()):
        idx = [i for i, l in enumerate(rule.body) if l.predicate == p]
        if not idx:
            return {}
        options = []
        for size in range(1, min(m, len(idx)) + 1):
            for subset in itertools.combinations(idx, size):
                args: list[int] = []
                for slot in range(m):
                    src = subset[slot] if slot < len(subset) else subset[0]
                    args.extend(rule.body[src].args)
                mask = sum(1 << i for i in subset)
                options.append((mask, tuple(args)))
        per_pred.append(options)
    out: dict[int, tuple[int, ...]] = {}
    for combo in itertools.product(*per_pred):
        mask = 0
        args: list[int] = []
        for m, a in combo:
            mask |= m
            args.extend(a)
        out.setdefault(mask, tuple(args))
    return out


# ---------------------------------------------------------------------------
# Candidate spaces

def _linear_candidates(program: Program, cfg: OracleConfig) -> list[_Candidate]:
    arities = predicates(program)
    preds = sorted(arities)
    out = []
    for size in range(1, cfg.max_aux_body_size + 1):
        for combo in itertools.combinations_with_replacement(preds, size):
            counts = dict(Counter(combo))
            body, nxt = [], 0
            for p in sorted(counts):
                for _ in range(counts[p]):
                    body.append(Literal(p, tuple(range(nxt, nxt + arities[p]))))
                    nxt += arities[p]
            images = [_linear_images(counts, arities, r) for r in program]
            out.append(_Candidate(tuple(body), images))
    return out


def _set_partitions(items: list[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first, *part[i]]] + part[i + 1:]
        yield [[first], *part]


def _canonical(body: tuple[tuple[str, tuple[int, ...]], ...]) -> tuple[tuple[str, tuple[int, ...]], ...] | None:
    """Canonical representative of a body up to variable renaming and order."""
    if len(set(body)) != len(body):
        return None
    groups: dict[str, list] = {}
    for lit in body:
        groups.setdefault(lit[0], []).append(lit)
    best = None
    for perms in itertools.product(*(itertools.permutations(groups[p]) for p in sorted(groups))):
        ren: dict[int, int] = {}
        key = tuple((p, tuple(ren.setdefault(v, len(ren)) for v in args)) for group in perms for p, args in group)
        if best is None or key < best:
            best = key
    return best


def _general_bodies(program: Program, cfg: OracleConfig) -> set[tuple[Literal, ...]]:
    raw: set[tuple] = set()
    for rule in program:
        n = len(rule.body)
        for size in range(1, cfg.max_aux_body_size + 1):
            for combo in itertools.combinations_with_replacement(range(n), size):
                targets = [rule.body[i] for i in combo]
                positions = [(j, q) for j, t in enumerate(targets) for q in range(t.arity)]
                classes: dict[int, list[int]] = {}
                for idx, (j, q) in enumerate(positions):
                    classes.setdefault(targets[j].args[q], []).append(idx)
                per_class = [list(_set_partitions(c)) for c in classes.values()]
                for choice in itertools.product(*per_class):
                    var_of = {}
                    nxt = 0
                    for blocks in choice:
                        for block in blocks:
                            for idx in block:
                                var_of[idx] = nxt
                            nxt += 1
                    lits, idx = [], 0
                    for t in targets:
                        lits.append((t.predicate, tuple(var_of[idx + q] for q in range(t.arity))))
                        idx += t.arity
                    raw.add(tuple(sorted(lits)))
    bodies = set()
    for body in raw:
        canon = _canonical(body)
        if canon is not None:
            bodies.add(tuple(Literal(p, args) for p, args in canon))
    return bodies


def _general_candidates(program: Program, cfg: OracleConfig) -> list[_Candidate]:
    return [
        _Candidate(body, [_images(body, r) for r in program])
        for body in sorted(_general_bodies(program, cfg))
    ]


# ---------------------------------------------------------------------------
# Per-rule search

def _best_cover(nbody: int, images: frozenset[int]) -> tuple[int, tuple[int, ...]]:
    """(size of the best refactored rule, chosen image masks) for one input rule."""
    dist: dict[int, tuple[int, ...]] = {0: ()}
    frontier = [0]
    while frontier:
        nxt = []
        for mask in frontier:
            for img in images:
                u = mask | img
                if u not in dist:
                    dist[u] = dist[mask] + (img,)
                    nxt.append(u)
        frontier = nxt
    best = None
    for mask, chosen in dist.items():
        size = 1 + nbody - bin(mask).count("1") + len(chosen)
        if best is None or size < best[0]:
            best = (size, chosen)
    return best


def oracle_optimum(program: Program, cfg: OracleConfig) -> OracleResult:
    """Exact minimum refactored size with at most ``cfg.k`` invented rules."""
    cfg.check(program)
    start = time.monotonic()
    input_size = program_size(program)
    if not any(r.body for r in program):
        return OracleResult(input_size, _witness(program, []), 0, time.monotonic() - start, cfg.space)

    raw = _linear_candidates(program, cfg) if cfg.space == "linear" else _general_candidates(program, cfg)
    # a candidate that never reproduces two literals in one call cannot shrink anything
    useful = [c for c in raw if any(bin(m).count("1") >= 2 for img in c.images for m in img)]
    seen: dict[tuple, _Candidate] = {}
    for cand in useful:
        key = (cand.size, tuple(frozenset(img) for img in cand.images))
        seen.setdefault(key, cand)
    cands = list(seen.values())

    cache: dict[tuple[int, frozenset[int]], tuple[int, tuple[int, ...]]] = {}

    def rule_best(c: int, family: frozenset[int]):
        key = (c, family)
        if key not in cache:
            cache[key] = _best_cover(len(program[c].body), family)
        return cache[key]

    best_size, best_set = input_size, ()
    nodes = 1
    families = [[frozenset(img) for img in cand.images] for cand in cands]
    for n in range(1, cfg.k + 1):
        for combo in itertools.combinations(range(len(cands)), n):
            nodes += 1
            size = sum(cands[i].size for i in combo)
            if size >= best_size:
                continue
            for c in range(len(program)):
                fam = frozenset().union(*(families[i][c] for i in combo))
                size += rule_best(c, fam)[0]
                if size >= best_size:
                    break
            else:
                best_size, best_set = size, combo

    chosen = [cands[i] for i in best_set]
    witness = _witness(program, chosen, {c: rule_best(c, frozenset().union(*(families[i][c] for i in best_set)))
                                         for c in range(len(program))} if chosen else None)
    return OracleResult(best_size, witness, nodes, time.monotonic() - start, cfg.space, len(cands))


def _witness(program: Program, chosen: list[_Candidate], per_rule=None) -> RefactoringSolution:
    input_size = program_size(program)
    taken = set(program.predicate_table)
    names = {}
    invented = []
    for k, cand in enumerate(chosen, start=1):
        name = aux_name(k, taken)
        taken.add(name)
        names[k] = name
        invented.append(Rule(Literal(name, cand.head_vars), cand.body))
    refactored, coverage = [], {}
    for c, rule in enumerate(program):
        if not chosen:
            refactored.append(rule)
            coverage[c] = {}
            continue
        _, masks = per_rule[c]
        calls, cov = [], {}
        covered = 0
        counter: Counter = Counter()
        for mask in masks:
            k = next(k for k, cand in enumerate(chosen, start=1) if mask in cand.images[c])
            counter[k] += 1
            calls.append(Literal(names[k], chosen[k - 1].images[c][mask]))
            cov[k, counter[k]] = [a for a in range(len(rule.body)) if mask >> a & 1]
            covered |= mask
        kept = [l for a, l in enumerate(rule.body) if not covered >> a & 1]
        refactored.append(Rule(rule.head, tuple(kept + calls)))
        coverage[c] = cov
    out_size = program_size(refactored) + program_size(invented)
    return RefactoringSolution(
        invented=tuple(invented),
        refactored=Program(tuple(refactored)),
        coverage_map=coverage,
        objective_value=out_size - input_size,
        input_size=input_size,
        output_size=out_size,
        aux_names=names,
    )


def check_linear_sufficiency(program: Program, cfg: OracleConfig) -> bool:
    """Linear invented rules do at least as well as arbitrary ones on ``program``."""
    lin = oracle_optimum(program, OracleConfig(**{**cfg.__dict__, "space": "linear"}))
    gen = oracle_optimum(program, OracleConfig(**{**cfg.__dict__, "space": "general"}))
    return lin.min_size <= gen.min_size
