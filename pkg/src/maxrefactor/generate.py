"""Synthetic programs for tests and benchmarks.

All generators are deterministic functions of their parameters and seed.
"""

from __future__ import annotations

import random
import string

from .hardness import bibd_instance, induced_instance, named_graph
from .logic import Literal, Program, Rule


def _pred_names(n: int) -> list[str]:
    letters = string.ascii_lowercase
    if n <= 20:
        return [c for c in letters if c not in "ghxyz"][:n]
    return [f"p{i}" for i in range(n)]


def _arities(n: int, max_arity: int, rng: random.Random) -> dict[str, int]:
    return {p: rng.randint(1, max_arity) for p in _pred_names(n)}


def _renumber(head: Literal, body: list[Literal]) -> Rule:
    ren: dict[int, int] = {}
    for lit in (head, *body):
        for v in lit.args:
            ren.setdefault(v, len(ren))
    return Rule(head.rename(ren), tuple(l.rename(ren) for l in body))


def _random_body(rng: random.Random, arities: dict[str, int], size: int, pool: int) -> list[Literal]:
    preds = sorted(arities)
    out: list[Literal] = []
    for _ in range(100 * size):
        if len(out) == size:
            break
        p = rng.choice(preds)
        lit = Literal(p, tuple(rng.randrange(pool) for _ in range(arities[p])))
        if lit not in out:
            out.append(lit)
    return out


def random_program(
    rng: random.Random,
    max_rules: int = 3,
    max_body: int = 4,
    max_predicates: int = 3,
    max_arity: int = 2,
    head: str = "g",
    share: float = 0.6,
) -> Program:
    """A random program with 1..max_rules rules of 1..max_body literals each.

    With probability ``share`` a rule starts from a renamed copy of part of a
    common template body, so that compression is often possible.
    """
    arities = _arities(rng.randint(1, max_predicates), max_arity, rng)
    template = _random_body(rng, arities, max_body, max(2, max_body * max_arity // 2))
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        size = rng.randint(1, max_body)
        pool = rng.randint(1, max(1, size * max_arity // 2 + 1))
        body: list[Literal] = []
        if len(template) >= 2 and size >= 2 and rng.random() < share:
            part = rng.sample(template, rng.randint(2, min(size, len(template))))
            vs = sorted({v for l in part for v in l.args})
            ren = {v: rng.randrange(pool + 1) for v in vs}
            body = list(dict.fromkeys(l.rename(ren) for l in part))
        extra = _random_body(rng, arities, size, pool + 1)
        body.extend(l for l in extra if l not in body)
        rules.append(_renumber(Literal(head, (0,)), body[:size]))
    return Program(tuple(rules))


def tiny_corpus(count: int = 50, seed: int = 0, **bounds) -> list[Program]:
    """Random programs within the oracle's default bounds, at least one literal shared somewhere."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        prog = random_program(rng, **bounds)
        if sum(len(r.body) for r in prog) >= 2:
            out.append(prog)
    return out


def motif_program(
    num_rules: int = 60,
    body_size: int = 6,
    num_predicates: int = 12,
    num_motifs: int = 3,
    motif_size: int = 3,
    motif_rate: float = 0.7,
    max_arity: int = 2,
    seed: int = 0,
) -> Program:
    """Random rules, most of them carrying one or more shared motifs.

    A motif is a fixed conjunction over motif-local variables; each injection
    renames its variables apart or onto the rule's existing ones, so the same
    motif appears in different variable patterns across rules.
    """
    rng = random.Random(seed)
    arities = _arities(num_predicates, max_arity, rng)
    motifs = []
    for _ in range(num_motifs):
        pool = max(2, motif_size)
        motifs.append(_random_body(rng, arities, motif_size, pool))
    rules = []
    for _ in range(num_rules):
        body: list[Literal] = []
        nxt = 1
        for motif in motifs:
            if rng.random() >= motif_rate or len(body) + len(motif) > body_size:
                continue
            ren = {}
            for lit in motif:
                for v in lit.args:
                    if v not in ren:
                        ren[v] = rng.randrange(nxt) if nxt > 1 and rng.random() < 0.3 else nxt
                        nxt = max(nxt, ren[v] + 1)
            for lit in motif:
                new = lit.rename(ren)
                if new not in body:
                    body.append(new)
        filler = _random_body(rng, arities, body_size - len(body), nxt + 2)
        body.extend(l for l in filler if l not in body)
        body = body[:body_size]
        first = next((l.args[0] for l in body if l.args), None)
        rules.append(_renumber(Literal("g", () if first is None else (first,)), body))
    return Program(tuple(rules))


def generate(kind: str, seed: int = 0, **params) -> Program:
    """Dispatch by name: ``random``, ``motif``, ``bibd`` or ``induced``."""
    if kind == "random":
        return random_program(random.Random(seed), **params)
    if kind == "motif":
        return motif_program(seed=seed, **params)
    if kind == "bibd":
        if params:
            raise ValueError("bibd takes no parameters")
        return bibd_instance()[0]
    if kind == "induced":
        graph = params.pop("graph", "cube")
        if params:
            raise ValueError(f"unexpected parameters {sorted(params)}")
        return induced_instance(named_graph(graph)).program
    raise ValueError(f"unknown generator {kind!r}")
