"""Instances built from the NP-hardness reduction and the tight K bound.

A 3-regular graph G induces a propositional program with one rule per edge::

    p :- b1, ..., b|E|, ci.

and one candidate invented rule per vertex whose body is the three edge atoms
incident to it.  Optimal refactorings over those candidates pick a vertex set
containing a maximum independent set of G.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

from .logic import Literal, Program, Rule, parse_program


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class UndirectedGraph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise GraphError(f"edge ({u}, {v}) out of range")
            key = frozenset((u, v))
            if key in seen:
                raise GraphError(f"duplicate edge ({u}, {v})")
            seen.add(key)

    def degree(self, v: int) -> int:
        return sum(v in e for e in self.edges)

    def is_regular(self, d: int) -> bool:
        return all(self.degree(v) == d for v in range(self.num_vertices))

    def adjacency(self) -> list[int]:
        """Neighbour bitmask per vertex."""
        adj = [0] * self.num_vertices
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj


def parse_edge_list(text: str) -> UndirectedGraph:
    """``u v`` per line, 0-indexed; ``#`` starts a comment."""
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise GraphError(f"line {lineno}: expected two vertex indices")
        edges.append((int(parts[0]), int(parts[1])))
    n = 1 + max((max(e) for e in edges), default=-1)
    return UndirectedGraph(n, tuple(edges))


# The 3-regular Hamiltonian graph a1..a8 with edges b1..b12 (0-indexed here).
CUBE_EDGES = (
    (0, 4), (0, 5), (0, 7), (1, 2), (1, 3), (1, 6),
    (2, 3), (2, 7), (3, 5), (4, 5), (4, 6), (6, 7),
)


def cube() -> UndirectedGraph:
    return UndirectedGraph(8, CUBE_EDGES)


def hypercube3() -> UndirectedGraph:
    """The 3-dimensional cube Q3: vertices are 3-bit strings, edges flip one bit."""
    edges = tuple((u, u ^ b) for u in range(8) for b in (1, 2, 4) if u < u ^ b)
    return UndirectedGraph(8, edges)


def complete4() -> UndirectedGraph:
    return UndirectedGraph(4, tuple(itertools.combinations(range(4), 2)))


def prism(n: int) -> UndirectedGraph:
    """Two n-cycles joined by a perfect matching (3-regular, Hamiltonian)."""
    if n < 3:
        raise GraphError("prism needs n >= 3")
    edges = []
    for i in range(n):
        edges.append((i, (i + 1) % n))
        edges.append((n + i, n + (i + 1) % n))
        edges.append((i, n + i))
    return UndirectedGraph(2 * n, tuple(edges))


def named_graph(name: str) -> UndirectedGraph:
    if name == "cube":
        return cube()
    if name == "q3":
        return hypercube3()
    if name == "k4":
        return complete4()
    m = re.fullmatch(r"prism(\d+)", name)
    if m:
        return prism(int(m.group(1)))
    raise GraphError(f"unknown graph {name!r}")


@dataclass(frozen=True)
class InducedInstance:
    graph: UndirectedGraph
    program: Program
    candidates: tuple[Rule, ...]  # candidate i belongs to vertex i
    b_atoms: tuple[str, ...]  # edge i -> its atom
    c_atoms: tuple[str, ...]

    def vertex_of_candidate(self, i: int) -> int:
        return i

    def edge_of_atom(self, atom: str) -> int:
        return self.b_atoms.index(atom)

    def candidate_counts(self) -> list[dict[str, int]]:
        """Candidate bodies as predicate count maps (the engine's candidate-set input)."""
        return [{l.predicate: 1 for l in c.body} for c in self.candidates]


def induced_instance(g: UndirectedGraph) -> InducedInstance:
    """The refactoring instance induced by a 3-regular graph.

    Hamiltonicity is the caller's responsibility; it is not checked.
    """
    if not g.is_regular(3):
        raise GraphError("induced instances need a 3-regular graph")
    b = tuple(f"b{i + 1}" for i in range(len(g.edges)))
    c = tuple(f"c{i + 1}" for i in range(len(g.edges)))
    head = Literal("p", ())
    rules = tuple(Rule(head, tuple(Literal(x, ()) for x in (*b, ci))) for ci in c)
    candidates = []
    for v in range(g.num_vertices):
        body = tuple(Literal(b[i], ()) for i, e in enumerate(g.edges) if v in e)
        candidates.append(Rule(Literal(f"a{v + 1}", ()), body))
    return InducedInstance(g, Program(rules), tuple(candidates), b, c)


def chosen_vertices(inst: InducedInstance, invented) -> list[int]:
    """Vertices whose candidate bodies appear among ``invented`` rules."""
    bodies = {frozenset(l.predicate for l in c.body): v for v, c in enumerate(inst.candidates)}
    out = []
    for rule in invented:
        key = frozenset(l.predicate for l in rule.body)
        if key in bodies:
            out.append(bodies[key])
    return sorted(set(out))


def is_independent(g: UndirectedGraph, vertices) -> bool:
    vs = set(vertices)
    return not any(u in vs and v in vs for u, v in g.edges)


def _independent_sets(g: UndirectedGraph):
    adj = g.adjacency()
    n = g.num_vertices
    if n > 24:
        raise GraphError("brute force limited to 24 vertices")
    for mask in range(1 << n):
        if all(not (adj[v] & mask) for v in range(n) if mask >> v & 1):
            yield mask


def _members(mask: int) -> list[int]:
    return [v for v in range(mask.bit_length()) if mask >> v & 1]


def mis_bruteforce(g: UndirectedGraph) -> tuple[int, list[int]]:
    """Independence number and one maximum independent set."""
    best = max(_independent_sets(g), key=lambda m: (bin(m).count("1"), -m))
    return bin(best).count("1"), _members(best)


def maximal_independent_sets(g: UndirectedGraph) -> list[list[int]]:
    adj = g.adjacency()
    out = []
    for mask in _independent_sets(g):
        if all(mask >> v & 1 or adj[v] & mask for v in range(g.num_vertices)):
            out.append(_members(mask))
    return out


def mis_dominating(g: UndirectedGraph) -> int:
    """Independent domination number: size of the smallest maximal independent set."""
    return min(len(s) for s in maximal_independent_sets(g))


def k_bound(n: int, s: int) -> int:
    """Invented rules sufficient for n rules of maximum size s."""
    if n < 1 or s < 2:
        raise ValueError("k_bound needs n >= 1 and s >= 2")
    return math.ceil(n / 4) * math.ceil((s - 1) / 2)


BIBD_BLOCKS = (
    (1, 2, 5, 6, 7, 8),
    (1, 2, 3, 4, 5, 6),
    (1, 2, 3, 4, 7, 8),
    (11, 12, 15, 16, 17, 18),
    (13, 14, 15, 16, 17, 18),
    (11, 12, 13, 14, 17, 18),
    (11, 12, 13, 14, 15, 16),
    (9, 10, 11, 12, 17, 18),
    (9, 10, 13, 14, 15, 16),
    (3, 4, 7, 8, 9, 10),
    (1, 2, 5, 6, 9, 10),
    (3, 4, 5, 6, 7, 8),
)

# claimed optimum for the instance with K = 9 (input 84, reduced by 9)
BIBD_CLAIMED_OPTIMUM = 75


def bibd_text() -> str:
    return "".join("p :- " + ", ".join(f"q{i}" for i in row) + ".\n" for row in BIBD_BLOCKS)


def bibd_instance() -> tuple[Program, int]:
    """The 12-rule block-design program and its claimed optimal size."""
    return parse_program(bibd_text()), BIBD_CLAIMED_OPTIMUM


def bibd_pair_refactoring() -> Program:
    """The nine pair rules q(2i-1), q(2i) and the rules rewritten over them (size 75)."""
    lines = [f"p{i} :- q{2 * i - 1}, q{2 * i}.\n" for i in range(1, 10)]
    for row in BIBD_BLOCKS:
        pairs = sorted({(x + 1) // 2 for x in row})
        lines.append("p :- " + ", ".join(f"p{i}" for i in pairs) + ".\n")
    return parse_program("".join(lines))
