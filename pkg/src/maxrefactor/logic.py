"""Definite logic programs: AST, parsing, printing, unfolding and linearization.

Variables are rule-local non-negative integers, numbered by first occurrence
(head first, then body).  Rule bodies have set semantics: duplicate literals
collapse, but the first-occurrence order is kept so printing is stable.
"""

from __future__ import annotations

import itertools
import re
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ArityError(ValueError):
    pass


class UnfoldError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Literal:
    predicate: str
    args: tuple[int, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def rename(self, mapping: Mapping[int, int]) -> Literal:
        return Literal(self.predicate, tuple(mapping[v] for v in self.args))


@dataclass(frozen=True)
class Rule:
    head: Literal
    body: tuple[Literal, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(dict.fromkeys(self.body)))

    @property
    def size(self) -> int:
        return len(self.body) + 1

    @property
    def variables(self) -> tuple[int, ...]:
        """Distinct variables in first-occurrence order."""
        seen = dict.fromkeys(self.head.args)
        for lit in self.body:
            seen.update(dict.fromkeys(lit.args))
        return tuple(seen)

    @property
    def var_count(self) -> int:
        return len(self.variables)

    def body_only_variables(self) -> set[int]:
        return {v for lit in self.body for v in lit.args} - set(self.head.args)

    def rename(self, mapping: Mapping[int, int]) -> Rule:
        return Rule(self.head.rename(mapping), tuple(lit.rename(mapping) for lit in self.body))

    def normalized(self) -> Rule:
        """Renumber variables 0..n-1 by first occurrence."""
        return self.rename({v: i for i, v in enumerate(self.variables)})

    def __str__(self) -> str:
        return format_rule(self)


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...] = ()
    predicate_table: Mapping[str, int] = field(default=None, compare=False, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        table: dict[str, int] = {}
        for rule in self.rules:
            for lit in (rule.head, *rule.body):
                known = table.setdefault(lit.predicate, lit.arity)
                if known != lit.arity:
                    raise ArityError(
                        f"predicate {lit.predicate!r} used with arity {lit.arity} and {known}"
                    )
        object.__setattr__(self, "predicate_table", table)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __getitem__(self, i: int) -> Rule:
        return self.rules[i]

    @property
    def size(self) -> int:
        return program_size(self)

    def __str__(self) -> str:
        return format_program(self)


# ---------------------------------------------------------------------------
# Concrete syntax

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<neck>:-)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<number>[0-9]+)
  | (?P<punct>[(),.])
  | (?P<error>.)
    """,
    re.VERBOSE,
)


def _tokens(text: str) -> Iterator[tuple[str, str, int, int]]:
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        col = m.start() - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("ws", "comment"):
            continue
        elif kind == "error":
            raise ParseError(f"unexpected character {m.group()!r}", line, col)
        else:
            yield kind, m.group(), line, col
    yield "eof", "", line, len(text) - line_start + 1


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokens(text))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind: str, value: str | None = None):
        tok = self.tokens[self.pos]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            found = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {found!r}", tok[2], tok[3])
        self.pos += 1
        return tok

    def at(self, kind: str, value: str | None = None) -> bool:
        tok = self.tokens[self.pos]
        return tok[0] == kind and (value is None or tok[1] == value)

    def literal(self, names: dict[str, int]) -> Literal:
        _, pred, _, _ = self.take("ident")
        args: list[int] = []
        if self.at("punct", "("):
            self.take("punct", "(")
            while True:
                kind, value, line, col = self.peek()
                if kind in ("ident", "number"):
                    self.pos += 1
                    if self.at("punct", "("):
                        raise ParseError("function terms are not supported", line, col)
                    raise ParseError(f"constant {value!r} not supported (variables only)", line, col)
                _, name, _, _ = self.take("var")
                args.append(names.setdefault(name, len(names)))
                if self.at("punct", ","):
                    self.take("punct", ",")
                    continue
                self.take("punct", ")")
                break
        return Literal(pred, tuple(args))

    def rule(self) -> Rule:
        names: dict[str, int] = {}
        _, _, line, col = self.peek()
        head = self.literal(names)
        body: list[Literal] = []
        if self.at("neck"):
            self.take("neck")
            body.append(self.literal(names))
            while self.at("punct", ","):
                self.take("punct", ",")
                body.append(self.literal(names))
        self.take("punct", ".")
        if len(set(body)) != len(body):
            warnings.warn(f"duplicate body literal dropped in rule at line {line}", stacklevel=4)
        return Rule(head, tuple(body))


def parse_program(text: str) -> Program:
    parser = _Parser(text)
    rules = []
    while not parser.at("eof"):
        rules.append(parser.rule())
    return Program(tuple(rules))


def parse_rule(text: str) -> Rule:
    program = parse_program(text)
    if len(program) != 1:
        raise ValueError(f"expected exactly one rule, got {len(program)}")
    return program[0]


def load_program(path) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())


def _var_name(v: int) -> str:
    return f"V{v}"


def format_literal(lit: Literal) -> str:
    if not lit.args:
        return lit.predicate
    return f"{lit.predicate}({','.join(_var_name(v) for v in lit.args)})"


def format_rule(rule: Rule) -> str:
    rule = rule.normalized()
    head = format_literal(rule.head)
    if not rule.body:
        return head + "."
    return f"{head} :- {', '.join(format_literal(lit) for lit in rule.body)}."


def format_program(program: Program | Iterable[Rule]) -> str:
    return "".join(format_rule(r) + "\n" for r in program)


# ---------------------------------------------------------------------------
# Measures

def program_size(program: Program | Iterable[Rule]) -> int:
    return sum(r.size for r in program)


def predicates(program: Program) -> dict[str, int]:
    """Body predicate symbols with their arities (head-only symbols excluded)."""
    return {lit.predicate: lit.arity for r in program for lit in r.body}


# ---------------------------------------------------------------------------
# Unfolding

def _resolve(clause: Rule, rule: Rule) -> Rule:
    head = rule.head
    parent: dict = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return
        # clause variables are preferred as representatives
        if ra[0] == "c" and (rb[0] != "c" or ra[1] <= rb[1]):
            parent[rb] = ra
        else:
            parent[ra] = rb

    kept: list[Literal] = []
    occurrences = 0
    for lit in clause.body:
        if lit.predicate == head.predicate and lit.arity == head.arity:
            for hv, cv in zip(head.args, lit.args):
                union(("c", cv), ("r", occurrences, hv))
            occurrences += 1
        else:
            kept.append(lit)

    def sub_clause(v: int) -> int:
        root = find(("c", v))
        return root[1] if root[0] == "c" else v

    new_body = [Literal(l.predicate, tuple(sub_clause(v) for v in l.args)) for l in kept]
    for i in range(occurrences):
        for lit in rule.body:
            args = []
            for v in lit.args:
                root = find(("r", i, v))
                args.append(root[1])
            new_body.append(Literal(lit.predicate, tuple(args)))
    new_head = Literal(clause.head.predicate, tuple(sub_clause(v) for v in clause.head.args))
    return Rule(new_head, tuple(new_body)).normalized()


def unfold(program: Program | Iterable[Rule], rule: Rule) -> Program:
    """Resolve every body occurrence of ``rule``'s head predicate against ``rule``."""
    if rule.body_only_variables():
        raise UnfoldError(f"rule {format_rule(rule)} has variables occurring only in its body")
    head = rule.head
    out = []
    for clause in program:
        if any(l.predicate == head.predicate and l.arity == head.arity for l in clause.body):
            out.append(_resolve(clause, rule))
        else:
            out.append(clause)
    return Program(tuple(out))


def unfold_all(program: Program | Iterable[Rule], rules: Iterable[Rule]) -> Program:
    rules = list(rules)
    heads = {r.head.predicate for r in rules}
    for r in rules:
        if any(l.predicate in heads for l in r.body):
            raise UnfoldError(
                f"invented rule {format_rule(r)} references an invented predicate"
            )
    result = program if isinstance(program, Program) else Program(tuple(program))
    for r in rules:
        result = unfold(result, r)
    return result


# ---------------------------------------------------------------------------
# Linear invented rules

@dataclass(frozen=True)
class LinearAuxRule:
    """An invented rule whose body variables all occur exactly once.

    Determined entirely by how many copies of each body predicate it has;
    slots are laid out in (predicate, copy) order with consecutive variables.
    """

    name: str
    counts: tuple[tuple[str, int], ...]
    arities: tuple[tuple[str, int], ...]

    def __init__(self, name: str, counts: Mapping[str, int], arities: Mapping[str, int]):
        counts = {p: m for p, m in counts.items() if m > 0}
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "counts", tuple(sorted(counts.items())))
        object.__setattr__(self, "arities", tuple(sorted((p, arities[p]) for p in counts)))

    @property
    def count_map(self) -> dict[str, int]:
        return dict(self.counts)

    @property
    def slot_order(self) -> list[tuple[str, int]]:
        return [(p, i) for p, m in self.counts for i in range(m)]

    @property
    def head_arity(self) -> int:
        ar = dict(self.arities)
        return sum(m * ar[p] for p, m in self.counts)

    @property
    def body_size(self) -> int:
        return sum(m for _, m in self.counts)

    @property
    def size(self) -> int:
        return self.body_size + 1

    def to_rule(self) -> Rule:
        ar = dict(self.arities)
        body, nxt = [], 0
        for p, _ in self.slot_order:
            body.append(Literal(p, tuple(range(nxt, nxt + ar[p]))))
            nxt += ar[p]
        return Rule(Literal(self.name, tuple(range(nxt))), tuple(body))


def linearize(rule: Rule, name: str | None = None) -> LinearAuxRule:
    counts = Counter(lit.predicate for lit in rule.body)
    arities = {lit.predicate: lit.arity for lit in rule.body}
    return LinearAuxRule(name or rule.head.predicate, counts, arities)


def relinearize_literal(rule: Rule, call: Literal, linear: LinearAuxRule) -> Literal:
    """Rewrite a call to ``rule`` as the equivalent call to ``linear``.

    The call's arguments are pushed through ``rule``'s body and then read off
    slot by slot; same-predicate literals fill their slots in body order.
    """
    binding = dict(zip(rule.head.args, call.args))
    by_pred: dict[str, list[Literal]] = {}
    for lit in rule.body:
        by_pred.setdefault(lit.predicate, []).append(lit)
    args: list[int] = []
    for p, i in linear.slot_order:
        args.extend(binding[v] for v in by_pred[p][i].args)
    return Literal(linear.name, tuple(args))


def check_invented(rule: Rule, program: Program) -> None:
    """Raise ValueError unless ``rule`` is a valid invented rule for ``program``."""
    if rule.head.predicate in program.predicate_table:
        raise ValueError(f"head predicate {rule.head.predicate!r} occurs in the input program")
    body_preds = predicates(program)
    for lit in rule.body:
        if lit.predicate not in body_preds:
            raise ValueError(f"body predicate {lit.predicate!r} is not a body predicate of the input")
    body_vars = {v for lit in rule.body for v in lit.args}
    if body_vars != set(rule.head.args):
        raise ValueError("head variables must be exactly the body variables")


# ---------------------------------------------------------------------------
# Alpha-equivalence

def _signature(rule: Rule):
    return (
        rule.head.predicate,
        rule.head.arity,
        len(rule.body),
        rule.var_count,
        tuple(sorted(Counter((l.predicate, l.arity) for l in rule.body).items())),
    )


def rule_matchings(a: Rule, b: Rule) -> Iterator[dict[int, int]]:
    """Yield every variable bijection mapping ``a`` onto ``b`` (body as a set)."""
    if _signature(a) != _signature(b):
        return
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}

    def bind(xs: Sequence[int], ys: Sequence[int]) -> list[int] | None:
        added = []
        for x, y in zip(xs, ys):
            if x in fwd:
                if fwd[x] != y:
                    break
            elif y in bwd:
                break
            else:
                fwd[x] = y
                bwd[y] = x
                added.append(x)
        else:
            return added
        undo(added)
        return None

    def undo(added):
        for x in added:
            del bwd[fwd.pop(x)]

    if bind(a.head.args, b.head.args) is None:
        return
    # most constrained (rarest predicate) literals first
    freq = Counter(l.predicate for l in a.body)
    order = sorted(a.body, key=lambda l: (freq[l.predicate], l.predicate))
    candidates = {p: [l for l in b.body if l.predicate == p] for p in freq}
    used: set[Literal] = set()

    def search(i: int) -> Iterator[dict[int, int]]:
        if i == len(order):
            yield dict(fwd)
            return
        lit = order[i]
        for target in candidates[lit.predicate]:
            if target in used:
                continue
            added = bind(lit.args, target.args)
            if added is None:
                continue
            used.add(target)
            yield from search(i + 1)
            used.discard(target)
            undo(added)

    yield from search(0)


def rule_alpha_equal(a: Rule, b: Rule) -> bool:
    return next(rule_matchings(a, b), None) is not None


def alpha_equal(p: Program | Iterable[Rule], q: Program | Iterable[Rule]) -> bool:
    """True iff the rule multisets agree up to variable renaming and body order."""
    left, right = list(p), list(q)
    if len(left) != len(right):
        return False
    pool: dict[tuple, list[Rule]] = {}
    for r in right:
        pool.setdefault(_signature(r), []).append(r)
    for r in left:
        bucket = pool.get(_signature(r), [])
        for i, cand in enumerate(bucket):
            if rule_alpha_equal(r, cand):
                del bucket[i]
                break
        else:
            return False
    return True


def first_mismatch(p: Program | Iterable[Rule], q: Program | Iterable[Rule]) -> Rule | None:
    """A rule of ``p`` with no partner in ``q`` (or vice versa), else None."""
    left, right = list(p), list(q)
    remaining = list(right)
    for r in left:
        for i, cand in enumerate(remaining):
            if rule_alpha_equal(r, cand):
                del remaining[i]
                break
        else:
            return r
    return remaining[0] if remaining else None


def rename_predicates(program: Program | Iterable[Rule], mapping: Mapping[str, str]) -> Program:
    def ren(l: Literal) -> Literal:
        return Literal(mapping.get(l.predicate, l.predicate), l.args)

    return Program(tuple(Rule(ren(r.head), tuple(ren(l) for l in r.body)) for r in program))


def permute_arguments(program: Program | Iterable[Rule], predicate: str, perm: Sequence[int]) -> Program:
    """Reorder the arguments of every ``predicate`` literal: new[i] = old[perm[i]]."""

    def apply(l: Literal) -> Literal:
        if l.predicate != predicate:
            return l
        return Literal(l.predicate, tuple(l.args[j] for j in perm))

    return Program(tuple(Rule(apply(r.head), tuple(apply(l) for l in r.body)) for r in program))


def alpha_equal_modulo_aux(
    p: Program | Iterable[Rule], q: Program | Iterable[Rule], aux: Iterable[str]
) -> bool:
    """Alpha-equivalence allowing any consistent head-argument permutation per aux predicate.

    Candidate permutations come from matching the defining rules of each aux
    predicate, so only permutations that keep the definitions aligned are tried.
    """
    p, q = list(p), list(q)
    aux = list(aux)
    options: list[list[tuple[int, ...]]] = []
    for name in aux:
        defs_p = [r for r in p if r.head.predicate == name]
        defs_q = [r for r in q if r.head.predicate == name]
        if len(defs_p) != 1 or len(defs_q) != 1:
            return alpha_equal(p, q)
        a, b = defs_p[0], defs_q[0]
        if a.head.arity != b.head.arity or len(a.body) != len(b.body):
            return False
        perms = set()
        # a with head permuted by perm must equal b: head(b)[i] = m(head(a)[perm[i]])
        body_a = Rule(Literal("_", ()), a.body)
        body_b = Rule(Literal("_", ()), b.body)
        for m in rule_matchings(body_a, body_b):
            pos = {v: i for i, v in enumerate(a.head.args)}
            inv = {y: x for x, y in m.items()}
            try:
                perms.add(tuple(pos[inv[y]] for y in b.head.args))
            except KeyError:
                continue
        if not perms:
            return False
        options.append(sorted(perms))
    for combo in itertools.product(*options):
        cur = Program(tuple(p))
        for name, perm in zip(aux, combo):
            cur = permute_arguments(cur, name, perm)
        if alpha_equal(cur, q):
            return True
    return False
