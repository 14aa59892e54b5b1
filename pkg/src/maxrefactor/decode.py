"""Turning solver models into refactored programs, checking them, and scoring them."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .encoder import Encoding, VariableLayout, lit_value
from .logic import (
    LinearAuxRule,
    Literal,
    Program,
    Rule,
    check_invented,
    first_mismatch,
    format_program,
    format_rule,
    program_size,
    unfold,
    unfold_all,
)

log = logging.getLogger(__name__)


class DecodeError(ValueError):
    pass


# (aux index k, call index t) -> covered body-literal indices of the input rule
Coverage = dict[tuple[int, int], list[int]]


@dataclass
class RefactoringSolution:
    invented: tuple[Rule, ...]
    refactored: Program
    coverage_map: dict[int, Coverage]
    objective_value: int
    input_size: int
    output_size: int
    linear: tuple[LinearAuxRule, ...] = ()
    # aux index k -> predicate name of its invented rule
    aux_names: dict[int, str] = field(default_factory=dict)

    @property
    def program(self) -> Program:
        return Program(self.invented + self.refactored.rules)

    @property
    def cr(self) -> Fraction:
        return compression_rate(self.input_size, self.output_size)

    def to_text(self) -> str:
        header = (
            f"% objective {self.objective_value}\n"
            f"% input_size {self.input_size}\n"
            f"% output_size {self.output_size}\n"
            f"% cr {float(self.cr):.6f}\n"
        )
        return header + format_program(self.program)

    def to_dict(self) -> dict:
        return {
            "objective": self.objective_value,
            "input_size": self.input_size,
            "output_size": self.output_size,
            "cr": float(self.cr),
            "invented": [format_rule(r) for r in self.invented],
            "refactored": [format_rule(r) for r in self.refactored],
            "coverage_map": {
                str(c): [
                    {"aux": self.aux_names.get(k, f"aux{k}"), "k": k, "t": t, "literals": lits}
                    for (k, t), lits in sorted(cov.items())
                ]
                for c, cov in sorted(self.coverage_map.items())
            },
        }


def identity_solution(program: Program) -> RefactoringSolution:
    size = program_size(program)
    return RefactoringSolution((), program, {c: {} for c in range(len(program))}, 0, size, size)


def aux_name(k: int, taken: set[str]) -> str:
    name = f"aux{k}"
    while name in taken:
        name += "_"
    return name


def decode(model, encoding: Encoding | VariableLayout, program: Program | None = None) -> RefactoringSolution:
    """Build the refactored program described by ``model``.

    Each active call (k, t) in rule c becomes one aux literal whose arguments
    are assembled slot by slot: p-slots take the covered p-literals of that
    call in body order; spare p-slots repeat the first p-literal of the rule.
    """
    if isinstance(encoding, Encoding):
        lay = encoding.layout
        bad = encoding.ir.violations(model)
        if bad:
            raise DecodeError(f"model violates hard constraints: {sorted(set(bad))}")
    else:
        lay = encoding
    program = program if program is not None else lay.program
    val = lambda v: lit_value(model, v)  # noqa: E731

    taken = set(program.predicate_table)
    arities = {l.predicate: l.arity for r in program for l in r.body}
    aux: dict[int, LinearAuxRule] = {}
    for k in range(1, lay.k + 1):
        if not val(lay.used[k]):
            continue
        counts = {p: m for (k2, p, m), v in lay.r.items() if k2 == k and val(v)}
        name = aux_name(k, taken)
        taken.add(name)
        aux[k] = LinearAuxRule(name, counts, arities)

    refactored: list[Rule] = []
    coverage: dict[int, Coverage] = {}
    objective = 0
    collapsed = 0
    for c, rule in enumerate(program):
        cov: Coverage = {}
        calls: list[Literal] = []
        covered = {a for a in range(len(rule.body)) if val(lay.covered[c, a])}
        for k, lin in aux.items():
            for t in range(1, lay.t_max[c] + 1):
                if not val(lay.use[c, k, t]):
                    break
                mine = [a for a in range(len(rule.body)) if val(lay.cover[c, a, k, t])]
                cov[k, t] = mine
                calls.append(_call(rule, lin, mine))
        if not aux or not cov:
            # stray use/cover bits of unused aux rules cannot occur under the hard constraints
            if covered:
                raise DecodeError(f"rule {c} has covered literals but no aux call")
        kept = [lit for a, lit in enumerate(rule.body) if a not in covered]
        new = Rule(rule.head, tuple(kept + calls))
        if len(new.body) != len(kept) + len(calls):
            collapsed += len(kept) + len(calls) - len(new.body)
            log.warning("rule %d: identical aux calls collapsed", c)
        if any(not lits for lits in cov.values()):
            log.warning("rule %d: aux call covering no literal", c)
        refactored.append(new)
        coverage[c] = cov
        objective += len(calls) - len(covered)
    objective += sum(lin.size for lin in aux.values()) - collapsed
    input_size = program_size(program)
    out = RefactoringSolution(
        invented=tuple(lin.to_rule() for lin in aux.values()),
        refactored=Program(tuple(refactored)),
        coverage_map=coverage,
        objective_value=objective,
        input_size=input_size,
        output_size=input_size + objective,
        linear=tuple(aux.values()),
        aux_names={k: lin.name for k, lin in aux.items()},
    )
    return out


def _call(rule: Rule, lin: LinearAuxRule, covered: list[int]) -> Literal:
    by_pred: dict[str, list[Literal]] = {}
    for a in covered:
        lit = rule.body[a]
        by_pred.setdefault(lit.predicate, []).append(lit)
    first = {}
    for lit in rule.body:
        first.setdefault(lit.predicate, lit)
    args: list[int] = []
    for p, i in lin.slot_order:
        mine = by_pred.get(p, [])
        src = mine[i] if i < len(mine) else first[p]
        args.extend(src.args)
    return Literal(lin.name, tuple(args))


@dataclass
class Verdict:
    ok: bool
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify(program: Program, sol: RefactoringSolution) -> Verdict:
    """Check that ``sol`` unfolds back to ``program`` and that its bookkeeping adds up."""
    if len(sol.refactored) != len(program):
        return Verdict(False, "refactored program has a different number of rules")
    for r in sol.invented:
        try:
            check_invented(r, program)
        except ValueError as exc:
            return Verdict(False, f"invalid invented rule {format_rule(r)}: {exc}")
    try:
        unfolded = unfold_all(sol.refactored, sol.invented)
    except ValueError as exc:
        return Verdict(False, f"unfolding failed: {exc}")
    bad = first_mismatch(unfolded, program)
    if bad is not None:
        return Verdict(False, f"unfolding does not reproduce the input; first mismatch: {format_rule(bad)}")

    by_name = {r.head.predicate: r for r in sol.invented}
    names = {k: sol.aux_names.get(k, f"aux{k}") for c in sol.coverage_map for (k, _) in sol.coverage_map[c]}
    for c, rule in enumerate(program):
        cov = sol.coverage_map.get(c, {})
        new = sol.refactored[c]
        listed = {a for lits in cov.values() for a in lits}
        for a, lit in enumerate(rule.body):
            if a not in listed and lit not in new.body:
                return Verdict(False, f"rule {c}: literal {a} is neither kept nor covered")
        calls = [l for l in new.body if l.predicate in by_name]
        if len(calls) != len(cov):
            return Verdict(False, f"rule {c}: {len(calls)} aux calls but {len(cov)} coverage entries")
        for (k, t), lits in cov.items():
            name = names[k]
            if name not in by_name:
                return Verdict(False, f"rule {c}: coverage refers to unknown aux {name}")
            produced = _produced(rule, name, calls, by_name[name])
            missing = [a for a in lits if rule.body[a] not in produced]
            if missing:
                return Verdict(False, f"rule {c}: aux {name} does not produce literals {missing}")

    size = program_size(sol.program)
    if size != sol.output_size:
        return Verdict(False, f"output_size {sol.output_size} but program has size {size}")
    if sol.input_size != program_size(program):
        return Verdict(False, "input_size does not match the input program")
    if sol.output_size != sol.input_size + sol.objective_value:
        return Verdict(False, "output_size != input_size + objective_value")
    return Verdict(True)


def _produced(rule: Rule, name: str, calls: list[Literal], aux: Rule) -> set[Literal]:
    """Literals (in the rule's variables) generated by unfolding its calls of ``name``."""
    out: set[Literal] = set()
    for call in calls:
        if call.predicate != name:
            continue
        # unfold a throwaway rule whose body is just this call
        probe = Rule(Literal("_probe", tuple(sorted(set(call.args)))), (call,))
        res = unfold([probe], aux)[0]
        # map back: normalized() renumbered; realign via the probe head
        back = dict(zip(res.head.args, probe.head.args))
        out.update(l.rename(back) for l in res.body)
    return out


def compression_rate(input_size: int, output_size: int) -> Fraction:
    if input_size <= 0:
        raise ValueError("input_size must be positive")
    return Fraction(input_size - output_size, input_size)


def normalized_gap(best_size: int, optimal_size: int, input_size: int) -> Fraction:
    """1 when nothing has been found beyond the input, 0 at the optimum."""
    if input_size <= optimal_size:
        raise ValueError("input_size must exceed optimal_size")
    return Fraction(best_size - optimal_size, input_size - optimal_size)


def report(
    sol: RefactoringSolution,
    status: str,
    trace: list[tuple[float, int]] | None = None,
    wall_time: float | None = None,
    extra: Mapping | None = None,
) -> dict:
    """Machine-readable report; timing fields are only present when given."""
    out = {"status": status, **sol.to_dict()}
    if trace is not None:
        out["trace"] = [[round(t, 6), s] for t, s in trace]
    if wall_time is not None:
        out["wall_time"] = round(wall_time, 6)
    if extra:
        out.update(extra)
    return out


def dumps_report(rep: dict) -> str:
    return json.dumps(rep, indent=2, sort_keys=True)


def split_solution(program: Program, solution: Program) -> tuple[tuple[Rule, ...], Program]:
    """Separate invented rules (heads not defined or used in ``program``) from refactored ones."""
    known = set(program.predicate_table)
    invented = tuple(r for r in solution if r.head.predicate not in known)
    refactored = Program(tuple(r for r in solution if r.head.predicate in known))
    return invented, refactored


def verify_program(program: Program, solution: Program, header: Mapping[str, str] | None = None) -> Verdict:
    """Check a refactored program read back from disk against its input.

    ``header`` holds the ``% key value`` comment lines of the solution file;
    any sizes or rates given there must match the files.
    """
    invented, refactored = split_solution(program, solution)
    if len(refactored) != len(program):
        return Verdict(False, f"{len(refactored)} refactored rules for {len(program)} input rules")
    for r in invented:
        try:
            check_invented(r, program)
        except ValueError as exc:
            return Verdict(False, f"invalid invented rule {format_rule(r)}: {exc}")
    try:
        unfolded = unfold_all(refactored, invented)
    except ValueError as exc:
        return Verdict(False, f"unfolding failed: {exc}")
    bad = first_mismatch(unfolded, program)
    if bad is not None:
        return Verdict(False, f"unfolding does not reproduce the input; first mismatch: {format_rule(bad)}")
    sizes = {"input_size": program_size(program), "output_size": program_size(solution)}
    sizes["objective"] = sizes["output_size"] - sizes["input_size"]
    for key, value in (header or {}).items():
        if key in sizes and int(value) != sizes[key]:
            return Verdict(False, f"header {key} {value} but the files give {sizes[key]}")
        if key == "cr":
            cr = float(compression_rate(sizes["input_size"], sizes["output_size"]))
            if abs(float(value) - cr) > 5e-7:
                return Verdict(False, f"header cr {value} but the files give {cr:.6f}")
    return Verdict(True)


def read_header(text: str) -> dict[str, str]:
    """``% key value`` lines at the top of a solution file."""
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line.startswith("%"):
            if line:
                break
            continue
        parts = line[1:].split()
        if len(parts) == 2:
            out[parts[0]] = parts[1]
    return out
