"""End-to-end refactoring: encode, solve, decode, verify."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .decode import RefactoringSolution, decode, identity_solution, verify
from .encoder import Encoding, encode
from .logic import Program
from .solver import OPTIMAL, SolveResult, SolverError, export_and_run_external, solve

log = logging.getLogger(__name__)


class VerificationError(RuntimeError):
    pass


@dataclass
class Outcome:
    solution: RefactoringSolution
    result: SolveResult
    encoding: Encoding | None
    # (elapsed seconds, refactored program size); starts with the input at t=0
    trace: list[tuple[float, int]] = field(default_factory=list)

    @property
    def status(self) -> str:
        return self.result.status

    @property
    def size(self) -> int:
        return self.solution.output_size


def refactor(
    program: Program,
    k: int = 2,
    timeout: float = 60.0,
    backend: str = "builtin",
    seed: int = 0,
    workers: int = 1,
    symmetry: bool = True,
    solver_cmd: Sequence[str] | str | None = None,
    wcnf_2022: bool = False,
    candidates: Sequence[Mapping[str, int]] | None = None,
    on_solution: Callable[[float, RefactoringSolution], None] | None = None,
    target_size: int | None = None,
) -> Outcome:
    """Smallest refactoring of ``program`` with at most ``k`` invented rules.

    Every returned solution has been checked by unfolding; a failed check
    raises VerificationError instead of returning a wrong program.  With
    ``target_size`` the search stops as soon as a refactoring that small is found.
    """
    if len(program) == 0:
        raise ValueError("empty program")
    input_size = program.size
    if k == 0 or not any(r.body for r in program):
        sol = identity_solution(program)
        return Outcome(sol, SolveResult(OPTIMAL, frozenset(), 0, [(0.0, 0)]), None, [(0.0, input_size)])

    t0 = time.monotonic()
    enc = encode(program, k, symmetry=symmetry, candidates=candidates)
    trace: list[tuple[float, int]] = [(0.0, input_size)]

    def seen(elapsed: float, cost: int, model) -> None:
        size = input_size + cost + enc.formula.objective_offset
        if size < trace[-1][1]:
            trace.append((time.monotonic() - t0, size))
        if on_solution is not None:
            on_solution(elapsed, decode(model, enc, program))

    remaining = max(1e-3, timeout - (time.monotonic() - t0))
    if backend == "builtin":
        target = None if target_size is None else target_size - input_size - enc.formula.objective_offset
        result = solve(enc.formula, remaining, on_incumbent=seen, seed=seed, workers=workers,
                       hint=enc.identity_hint(), target=target)
    elif backend == "external":
        result = export_and_run_external(enc.formula, solver_cmd, remaining, wcnf_2022=wcnf_2022,
                                         on_incumbent=seen)
    else:
        raise ValueError(f"unknown backend {backend!r}")

    if result.status == "unsat":
        raise SolverError("hard clauses unsatisfiable: encoder bug")
    if result.model is None:
        # nothing found in time: the input itself is always a valid answer
        return Outcome(identity_solution(program), result, enc, trace)

    sol = decode(result.model, enc, program)
    verdict = verify(program, sol)
    if not verdict:
        raise VerificationError(verdict.message)
    expected = result.cost + enc.formula.objective_offset
    # collapsed duplicate calls can only make a non-optimal model smaller
    if sol.objective_value > expected or (result.status == OPTIMAL and sol.objective_value != expected):
        raise VerificationError(
            f"decoded objective {sol.objective_value} differs from solver cost {expected}"
        )
    return Outcome(sol, result, enc, trace)
