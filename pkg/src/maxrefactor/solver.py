"""Optimal and anytime solving of weighted MaxSAT formulas.

The builtin backend is a solution-improving linear search: find any model,
then repeatedly demand a strictly cheaper one until the SAT core reports
unsatisfiability (optimal) or the wall-clock budget runs out (feasible).
The external backend runs a MaxSAT Evaluation style binary on a WCNF file.
"""

from __future__ import annotations

import logging
import multiprocessing as mp
import os
import random
import shlex
import subprocess
import tempfile
import threading
import time
from queue import Empty
from dataclasses import dataclass, field
from typing import Callable, Sequence

from pysat.card import ITotalizer
from pysat.solvers import Solver

from .encoder import WcnfFormula

log = logging.getLogger(__name__)

OPTIMAL, FEASIBLE, UNSAT, UNKNOWN = "optimal", "feasible", "unsat", "unknown"

SOLVER_ENV = "MAXREFACTOR_SOLVER"
SAT_BACKEND = "cadical195"

IncumbentCallback = Callable[[float, int, frozenset], None]


class SolverError(RuntimeError):
    def __init__(self, message: str, result: "SolveResult | None" = None):
        super().__init__(message)
        self.result = result


@dataclass
class SolveResult:
    status: str
    model: frozenset[int] | None = None
    cost: int | None = None
    incumbents: list[tuple[float, int]] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def has_model(self) -> bool:
        return self.model is not None


def _violation_literals(f: WcnfFormula, top: int) -> tuple[list[list[int]], list[int], list[int], int]:
    """Hard clauses plus one literal per soft clause that is true iff it is falsified."""
    extra: list[list[int]] = []
    viol, weights = [], []
    for w, clause in f.soft:
        if len(clause) == 1:
            viol.append(-clause[0])
        else:
            top += 1
            extra.append([*clause, top])
            viol.append(top)
        weights.append(w)
    return extra, viol, weights, top


class _Search:
    """One linear-search worker."""

    def __init__(self, f: WcnfFormula, seed: int, worker: int):
        self.f = f
        self.sat = Solver(name=SAT_BACKEND)
        for clause in f.hard:
            self.sat.add_clause(list(clause))
        extra, self.viol, self.weights, self.top = _violation_literals(f, f.num_vars)
        for clause in extra:
            self.sat.add_clause(clause)
        if worker > 0:
            rng = random.Random(seed * 7919 + worker)
            self.sat.set_phases([v if rng.random() < 0.5 else -v for v in range(1, f.num_vars + 1)])
        else:
            # prefer satisfying soft clauses
            self.sat.set_phases([-l for l in self.viol])
        self.totalizer: ITotalizer | None = None

    def bound(self, limit: int) -> None:
        """Require total falsified weight <= limit."""
        if limit < 0:
            self.sat.add_clause([])
            return
        if self.totalizer is None:
            expanded = [l for l, w in zip(self.viol, self.weights) for _ in range(w)]
            self.totalizer = ITotalizer(lits=expanded, ubound=limit + 1, top_id=self.top)
            for clause in self.totalizer.cnf.clauses:
                self.sat.add_clause(clause)
        rhs = self.totalizer.rhs
        if limit < len(rhs):
            self.sat.add_clause([-rhs[limit]])

    def run(self, assumptions: Sequence[int] = ()) -> bool:
        return self.sat.solve(assumptions=list(assumptions))

    def model(self) -> frozenset[int]:
        return frozenset(l for l in self.sat.get_model() if 0 < l <= self.f.num_vars)

    def close(self):
        self.sat.delete()


def _worker(f: WcnfFormula, seed: int, index: int, hint, best, queue) -> None:
    """Run one linear search, reporting ("model", m) and ("proof", limit) messages.

    Only the parent writes ``best``, so any cost read from it has already been
    delivered there as a model.

    ("proof", limit) means no model of cost <= limit exists; limit -1 with no
    model means the hard clauses are unsatisfiable.
    """
    search = _Search(f, seed, index)
    own = None
    try:
        if index == 0 and hint:
            if search.run(hint):
                model = search.model()
                own = f.cost(model)
                queue.put(("model", model))
        while True:
            shared = best.value
            limit = None if shared < 0 else shared - 1
            if own is not None and (limit is None or own - 1 < limit):
                limit = own - 1
            if limit is not None:
                if limit < 0:
                    queue.put(("proof", -1))
                    return
                search.bound(limit)
            if not search.run():
                queue.put(("proof", -1 if limit is None else limit))
                return
            model = search.model()
            own = f.cost(model)
            queue.put(("model", model))
    finally:
        search.close()


def solve(
    f: WcnfFormula,
    budget: float = 60.0,
    on_incumbent: IncumbentCallback | None = None,
    seed: int = 0,
    workers: int = 1,
    hint: Sequence[int] | None = None,
    target: int | None = None,
) -> SolveResult:
    """Minimise the falsified soft weight of ``f`` within ``budget`` seconds.

    Each search runs in a child process so the budget can be enforced by
    termination, whatever the SAT core.  ``hint`` is a set of assumption
    literals tried once before the search; if consistent, its model becomes
    the first incumbent.  With ``workers > 1`` phase-randomised searches race
    and share the best cost found so far.  With ``target`` the search stops
    early, as feasible, once a model of cost <= target is found.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    start = time.monotonic()
    deadline = start + budget
    ctx = mp.get_context("fork")
    queue = ctx.Queue()
    best = ctx.Value("q", -1)
    procs = [
        ctx.Process(target=_worker, args=(f, seed, i, list(hint or ()), best, queue), daemon=True)
        for i in range(max(1, workers))
    ]
    for p in procs:
        p.start()

    cost = model = None
    status = UNKNOWN
    incumbents: list[tuple[float, int]] = []
    finished = 0
    try:
        while finished < len(procs):
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                break
            try:
                kind, payload = queue.get(timeout=min(remaining, 0.5))
            except Empty:
                if not any(p.is_alive() for p in procs) and queue.empty():
                    raise SolverError("all search processes died")
                continue
            if kind == "model":
                c = f.cost(payload)
                if cost is None or c < cost:
                    cost, model = c, payload
                    with best.get_lock():
                        best.value = c
                    elapsed = time.monotonic() - start
                    incumbents.append((elapsed, c))
                    if on_incumbent is not None:
                        on_incumbent(elapsed, c, payload)
                    if c == 0:
                        status = OPTIMAL
                        break
                    if target is not None and c <= target:
                        break
                continue
            finished += 1
            # a proof only settles the question for the bound that worker imposed
            if payload < 0 and cost is None:
                status = UNSAT
                break
            if cost is not None and cost <= payload + 1:
                status = OPTIMAL
                break
    finally:
        for p in procs:
            if p.is_alive():
                p.kill()
        for p in procs:
            p.join()
        queue.close()
    if status == UNKNOWN and model is not None:
        status = FEASIBLE
    return SolveResult(status, model, cost, incumbents, time.monotonic() - start)


# ---------------------------------------------------------------------------
# External solvers

def default_solver_command() -> list[str] | None:
    cmd = os.environ.get(SOLVER_ENV)
    return shlex.split(cmd) if cmd else None


def parse_solver_output(lines: Sequence[tuple[float, str]], num_vars: int):
    """Extract (status line, costs with timestamps, model) from MaxSAT Evaluation output."""
    status = None
    costs: list[tuple[float, int]] = []
    lits: list[int] = []
    bits: str | None = None
    for stamp, raw in lines:
        line = raw.strip()
        if not line:
            continue
        tag, _, rest = line.partition(" ")
        rest = rest.strip()
        if tag == "s":
            status = rest
        elif tag == "o":
            costs.append((stamp, int(rest.split()[0])))
        elif tag == "v":
            tokens = rest.split()
            if len(tokens) == 1 and set(tokens[0]) <= {"0", "1"} and len(tokens[0]) in (num_vars, 0) or (
                len(tokens) == 1 and set(tokens[0]) <= {"0", "1"} and len(tokens[0]) > 1
            ):
                bits = tokens[0]
            else:
                lits.extend(int(t) for t in tokens if t != "0")
    model = None
    if bits is not None:
        model = frozenset(i + 1 for i, b in enumerate(bits) if b == "1")
    elif lits:
        model = frozenset(l for l in lits if l > 0)
    return status, costs, model


_STATUS = {
    "OPTIMUM FOUND": OPTIMAL,
    "SATISFIABLE": FEASIBLE,
    "UNSATISFIABLE": UNSAT,
    "UNKNOWN": UNKNOWN,
}


def export_and_run_external(
    f: WcnfFormula,
    solver_command: Sequence[str] | str | None = None,
    budget: float = 60.0,
    wcnf_2022: bool = False,
    on_incumbent: IncumbentCallback | None = None,
) -> SolveResult:
    """Write ``f`` to a temporary WCNF file and run ``solver_command`` on it.

    The returned model is re-checked against the hard clauses; a model that
    fails the check raises SolverError.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    if solver_command is None:
        solver_command = default_solver_command()
        if solver_command is None:
            raise SolverError(f"no solver command given and ${SOLVER_ENV} is unset")
    if isinstance(solver_command, str):
        solver_command = shlex.split(solver_command)

    with tempfile.TemporaryDirectory(prefix="maxrefactor-") as tmp:
        path = os.path.join(tmp, "formula.wcnf")
        f.write(path, wcnf_2022=wcnf_2022)
        start = time.monotonic()
        try:
            proc = subprocess.Popen(
                [*solver_command, path],
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
            )
        except OSError as exc:
            raise SolverError(f"cannot start solver: {exc}") from exc

        lines: list[tuple[float, str]] = []

        def pump():
            for line in proc.stdout:
                lines.append((time.monotonic() - start, line))

        reader = threading.Thread(target=pump, daemon=True)
        reader.start()
        timed_out = False
        try:
            proc.wait(timeout=budget)
        except subprocess.TimeoutExpired:
            timed_out = True
            proc.kill()
            proc.wait()
        reader.join(timeout=5)
        elapsed = time.monotonic() - start

    status_text, costs, model = parse_solver_output(lines, f.num_vars)
    if status_text is None and not timed_out:
        raise SolverError(f"malformed solver output (no 's' line), exit code {proc.returncode}")
    status = _STATUS.get(status_text, UNKNOWN) if status_text else UNKNOWN

    if status == UNSAT:
        return SolveResult(UNSAT, None, None, [], elapsed)
    if model is None:
        if status in (OPTIMAL, FEASIBLE):
            raise SolverError("solver reported a solution but printed no model")
        return SolveResult(UNKNOWN, None, None, [], elapsed)
    if not f.satisfies_hard(model):
        raise SolverError("model fails hard clauses", SolveResult(UNKNOWN, None, None, [], elapsed))

    cost = f.cost(model)
    incumbents: list[tuple[float, int]] = []
    for stamp, c in costs:
        if not incumbents or c < incumbents[-1][1]:
            incumbents.append((stamp, c))
    if not incumbents or incumbents[-1][1] != cost:
        incumbents = [x for x in incumbents if x[1] > cost] + [(elapsed, cost)]
    if on_incumbent is not None:
        on_incumbent(elapsed, cost, model)
    if status == UNKNOWN or timed_out and status != OPTIMAL:
        status = FEASIBLE
    return SolveResult(status, model, cost, incumbents, elapsed)
