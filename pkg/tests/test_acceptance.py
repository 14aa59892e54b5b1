"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Expected sizes come from the fixtures' hand-checked programs or from the
exhaustive oracle, never from the engine under test.
"""

import sys
import time
from pathlib import Path

import pytest

from maxrefactor import fixtures
from maxrefactor.decode import dumps_report, normalized_gap, report, verify, verify_program
from maxrefactor.encoder import encode, objective_value
from maxrefactor.engine import refactor
from maxrefactor.generate import motif_program, tiny_corpus
from maxrefactor.hardness import (
    bibd_instance,
    chosen_vertices,
    cube,
    induced_instance,
    k_bound,
    maximal_independent_sets,
    mis_bruteforce,
)
from maxrefactor.logic import alpha_equal, alpha_equal_modulo_aux, parse_program, parse_rule, unfold
from maxrefactor.oracle import OracleConfig, oracle_optimum
from maxrefactor.solver import OPTIMAL, solve

from .conftest import record
from .helpers import complete, full_cover

WIDE = dict(max_rules=6, max_body=4, max_predicates=7)
CORPUS_SIZE = 60


def _timed_refactor(program, **kw):
    t = time.monotonic()
    out = refactor(program, **kw)
    return out, time.monotonic() - t


# ---------------------------------------------------------------------------
# 1. motivating examples


def test_criterion_1_intro_examples():
    notes, ok = [], True
    for name, prog, want in (("P1", fixtures.p1(), 16), ("Q1", fixtures.q1(), 22)):
        out, secs = _timed_refactor(prog, k=1, timeout=60)
        text_ok = verify_program(prog, parse_program(out.solution.to_text()))
        lin = oracle_optimum(prog, OracleConfig(k=1, **WIDE)).min_size
        gen = oracle_optimum(prog, OracleConfig(k=1, space="general", **WIDE)).min_size
        good = (out.status == OPTIMAL and out.size == want and secs < 5 and bool(text_ok)
                and bool(verify(prog, out.solution)) and lin == gen == want)
        ok &= good
        notes.append(f"{name} {prog.size}->{out.size} ({out.status}, {secs:.2f}s, oracle {lin}/{gen})")
    assert record(1, ok, "; ".join(notes))


# ---------------------------------------------------------------------------
# 2. worked encoding example


def test_criterion_2_worked_encoding():
    t = time.monotonic()
    prog = fixtures.two_rules()
    enc = encode(prog, 1)
    model = complete(enc.layout, fixtures.TWO_RULES_ASSIGNMENT)
    from maxrefactor.decode import decode

    sol = decode(model, enc)
    same = alpha_equal_modulo_aux(sol.program, fixtures.two_rules_refactored(), [sol.aux_names[1]])
    out = refactor(prog, k=1, timeout=30)
    orc = oracle_optimum(prog, OracleConfig(k=1)).min_size
    secs = time.monotonic() - t
    ok = same and bool(verify(prog, sol)) and out.status == OPTIMAL and out.size == orc and secs < 1
    assert record(2, ok, f"decoded matches printed program: {same}; solver {out.size} vs oracle {orc}; {secs:.2f}s")


# ---------------------------------------------------------------------------
# corpus shared by criteria 3, 6 and 7


def _caps(prog):
    from collections import Counter

    m = {}
    for r in prog:
        for p, c in Counter(l.predicate for l in r.body).items():
            m[p] = max(m.get(p, 0), c)
    return sum(m.values())


@pytest.fixture(scope="module")
def corpus_results():
    rows = []
    for i, prog in enumerate(tiny_corpus(CORPUS_SIZE, seed=0)):
        for k in (1, 2):
            lin = oracle_optimum(prog, OracleConfig(k=k, max_aux_body_size=_caps(prog))).min_size
            gen = oracle_optimum(prog, OracleConfig(k=k, max_aux_body_size=4, space="general")).min_size
            out = refactor(prog, k=k, timeout=60)
            enc = encode(prog, k)
            raw = solve(enc.formula, 60, hint=enc.identity_hint())
            wcnf_size = prog.size + raw.cost + enc.formula.objective_offset
            rows.append((i, k, prog, lin, gen, out, raw.status, wcnf_size))
    return rows


def test_criterion_3_objective_bookkeeping(corpus_results):
    bad = [
        (i, k) for i, k, prog, *_rest, out, _s, _w in corpus_results
        if prog.size + out.solution.objective_value != out.solution.program.size
    ]
    for prog in (fixtures.p1(), fixtures.q1(), fixtures.two_rules()):
        sol = refactor(prog, k=2, timeout=30).solution
        if prog.size + sol.objective_value != sol.program.size:
            bad.append(("fixture", 2))
    enc = encode(fixtures.p1(), 1)
    p3 = objective_value(enc.layout, full_cover(enc.layout, {"p": 1, "q": 1, "r": 1}, {c: [0, 1, 2] for c in range(4)}))
    enc = encode(fixtures.q1(), 1)
    covers = {c: [0, 1, 2] for c in range(4)} | {4: [0, 1, 2, 3], 5: [0, 1, 2, 3]}
    q2 = objective_value(enc.layout, full_cover(enc.layout, {"p": 2, "q": 2, "r": 1}, covers))
    ok = not bad and p3 == -4 and q2 == -8
    assert record(3, ok, f"{len(corpus_results) + 3} solved instances, mismatches {bad}; P3 {p3}, Q2 {q2}")


# ---------------------------------------------------------------------------
# 4. block-design instance


def test_criterion_4_bibd_bound():
    prog, claimed = bibd_instance()
    bound = k_bound(12, 7)
    # a verified refactoring below the claimed optimum settles the question, so stop there
    out9, s9 = _timed_refactor(prog, k=9, timeout=600, target_size=claimed - 1)
    out8, s8 = _timed_refactor(prog, k=8, timeout=600, target_size=claimed - 1)
    ok = (
        bound == 9 and prog.size == 84
        and out9.status == OPTIMAL and out9.size == claimed
        and out8.size > out9.size
    )
    detail = (
        f"k_bound(12,7)={bound}; input {prog.size}; K=9 found {out9.size} ({out9.status}, {s9:.0f}s), "
        f"K=8 found {out8.size} ({out8.status}, {s8:.0f}s); claimed optimum {claimed}"
    )
    assert record(4, ok, detail)


# ---------------------------------------------------------------------------
# 5. induced instance of the cube fixture


def test_criterion_5_hardness_correspondence():
    inst = induced_instance(cube())
    out, secs = _timed_refactor(inst.program, k=len(inst.candidates), timeout=600,
                                candidates=inst.candidate_counts())
    chosen = chosen_vertices(inst, out.solution.invented)
    alpha, _ = mis_bruteforce(inst.graph)
    maximum = [s for s in maximal_independent_sets(inst.graph) if len(s) == alpha]
    contains = any(set(s) <= set(chosen) for s in maximum)
    bodies = [frozenset(l.predicate for l in inst.candidates[v].body) for v in chosen]
    overlap = max((len(a & b) for i, a in enumerate(bodies) for b in bodies[i + 1:]), default=0)
    ok = out.status == OPTIMAL and contains and alpha == 4 and overlap <= 1
    names = [f"a{v + 1}" for v in chosen]
    detail = (f"{out.status} size {inst.program.size}->{out.size} in {secs:.0f}s; chosen {names}; "
              f"contains a maximum independent set: {contains}; alpha by enumeration {alpha} (expected 4); "
              f"max pairwise overlap {overlap}")
    assert record(5, ok, detail)


# ---------------------------------------------------------------------------
# 6 and 7. linear sufficiency and encoder/solver equivalence


def test_criterion_6_linear_sufficiency(corpus_results):
    bad = [(i, k, lin, gen, out.size) for i, k, prog, lin, gen, out, _s, _w in corpus_results
           if not (lin == gen == out.size and out.status == OPTIMAL)]
    compressible = sum(1 for row in corpus_results if row[5].size < row[2].size)
    ok = not bad and len({i for i, *_ in corpus_results}) >= 50
    assert record(6, ok, f"{CORPUS_SIZE} programs x K in (1, 2), {compressible} compressible; mismatches {bad}")


def _mock_solver(tmp_path, enc):
    res = solve(enc.formula, 60, hint=enc.identity_hint())
    bits = "".join("1" if v in res.model else "0" for v in range(1, enc.formula.num_vars + 1))
    script = tmp_path / "mock_maxsat.py"
    script.write_text(f'print("o {res.cost}")\nprint("s OPTIMUM FOUND")\nprint("v {bits}")\n')
    return [sys.executable, str(script)]


def test_criterion_7_encoding_solver_equivalence(corpus_results, tmp_path):
    bad = [(i, k) for i, k, prog, lin, _g, _o, status, wcnf_size in corpus_results
           if status != OPTIMAL or wcnf_size != lin]
    same = []
    for prog in (fixtures.p1(), fixtures.q1()):
        cmd = _mock_solver(tmp_path, encode(prog, 1))
        a = refactor(prog, k=1, timeout=60)
        b = refactor(prog, k=1, timeout=60, backend="external", solver_cmd=cmd)
        same.append(dumps_report(report(a.solution, a.status)) == dumps_report(report(b.solution, b.status)))
    ok = not bad and all(same)
    assert record(7, ok, f"WCNF optimum vs oracle mismatches {bad}; external JSON identical {same}")


# ---------------------------------------------------------------------------
# 8. unfolding example


def test_criterion_8_unfolding_golden():
    t = time.monotonic()
    got = unfold(parse_program(fixtures.UNFOLD_INPUT_TEXT), parse_rule(fixtures.UNFOLD_RULE_TEXT))
    same = alpha_equal(got, parse_program(fixtures.UNFOLD_RESULT_TEXT))
    secs = time.monotonic() - t
    assert record(8, same and secs < 1, f"alpha-equal to the printed result: {same}; {secs * 1000:.1f} ms")


# ---------------------------------------------------------------------------
# 9. anytime behaviour


def test_criterion_9_anytime():
    prog = motif_program(num_rules=60, seed=0)
    out, secs = _timed_refactor(prog, k=2, timeout=30)
    sizes = [s for _, s in out.trace]
    monotone = all(a >= b for a, b in zip(sizes, sizes[1:]))
    best = sizes[-1]
    gap0 = normalized_gap(sizes[0], best, prog.size) if best < prog.size else None
    ok = (
        len(prog) == 60 and monotone and gap0 == 1 and out.size == best
        and bool(verify(prog, out.solution)) and out.solution.cr > 0 and secs < 35
    )
    detail = (f"60 rules size {prog.size}; trace {sizes}; gap at start {gap0}; "
              f"{out.status} cr {float(out.solution.cr):.3f} in {secs:.1f}s")
    assert record(9, ok, detail)


# ---------------------------------------------------------------------------
# 10. scope


def test_criterion_10_scope_disclaimer():
    readme = (Path(__file__).resolve().parents[1] / "README.md").read_text(encoding="utf-8")
    ok = "Out of scope" in readme and "full-scale" in readme
    assert record(10, ok, "full-scale benchmark comparisons documented as out of scope; covered by criteria 6-9")
