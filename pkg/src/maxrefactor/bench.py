"""Benchmark harness: solve many programs, collect one report row each."""

from __future__ import annotations

import csv
import io
import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .decode import compression_rate
from .engine import refactor
from .logic import Program, Rule, load_program

log = logging.getLogger(__name__)


@dataclass
class BenchConfig:
    k: int = 2
    timeout: float = 60.0
    seed: int = 0
    workers: int = 1  # parallel tasks
    backend: str = "builtin"
    solver_cmd: str | None = None
    symmetry: bool = True
    sample_size: int | None = None  # sample whole rules up to this program size

    @classmethod
    def from_text(cls, text: str) -> "BenchConfig":
        """Parse ``key = value`` lines; ``#`` starts a comment."""
        kinds = {f: type(getattr(cls(), f)) for f in cls.__dataclass_fields__}
        values = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, raw = line.partition("=")
            key, raw = key.strip(), raw.strip().strip('"')
            if not sep or key not in kinds:
                raise ValueError(f"line {lineno}: unknown setting {key!r}")
            if key in ("solver_cmd",):
                values[key] = raw
            elif key == "sample_size":
                values[key] = int(raw)
            elif kinds[key] is bool:
                if raw.lower() not in ("on", "off", "true", "false", "1", "0"):
                    raise ValueError(f"line {lineno}: {key} expects on/off")
                values[key] = raw.lower() in ("on", "true", "1")
            else:
                try:
                    values[key] = kinds[key](raw)
                except ValueError:
                    raise ValueError(f"line {lineno}: bad value for {key}: {raw!r}") from None
        return cls(**values)


@dataclass
class BenchReportRow:
    task_id: str
    input_size: int
    output_size: int
    cr: float
    status: str
    wall_time: float
    trace: list[tuple[float, int]] = field(default_factory=list)


def sample_rules(program: Program, target_size: int, rng: random.Random) -> Program:
    """Uniformly ordered whole rules, added until the next would exceed ``target_size``."""
    rules = list(program.rules)
    rng.shuffle(rules)
    out: list[Rule] = []
    size = 0
    for r in rules:
        if size + r.size > target_size:
            break
        out.append(r)
        size += r.size
    if not out:
        out = rules[:1]
    return Program(tuple(out))


def run_task(task_id: str, program: Program, cfg: BenchConfig) -> BenchReportRow:
    out = refactor(
        program,
        k=cfg.k,
        timeout=cfg.timeout,
        backend=cfg.backend,
        seed=cfg.seed,
        symmetry=cfg.symmetry,
        solver_cmd=cfg.solver_cmd,
    )
    sol = out.solution
    return BenchReportRow(
        task_id=task_id,
        input_size=sol.input_size,
        output_size=sol.output_size,
        cr=float(compression_rate(sol.input_size, sol.output_size)),
        status=out.status,
        wall_time=round(out.result.wall_time, 3),
        trace=[(round(t, 3), s) for t, s in out.trace],
    )


def bench_programs(tasks: list[tuple[str, Program]], cfg: BenchConfig) -> list[BenchReportRow]:
    """Solve every task; rows come back sorted by task id whatever the pool width."""
    rng = random.Random(cfg.seed)
    prepared = []
    for task_id, prog in sorted(tasks, key=lambda t: t[0]):
        if cfg.sample_size is not None:
            prog = sample_rules(prog, cfg.sample_size, rng)
        prepared.append((task_id, prog))
    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        rows = list(pool.map(lambda t: run_task(t[0], t[1], cfg), prepared))
    return sorted(rows, key=lambda r: r.task_id)


def bench_directory(directory: str | Path, cfg: BenchConfig) -> list[BenchReportRow]:
    """Benchmark every ``*.pl`` file in ``directory``."""
    paths = sorted(Path(directory).glob("*.pl"))
    if not paths:
        raise FileNotFoundError(f"no .pl files in {directory}")
    return bench_programs([(p.stem, load_program(p)) for p in paths], cfg)


def rows_to_json(rows: list[BenchReportRow], with_timing: bool = True) -> str:
    out = []
    for row in rows:
        d = asdict(row)
        if not with_timing:
            d.pop("wall_time")
            d.pop("trace")
        out.append(d)
    return json.dumps(out, indent=2)


def rows_to_csv(rows: list[BenchReportRow], with_timing: bool = True) -> str:
    buf = io.StringIO()
    cols = ["task_id", "input_size", "output_size", "cr", "status"]
    if with_timing:
        cols += ["wall_time", "trace"]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        d = asdict(row)
        d["cr"] = f"{row.cr:.6f}"
        if with_timing:
            d["trace"] = ";".join(f"{t}:{s}" for t, s in row.trace)
        writer.writerow([d[c] for c in cols])
    return buf.getvalue()
