"""Paired full-versus-incremental benchmark runs.

Each grid point runs both engines from the same seed. The incremental run is
only trusted if its payoff trajectory and final best tree match the full run
exactly; otherwise :class:`LosslessError` aborts the benchmark.
"""

from __future__ import annotations

import csv
import dataclasses
import io
from dataclasses import dataclass, field

from .data import Dataset, split_folds
from .evolve import Engine, EvolutionConfig, RunReport, evolve
from .tree import EvalCounters


class LosslessError(RuntimeError):
    """Incremental evaluation diverged from full evaluation."""


BENCH_COLUMNS = ("dataset", "config", "point", "old_ms", "new_ms",
                 "instance_savings_pct", "check_savings_pct")


@dataclass
class BenchmarkSpec:
    grid: tuple[int, ...] = (100,)
    mutation_rate: float = 0.5
    x_start: float = 1e4
    x_end: float = 1e4
    seed: int = 0
    repetitions: int = 1
    generations: int | None = None   # overrides the grid value when set
    population: int | None = None
    elitism: int = 1
    accuracy_unit: str = "count"
    folds: int | None = None

    def __post_init__(self):
        if not self.grid:
            raise ValueError("benchmark grid is empty")
        if any(p < 2 for p in self.grid):
            raise ValueError("grid points must be >= 2")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    @property
    def label(self) -> str:
        x = f"{self.x_start:g}" if self.x_start == self.x_end else f"{self.x_start:g}-{self.x_end:g}"
        return f"mut={self.mutation_rate:g} x={x}"

    def config(self, point: int, seed: int, engine: Engine) -> EvolutionConfig:
        return EvolutionConfig(
            population_size=self.population or point,
            generations=self.generations or point,
            mutation_rate=self.mutation_rate,
            x_start=self.x_start, x_end=self.x_end,
            seed=seed, engine=engine, elitism=self.elitism,
            accuracy_unit=self.accuracy_unit)


@dataclass
class BenchRow:
    dataset: str
    config: str
    point: int
    old_ms: float
    new_ms: float
    actual: EvalCounters = field(default_factory=EvalCounters)
    full: EvalCounters = field(default_factory=EvalCounters)

    @property
    def instance_savings(self) -> float:
        f = self.full.instances_reclassified
        return 1 - self.actual.instances_reclassified / f if f else 0.0

    @property
    def check_savings(self) -> float:
        f = self.full.node_instance_checks
        return 1 - self.actual.node_instance_checks / f if f else 0.0


def check_equivalent(old: RunReport, new: RunReport) -> None:
    """Raise unless the two runs walked identical trajectories."""
    a, b = old.payoff_trajectory(), new.payoff_trajectory()
    for g, (pa, pb) in enumerate(zip(a, b)):
        if pa != pb:
            raise LosslessError(f"payoff multisets differ at generation {g} "
                                f"(seed {old.config.seed})")
    if len(a) != len(b):
        raise LosslessError("runs have different lengths")
    if old.best.tree.structure() != new.best.tree.structure():
        raise LosslessError(f"final best trees differ (seed {old.config.seed})")


def paired_run(config: EvolutionConfig, dataset: Dataset) -> tuple[RunReport, RunReport]:
    old = evolve(dataclasses.replace(config, engine=Engine.FULL), dataset)
    new = evolve(dataclasses.replace(config, engine=Engine.INCREMENTAL), dataset)
    check_equivalent(old, new)
    return old, new


def run_point(spec: BenchmarkSpec, dataset: Dataset, point: int) -> BenchRow:
    """Both engines at one grid point, pooled over repetitions and folds."""
    if spec.folds:
        parts = [dataset.subset(train) for train, _ in split_folds(dataset, spec.folds, spec.seed)]
    else:
        parts = [dataset]
    row = BenchRow(dataset.name, spec.label, point, 0.0, 0.0)
    for rep in range(spec.repetitions):
        for part in parts:
            old, new = paired_run(spec.config(point, spec.seed + rep, Engine.INCREMENTAL), part)
            row.old_ms += old.elapsed_ms
            row.new_ms += new.elapsed_ms
            row.actual.add(new.counters)
            row.full.add(new.full_equivalent)
    return row


def run_benchmark(spec: BenchmarkSpec, dataset: Dataset) -> list[BenchRow]:
    return [run_point(spec, dataset, p) for p in spec.grid]


def rows_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        w.writerow([r.dataset, r.config, r.point, f"{r.old_ms:.3f}", f"{r.new_ms:.3f}",
                    f"{100 * r.instance_savings:.4f}", f"{100 * r.check_savings:.4f}"])
    return buf.getvalue()


def read_bench_csv(text: str) -> list[dict]:
    casts = {"point": int, "old_ms": float, "new_ms": float,
             "instance_savings_pct": float, "check_savings_pct": float}
    return [{k: casts.get(k, str)(v) for k, v in row.items()}
            for row in csv.DictReader(io.StringIO(text))]
