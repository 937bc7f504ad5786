"""Generational GA over decision trees with a choice of fitness engine.

All random draws happen in a serial reproduction phase whose order does not
depend on the engine; evaluation consumes no randomness. Full and incremental
runs with the same seed therefore walk identical trajectories whenever the
incremental engine is lossless.
"""

from __future__ import annotations

import csv
import enum
import io
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .data import Dataset
from .fitness import COUNT, FRACTION, score, x_at
from .inherit import full_equivalent_cost, reevaluate_pending, savings
from .operators import Individual, crossover, mutate, random_predicate
from .tree import DecisionTree, EvalCounters, aggregate, evaluate_full

Population = list[Individual]


class Engine(str, enum.Enum):
    FULL = "full"
    INCREMENTAL = "incremental"


@dataclass
class EvolutionConfig:
    population_size: int = 100
    generations: int = 100
    mutation_rate: float = 0.5
    crossover_rate: float = 1.0
    x_start: float = 1e4
    x_end: float = 1e4
    seed: int = 0
    engine: Engine = Engine.INCREMENTAL
    elitism: int = 1
    accuracy_unit: str = COUNT

    def __post_init__(self):
        self.engine = Engine(self.engine)
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not (0.0 <= self.mutation_rate <= 1.0 and 0.0 <= self.crossover_rate <= 1.0):
            raise ValueError("rates must lie in [0, 1]")
        if self.x_start <= 0 or self.x_end <= 0:
            raise ValueError("x must be positive")
        if not 0 <= self.elitism <= self.population_size:
            raise ValueError("elitism must lie in [0, population_size]")
        if self.accuracy_unit not in (COUNT, FRACTION):
            raise ValueError(f"unknown accuracy unit {self.accuracy_unit!r}")


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream: portable and reproducible across platforms."""
    return np.random.Generator(np.random.PCG64(seed))


def select_parent(population: Population, rng: np.random.Generator) -> Individual:
    """Roulette wheel over payoffs; uniform when every payoff is zero."""
    weights = np.fromiter((ind.payoff for ind in population), dtype=float, count=len(population))
    total = weights.sum()
    if total <= 0:
        return population[int(rng.integers(len(population)))]
    i = int(np.searchsorted(np.cumsum(weights), rng.random() * total, side="right"))
    return population[min(i, len(population) - 1)]


def best_index(population: Population) -> int:
    """Highest payoff; ties go to the lowest index."""
    return max(range(len(population)), key=lambda i: (population[i].payoff, -i))


def init_population(config: EvolutionConfig, dataset: Dataset, rng: np.random.Generator,
                    counters: EvalCounters | None = None) -> Population:
    """Random one-test stumps with random leaf classes, fully evaluated."""
    counters = counters if counters is not None else EvalCounters()
    n_classes = len(dataset.class_values)
    x = x_at(config, 0)
    pop = []
    for _ in range(config.population_size):
        test = random_predicate(dataset.attributes, rng)
        lo, hi = (int(c) for c in rng.integers(n_classes, size=2))
        tree = DecisionTree.stump(test, lo, hi)
        c = EvalCounters()
        evaluate_full(tree, dataset, c)
        counters.add(c)
        pop.append(Individual(tree, score(tree, dataset.n, x, config.accuracy_unit), c))
    return pop


@dataclass
class GenerationStats:
    generation: int
    best_payoff: float
    best_accuracy_fraction: float
    best_size: int
    checks: int
    reclassified: int
    full_checks: int
    full_reclassified: int
    cum_checks: int = 0
    cum_reclassified: int = 0
    elapsed_ms: float = 0.0
    payoffs: tuple = ()


def _reproduce(population: Population, dataset: Dataset, config: EvolutionConfig,
               rng: np.random.Generator, count: int) -> Population:
    offspring: Population = []
    while len(offspring) < count:
        pa = select_parent(population, rng)
        pb = select_parent(population, rng)
        if rng.random() < config.crossover_rate:
            oa, ob, _, _ = crossover(pa, pb, rng)
        else:
            oa, ob = pa.copy(), pb.copy()
        for o in (oa, ob):
            if rng.random() < config.mutation_rate:
                mutate(o, dataset, config, rng)
        offspring.append(oa)
        offspring.append(ob)
    return offspring[:count]


def step_generation(population: Population, dataset: Dataset, config: EvolutionConfig,
                    generation: int, rng: np.random.Generator,
                    engine: Engine | None = None) -> tuple[Population, GenerationStats]:
    """One generation: elites carried over, the rest bred, then evaluated.

    Elites keep their trees and evaluation data; like every member they are
    rescored with this generation's x (a leaf aggregate, no instance work).
    """
    engine = Engine(engine or config.engine)
    x = x_at(config, generation)
    unit = config.accuracy_unit
    ranked = sorted(range(len(population)), key=lambda i: (-population[i].payoff, i))
    elites = [population[i] for i in ranked[:config.elitism]]
    offspring = _reproduce(population, dataset, config, rng, config.population_size - len(elites))

    gen = EvalCounters()
    full = EvalCounters()
    new_pop = [Individual(e.tree, score(e.tree, dataset.n, x, unit), EvalCounters()) for e in elites]
    for o in offspring:
        c = EvalCounters()
        if engine is Engine.FULL:
            o.pending = []
            evaluate_full(o.tree, dataset, c)
            o.payoff = score(o.tree, dataset.n, x, unit)
        else:
            reevaluate_pending(o, dataset, x, c, unit)
        o.counters = c
        gen.add(c)
        full.add(full_equivalent_cost(o.tree, dataset))
        new_pop.append(o)

    b = new_pop[best_index(new_pop)]
    size, correct = aggregate(b.tree)
    stats = GenerationStats(
        generation=generation,
        best_payoff=b.payoff,
        best_accuracy_fraction=correct / dataset.n if dataset.n else 0.0,
        best_size=size,
        checks=gen.node_instance_checks,
        reclassified=gen.instances_reclassified,
        full_checks=full.node_instance_checks,
        full_reclassified=full.instances_reclassified,
        payoffs=tuple(sorted(ind.payoff for ind in new_pop)),
    )
    return new_pop, stats


REPORT_COLUMNS = ("generation", "best_payoff", "best_accuracy_fraction", "best_size",
                  "cum_checks", "cum_reclassified", "elapsed_ms")


@dataclass
class RunReport:
    config: EvolutionConfig
    rows: list[GenerationStats]
    best: Individual
    counters: EvalCounters
    full_equivalent: EvalCounters
    dataset_name: str = ""
    elapsed_ms: float = 0.0
    final_population: Population = field(default_factory=list, repr=False)

    def savings(self):
        return savings(self.counters, self.full_equivalent)

    def payoff_trajectory(self) -> list[tuple]:
        return [r.payoffs for r in self.rows]

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in self.rows:
            w.writerow([r.generation, repr(r.best_payoff), repr(r.best_accuracy_fraction),
                        r.best_size, r.cum_checks, r.cum_reclassified, f"{r.elapsed_ms:.3f}"])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.csv_text())


def read_report_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_report_csv(fh.read())


def parse_report_csv(text: str) -> list[dict]:
    casts = {"generation": int, "best_size": int, "cum_checks": int, "cum_reclassified": int}
    return [{k: casts.get(k, float)(v) for k, v in row.items()}
            for row in csv.DictReader(io.StringIO(text))]


def evolve(config: EvolutionConfig, dataset: Dataset,
           on_generation: Callable[[int, Population], None] | None = None) -> RunReport:
    """Run ``config.generations`` generations; one report row per generation.

    Counters cover the initial evaluation plus every offspring evaluation;
    the full-equivalent counters are what evaluating each of those trees from
    the root would have cost.
    """
    rng = make_rng(config.seed)
    t0 = time.perf_counter()
    counters = EvalCounters()
    pop = init_population(config, dataset, rng, counters)
    full = counters.copy()
    rows = []
    for g in range(config.generations):
        pop, stats = step_generation(pop, dataset, config, g, rng)
        counters.add(EvalCounters(stats.checks, stats.reclassified))
        full.add(EvalCounters(stats.full_checks, stats.full_reclassified))
        stats.cum_checks = counters.node_instance_checks
        stats.cum_reclassified = counters.instances_reclassified
        stats.elapsed_ms = (time.perf_counter() - t0) * 1e3
        rows.append(stats)
        if on_generation is not None:
            on_generation(g, pop)
    best = pop[best_index(pop)]
    return RunReport(config, rows, best, counters, full, dataset.name,
                     (time.perf_counter() - t0) * 1e3, pop)
