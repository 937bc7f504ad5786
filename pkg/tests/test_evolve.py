import dataclasses
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from conftest import T1, build
from evotree.data import AttributeSchema, generate_multiplexor, generate_parity
from evotree.evolve import (Engine, EvolutionConfig, best_index, evolve, init_population,
                            make_rng, parse_report_csv, read_report_csv, select_parent,
                            step_generation)
from evotree.fitness import FRACTION, payoff, x_at
from evotree.operators import Individual, OpKind, crossover, crossover_at, mutate, random_predicate
from evotree.tree import NOMINAL_EQ, DecisionTree, EvalCounters, aggregate, evaluate_full


def test_payoff_examples():
    assert payoff(2, 4, Fraction(1)) == Fraction(4, 17)
    assert payoff(3, 3, Fraction(1)) == Fraction(9, 10)
    assert payoff(2, 3, Fraction(1)) == Fraction(4, 10)
    assert payoff(0, 7, 123.0) == 0
    with pytest.raises(ValueError):
        payoff(1, 0, 1)
    with pytest.raises(ValueError):
        payoff(1, 1, 0)


def test_payoff_monotone_and_limit():
    for c in range(1, 6):
        assert payoff(c + 1, 3, 10.0) > payoff(c, 3, 10.0)
        assert payoff(c, 4, 10.0) < payoff(c, 3, 10.0)
    for acc in (0.1, 0.5, 1.0):
        assert payoff(acc, 50, 1e12) == pytest.approx(acc * acc, abs=1e-6)


def test_x_schedule():
    const = EvolutionConfig(generations=100, x_start=1e4, x_end=1e4)
    assert {x_at(const, g) for g in range(100)} == {1e4}
    lin = EvolutionConfig(generations=100, x_start=1e4, x_end=1e5)
    assert x_at(lin, 0) == 1e4 and x_at(lin, 99) == 1e5
    assert x_at(EvolutionConfig(generations=1, x_start=2, x_end=5), 0) == 2


def test_config_validation():
    for bad in ({"population_size": 1}, {"generations": 0}, {"x_start": 0},
                {"mutation_rate": 1.5}, {"elitism": 200}, {"accuracy_unit": "pct"}):
        with pytest.raises(ValueError):
            EvolutionConfig(**bad)


def test_random_predicate_frequencies():
    attrs = (AttributeSchema.nominal("a", ("p", "q")),)
    rng = make_rng(0)
    counts = Counter(random_predicate(attrs, rng).value for _ in range(10 ** 4))
    chi2 = sum((counts[v] - 5000) ** 2 / 5000 for v in (0, 1))
    assert chi2 < 6.635            # 1 degree of freedom, alpha = 0.01
    fixed = (AttributeSchema.continuous("c", 5, 5),)
    assert {random_predicate(fixed, rng).value for _ in range(50)} == {5}
    with pytest.raises(ValueError):
        random_predicate((), rng)


def test_init_population(sample):
    cfg = EvolutionConfig(population_size=30, x_start=7, x_end=7)
    pop = init_population(cfg, sample, make_rng(1))
    assert all(aggregate(ind.tree)[0] == 2 for ind in pop)
    allowed = {payoff(c, 2, 7) for c in range(5)}
    assert all(ind.payoff in allowed for ind in pop)
    again = init_population(cfg, sample, make_rng(1))
    assert [i.tree.structure() for i in pop] == [i.tree.structure() for i in again]


def _evaluated(tree, ds):
    evaluate_full(tree, ds, EvalCounters())
    return Individual(tree)


def test_mutate_single_leaf_flips_class(sample):
    cfg = EvolutionConfig()
    rng = make_rng(3)
    ind = _evaluated(DecisionTree.single_leaf(0), sample)
    for _ in range(5):
        before = ind.tree.label[ind.tree.root]
        out = mutate(ind, sample, cfg, rng)
        assert out.kind is OpKind.LEAF_CHANGE
        assert ind.tree.label[ind.tree.root] == 1 - before


def test_mutate_root_kinds(sample):
    cfg = EvolutionConfig()
    seen = set()
    for seed in range(200):
        ind = _evaluated(build(sample, T1), sample)
        rng = make_rng(seed)
        out = mutate(ind, sample, cfg, rng)
        if out.stale != ind.tree.root:
            continue
        seen.add(out.kind)
        if out.kind is OpKind.NODE_PRUNE:
            assert aggregate(ind.tree)[0] == 1
        else:
            ref = build(sample, T1)
            shape = lambda s: s if s[0] == "leaf" else ("n", shape(s[3]), shape(s[4]))  # noqa: E731
            assert shape(ind.tree.structure()) == shape(ref.structure())
    assert seen == {OpKind.NODE_CHANGE, OpKind.NODE_PRUNE}


def test_uniform_node_selection(sample):
    cfg = EvolutionConfig()
    rng = make_rng(5)
    tree = DecisionTree.stump(random_predicate(sample.attributes, rng), 0, 1)
    base = _evaluated(tree, sample)
    counts = Counter()
    # on a stump the stale node is the picked node, whatever the operator
    for _ in range(6000):
        counts[mutate(base.copy(), sample, cfg, rng).stale] += 1
    for node in tree.nodes():
        assert counts[node] / 6000 == pytest.approx(1 / 3, abs=0.03)


def test_root_root_crossover_swaps(sample):
    from conftest import T2
    a = _evaluated(build(sample, T1), sample)
    b = _evaluated(build(sample, T2), sample)
    a.payoff, b.payoff = 0.25, 0.75
    oa, ob, out_a, _ = crossover_at(a, b, 0, 0)
    assert out_a.kind is OpKind.ROOT_ROOT_CROSSOVER
    assert oa.tree.structure() == b.tree.structure() and ob.tree.structure() == a.tree.structure()
    assert (oa.payoff, ob.payoff) == (0.75, 0.25)


def test_self_crossover_same_node_is_identity(sample):
    a = _evaluated(build(sample, T1), sample)
    for pos in range(1, a.tree.node_count()):
        oa, ob, _, _ = crossover_at(a, a, pos, pos)
        assert oa.tree.structure() == a.tree.structure() == ob.tree.structure()


def test_crossover_leaves_parents_untouched(sample):
    from conftest import T2
    a = _evaluated(build(sample, T1), sample)
    b = _evaluated(build(sample, T2), sample)
    sa, sb = a.tree.snapshot(), b.tree.snapshot()
    rng = make_rng(0)
    for _ in range(20):
        crossover(a, b, rng)
    assert a.tree.snapshot() == sa and b.tree.snapshot() == sb


def test_select_parent():
    one = [Individual(DecisionTree.single_leaf(0), 0.3)]
    rng = make_rng(0)
    assert select_parent(one, rng) is one[0]
    pair = [Individual(DecisionTree.single_leaf(0), 1.0), Individual(DecisionTree.single_leaf(0), 0.0)]
    assert all(select_parent(pair, rng) is pair[0] for _ in range(200))
    skew = [Individual(DecisionTree.single_leaf(0), 3.0), Individual(DecisionTree.single_leaf(0), 1.0)]
    hits = sum(select_parent(skew, rng) is skew[0] for _ in range(10 ** 5))
    assert hits / 10 ** 5 == pytest.approx(0.75, abs=0.02)
    zeros = [Individual(DecisionTree.single_leaf(0), 0.0) for _ in range(4)]
    assert len({id(select_parent(zeros, rng)) for _ in range(200)}) == 4


def test_best_index_ties():
    pop = [Individual(DecisionTree.single_leaf(0), p) for p in (1.0, 3.0, 3.0)]
    assert best_index(pop) == 1


def test_noop_generation():
    ds = generate_parity(2)
    cfg = EvolutionConfig(population_size=6, mutation_rate=0, crossover_rate=0, elitism=6)
    pop = init_population(cfg, ds, make_rng(0))
    new, stats = step_generation(pop, ds, cfg, 0, make_rng(1))
    assert sorted(i.tree.snapshot() for i in new) == sorted(i.tree.snapshot() for i in pop)
    assert stats.reclassified == 0


def test_stats_bounds():
    ds = generate_multiplexor(2)
    cfg = EvolutionConfig(population_size=20, generations=5)
    report = evolve(cfg, ds)
    for r in report.rows:
        assert 0 <= r.reclassified <= (cfg.population_size - cfg.elitism) * ds.n
        assert r.checks <= r.full_checks


def test_best_accuracy_monotone_with_elitism():
    report = evolve(EvolutionConfig(population_size=50, generations=50, seed=11),
                    generate_multiplexor(1))
    best = [r.best_payoff for r in report.rows]
    assert best == sorted(best)
    assert len(evolve(EvolutionConfig(generations=1, population_size=4), generate_parity(2)).rows) == 1


def test_parity2_is_learned():
    report = evolve(EvolutionConfig(population_size=100, generations=200, mutation_rate=0.5,
                                    x_start=1e4, x_end=1e4, seed=0), generate_parity(2))
    assert report.rows[-1].best_accuracy_fraction == 1.0


def test_determinism_and_report_csv(tmp_path):
    ds = generate_multiplexor(1)
    cfg = EvolutionConfig(population_size=20, generations=10, seed=4, x_start=1e4, x_end=1e5)
    a, b = evolve(cfg, ds), evolve(cfg, ds)
    strip = lambda rows: [dataclasses.replace(r, elapsed_ms=0) for r in rows]  # noqa: E731
    assert strip(a.rows) == strip(b.rows)
    p = tmp_path / "r.csv"
    a.write_csv(p)
    rows = read_report_csv(p)
    assert len(rows) == 10 and rows[-1]["best_payoff"] == a.rows[-1].best_payoff
    assert parse_report_csv(a.csv_text())[3]["cum_checks"] == a.rows[3].cum_checks


@pytest.mark.parametrize("unit", ["count", FRACTION])
def test_engines_equivalent_under_linear_x(unit):
    ds = generate_multiplexor(2)
    cfg = EvolutionConfig(population_size=30, generations=30, seed=2, x_start=1e4, x_end=1e5,
                          mutation_rate=0.3, crossover_rate=0.7, elitism=2, accuracy_unit=unit)
    old = evolve(dataclasses.replace(cfg, engine=Engine.FULL), ds)
    new = evolve(cfg, ds)
    assert old.payoff_trajectory() == new.payoff_trajectory()
    assert old.best.tree.structure() == new.best.tree.structure()
    assert new.counters.instances_reclassified < old.counters.instances_reclassified
    assert old.counters == old.full_equivalent


def test_numeric_attributes_run():
    rng = np.random.default_rng(0)
    from evotree.data import Dataset
    X = rng.integers(0, 10, size=(60, 2))
    ds = Dataset((AttributeSchema.continuous("u", 0, 9), AttributeSchema.continuous("v", 0, 9)),
                 ("a", "b"), X, (X[:, 0] > X[:, 1]).astype(int))
    cfg = EvolutionConfig(population_size=20, generations=20, seed=1)
    old = evolve(dataclasses.replace(cfg, engine=Engine.FULL), ds)
    assert old.payoff_trajectory() == evolve(cfg, ds).payoff_trajectory()
    assert all(t != NOMINAL_EQ for t in old.best.tree.kind)
