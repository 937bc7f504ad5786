"""Command-line entry point: evolve, bench, costmodel, gen-data, inspect."""

from __future__ import annotations

import argparse
import csv
import io
import re
import sys
from pathlib import Path

import numpy as np

from . import costmodel
from .bench import BenchmarkSpec, LosslessError, rows_to_csv, run_benchmark
from .data import DataError, Dataset, generate_multiplexor, generate_parity, load_csv, split_folds
from .evolve import Engine, EvolutionConfig, evolve
from .fitness import COUNT, FRACTION
from .tree import (EvalCounters, TreeFormatError, aggregate, bind_tree, evaluate_full,
                   format_tree, parse_tree_text)

ENGINES = {"old": Engine.FULL, "new": Engine.INCREMENTAL,
           "full": Engine.FULL, "incremental": Engine.INCREMENTAL}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """argparse with exit status 1 on bad usage."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def synthetic(name: str) -> Dataset:
    m = re.fullmatch(r"(multiplexor|parity)(\d+)", name)
    if not m:
        raise UsageError(f"unknown synthetic dataset {name!r} (try multiplexor2 or parity3)")
    gen = generate_multiplexor if m[1] == "multiplexor" else generate_parity
    return gen(int(m[2]))


def load_dataset(args) -> Dataset:
    if args.data and args.synthetic:
        raise UsageError("--data and --synthetic are mutually exclusive")
    if args.data:
        return load_csv(args.data, class_column=args.class_column)
    if args.synthetic:
        return synthetic(args.synthetic)
    raise UsageError("one of --data or --synthetic is required")


def x_schedule(args) -> tuple[float, float]:
    if args.x is not None and (args.x_start is not None or args.x_end is not None):
        raise UsageError("--x cannot be combined with --x-start/--x-end")
    if args.x is not None:
        return args.x, args.x
    if (args.x_start is None) != (args.x_end is None):
        raise UsageError("--x-start and --x-end go together")
    if args.x_start is None:
        return 1e4, 1e4
    return args.x_start, args.x_end


def _data_flags(p):
    p.add_argument("--data", metavar="PATH", help="CSV file with a header row")
    p.add_argument("--synthetic", metavar="NAME", help="multiplexorA or parityB")
    p.add_argument("--class-column", metavar="NAME", help="class column (default: last)")


def _ga_flags(p):
    p.add_argument("--mutation", type=float, default=0.5, metavar="RATE")
    p.add_argument("--x", type=float, metavar="X", help="constant x")
    p.add_argument("--x-start", type=float, metavar="A")
    p.add_argument("--x-end", type=float, metavar="B")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--elitism", type=int, default=1)
    p.add_argument("--folds", type=int, metavar="K")
    p.add_argument("--accuracy-unit", choices=(COUNT, FRACTION), default=COUNT)
    p.add_argument("--out", metavar="PATH")


def build_parser() -> Parser:
    parser = Parser(prog="evotree", description="Evolutionary decision-tree induction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run one evolution")
    _data_flags(p)
    p.add_argument("--gens", type=int, default=100)
    p.add_argument("--pop", type=int, default=100)
    p.add_argument("--engine", choices=sorted(ENGINES), default="new")
    p.add_argument("--tree-out", metavar="PATH", help="final tree (default: OUT with .tree suffix)")
    _ga_flags(p)

    p = sub.add_parser("bench", help="paired old/new engine runs over a grid")
    _data_flags(p)
    p.add_argument("--grid", default="100", help="comma-separated generations=population points")
    p.add_argument("--gens", type=int, help="fix generations instead of following the grid")
    p.add_argument("--pop", type=int, help="fix population instead of following the grid")
    p.add_argument("--repetitions", type=int, default=1)
    _ga_flags(p)

    p = sub.add_parser("costmodel", help="emit analytic cost ratios as CSV")
    p.add_argument("--shape", choices=costmodel.SHAPES, default="complete")
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--variant", choices=costmodel.VARIANTS + ("all",), default="all")
    p.add_argument("--savings", action="store_true", help="savings curves instead of ratios")
    p.add_argument("--out", metavar="PATH")

    p = sub.add_parser("gen-data", help="write a synthetic dataset as CSV")
    gsub = p.add_subparsers(dest="generator", required=True)
    g = gsub.add_parser("multiplexor")
    g.add_argument("--address-bits", type=int, required=True)
    g.add_argument("--out", metavar="PATH")
    g = gsub.add_parser("parity")
    g.add_argument("--bits", type=int, required=True)
    g.add_argument("--out", metavar="PATH")

    p = sub.add_parser("inspect", help="pretty-print a saved tree")
    p.add_argument("--tree", required=True, metavar="FILE")
    _data_flags(p)
    return parser


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _test_accuracy(tree, test: Dataset) -> float:
    t = tree.clone()
    evaluate_full(t, test, EvalCounters())
    return aggregate(t)[1] / test.n if test.n else 0.0


def cmd_evolve(args) -> int:
    dataset = load_dataset(args)
    xs, xe = x_schedule(args)
    config = EvolutionConfig(population_size=args.pop, generations=args.gens,
                             mutation_rate=args.mutation, x_start=xs, x_end=xe,
                             seed=args.seed, engine=ENGINES[args.engine],
                             elitism=args.elitism, accuracy_unit=args.accuracy_unit)
    if args.folds:
        return _evolve_folds(args, config, dataset)
    report = evolve(config, dataset)
    tree_text = format_tree(report.best.tree, dataset)
    if args.out:
        report.write_csv(args.out)
        tree_path = args.tree_out or str(Path(args.out).with_suffix(".tree"))
        Path(tree_path).write_text(tree_text, encoding="utf-8")
    else:
        sys.stdout.write(report.csv_text())
        if args.tree_out:
            Path(args.tree_out).write_text(tree_text, encoding="utf-8")
    s = report.savings()
    print(f"best payoff {report.best.payoff:.6g}  size {aggregate(report.best.tree)[0]}  "
          f"instance savings {100 * s.instance_savings:.2f}%  "
          f"check savings {100 * s.check_savings:.2f}%  {report.elapsed_ms:.0f} ms",
          file=sys.stderr)
    return 0


def _evolve_folds(args, config, dataset) -> int:
    rows = [("fold", "train_accuracy", "test_accuracy", "size",
             "instance_savings_pct", "check_savings_pct", "elapsed_ms")]
    trees = []
    for f, (train, test) in enumerate(split_folds(dataset, args.folds, args.seed)):
        tr, te = dataset.subset(train), dataset.subset(test)
        report = evolve(config, tr)
        size, correct = aggregate(report.best.tree)
        s = report.savings()
        rows.append((f, repr(correct / tr.n), repr(_test_accuracy(report.best.tree, te)), size,
                     f"{100 * s.instance_savings:.4f}", f"{100 * s.check_savings:.4f}",
                     f"{report.elapsed_ms:.3f}"))
        trees.append(f"# fold {f}\n" + format_tree(report.best.tree, tr))
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    _emit(buf.getvalue(), args.out)
    if args.tree_out or args.out:
        tree_path = args.tree_out or str(Path(args.out).with_suffix(".tree"))
        Path(tree_path).write_text("".join(trees), encoding="utf-8")
    mean = np.mean([float(r[2]) for r in rows[1:]])
    print(f"mean test accuracy {mean:.4f} over {args.folds} folds", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    dataset = load_dataset(args)
    xs, xe = x_schedule(args)
    try:
        grid = tuple(int(p) for p in args.grid.split(",") if p.strip())
    except ValueError:
        raise UsageError(f"bad --grid {args.grid!r}") from None
    spec = BenchmarkSpec(grid=grid, mutation_rate=args.mutation, x_start=xs, x_end=xe,
                         seed=args.seed, repetitions=args.repetitions, generations=args.gens,
                         population=args.pop, elitism=args.elitism,
                         accuracy_unit=args.accuracy_unit, folds=args.folds)
    rows = run_benchmark(spec, dataset)
    _emit(rows_to_csv(rows), args.out)
    return 0


def cmd_costmodel(args) -> int:
    if args.savings:
        curve = costmodel.fig5_table(args.k_min, args.k_max)
    else:
        curve = costmodel.ratio_curve(args.shape, args.k_min, args.k_max, args.variant)
    _emit(curve.to_csv(), args.out)
    return 0


def cmd_gen_data(args) -> int:
    if args.generator == "multiplexor":
        ds = generate_multiplexor(args.address_bits)
    else:
        ds = generate_parity(args.bits)
    _emit(ds.csv_text(), args.out)
    return 0


def cmd_inspect(args) -> int:
    try:
        text = Path(args.tree).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {args.tree}: {e}") from None
    parsed = parse_tree_text(text)
    if not (args.data or args.synthetic):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        print(f"# leaves {parsed.leaf_count()}  depth {parsed.depth()}")
        return 0
    dataset = load_dataset(args)
    tree = bind_tree(parsed, dataset)
    c = EvalCounters()
    evaluate_full(tree, dataset, c)
    size, correct = aggregate(tree)
    sys.stdout.write(format_tree(tree, dataset))
    print(f"# leaves {size}  depth {parsed.depth()}  accuracy {correct}/{dataset.n}  "
          f"checks {c.node_instance_checks}")
    return 0


COMMANDS = {"evolve": cmd_evolve, "bench": cmd_bench, "costmodel": cmd_costmodel,
            "gen-data": cmd_gen_data, "inspect": cmd_inspect}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DataError, TreeFormatError, ValueError) as e:
        print(f"evotree {args.command}: error: {e}", file=sys.stderr)
        return 1
    except LosslessError as e:
        print(f"evotree {args.command}: lossless check failed: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
