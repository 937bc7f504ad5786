"""Tree payoff and the x-factor schedule."""

from __future__ import annotations

from .tree import DecisionTree, aggregate

COUNT, FRACTION = "count", "fraction"


def payoff(accuracy, size, x):
    """accuracy^2 * x / (size^2 + x).

    Works on ints, floats or ``fractions.Fraction`` alike; the result type
    follows ordinary numeric promotion, so Fraction inputs give exact values.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    if x <= 0:
        raise ValueError("x must be positive")
    return accuracy * accuracy * x / (size * size + x)


def x_at(config, generation: int) -> float:
    """Linearly interpolated x for ``generation`` (0-based)."""
    g_last = config.generations - 1
    if g_last <= 0 or config.x_start == config.x_end:
        return config.x_start
    return config.x_start + (config.x_end - config.x_start) * generation / g_last


def accuracy_value(correct: int, n: int, unit: str):
    if unit == COUNT:
        return correct
    if unit == FRACTION:
        return correct / n if n else 0.0
    raise ValueError(f"unknown accuracy unit {unit!r}")


def score(tree: DecisionTree, n: int, x, unit: str = COUNT):
    """Payoff of an evaluated tree from its leaf aggregate."""
    size, correct = aggregate(tree)
    return payoff(accuracy_value(correct, n, unit), size, x)
