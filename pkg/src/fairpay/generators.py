"""Seeded instance generators, including the adversarial worst-case family.

All generators are deterministic in their seed: the same call produces the
same instance, and therefore the same serialized file, byte for byte.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .core import Allocation, ExplicitValuation, Instance

BONUS_TASK_LIMIT = 10

GENERATOR_KINDS = ("random-additive", "identical", "superadditive-bonus", "worst-case")


def _task_names(m: int) -> tuple[str, ...]:
    return tuple(f"t{k + 1}" for k in range(m))


def _check_params(n: int, m: int, c: int | None = None):
    if n < 1:
        raise ValueError(f"need at least one agent, got n={n}")
    if m < 0:
        raise ValueError(f"task count must be non-negative, got m={m}")
    if c is not None and c < 1:
        raise ValueError(f"value range bound must be >= 1, got c={c}")


def random_additive_instance(n: int, m: int, c: int, seed: int,
                             positive: bool = False) -> Instance:
    """Integer per-task values, uniform in [-c, c], or [1, c] with positive."""
    _check_params(n, m, c)
    rng = random.Random(seed)
    lo = 1 if positive else -c
    rows = [[rng.randint(lo, c) for _ in range(m)] for _ in range(n)]
    return Instance.additive(rows, tasks=_task_names(m))


def identical_instance(n: int, m: int, c: int, seed: int) -> Instance:
    """One random additive row shared by every agent."""
    _check_params(n, m, c)
    rng = random.Random(seed)
    row = [rng.randint(-c, c) for _ in range(m)]
    return Instance.additive([list(row) for _ in range(n)], tasks=_task_names(m))


def superadditive_bonus_instance(n: int, m: int, c: int, seed: int) -> Instance:
    """Explicit valuations v(A) = base(A) + beta * max(0, |A| - 1).

    The base is additive with non-negative per-task values and beta >= 0, so
    the construction is superadditive: merging disjoint non-empty bundles
    gains one extra beta.
    """
    _check_params(n, m, c)
    if m > BONUS_TASK_LIMIT:
        raise ValueError(
            f"the bonus generator builds total tables and supports at most "
            f"{BONUS_TASK_LIMIT} tasks, got m={m}"
        )
    rng = random.Random(seed)
    valuations = []
    for _ in range(n):
        base = [Fraction(rng.randint(0, c)) for _ in range(m)]
        beta = Fraction(rng.randint(0, c))
        table = {}
        for bundle in range(1 << m):
            size = bundle.bit_count()
            total = sum(
                (base[t] for t in range(m) if bundle >> t & 1), Fraction(0)
            )
            if size > 1:
                total += beta * (size - 1)
            table[bundle] = total
        valuations.append(ExplicitValuation(m, table))
    return Instance(_task_names(m), tuple(valuations))


def worst_case_instance(n: int, m: int) -> Instance:
    """Agent 1 values every task at 1, everyone else at 0.

    The only transfer-stable allocations hand all tasks to agent 1, so the
    cheapest envy-free equitable subsidies total (n-1)*m, the worst possible
    under per-task values capped at 1.
    """
    _check_params(n, m)
    rows = [[1] * m] + [[0] * m for _ in range(n - 1)]
    return Instance.additive(rows, tasks=_task_names(m))


def random_allocation(inst: Instance, seed: int) -> Allocation:
    """Uniformly random task->agent assignment."""
    rng = random.Random(seed)
    return Allocation.from_assignment(
        [rng.randrange(inst.n) for _ in range(inst.m)], inst.n
    )


def generate(kind: str, n: int, m: int, c: int = 10, seed: int = 0,
             positive: bool = False) -> Instance:
    """Dispatch by generator kind; see GENERATOR_KINDS."""
    if kind == "random-additive":
        return random_additive_instance(n, m, c, seed, positive=positive)
    if kind == "identical":
        return identical_instance(n, m, c, seed)
    if kind == "superadditive-bonus":
        return superadditive_bonus_instance(n, m, c, seed)
    if kind == "worst-case":
        return worst_case_instance(n, m)
    raise ValueError(f"unknown generator kind {kind!r}; expected one of {GENERATOR_KINDS}")
