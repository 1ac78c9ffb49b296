"""Shared fixtures and small builders for the test suite."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from fairpay import Allocation, Instance

# Two agents, two tasks; agent 1 values (a, b) at (200, 100), agent 2 at (2, 1).
# The split allocation gives a to agent 1 and b to agent 2.
EX1 = Instance.additive([[200, 100], [2, 1]], tasks=("a", "b"))
X_SPLIT = Allocation((0b01, 0b10))
X_GRAND = Allocation((0b11, 0b00))
X_SWAPPED = Allocation((0b10, 0b01))

ZEROS_2x2 = Instance.additive([[0, 0], [0, 0]], tasks=("a", "b"))


def all_allocations(n: int, m: int):
    for assignment in itertools.product(range(n), repeat=m):
        yield Allocation.from_assignment(assignment, n)


def random_additive(rng: random.Random, n: int, m: int, lo: int, hi: int) -> Instance:
    rows = [[rng.randint(lo, hi) for _ in range(m)] for _ in range(n)]
    return Instance.additive(rows)


def random_alloc(rng: random.Random, n: int, m: int) -> Allocation:
    return Allocation.from_assignment([rng.randrange(n) for _ in range(m)], n)


def own_values(inst: Instance, alloc: Allocation) -> list[Fraction]:
    return [val.value(b) for val, b in zip(inst.valuations, alloc.bundles)]
