"""Brute-force ground truth for small instances.

Everything here trades time for certainty: allocations are enumerated
exhaustively (the space is n^m), reassignment stability is re-decided by raw
permutation search, and minimum subsidies come from trying every allocation.
Used to validate the polynomial checkers and as the reference for tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import (
    Allocation,
    FairDivisionError,
    Instance,
    Outcome,
    UnsupportedCheckError,
    as_rational,
    ensure_valid_allocation,
)
from .properties import (
    build_envy_graph,
    efeq_convertible_by_payments,
    has_positive_cycle,
    is_efeq_convertible,
    is_envy_free,
    is_equitable,
    is_reassignment_stable,
    is_transfer_stable,
)

DEFAULT_ALLOCATION_BUDGET = 4096
PERMUTATION_LIMIT = 8


class BudgetExceededError(FairDivisionError):
    """Refusal to enumerate an allocation space larger than the budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"enumeration needs {required} allocations but the budget is {budget}; "
            f"rerun with a budget of at least {required}"
        )


def allocation_count(inst: Instance) -> int:
    return inst.n ** inst.m


def enumerate_allocations(inst: Instance,
                          budget: int = DEFAULT_ALLOCATION_BUDGET) -> Iterator[Allocation]:
    """Yield all n^m allocations, counting through task->agent assignments."""
    required = allocation_count(inst)
    if required > budget:
        raise BudgetExceededError(required, budget)
    n = inst.n
    for assignment in itertools.product(range(n), repeat=inst.m):
        yield Allocation.from_assignment(assignment, n)


def oracle_exists_envy_free_allocation(inst: Instance,
                                       budget: int = DEFAULT_ALLOCATION_BUDGET) -> bool:
    """Is some allocation envy-free with all-zero payments?"""
    zero = (Fraction(0),) * inst.n
    return any(
        is_envy_free(inst, Outcome(alloc, zero))
        for alloc in enumerate_allocations(inst, budget)
    )


def oracle_min_subsidy_efeq(inst: Instance,
                            budget: int = DEFAULT_ALLOCATION_BUDGET
                            ) -> tuple[Fraction, Allocation] | None:
    """Minimum total subsidy over all convertible allocations, with a witness.

    The subsidy of an allocation is n * max_i v_i(X_i) - SW(X), what the
    cheapest pure-subsidy envy-free equitable payments cost. Returns the
    first optimal allocation in enumeration order. A convertible allocation
    always exists (the grand bundle qualifies for any valuations), so None
    is only a guard against that reasoning being wrong.
    """
    best: tuple[Fraction, Allocation] | None = None
    for alloc in enumerate_allocations(inst, budget):
        if not is_efeq_convertible(inst, alloc):
            continue
        own = [val.value(b) for val, b in zip(inst.valuations, alloc.bundles)]
        subsidy = inst.n * max(own) - sum(own, Fraction(0))
        if best is None or subsidy < best[0]:
            best = (subsidy, alloc)
    return best


def brute_force_reassignment_stable(inst: Instance,
                                    alloc: Allocation) -> tuple[bool, tuple[int, ...] | None]:
    """Reassignment stability by trying all n! bundle permutations."""
    ensure_valid_allocation(inst, alloc)
    n = inst.n
    if n > PERMUTATION_LIMIT:
        raise UnsupportedCheckError(
            f"permutation search limited to {PERMUTATION_LIMIT} agents "
            f"({math.factorial(PERMUTATION_LIMIT)} permutations); got {n}"
        )
    matrix = [[val.value(b) for b in alloc.bundles] for val in inst.valuations]
    identity = sum((matrix[i][i] for i in range(n)), Fraction(0))
    best_perm = None
    best = identity
    for perm in itertools.permutations(range(n)):
        welfare = sum((matrix[i][perm[i]] for i in range(n)), Fraction(0))
        if welfare > best:
            best = welfare
            best_perm = perm
    return best_perm is None, best_perm


def enumerate_additive_instances(n: int, m: int, values: Sequence,
                                 tasks: Sequence[str] | None = None) -> Iterator[Instance]:
    """All additive instances over a finite value grid (len(values)^(n*m) many)."""
    grid = tuple(as_rational(v) for v in values)
    names = tuple(tasks) if tasks is not None else tuple(f"t{k + 1}" for k in range(m))
    for flat in itertools.product(grid, repeat=n * m):
        rows = [flat[a * m:(a + 1) * m] for a in range(n)]
        yield Instance.additive(rows, tasks=names)


@dataclass(frozen=True)
class LatticeReport:
    """Property flags for one allocation plus any implication-edge violations."""

    transfer_stable: bool
    reassignment_stable: bool
    envy_freeable: bool
    efeq_convertible: bool
    equitable_convertible: bool
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_lattice(inst: Instance, alloc: Allocation) -> LatticeReport:
    """Check the additive-valuation property lattice on one allocation.

    Convertibility is re-derived through the payment-based route and envy
    compared against both the assignment solver and the cycle criterion, so
    the implications below are genuine cross-checks rather than tautologies:

      efeq_convertible => envy_freeable
      envy_freeable    => equitable_convertible   (the latter always holds)
      transfer_stable  => reassignment_stable
      efeq_convertible <=> transfer_stable
      envy_freeable    <=> reassignment_stable    (via the cycle criterion)
    """
    if not inst.is_additive:
        raise UnsupportedCheckError("lattice verification requires an additive instance")
    ts = bool(is_transfer_stable(inst, alloc))
    rs = bool(is_reassignment_stable(inst, alloc))
    convertible = bool(efeq_convertible_by_payments(inst, alloc))
    cycle_free = not has_positive_cycle(build_envy_graph(inst, alloc))
    # Constructive equitable-convertibility: top everyone up to the max own value.
    own = [val.value(b) for val, b in zip(inst.valuations, alloc.bundles)]
    top = max(own)
    equalizing = tuple(x - top for x in own)
    eq_convertible = bool(is_equitable(inst, Outcome(alloc, equalizing)))

    violations = []
    if convertible and not cycle_free:
        violations.append("efeq_convertible->envy_freeable")
    if cycle_free and not eq_convertible:
        violations.append("envy_freeable->equitable_convertible")
    if ts and not rs:
        violations.append("transfer_stable->reassignment_stable")
    if convertible != ts:
        violations.append("efeq_convertible<->transfer_stable")
    if cycle_free != rs:
        violations.append("envy_freeable<->reassignment_stable")
    return LatticeReport(
        transfer_stable=ts,
        reassignment_stable=rs,
        envy_freeable=cycle_free,
        efeq_convertible=convertible,
        equitable_convertible=eq_convertible,
        violations=tuple(violations),
    )
