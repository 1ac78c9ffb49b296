"""Constructive procedures: stabilization, payments, and subsidy conversion.

The central pipeline takes any starting allocation, merges bundles until the
allocation is transfer-stable, then charges each agent its own value minus an
equal share of the social welfare. For superadditive valuations the result is
exactly envy-free and equitable, with balanced payments; an optional final
shift turns the payments into pure subsidies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal

from .core import (
    Allocation,
    ExplicitValuation,
    FairDivisionError,
    Instance,
    Outcome,
    STRUCTURE_CHECK_TASK_LIMIT,
    TaskSet,
    as_rational,
    ensure_valid_allocation,
    superadditivity_violation,
)
from .properties import (
    PositiveCycle,
    build_envy_graph,
    has_positive_cycle,
    is_efeq_convertible,
)


class NotSuperadditiveError(FairDivisionError):
    """An agent's valuation fails superadditivity on a concrete bundle pair."""

    def __init__(self, agent: int, bundle_a: TaskSet, bundle_b: TaskSet):
        self.agent = agent
        self.bundle_a = bundle_a
        self.bundle_b = bundle_b
        super().__init__(
            f"agent {agent}'s valuation is not superadditive: disjoint bundles "
            f"with masks {bundle_a:#b} and {bundle_b:#b} are jointly worth less "
            f"than their parts"
        )


class NotConvertibleError(FairDivisionError):
    """The allocation admits no payments that are envy-free and equitable."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(
            f"allocation is not convertible to an envy-free equitable outcome "
            f"(witness: {witness})"
        )


class PositiveCycleError(FairDivisionError):
    """The envy graph has a positive cycle, so no subsidies can remove envy."""

    def __init__(self, cycle: PositiveCycle):
        self.cycle = cycle
        super().__init__(
            f"envy graph has a positive cycle through agents {list(cycle.agents)} "
            f"with weight {cycle.weight}"
        )


@dataclass(frozen=True)
class StabilizationStep:
    """One merge: `receiver` absorbed `giver`'s entire bundle."""

    giver: int
    receiver: int
    bundle_moved: TaskSet
    welfare_after: Fraction


@dataclass(frozen=True)
class StabilizationTrace:
    initial: Allocation
    final: Allocation
    steps: tuple[StabilizationStep, ...]


def transfer_stabilize(inst: Instance, alloc: Allocation) -> tuple[Allocation, StabilizationTrace]:
    """Merge bundles until no agent can profitably absorb another's bundle.

    Ordered pairs are scanned lexicographically and the first strict
    violation v_i(X_i | X_j) > v_i(X_i) + v_j(X_j) triggers the merge
    X_i <- X_i | X_j, X_j <- empty. Welfare strictly increases with every
    merge, the loop takes at most n^2 merges, and the result never has less
    welfare than the input.
    """
    ensure_valid_allocation(inst, alloc)
    n = inst.n
    vals = inst.valuations
    bundles = list(alloc.bundles)
    own = [vals[k].value(b) for k, b in enumerate(bundles)]
    steps: list[StabilizationStep] = []
    # The merge count is provably <= n^2; anything past 2n^2 is a bug here.
    guard = 2 * n * n + 8
    while True:
        found = None
        for i in range(n):
            vi = vals[i]
            for j in range(n):
                if i == j or bundles[j] == 0:
                    continue
                if vi.value(bundles[i] | bundles[j]) > own[i] + own[j]:
                    found = (i, j)
                    break
            if found:
                break
        if found is None:
            break
        i, j = found
        moved = bundles[j]
        bundles[i] |= moved
        bundles[j] = 0
        own[i] = vals[i].value(bundles[i])
        own[j] = Fraction(0)
        steps.append(
            StabilizationStep(
                giver=j,
                receiver=i,
                bundle_moved=moved,
                welfare_after=sum(own, Fraction(0)),
            )
        )
        if len(steps) > guard:
            raise AssertionError("stabilization exceeded its provable merge bound")
    final = Allocation(tuple(bundles))
    return final, StabilizationTrace(initial=alloc, final=final, steps=tuple(steps))


def knaster_payments(inst: Instance, alloc: Allocation) -> tuple[Fraction, ...]:
    """Charge each agent its own-bundle value minus an equal welfare share.

    p_i = v_i(X_i) - SW(X)/n. The payments sum to exactly zero and give every
    agent utility SW(X)/n; each denominator divides n.
    """
    ensure_valid_allocation(inst, alloc)
    own = [val.value(b) for val, b in zip(inst.valuations, alloc.bundles)]
    share = sum(own, Fraction(0)) / inst.n
    return tuple(x - share for x in own)


def subsidize(payments: Iterable) -> tuple[Fraction, ...]:
    """Shift all payments down by the largest positive one.

    Afterwards no agent pays money. Without any positive payment the vector
    is returned unchanged (shifting would only waste subsidy).
    """
    p = tuple(as_rational(x) for x in payments)
    shift = max((x for x in p if x > 0), default=None)
    if shift is None:
        return p
    return tuple(x - shift for x in p)


ConversionMode = Literal["balanced", "subsidy"]


def efeq_convert(inst: Instance, alloc: Allocation,
                 mode: ConversionMode = "balanced") -> tuple[Outcome, StabilizationTrace]:
    """Full pipeline: stabilize, charge welfare-share payments, optionally shift.

    Requires superadditive valuations; explicit valuations small enough to
    enumerate are validated up front, additive ones hold by construction, and
    larger explicit tables are taken on trust (see README). The outcome is
    envy-free and equitable; in balanced mode payments sum to 0 and every
    utility equals SW/n, in subsidy mode no agent pays.
    """
    if mode not in ("balanced", "subsidy"):
        raise ValueError(f"unknown conversion mode: {mode!r}")
    ensure_valid_allocation(inst, alloc)
    for k, val in enumerate(inst.valuations):
        if isinstance(val, ExplicitValuation) and val.m <= STRUCTURE_CHECK_TASK_LIMIT:
            violation = superadditivity_violation(val)
            if violation is not None:
                raise NotSuperadditiveError(k, *violation)
    stable, trace = transfer_stabilize(inst, alloc)
    payments = knaster_payments(inst, stable)
    if mode == "subsidy":
        payments = subsidize(payments)
    return Outcome(stable, payments), trace


def grand_bundle_allocation(inst: Instance) -> Allocation:
    """Give every task to an agent valuing the whole set most (smallest index).

    Transfer-stable by construction, for any valuations.
    """
    universe = inst.universe
    best = 0
    best_value = inst.valuations[0].value(universe)
    for k in range(1, inst.n):
        v = inst.valuations[k].value(universe)
        if v > best_value:
            best = k
            best_value = v
    return Allocation(tuple(universe if k == best else 0 for k in range(inst.n)))


def minimal_efeq_payments(inst: Instance, alloc: Allocation) -> tuple[Fraction, ...]:
    """Cheapest pure-subsidy payments making the allocation envy-free and equitable.

    Every agent is topped up to utility max_j v_j(X_j): q_i = v_i(X_i) - max own
    value. All entries are <= 0, at least one is 0, and among all envy-free
    equitable payment vectors with no agent paying, total subsidy is minimal
    (equalizing payments are unique up to a uniform shift).
    """
    convertible = is_efeq_convertible(inst, alloc)
    if not convertible:
        raise NotConvertibleError(convertible.witness)
    own = [val.value(b) for val, b in zip(inst.valuations, alloc.bundles)]
    top = max(own)
    return tuple(x - top for x in own)


def envy_free_subsidies(inst: Instance, alloc: Allocation) -> tuple[Fraction, ...]:
    """Envy-removing subsidies from maximum-weight envy-graph paths.

    s_i is the largest total weight of any simple path starting at i, which is
    well-defined and >= 0 exactly when the envy graph has no positive cycle;
    the returned payments are p = -s and make the outcome envy-free. Targets
    envy-freeness alone, for comparison with the combined pipeline.
    """
    graph = build_envy_graph(inst, alloc)
    cycle = has_positive_cycle(graph)
    if cycle:
        raise PositiveCycleError(cycle.witness)
    n = graph.n
    w = graph.weights
    best = [Fraction(0)] * n
    for _ in range(n):
        nxt = list(best)
        changed = False
        for i in range(n):
            row = w[i]
            for j in range(n):
                if i == j:
                    continue
                cand = row[j] + best[j]
                if cand > nxt[i]:
                    nxt[i] = cand
                    changed = True
        best = nxt
        if not changed:
            break
    return tuple(-x for x in best)


def total_subsidy(payments: Iterable) -> Fraction:
    """Total money handed out: the sum of -p over the negative payments."""
    return sum((-x for x in map(as_rational, payments) if x < 0), Fraction(0))
