"""Decision procedures for allocation and outcome properties.

Every checker returns a `CheckResult`: truthy/falsy like a bool, with a
`.witness` that reproduces the violation whenever the answer is negative
(or, for cycle detection, positive). All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .core import (
    Allocation,
    Instance,
    Outcome,
    ensure_valid_allocation,
)


@dataclass(frozen=True)
class CheckResult:
    """Boolean answer plus, when the answer is negative, a concrete witness."""

    ok: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class PositiveCycle:
    """A directed cycle of agents whose envy weights sum to > 0.

    `agents[k]` envies `agents[k+1]` along the cycle, wrapping at the end.
    The node list is rotated to start at the smallest agent index.
    """

    agents: tuple[int, ...]
    weight: Fraction


@dataclass(frozen=True)
class EnvyGraph:
    """Complete digraph on agents, arc (i, j) weighted by i's envy toward j."""

    weights: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.weights)


def build_envy_graph(inst: Instance, alloc: Allocation) -> EnvyGraph:
    """Arc weight w(i, j) = v_i(X_j) - v_i(X_i); the diagonal is exactly 0."""
    ensure_valid_allocation(inst, alloc)
    rows = []
    for i, val in enumerate(inst.valuations):
        own = val.value(alloc.bundles[i])
        rows.append(tuple(val.value(b) - own for b in alloc.bundles))
    return EnvyGraph(tuple(rows))


# ---------------------------------------------------------------------------
# Outcome-level properties
# ---------------------------------------------------------------------------

def _outcome_tables(inst: Instance, outcome: Outcome):
    ensure_valid_allocation(inst, outcome.allocation)
    if len(outcome.payments) != inst.n:
        raise ValueError(
            f"{len(outcome.payments)} payments for an instance with {inst.n} agents"
        )
    bundles = outcome.allocation.bundles
    own = tuple(
        val.value(b) - p
        for val, b, p in zip(inst.valuations, bundles, outcome.payments)
    )
    return bundles, own


def is_envy_free(inst: Instance, outcome: Outcome) -> CheckResult:
    """No agent strictly prefers another agent's bundle-payment pair.

    The witness is a maximally envious pair (i, j), ties broken by the
    lexicographically smallest pair.
    """
    bundles, own = _outcome_tables(inst, outcome)
    worst = None
    pair = None
    for i, val in enumerate(inst.valuations):
        ui = own[i]
        for j in range(inst.n):
            if i == j:
                continue
            envy = (val.value(bundles[j]) - outcome.payments[j]) - ui
            if envy > 0 and (worst is None or envy > worst):
                worst = envy
                pair = (i, j)
    return CheckResult(pair is None, pair)


def is_equitable(inst: Instance, outcome: Outcome) -> CheckResult:
    """All agents derive exactly equal utility from their own outcome.

    The witness is the (argmin, argmax) utility pair, smallest indices first.
    """
    _, own = _outcome_tables(inst, outcome)
    lo = min(own)
    hi = max(own)
    if lo == hi:
        return CheckResult(True)
    return CheckResult(False, (own.index(lo), own.index(hi)))


# ---------------------------------------------------------------------------
# Allocation-level properties
# ---------------------------------------------------------------------------

def is_transfer_stable(inst: Instance, alloc: Allocation) -> CheckResult:
    """No agent i could raise joint value by absorbing agent j's whole bundle.

    Scans ordered pairs lexicographically with O(n^2) valuation calls; the
    witness is the first (i, j) with v_i(X_i | X_j) > v_i(X_i) + v_j(X_j).
    """
    ensure_valid_allocation(inst, alloc)
    bundles = alloc.bundles
    own = [val.value(b) for val, b in zip(inst.valuations, bundles)]
    for i, val in enumerate(inst.valuations):
        for j in range(inst.n):
            if i == j:
                continue
            if val.value(bundles[i] | bundles[j]) > own[i] + own[j]:
                return CheckResult(False, (i, j))
    return CheckResult(True)


def max_weight_assignment(matrix: Sequence[Sequence[Fraction]]) -> tuple[tuple[int, ...], Fraction]:
    """Exact maximum-weight perfect assignment on a square matrix.

    Shortest-augmenting-path (Hungarian) method on the negated matrix, O(n^3)
    arithmetic operations, all of them exact. Returns (perm, total) where row
    i is matched to column perm[i].
    """
    n = len(matrix)
    if n == 0:
        return (), Fraction(0)
    cost = [[-Fraction(x) for x in row] for row in matrix]
    big = Fraction(1) + (n + 2) * sum(
        (abs(c) for row in cost for c in row), Fraction(0)
    )
    u = [Fraction(0)] * (n + 1)
    v = [Fraction(0)] * (n + 1)
    match = [0] * (n + 1)          # match[j] = row assigned to column j (1-based)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [big] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = None
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if delta is None or minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    perm = [0] * n
    for j in range(1, n + 1):
        perm[match[j] - 1] = j - 1
    total = sum((matrix[i][perm[i]] for i in range(n)), Fraction(0))
    return tuple(perm), total


def is_reassignment_stable(inst: Instance, alloc: Allocation) -> CheckResult:
    """No permutation of the fixed bundles among agents increases welfare.

    Solves the max-weight assignment problem on M[i][j] = v_i(X_j) exactly;
    the witness is an improving permutation (agent i takes bundle witness[i]).
    """
    ensure_valid_allocation(inst, alloc)
    matrix = [
        [val.value(b) for b in alloc.bundles] for val in inst.valuations
    ]
    identity = sum((matrix[i][i] for i in range(inst.n)), Fraction(0))
    perm, best = max_weight_assignment(matrix)
    if best > identity:
        return CheckResult(False, perm)
    return CheckResult(True)


def has_positive_cycle(graph: EnvyGraph) -> CheckResult:
    """True iff some directed cycle has strictly positive total weight.

    Bellman-Ford negative-cycle detection on the negated weights, started
    from every vertex at distance 0. Zero-weight cycles are not reported:
    the relaxation is strict and the arithmetic exact.
    """
    n = graph.n
    if n <= 1:
        return CheckResult(False)
    w = graph.weights
    dist = [Fraction(0)] * n
    parent = [-1] * n
    touched = -1
    for _ in range(n):
        touched = -1
        for a in range(n):
            da = dist[a]
            row = w[a]
            for b in range(n):
                if a == b:
                    continue
                cand = da - row[b]
                if cand < dist[b]:
                    dist[b] = cand
                    parent[b] = a
                    touched = b
        if touched == -1:
            return CheckResult(False)
    # A relaxation happened on the n-th pass, so the parent links from the
    # last relaxed vertex run into a cycle; walk until a vertex repeats.
    seen: dict[int, int] = {}
    order: list[int] = []
    x = touched
    while x != -1 and x not in seen:
        seen[x] = len(order)
        order.append(x)
        x = parent[x]
    if x == -1:
        raise AssertionError("parent chain ended without reaching a cycle")
    chain = order[seen[x]:]        # backward arcs: chain[k+1] -> chain[k]
    nodes = [chain[0]] + chain[:0:-1]
    lo = nodes.index(min(nodes))
    nodes = nodes[lo:] + nodes[:lo]
    weight = sum(
        (w[nodes[k]][nodes[(k + 1) % len(nodes)]] for k in range(len(nodes))),
        Fraction(0),
    )
    if weight <= 0:
        raise AssertionError("cycle extraction produced a non-positive cycle")
    return CheckResult(True, PositiveCycle(tuple(nodes), weight))


def is_envy_freeable(inst: Instance, alloc: Allocation) -> CheckResult:
    """Some payment vector makes the allocation envy-free.

    Decided via reassignment stability; the witness on failure is an
    improving bundle permutation.
    """
    return is_reassignment_stable(inst, alloc)


def _knaster(inst: Instance, alloc: Allocation) -> tuple[Fraction, ...]:
    own = [val.value(b) for val, b in zip(inst.valuations, alloc.bundles)]
    share = sum(own, Fraction(0)) / inst.n
    return tuple(x - share for x in own)


def efeq_convertible_by_payments(inst: Instance, alloc: Allocation) -> CheckResult:
    """Payment-based convertibility test, valid for any valuations.

    Equitability pins payments down to a uniform shift, and envy-freeness is
    invariant under uniform shifts, so one equalizing payment vector decides
    the question: the welfare-share payments are envy-free iff some envy-free
    and equitable payments exist. Witness: envious pair under those payments.
    """
    ensure_valid_allocation(inst, alloc)
    return is_envy_free(inst, Outcome(alloc, _knaster(inst, alloc)))


def is_efeq_convertible(inst: Instance, alloc: Allocation) -> CheckResult:
    """Some payments make the allocation envy-free and equitable at once.

    For additive instances this is equivalent to transfer stability, checked
    in O(n^2); otherwise falls back to the exact payment-based test. The two
    routes agree on additive instances.
    """
    if inst.is_additive:
        return is_transfer_stable(inst, alloc)
    return efeq_convertible_by_payments(inst, alloc)


# ---------------------------------------------------------------------------
# Combined report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropertyReport:
    """Every property decision for one allocation (and optional payments)."""

    transfer_stable: CheckResult
    reassignment_stable: CheckResult
    envy_freeable: CheckResult
    efeq_convertible: CheckResult
    positive_envy_cycle: CheckResult
    envy_free: CheckResult | None = None
    equitable: CheckResult | None = None


def analyze(inst: Instance, alloc: Allocation,
            payments: Sequence | None = None) -> PropertyReport:
    """Run every checker; outcome-level checks only when payments are given."""
    ensure_valid_allocation(inst, alloc)
    ef = eq = None
    if payments is not None:
        outcome = Outcome(alloc, tuple(payments))
        ef = is_envy_free(inst, outcome)
        eq = is_equitable(inst, outcome)
    return PropertyReport(
        transfer_stable=is_transfer_stable(inst, alloc),
        reassignment_stable=is_reassignment_stable(inst, alloc),
        envy_freeable=is_envy_freeable(inst, alloc),
        efeq_convertible=is_efeq_convertible(inst, alloc),
        positive_envy_cycle=has_positive_cycle(build_envy_graph(inst, alloc)),
        envy_free=ef,
        equitable=eq,
    )
