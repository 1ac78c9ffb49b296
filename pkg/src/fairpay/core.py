"""Exact-arithmetic domain model: instances, valuations, allocations, payments.

Every numeric quantity is a `fractions.Fraction`; nothing on a decision path
ever touches floating point. Bundles of tasks are plain int bitmasks over
task indices 0..m-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rational = Fraction
TaskSet = int
PaymentVector = "tuple[Fraction, ...]"

# Explicit tables are keyed by bitmask and must be total, which bounds them in
# practice; the hard cap matches a 63-bit mask so files stay portable.
EXPLICIT_TASK_LIMIT = 63
# Superadditivity / supermodularity checks enumerate subset pairs and are
# exponential; refuse beyond this many tasks.
STRUCTURE_CHECK_TASK_LIMIT = 16


class FairDivisionError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInstanceError(FairDivisionError):
    """Instance data violates a structural invariant (partial table, bad sizes...)."""


class InvalidAllocationError(FairDivisionError):
    """Bundles are not a partition of the instance's task set."""


class UnsupportedCheckError(FairDivisionError):
    """A requested validation is too large to enumerate."""


def as_rational(x) -> Fraction:
    """Coerce an exact input (int, Fraction, or numeric string) to Fraction.

    Floats are refused: they would silently contaminate exact comparisons.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not valid numeric values")
    if isinstance(x, float):
        raise TypeError(
            "floating-point values are not accepted; pass an int, Fraction, "
            "or an exact string such as '3/4' or '0.25'"
        )
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse {x!r} as an exact rational") from exc
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


# ---------------------------------------------------------------------------
# Task-set (bitmask) helpers
# ---------------------------------------------------------------------------

def full_set(m: int) -> TaskSet:
    """Bitmask containing all of tasks 0..m-1."""
    return (1 << m) - 1


def taskset(indices: Iterable[int]) -> TaskSet:
    mask = 0
    for t in indices:
        mask |= 1 << t
    return mask


def members(bundle: TaskSet) -> Iterator[int]:
    """Yield the task indices in `bundle`, ascending."""
    while bundle:
        low = bundle & -bundle
        yield low.bit_length() - 1
        bundle ^= low


def bundle_size(bundle: TaskSet) -> int:
    return bundle.bit_count()


def submasks(mask: TaskSet) -> Iterator[TaskSet]:
    """All submasks of `mask` (including `mask` and 0), descending."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


# ---------------------------------------------------------------------------
# Valuations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdditiveValuation:
    """Per-task values; a bundle is worth the sum over its members."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_rational(v) for v in self.values))

    @property
    def m(self) -> int:
        return len(self.values)

    def value(self, bundle: TaskSet) -> Fraction:
        total = Fraction(0)
        vals = self.values
        while bundle:
            low = bundle & -bundle
            total += vals[low.bit_length() - 1]
            bundle ^= low
        return total


@dataclass(frozen=True)
class ExplicitValuation:
    """A total table from every subset of the task universe to its value.

    The table must cover all 2^m subsets and map the empty set to exactly 0.
    """

    m: int
    table: Mapping[TaskSet, Fraction]

    def __post_init__(self):
        if not 0 <= self.m <= EXPLICIT_TASK_LIMIT:
            raise MalformedInstanceError(
                f"explicit valuations support at most {EXPLICIT_TASK_LIMIT} tasks, got {self.m}"
            )
        size = 1 << self.m
        fixed: dict[TaskSet, Fraction] = {}
        for key, raw in self.table.items():
            if not isinstance(key, int) or isinstance(key, bool) or not 0 <= key < size:
                raise MalformedInstanceError(
                    f"explicit table key {key!r} is not a bundle over {self.m} tasks"
                )
            fixed[key] = as_rational(raw)
        if len(fixed) != size:
            missing = next(b for b in range(size) if b not in fixed)
            raise MalformedInstanceError(
                f"explicit table is not total: {size - len(fixed)} of {size} entries "
                f"missing (first missing bundle mask: {missing:#b})"
            )
        if fixed[0] != 0:
            raise MalformedInstanceError(
                f"the empty bundle must be worth exactly 0, got {fixed[0]}"
            )
        object.__setattr__(self, "table", fixed)

    def value(self, bundle: TaskSet) -> Fraction:
        try:
            return self.table[bundle]
        except KeyError:
            raise MalformedInstanceError(
                f"explicit table has no entry for bundle mask {bundle:#b}"
            ) from None


Valuation = Union[AdditiveValuation, ExplicitValuation]


# ---------------------------------------------------------------------------
# Instance / Allocation / Outcome
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    """A set of named tasks plus one valuation per agent over those tasks."""

    tasks: tuple[str, ...]
    valuations: tuple[Valuation, ...]
    is_additive: bool = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "valuations", tuple(self.valuations))
        if not self.valuations:
            raise MalformedInstanceError("an instance needs at least one agent")
        if len(set(self.tasks)) != len(self.tasks):
            raise MalformedInstanceError("task names must be unique")
        m = len(self.tasks)
        for k, val in enumerate(self.valuations):
            if not isinstance(val, (AdditiveValuation, ExplicitValuation)):
                raise MalformedInstanceError(f"agent {k} has no usable valuation")
            if val.m != m:
                raise MalformedInstanceError(
                    f"agent {k}'s valuation covers {val.m} tasks but the instance has {m}"
                )
        object.__setattr__(
            self,
            "is_additive",
            all(isinstance(v, AdditiveValuation) for v in self.valuations),
        )

    @property
    def n(self) -> int:
        return len(self.valuations)

    @property
    def m(self) -> int:
        return len(self.tasks)

    @property
    def universe(self) -> TaskSet:
        return (1 << len(self.tasks)) - 1

    @classmethod
    def additive(cls, rows: Sequence[Sequence], tasks: Sequence[str] | None = None) -> "Instance":
        """Build an all-additive instance from a value matrix (rows = agents)."""
        if tasks is None:
            width = len(rows[0]) if rows else 0
            tasks = tuple(f"t{k + 1}" for k in range(width))
        return cls(tuple(tasks), tuple(AdditiveValuation(tuple(r)) for r in rows))

    @classmethod
    def explicit(cls, tables: Sequence[Mapping[TaskSet, object]],
                 tasks: Sequence[str]) -> "Instance":
        m = len(tasks)
        return cls(tuple(tasks), tuple(ExplicitValuation(m, dict(t)) for t in tables))


@dataclass(frozen=True)
class Allocation:
    """A partition of the tasks into one (possibly empty) bundle per agent."""

    bundles: tuple[TaskSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(self.bundles))
        seen = 0
        for k, b in enumerate(self.bundles):
            if not isinstance(b, int) or b < 0:
                raise InvalidAllocationError(f"bundle {k} is not a task bitmask")
            overlap = seen & b
            if overlap:
                dupes = ", ".join(str(t) for t in members(overlap))
                raise InvalidAllocationError(
                    f"task indices {{{dupes}}} appear in more than one bundle"
                )
            seen |= b

    @property
    def n(self) -> int:
        return len(self.bundles)

    @classmethod
    def from_assignment(cls, assignment: Sequence[int], n: int) -> "Allocation":
        """Build from a task->agent vector: assignment[t] is the agent of task t."""
        bundles = [0] * n
        for t, agent in enumerate(assignment):
            bundles[agent] |= 1 << t
        return cls(tuple(bundles))


def ensure_valid_allocation(inst: Instance, alloc: Allocation) -> None:
    """Raise InvalidAllocationError unless `alloc` partitions `inst`'s tasks."""
    if alloc.n != inst.n:
        raise InvalidAllocationError(
            f"allocation has {alloc.n} bundles but the instance has {inst.n} agents"
        )
    union = 0
    for b in alloc.bundles:
        union |= b
    if union != inst.universe:
        foreign = union & ~inst.universe
        if foreign:
            raise InvalidAllocationError(
                f"bundles mention task indices {sorted(members(foreign))} outside the universe"
            )
        missing = [inst.tasks[t] for t in members(inst.universe & ~union)]
        raise InvalidAllocationError(f"tasks not allocated to anyone: {missing}")


@dataclass(frozen=True)
class Outcome:
    """An allocation together with the payment each agent makes.

    A negative payment means the agent receives money.
    """

    allocation: Allocation
    payments: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "payments", tuple(as_rational(p) for p in self.payments))
        if len(self.payments) != self.allocation.n:
            raise ValueError(
                f"{len(self.payments)} payments for {self.allocation.n} bundles"
            )


# ---------------------------------------------------------------------------
# Primitive evaluators
# ---------------------------------------------------------------------------

def value(inst: Instance, agent: int, bundle: TaskSet) -> Fraction:
    """Agent's exact value for a bundle of tasks."""
    if not 0 <= agent < inst.n:
        raise IndexError(f"agent index {agent} out of range for {inst.n} agents")
    if bundle & ~inst.universe:
        raise ValueError("bundle contains task indices outside the instance's universe")
    return inst.valuations[agent].value(bundle)


def social_welfare(inst: Instance, alloc: Allocation) -> Fraction:
    """Sum over agents of the value each assigns to its own bundle."""
    ensure_valid_allocation(inst, alloc)
    return sum(
        (val.value(b) for val, b in zip(inst.valuations, alloc.bundles)),
        Fraction(0),
    )


def utility(inst: Instance, agent: int, bundle: TaskSet, payment) -> Fraction:
    """Quasi-linear utility: bundle value minus the payment made."""
    return value(inst, agent, bundle) - as_rational(payment)


def own_utilities(inst: Instance, outcome: Outcome) -> tuple[Fraction, ...]:
    """Each agent's utility for its own bundle-payment pair."""
    ensure_valid_allocation(inst, outcome.allocation)
    return tuple(
        val.value(b) - p
        for val, b, p in zip(inst.valuations, outcome.allocation.bundles, outcome.payments)
    )


# ---------------------------------------------------------------------------
# Valuation-structure validators
# ---------------------------------------------------------------------------

def superadditivity_violation(val: Valuation) -> tuple[TaskSet, TaskSet] | None:
    """First disjoint pair (A, B) with v(A|B) < v(A) + v(B), else None.

    Additive valuations satisfy the property with equality, so they never
    produce a violation. Explicit tables are enumerated over all disjoint
    pairs, O(3^m) table lookups.
    """
    if isinstance(val, AdditiveValuation):
        return None
    m = val.m
    universe = full_set(m)
    for a in range(1, 1 << m):
        va = val.value(a)
        for b in submasks(universe & ~a):
            if b == 0:
                continue
            if val.value(a | b) < va + val.value(b):
                return (a, b)
    return None


def supermodularity_violation(val: Valuation) -> tuple[TaskSet, TaskSet] | None:
    """First pair (A, B) with v(A|B) < v(A) + v(B) - v(A&B), else None.

    All subset pairs are enumerated (the inequality is symmetric, so only
    A <= B numerically), O(4^m) table lookups.
    """
    if isinstance(val, AdditiveValuation):
        return None
    m = val.m
    for a in range(1 << m):
        va = val.value(a)
        for b in range(a, 1 << m):
            if val.value(a | b) < va + val.value(b) - val.value(a & b):
                return (a, b)
    return None


def _check_structure(inst: Instance, agent: int, finder) -> bool:
    if not 0 <= agent < inst.n:
        raise IndexError(f"agent index {agent} out of range for {inst.n} agents")
    val = inst.valuations[agent]
    if isinstance(val, AdditiveValuation):
        return True
    if val.m > STRUCTURE_CHECK_TASK_LIMIT:
        raise UnsupportedCheckError(
            f"structure checks enumerate subset pairs and support at most "
            f"{STRUCTURE_CHECK_TASK_LIMIT} tasks; this valuation has {val.m}"
        )
    return finder(val) is None


def validate_superadditive(inst: Instance, agent: int) -> bool:
    """True iff the agent's valuation is superadditive (additive: trivially true)."""
    return _check_structure(inst, agent, superadditivity_violation)


def validate_supermodular(inst: Instance, agent: int) -> bool:
    """True iff the agent's valuation is supermodular (additive: trivially true)."""
    return _check_structure(inst, agent, supermodularity_violation)
