import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from fairpay import (
    AdditiveValuation,
    Allocation,
    ExplicitValuation,
    Instance,
    InvalidAllocationError,
    MalformedInstanceError,
    Outcome,
    UnsupportedCheckError,
    as_rational,
    ensure_valid_allocation,
    full_set,
    social_welfare,
    taskset,
    utility,
    validate_superadditive,
    validate_supermodular,
    value,
)
from fairpay.core import superadditivity_violation, supermodularity_violation

from helpers import EX1, X_GRAND, X_SPLIT, ZEROS_2x2


class TestRationalCoercion:
    def test_parses_exact_strings(self):
        assert as_rational("3/4") == F(3, 4)
        assert as_rational("2.5") == F(5, 2)
        assert as_rational("-7") == -7

    def test_rejects_floats(self):
        with pytest.raises(TypeError):
            as_rational(0.1)

    def test_rejects_bools(self):
        with pytest.raises(TypeError):
            as_rational(True)

    def test_rejects_garbage_strings(self):
        with pytest.raises(ValueError):
            as_rational("1.2.3")


class TestTaskSets:
    def test_full_set(self):
        assert full_set(0) == 0
        assert full_set(3) == 0b111

    def test_taskset(self):
        assert taskset([0, 2]) == 0b101


class TestValue:
    def test_single_task(self):
        assert value(EX1, 0, taskset([0])) == 200

    def test_empty_bundle_is_zero(self):
        for agent in range(EX1.n):
            assert value(EX1, agent, 0) == 0

    def test_additive_sum(self):
        # 200 + 100, checked against the matrix by hand
        assert value(EX1, 0, 0b11) == 300

    def test_agent_out_of_range(self):
        with pytest.raises(IndexError):
            value(EX1, 2, 0b01)

    def test_bundle_outside_universe(self):
        with pytest.raises(ValueError):
            value(EX1, 0, 0b100)

    def test_explicit_lookup(self):
        inst = Instance.explicit(
            [{0: 0, 1: 1, 2: 1, 3: 3}, {0: 0, 1: 0, 2: 0, 3: 0}],
            tasks=("x", "y"),
        )
        assert value(inst, 0, 3) == 3
        assert value(inst, 1, 3) == 0


class TestSocialWelfare:
    def test_split(self):
        assert social_welfare(EX1, X_SPLIT) == 201

    def test_all_zero_valuations(self):
        assert social_welfare(ZEROS_2x2, X_SPLIT) == 0

    def test_grand(self):
        assert social_welfare(EX1, X_GRAND) == 300

    def test_incomplete_allocation_rejected(self):
        with pytest.raises(InvalidAllocationError):
            social_welfare(EX1, Allocation((0b01, 0b00)))


class TestUtility:
    def test_payment_received(self):
        assert utility(EX1, 0, 0b10, -199) == 299

    def test_empty_zero(self):
        assert utility(EX1, 1, 0, 0) == 0

    def test_no_payment(self):
        assert utility(EX1, 0, 0b01, 0) == 200


class TestSuperadditivity:
    def test_additive_is_trivially_superadditive(self):
        for agent in range(EX1.n):
            assert validate_superadditive(EX1, agent)

    def test_superadditive_table(self):
        inst = Instance.explicit([{0: 0, 1: 1, 2: 1, 3: 3}], tasks=("x", "y"))
        assert validate_superadditive(inst, 0)

    def test_subadditive_table(self):
        inst = Instance.explicit([{0: 0, 1: 1, 2: 1, 3: 1}], tasks=("x", "y"))
        assert not validate_superadditive(inst, 0)
        a, b = superadditivity_violation(inst.valuations[0])
        assert a & b == 0
        val = inst.valuations[0]
        assert val.value(a | b) < val.value(a) + val.value(b)

    def test_too_many_tasks_refused(self):
        m = 17
        table = {b: 1 if b else 0 for b in range(1 << m)}
        inst = Instance(
            tuple(f"t{k}" for k in range(m)),
            (ExplicitValuation(m, table),),
        )
        with pytest.raises(UnsupportedCheckError):
            validate_superadditive(inst, 0)


class TestSupermodularity:
    def test_additive_is_trivially_supermodular(self):
        assert validate_supermodular(EX1, 0)

    def test_submodular_table(self):
        inst = Instance.explicit([{0: 0, 1: 2, 2: 2, 3: 3}], tasks=("x", "y"))
        assert not validate_supermodular(inst, 0)

    def test_supermodular_table(self):
        inst = Instance.explicit([{0: 0, 1: 1, 2: 1, 3: 3}], tasks=("x", "y"))
        assert validate_supermodular(inst, 0)
        assert supermodularity_violation(inst.valuations[0]) is None


class TestTypes:
    def test_overlapping_bundles_rejected(self):
        with pytest.raises(InvalidAllocationError):
            Allocation((0b01, 0b01))

    def test_from_assignment(self):
        alloc = Allocation.from_assignment([1, 0, 1], n=2)
        assert alloc.bundles == (0b010, 0b101)

    def test_partition_checked_against_instance(self):
        ensure_valid_allocation(EX1, X_SPLIT)
        with pytest.raises(InvalidAllocationError, match="not allocated"):
            ensure_valid_allocation(EX1, Allocation((0b01, 0)))
        with pytest.raises(InvalidAllocationError, match="outside"):
            ensure_valid_allocation(EX1, Allocation((0b111, 0)))

    def test_outcome_payment_length(self):
        with pytest.raises(ValueError):
            Outcome(X_SPLIT, (F(0),))

    def test_outcome_coerces_exact_strings(self):
        out = Outcome(X_SPLIT, ("1/2", 1))
        assert out.payments == (F(1, 2), F(1))

    def test_explicit_table_must_be_total(self):
        with pytest.raises(MalformedInstanceError, match="not total"):
            ExplicitValuation(2, {0: 0, 1: 1})

    def test_explicit_empty_set_must_be_zero(self):
        with pytest.raises(MalformedInstanceError, match="empty bundle"):
            ExplicitValuation(1, {0: 5, 1: 1})

    def test_explicit_key_out_of_range(self):
        with pytest.raises(MalformedInstanceError):
            ExplicitValuation(1, {0: 0, 1: 1, 2: 2})

    def test_instance_requires_agents(self):
        with pytest.raises(MalformedInstanceError):
            Instance(("a",), ())

    def test_instance_rejects_mismatched_universe(self):
        with pytest.raises(MalformedInstanceError):
            Instance(("a", "b"), (AdditiveValuation((F(1),)),))

    def test_instance_rejects_duplicate_task_names(self):
        with pytest.raises(MalformedInstanceError):
            Instance.additive([[1, 2]], tasks=("a", "a"))

    def test_is_additive_flag(self):
        assert EX1.is_additive
        mixed = Instance(
            ("x",),
            (AdditiveValuation((F(1),)), ExplicitValuation(1, {0: 0, 1: 2})),
        )
        assert not mixed.is_additive


# ---------------------------------------------------------------------------
# Arithmetic invariants
# ---------------------------------------------------------------------------

small_values = st.integers(min_value=-50, max_value=50)


@given(
    values=st.lists(small_values, min_size=1, max_size=8),
    data=st.data(),
)
def test_additive_over_disjoint_unions(values, data):
    val = AdditiveValuation(tuple(values))
    m = len(values)
    mask_a = data.draw(st.integers(min_value=0, max_value=full_set(m)))
    mask_b = data.draw(st.integers(min_value=0, max_value=full_set(m)))
    mask_b &= ~mask_a
    assert val.value(mask_a | mask_b) == val.value(mask_a) + val.value(mask_b)


@given(
    rows=st.lists(st.lists(small_values, min_size=3, max_size=3), min_size=2, max_size=4),
    seed=st.integers(min_value=0, max_value=2**16),
)
def test_social_welfare_permutation_invariant(rows, seed):
    rng = random.Random(seed)
    n, m = len(rows), 3
    inst = Instance.additive(rows)
    assignment = [rng.randrange(n) for _ in range(m)]
    alloc = Allocation.from_assignment(assignment, n)
    perm = list(range(n))
    rng.shuffle(perm)
    inst2 = Instance.additive([rows[perm[i]] for i in range(n)])
    alloc2 = Allocation(tuple(alloc.bundles[perm[i]] for i in range(n)))
    assert social_welfare(inst, alloc) == social_welfare(inst2, alloc2)


@given(
    bundle=st.integers(min_value=0, max_value=0b11),
    payment=st.fractions(min_value=-100, max_value=100),
)
def test_quasi_linearity(bundle, payment):
    for agent in range(EX1.n):
        assert utility(EX1, agent, bundle, payment) + payment == value(EX1, agent, bundle)


@st.composite
def explicit_tables(draw, m):
    table = {0: 0}
    for bundle in range(1, 1 << m):
        table[bundle] = draw(st.integers(min_value=-4, max_value=4))
    return table


@settings(max_examples=300)
@given(table=explicit_tables(m=3))
def test_supermodular_implies_superadditive(table):
    inst = Instance.explicit([table], tasks=("x", "y", "z"))
    if validate_supermodular(inst, 0):
        assert validate_superadditive(inst, 0)


@given(
    base=st.lists(st.integers(min_value=-5, max_value=5), min_size=1, max_size=4),
    gamma=st.integers(min_value=0, max_value=4),
)
def test_convex_size_bonus_is_supermodular(base, gamma):
    # v(A) = sum(base over A) + gamma * C(|A|, 2) is supermodular and
    # superadditive for any gamma >= 0, giving the implication test teeth.
    m = len(base)
    table = {}
    for bundle in range(1 << m):
        k = bundle.bit_count()
        table[bundle] = sum(base[t] for t in range(m) if bundle >> t & 1) \
            + F(gamma) * k * (k - 1) / 2
    inst = Instance.explicit([table], tasks=tuple(f"t{k}" for k in range(m)))
    assert validate_supermodular(inst, 0)
    assert validate_superadditive(inst, 0)
