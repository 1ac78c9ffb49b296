"""Envy-free and equitable allocation of indivisible tasks with exact payments."""

from .core import (
    AdditiveValuation,
    Allocation,
    ExplicitValuation,
    FairDivisionError,
    Instance,
    InvalidAllocationError,
    MalformedInstanceError,
    Outcome,
    UnsupportedCheckError,
    as_rational,
    ensure_valid_allocation,
    full_set,
    members,
    own_utilities,
    social_welfare,
    taskset,
    utility,
    validate_superadditive,
    validate_supermodular,
    value,
)
from .properties import (
    CheckResult,
    EnvyGraph,
    PositiveCycle,
    PropertyReport,
    analyze,
    build_envy_graph,
    efeq_convertible_by_payments,
    has_positive_cycle,
    is_efeq_convertible,
    is_envy_free,
    is_envy_freeable,
    is_equitable,
    is_reassignment_stable,
    is_transfer_stable,
    max_weight_assignment,
)
from .algorithms import (
    NotConvertibleError,
    NotSuperadditiveError,
    PositiveCycleError,
    StabilizationStep,
    StabilizationTrace,
    efeq_convert,
    envy_free_subsidies,
    grand_bundle_allocation,
    knaster_payments,
    minimal_efeq_payments,
    subsidize,
    total_subsidy,
    transfer_stabilize,
)
from .oracle import (
    BudgetExceededError,
    enumerate_allocations,
    oracle_exists_envy_free_allocation,
    oracle_min_subsidy_efeq,
    verify_lattice,
)

__version__ = "0.1.0"
