"""Command-line interface: check, convert, minpay, oracle, gen.

All input and output is UTF-8 JSON. Exit codes: 0 on success (and when every
checked property holds), 1 when a property or precondition fails (the report
still carries a witness), 2 on parse or usage errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .algorithms import (
    NotConvertibleError,
    NotSuperadditiveError,
    PositiveCycleError,
    efeq_convert,
    minimal_efeq_payments,
    total_subsidy,
)
from .core import (
    Allocation,
    FairDivisionError,
    Instance,
    Outcome,
    members,
)
from .oracle import (
    BudgetExceededError,
    DEFAULT_ALLOCATION_BUDGET,
    allocation_count,
    enumerate_allocations,
    oracle_exists_envy_free_allocation,
    oracle_min_subsidy_efeq,
    verify_lattice,
)
from .properties import PositiveCycle, analyze, is_envy_free, is_equitable
from .serialize import (
    FORMAT_VERSION,
    InstanceFormatError,
    NamedInstance,
    allocation_from_spec,
    allocation_to_spec,
    default_agent_names,
    dumps_json,
    format_number,
    instance_from_dict,
    instance_to_dict,
    loads_json,
    payments_from_spec,
    payments_to_spec,
)
from .generators import GENERATOR_KINDS, generate


def _read_source(arg: str, where: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if arg.lstrip().startswith("{"):
        return arg
    try:
        return Path(arg).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceFormatError(f"{where}: cannot read {arg!r}: {exc}") from None


def _load_instance(arg: str) -> NamedInstance:
    return instance_from_dict(loads_json(_read_source(arg, "instance"), "instance"))


def _load_spec(arg: str, where: str):
    return loads_json(_read_source(arg, where), where)


def _bundle_names(bundle: int, inst: Instance) -> list[str]:
    return [inst.tasks[t] for t in members(bundle)]


def _witness_obj(witness, named: NamedInstance):
    names = named.agent_names
    if witness is None:
        return None
    if isinstance(witness, PositiveCycle):
        return {
            "cycle": [names[a] for a in witness.agents],
            "weight": format_number(witness.weight),
        }
    if isinstance(witness, tuple) and len(witness) == 2 and all(
        isinstance(x, int) for x in witness
    ):
        return {"agents": [names[witness[0]], names[witness[1]]]}
    if isinstance(witness, tuple):
        return {"reassignment": {names[i]: names[j] for i, j in enumerate(witness)}}
    return {"value": repr(witness)}


def _flag(result, named: NamedInstance, key: str = "holds") -> dict:
    obj = {key: bool(result)}
    if result.witness is not None:
        obj["witness"] = _witness_obj(result.witness, named)
    return obj


def _payment_block(inst: Instance, named: NamedInstance, alloc: Allocation,
                   payments) -> dict:
    utilities = {
        name: format_number(val.value(b) - p)
        for name, val, b, p in zip(named.agent_names, inst.valuations,
                                   alloc.bundles, payments)
    }
    return {
        "payments": payments_to_spec(payments, named),
        "utilities": utilities,
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_check(args) -> tuple[dict, int]:
    named = _load_instance(args.instance)
    inst = named.instance
    alloc = allocation_from_spec(_load_spec(args.allocation, "allocation"), named)
    payments = None
    if args.payments is not None:
        payments = payments_from_spec(_load_spec(args.payments, "payments"), named)
    report_data = analyze(inst, alloc, payments)
    properties = {
        "transfer_stable": _flag(report_data.transfer_stable, named),
        "reassignment_stable": _flag(report_data.reassignment_stable, named),
        "envy_freeable": _flag(report_data.envy_freeable, named),
        "efeq_convertible": _flag(report_data.efeq_convertible, named),
        "positive_envy_cycle": _flag(report_data.positive_envy_cycle, named,
                                     key="present"),
    }
    all_hold = all(
        bool(r) for r in (
            report_data.transfer_stable,
            report_data.reassignment_stable,
            report_data.envy_freeable,
            report_data.efeq_convertible,
        )
    )
    outcome_block = None
    if payments is not None:
        outcome_block = _payment_block(inst, named, alloc, payments)
        ef = report_data.envy_free
        eq = report_data.equitable
        ef_obj = _flag(ef, named)
        if not ef and ef.witness is not None:
            i, j = ef.witness
            own_u = inst.valuations[i].value(alloc.bundles[i]) - payments[i]
            other_u = inst.valuations[i].value(alloc.bundles[j]) - payments[j]
            ef_obj["witness"]["own_utility"] = format_number(own_u)
            ef_obj["witness"]["perceived_other_utility"] = format_number(other_u)
        outcome_block["envy_free"] = ef_obj
        outcome_block["equitable"] = _flag(eq, named)
        all_hold = all_hold and bool(ef) and bool(eq)
    report = {
        "format_version": FORMAT_VERSION,
        "command": "check",
        "tasks": list(inst.tasks),
        "agents": list(named.agent_names),
        "instance": instance_to_dict(inst, named.agent_names),
        "allocation": allocation_to_spec(alloc, named),
        "welfare": format_number(
            sum((val.value(b) for val, b in zip(inst.valuations, alloc.bundles)),
                Fraction(0))
        ),
        "properties": properties,
        "outcome": outcome_block,
    }
    return report, 0 if all_hold else 1


def cmd_convert(args) -> tuple[dict, int]:
    named = _load_instance(args.instance)
    inst = named.instance
    alloc = allocation_from_spec(_load_spec(args.allocation, "allocation"), named)
    sw_before = sum(
        (val.value(b) for val, b in zip(inst.valuations, alloc.bundles)), Fraction(0)
    )
    outcome, trace = efeq_convert(inst, alloc, mode=args.mode)
    final = outcome.allocation
    sw_after = sum(
        (val.value(b) for val, b in zip(inst.valuations, final.bundles)), Fraction(0)
    )
    ef = is_envy_free(inst, outcome)
    eq = is_equitable(inst, outcome)
    report = {
        "format_version": FORMAT_VERSION,
        "command": "convert",
        "mode": args.mode,
        "tasks": list(inst.tasks),
        "agents": list(named.agent_names),
        "instance": instance_to_dict(inst, named.agent_names),
        "initial_allocation": allocation_to_spec(alloc, named),
        "final_allocation": allocation_to_spec(final, named),
        "welfare_before": format_number(sw_before),
        "welfare_after": format_number(sw_after),
        **_payment_block(inst, named, final, outcome.payments),
        "payments_balanced": sum(outcome.payments, Fraction(0)) == 0,
        "total_subsidy": format_number(total_subsidy(outcome.payments)),
        "envy_free": _flag(ef, named),
        "equitable": _flag(eq, named),
        "trace": [
            {
                "giver": named.agent_names[s.giver],
                "receiver": named.agent_names[s.receiver],
                "bundle": _bundle_names(s.bundle_moved, inst),
                "welfare_after": format_number(s.welfare_after),
            }
            for s in trace.steps
        ],
    }
    return report, 0 if (ef and eq) else 1


def cmd_minpay(args) -> tuple[dict, int]:
    named = _load_instance(args.instance)
    inst = named.instance
    alloc = allocation_from_spec(_load_spec(args.allocation, "allocation"), named)
    payments = minimal_efeq_payments(inst, alloc)
    outcome = Outcome(alloc, payments)
    report = {
        "format_version": FORMAT_VERSION,
        "command": "minpay",
        "tasks": list(inst.tasks),
        "agents": list(named.agent_names),
        "instance": instance_to_dict(inst, named.agent_names),
        "allocation": allocation_to_spec(alloc, named),
        **_payment_block(inst, named, alloc, payments),
        "total_subsidy": format_number(total_subsidy(payments)),
        "envy_free": _flag(is_envy_free(inst, outcome), named),
        "equitable": _flag(is_equitable(inst, outcome), named),
    }
    return report, 0


def cmd_oracle(args) -> tuple[dict, int]:
    named = _load_instance(args.instance)
    inst = named.instance
    budget = args.budget
    exists_ef = oracle_exists_envy_free_allocation(inst, budget)
    best = oracle_min_subsidy_efeq(inst, budget)
    lattice_block = None
    if inst.is_additive:
        checked = 0
        violations = 0
        for alloc in enumerate_allocations(inst, budget):
            checked += 1
            lattice = verify_lattice(inst, alloc)
            violations += len(lattice.violations)
        lattice_block = {"allocations_checked": checked, "violations": violations}
    report = {
        "format_version": FORMAT_VERSION,
        "command": "oracle",
        "tasks": list(inst.tasks),
        "agents": list(named.agent_names),
        "instance": instance_to_dict(inst, named.agent_names),
        "allocations_enumerated": allocation_count(inst),
        "exists_envy_free_allocation": exists_ef,
        "min_efeq_subsidy": None if best is None else {
            "total": format_number(best[0]),
            "allocation": allocation_to_spec(best[1], named),
        },
        "lattice": lattice_block,
    }
    return report, 0


def cmd_gen(args) -> tuple[dict, int]:
    try:
        inst = generate(args.kind, args.agents, args.tasks, c=args.value_bound,
                        seed=args.seed, positive=args.positive)
    except ValueError as exc:
        raise InstanceFormatError(f"gen: {exc}") from None
    return instance_to_dict(inst, default_agent_names(inst.n)), 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairpay",
        description="Envy-free and equitable task allocation with exact monetary transfers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, allocation=True, payments=False):
        p.add_argument("instance",
                       help="instance file path, '-' for stdin, or inline JSON")
        if allocation:
            p.add_argument("--allocation", required=True,
                           help="{task: agent} map: file path, '-', or inline JSON")
        if payments:
            p.add_argument("--payments",
                           help="{agent: number} map: file path, '-', or inline JSON")
        p.add_argument("-o", "--output", help="write the report here instead of stdout")

    p = sub.add_parser("check", help="decide every property of an allocation")
    add_io(p, payments=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("convert",
                       help="stabilize the allocation and compute fair payments")
    add_io(p)
    p.add_argument("--mode", choices=("balanced", "subsidy"), default="balanced")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("minpay",
                       help="cheapest subsidies making the allocation envy-free and equitable")
    add_io(p)
    p.set_defaults(func=cmd_minpay)

    p = sub.add_parser("oracle", help="exhaustive search over all allocations")
    add_io(p, allocation=False)
    p.add_argument("--budget", type=int, default=DEFAULT_ALLOCATION_BUDGET,
                   help=f"max allocations to enumerate (default {DEFAULT_ALLOCATION_BUDGET})")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate a seeded instance file")
    p.add_argument("--kind", choices=GENERATOR_KINDS, required=True)
    p.add_argument("-n", "--agents", type=int, required=True)
    p.add_argument("-m", "--tasks", type=int, required=True)
    p.add_argument("-c", "--value-bound", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--positive", action="store_true",
                   help="draw per-task values from [1, c] instead of [-c, c]")
    p.add_argument("-o", "--output", help="write the instance here instead of stdout")
    p.set_defaults(func=cmd_gen)
    return parser


def _emit(obj: dict, output: str | None):
    text = dumps_json(obj)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _error_report(command: str, kind: str, exc: Exception, extra: dict) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "command": command,
        "error": {"type": kind, "message": str(exc), **extra},
    }


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    command = args.command
    try:
        report, code = args.func(args)
    except InstanceFormatError as exc:
        print(f"fairpay: {exc}", file=sys.stderr)
        return 2
    except NotSuperadditiveError as exc:
        report, code = _error_report(command, "not-superadditive", exc, {
            "agent": exc.agent,
            "bundle_a_mask": exc.bundle_a,
            "bundle_b_mask": exc.bundle_b,
        }), 1
    except NotConvertibleError as exc:
        report, code = _error_report(command, "not-convertible", exc, {
            "witness": list(exc.witness) if isinstance(exc.witness, tuple) else None,
        }), 1
    except PositiveCycleError as exc:
        report, code = _error_report(command, "positive-cycle", exc, {
            "cycle": list(exc.cycle.agents),
            "weight": format_number(exc.cycle.weight),
        }), 1
    except BudgetExceededError as exc:
        report, code = _error_report(command, "budget-exceeded", exc, {
            "required": exc.required,
            "budget": exc.budget,
        }), 1
    except FairDivisionError as exc:
        report, code = _error_report(command, "invalid-input", exc, {}), 1
    _emit(report, getattr(args, "output", None))
    return code


if __name__ == "__main__":
    sys.exit(main())
