"""JSON wire formats for instances, allocations, and payments.

Numbers on the wire are JSON integers or exact strings ("7", "3/4", "2.5");
floating-point literals are rejected outright so that nothing lossy can leak
into the exact arithmetic. All mappings serialize with a canonical key order,
which makes generated files byte-reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (
    AdditiveValuation,
    Allocation,
    ExplicitValuation,
    FairDivisionError,
    Instance,
    TaskSet,
    Valuation,
    members,
)

FORMAT_VERSION = 1


class InstanceFormatError(FairDivisionError):
    """Malformed instance/allocation/payment data, with field context."""


def _fail(where: str, message: str):
    raise InstanceFormatError(f"{where}: {message}")


# ---------------------------------------------------------------------------
# Exact numbers on the wire
# ---------------------------------------------------------------------------

def parse_number(raw, where: str = "value") -> Fraction:
    """Accept a JSON int or an exact numeric string; refuse anything lossy."""
    if isinstance(raw, bool):
        _fail(where, "expected a number, got a boolean")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        _fail(where, "floating-point literals are not accepted; "
                     "write the number as a string such as \"2.5\" or \"5/2\"")
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError):
            _fail(where, f"cannot parse {raw!r} as an exact number")
    _fail(where, f"expected a number, got {type(raw).__name__}")


def format_number(q: Fraction):
    """Render exactly: a JSON int when integral, else a \"p/q\" string."""
    if q.denominator == 1:
        return int(q)
    return f"{q.numerator}/{q.denominator}"


def _reject_float(literal: str):
    raise InstanceFormatError(
        f"floating-point literal {literal!r} is not accepted; "
        f"encode exact numbers as strings such as \"{literal}\""
    )


def loads_json(text: str, where: str = "input"):
    """json.loads with float literals rejected and parse context attached."""
    try:
        return json.loads(text, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"{where}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Instance files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NamedInstance:
    """An instance plus the agent names used on the wire."""

    instance: Instance
    agent_names: tuple[str, ...]


def _bundle_key(bundle: TaskSet, tasks: Sequence[str]) -> str:
    return ",".join(sorted(tasks[t] for t in members(bundle)))


def _parse_bundle_key(key: str, task_index: Mapping[str, int], where: str) -> TaskSet:
    if key == "":
        return 0
    mask = 0
    for name in key.split(","):
        if name not in task_index:
            _fail(where, f"unknown task {name!r} in bundle key {key!r}")
        bit = 1 << task_index[name]
        if mask & bit:
            _fail(where, f"task {name!r} repeated in bundle key {key!r}")
        mask |= bit
    return mask


def _check_names(names: Sequence[str], what: str, where: str,
                 forbid_comma: bool = False) -> tuple[str, ...]:
    out = []
    for k, name in enumerate(names):
        spot = f"{where}[{k}]"
        if not isinstance(name, str) or name == "":
            _fail(spot, f"{what} names must be non-empty strings")
        if forbid_comma and "," in name:
            _fail(spot, f"{what} name {name!r} may not contain a comma")
        out.append(name)
    if len(set(out)) != len(out):
        _fail(where, f"{what} names must be unique")
    return tuple(out)


def _parse_valuation(obj, m: int, task_index: Mapping[str, int], where: str) -> Valuation:
    if not isinstance(obj, dict):
        _fail(where, "valuation must be an object")
    kind = obj.get("type")
    if kind == "additive":
        values = obj.get("values")
        if not isinstance(values, list) or len(values) != m:
            _fail(f"{where}.values", f"expected a list of {m} per-task values")
        return AdditiveValuation(
            tuple(parse_number(v, f"{where}.values[{k}]") for k, v in enumerate(values))
        )
    if kind == "explicit":
        table_obj = obj.get("table")
        if not isinstance(table_obj, dict):
            _fail(f"{where}.table", "expected an object mapping bundles to values")
        table: dict[TaskSet, Fraction] = {}
        for key, raw in table_obj.items():
            spot = f"{where}.table[{key!r}]"
            mask = _parse_bundle_key(key, task_index, spot)
            if mask in table:
                _fail(spot, "bundle listed twice (same subset under another ordering)")
            table[mask] = parse_number(raw, spot)
        if 0 not in table:
            table[0] = Fraction(0)
        elif table[0] != 0:
            _fail(f"{where}.table[\"\"]", "the empty bundle must be worth exactly 0")
        missing = [b for b in range(1 << m) if b not in table]
        if missing:
            first = _bundle_key(missing[0], _index_to_tasks(task_index))
            _fail(
                f"{where}.table",
                f"table is not total: missing {len(missing)} bundles, first {first!r}",
            )
        return ExplicitValuation(m, table)
    _fail(f"{where}.type", f"unknown valuation type {kind!r} "
                           f"(expected 'additive' or 'explicit')")


def _index_to_tasks(task_index: Mapping[str, int]) -> tuple[str, ...]:
    out = [""] * len(task_index)
    for name, k in task_index.items():
        out[k] = name
    return tuple(out)


def instance_from_dict(obj) -> NamedInstance:
    if not isinstance(obj, dict):
        _fail("instance", "top level must be a JSON object")
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        _fail("instance.format_version", f"expected {FORMAT_VERSION}, got {version!r}")
    tasks_obj = obj.get("tasks")
    if not isinstance(tasks_obj, list):
        _fail("instance.tasks", "expected a list of task names")
    tasks = _check_names(tasks_obj, "task", "instance.tasks", forbid_comma=True)
    task_index = {name: k for k, name in enumerate(tasks)}
    agents_obj = obj.get("agents")
    if not isinstance(agents_obj, list) or not agents_obj:
        _fail("instance.agents", "expected a non-empty list of agents")
    names = []
    valuations = []
    for k, agent in enumerate(agents_obj):
        where = f"instance.agents[{k}]"
        if not isinstance(agent, dict):
            _fail(where, "agent must be an object")
        names.append(agent.get("name"))
        valuations.append(
            _parse_valuation(agent.get("valuation"), len(tasks), task_index,
                             f"{where}.valuation")
        )
    agent_names = _check_names(names, "agent", "instance.agents")
    try:
        instance = Instance(tasks, tuple(valuations))
    except FairDivisionError as exc:
        raise InstanceFormatError(f"instance: {exc}") from None
    return NamedInstance(instance, agent_names)


def instance_to_dict(inst: Instance, agent_names: Sequence[str] | None = None) -> dict:
    names = tuple(agent_names) if agent_names is not None else default_agent_names(inst.n)
    if len(names) != inst.n:
        raise ValueError(f"{len(names)} names for {inst.n} agents")
    agents = []
    for name, val in zip(names, inst.valuations):
        if isinstance(val, AdditiveValuation):
            enc = {"type": "additive",
                   "values": [format_number(v) for v in val.values]}
        else:
            enc = {"type": "explicit",
                   "table": {
                       _bundle_key(b, inst.tasks): format_number(val.table[b])
                       for b in range(1 << val.m)
                   }}
        agents.append({"name": name, "valuation": enc})
    return {
        "format_version": FORMAT_VERSION,
        "tasks": list(inst.tasks),
        "agents": agents,
    }


def default_agent_names(n: int) -> tuple[str, ...]:
    return tuple(f"a{k + 1}" for k in range(n))


# ---------------------------------------------------------------------------
# Allocation and payment specs
# ---------------------------------------------------------------------------

def allocation_from_spec(obj, named: NamedInstance) -> Allocation:
    """Parse a {task name: agent name} map into a full partition."""
    inst = named.instance
    if not isinstance(obj, dict):
        _fail("allocation", "expected an object mapping task names to agent names")
    agent_index = {name: k for k, name in enumerate(named.agent_names)}
    task_index = {name: k for k, name in enumerate(inst.tasks)}
    bundles = [0] * inst.n
    for task, agent in obj.items():
        where = f"allocation[{task!r}]"
        if task not in task_index:
            _fail(where, f"unknown task {task!r}")
        if agent not in agent_index:
            _fail(where, f"unknown agent {agent!r}")
        bundles[agent_index[agent]] |= 1 << task_index[task]
    missing = [t for t in inst.tasks if t not in obj]
    if missing:
        _fail("allocation", f"tasks not assigned to any agent: {missing}")
    return Allocation(tuple(bundles))


def allocation_to_spec(alloc: Allocation, named: NamedInstance) -> dict:
    tasks = named.instance.tasks
    out = {}
    for agent, bundle in zip(named.agent_names, alloc.bundles):
        for t in members(bundle):
            out[tasks[t]] = agent
    return {name: out[name] for name in tasks}


def payments_from_spec(obj, named: NamedInstance) -> tuple[Fraction, ...]:
    """Parse a {agent name: number} map; every agent must be present."""
    if not isinstance(obj, dict):
        _fail("payments", "expected an object mapping agent names to numbers")
    known = set(named.agent_names)
    for agent in obj:
        if agent not in known:
            _fail(f"payments[{agent!r}]", f"unknown agent {agent!r}")
    missing = [a for a in named.agent_names if a not in obj]
    if missing:
        _fail("payments", f"agents without a payment entry: {missing}")
    return tuple(
        parse_number(obj[a], f"payments[{a!r}]") for a in named.agent_names
    )


def payments_to_spec(payments: Sequence[Fraction], named: NamedInstance) -> dict:
    return {
        name: format_number(p) for name, p in zip(named.agent_names, payments)
    }
