from fractions import Fraction as F

import pytest

from fairpay import AdditiveValuation, ExplicitValuation, Instance
from fairpay.serialize import (
    InstanceFormatError,
    allocation_from_spec,
    allocation_to_spec,
    dumps_json,
    format_number,
    instance_from_dict,
    instance_to_dict,
    loads_json,
    parse_number,
    payments_from_spec,
    payments_to_spec,
)

from helpers import EX1, X_SPLIT


def _ex1_dict():
    return {
        "format_version": 1,
        "tasks": ["a", "b"],
        "agents": [
            {"name": "1", "valuation": {"type": "additive", "values": [200, 100]}},
            {"name": "2", "valuation": {"type": "additive", "values": [2, 1]}},
        ],
    }


class TestNumbers:
    def test_int_passthrough(self):
        assert parse_number(7) == 7

    def test_exact_strings(self):
        assert parse_number("3/4") == F(3, 4)
        assert parse_number("2.5") == F(5, 2)
        assert parse_number("-12") == -12

    def test_floats_rejected(self):
        with pytest.raises(InstanceFormatError, match="floating-point"):
            parse_number(2.5)

    def test_bools_rejected(self):
        with pytest.raises(InstanceFormatError):
            parse_number(True)

    def test_bad_string_names_field(self):
        with pytest.raises(InstanceFormatError, match="agents\\[0\\]"):
            parse_number("zz", where="instance.agents[0]")

    def test_format_round_trips(self):
        for q in (F(0), F(-3), F(7, 2), F(-1, 3), F(10**30)):
            assert parse_number(format_number(q)) == q

    def test_float_literals_in_json_rejected(self):
        with pytest.raises(InstanceFormatError, match="floating-point"):
            loads_json('{"x": 1.5}')

    def test_json_decode_error_has_location(self):
        with pytest.raises(InstanceFormatError, match="line 1 column"):
            loads_json("{nope}")


class TestInstanceRoundTrip:
    def test_additive(self):
        named = instance_from_dict(_ex1_dict())
        assert named.instance == EX1
        assert named.agent_names == ("1", "2")
        assert instance_from_dict(instance_to_dict(named.instance, named.agent_names)) == named

    def test_explicit_and_fractions(self):
        inst = Instance(
            ("x", "y"),
            (
                AdditiveValuation((F(1, 3), F("2.5"))),
                ExplicitValuation(2, {0: 0, 1: F(-1, 2), 2: 1, 3: F(7, 4)}),
            ),
        )
        again = instance_from_dict(instance_to_dict(inst, ("p", "q")))
        assert again.instance == inst
        assert again.agent_names == ("p", "q")

    def test_dumps_is_deterministic(self):
        obj = instance_to_dict(EX1, ("1", "2"))
        assert dumps_json(obj) == dumps_json(instance_to_dict(EX1, ("1", "2")))


class TestInstanceParsing:
    def test_requires_version(self):
        bad = _ex1_dict()
        bad["format_version"] = 99
        with pytest.raises(InstanceFormatError, match="format_version"):
            instance_from_dict(bad)

    def test_wrong_value_count(self):
        bad = _ex1_dict()
        bad["agents"][0]["valuation"]["values"] = [200]
        with pytest.raises(InstanceFormatError, match="agents\\[0\\]"):
            instance_from_dict(bad)

    def test_unknown_valuation_type(self):
        bad = _ex1_dict()
        bad["agents"][1]["valuation"]["type"] = "matrix"
        with pytest.raises(InstanceFormatError, match="matrix"):
            instance_from_dict(bad)

    def test_duplicate_agent_names(self):
        bad = _ex1_dict()
        bad["agents"][1]["name"] = "1"
        with pytest.raises(InstanceFormatError, match="unique"):
            instance_from_dict(bad)

    def test_task_names_cannot_contain_commas(self):
        bad = _ex1_dict()
        bad["tasks"] = ["a,b", "c"]
        with pytest.raises(InstanceFormatError, match="comma"):
            instance_from_dict(bad)

    def test_explicit_empty_key_optional_and_zero(self):
        obj = {
            "format_version": 1,
            "tasks": ["x", "y"],
            "agents": [
                {"name": "p", "valuation": {"type": "explicit",
                                            "table": {"x": 1, "y": 1, "x,y": 3}}},
            ],
        }
        named = instance_from_dict(obj)
        assert named.instance.valuations[0].value(0) == 0
        obj["agents"][0]["valuation"]["table"][""] = 5
        with pytest.raises(InstanceFormatError, match="empty bundle"):
            instance_from_dict(obj)

    def test_explicit_table_must_be_total(self):
        obj = {
            "format_version": 1,
            "tasks": ["x", "y"],
            "agents": [
                {"name": "p", "valuation": {"type": "explicit",
                                            "table": {"x": 1, "x,y": 3}}},
            ],
        }
        with pytest.raises(InstanceFormatError, match="not total"):
            instance_from_dict(obj)

    def test_explicit_unknown_task_in_key(self):
        obj = {
            "format_version": 1,
            "tasks": ["x"],
            "agents": [
                {"name": "p", "valuation": {"type": "explicit",
                                            "table": {"z": 1}}},
            ],
        }
        with pytest.raises(InstanceFormatError, match="unknown task"):
            instance_from_dict(obj)

    def test_explicit_key_order_does_not_matter(self):
        obj = {
            "format_version": 1,
            "tasks": ["x", "y"],
            "agents": [
                {"name": "p", "valuation": {"type": "explicit",
                                            "table": {"x": 1, "y": 2, "y,x": 4}}},
            ],
        }
        named = instance_from_dict(obj)
        assert named.instance.valuations[0].value(0b11) == 4


class TestAllocationSpecs:
    def test_round_trip(self):
        named = instance_from_dict(_ex1_dict())
        spec = {"a": "1", "b": "2"}
        alloc = allocation_from_spec(spec, named)
        assert alloc == X_SPLIT
        assert allocation_to_spec(alloc, named) == spec

    def test_missing_task_named(self):
        named = instance_from_dict(_ex1_dict())
        with pytest.raises(InstanceFormatError, match="'b'"):
            allocation_from_spec({"a": "1"}, named)

    def test_unknown_task(self):
        named = instance_from_dict(_ex1_dict())
        with pytest.raises(InstanceFormatError, match="unknown task"):
            allocation_from_spec({"a": "1", "b": "2", "c": "1"}, named)

    def test_unknown_agent(self):
        named = instance_from_dict(_ex1_dict())
        with pytest.raises(InstanceFormatError, match="unknown agent"):
            allocation_from_spec({"a": "1", "b": "3"}, named)


class TestPaymentSpecs:
    def test_round_trip(self):
        named = instance_from_dict(_ex1_dict())
        payments = payments_from_spec({"1": 0, "2": "-199"}, named)
        assert payments == (0, -199)
        assert payments_to_spec(payments, named) == {"1": 0, "2": -199}

    def test_every_agent_required(self):
        named = instance_from_dict(_ex1_dict())
        with pytest.raises(InstanceFormatError, match="without a payment"):
            payments_from_spec({"1": 0}, named)

    def test_unknown_agent_rejected(self):
        named = instance_from_dict(_ex1_dict())
        with pytest.raises(InstanceFormatError, match="unknown agent"):
            payments_from_spec({"1": 0, "2": 0, "3": 0}, named)
