"""Canonical rendering: sorted keys, fixed decimals, byte stability."""

import json

import pytest

from claimtrace import canonical
from claimtrace.errors import InvalidConfig


def test_sorted_keys_and_fixed_floats():
    doc = {"b": 1 / 3, "a": 1.0, "list": [0.25, {"z": 0, "y": None}], "flag": True}
    text = canonical.dumps(doc)
    assert text == '{"a":1.000000,"b":0.333333,"flag":true,"list":[0.250000,{"y":null,"z":0}]}'


def test_ints_stay_ints():
    assert canonical.dumps({"n": 3}) == '{"n":3}'


def test_json_roundtrip():
    doc = {"ratio": 0.123456, "name": "graph", "items": [1, 2, 3]}
    assert json.loads(canonical.dumps(doc)) == doc


def test_unicode_preserved():
    assert canonical.dumps({"s": "ν-score"}) == '{"s":"ν-score"}'


def test_rejects_nan():
    with pytest.raises(InvalidConfig):
        canonical.dumps({"x": float("nan")})


def test_rejects_non_string_keys():
    with pytest.raises(InvalidConfig):
        canonical.dumps({1: "x"})


def test_byte_stability():
    doc = {"k": [0.1 + 0.2, 1e-7]}
    assert canonical.dump_bytes(doc) == canonical.dump_bytes(doc)
    assert canonical.dumps(doc) == '{"k":[0.300000,0.000000]}'
