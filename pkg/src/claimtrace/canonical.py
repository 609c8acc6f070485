"""Canonical document rendering.

Every externally visible document (snapshots, metric reports, HTTP bodies)
is rendered through here so that identical logical content is always
byte-identical: object keys sorted, floats fixed at six decimals, no
whitespace variance. Plain json.loads reads the output back.
"""

import json
import math

from .errors import InvalidConfig


def dumps(doc) -> str:
    """Render `doc` (dict/list/str/int/float/bool/None) canonically."""
    out = []
    _render(doc, out)
    return "".join(out)


def dump_bytes(doc) -> bytes:
    return dumps(doc).encode("utf-8")


def _render(value, out):
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidConfig(f"non-finite float in canonical document: {value!r}")
        out.append(format(value, ".6f"))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, dict):
        out.append("{")
        first = True
        for key in sorted(value):
            if not isinstance(key, str):
                raise InvalidConfig(f"non-string key in canonical document: {key!r}")
            if not first:
                out.append(",")
            first = False
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _render(value[key], out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _render(item, out)
        out.append("]")
    else:
        raise InvalidConfig(f"unsupported type in canonical document: {type(value).__name__}")
