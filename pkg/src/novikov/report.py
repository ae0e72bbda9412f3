"""Deterministic report documents.

A report is a JSON-ready mapping (strings, ints, floats, bools, lists,
mappings).  Exact scalars are serialized as 'p/q' strings and polynomials
as sorted [exponent, coefficient] pairs before they enter a document, so
the structured round trip parse(emit(doc)) == doc holds by construction.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .profile import BettiProfile
from .scalars import LaurentPoly

SCHEMA = "novikov.report/1"


def ser_fraction(x) -> str:
    return str(Fraction(x))


def ser_poly(p: LaurentPoly):
    return [[e, ser_fraction(p.c[e])] for e in sorted(p.c)]


def ser_profile(prof: BettiProfile):
    return {"dims": list(prof.dims), "twist": prof.twist, "mode": prof.mode}


def new_report(command: str, **fields) -> dict:
    doc = {"schema": SCHEMA, "command": command}
    doc.update(fields)
    return doc


def emit_report(doc: dict, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if fmt != "text":
        raise ValueError("unknown report format %r" % fmt)
    lines = []
    _emit_text(doc, "", lines)
    return "\n".join(lines) + "\n"


def _emit_text(value, prefix, lines):
    if isinstance(value, dict):
        for key in value:
            sub = value[key]
            label = "%s%s" % (prefix, key)
            if isinstance(sub, (dict, list)) and sub and _nested(sub):
                lines.append("%s:" % label)
                _emit_text(sub, prefix + "  ", lines)
            else:
                lines.append("%s: %s" % (label, _scalar_text(sub)))
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)) and item and _nested(item):
                lines.append("%s-" % prefix)
                _emit_text(item, prefix + "  ", lines)
            else:
                lines.append("%s- %s" % (prefix, _scalar_text(item)))
    else:
        lines.append("%s%s" % (prefix, _scalar_text(value)))


def _nested(value):
    if isinstance(value, dict):
        return True
    return any(isinstance(x, (dict, list)) for x in value)


def _scalar_text(value):
    if isinstance(value, list):
        return "[" + ", ".join(_scalar_text(v) for v in value) + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "-"
    return str(value)


def parse_report(text: str) -> dict:
    """Inverse of the structured emitter."""
    return json.loads(text)
