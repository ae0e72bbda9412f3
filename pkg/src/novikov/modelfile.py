"""Parser for the invariant-model text format.

Line types (whitespace-separated tokens, '#' comments, rational 'p/q'
coefficients, named parameters substituted at parse time):

    gen e1 e2 e3 e4
    param q = 1
    d e2 = -1 e1^e2
    d e3 = 1/2 e1^e3 + q e1^e4
    J e1 = -e2
    orient e1^e2^e3^e4
"""

from __future__ import annotations

import re
from fractions import Fraction

from .cecomplex import CEComplex
from .complexstructure import ComplexStructure
from .scalars import rat

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class ModelSyntaxError(ValueError):
    pass


def parse_model_text(text: str, params=None):
    """Returns (CEComplex, ComplexStructure or None)."""
    lines = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((ln, line.split()))
    names = []
    values = dict(params or {})
    for ln, toks in lines:
        if toks[0] == "gen":
            names.extend(toks[1:])
        elif toks[0] == "param":
            if len(toks) != 4 or toks[2] != "=":
                raise ModelSyntaxError("line %d: expected 'param name = value'" % ln)
            values.setdefault(toks[1], rat(toks[3]))
    if not names:
        raise ModelSyntaxError("no generators declared")
    if len(set(names)) != len(names):
        raise ModelSyntaxError("duplicate generator names")
    index = {nm: i for i, nm in enumerate(names)}
    values = {k: rat(v) for k, v in values.items()}

    diff = {}
    jrows = {}
    orientation = None
    for ln, toks in lines:
        if toks[0] in ("gen", "param"):
            continue
        if toks[0] == "d":
            if len(toks) < 4 or toks[2] != "=":
                raise ModelSyntaxError("line %d: expected 'd gen = terms'" % ln)
            gen = _gen(toks[1], index, ln)
            terms = _parse_terms(toks[3:], index, values, ln, degree=2)
            acc = diff.setdefault(gen, {})
            for key, c in terms:
                acc[key] = acc.get(key, Fraction(0)) + c
        elif toks[0] == "J":
            if len(toks) < 4 or toks[2] != "=":
                raise ModelSyntaxError("line %d: expected 'J gen = terms'" % ln)
            gen = _gen(toks[1], index, ln)
            row = [Fraction(0)] * len(names)
            for key, c in _parse_terms(toks[3:], index, values, ln, degree=1):
                row[key[0]] += c
            jrows[gen] = row
        elif toks[0] == "orient":
            if len(toks) != 2:
                raise ModelSyntaxError("line %d: expected 'orient e1^..^en'" % ln)
            orientation = tuple(_gen(nm, index, ln) for nm in toks[1].split("^"))
        else:
            raise ModelSyntaxError("line %d: unknown directive %r" % (ln, toks[0]))

    cx = CEComplex(names, diff, orientation)
    jc = None
    if jrows:
        cmatrix = [jrows.get(i, [Fraction(0)] * len(names))
                   for i in range(len(names))]
        missing = [names[i] for i in range(len(names)) if i not in jrows]
        if missing:
            raise ModelSyntaxError("J is declared but misses generators %s" % missing)
        jc = ComplexStructure(cx, cmatrix)
    return cx, jc


def _gen(tok, index, ln):
    if tok not in index:
        raise ModelSyntaxError("line %d: unknown generator %r" % (ln, tok))
    return index[tok]


def _parse_terms(tokens, index, params, ln, degree):
    """Sum of [sign] [coefficient] monomial with '^'-separated generators."""
    terms = []
    sign = Fraction(1)
    coeff = None
    for tok in tokens:
        if tok == "+":
            continue
        if tok == "-":
            sign = -sign
            continue
        neg = tok.startswith("-") and len(tok) > 1 and not _RATIONAL.match(tok)
        if neg:
            sign = -sign
            tok = tok[1:]
        if _RATIONAL.match(tok):
            c = Fraction(tok)
            coeff = c if coeff is None else coeff * c
            continue
        if tok in params:
            coeff = params[tok] if coeff is None else coeff * params[tok]
            continue
        gens = tok.split("^")
        if not all(g in index for g in gens):
            unknown = [g for g in gens if g not in index]
            raise ModelSyntaxError(
                "line %d: unknown token %r (not a coefficient, parameter "
                "or generator monomial)" % (ln, unknown[0] if unknown else tok))
        if len(gens) != degree:
            raise ModelSyntaxError(
                "line %d: expected degree-%d monomials, got %r" % (ln, degree, tok))
        idx = [index[g] for g in gens]
        c = (Fraction(1) if coeff is None else coeff) * sign
        if degree == 1:
            terms.append(((idx[0],), c))
        else:
            i, j = idx
            if i == j:
                raise ModelSyntaxError("line %d: repeated generator in %r" % (ln, tok))
            if i > j:
                i, j, c = j, i, -c
            terms.append(((i, j), c))
        sign = Fraction(1)
        coeff = None
    if coeff is not None or sign != 1:
        raise ModelSyntaxError("line %d: dangling coefficient" % ln)
    return terms


def load_model_file(path, params=None):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model_text(fh.read(), params)
