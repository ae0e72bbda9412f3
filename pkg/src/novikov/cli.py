"""Command-line surface.

Exit codes: 0 success, 1 verification/solver failure, 2 input error.
Default tolerances can be overridden with NOVIKOV_RANK_TOL / NOVIKOV_TOL.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import models, report, simplicial
from .cecomplex import GateFailure, TwistForm, cohomology, jumping_set
from .complexstructure import hodge_diamond, lee_torsion
from .exactlinalg import SpecializationError
from .lcs import AuditRefused, deform, lee_class_scan, vanishing_audit
from .modelfile import ModelSyntaxError
from .models import DEFAULT_SEED, load_model, parse_form_expr
from .report import emit_report, new_report, ser_fraction, ser_poly, ser_profile
from .scalars import rat


class InputError(ValueError):
    pass


def _env_float(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise InputError("%s must be a float, got %r" % (name, raw))


def build_parser():
    ap = argparse.ArgumentParser(
        prog="novikov",
        description="Twisted (Morse-Novikov) cohomology on bundled invariant "
                    "models and simplicial local systems.")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--rank-tol", type=float,
                    default=_env_float("NOVIKOV_RANK_TOL", 1e-9))
    ap.add_argument("--tol", type=float,
                    default=_env_float("NOVIKOV_TOL", 1e-10))
    sub = ap.add_subparsers(dest="cmd", required=True)

    def model_opts(p):
        p.add_argument("--model", required=True,
                       help="bundled id (%s) or a model file path"
                            % ", ".join(sorted(models.MODEL_SOURCES)))
        p.add_argument("--param", action="append", default=[],
                       metavar="NAME=VALUE")

    p = sub.add_parser("cohomology", help="twisted Betti profile")
    model_opts(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--twist", help="rational scale t of the distinguished twist")
    g.add_argument("--generic", action="store_true")
    p.add_argument("--degrees", type=int, nargs="*")

    p = sub.add_parser("diamond", help="twisted Hodge diamond")
    model_opts(p)
    p.add_argument("--twist", required=True)

    p = sub.add_parser("jumps", help="jumping locus certificate")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model")
    src.add_argument("--complex", dest="complex_path")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--degree", type=int, required=True)

    p = sub.add_parser("deform", help="power-series twist deformation")
    model_opts(p)
    p.add_argument("--order", type=int, default=30)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--beta", required=True, help="closed 1-form expression")
    p.add_argument("--omega", help="d_a-closed base 2-form (default per model)")

    p = sub.add_parser("scan", help="taming-scale scan over a t grid")
    model_opts(p)
    p.add_argument("--grid", required=True, metavar="A:B:STEP")
    p.add_argument("--coeff-bound", default="3")
    p.add_argument("--coeff-step", default="1/4")

    p = sub.add_parser("betti", help="simplicial local-system Betti profile")
    p.add_argument("--complex", dest="complex_path", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--at", help="nonzero rational specialization")
    g.add_argument("--generic", action="store_true")

    p = sub.add_parser("cover", help="finite cyclic cover")
    p.add_argument("--complex", dest="complex_path", required=True)
    p.add_argument("--fold", type=int, required=True)
    p.add_argument("--check-injectivity", action="store_true")
    p.add_argument("--at")
    p.add_argument("--degree", type=int)

    p = sub.add_parser("verify", help="run every invariant suite")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true")
    g.add_argument("--model")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--quick", action="store_true")

    p = sub.add_parser("audit-vanishing",
                       help="twisted vanishing audit for pi1 = Z models")
    model_opts(p)
    p.add_argument("--grid", required=True, metavar="A:B:STEP")
    return ap


def _params(pairs):
    out = {}
    for item in pairs:
        if "=" not in item:
            raise InputError("--param expects NAME=VALUE, got %r" % item)
        name, value = item.split("=", 1)
        try:
            out[name.strip()] = rat(value.strip())
        except (ValueError, ZeroDivisionError, TypeError):
            raise InputError("--param %s: bad rational %r" % (name, value))
    return out


def _grid(spec):
    try:
        a, b, step = (rat(x) for x in spec.split(":"))
    except (ValueError, TypeError, ZeroDivisionError):
        raise InputError("--grid expects A:B:STEP rationals, got %r" % spec)
    if step <= 0 or b < a:
        raise InputError("--grid needs step > 0 and B >= A")
    out = []
    v = a
    while v <= b:
        out.append(v)
        v += step
    return out


def _rational(text, what):
    try:
        return rat(text)
    except (ValueError, TypeError, ZeroDivisionError):
        raise InputError("%s must be rational, got %r" % (what, text))


def _load(ns):
    try:
        return load_model(ns.model, _params(getattr(ns, "param", [])))
    except (GateFailure, ModelSyntaxError, FileNotFoundError) as exc:
        raise InputError(str(exc))


def _twist(record, scale) -> TwistForm:
    if record.alphabase is None:
        raise InputError("model has no closed generator to twist by")
    return TwistForm(record.alphabase, scale)


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        doc, failed = _dispatch(ns)
    except InputError as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    except (SpecializationError, AuditRefused) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    sys.stdout.write(emit_report(doc, ns.format))
    return 1 if failed else 0


def _dispatch(ns):
    if ns.cmd == "cohomology":
        return _cmd_cohomology(ns)
    if ns.cmd == "diamond":
        return _cmd_diamond(ns)
    if ns.cmd == "jumps":
        return _cmd_jumps(ns)
    if ns.cmd == "deform":
        return _cmd_deform(ns)
    if ns.cmd == "scan":
        return _cmd_scan(ns)
    if ns.cmd == "betti":
        return _cmd_betti(ns)
    if ns.cmd == "cover":
        return _cmd_cover(ns)
    if ns.cmd == "verify":
        return _cmd_verify(ns)
    if ns.cmd == "audit-vanishing":
        return _cmd_audit(ns)
    raise InputError("unknown command %r" % ns.cmd)


def _cmd_cohomology(ns):
    record = _load(ns)
    if ns.generic:
        prof = cohomology(record.cx, _twist(record, Fraction(1)), generic=True)
    else:
        prof = cohomology(record.cx, _twist(record, _rational(ns.twist, "--twist")))
    rows = ser_profile(prof)
    if ns.degrees:
        rows["selected"] = {("b%d" % k): prof[k] for k in ns.degrees}
    doc = new_report("cohomology", model=record.id, profile=rows)
    return doc, False


def _cmd_diamond(ns):
    record = _load(ns)
    if record.jc is None:
        raise InputError("model %r carries no complex structure" % record.id)
    dia = hodge_diamond(record.jc, _twist(record, _rational(ns.twist, "--twist")))
    entries = {"h(%d,%d)" % pq: dia.entries[pq] for pq in sorted(dia.entries)}
    doc = new_report("diamond", model=record.id, twist=dia.twist,
                     hodge=entries)
    return doc, False


def _cmd_jumps(ns):
    if ns.model:
        record = _load(ns)
        if record.alphabase is None:
            raise InputError("model has no closed generator to twist by")
        rep = jumping_set(record.cx, record.alphabase, ns.degree)
        source = record.id
    else:
        try:
            K, a = simplicial.load_complex(ns.complex_path)
        except (ValueError, OSError) as exc:
            raise InputError(str(exc))
        rep = simplicial.jumping_locus(K, a, ns.degree)
        source = os.path.basename(ns.complex_path)
    doc = new_report("jumps", source=source, degree=rep.degree,
                     roots=[ser_fraction(r) for r in rep.roots],
                     certificate=ser_poly(rep.certificate),
                     certificate_pretty=str(rep.certificate),
                     note=rep.note)
    return doc, False


def _cmd_deform(ns):
    record = _load(ns)
    alpha = _twist(record, Fraction(1))
    try:
        beta = parse_form_expr(record.cx, ns.beta, 1, record.params)
        omega_expr = ns.omega or record.meta.lcs_base
        if not omega_expr:
            raise InputError("no base 2-form: pass --omega")
        omega0 = parse_form_expr(record.cx, omega_expr, 2, record.params)
        run = deform(record.cx, alpha, omega0, beta, ns.order, ns.t,
                     tol=ns.tol, jc=record.jc)
    except (ModelSyntaxError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc))
    doc = new_report("deform", model=record.id, **run.summary())
    return doc, run.status != "converged"


def _cmd_scan(ns):
    record = _load(ns)
    if record.jc is None:
        raise InputError("scan needs a complex structure")
    if record.alphabase is None:
        raise InputError("model has no closed generator to twist by")
    grid = _grid(ns.grid)
    rep = lee_class_scan(record.jc, record.alphabase, grid,
                         _rational(ns.coeff_bound, "--coeff-bound"),
                         _rational(ns.coeff_step, "--coeff-step"))
    entries = []
    for e in rep.entries:
        row = {"t": ser_fraction(e.t), "found": e.found}
        if e.found:
            row["witness"] = str(e.witness)
            row["margin"] = e.margin
            row["volume_coefficient"] = ser_fraction(e.volume_coefficient)
        if e.note:
            row["note"] = e.note
        entries.append(row)
    doc = new_report("scan", model=record.id, torsion_zero=rep.torsion_zero,
                     certificate=rep.certificate,
                     admissible=[ser_fraction(t) for t in rep.admissible],
                     grid=entries)
    return doc, False


def _cmd_betti(ns):
    try:
        K, a = simplicial.load_complex(ns.complex_path)
    except (ValueError, OSError) as exc:
        raise InputError(str(exc))
    if ns.at:
        t0 = _rational(ns.at, "--at")
        if t0 == 0:
            raise InputError("t0 = 0 is rejected: holonomy must be invertible")
        prof = simplicial.betti(K, a, t0)
    else:
        prof = simplicial.betti(K, a)
    doc = new_report("betti", complex=os.path.basename(ns.complex_path),
                     f_vector=list(K.f_vector()), profile=ser_profile(prof))
    return doc, False


def _cmd_cover(ns):
    try:
        K, a = simplicial.load_complex(ns.complex_path)
        cover, cover_a, _ = simplicial.cyclic_cover(K, a, ns.fold)
    except (ValueError, OSError) as exc:
        raise InputError(str(exc))
    doc = new_report("cover", complex=os.path.basename(ns.complex_path),
                     fold=ns.fold, f_vector=list(cover.f_vector()),
                     components=cover.component_count(),
                     euler=cover.euler_characteristic())
    failed = False
    if ns.check_injectivity:
        if ns.at is None or ns.degree is None:
            raise InputError("--check-injectivity needs --at and --degree")
        t0 = _rational(ns.at, "--at")
        if t0 == 0:
            raise InputError("t0 = 0 is rejected: holonomy must be invertible")
        res = simplicial.pullback_injectivity_check(K, a, ns.fold, t0, ns.degree)
        doc["injectivity"] = {
            "verdict": "injective" if res["injective"] else "NOT injective",
            "degree": res["degree"], "t0": ser_fraction(res["t0"]),
            "h_down": res["h_down"], "h_image": res["h_image"],
        }
        failed = not res["injective"]
    return doc, failed


def _cmd_verify(ns):
    ids = sorted(models.MODEL_SOURCES) if ns.all else [ns.model]
    sections = {}
    all_ok = True
    for mid in ids:
        try:
            record = load_model(mid, _params(ns.param))
            checks = models.verify_model(record, ns.seed, ns.rank_tol,
                                         quick=ns.quick)
        except (GateFailure, ModelSyntaxError) as exc:
            sections[mid] = [{"check": "load gates", "passed": False,
                              "detail": str(exc)}]
            all_ok = False
            continue
        except FileNotFoundError as exc:
            raise InputError(str(exc))
        sections[mid] = [{"check": c.name, "passed": c.passed,
                          **({"detail": c.detail} if c.detail else {})}
                         for c in checks]
        all_ok = all_ok and all(c.passed for c in checks)
    if ns.all:
        simp = models.verify_simplicial_suite(ns.seed)
        sections["simplicial"] = [{"check": c.name, "passed": c.passed,
                                   **({"detail": c.detail} if c.detail else {})}
                                  for c in simp]
        all_ok = all_ok and all(c.passed for c in simp)
    doc = new_report("verify", result="pass" if all_ok else "fail",
                     suites=sections)
    return doc, not all_ok


def _cmd_audit(ns):
    record = _load(ns)
    grid = _grid(ns.grid)
    ok, rows = vanishing_audit(record, grid)
    doc = new_report(
        "audit-vanishing", model=record.id,
        result="pass" if ok else "fail",
        rows=[{"t": ser_fraction(t), "dims": list(dims), "ok": good,
               **({"note": note} if note else {})}
              for t, dims, good, note in rows])
    return doc, not ok


if __name__ == "__main__":
    sys.exit(main())
