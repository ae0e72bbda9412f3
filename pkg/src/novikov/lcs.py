"""Deformation of twisted-closed 2-forms, taming checks and the Lee-class scan.

The solver iterates omega_{i+1} = d*_a(G_a(beta ^ omega_i)) with the Green
operator realized as a least-squares pseudo-inverse of the degree-3 twisted
Laplacian.  The iteration is gated by the exact vanishing of b_3 at the
base twist; the float path never runs when the exact gate fails.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cecomplex import (CEComplex, DiffForm, TwistForm, cohomology,
                        d_adjoint_float_matrix, d_float_matrix, d_twisted,
                        d_twisted_matrix, laplacian)
from .complexstructure import ComplexStructure, lee_torsion, one_one_part
from .exactlinalg import Matrix, kernel_basis, pseudo_inverse_apply


@dataclass(frozen=True)
class TamingVerdict:
    positive: bool
    margin: float  # smallest eigenvalue of g = w^{1,1}(., J.)

    def __bool__(self):
        return self.positive


def taming_check(jc: ComplexStructure, omega: DiffForm) -> TamingVerdict:
    """Positive-definiteness of g(X, Y) = w^{1,1}(X, JY)."""
    w11 = one_one_part(jc, omega)
    g = _metric_matrix(jc, w11)
    eig = np.linalg.eigvalsh(0.5 * (g + g.T))
    margin = float(eig[0]) if eig.size else 0.0
    exact = all(isinstance(v, Fraction) for v in omega.c.values())
    if exact:
        positive = _sylvester_positive(_metric_rows(jc, w11))
    else:
        positive = margin > 0.0
    return TamingVerdict(positive, margin)


def _metric_rows(jc, w11):
    n = jc.cx.n
    a = jc.vector_action()
    w = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), v in w11.c.items():
        w[i][j] += v
        w[j][i] -= v
    return [[sum(w[k][m] * a[m][l] for m in range(n)) for l in range(n)]
            for k in range(n)]


def _metric_matrix(jc, w11):
    return np.array([[float(x) for x in row] for row in _metric_rows(jc, w11)])


def _sylvester_positive(rows):
    n = len(rows)
    for k in range(1, n + 1):
        sub = [row[:k] for row in rows[:k]]
        if _det(sub) <= 0:
            return False
    return True


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = Fraction(0)
    for j in range(n):
        if rows[0][j]:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * rows[0][j] * _det(minor)
    return total


@dataclass(frozen=True)
class LCSCandidate:
    omega: DiffForm
    alpha: TwistForm
    closedness_residual: float
    taming: TamingVerdict


@dataclass
class DeformationRun:
    base: LCSCandidate
    beta: DiffForm
    order: int
    t: float
    status: str = "pending"  # converged | obstructed | diverged
    coefficients: list = field(default_factory=list)  # degree-2 float vectors
    solve_residuals: list = field(default_factory=list)
    rhs_closed_residuals: list = field(default_factory=list)
    coefficient_norms: list = field(default_factory=list)
    radius_estimate: float = float("inf")
    obstruction_dim: int = 0
    summed: DiffForm = None
    final_residual: float = float("nan")
    taming: TamingVerdict = None

    def summary(self):
        out = {
            "status": self.status,
            "order": self.order,
            "t": self.t,
            "final_residual": self.final_residual,
            "radius_estimate": self.radius_estimate,
        }
        if self.status == "obstructed":
            out["obstruction_dim_b3"] = self.obstruction_dim
        if self.solve_residuals:
            out["max_solve_residual"] = max(self.solve_residuals)
        if self.rhs_closed_residuals:
            out["max_rhs_closed_residual"] = max(self.rhs_closed_residuals)
        if self.taming is not None:
            out["taming_positive"] = bool(self.taming)
            out["taming_margin"] = self.taming.margin
        return out


def _wedge_matrix(cx: CEComplex, eta: DiffForm, k: int) -> np.ndarray:
    """Float matrix of eta ^ . from k-forms to (k + deg eta)-forms."""
    cols = []
    target = min(k + eta.degree, cx.n)
    for idx in cx.basis(k):
        basis_form = DiffForm(cx, k, {idx: 1.0})
        img = eta.map_coeffs(float).wedge(basis_form)
        cols.append([float(v) for v in img.to_vector()])
    if not cols:
        return np.zeros((cx.dim(target), 0))
    return np.array(cols, dtype=float).T


def deform(cx: CEComplex, alpha: TwistForm, omega0: DiffForm, beta: DiffForm,
           order: int = 30, t: float = 0.0, tol: float = 1e-10,
           jc: ComplexStructure = None) -> DeformationRun:
    """Power-series deformation of a d_a-closed 2-form toward the twist a + t*b."""
    if beta.degree != 1:
        raise ValueError("deformation direction must be a 1-form")
    if not beta.d().is_zero():
        raise ValueError("deformation direction must be closed")
    if omega0.degree != 2:
        raise ValueError("base must be a 2-form")
    closed0 = d_twisted(alpha, omega0)
    if not closed0.is_zero():
        raise ValueError("base 2-form is not d_a-closed: residual %s" % closed0)

    base = LCSCandidate(
        omega0, alpha, 0.0,
        taming_check(jc, omega0) if jc is not None else None)
    run = DeformationRun(base, beta, order, float(t))

    # exact obstruction gate: the degree-3 twisted cohomology must vanish
    b3 = cohomology(cx, alpha)[3]
    if b3 != 0:
        run.status = "obstructed"
        run.obstruction_dim = b3
        return run

    lap3 = laplacian(cx, alpha, 3)
    dstar3 = d_adjoint_float_matrix(cx, alpha, 3)
    d2 = d_float_matrix(cx, alpha, 2)
    d3 = d_float_matrix(cx, alpha, 3)
    beta_wedge = _wedge_matrix(cx, beta, 2)

    omega_vec = np.array([float(v) for v in omega0.to_vector()])
    coeffs = [omega_vec]
    for _ in range(order):
        rhs = beta_wedge @ coeffs[-1]
        run.rhs_closed_residuals.append(float(np.linalg.norm(d3 @ rhs)))
        u = pseudo_inverse_apply(lap3, rhs)
        nxt = dstar3 @ u
        run.solve_residuals.append(float(np.linalg.norm(d2 @ nxt - rhs)))
        coeffs.append(nxt)
    run.coefficients = coeffs
    run.coefficient_norms = [float(np.linalg.norm(c)) for c in coeffs]

    ratios = [b / a for a, b in zip(run.coefficient_norms,
                                    run.coefficient_norms[1:]) if a > 0.0]
    tail = ratios[-5:]
    if tail and sum(tail) > 0:
        run.radius_estimate = len(tail) / sum(tail)
    if t != 0.0 and abs(t) > 0.8 * run.radius_estimate:
        run.status = "diverged"
        return run
    terms = [float(t) ** i * np.linalg.norm(c) for i, c in enumerate(coeffs)]
    growth = [i for i in range(len(terms) - 5)
              if all(terms[i + j + 1] > terms[i + j] > 0 for j in range(5))]
    if t != 0.0 and growth:
        run.status = "diverged"
        return run

    summed = sum((float(t) ** i) * c for i, c in enumerate(coeffs))
    run.summed = DiffForm.from_vector(cx, 2,
                                      [float(x) for x in summed])
    eta = alpha.form().map_coeffs(float) + beta.map_coeffs(
        lambda v: float(v) * float(t))
    d_mixed = _wedge_matrix(cx, eta, 2)
    d_plain = d_float_matrix(cx, TwistForm(alpha.base, Fraction(0)), 2)
    run.final_residual = float(np.linalg.norm((d_plain - d_mixed) @ summed))
    if jc is not None:
        run.taming = taming_check(jc, run.summed)
    run.status = "converged" if run.final_residual < tol else "diverged"
    return run


# ---------------------------------------------------------------------------
# Lee-class scan

@dataclass(frozen=True)
class ScanEntry:
    t: Fraction
    found: bool
    witness: DiffForm = None
    margin: float = 0.0
    volume_coefficient: Fraction = None
    note: str = ""


@dataclass(frozen=True)
class ScanReport:
    torsion_zero: bool
    entries: tuple
    certificate: str
    admissible: tuple

    def found_scales(self):
        return tuple(e.t for e in self.entries if e.found)


def lee_class_scan(jc: ComplexStructure, alpha_base: DiffForm, t_grid,
                   coeff_bound=Fraction(3), coeff_step=Fraction(1, 4),
                   chunk: int = 8192) -> ScanReport:
    """Search d_{t a}-closed invariant taming 2-forms over a rational t grid.

    Absence at a grid point means 'not found (bounded search)', never a
    nonexistence claim.  When the torsion d(Ja) + a ^ Ja vanishes, every
    found candidate carries the positive volume coefficient c of
    a ^ Ja ^ w^{1,1}, and t(t-1)c = 0 pins t = 1.
    """
    cx = jc.cx
    unit = TwistForm(alpha_base, Fraction(1))
    torsion = lee_torsion(jc, unit)
    torsion_zero = torsion.is_zero()
    ja = jc.j_oneform(alpha_base)
    aja = alpha_base.wedge(ja)

    values = _sweep_values(coeff_bound, coeff_step)
    entries = []
    for t0 in t_grid:
        t0 = Fraction(t0)
        if t0 == 0:
            entries.append(ScanEntry(t0, False, note="t = 0 excluded"))
            continue
        mat = d_twisted_matrix(cx, TwistForm(alpha_base, t0), 2, "rational")
        kbasis = kernel_basis(mat)
        forms = [DiffForm.from_vector(cx, 2, vec) for vec in kbasis]
        witness_coeffs = _find_taming(jc, forms, values, chunk)
        if witness_coeffs is None:
            entries.append(ScanEntry(t0, False,
                                     note="not found (bounded search)"))
            continue
        omega = cx.zero_form(2)
        for c, f in zip(witness_coeffs, forms):
            omega = omega + f.scale(c)
        verdict = taming_check(jc, omega)
        w11 = one_one_part(jc, omega)
        cvol = aja.wedge(w11).c.get(tuple(range(cx.n)), Fraction(0))
        entries.append(ScanEntry(t0, True, omega, verdict.margin, cvol))
    found = [e for e in entries if e.found]
    if torsion_zero:
        if found:
            cex = found[0].volume_coefficient
            cert = ("t(t-1)*c = 0, c = %s > 0 -> t = 1" % cex
                    if cex > 0 else
                    "t(t-1)*c = 0 with nonpositive c: check orientation")
        else:
            cert = "t(t-1)*c = 0 with c > 0 forces t = 1 (no witness found)"
        admissible = tuple(sorted({e.t for e in found}))
    else:
        cert = ("condition (torsion = 0) fails -- no single-point certificate; "
                "the admissible set is open, not a point")
        admissible = tuple(sorted({e.t for e in found}))
    return ScanReport(torsion_zero, tuple(entries), cert, admissible)


def _sweep_values(bound, step):
    vals = [Fraction(0)]
    v = step
    while v <= bound:
        vals.extend([v, -v])
        v += step
    return vals


def _find_taming(jc, forms, values, chunk):
    """First coefficient tuple (by |value|-major order) giving a taming form."""
    if not forms:
        return None
    n = jc.cx.n
    a = np.array([[float(x) for x in row] for row in jc.vector_action()])
    gs = []
    for f in forms:
        w = np.zeros((n, n))
        for (i, j), v in f.c.items():
            w[i, j] += float(v)
            w[j, i] -= float(v)
        w11 = 0.5 * (w + a.T @ w @ a)
        gs.append(w11 @ a)
    gs = np.array(gs)  # (k, n, n)
    k = len(forms)
    fvalues = np.array([float(v) for v in values])
    total = len(values) ** k
    idx = 0
    for block in _product_chunks(len(values), k, chunk):
        coeffs = fvalues[block]  # (chunk, k)
        g = np.tensordot(coeffs, gs, axes=(1, 0))
        g = 0.5 * (g + np.transpose(g, (0, 2, 1)))
        eig = np.linalg.eigvalsh(g)
        hits = np.nonzero(eig[:, 0] > 1e-9)[0]
        for h in hits:
            cand = [values[j] for j in block[h]]
            omega_rows = _exact_metric(jc, forms, cand)
            if _sylvester_positive(omega_rows):
                return cand
        idx += len(block)
        if idx >= total:
            break
    return None


def _exact_metric(jc, forms, coeffs):
    omega = jc.cx.zero_form(2)
    for c, f in zip(coeffs, forms):
        omega = omega + f.scale(c)
    return _metric_rows(jc, one_one_part(jc, omega))


def _product_chunks(nvals, k, chunk):
    """Index tuples over range(nvals)^k in blocks, lazily."""
    it = itertools.product(range(nvals), repeat=k)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=int)


# ---------------------------------------------------------------------------
# vanishing audit

class AuditRefused(ValueError):
    pass


def vanishing_audit(record, t_grid):
    """Tabulate b_k(t) and assert the infinite-cyclic vanishing pattern.

    Requires the model's fundamental-group tag to be Z; refuses otherwise.
    """
    meta = record.meta
    if meta.pi1 != "Z":
        raise AuditRefused(
            "audit requires fundamental group Z; model %r is tagged %r"
            % (record.id, meta.pi1))
    cx = record.cx
    rows = []
    ok = True
    for t0 in t_grid:
        t0 = Fraction(t0)
        prof = cohomology(cx, TwistForm(record.alphabase, t0))
        if t0 == 0:
            expected = tuple(meta.untwisted)
            good = prof.dims == expected
            rows.append((t0, prof.dims, good, "untwisted profile"))
        else:
            good = all(b == 0 for k, b in enumerate(prof.dims) if k != 2) \
                and prof.dims[2] == meta.b2
            rows.append((t0, prof.dims, good, ""))
        ok = ok and good
    return ok, rows
