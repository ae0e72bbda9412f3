"""Complex-structure layer on an invariant-form complex.

J acts on the coframe by a rational matrix; the pinned convention for the
induced action on 1-forms is (J b)(X) = -b(J X), so the (1,0)-coframe is
the -i eigenspace of the complexified coframe action.  Bidegree splitting,
the twisted Dolbeault operator and exact Hodge diamonds all run over
Gaussian rationals (pairs of rationals, i^2 = -1); no floating complex
numbers appear on the exact path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .cecomplex import CEComplex, DiffForm, GateFailure, TwistForm, d_twisted
from .exactlinalg import Matrix, kernel_basis, rank, solve_right_inverse
from .scalars import GaussianRational, rat


class BidegreeError(ValueError):
    pass


def complexify(form: DiffForm) -> DiffForm:
    return form.map_coeffs(
        lambda v: v if isinstance(v, GaussianRational) else GaussianRational(rat(v)))


def _conj_form(form: DiffForm) -> DiffForm:
    return form.map_coeffs(lambda v: v.conjugate())


class ComplexStructure:
    """J-matrix on the coframe with J^2 = -1 and an integrability gate."""

    def __init__(self, cx: CEComplex, coframe_matrix):
        if cx.n % 2:
            raise GateFailure("complex structure needs an even number of generators")
        self.cx = cx
        self.m = cx.n // 2
        c = tuple(tuple(rat(x) for x in row) for row in coframe_matrix)
        if len(c) != cx.n or any(len(r) != cx.n for r in c):
            raise GateFailure("J matrix has wrong shape")
        self.cmatrix = c
        sq = [[sum(c[i][j] * c[j][k] for j in range(cx.n)) for k in range(cx.n)]
              for i in range(cx.n)]
        for i in range(cx.n):
            for k in range(cx.n):
                want = Fraction(-1) if i == k else Fraction(0)
                if sq[i][k] != want:
                    raise GateFailure(
                        "J^2 = -1 fails at coframe entry (%s, %s)"
                        % (cx.names[i], cx.names[k]))
        self._holo = self._holomorphic_coframe()
        self._phi_forms = self._holo + [_conj_form(f) for f in self._holo]
        self._change = {}
        self._change_inv = {}
        for a, phi in enumerate(self._holo):
            d02 = self._component(complexify_d(cx, phi), 0, 2)
            if not d02.is_zero():
                raise GateFailure(
                    "integrability fails: d(phi_%d) has (0,2)-component %s"
                    % (a + 1, d02))

    def _holomorphic_coframe(self):
        n = self.cx.n
        i_unit = GaussianRational.i()
        rows = [[GaussianRational(self.cmatrix[j][i]) + (i_unit if i == j else 0)
                 for j in range(n)] for i in range(n)]
        basis = kernel_basis(Matrix(rows, "gaussian"))
        if len(basis) != self.m:
            raise GateFailure("coframe (1,0)-eigenspace has wrong dimension")
        out = []
        for vec in basis:
            out.append(DiffForm(self.cx, 1,
                                {(i,): v for i, v in enumerate(vec) if v}))
        return out

    def monomials(self, k):
        return tuple(itertools.combinations(range(2 * self.m), k))

    def monomial_type(self, mono):
        p = sum(1 for i in mono if i < self.m)
        return p, len(mono) - p

    def _monomial_form(self, mono) -> DiffForm:
        out = DiffForm(self.cx, 0, {(): GaussianRational(1)})
        for i in mono:
            out = out.wedge(self._phi_forms[i])
        return out

    def _basis_change(self, k):
        """Columns: e-coordinates of the phi-monomial basis of degree k."""
        if k not in self._change:
            monos = self.monomials(k)
            cols = [self._monomial_form(mono).to_vector() for mono in monos]
            cols = [[GaussianRational(x) if isinstance(x, (int, Fraction)) else x
                     for x in col] for col in cols]
            mat = Matrix([[col[i] for col in cols] for i in range(len(monos))],
                         "gaussian")
            self._change[k] = mat
            self._change_inv[k] = solve_right_inverse(mat)
        return self._change[k], self._change_inv[k]

    def phi_coords(self, form: DiffForm):
        form = complexify(form)
        _, inv = self._basis_change(form.degree)
        return inv.mul_vector(
            [GaussianRational(x) if isinstance(x, (int, Fraction)) else x
             for x in form.to_vector()])

    def from_phi_coords(self, k, coords) -> DiffForm:
        mat, _ = self._basis_change(k)
        return DiffForm.from_vector(self.cx, k, mat.mul_vector(coords))

    def _component(self, form: DiffForm, p, q) -> DiffForm:
        coords = self.phi_coords(form)
        monos = self.monomials(form.degree)
        keep = [v if self.monomial_type(mono) == (p, q) else GaussianRational(0)
                for mono, v in zip(monos, coords)]
        return self.from_phi_coords(form.degree, keep)

    def j_oneform(self, beta: DiffForm) -> DiffForm:
        """Coframe action on a 1-form: J e^i = sum_j C[i][j] e^j."""
        if beta.degree != 1:
            raise ValueError("j_oneform expects a 1-form")
        vec = beta.to_vector()
        out = {}
        for i, x in enumerate(vec):
            if not _truthy(x):
                continue
            for j, cij in enumerate(self.cmatrix[i]):
                if cij:
                    cur = out.get((j,))
                    add = x * cij
                    out[(j,)] = add if cur is None else cur + add
        return DiffForm(self.cx, 1, {k: v for k, v in out.items() if _truthy(v)})

    def vector_action(self):
        """Matrix A with J X_k = sum_i A[i][k] X_i, from (J b)(X) = -b(J X)."""
        n = self.cx.n
        return tuple(tuple(-self.cmatrix[i][k] for k in range(n)) for i in range(n))


def _truthy(x):
    if isinstance(x, float):
        return x != 0.0
    return bool(x)


def complexify_d(cx: CEComplex, form: DiffForm) -> DiffForm:
    return complexify(cx.d(form))


def bidegree_split(jc: ComplexStructure, form: DiffForm):
    """Decompose along eigenspaces of J; components sum back to the form."""
    coords = jc.phi_coords(form)
    monos = jc.monomials(form.degree)
    buckets = {}
    for mono, v in zip(monos, coords):
        if v:
            buckets.setdefault(jc.monomial_type(mono), {})[mono] = v
    out = {}
    for (p, q), sel in sorted(buckets.items()):
        coords_pq = [sel.get(mono, GaussianRational(0)) for mono in monos]
        out[(p, q)] = jc.from_phi_coords(form.degree, coords_pq)
    return out


def pure_bidegree(jc: ComplexStructure, form: DiffForm):
    split = bidegree_split(jc, form)
    if len(split) > 1:
        raise BidegreeError("form is not of pure bidegree: %s" % sorted(split))
    if not split:
        return None
    return next(iter(split))


def dolbeault_twisted(jc: ComplexStructure, alpha: TwistForm,
                      phi: DiffForm) -> DiffForm:
    """(p, q+1)-part of d_a phi for a pure (p, q) input."""
    pq = pure_bidegree(jc, phi)
    if pq is None:
        return phi
    p, q = pq
    image = d_twisted_complex(jc, alpha, phi)
    if image.degree > jc.cx.n:
        return jc.cx.zero_form(min(image.degree, jc.cx.n))
    return jc._component(image, p, q + 1)


def d_twisted_complex(jc: ComplexStructure, alpha: TwistForm,
                      phi: DiffForm) -> DiffForm:
    eta = complexify(alpha.form())
    phi = complexify(phi)
    return jc.cx.d(phi) - eta.wedge(phi)


def dolbeault_matrix(jc: ComplexStructure, alpha: TwistForm, p: int, q: int):
    """Matrix of the twisted Dolbeault operator from (p,q) to (p,q+1)."""
    src = [mono for mono in jc.monomials(p + q)
           if jc.monomial_type(mono) == (p, q)]
    dst = [mono for mono in jc.monomials(p + q + 1)
           if jc.monomial_type(mono) == (p, q + 1)]
    dst_pos = {mono: i for i, mono in enumerate(dst)}
    cols = []
    for mono in src:
        form = jc._monomial_form(mono)
        img = d_twisted_complex(jc, alpha, form)
        col = [GaussianRational(0)] * len(dst)
        if img.degree <= jc.cx.n and not img.is_zero():
            coords = jc.phi_coords(img)
            for mono2, v in zip(jc.monomials(img.degree), coords):
                if v and mono2 in dst_pos:
                    col[dst_pos[mono2]] = v
        cols.append(col)
    if not cols:
        return Matrix.zeros(len(dst), 0, "gaussian")
    if not dst:
        return Matrix.zeros(0, len(src), "gaussian")
    return Matrix([[col[i] for col in cols] for i in range(len(dst))], "gaussian")


@dataclass(frozen=True)
class HodgeDiamond:
    entries: dict
    twist: str

    def h(self, p, q):
        return self.entries[(p, q)]

    def __str__(self):
        m = max(p for p, _ in self.entries)
        lines = []
        for q in range(m, -1, -1):
            lines.append("  ".join(str(self.entries[(p, q)])
                                   for p in range(m + 1)))
        return "\n".join(lines)


def hodge_diamond(jc: ComplexStructure, alpha: TwistForm) -> HodgeDiamond:
    """Exact h^{p,q} of the twisted Dolbeault complex on invariant forms."""
    m = jc.m
    ranks = {}
    for p in range(m + 1):
        for q in range(m + 1):
            ranks[(p, q)] = rank(dolbeault_matrix(jc, alpha, p, q))
    entries = {}
    for p in range(m + 1):
        for q in range(m + 1):
            dim_pq = sum(1 for mono in jc.monomials(p + q)
                         if jc.monomial_type(mono) == (p, q))
            below = ranks[(p, q - 1)] if q else 0
            entries[(p, q)] = dim_pq - ranks[(p, q)] - below
            if entries[(p, q)] < 0:
                raise ArithmeticError("negative Hodge number at (%d,%d)" % (p, q))
    return HodgeDiamond(entries, "%s*(%s)" % (alpha.scale, alpha.base))


def lee_torsion(jc: ComplexStructure, alpha: TwistForm) -> DiffForm:
    """d(J a) + a ^ J a for a = scale * base (degree-2 obstruction form)."""
    a = alpha.form()
    ja = jc.j_oneform(a)
    return jc.cx.d(ja) + a.wedge(ja)


def one_one_part(jc: ComplexStructure, omega: DiffForm) -> DiffForm:
    """J-invariant part (1/2)(w(X,Y) + w(JX,JY)): the (1,1)-piece of a real 2-form."""
    if omega.degree != 2:
        raise ValueError("one_one_part expects a 2-form")
    n = jc.cx.n
    a = jc.vector_action()
    w = [[None] * n for _ in range(n)]
    zero = Fraction(0)
    for i in range(n):
        for j in range(n):
            w[i][j] = zero
    for (i, j), v in omega.c.items():
        w[i][j] = w[i][j] + v
        w[j][i] = w[j][i] - v
    half = Fraction(1, 2)
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            jw = sum(a[ii][i] * w[ii][jj] * a[jj][j]
                     for ii in range(n) for jj in range(n)
                     if w[ii][jj])
            val = half * (w[i][j] + jw)
            if _truthy(val):
                out[(i, j)] = val
    return DiffForm(jc.cx, 2, out)
