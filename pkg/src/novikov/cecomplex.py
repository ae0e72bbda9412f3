"""Invariant-form complexes of Lie models.

A complex is described by degree-1 generators e^1..e^n with rational
structure constants d e^g = sum c_{ij} e^i ^ e^j, an orientation and a
declared-orthonormal coframe.  On top of it: wedge calculus, the twisted
differential d_a = d - a ^ ., Hodge star, the twisted codifferential
d*_a = -* d_{-a} *, Laplacians on the float path, and exact twisted
cohomology in specialized or generic (transcendental t) mode.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactlinalg import Matrix, kernel_basis, minor_gcd, numerical_rank, rank
from .profile import BettiProfile
from .scalars import LaurentPoly, RationalFunction, rat, rational_roots


class GateFailure(ValueError):
    """A load-time identity check failed; message names identity and generator."""


def _perm_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _merge_wedge(idx_a, idx_b):
    """Sign and sorted tuple of the concatenation, or (0, None) on repeats."""
    if set(idx_a) & set(idx_b):
        return 0, None
    merged = idx_a + idx_b
    return _perm_sign(merged), tuple(sorted(merged))


class CEComplex:
    """Finite invariant-form model: generators, structure constants, orientation."""

    def __init__(self, names, diff, orientation=None):
        self.names = tuple(names)
        self.n = len(self.names)
        if len(set(self.names)) != self.n:
            raise GateFailure("duplicate generator names")
        canon = {}
        for g, terms in diff.items():
            row = {}
            for (i, j), c in terms.items():
                c = rat(c)
                if i == j or not c:
                    continue
                if i > j:
                    i, j, c = j, i, -c
                row[(i, j)] = row.get((i, j), Fraction(0)) + c
            canon[g] = {k: v for k, v in row.items() if v}
        self.diff = {g: canon.get(g, {}) for g in range(self.n)}
        if orientation is None:
            orientation = tuple(range(self.n))
        if sorted(orientation) != list(range(self.n)):
            raise GateFailure("orientation must be a permutation of all generators")
        self.orientation_sign = _perm_sign(orientation)
        self._bases = [tuple(itertools.combinations(range(self.n), k))
                       for k in range(self.n + 1)]
        self._pos = [{idx: p for p, idx in enumerate(b)} for b in self._bases]
        for g in range(self.n):
            dd = self.d(self.generator_form(g).d())
            if not dd.is_zero():
                raise GateFailure(
                    "d^2 = 0 fails on generator %s: d^2 = %s" % (self.names[g], dd))
        self.unimodular = self._unimodularity()

    def _unimodularity(self):
        # trace of ad_{X_i} vanishes iff sum_j (coeff of e^i^e^j in d e^j) = 0
        for i in range(self.n):
            total = Fraction(0)
            for j in range(self.n):
                if i == j:
                    continue
                a, b = (i, j) if i < j else (j, i)
                c = self.diff[j].get((a, b), Fraction(0))
                total += c if i < j else -c
            if total:
                return False
        return True

    def basis(self, k):
        if k < 0 or k > self.n:
            return ()
        return self._bases[k]

    def dim(self, k):
        return len(self.basis(k))

    def zero_form(self, k):
        return DiffForm(self, k, {})

    def constant_form(self, value=1):
        return DiffForm(self, 0, {(): rat(value)})

    def generator_form(self, g):
        return DiffForm(self, 1, {(g,): Fraction(1)})

    def generator_index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError("unknown generator %r" % name)

    def d(self, form):
        """Exterior differential, extended from the generators by Leibniz."""
        out = {}
        for idx, c in form.c.items():
            for pos, g in enumerate(idx):
                sign = (-1) ** pos
                rest = idx[:pos] + idx[pos + 1:]
                for (i, j), s in self.diff[g].items():
                    s2, merged = _merge_wedge((i, j), rest)
                    if s2:
                        _accum(out, merged, c * (sign * s2 * s))
        return DiffForm(self, min(form.degree + 1, self.n), out)

    def volume_form(self):
        return DiffForm(self, self.n, {tuple(range(self.n)): Fraction(1)})


def _accum(acc, key, val):
    cur = acc.get(key)
    new = val if cur is None else cur + val
    if _nonzero(new):
        acc[key] = new
    else:
        acc.pop(key, None)


def _nonzero(x):
    if isinstance(x, float):
        return x != 0.0
    return bool(x)


class DiffForm:
    """Homogeneous form: coefficients indexed by increasing generator tuples."""

    __slots__ = ("cx", "degree", "c")

    def __init__(self, cx, degree, coeffs):
        if degree < 0 or degree > cx.n:
            raise ValueError("degree out of range")
        clean = {}
        for idx, v in coeffs.items():
            idx = tuple(idx)
            if len(idx) != degree or list(idx) != sorted(set(idx)):
                raise ValueError("bad index tuple %r for degree %d" % (idx, degree))
            if _nonzero(v):
                clean[idx] = v
        self.cx = cx
        self.degree = degree
        self.c = clean

    def is_zero(self):
        return not self.c

    def __add__(self, other):
        self._check(other)
        out = dict(self.c)
        for k, v in other.c.items():
            _accum(out, k, v)
        return DiffForm(self.cx, self.degree, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, s):
        return DiffForm(self.cx, self.degree,
                        {k: s * v for k, v in self.c.items()})

    def wedge(self, other):
        if other.cx is not self.cx:
            raise ValueError("forms live on different complexes")
        deg = self.degree + other.degree
        if deg > self.cx.n:
            return DiffForm(self.cx, self.cx.n, {})
        out = {}
        for ia, va in self.c.items():
            for ib, vb in other.c.items():
                sign, merged = _merge_wedge(ia, ib)
                if sign:
                    _accum(out, merged, va * vb * sign)
        return DiffForm(self.cx, deg, out)

    def d(self):
        return self.cx.d(self)

    def _check(self, other):
        if other.cx is not self.cx or other.degree != self.degree:
            raise ValueError("incompatible forms")

    def __eq__(self, other):
        return (isinstance(other, DiffForm) and other.cx is self.cx
                and other.degree == self.degree and other.c == self.c)

    def __hash__(self):
        return hash((id(self.cx), self.degree, frozenset(self.c.items())))

    def to_vector(self):
        return [self.c.get(idx, 0) for idx in self.cx.basis(self.degree)]

    @classmethod
    def from_vector(cls, cx, degree, vec):
        return cls(cx, degree,
                   {idx: v for idx, v in zip(cx.basis(degree), vec)})

    def map_coeffs(self, fn):
        return DiffForm(self.cx, self.degree, {k: fn(v) for k, v in self.c.items()})

    def norm(self):
        return math.sqrt(sum(float(v) ** 2 for v in self.c.values()))

    def __str__(self):
        if not self.c:
            return "0"
        names = self.cx.names
        parts = []
        for idx in sorted(self.c):
            mono = "^".join(names[i] for i in idx) if idx else "1"
            parts.append("%s %s" % (self.c[idx], mono) if idx else str(self.c[idx]))
        return " + ".join(parts)

    def __repr__(self):
        return "DiffForm<deg %d: %s>" % (self.degree, self)


class TwistForm:
    """A closed rational degree-1 form scaled by t; defines d_a for a = t*base."""

    __slots__ = ("base", "scale")

    def __init__(self, base: DiffForm, scale=Fraction(1)):
        if base.degree != 1:
            raise GateFailure("twist base must have degree 1")
        db = base.d()
        if not db.is_zero():
            raise GateFailure("twist base is not closed: d(base) = %s" % db)
        self.base = base
        self.scale = scale if isinstance(scale, (Fraction, float)) else rat(scale)

    def form(self) -> DiffForm:
        if isinstance(self.scale, float):
            return self.base.map_coeffs(lambda v: float(v) * self.scale)
        return self.base.scale(self.scale)

    def generic_form(self) -> DiffForm:
        t = RationalFunction.t()
        return self.base.map_coeffs(lambda v: t * v)

    def negated(self) -> "TwistForm":
        return TwistForm(self.base, -self.scale)

    def __repr__(self):
        return "TwistForm<%s * (%s)>" % (self.scale, self.base)


def wedge(a: DiffForm, b: DiffForm) -> DiffForm:
    return a.wedge(b)


def d_twisted(alpha: TwistForm, phi: DiffForm) -> DiffForm:
    """d_a phi = d phi - a ^ phi."""
    return phi.d() - alpha.form().wedge(phi)


def d_eta(eta: DiffForm, phi: DiffForm) -> DiffForm:
    """Twisted differential against an explicit 1-form (float path helper)."""
    return phi.d() - eta.wedge(phi)


def hodge_star(phi: DiffForm) -> DiffForm:
    """Star of the declared-orthonormal coframe w.r.t. the stored orientation."""
    cx = phi.cx
    out = {}
    for idx, v in phi.c.items():
        comp = tuple(i for i in range(cx.n) if i not in idx)
        sign = _perm_sign(idx + comp) * cx.orientation_sign
        _accum(out, comp, sign * v)
    return DiffForm(cx, cx.n - phi.degree, out)


def d_adjoint(alpha: TwistForm, phi: DiffForm) -> DiffForm:
    """d*_a = -* d_{-a} *; the sign table assumes even n."""
    if phi.cx.n % 2:
        raise ValueError("codifferential sign convention needs even n")
    return -hodge_star(d_twisted(alpha.negated(), hodge_star(phi)))


def inner_product(a: DiffForm, b: DiffForm) -> float:
    a._check(b)
    keys = set(a.c) | set(b.c)
    return float(sum(float(a.c.get(k, 0)) * float(b.c.get(k, 0)) for k in keys))


# ---------------------------------------------------------------------------
# matrices of the twisted operators

def d_twisted_matrix(cx: CEComplex, alpha: TwistForm, k: int, domain: str):
    """Matrix of d_a on k-forms over 'rational', 'laurent', 'ratfunc' or 'float'.

    In 'laurent'/'ratfunc' mode the scale is replaced by the indeterminate t.
    """
    if k >= cx.n:
        return Matrix.zeros(0, cx.dim(k), domain)
    if domain in ("laurent", "ratfunc"):
        t = LaurentPoly.t() if domain == "laurent" else RationalFunction.t()
        eta = alpha.base.map_coeffs(lambda v: t * v)
    elif domain == "float":
        eta = alpha.base.map_coeffs(lambda v: float(v) * float(alpha.scale))
    else:
        eta = alpha.base.scale(rat(alpha.scale))
    one = {"laurent": LaurentPoly.const(1),
           "ratfunc": RationalFunction(1),
           "float": 1.0}.get(domain, Fraction(1))
    cols = []
    for idx in cx.basis(k):
        basis_form = DiffForm(cx, k, {idx: one})
        img = basis_form.d() - eta.wedge(basis_form)
        cols.append(img.to_vector())
    if not cols:
        return Matrix.zeros(cx.dim(k + 1), 0, domain)
    rows = [[col[i] for col in cols] for i in range(len(cols[0]))]
    return Matrix(rows, domain)


def _star_matrix(cx: CEComplex, k: int) -> np.ndarray:
    src = cx.basis(k)
    dst = cx._pos[cx.n - k]
    m = np.zeros((cx.dim(cx.n - k), len(src)))
    for j, idx in enumerate(src):
        comp = tuple(i for i in range(cx.n) if i not in idx)
        m[dst[comp], j] = _perm_sign(idx + comp) * cx.orientation_sign
    return m


def d_float_matrix(cx: CEComplex, alpha: TwistForm, k: int) -> np.ndarray:
    m = d_twisted_matrix(cx, TwistForm(alpha.base, Fraction(1)), k, "rational")
    d0 = d_twisted_matrix(cx, TwistForm(alpha.base, Fraction(0)), k, "rational")
    plain = d0.to_float()
    wedge_part = plain - m.to_float()  # matrix of base ^ .
    return plain - float(alpha.scale) * wedge_part


def d_adjoint_float_matrix(cx: CEComplex, alpha: TwistForm, k: int) -> np.ndarray:
    if cx.n % 2:
        raise ValueError("codifferential sign convention needs even n")
    if k == 0:
        return np.zeros((0, cx.dim(0)))
    neg = TwistForm(alpha.base, -alpha.scale)
    s_k = _star_matrix(cx, k)
    d_mid = d_float_matrix(cx, neg, cx.n - k)
    s_back = _star_matrix(cx, cx.n - k + 1)
    return -s_back @ d_mid @ s_k


def laplacian(cx: CEComplex, alpha: TwistForm, k: int) -> np.ndarray:
    """Twisted Laplacian d_a d*_a + d*_a d_a on k-form coefficients (floats)."""
    lap = np.zeros((cx.dim(k), cx.dim(k)))
    if k < cx.n:
        up = d_float_matrix(cx, alpha, k)
        codiff_up = d_adjoint_float_matrix(cx, alpha, k + 1)
        lap += codiff_up @ up
    if k >= 1:
        down = d_adjoint_float_matrix(cx, alpha, k)
        d_down = d_float_matrix(cx, alpha, k - 1)
        lap += d_down @ down
    return lap


def harmonic_dim(cx: CEComplex, alpha: TwistForm, k: int,
                 tol: float = 1e-9) -> int:
    lap = laplacian(cx, alpha, k)
    lap = 0.5 * (lap + lap.T)
    eig = np.linalg.eigvalsh(lap)
    top = max(abs(eig[0]), abs(eig[-1]), 1e-300)
    return int(np.count_nonzero(np.abs(eig) <= tol * top)) if eig.size else 0


# ---------------------------------------------------------------------------
# exact cohomology and jumping loci

def cohomology(cx: CEComplex, alpha: TwistForm, generic: bool = False) -> BettiProfile:
    """Exact twisted Betti numbers; generic mode works over Q(t)."""
    domain = "ratfunc" if generic else "rational"
    if not generic and isinstance(alpha.scale, float):
        raise ValueError("exact cohomology needs a rational scale")
    ranks = []
    for k in range(cx.n + 1):
        if k == cx.n:
            ranks.append(0)
            continue
        m = d_twisted_matrix(cx, alpha, k, domain)
        ranks.append(rank(m))
    dims = []
    for k in range(cx.n + 1):
        below = ranks[k - 1] if k else 0
        dims.append(cx.dim(k) - ranks[k] - below)
    twist = "t*(%s)" % alpha.base if generic else "%s*(%s)" % (alpha.scale, alpha.base)
    return BettiProfile(tuple(dims), twist,
                        "generic" if generic else "specialized",
                        tuple(cx.dim(k) for k in range(cx.n + 1)))


@dataclass(frozen=True)
class JumpReport:
    degree: int
    roots: tuple
    certificate: LaurentPoly
    note: str

    def __str__(self):
        return "degree %d: roots %s, certificate %s (%s)" % (
            self.degree, list(self.roots), self.certificate, self.note)


def jumping_set(cx: CEComplex, alpha_base: DiffForm, k: int) -> JumpReport:
    """Rational t where b_k(t*base) exceeds its generic value, plus certificate.

    The certificate is the product of the minor gcds of the two coboundary
    matrices at their generic ranks; t = 0 is excluded by normalization
    (holonomy must stay invertible) and noted.
    """
    alpha = TwistForm(alpha_base, Fraction(1))
    cert = LaurentPoly.const(1)
    zero_is_jump = False
    for kk in (k - 1, k):
        if kk < 0 or kk >= cx.n:
            continue
        m = d_twisted_matrix(cx, alpha, kk, "laurent")
        r = rank(m.to_ratfunc())
        if r == 0:
            continue
        g = minor_gcd(m, r)
        at_zero = Matrix([[x(0) for x in row] for row in m.entries], "rational")
        zero_is_jump = zero_is_jump or rank(at_zero) < r
        cert = cert * g
    roots = tuple(rational_roots(cert)) if cert.degree() > 0 else ()
    note = ("t = 0 excluded (rank drops there)" if zero_is_jump
            else "t = 0 excluded")
    return JumpReport(k, roots, cert, note)


def star_laplacian_identity_check(cx: CEComplex, alpha: TwistForm,
                                  trials: int = 100, seed: int = 0) -> float:
    """max over random forms of ||* Lap_a phi - Lap_{-a} * phi||."""
    rng = np.random.default_rng(seed)
    neg = TwistForm(alpha.base, -alpha.scale)
    worst = 0.0
    for k in range(cx.n + 1):
        lap_k = laplacian(cx, alpha, k)
        lap_neg = laplacian(cx, neg, cx.n - k)
        star = _star_matrix(cx, k)
        for _ in range(trials):
            v = rng.standard_normal(cx.dim(k))
            resid = star @ (lap_k @ v) - lap_neg @ (star @ v)
            worst = max(worst, float(np.max(np.abs(resid))) if resid.size else 0.0)
    return worst


def adjoint_identity_check(cx: CEComplex, alpha: TwistForm,
                           trials: int = 100, seed: int = 0) -> float:
    """max |<d_a phi, psi> - <phi, d*_a psi>| over random forms."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(cx.n):
        up = d_float_matrix(cx, alpha, k)
        codiff = d_adjoint_float_matrix(cx, alpha, k + 1)
        for _ in range(trials):
            phi = rng.standard_normal(cx.dim(k))
            psi = rng.standard_normal(cx.dim(k + 1))
            lhs = float((up @ phi) @ psi)
            rhs = float(phi @ (codiff @ psi))
            worst = max(worst, abs(lhs - rhs))
    return worst
