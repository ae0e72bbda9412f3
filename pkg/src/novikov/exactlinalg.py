"""Small dense linear algebra over the exact scalar domains plus a float path.

Exact rank / kernel / inverse work over any field domain (rationals,
Gaussian rationals, rational functions).  Laurent-polynomial matrices get
elementary divisors (Smith form over Q[t], units stripped), which is what
the jumping-locus certificates are made of.  The float path is numpy:
SVD rank with a relative tolerance and a least-squares pseudo-inverse.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .scalars import GaussianRational, LaurentPoly, RationalFunction, rat

RANK_TOL = 1e-9  # relative to the largest singular value

_DOMAIN_OF_TYPE = {
    Fraction: "rational",
    GaussianRational: "gaussian",
    LaurentPoly: "laurent",
    RationalFunction: "ratfunc",
    float: "float",
}

_FIELD_DOMAINS = ("rational", "gaussian", "ratfunc", "float")


class DomainMismatch(ValueError):
    pass


class SpecializationError(ValueError):
    pass


def _classify(x):
    for tp, name in _DOMAIN_OF_TYPE.items():
        if isinstance(x, tp):
            return name
    if isinstance(x, int):
        return "int"
    raise DomainMismatch("unsupported scalar %r" % (x,))


class Matrix:
    """Immutable dense matrix with all entries from one scalar domain."""

    __slots__ = ("rows", "cols", "entries", "domain")

    def __init__(self, entries, domain=None, cols=None):
        entries = tuple(tuple(row) for row in entries)
        rows = len(entries)
        if rows:
            cols = len(entries[0])
        elif cols is None:
            cols = 0
        for row in entries:
            if len(row) != cols:
                raise ValueError("ragged rows")
        seen = {_classify(x) for row in entries for x in row}
        seen.discard("int")
        if len(seen) > 1:
            raise DomainMismatch("mixed scalar domains %s" % sorted(seen))
        if domain is None:
            domain = seen.pop() if seen else "rational"
        elif seen and seen != {domain}:
            raise DomainMismatch("entries are %s, not %s" % (sorted(seen), domain))
        entries = tuple(tuple(_promote(x, domain) for x in row) for row in entries)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "domain", domain)

    def __setattr__(self, *a):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def identity(cls, n, domain="rational"):
        one, zero = _one_zero(domain)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)],
                   domain)

    @classmethod
    def zeros(cls, rows, cols, domain="rational"):
        _, zero = _one_zero(domain)
        return cls([[zero] * cols for _ in range(rows)], domain, cols=cols)

    def transpose(self):
        if self.rows == 0:
            return Matrix([[] for _ in range(self.cols)], self.domain, cols=0)
        return Matrix(list(zip(*self.entries)), self.domain, cols=self.rows)

    def mul_vector(self, v):
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        out = []
        for row in self.entries:
            s = None
            for a, x in zip(row, v):
                term = a * x
                s = term if s is None else s + term
            out.append(s if s is not None else 0)
        return out

    def matmul(self, other):
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        if self.cols == 0 or self.rows == 0 or other.cols == 0:
            return Matrix.zeros(self.rows, other.cols, self.domain)
        cols = list(zip(*other.entries))
        return Matrix([[_dot(row, col) for col in cols] for row in self.entries],
                      self.domain)

    def to_ratfunc(self):
        return Matrix([[RationalFunction(x) if isinstance(x, LaurentPoly)
                        else RationalFunction(rat(x)) for x in row]
                       for row in self.entries], "ratfunc", cols=self.cols)

    def to_float(self):
        if self.domain == "float":
            return np.array(self.entries, dtype=float).reshape(self.rows, self.cols)
        if self.domain == "rational":
            return np.array([[float(x) for x in row] for row in self.entries],
                            dtype=float).reshape(self.rows, self.cols)
        raise DomainMismatch("cannot convert %s matrix to float" % self.domain)

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.domain == other.domain
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.domain, self.entries))

    def __repr__(self):
        return "Matrix(%r, domain=%r)" % ([list(r) for r in self.entries], self.domain)


def _dot(row, col):
    s = None
    for a, b in zip(row, col):
        term = a * b
        s = term if s is None else s + term
    return s


def _promote(x, domain):
    if domain == "rational":
        return rat(x) if isinstance(x, (int, str)) else x
    if domain == "gaussian":
        return GaussianRational(x) if isinstance(x, (int, Fraction)) else x
    if domain == "laurent":
        return LaurentPoly.const(x) if isinstance(x, (int, Fraction)) else x
    if domain == "ratfunc":
        return RationalFunction(rat(x)) if isinstance(x, (int, Fraction)) else x
    if domain == "float":
        return float(x)
    raise DomainMismatch("unknown domain %r" % domain)


def _one_zero(domain):
    return _promote(1, domain), _promote(0, domain)


def _require_field(m):
    if m.domain not in _FIELD_DOMAINS:
        raise DomainMismatch(
            "%s entries do not form a field; use to_ratfunc() first" % m.domain)


def _rref(entries):
    """Reduced row echelon form over a field; returns (rows, pivot columns)."""
    rows = [list(r) for r in entries]
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        pr = None
        for i in range(r, nr):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return rows, pivots


def rank(m: Matrix, tol: float = RANK_TOL) -> int:
    """Exact row-echelon rank; SVD rank with relative tolerance for floats."""
    _require_field(m)
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.domain == "float":
        return numerical_rank(m.to_float(), tol)
    _, pivots = _rref(m.entries)
    return len(pivots)


def numerical_rank(a: np.ndarray, tol: float = RANK_TOL) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def kernel_basis(m: Matrix, tol: float = RANK_TOL):
    """Basis of the right kernel; cols - rank vectors with m @ v = 0."""
    _require_field(m)
    if m.domain == "float":
        a = m.to_float()
        if a.size == 0:
            return [np.zeros(0)] * m.cols if m.cols else []
        u, s, vh = np.linalg.svd(a)
        r = 0 if s.size == 0 or s[0] == 0 else int(np.count_nonzero(s > tol * s[0]))
        return [vh[i] for i in range(r, m.cols)]
    one, zero = _one_zero(m.domain)
    if m.rows == 0:
        return [[one if i == j else zero for i in range(m.cols)]
                for j in range(m.cols)]
    red, pivots = _rref(m.entries)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * m.cols
        v[f] = one
        for r, c in enumerate(pivots):
            v[c] = -red[r][f]
        basis.append(v)
    return basis


def solve_right_inverse(m: Matrix) -> Matrix:
    """Inverse of a square matrix over a field domain."""
    _require_field(m)
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    n = m.rows
    one, zero = _one_zero(m.domain)
    aug = [list(row) + [one if i == j else zero for j in range(n)]
           for i, row in enumerate(m.entries)]
    red, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return Matrix([row[n:] for row in red], m.domain)


def specialize(m: Matrix, t0) -> Matrix:
    """Entrywise evaluation of a laurent/ratfunc matrix at a nonzero rational."""
    t0 = rat(t0)
    if m.domain not in ("laurent", "ratfunc"):
        raise DomainMismatch("specialize expects laurent or ratfunc entries")
    if t0 == 0:
        raise SpecializationError("t0 = 0 is outside the invertible-holonomy domain")
    out = []
    for i, row in enumerate(m.entries):
        new = []
        for j, x in enumerate(row):
            try:
                new.append(x(t0))
            except ZeroDivisionError:
                raise SpecializationError(
                    "entry (%d, %d) = %s has a pole at t = %s" % (i, j, x, t0))
        out.append(new)
    return Matrix(out, "rational", cols=m.cols)


def elementary_divisors(m: Matrix):
    """Invariant factors of a Laurent-polynomial matrix, in divisibility order.

    Units (rational scalars and powers of t) are stripped: each divisor is
    monic with lowest exponent 0.  The list length is the generic rank.
    """
    if m.domain != "laurent":
        raise DomainMismatch("elementary divisors need laurent entries")
    work = [[x for x in row] for row in m.entries]
    nonzero_vals = [x.valuation() for row in work for x in row if x]
    if not nonzero_vals:
        return []
    shift = -min(nonzero_vals)
    work = [[x.shift(shift) if x else x for x in row] for row in work]
    nr, nc = m.rows, m.cols
    divisors = []
    r = 0
    while r < min(nr, nc):
        pos = None
        best = None
        for i in range(r, nr):
            for j in range(r, nc):
                if work[i][j]:
                    d = work[i][j].degree()
                    if best is None or d < best:
                        best, pos = d, (i, j)
        if pos is None:
            break
        i0, j0 = pos
        work[r], work[i0] = work[i0], work[r]
        for row in work:
            row[r], row[j0] = row[j0], row[r]
        while True:
            pivot = work[r][r]
            disturbed = False
            for i in range(r + 1, nr):
                if work[i][r]:
                    q, rem = work[i][r].divmod_poly(pivot)
                    for j in range(r, nc):
                        work[i][j] = work[i][j] - q * work[r][j]
                    if rem:
                        work[r], work[i] = work[i], work[r]
                        disturbed = True
                        break
            if disturbed:
                continue
            for j in range(r + 1, nc):
                if work[r][j]:
                    q, rem = work[r][j].divmod_poly(pivot)
                    for i in range(r, nr):
                        work[i][j] = work[i][j] - q * work[i][r]
                    if rem:
                        for i in range(r, nr):
                            work[i][r], work[i][j] = work[i][j], work[i][r]
                        disturbed = True
                        break
            if disturbed:
                continue
            offender = None
            for i in range(r + 1, nr):
                for j in range(r + 1, nc):
                    if work[i][j]:
                        _, rem = work[i][j].divmod_poly(pivot)
                        if rem:
                            offender = i
                            break
                if offender is not None:
                    break
            if offender is None:
                break
            for j in range(r, nc):
                work[r][j] = work[r][j] + work[offender][j]
        divisors.append(work[r][r].unit_normalized())
        r += 1
    return divisors


def minor_gcd(m: Matrix, k: int) -> LaurentPoly:
    """gcd of all k x k minors, monic with lowest exponent 0 (0 if rank < k)."""
    if not 1 <= k <= min(m.rows, m.cols):
        raise ValueError("k out of range")
    div = elementary_divisors(m)
    if len(div) < k:
        return LaurentPoly({})
    prod = LaurentPoly.const(1)
    for d in div[:k]:
        prod = prod * d
    return prod.unit_normalized()


def pseudo_inverse_apply(m, v) -> np.ndarray:
    """Minimum-norm least-squares solution of m @ x = v (floats)."""
    a = m.to_float() if isinstance(m, Matrix) else np.asarray(m, dtype=float)
    b = np.asarray(v, dtype=float)
    if a.size == 0:
        return np.zeros(a.shape[1] if a.ndim == 2 else 0)
    x, _, _, _ = np.linalg.lstsq(a, b, rcond=None)
    return x
