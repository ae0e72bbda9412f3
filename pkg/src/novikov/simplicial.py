"""Rank-one local systems on finite simplicial complexes.

Holonomy is t^{a(e)} for an integer 1-cocycle a; twisted coboundaries are
Laurent-polynomial matrices in the transport-to-first-vertex convention

    (delta c)(v0..v_{k+1}) = t^{a(v0 v1)} c(v1..v_{k+1})
                             + sum_{i>=1} (-1)^i c(v0..\hat v_i..v_{k+1}).

Any consistent convention yields isomorphic cohomology; the gauge-invariance
tests guard the choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactlinalg import Matrix, kernel_basis, minor_gcd, rank, specialize
from .profile import BettiProfile
from .scalars import LaurentPoly, rat, rational_roots


class CocycleError(ValueError):
    pass


class SimplicialComplex:
    """Closure-complete complex of dimension <= 3 with ordered vertex labels."""

    def __init__(self, vertices, simplices):
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        self.index = {v: i for i, v in enumerate(self.vertices)}
        by_dim = {0: {(i,) for i in range(len(self.vertices))}}
        for simplex in simplices:
            idx = tuple(sorted(self.index[str(v)] for v in simplex))
            if len(set(idx)) != len(idx):
                raise ValueError("degenerate simplex %r" % (simplex,))
            if len(idx) - 1 > 3:
                raise ValueError("dimension > 3 not supported")
            # auto-close: every subset is a face
            stack = [idx]
            while stack:
                cur = stack.pop()
                k = len(cur) - 1
                if cur in by_dim.setdefault(k, set()):
                    continue
                by_dim[k].add(cur)
                if k > 0:
                    for drop in range(len(cur)):
                        stack.append(cur[:drop] + cur[drop + 1:])
        self.dim = max(by_dim)
        self.simplices = {k: tuple(sorted(by_dim.get(k, ())))
                          for k in range(self.dim + 1)}

    def f_vector(self):
        return tuple(len(self.simplices[k]) for k in range(self.dim + 1))

    def euler_characteristic(self):
        return sum((-1) ** k * len(self.simplices[k]) for k in range(self.dim + 1))

    def labels(self, simplex):
        return tuple(self.vertices[i] for i in simplex)

    def component_count(self):
        parent = list(range(len(self.vertices)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (u, v) in self.simplices.get(1, ()):
            parent[find(u)] = find(v)
        return len({find(i) for i in range(len(self.vertices))})


class IntegerCocycle:
    """Integer weight per oriented edge; a(v0 v1) + a(v1 v2) = a(v0 v2) enforced."""

    def __init__(self, complex_: SimplicialComplex, values):
        self.K = complex_
        vals = {}
        for (u, v), w in values.items():
            iu, iv = complex_.index[str(u)], complex_.index[str(v)]
            if iu == iv:
                raise CocycleError("self-loop weight on vertex %r" % (u,))
            if iu > iv:
                iu, iv, w = iv, iu, -w
            if (iu, iv) not in set(complex_.simplices.get(1, ())):
                raise CocycleError("weight on a missing edge (%s, %s)" % (u, v))
            vals[(iu, iv)] = int(w)
        self.values = {e: vals.get(e, 0) for e in complex_.simplices.get(1, ())}
        for tri in complex_.simplices.get(2, ()):
            i, j, k = tri
            if self.a(i, j) + self.a(j, k) != self.a(i, k):
                raise CocycleError(
                    "cocycle condition fails on triangle %s"
                    % (complex_.labels(tri),))

    def a(self, i, j):
        if i == j:
            return 0
        if i < j:
            return self.values.get((i, j), 0)
        return -self.values.get((j, i), 0)

    def shifted(self, potential):
        """Gauge shift a -> a + delta0(g) for an integer 0-cochain g."""
        g = {self.K.index[str(v)]: int(x) for v, x in potential.items()}
        new = {}
        for (i, j), w in self.values.items():
            new[(self.K.vertices[i], self.K.vertices[j])] = (
                w + g.get(j, 0) - g.get(i, 0))
        return IntegerCocycle(self.K, new)


@dataclass(frozen=True)
class TwistedCochainComplex:
    K: SimplicialComplex
    cocycle: IntegerCocycle
    coboundaries: tuple  # Matrix over laurent for k = 0..dim-1


def build_twisted_complex(K: SimplicialComplex,
                          a: IntegerCocycle) -> TwistedCochainComplex:
    """Coboundary matrices with holonomy t^{a(e)} on the leading face."""
    mats = []
    for k in range(K.dim):
        src = K.simplices[k]
        dst = K.simplices[k + 1]
        pos = {s: i for i, s in enumerate(src)}
        rows = [[LaurentPoly({}) for _ in src] for _ in dst]
        for r, simplex in enumerate(dst):
            for drop in range(len(simplex)):
                face = simplex[:drop] + simplex[drop + 1:]
                if drop == 0:
                    coeff = LaurentPoly({a.a(simplex[0], simplex[1]): Fraction(1)})
                else:
                    coeff = LaurentPoly.const((-1) ** drop)
                col = pos[face]
                rows[r][col] = rows[r][col] + coeff
        mats.append(Matrix(rows, "laurent"))
    for low, high in zip(mats, mats[1:]):
        comp = high.matmul(low)
        if any(x for row in comp.entries for x in row):
            raise AssertionError("coboundaries do not compose to zero")
    return TwistedCochainComplex(K, a, tuple(mats))


def betti(K: SimplicialComplex, a: IntegerCocycle, t0=None,
          complex_=None) -> BettiProfile:
    """Exact twisted Betti numbers: generic over Q(t) if t0 is None."""
    tc = complex_ or build_twisted_complex(K, a)
    ranks = []
    for m in tc.coboundaries:
        if t0 is None:
            ranks.append(rank(m.to_ratfunc()))
        else:
            ranks.append(rank(specialize(m, rat(t0))))
    ranks.append(0)
    dims = []
    f = K.f_vector()
    for k in range(K.dim + 1):
        below = ranks[k - 1] if k else 0
        dims.append(f[k] - ranks[k] - below)
    twist = "generic" if t0 is None else "t0 = %s" % rat(t0)
    return BettiProfile(tuple(dims), twist,
                        "generic" if t0 is None else "specialized", f)


def jumping_locus(K: SimplicialComplex, a: IntegerCocycle, k: int):
    """Certificate polynomial and its nonzero rational roots for degree k."""
    from .cecomplex import JumpReport

    tc = build_twisted_complex(K, a)
    cert = LaurentPoly.const(1)
    zero_is_jump = False
    for kk in (k - 1, k):
        if kk < 0 or kk >= len(tc.coboundaries):
            continue
        m = tc.coboundaries[kk]
        r = rank(m.to_ratfunc())
        if r == 0:
            continue
        cert = cert * minor_gcd(m, r)
        vals = [x.valuation() for row in m.entries for x in row if x]
        shift = -min(vals) if vals and min(vals) < 0 else 0
        at_zero = Matrix([[x.shift(shift)(0) if x else Fraction(0)
                           for x in row] for row in m.entries],
                         "rational", cols=m.cols)
        zero_is_jump = zero_is_jump or rank(at_zero) < r
    roots = tuple(rational_roots(cert)) if cert.degree() > 0 else ()
    note = ("t = 0 excluded (rank drops there)" if zero_is_jump
            else "t = 0 excluded")
    return JumpReport(k, roots, cert, note)


def euler_check(K: SimplicialComplex, a: IntegerCocycle, specials=()):
    """Alternating sum of twisted betti equals the cell count identity."""
    e = K.euler_characteristic()
    rows = []
    generic = betti(K, a)
    rows.append(("generic", generic.euler, generic.euler == e))
    for t0 in specials:
        prof = betti(K, a, t0)
        rows.append((str(rat(t0)), prof.euler, prof.euler == e))
    return all(ok for _, _, ok in rows), rows


# ---------------------------------------------------------------------------
# covers

def cyclic_cover(K: SimplicialComplex, a: IntegerCocycle, m: int):
    """m-fold cyclic cover classified by a mod m.

    Vertices are (v, sheet); the lift of (v0..vk) through sheet s places v_i
    on sheet s + a(v0, v_i) mod m.  If lifting were to collide (it cannot for
    a valid simplicial base, kept as a guard), the base is barycentrically
    subdivided once first.
    """
    if m < 2:
        raise ValueError("cover fold must be >= 2")
    built = _try_build_cover(K, a, m)
    if built is None:
        K, a = subdivide(K, a)
        built = _try_build_cover(K, a, m)
        if built is None:
            raise AssertionError("cover is not simplicial even after subdivision")
    return built


def _cover_label(base_label, sheet):
    return "%s~%d" % (base_label, sheet)


def _try_build_cover(K, a, m):
    vertices = [_cover_label(v, s) for v in K.vertices for s in range(m)]
    lifted_simplices = []
    seen = {}
    for k in range(1, K.dim + 1):
        for simplex in K.simplices[k]:
            v0 = simplex[0]
            for s in range(m):
                lifted = tuple(
                    _cover_label(K.vertices[v], (s + a.a(v0, v)) % m)
                    for v in simplex)
                if len(set(lifted)) != len(lifted):
                    return None
                key = tuple(sorted(lifted))
                if seen.setdefault(key, (simplex, s)) != (simplex, s):
                    return None
                lifted_simplices.append(lifted)
    cover = SimplicialComplex(vertices, lifted_simplices)
    weights = {}
    for (i, j) in K.simplices.get(1, ()):
        w = a.values[(i, j)]
        for s in range(m):
            li = _cover_label(K.vertices[i], s)
            lj = _cover_label(K.vertices[j], (s + w) % m)
            weights[(li, lj)] = w
    cover_cocycle = IntegerCocycle(cover, weights)
    projection = {_cover_label(v, s): v for v in K.vertices for s in range(m)}
    return cover, cover_cocycle, projection


def subdivide(K: SimplicialComplex, a: IntegerCocycle):
    """One barycentric subdivision; the cocycle transports along least vertices."""
    bary_label = {}
    label_to_base = {}
    for k in range(K.dim + 1):
        for simplex in K.simplices[k]:
            label = (K.vertices[simplex[0]] if k == 0
                     else "b(%s)" % ",".join(K.labels(simplex)))
            bary_label[simplex] = label
            label_to_base[label] = simplex
    vertices = [bary_label[s] for k in range(K.dim + 1) for s in K.simplices[k]]
    flags = []
    for k in range(K.dim + 1):
        for simplex in K.simplices[k]:
            for flag in _flags(simplex):
                flags.append(tuple(bary_label[f] for f in flag))
    cover = SimplicialComplex(vertices, flags)
    weights = {}
    for (u, v) in cover.simplices.get(1, ()):
        lu, lv = cover.vertices[u], cover.vertices[v]
        su, sv = label_to_base[lu], label_to_base[lv]
        weights[(lu, lv)] = a.a(min(su), min(sv))
    return cover, IntegerCocycle(cover, weights)


def _flags(simplex):
    """All maximal chains of faces of a simplex ending at the simplex itself."""
    out = []

    def rec(chain, current):
        if len(current) == 1:
            out.append(tuple(chain + [current]))
            return
        for drop in range(len(current)):
            face = current[:drop] + current[drop + 1:]
            rec(chain + [current], face)

    rec([], tuple(simplex))
    return [tuple(reversed(f)) for f in out]


def pullback_injectivity_check(K: SimplicialComplex, a: IntegerCocycle,
                               m: int, t0, k: int):
    """Verdict for injectivity of the induced map on degree-k cohomology.

    The contract is that the verdict is always 'injective'; anything else
    flags an implementation bug, not a mathematical outcome.
    """
    t0 = rat(t0)
    cover, cover_a, projection = cyclic_cover(K, a, m)
    down = build_twisted_complex(K, a)
    up = build_twisted_complex(cover, cover_a)

    def _mat(tc, kk, width):
        if 0 <= kk < len(tc.coboundaries):
            return specialize(tc.coboundaries[kk], t0)
        return Matrix.zeros(0, width, "rational")

    f_down = K.f_vector()
    f_up = cover.f_vector()
    delta_down_k = _mat(down, k, f_down[k] if k <= K.dim else 0)
    delta_down_prev = _mat(down, k - 1, f_down[k - 1] if k >= 1 else 0)
    delta_up_prev = _mat(up, k - 1, f_up[k - 1] if k >= 1 else 0)

    closed = kernel_basis(delta_down_k)
    h_down = len(closed) - rank(delta_down_prev)

    # pullback of cochains: value on a lifted simplex = value downstairs
    src = K.simplices.get(k, ())
    dst = cover.simplices.get(k, ())
    pos = {s: i for i, s in enumerate(src)}
    p_rows = []
    for simplex in dst:
        base = tuple(sorted(K.index[projection[cover.vertices[v]]]
                            for v in simplex))
        row = [Fraction(0)] * len(src)
        row[pos[base]] = Fraction(1)
        p_rows.append(row)
    pmat = Matrix(p_rows, "rational") if dst else Matrix.zeros(0, len(src))

    pulled = [pmat.mul_vector(vec) for vec in closed]
    exact_cols = list(zip(*delta_up_prev.entries)) if delta_up_prev.rows else []
    combined = [list(col) for col in pulled] + [list(c) for c in exact_cols]
    if combined:
        big = Matrix(list(zip(*combined)), "rational")
        image_dim = rank(big) - rank(delta_up_prev)
    else:
        image_dim = 0
    injective = (image_dim == h_down)
    return {
        "injective": injective,
        "h_down": h_down,
        "h_image": image_dim,
        "fold": m,
        "t0": t0,
        "degree": k,
    }


# ---------------------------------------------------------------------------
# bundled example complexes and the text format

def circle_complex():
    """Triangle circle with one winding edge: the minimal jump example."""
    K = SimplicialComplex("012", [("0", "1"), ("1", "2"), ("0", "2")])
    a = IntegerCocycle(K, {("0", "2"): 1})
    return K, a


def torus_complex():
    """Seven-vertex triangulated torus with a cocycle dual to a generating loop."""
    verts = [str(i) for i in range(7)]
    faces = []
    for i in range(7):
        faces.append(tuple(str((i + d) % 7) for d in (0, 1, 3)))
        faces.append(tuple(str((i + d) % 7) for d in (0, 2, 3)))
    K = SimplicialComplex(verts, faces)
    weights = {}
    for (u, v) in K.simplices[1]:
        if v - u >= 4:
            weights[(K.vertices[u], K.vertices[v])] = -1
    a = IntegerCocycle(K, weights)
    return K, a


def parse_complex_text(text: str):
    """Complex file format: 'v ...' vertices, 's ...' simplices, 'w a b = n'."""
    vertices = []
    simplices = []
    weights = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "v":
            vertices.extend(toks[1:])
        elif toks[0] == "s":
            simplices.append(tuple(toks[1:]))
        elif toks[0] == "w":
            if len(toks) != 5 or toks[3] != "=":
                raise ValueError("line %d: expected 'w a b = value'" % ln)
            try:
                weights[(toks[1], toks[2])] = int(toks[4])
            except ValueError:
                raise ValueError("line %d: cocycle weights are exact integers" % ln)
        else:
            raise ValueError("line %d: unknown directive %r" % (ln, toks[0]))
    if not vertices:
        raise ValueError("no vertices declared")
    K = SimplicialComplex(vertices, simplices)
    return K, IntegerCocycle(K, weights)


def load_complex(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_complex_text(fh.read())
