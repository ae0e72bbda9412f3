"""Exact scalar domains.

Everything downstream is generic over four coefficient domains:

* ``Fraction``            -- exact rationals (stdlib),
* ``LaurentPoly``         -- Laurent polynomials in one indeterminate t,
* ``RationalFunction``    -- reduced quotients of Laurent polynomials,
* ``GaussianRational``    -- a + b*i with rational a, b (exact complex scalars),

plus plain ``float`` for the numerical Hodge path.
"""

from __future__ import annotations

from fractions import Fraction


def rat(x) -> Fraction:
    """Coerce an int, a 'p/q' string or a Fraction to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError("cannot interpret %r as a rational number" % (x,))


class LaurentPoly:
    """Laurent polynomial sum_k c_k t^k with Fraction coefficients.

    Stored as an exponent -> coefficient map with no zero coefficients;
    the zero polynomial is the empty map.  Immutable.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                v = rat(v) if not isinstance(v, Fraction) else v
                if v:
                    c[int(k)] = v
        object.__setattr__(self, "c", c)

    def __setattr__(self, *a):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def const(cls, a):
        return cls({0: rat(a)})

    @classmethod
    def t(cls, k=1):
        return cls({k: Fraction(1)})

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def valuation(self):
        if not self.c:
            raise ValueError("zero polynomial has no valuation")
        return min(self.c)

    def degree(self):
        if not self.c:
            raise ValueError("zero polynomial has no degree")
        return max(self.c)

    def leading_coeff(self):
        return self.c[self.degree()]

    def shift(self, k):
        """Multiply by t^k."""
        return LaurentPoly({e + k: v for e, v in self.c.items()})

    def __add__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.c)
        for e, v in other.c.items():
            w = out.get(e, Fraction(0)) + v
            if w:
                out[e] = w
            else:
                out.pop(e, None)
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -v for e, v in self.c.items()})

    def __sub__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _as_laurent(other) + (-self)

    def __mul__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        out = {}
        for e1, v1 in self.c.items():
            for e2, v2 in other.c.items():
                e = e1 + e2
                w = out.get(e, Fraction(0)) + v1 * v2
                if w:
                    out[e] = w
                else:
                    out.pop(e, None)
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers of a general Laurent polynomial")
        out = LaurentPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __call__(self, t0):
        """Evaluate at a rational t0 (t0 != 0 required when negative powers occur)."""
        t0 = rat(t0)
        if t0 == 0 and self.c and min(self.c) < 0:
            raise ZeroDivisionError("evaluation at 0 with negative exponents")
        return sum((v * t0 ** e for e, v in self.c.items()), Fraction(0))

    def unit_normalized(self):
        """Divide by the unit lead*t^valuation: monic with lowest exponent 0."""
        if not self.c:
            return self
        v = self.valuation()
        lead = self.c[self.degree()]
        return LaurentPoly({e - v: w / lead for e, w in self.c.items()})

    def divmod_poly(self, other):
        """Long division in Q[t]; both operands must have valuation >= 0."""
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        if (self.c and self.valuation() < 0) or other.valuation() < 0:
            raise ValueError("divmod_poly needs ordinary polynomials")
        rem = dict(self.c)
        quo = {}
        dd, dl = other.degree(), other.leading_coeff()
        while rem and max(rem) >= dd:
            e = max(rem)
            f = rem[e] / dl
            quo[e - dd] = f
            for k, v in other.c.items():
                w = rem.get(e - dd + k, Fraction(0)) - f * v
                if w:
                    rem[e - dd + k] = w
                else:
                    rem.pop(e - dd + k, None)
        return LaurentPoly(quo), LaurentPoly(rem)

    def exact_div(self, other):
        """Exact division in the Laurent ring; raises if not divisible."""
        if not other:
            raise ZeroDivisionError
        if not self:
            return self
        sv, ov = self.valuation(), other.valuation()
        q, r = self.shift(-sv).divmod_poly(other.shift(-ov))
        if r:
            raise ValueError("not divisible")
        return q.shift(sv - ov)

    @staticmethod
    def gcd(a, b):
        """Unit-normalized gcd in the Laurent ring (t-power factors stripped)."""
        a, b = _as_laurent(a), _as_laurent(b)
        if not a:
            return b.unit_normalized() if b else b
        if not b:
            return a.unit_normalized()
        a = a.unit_normalized()
        b = b.unit_normalized()
        while b:
            _, r = a.divmod_poly(b)
            a, b = b, (r.unit_normalized() if r else r)
        return a.unit_normalized()

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for e in sorted(self.c):
            v = self.c[e]
            if e == 0:
                term = str(v)
            else:
                mag = "t" if e == 1 else "t^%d" % e
                if v == 1:
                    term = mag
                elif v == -1:
                    term = "-" + mag
                else:
                    term = "%s*%s" % (v, mag)
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            out += " - " + term[1:] if term.startswith("-") else " + " + term
        return out

    def __repr__(self):
        return "LaurentPoly(%r)" % (self.c,)


def _as_laurent(x):
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly({0: Fraction(x)})
    return NotImplemented


class RationalFunction:
    """Reduced quotient num/den of Laurent polynomials.

    The denominator is nonzero, unit-normalized (monic, lowest exponent 0)
    and coprime to the numerator, so equality is literal equality of parts.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _coerce_laurent(num)
        den = LaurentPoly.const(1) if den is None else _coerce_laurent(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num:
            object.__setattr__(self, "num", LaurentPoly({}))
            object.__setattr__(self, "den", LaurentPoly.const(1))
            return
        g = LaurentPoly.gcd(num, den)
        if g != LaurentPoly.const(1):
            num = num.exact_div(g)
            den = den.exact_div(g)
        dn = den.unit_normalized()
        # unit u with den = u * dn; divide num by the same unit
        lead = den.leading_coeff()
        val = den.valuation()
        num = LaurentPoly({e - val: v / lead for e, v in num.c.items()})
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", dn)

    def __setattr__(self, *a):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def t(cls):
        return cls(LaurentPoly.t())

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def __add__(self, other):
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _as_ratfunc(other) + (-self)

    def __mul__(self, other):
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        if not other:
            raise ZeroDivisionError
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_ratfunc(other) / self

    def __eq__(self, other):
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, t0):
        t0 = rat(t0)
        d = self.den(t0)
        if d == 0:
            raise ZeroDivisionError("pole at t = %s" % t0)
        return self.num(t0) / d

    def __str__(self):
        if self.den == LaurentPoly.const(1):
            return str(self.num)
        return "(%s)/(%s)" % (self.num, self.den)

    def __repr__(self):
        return "RationalFunction(%r, %r)" % (self.num.c, self.den.c)


def _coerce_laurent(x):
    y = _as_laurent(x)
    if y is NotImplemented:
        raise TypeError("expected a Laurent polynomial, got %r" % (x,))
    return y


def _as_ratfunc(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (int, Fraction, LaurentPoly)):
        return RationalFunction(_coerce_laurent(x))
    return NotImplemented


class GaussianRational:
    """Exact complex scalar a + b*i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", rat(re))
        object.__setattr__(self, "im", rat(im))

    def __setattr__(self, *a):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def i(cls):
        return cls(0, 1)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def is_zero(self):
        return not (self.re or self.im)

    def __bool__(self):
        return bool(self.re or self.im)

    def __add__(self, other):
        other = _as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        other = _as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_gaussian(other) - self

    def __mul__(self, other):
        other = _as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError
        return GaussianRational((self.re * other.re + self.im * other.im) / n,
                                (self.im * other.re - self.re * other.im) / n)

    def __rtruediv__(self, other):
        return _as_gaussian(other) / self

    def __eq__(self, other):
        other = _as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return "%s*i" % self.im
        sign = "+" if self.im > 0 else "-"
        return "%s %s %s*i" % (self.re, sign, abs(self.im))

    def __repr__(self):
        return "GaussianRational(%r, %r)" % (str(self.re), str(self.im))


def _as_gaussian(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x, 0)
    return NotImplemented


def rational_roots(p: LaurentPoly):
    """All rational roots t0 != 0 of p, via the rational root bound.

    The t^k unit factor is stripped first, so t0 = 0 never appears.
    """
    if not p:
        raise ValueError("zero polynomial has every rational as a root")
    q = p.unit_normalized()
    if q.degree() == 0:
        return []
    denom_lcm = 1
    for v in q.c.values():
        denom_lcm = denom_lcm * v.denominator // _gcd(denom_lcm, v.denominator)
    ic = {e: int(v * denom_lcm) for e, v in q.c.items()}
    c0 = ic.get(0)
    lead = ic[max(ic)]
    roots = set()
    for pnum in _divisors(abs(c0)):
        for qden in _divisors(abs(lead)):
            for cand in (Fraction(pnum, qden), Fraction(-pnum, qden)):
                if q(cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)
