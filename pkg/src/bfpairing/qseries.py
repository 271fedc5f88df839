"""Truncated Fourier expansions with rational exponents.

Exponents are absolute: a term (e, c) stands for c * exp(2 pi i e tau).  The
cusp width is carried as metadata only.  Every expansion knows the bound
below which it is complete; reading at or beyond it raises.
"""

import cmath
import json
from fractions import Fraction
from math import lcm

from .exact_arith import CycloScalar, exp_2pi_i, parse_scalar, to_complex, to_string


class TruncationError(ValueError):
    pass


def _cs(c):
    return c if isinstance(c, CycloScalar) else CycloScalar.rational(c)


class QExpansion:
    __slots__ = ("terms", "bound", "width")

    def __init__(self, terms, bound, width=1):
        bound = Fraction(bound)
        clean = {}
        for e, c in terms.items():
            e = Fraction(e)
            c = _cs(c)
            if e < bound and not c.is_zero():
                clean[e] = c
        self.terms = clean
        self.bound = bound
        self.width = Fraction(width)

    @classmethod
    def zero(cls, bound, width=1):
        return cls({}, bound, width)

    @classmethod
    def monomial(cls, e, c=1, bound=None, width=1):
        e = Fraction(e)
        return cls({e: c}, bound if bound is not None else e + 1, width)

    @property
    def denominator(self):
        return lcm(1, *(e.denominator for e in self.terms))

    def exponents(self):
        return sorted(self.terms)

    def valuation(self):
        return min(self.terms) if self.terms else None

    def is_zero(self):
        return not self.terms

    def coefficient(self, e):
        e = Fraction(e)
        if e >= self.bound:
            raise TruncationError(f"exponent {e} not below truncation bound {self.bound}")
        return self.terms.get(e, CycloScalar.zero)

    def truncate(self, bound):
        bound = Fraction(bound)
        if bound > self.bound:
            raise TruncationError(f"cannot extend bound {self.bound} to {bound}")
        return QExpansion(self.terms, bound, self.width)

    def __add__(self, other):
        if not isinstance(other, QExpansion):
            other = QExpansion({0: other}, self.bound, self.width)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return QExpansion(out, min(self.bound, other.bound), self.width)

    __radd__ = __add__

    def __neg__(self):
        return QExpansion({e: -c for e, c in self.terms.items()}, self.bound, self.width)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = _cs(c)
        if c.is_zero():
            return QExpansion.zero(self.bound, self.width)
        return QExpansion({e: v * c for e, v in self.terms.items()}, self.bound, self.width)

    def __mul__(self, other):
        if not isinstance(other, QExpansion):
            return self.scale(other)
        bound = _product_bound(self, other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if e < bound:
                    t = c1 * c2
                    out[e] = out[e] + t if e in out else t
        return QExpansion(out, bound, self.width)

    __rmul__ = __mul__

    def shift(self, e):
        """Multiply by q^e."""
        e = Fraction(e)
        return QExpansion({k + e: c for k, c in self.terms.items()}, self.bound + e, self.width)

    def rescale(self, s):
        """f(tau) -> f(s tau) for rational s > 0."""
        s = Fraction(s)
        if s <= 0:
            raise ValueError("rescale factor must be positive")
        return QExpansion({e * s: c for e, c in self.terms.items()}, self.bound * s, self.width)

    def translate(self, b):
        """f(tau) -> f(tau + b) for rational b."""
        b = Fraction(b)
        return QExpansion({e: c * exp_2pi_i(e * b) for e, c in self.terms.items()}, self.bound, self.width)

    def substitute(self, a, b, d):
        """f(tau) -> f((a tau + b) / d), a, d > 0."""
        s, t = Fraction(a, d), Fraction(b, d)
        if s <= 0:
            raise ValueError("need a, d > 0")
        return QExpansion({e * s: c * exp_2pi_i(e * t) for e, c in self.terms.items()},
                          self.bound * s, self.width)

    def with_width(self, w):
        return QExpansion(self.terms, self.bound, w)

    def conjugate_coefficients(self):
        return QExpansion({e: c.conjugate() for e, c in self.terms.items()}, self.bound, self.width)

    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        b = min(self.bound, other.bound)
        a1 = {e: c for e, c in self.terms.items() if e < b}
        a2 = {e: c for e, c in other.terms.items() if e < b}
        return a1 == a2

    def __repr__(self):
        def coef(c):
            t = str(c)
            return f"({t})" if " " in t else t

        shown = ", ".join(f"{coef(c)}*q^{e}" for e, c in sorted(self.terms.items())[:6])
        more = " + ..." if len(self.terms) > 6 else ""
        return f"QExpansion({shown}{more}; bound={self.bound})"

    def to_complex(self, tau):
        """Numerical value of the truncated sum at tau (validation only)."""
        return sum(to_complex(c) * cmath.exp(2j * cmath.pi * float(e) * tau) for e, c in self.terms.items())

    def to_json(self):
        return {
            "width": str(self.width),
            "denominator": self.denominator,
            "terms": [[e.numerator, e.denominator, to_string(c)] for e, c in sorted(self.terms.items())],
            "bound": str(self.bound),
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        terms = {Fraction(n, d): parse_scalar(s) for n, d, s in data["terms"]}
        return cls(terms, Fraction(data["bound"]), Fraction(data["width"]))


def _product_bound(f, g):
    cands = []
    mg = g.valuation() if g.terms else None
    mf = f.valuation() if f.terms else None
    if mg is not None:
        cands.append(f.bound + mg)
    if mf is not None:
        cands.append(g.bound + mf)
    if not cands:
        # both zero: product is zero up to the sum of bounds is unknowable;
        # stay pessimistic
        return min(f.bound, g.bound)
    return min(cands)


def qexp_add(f, g):
    return f + g


def qexp_mul(f, g):
    return f * g


def principal_part(f):
    """Terms with exponent <= 0 (the constant term is kept on purpose)."""
    if f.bound <= 0:
        raise TruncationError("expansion does not reach the constant term")
    return QExpansion({e: c for e, c in f.terms.items() if e <= 0}, f.bound, f.width)


def coefficient(f, e):
    return f.coefficient(e)


def series_divide(f, g, bound=None):
    """f / g by long division; g must have a nonzero leading term."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero series")
    e0 = g.valuation()
    g0inv = g.terms[e0].inverse()
    # quotient is complete below min(f.bound - e0, g.bound - e0 + val(q))
    rest = dict(f.terms)
    limit = f.bound - e0
    if f.terms:
        limit = min(limit, g.bound - e0 + (f.valuation() - e0))
    if bound is not None:
        limit = min(limit, Fraction(bound))
    quot = {}
    while rest:
        e = min(rest)
        qe = e - e0
        if qe >= limit:
            break
        c = rest.pop(e) * g0inv
        quot[qe] = c
        for ge, gc in g.terms.items():
            if ge == e0:
                continue
            k = qe + ge
            if k - e0 >= limit:
                continue
            t = gc * c
            if k in rest:
                v = rest[k] - t
                if v.is_zero():
                    del rest[k]
                else:
                    rest[k] = v
            else:
                rest[k] = -t
    return QExpansion(quot, limit, f.width)
