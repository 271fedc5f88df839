"""Exact arithmetic in cyclotomic fields.

Elements of Q(zeta_M) are stored as a polynomial in zeta_M reduced modulo the
M-th cyclotomic polynomial (power basis), always at the smallest conductor M
for which the element lies in Q(zeta_M).  Two scalars are equal iff their
conductors and reduced polynomials coincide.
"""

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd

import flint
import mpmath
from sympy import factorint

MAX_CONDUCTOR = 10**5


class ConductorError(ValueError):
    pass


@lru_cache(maxsize=None)
def _phi_poly(m):
    return flint.fmpq_poly(flint.fmpz_poly.cyclotomic(m).coeffs())


@lru_cache(maxsize=None)
def _primes(m):
    return tuple(sorted(factorint(m)))


@lru_cache(maxsize=4096)
def _monomial(m, k):
    """zeta_m^k reduced modulo Phi_m."""
    k %= m
    p = flint.fmpq_poly([0] * k + [1])
    return p % _phi_poly(m)


def _to_fraction(c):
    return Fraction(int(c.p), int(c.q))


def _lift(poly, m, big):
    """Rewrite a polynomial in zeta_m as one in zeta_big (m | big)."""
    if m == big:
        return poly
    step = big // m
    coeffs = poly.coeffs()
    out = [0] * (step * (len(coeffs) - 1) + 1) if coeffs else []
    for i, c in enumerate(coeffs):
        out[i * step] = c
    return flint.fmpq_poly(out) % _phi_poly(big)


def _halve(poly, m):
    """Q(zeta_m) = Q(zeta_{m/2}) when m = 2 (mod 4)."""
    h = m // 2
    # zeta_m = -zeta_h^((h+1)/2)
    e = (h + 1) // 2
    out = flint.fmpq_poly([])
    root = -_monomial(h, e)
    for i, c in enumerate(poly.coeffs()):
        if c != 0:
            out += c * _pow_mod(root, i, h)
    return out % _phi_poly(h)


def _pow_mod(x, n, m):
    r = flint.fmpq_poly([1])
    phi = _phi_poly(m)
    while n:
        if n & 1:
            r = (r * x) % phi
        x = (x * x) % phi
        n >>= 1
    return r


def _descend(poly, m, p):
    """Return the polynomial over zeta_{m/p} if the element lies in that
    subfield, else None."""
    coeffs = poly.coeffs()
    small = m // p
    if small % p == 0:
        # {zeta^r : r < p} is a basis over the subfield
        if any(c != 0 for i, c in enumerate(coeffs) if i % p):
            return None
        return flint.fmpq_poly(coeffs[::p])
    # coprime case: zeta_m = y^u z^w with y = zeta_small, z = zeta_p
    u = pow(p, -1, small) if small > 1 else 0
    w = pow(small, -1, p)
    parts = [[0] * small for _ in range(p)]
    for k, c in enumerate(coeffs):
        if c != 0:
            parts[(w * k) % p][(u * k) % small if small > 1 else 0] += c
    top = parts[p - 1]
    phi = _phi_poly(small)
    for j in range(1, p - 1):
        pj = flint.fmpq_poly([a - b for a, b in zip(parts[j], top)]) % phi
        if not pj.is_zero():
            return None
    return flint.fmpq_poly([a - b for a, b in zip(parts[0], top)]) % phi


def _minimize(poly, m):
    if poly.is_zero():
        return flint.fmpq_poly([]), 1
    changed = True
    while changed and m > 1:
        changed = False
        if m % 4 == 2:
            poly, m = _halve(poly, m), m // 2
            changed = True
            continue
        for p in _primes(m):
            got = _descend(poly, m, p)
            if got is not None:
                poly, m = got, m // p
                changed = True
                break
    return poly, m


class CycloScalar:
    """Element of the cyclotomic field Q(zeta_M), zeta_M = exp(2 pi i / M)."""

    __slots__ = ("conductor", "poly", "_hash")

    def __init__(self, conductor, poly, _normalized=False):
        if conductor > MAX_CONDUCTOR:
            raise ConductorError(f"conductor {conductor} exceeds cap {MAX_CONDUCTOR}")
        if not _normalized:
            poly = poly % _phi_poly(conductor)
            poly, conductor = _minimize(poly, conductor)
        self.conductor = conductor
        self.poly = poly
        self._hash = None

    # constructors
    @classmethod
    def rational(cls, r):
        r = Fraction(r)
        return cls(1, flint.fmpq_poly([flint.fmpq(r.numerator, r.denominator)]), True)

    @classmethod
    def root_of_unity(cls, m, k=1):
        """zeta_m^k"""
        k %= m
        g = gcd(k, m) if k else m
        m2, k2 = m // g, k // g
        return cls(m2, _monomial(m2, k2))

    @classmethod
    def from_coeffs(cls, m, coeffs):
        """sum_k coeffs[k] zeta_m^k for a dict or list of rationals."""
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        acc = [0] * m
        for k, c in items:
            c = Fraction(c)
            acc[k % m] += c
        poly = flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in acc])
        return cls(m, poly)

    zero = None  # set below
    one = None

    # structure
    def is_zero(self):
        return self.poly.is_zero()

    def is_rational(self):
        return self.conductor == 1

    def to_fraction(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        c = self.poly.coeffs()
        return _to_fraction(c[0]) if c else Fraction(0)

    def coefficients(self):
        """Dict exponent -> Fraction in the power basis of the minimal conductor."""
        return {k: _to_fraction(c) for k, c in enumerate(self.poly.coeffs()) if c != 0}

    def _common(self, other):
        if not isinstance(other, CycloScalar):
            other = CycloScalar.rational(other)
        m = self.conductor * other.conductor // gcd(self.conductor, other.conductor)
        if m > MAX_CONDUCTOR:
            raise ConductorError(f"conductor {m} exceeds cap {MAX_CONDUCTOR}")
        return m, _lift(self.poly, self.conductor, m), _lift(other.poly, other.conductor, m)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and self.conductor == 1:
            return CycloScalar.rational(self.to_fraction() + other)
        m, a, b = self._common(other)
        return CycloScalar(m, a + b)

    __radd__ = __add__

    def __neg__(self):
        return CycloScalar(self.conductor, -self.poly, True)

    def __sub__(self, other):
        return self + (-other if isinstance(other, CycloScalar) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return CycloScalar.zero
            f = Fraction(other)
            return CycloScalar(self.conductor, self.poly * flint.fmpq(f.numerator, f.denominator), True)
        m, a, b = self._common(other)
        return CycloScalar(m, a * b)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic scalar")
        m = self.conductor
        g, s, _ = self.poly.xgcd(_phi_poly(m))
        # g is a nonzero constant because Phi_m is irreducible
        return CycloScalar(m, s / g.coeffs()[0])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        r = CycloScalar.one
        x = self
        while n:
            if n & 1:
                r = r * x
            x = x * x
            n >>= 1
        return r

    def conjugate(self):
        m = self.conductor
        out = flint.fmpq_poly([])
        for k, c in enumerate(self.poly.coeffs()):
            if c != 0:
                out += c * _monomial(m, -k)
        return CycloScalar(m, out)

    def galois(self, a):
        """Image under zeta_M -> zeta_M^a, gcd(a, M) = 1."""
        m = self.conductor
        out = flint.fmpq_poly([])
        for k, c in enumerate(self.poly.coeffs()):
            if c != 0:
                out += c * _monomial(m, a * k)
        return CycloScalar(m, out)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloScalar.rational(other)
        if not isinstance(other, CycloScalar):
            return NotImplemented
        return self.conductor == other.conductor and self.poly == other.poly

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.conductor, tuple(str(c) for c in self.poly.coeffs())))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"CycloScalar({to_string(self)!r})"

    def __str__(self):
        return to_string(self)

    def __complex__(self):
        return to_complex(self)


CycloScalar.zero = CycloScalar(1, flint.fmpq_poly([]), True)
CycloScalar.one = CycloScalar(1, flint.fmpq_poly([1]), True)


def cyclo_normalize(x):
    """Canonical representative (scalars are kept canonical, so a fresh
    normalization pass is idempotent)."""
    return CycloScalar(x.conductor, x.poly)


def cyclo_arith(x, y=None, op="add"):
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "neg":
        return -x
    if op == "inv":
        return x.inverse()
    raise ValueError(f"unknown op {op!r}")


def zeta(m, k=1):
    return CycloScalar.root_of_unity(m, k)


def exp_2pi_i(r):
    """exp(2 pi i r) for rational r."""
    r = Fraction(r)
    return zeta(r.denominator, r.numerator)


@lru_cache(maxsize=None)
def _sqrt_prime(p):
    if p == 2:
        return zeta(8) + zeta(8, -1)
    g = CycloScalar.zero
    acc = {}
    for a in range(1, p):
        acc[a] = 1 if pow(a, (p - 1) // 2, p) == 1 else -1
    g = CycloScalar.from_coeffs(p, acc)
    # Gauss: g = sqrt(p) for p = 1 mod 4 and i*sqrt(p) for p = 3 mod 4
    if p % 4 == 1:
        return g
    return g * zeta(4, -1)


def sqrt_int_embed(d):
    """Principal square root of a nonzero integer as a cyclotomic scalar."""
    d = int(d)
    if d == 0:
        raise ValueError("sqrt_int_embed(0) is not supported")
    out = CycloScalar.one if d > 0 else zeta(4)
    square = 1
    for p, e in factorint(abs(d)).items():
        square *= p ** (e // 2)
        if e % 2:
            out = out * _sqrt_prime(p)
    return out * square


def sqrt_rational(r):
    """Principal square root of a nonzero rational."""
    r = Fraction(r)
    return sqrt_int_embed(r.numerator * r.denominator) / r.denominator


def to_complex(x, precision=53):
    with mpmath.workprec(max(precision, 53) + 10):
        m = x.conductor
        s = mpmath.mpc(0)
        for k, c in enumerate(x.poly.coeffs()):
            if c != 0:
                s += mpmath.mpf(int(c.p)) / int(c.q) * mpmath.expjpi(mpmath.mpf(2 * k) / m)
        return complex(s)


def to_mpc(x):
    m = x.conductor
    s = mpmath.mpc(0)
    for k, c in enumerate(x.poly.coeffs()):
        if c != 0:
            s += mpmath.mpf(int(c.p)) / int(c.q) * mpmath.expjpi(mpmath.mpf(2 * k) / m)
    return s


def to_string(x):
    if x.is_zero():
        return "0"
    m = x.conductor
    parts = []
    for k, c in sorted(x.coefficients().items()):
        mag = abs(c)
        coef = str(mag)
        if k == 0:
            term = coef
        elif mag == 1:
            term = f"z{{{m}}}^{k}"
        else:
            term = f"{coef}*z{{{m}}}^{k}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, term))
    s0, t0 = parts[0]
    out = ("-" if s0 == "-" else "") + t0
    for s, t in parts[1:]:
        out += f" {s} {t}"
    return out


_TERM = re.compile(
    r"^(?:(?P<coef>\d+(?:/\d+)?)\s*\*?\s*)?(?:z\{(?P<m>\d+)\}(?:\^(?P<k>-?\d+))?)?$"
)


def parse_scalar(text):
    """Inverse of to_string; terms may mix conductors."""
    text = text.strip()
    if not text:
        raise ValueError("empty scalar")
    tokens = re.split(r"\s*([+-])\s*", text)
    if tokens[0] == "":
        tokens = tokens[1:]
    else:
        tokens = ["+"] + tokens
    total = CycloScalar.zero
    for sign, body in zip(tokens[::2], tokens[1::2]):
        mt = _TERM.match(body.strip())
        if not mt or (mt.group("coef") is None and mt.group("m") is None):
            raise ValueError(f"cannot parse term {body!r}")
        coef = Fraction(mt.group("coef")) if mt.group("coef") else Fraction(1)
        if mt.group("m"):
            term = zeta(int(mt.group("m")), int(mt.group("k") or 1)) * coef
        else:
            term = CycloScalar.rational(coef)
        total = total + term if sign == "+" else total - term
    return total
