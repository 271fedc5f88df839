"""Theta series of shifted lattices and unary thetas, at every cusp.

Everything that has to be moved to another cusp is written as a sum of
products of rank-one factors

    theta_{m,a,p}(K tau) = sum_{n = a mod 2m} n^p q^{K n^2 / 4m},

whose S and T laws are explicit finite Weil-type matrices.  A slash by an
arbitrary gamma is done by factoring diag(K, 1) gamma = G (A B; 0 D) with G in
SL2(Z), replaying the S/T word of G on the coefficient vector, and fixing the
square-root branch of the replay once, numerically, at tau = i.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from math import floor, gcd, isqrt, lcm

import mpmath
from sympy import Matrix, jacobi_symbol

from .exact_arith import CycloScalar, exp_2pi_i, sqrt_rational, to_mpc, zeta
from .modular_group import SL2Matrix, STWord, decompose_st, scaled_hnf
from .qseries import QExpansion, TruncationError

ONE = CycloScalar.one
ZERO = CycloScalar.zero


def kronecker(d, n):
    """Kronecker symbol (d / n)."""
    if n == 0:
        return 1 if abs(d) == 1 else 0
    out = 1
    if n < 0:
        n = -n
        if d < 0:
            out = -out
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            out = -out
    if n == 1:
        return out
    return out * jacobi_symbol(d % n, n) if gcd(d, n) == 1 else 0


# --- rank-one Weil families --------------------------------------------------


class WeilFamily:
    """The vector (theta_{m,a,p})_{a mod 2m} of weight 1/2 + p."""

    _cache = {}

    def __new__(cls, m, p=0):
        key = (int(m), int(p))
        if key not in cls._cache:
            obj = super().__new__(cls)
            obj.m, obj.p = key
            obj._s = None
            cls._cache[key] = obj
        return cls._cache[key]

    def __repr__(self):
        return f"WeilFamily(m={self.m}, p={self.p})"

    @property
    def size(self):
        return 2 * self.m

    @property
    def weight(self):
        return Fraction(1, 2) + self.p

    def t_phase(self, a, k=1):
        return exp_2pi_i(Fraction(k * a * a, 4 * self.m))

    def s_matrix(self):
        if self._s is None:
            m2 = self.size
            c = (zeta(8, -1) if self.p == 0 else zeta(8, 3)) / sqrt_rational(m2)
            self._s = [[c * zeta(m2, a * b) for b in range(m2)] for a in range(m2)]
        return self._s

    def apply(self, vec, token):
        """Row vector times rho(token); vec maps label -> CycloScalar."""
        kind, e = token
        if kind == "T":
            return {a: v * self.t_phase(a, e) for a, v in vec.items()}
        s = self.s_matrix()
        out = {}
        for a, v in vec.items():
            row = s[a]
            for b in range(self.size):
                out[b] = out[b] + v * row[b] if b in out else v * row[b]
        return {b: v for b, v in out.items() if not v.is_zero()}

    def fold(self, vec):
        """Use theta_{-a} = (-1)^p theta_a to give each function one label."""
        m2 = self.size
        sgn = -1 if self.p else 1
        out = {}
        for a, v in vec.items():
            a %= m2
            b = (-a) % m2
            r = min(a, b)
            if self.p and a == b:
                continue
            w = v if a == r else v * sgn
            out[r] = out[r] + w if r in out else w
        return {a: v for a, v in out.items() if not v.is_zero()}

    def valuation(self, a):
        """Smallest exponent n^2/4m with nonzero coefficient, n = a mod 2m."""
        m2 = self.size
        a %= m2
        n = min(a, m2 - a) if a else 0
        if self.p and n == 0:
            n = m2
        return Fraction(n * n, 4 * self.m)

    def expansion(self, a, bound):
        """theta_{m,a,p}(w) as a series in w, complete below bound."""
        bound = Fraction(bound)
        m2 = self.size
        terms = {}
        if bound > 0:
            top = isqrt(int(4 * self.m * bound)) + 2
            lo = -((top + a) // m2) - 1
            hi = (top - a) // m2 + 1
            for k in range(lo, hi + 1):
                n = a + m2 * k
                e = Fraction(n * n, 4 * self.m)
                if e >= bound:
                    continue
                c = n ** self.p
                if c:
                    terms[e] = terms.get(e, 0) + c
        return QExpansion(terms, bound)


@lru_cache(maxsize=4096)
def _branch_quarter_turns(tokens, sign, G):
    """Quarter turns k with prod_t sqrt(j(g_t, w_t)) = i^k sqrt(j(G, w)).

    The ratio is a fourth root of unity independent of w, so one evaluation at
    w = i (with exact integer matrices) pins it.
    """
    with mpmath.workdps(40):
        w = mpmath.mpc(0, 1)
        r = mpmath.mpc(1)
        for kind, e in reversed(tokens):
            if kind == "S":
                r *= mpmath.sqrt(w)
                w = -1 / w
            else:
                w = w + e
        r /= mpmath.sqrt(G[2] * mpmath.mpc(0, 1) + G[3])
        k = int(mpmath.nint(mpmath.arg(r) / (mpmath.pi / 2))) % 4
        assert abs(r - mpmath.mpc(0, 1) ** k) < mpmath.mpf(10) ** -25
    return k


def replay(family, label, word):
    """Coefficients c_b with theta_label(G w) = j(G, w)^k sum_b c_b theta_b(w)."""
    vec = {label % family.size: ONE}
    for tok in word.tokens:
        vec = family.apply(vec, tok)
    G = word.matrix()
    k = _branch_quarter_turns(word.tokens, word.sign, tuple(G))
    k = (k * (2 * family.p + 1)) % 4
    if k:
        u = zeta(4, k)
        vec = {b: v * u for b, v in vec.items()}
    return vec


class ThetaVector:
    """Linear combination sum_b coeffs[b] theta_{m,b,p} with a bookkeeping scalar.

    The scalar collects automorphy constants so that after a sequence of
    transforms the represented function is scalar * sum_b coeffs[b] theta_b.
    """

    __slots__ = ("family", "coeffs", "scalar")

    def __init__(self, family, coeffs, scalar=ONE):
        self.family = family
        self.coeffs = {b % family.size: v for b, v in coeffs.items() if not v.is_zero()}
        self.scalar = scalar

    @classmethod
    def basis(cls, family, label):
        return cls(family, {label: ONE})

    def folded(self):
        return ThetaVector(self.family, self.family.fold(self.coeffs), self.scalar)

    def expansion(self, bound):
        out = QExpansion.zero(bound)
        for b, v in sorted(self.coeffs.items()):
            out = out + self.family.expansion(b, bound).scale(v * self.scalar)
        return out

    def __eq__(self, other):
        a, b = self.folded(), other.folded()
        return a.family is b.family and {k: v * a.scalar for k, v in a.coeffs.items()} == {
            k: v * b.scalar for k, v in b.coeffs.items()
        }

    def __repr__(self):
        return f"ThetaVector({self.family}, {len(self.coeffs)} components)"


def theta_transform(vec, token):
    """One S or T^m step: the vector representing f(g w) / j(g, w)^k."""
    return ThetaVector(vec.family, vec.family.apply(vec.coeffs, token), vec.scalar)


# --- factors and sources -----------------------------------------------------


class RankOneFactor:
    """theta_{m,a,p}(K tau) for rational K > 0."""

    __slots__ = ("family", "a", "K")

    def __init__(self, m, a, p, K):
        self.family = WeilFamily(m, p)
        self.a = a % self.family.size
        self.K = Fraction(K)
        if self.K <= 0:
            raise ValueError("scale must be positive")

    def key(self):
        return (self.family.m, self.family.p, self.a, self.K)

    def __repr__(self):
        f = self.family
        return f"theta[{f.m},{self.a},{f.p}]({self.K}*tau)"

    def rescale(self, s):
        return RankOneFactor(self.family.m, self.a, self.family.p, self.K * Fraction(s))

    def expansion_infty(self, bound):
        return self.family.expansion(self.a, Fraction(bound) / self.K).rescale(self.K)

    def valuation_infty(self):
        return self.family.valuation(self.a) * self.K

    def slash(self, gamma):
        """(U, coeffs) with (f |_k gamma)(tau) = sum_b coeffs[b] theta_b((A tau + B)/D)."""
        return _factor_slash(self.family.m, self.family.p, self.a, self.K, tuple(gamma))


@lru_cache(maxsize=1 << 17)
def _factor_slash(m, p, a, K, gamma):
    family = WeilFamily(m, p)
    G, U = scaled_hnf(K, SL2Matrix(*gamma))
    vec = replay(family, a, decompose_st(G))
    D = U[2]
    c = sqrt_rational(1 / D) * (1 / D) ** p
    vec = {b: v * c for b, v in vec.items()}
    return U, family.fold(vec)


def _factor_expansion(family, U, coeffs, bound):
    A, B, D = U
    s = Fraction(A) / Fraction(D)
    wb = Fraction(bound) / s
    out = QExpansion.zero(bound)
    for b, v in sorted(coeffs.items()):
        out = out + family.expansion(b, wb).scale(v).substitute(A, B, D)
    return out


def _lower_valuation(family, U, coeffs):
    A, B, D = U
    if not coeffs:
        return None
    return min(family.valuation(b) for b in coeffs) * Fraction(A) / Fraction(D)


class ThetaSource:
    """Finite sum of coef * prod(rank-one factors), all of the same weight."""

    def __init__(self, terms, label="f"):
        self.terms = [(c if isinstance(c, CycloScalar) else CycloScalar.rational(c), tuple(fs)) for c, fs in terms]
        self.label = label
        ws = {sum((f.family.weight for f in fs), Fraction(0)) for _, fs in self.terms}
        if len(ws) > 1:
            raise ValueError("terms of different weight")
        self.weight = ws.pop() if ws else Fraction(3, 2)

    def __add__(self, other):
        return ThetaSource(self.terms + other.terms, f"{self.label}+{other.label}")

    def scale(self, c):
        c = c if isinstance(c, CycloScalar) else CycloScalar.rational(c)
        return ThetaSource([(c * k, fs) for k, fs in self.terms], self.label)

    def rescale(self, s):
        """f(tau) -> f(s tau)."""
        return ThetaSource([(c, [f.rescale(s) for f in fs]) for c, fs in self.terms], self.label)

    def __repr__(self):
        return f"ThetaSource({self.label!r}, {len(self.terms)} terms)"

    def expansion_infty(self, bound):
        return self.slash_expansion(SL2Matrix(1, 0, 0, 1), bound)

    def slashed_terms(self, gamma):
        """Per term: (coef, [(family, U, coeffs), ...]); exact, expansion free."""
        out = []
        for c, fs in self.terms:
            parts = []
            for f in fs:
                U, vec = f.slash(gamma)
                parts.append((f.family, U, vec))
            out.append((c, parts))
        return out

    def slash_expansion(self, gamma, bound):
        """Expansion of f |_k gamma, complete below bound (absolute exponents)."""
        bound = Fraction(bound)
        total = QExpansion.zero(bound)
        for c, parts in self.slashed_terms(gamma):
            if any(not vec for _, _, vec in parts):
                continue
            vals = [_lower_valuation(fam, U, vec) for fam, U, vec in parts]
            prod = None
            for i, (fam, U, vec) in enumerate(parts):
                need = bound - (sum(vals) - vals[i])
                e = _factor_expansion(fam, U, vec, need)
                if e.is_zero():
                    # zero below need_i, hence the product vanishes below bound
                    prod = QExpansion.zero(bound)
                    break
                prod = e if prod is None else prod * e
            total = total + prod.truncate(bound).scale(c)
        return total


def expansion_at_cusp(source, word, bound, width=1):
    """Expansion of f | gamma for gamma given as an S/T word (or matrix)."""
    gamma = word.matrix() if isinstance(word, STWord) else SL2Matrix(*word)
    out = source.slash_expansion(gamma, bound)
    return out.with_width(width)


# --- lattices ----------------------------------------------------------------


def _frac_vec(v):
    return tuple(Fraction(x) for x in v)


class ShiftedLattice:
    """Z^n + shift with Q(x) = x^T G x / 2."""

    def __init__(self, gram, shift):
        self.gram = tuple(tuple(int(x) for x in row) for row in gram)
        self.shift = _frac_vec(shift)
        n = len(self.gram)
        if any(len(r) != n for r in self.gram) or len(self.shift) != n:
            raise ValueError("gram must be square and match the shift length")
        for i in range(n):
            for j in range(n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("gram must be symmetric")
        M = Matrix(self.gram)
        for k in range(1, n + 1):
            if M[:k, :k].det() <= 0:
                raise ValueError("gram must be positive definite")

    @property
    def rank(self):
        return len(self.gram)

    def is_diagonal(self):
        n = self.rank
        return all(self.gram[i][j] == 0 for i in range(n) for j in range(n) if i != j)

    def Q(self, x):
        n = self.rank
        return sum(self.gram[i][j] * x[i] * x[j] for i in range(n) for j in range(n)) / 2

    def to_json(self):
        return {"gram": [list(r) for r in self.gram], "shift": [str(x) for x in self.shift]}

    def exponent_denominator(self):
        """Least s with every Q(x), x in L + nu, in Z / s."""
        den = 1
        n = self.rank
        qs = [x.denominator for x in self.shift]
        box = [range(2 * q) for q in qs]
        for j in iproduct(*box):
            x = tuple(j[i] + self.shift[i] for i in range(n))
            den = lcm(den, self.Q(x).denominator)
        return den

    def to_source(self, scale=1):
        """Theta_{L+nu}(scale tau) as a product of rank-one factors."""
        if not self.is_diagonal():
            raise NotImplementedError("cusp expansions need a diagonal Gram matrix")
        fs = []
        for i, g in enumerate(self.gram[i][i] for i in range(self.rank)):
            nu = self.shift[i]
            q = nu.denominator
            a = (2 * nu.numerator) % (2 * q)
            fs.append(RankOneFactor(q, a, 0, Fraction(scale) * g / (2 * q)))
        return ThetaSource([(1, fs)], label="Theta_L+nu")


def _ellipsoid_box(gram, bound):
    """Integer half-widths r_i with |x_i| <= r_i whenever x^T G x / 2 < bound."""
    inv = Matrix(gram).inv()
    return [floor(mpmath.sqrt(2 * float(bound) * float(inv[i, i]))) + 1 for i in range(len(gram))]


def _enumerate(gram, center, modulus, bound, weight=None, exp_scale=Fraction(1)):
    """sum_x weight(x) q^{exp_scale * x^T G x / 2} over x = center mod modulus."""
    n = len(gram)
    bound = Fraction(bound)
    box = _ellipsoid_box(gram, bound / exp_scale)
    ranges = []
    for i in range(n):
        c, r = center[i], box[i]
        lo = -((r + c) // modulus) - 1 if modulus else 0
        hi = (r - c) // modulus + 1
        ranges.append([c + modulus * k for k in range(int(floor(lo)), int(floor(hi)) + 1)])
    terms = {}
    for x in iproduct(*ranges):
        e = exp_scale * sum(gram[i][j] * x[i] * x[j] for i in range(n) for j in range(n)) / 2
        if e >= bound:
            continue
        w = 1 if weight is None else weight(x)
        if w:
            terms[e] = terms.get(e, 0) + w
    return terms


class ThetaSpec:
    """Shimura's theta(tau; h, A, N, P): sum over x = h mod N of P(x) e(tau x^T A x / 2N^2)."""

    def __init__(self, h, A, N, P=None):
        self.h = tuple(int(x) for x in h)
        self.A = tuple(tuple(int(x) for x in row) for row in A)
        self.N = int(N)
        self.P = None if P is None else tuple(int(x) for x in P)
        n = len(self.h)
        for i in range(n):
            if sum(self.A[i][j] * self.h[j] for j in range(n)) % self.N:
                raise ValueError("need A h = 0 mod N")
        M = Matrix(self.A)
        for k in range(1, n + 1):
            if M[:k, :k].det() <= 0:
                raise ValueError("A must be positive definite")

    def expansion(self, bound):
        n = len(self.h)
        weight = None
        if self.P is not None:
            weight = lambda x: sum(self.P[i] * x[i] for i in range(n))  # noqa: E731
        terms = _enumerate(self.A, self.h, self.N, bound, weight, Fraction(1, self.N**2))
        return QExpansion(terms, bound)

    def to_source(self):
        n = len(self.h)
        if any(self.A[i][j] for i in range(n) for j in range(n) if i != j):
            raise NotImplementedError("cusp expansions need a diagonal A")
        N = self.N

        def fac(i, p):
            # x_i = h_i mod N  <->  n = 2 x_i = 2 h_i mod 2N
            return RankOneFactor(N, 2 * self.h[i], p, Fraction(self.A[i][i], 2 * N))

        if self.P is None:
            return ThetaSource([(1, [fac(i, 0) for i in range(n)])], "theta_shimura")
        terms = []
        for k in range(n):
            if self.P[k]:
                fs = [fac(i, 1 if i == k else 0) for i in range(n)]
                terms.append((Fraction(self.P[k], 2), fs))
        return ThetaSource(terms, "theta_shimura")


class UnaryThetaSpec:
    """vartheta_{h,t,N}(tau) = sum_{r = h mod 2N/t} r q^{t r^2}."""

    def __init__(self, h, t, N):
        h, t, N = int(h), int(t), int(N)
        if t < 1 or N < 1 or (2 * N) % t:
            raise ValueError("need t | 2N")
        if any(t % (p * p) == 0 for p in range(2, isqrt(t) + 1)):
            raise ValueError("t must be squarefree")
        self.t, self.N = t, N
        self.h = h % self.modulus

    @property
    def modulus(self):
        return 2 * self.N // self.t

    def __repr__(self):
        return f"UnaryThetaSpec(h={self.h}, t={self.t}, N={self.N})"

    @property
    def label(self):
        return f"vartheta_{self.h},{self.t},{self.N}"

    def key(self):
        return (self.h, self.t, self.N)

    def to_json(self):
        return {"h": self.h, "t": self.t, "N": self.N}

    def is_zero(self):
        M = self.modulus
        return (2 * self.h) % M == 0

    def expansion(self, bound):
        bound = Fraction(bound)
        M, terms = self.modulus, {}
        if bound > 0:
            top = isqrt(int(bound / self.t)) + 1
            for r in range(-top - M, top + M + 1):
                if (r - self.h) % M == 0 and self.t * r * r < bound and r:
                    e = Fraction(self.t * r * r)
                    terms[e] = terms.get(e, 0) + r
        return QExpansion(terms, bound)

    def to_source(self):
        # n = 2r runs over 2h mod 2M; sum n q^{tM n^2 / 4M} = 2 vartheta
        M = self.modulus
        return ThetaSource([(Fraction(1, 2), [RankOneFactor(M, 2 * self.h, 1, self.t * M)])], self.label)


def theta_expansion_infty(spec, bound):
    """Expansion at i*oo of a lattice, Shimura or unary theta, complete below bound."""
    bound = Fraction(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    if isinstance(spec, ShiftedLattice):
        n = spec.rank
        # x = j + nu; enumerate j in a box around -nu
        box = _ellipsoid_box(spec.gram, bound)
        ranges = [range(-box[i] - 1 - int(abs(spec.shift[i])), box[i] + 2 + int(abs(spec.shift[i]))) for i in range(n)]
        terms = {}
        for j in iproduct(*ranges):
            x = tuple(j[i] + spec.shift[i] for i in range(n))
            e = spec.Q(x)
            if e < bound:
                terms[e] = terms.get(e, 0) + 1
        return QExpansion(terms, bound)
    if isinstance(spec, (ThetaSpec, UnaryThetaSpec)):
        return spec.expansion(bound)
    if isinstance(spec, ThetaSource):
        return spec.expansion_infty(bound)
    raise TypeError(f"unsupported theta spec {type(spec).__name__}")


def polygonal_to_lattice(m, a, b, c):
    """Shifted lattice for a p_m(x) + b p_m(y) + c p_m(z).

    Returns (lattice, constant_shift, scale) with
    sum q^{P(x,y,z)} = q^{-constant_shift} Theta_{L+nu}(scale tau).
    """
    m, a, b, c = int(m), int(a), int(b), int(c)
    if m < 3:
        raise ValueError("need m >= 3")
    if min(a, b, c) <= 0:
        raise ValueError("coefficients must be positive")
    # p_m(x) = (m-2)/2 (x - nu0)^2 - (m-4)^2 / (8(m-2)),  nu0 = (m-4)/(2(m-2))
    nu = -Fraction(m - 4, 2 * (m - 2))
    g = m - 2
    lat = ShiftedLattice([[g * a, 0, 0], [0, g * b, 0], [0, 0, g * c]], [nu, nu, nu])
    const = Fraction((a + b + c) * (m - 4) ** 2, 8 * (m - 2))
    return lat, const, Fraction(1)


def polygonal_series(m, a, b, c, bound):
    """Direct oracle: sum over integers x, y, z of q^{P(x,y,z)} below bound."""
    def pm(x):
        return ((m - 2) * x * x - (m - 4) * x) // 2

    terms = {}
    r = 0
    while pm(r) < bound + 1 or pm(-r) < bound + 1:
        r += 1
    rng = range(-r - 1, r + 2)
    for x, y, z in iproduct(rng, rng, rng):
        e = a * pm(x) + b * pm(y) + c * pm(z)
        if e < bound:
            terms[e] = terms.get(e, 0) + 1
    return QExpansion(terms, bound)


def jacobi_theta_classical(bound, scale=1):
    """Theta(scale tau) = sum_n q^{scale n^2}."""
    return ThetaSpec((0,), ((2,),), 1).expansion(Fraction(bound) / scale).rescale(scale)


def octagonal_product(bound):
    """(Theta(tau) - Theta(9 tau)) (Theta(3 tau) - Theta(27 tau))^2."""
    th = lambda s: jacobi_theta_classical(bound, s)  # noqa: E731
    u = th(1) - th(9)
    v = th(3) - th(27)
    return (u * v * v).truncate(bound)


def chi_theta_expansion(d, bound, mutate=False):
    """sum_n chi_d(n) n q^{n^2}; mutate drops the character sign (negative control)."""
    bound = Fraction(bound)
    terms = {}
    top = isqrt(int(bound)) + 1
    for n in range(-top, top + 1):
        if n * n < bound and n:
            chi = kronecker(d, n)
            if mutate:
                chi = abs(chi)
            if chi:
                terms[Fraction(n * n)] = terms.get(Fraction(n * n), 0) + chi * n
    return QExpansion(terms, bound)


def chi_theta_rewrite_check(bound, mutate=False):
    """vartheta_{chi_-3}(tau) == vartheta_{2,1,3}(tau / 4) up to bound."""
    bound = Fraction(bound)
    lhs = chi_theta_expansion(-3, bound, mutate)
    rhs = UnaryThetaSpec(2, 1, 3).expansion(4 * bound).rescale(Fraction(1, 4))
    return lhs == rhs.truncate(bound)


def theta_numeric(source, tau, terms=60):
    """Direct numerical value of a ThetaSource at tau (validation only)."""
    tau = mpmath.mpc(tau)
    total = mpmath.mpc(0)
    for c, fs in source.terms:
        val = mpmath.mpc(1)
        for f in fs:
            m2, p = f.family.size, f.family.p
            s = mpmath.mpc(0)
            for k in range(-terms, terms + 1):
                n = f.a + m2 * k
                if p and n == 0:
                    continue
                s += (n**p) * mpmath.exp(2j * mpmath.pi * tau * mpmath.mpf(f.K.numerator) / f.K.denominator * (n * n) / (2 * m2))
            val *= s
        total += to_mpc(c) * val
    return total
