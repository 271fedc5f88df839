"""SL2(Z) words, congruence subgroups, cosets and cusps.

Groups are Gamma_0(M0) cap Gamma_1(M1).  Cosets are enumerated by a
breadth-first walk over right multiplication by S and T.
"""

from collections import deque
from fractions import Fraction
from math import gcd, log2

from sympy import divisors, factorint, totient

MAX_LEVEL = 10**4


class SL2Matrix(tuple):
    """Immutable 2x2 integer matrix (a, b, c, d) with determinant 1."""

    def __new__(cls, a, b, c, d):
        a, b, c, d = int(a), int(b), int(c), int(d)
        if a * d - b * c != 1:
            raise ValueError(f"determinant of ({a} {b}; {c} {d}) is not 1")
        return super().__new__(cls, (a, b, c, d))

    a = property(lambda s: s[0])
    b = property(lambda s: s[1])
    c = property(lambda s: s[2])
    d = property(lambda s: s[3])

    def __mul__(self, o):
        a, b, c, d = self
        e, f, g, h = o
        return SL2Matrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self):
        a, b, c, d = self
        return SL2Matrix(d, -b, -c, a)

    def __neg__(self):
        a, b, c, d = self
        return SL2Matrix(-a, -b, -c, -d)

    def act(self, tau):
        a, b, c, d = self
        return (a * tau + b) / (c * tau + d)

    def j(self, tau):
        return self.c * tau + self.d

    def __repr__(self):
        return "SL2Matrix(%d, %d, %d, %d)" % tuple(self)


I = SL2Matrix(1, 0, 0, 1)
S = SL2Matrix(0, -1, 1, 0)
T = SL2Matrix(1, 1, 0, 1)


def T_pow(m):
    return SL2Matrix(1, m, 0, 1)


class STWord:
    """Tokens ('S', None) or ('T', m) and a global sign."""

    __slots__ = ("tokens", "sign")

    def __init__(self, tokens, sign=1):
        self.tokens = tuple(tokens)
        self.sign = sign

    def matrix(self):
        m = I
        for kind, e in self.tokens:
            m = m * (S if kind == "S" else T_pow(e))
        return m if self.sign == 1 else -m

    def __len__(self):
        return len(self.tokens)

    def to_json(self):
        return [("S" if k == "S" else f"T^{e}") for k, e in self.tokens]

    @classmethod
    def from_json(cls, toks, sign=1):
        out = []
        for t in toks:
            if t == "S":
                out.append(("S", None))
            elif t.startswith("T^"):
                out.append(("T", int(t[2:])))
            else:
                raise ValueError(f"bad token {t!r}")
        return cls(out, sign)

    def __repr__(self):
        s = " ".join(self.to_json()) or "I"
        return f"STWord({'-' if self.sign < 0 else ''}{s})"


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def cusp_to_matrix(a, c):
    """Complete the column (a, c) to an SL2 matrix, |b| minimal, ties to b >= 0."""
    if gcd(a, c) != 1:
        raise ValueError(f"gcd({a}, {c}) != 1")
    if c == 0:
        return SL2Matrix(a, 0, 0, a)
    # a d - b c = 1; solutions b = b0 + k a
    g, x, y = _xgcd(a, -c)
    # a*x + (-c)*y = g = +-1
    d0, b0 = x * g, y * g
    if a == 0:
        return SL2Matrix(0, -c, c, 0)
    k0 = -b0 / a
    best = None
    for k in (int(k0) - 1, int(k0), int(k0) + 1):
        b = b0 + k * a
        key = (abs(b), b < 0)
        if best is None or key < best[0]:
            best = (key, k)
    k = best[1]
    return SL2Matrix(a, b0 + k * a, c, d0 + k * c)


def decompose_st(g):
    """Word in S and T (with sign) for g, by the reduction of the lower-left entry.

    Each step replaces g_j by S T^r g_j with |a_j + r c_j| minimal, so the
    lower-left entry at least halves.
    """
    g = SL2Matrix(*g)
    tokens = []
    sign = 1
    cur = g
    while cur.c != 0:
        a, c = cur.a, cur.c
        # r minimising |a + r c|, preferring a + r c = c/2 on ties
        r = (-a) // c
        cands = [r - 1, r, r + 1, r + 2]
        best = min(abs(a + x * c) for x in cands)
        opts = [x for x in cands if abs(a + x * c) == best]
        tie = [x for x in opts if 2 * (a + x * c) == c]
        r = tie[0] if tie else opts[0]
        # cur = T^{-r} S^{-1} (S T^r cur), S^{-1} = -S
        if r:
            tokens.append(("T", -r))
        tokens.append(("S", None))
        sign = -sign
        cur = S * T_pow(r) * cur
    # cur = +-T^m
    if cur.a == -1:
        sign = -sign
        cur = -cur
    if cur.b:
        tokens.append(("T", cur.b))
    w = STWord(tokens, sign)
    assert w.matrix() == g
    return w


def word_length_bound(g):
    return 2 * log2(max(abs(g[2]), 1)) + 4


def dedekind_sum(d, c):
    """s(d, c) for c > 0, via reciprocity."""
    if c <= 0:
        raise ValueError("c must be positive")
    sgn = 1
    total = Fraction(0)
    h, k = d % c, c
    while k > 1 and h:
        total += sgn * (Fraction(h, k) + Fraction(k, h) + Fraction(1, h * k)) / 12 - sgn * Fraction(1, 4)
        sgn = -sgn
        h, k = k % h, h
    return total


# --- rational matrices and the scaling normal form -------------------------


def hnf_left(x):
    """Write a rational 2x2 matrix of positive determinant as G*U.

    G is in SL2(Z) and U = (A B; 0 D) with A, D > 0 and 0 <= B < D.  The
    pair is unique, so U is a canonical label for the coset SL2(Z)*x.
    """
    a, b, c, d = (Fraction(v) for v in x)
    det = a * d - b * c
    if det <= 0:
        raise ValueError("determinant must be positive")
    # bottom row (p, q) of G^{-1}: p a + q c = 0
    den = 1
    for v in (a, c):
        den = den * v.denominator // gcd(den, v.denominator)
    p, q = int(c * den), int(-a * den)
    g = gcd(p, q)
    p, q = p // g, q // g
    D = p * b + q * d
    if D < 0:
        p, q, D = -p, -q, -D
    # r q - s p = 1
    g, r, s_ = _xgcd(q, -p)
    r, s = r * g, s_ * g
    assert r * q - s * p == 1
    A = r * a + s * c
    B = r * b + s * d
    k = (B / D).__floor__()
    B -= k * D
    ginv = SL2Matrix(r - k * p, s - k * q, p, q)
    return ginv.inverse(), (A, B, D)


def scaled_hnf(lam, m):
    """hnf_left of diag(lam, 1) * m."""
    lam = Fraction(lam)
    return hnf_left((lam * m[0], lam * m[1], m[2], m[3]))


# --- congruence subgroups ---------------------------------------------------


class CuspData:
    __slots__ = ("representative", "gamma_rho", "word", "width", "regular")

    def __init__(self, representative, gamma_rho, width, regular):
        self.representative = representative
        self.gamma_rho = gamma_rho
        self.word = decompose_st(gamma_rho)
        self.width = width
        self.regular = regular

    @property
    def label(self):
        a, c = self.representative
        return "oo" if c == 0 else (f"{a}" if c == 1 else f"{a}/{c}")

    def to_json(self):
        return {
            "cusp": self.label,
            "gamma": list(self.gamma_rho),
            "word": self.word.to_json(),
            "sign": self.word.sign,
            "width": self.width,
            "regular": self.regular,
        }

    def __repr__(self):
        return f"CuspData({self.label}, width={self.width}, regular={self.regular})"


class CongruenceGroup:
    """Gamma_0(M0) cap Gamma_1(M1)."""

    def __init__(self, M0=1, M1=1, bound=MAX_LEVEL):
        M0, M1 = int(M0), int(M1)
        if M0 < 1 or M1 < 1:
            raise ValueError("levels must be positive")
        self.M0, self.M1 = M0, M1
        self.level = M0 * M1 // gcd(M0, M1)
        if self.level > bound:
            raise ValueError(f"level {self.level} exceeds bound {bound}")
        self._cosets = None
        self._cusps = None
        self._ukeys = None

    def __repr__(self):
        return f"CongruenceGroup(M0={self.M0}, M1={self.M1})"

    def label(self):
        if self.M1 == 1:
            return f"Gamma0({self.M0})"
        return f"Gamma0({self.M0})&Gamma1({self.M1})"

    def to_json(self):
        return {"gamma0": self.M0, "gamma1": self.M1}

    def __contains__(self, g):
        a, b, c, d = g
        return c % self.M0 == 0 and c % self.M1 == 0 and (a - 1) % self.M1 == 0 and (d - 1) % self.M1 == 0

    def contains_minus_identity(self):
        return self.M1 <= 2

    def _units(self):
        n, m1 = self.level, self.M1
        return [u for u in range(1, n + 1) if gcd(u, n) == 1 and (u - 1) % m1 == 0] or [1]

    def coset_key(self, g):
        """Label of the right coset Gamma*g (bottom row up to admissible units)."""
        n = self.level
        c, d = g[2] % n, g[3] % n
        if self._ukeys is None:
            self._ukeys = self._units()
        return min(((u * c) % n, (u * d) % n) for u in self._ukeys)

    def coset_representatives(self):
        """Right coset representatives of Gamma in SL2(Z), in BFS order."""
        if self._cosets is None:
            reps, index, edges = [I], {self.coset_key(I): 0}, []
            queue = deque([0])
            while queue:
                i = queue.popleft()
                for gname, gen in (("S", S), ("T", T)):
                    x = reps[i] * gen
                    k = self.coset_key(x)
                    j = index.get(k)
                    if j is None:
                        j = len(reps)
                        index[k] = j
                        reps.append(x)
                        queue.append(j)
                    edges.append((i, gname, j))
            self._cosets = (reps, index, edges)
        return list(self._cosets[0])

    def coset_index_of(self, g):
        self.coset_representatives()
        return self._cosets[1][self.coset_key(g)]

    def index(self):
        return len(self.coset_representatives())

    def psl_index(self):
        n = self.index()
        return n if self.contains_minus_identity() else n // 2

    def schreier_generators(self):
        """Elements x*g*rep(xg)^{-1} of Gamma; together they generate Gamma."""
        reps = self.coset_representatives()
        _, _, edges = self._cosets
        out = []
        for i, gname, j in edges:
            y = reps[i] * (S if gname == "S" else T)
            h = y * reps[j].inverse()
            if h != I:
                out.append((i, gname, j, h))
        return out

    def width_at(self, g):
        """Least k >= 1 with g T^k g^{-1} in +-Gamma, and whether the cusp is regular."""
        ginv = g.inverse()
        minus_ok = self.contains_minus_identity()
        k = 1
        while True:
            h = g * T_pow(k) * ginv
            if h in self:
                return k, True
            if (-h) in self:
                return k, minus_ok
            k += 1

    def cusp_set(self):
        if self._cusps is not None:
            return list(self._cusps)
        reps = self.coset_representatives()
        n = len(reps)
        seen = [False] * n
        cusps = []
        for i in range(n):
            if seen[i]:
                continue
            orbit, stack = [], [i]
            seen[i] = True
            while stack:
                x = stack.pop()
                orbit.append(x)
                for y in (reps[x] * T, -reps[x]):
                    j = self.coset_index_of(y)
                    if not seen[j]:
                        seen[j] = True
                        stack.append(j)
            cands = []
            for x in orbit:
                a, c = reps[x][0], reps[x][2]
                if c < 0 or (c == 0 and a < 0):
                    a, c = -a, -c
                if c > 0:
                    a %= c  # T lies in every group here
                cands.append((c, abs(a), a < 0, a))
            c, _, _, a = min(cands)
            if c == 0:
                a = 1
            g = cusp_to_matrix(a, c)
            width, regular = self.width_at(g)
            e = 1 if self.contains_minus_identity() else 2
            assert len(orbit) == e * width, (orbit, width)
            cusps.append(CuspData((a, c), g, width, regular))
        cusps.sort(key=lambda cd: (cd.representative[1], cd.representative[0]))
        self._cusps = cusps
        return list(cusps)


# --- classical oracles (used only by tests) ---------------------------------


def gamma0_index_formula(m):
    out = m
    for p in factorint(m):
        out = out * (p + 1) // p
    return out


def gamma0_cusp_count_formula(m):
    return sum(int(totient(gcd(d, m // d))) for d in divisors(m))
