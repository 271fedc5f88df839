"""Appell-Lerch sums at torsion points and the weight 1/2 pre-images F_{h,t,N}.

F(tau) = -e(-u^2 tau'/2) mu~(u tau', -1/2; tau'),  tau' = lam tau,
u = (ht - N)/(2N), lam = 8N^2/t^2 (times an optional rescale s).

To move F to a cusp we factor diag(lam, 1) gamma = G (A B; 0 D), apply the
modular law of mu~ for G in one step, and bring both elliptic arguments into
[0,1) tau + [0,1) with the elliptic law.  The holomorphic part is the mu
expansion plus the finitely many terms of (i/2) R whose sign flips.
"""

from fractions import Fraction
from math import floor, isqrt

import mpmath

from .exact_arith import CycloScalar, exp_2pi_i, sqrt_rational, to_mpc, to_string, zeta
from .modular_group import SL2Matrix, STWord, dedekind_sum, scaled_hnf
from .qseries import QExpansion, TruncationError, principal_part, series_divide

ONE = CycloScalar.one
HALF = Fraction(1, 2)


class PoleError(ValueError):
    pass


class TorsionArg:
    """The elliptic argument alpha * w + beta."""

    __slots__ = ("alpha", "beta")

    def __init__(self, alpha, beta):
        self.alpha = Fraction(alpha)
        self.beta = Fraction(beta)

    def __repr__(self):
        return f"TorsionArg({self.alpha}*w + {self.beta})"

    def __eq__(self, o):
        return isinstance(o, TorsionArg) and (self.alpha, self.beta) == (o.alpha, o.beta)

    def __hash__(self):
        return hash((self.alpha, self.beta))

    def __sub__(self, o):
        return TorsionArg(self.alpha - o.alpha, self.beta - o.beta)

    def __neg__(self):
        return TorsionArg(-self.alpha, -self.beta)

    def is_lattice_point(self):
        return self.alpha.denominator == 1 and self.beta.denominator == 1

    def normalized(self):
        """(reduced arg, k, l) with self = reduced + k w + l, reduced in [0,1)^2."""
        k, l = floor(self.alpha), floor(self.beta)
        return TorsionArg(self.alpha - k, self.beta - l), k, l

    def value(self, w):
        return mpmath.mpf(self.alpha.numerator) / self.alpha.denominator * w + mpmath.mpf(
            self.beta.numerator
        ) / self.beta.denominator


def _mpf(x):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


# --- exact expansions ---------------------------------------------------------


def jacobi_theta_expansion(z, bound):
    """theta(z; w) = sum_{nu in 1/2+Z} q^{nu^2/2} e(nu (z + 1/2)) for z = alpha w + beta."""
    if z.is_lattice_point():
        raise PoleError(f"theta vanishes identically at {z}")
    bound = Fraction(bound)
    a, b = z.alpha, z.beta
    terms = {}
    top = isqrt(int(2 * max(bound, 0) + a * a) + 1) + int(abs(a)) + 2
    for k in range(-top - 1, top + 1):
        nu = Fraction(2 * k + 1, 2)
        e = nu * nu / 2 + nu * a
        if e < bound:
            c = exp_2pi_i(nu * (b + HALF))
            terms[e] = terms[e] + c if e in terms else c
    return QExpansion(terms, bound)


def _theta_valuation(z):
    # exponents nu^2/2 + nu alpha are minimised near nu = -alpha; look on both sides
    best = None
    for k in range(-int(abs(z.alpha)) - 3, int(abs(z.alpha)) + 3):
        nu = Fraction(2 * k + 1, 2)
        e = nu * nu / 2 + nu * z.alpha
        best = e if best is None else min(best, e)
    return best


def _lerch_numerator(a, b, bound, window=1):
    """sum_n (-1)^n q^{(n^2+n)/2} e(n b) / (1 - q^n e(a)), complete below bound."""
    al, be = a.alpha, a.beta
    ab, bb = b.alpha, b.beta
    terms = {}

    def add(e, c):
        if e < bound:
            terms[e] = terms[e] + c if e in terms else c

    def lowest(n):
        base = Fraction(n * n + n, 2) + n * ab
        x = n + al
        return base - x if x < 0 else base

    # window: all n whose smallest exponent is below the bound, times the factor
    ns = []
    n = 0
    while True:
        hit = False
        for m in (n, -n - 1):
            if lowest(m) < bound:
                ns.append(m)
                hit = True
        # lowest(n) is convex in n; stop once both sides are past the vertex and above
        if not hit and n > abs(ab) + abs(al) + 2:
            break
        n += 1
    if window > 1:
        extra = max(abs(m) for m in ns) if ns else 0
        ns = list(range(-window * (extra + 1) - 1, window * (extra + 1) + 1))
    for n in sorted(set(ns)):
        sgn = -1 if n % 2 else 1
        base_e = Fraction(n * n + n, 2) + n * ab
        base_c = exp_2pi_i(n * bb) * sgn
        x = n + al
        if x > 0:
            k = 0
            while base_e + k * x < bound:
                add(base_e + k * x, base_c * exp_2pi_i(k * be))
                k += 1
        elif x < 0:
            k = 1
            while base_e - k * x < bound:
                add(base_e - k * x, -base_c * exp_2pi_i(-k * be))
                k += 1
        else:
            add(base_e, base_c / (1 - exp_2pi_i(be)))
    return QExpansion(terms, bound)


def mu_expansion(a, b, bound, window=1):
    """Zwegers' mu(a, b; w) at torsion arguments, complete below bound (in w)."""
    if a.is_lattice_point() or b.is_lattice_point():
        raise PoleError(f"mu has a pole at ({a}, {b})")
    bound = Fraction(bound)
    v = jacobi_theta_expansion(b, _theta_valuation(b) + 2).valuation()
    need = bound + v - a.alpha / 2
    num = _lerch_numerator(a, b, need, window)
    num = num.shift(a.alpha / 2).scale(exp_2pi_i(a.beta / 2))
    nv = num.valuation()
    if nv is None:
        return QExpansion.zero(bound)
    # the quotient error starts at val(num) + bound(theta) - 2 v
    th = jacobi_theta_expansion(b, max(bound + 2 * v - nv, v) + 1)
    out = series_divide(num, th)
    if out.bound < bound:
        raise TruncationError(f"mu expansion reached {out.bound}, wanted {bound}")
    return out.truncate(bound)


def r_leak_terms(z):
    """Holomorphic terms of R(z; w): [(exponent in w, coefficient)] for z = alpha w + beta.

    These are the nu with sgn(nu) != sgn(nu + alpha); the coefficient is
    (sgn(nu) - sgn(nu + alpha)) (-1)^{nu - 1/2} e(-nu beta), exponent -nu^2/2 - nu alpha.
    """
    out = []
    al = z.alpha
    top = int(abs(al)) + 2
    for k in range(-top - 1, top + 1):
        nu = Fraction(2 * k + 1, 2)
        x = nu + al
        s1 = 1 if nu > 0 else -1
        s2 = (x > 0) - (x < 0)
        if s1 != s2:
            c = exp_2pi_i((nu - HALF) / 2 - nu * z.beta) * (s1 - s2)
            out.append((-nu * nu / 2 - nu * al, c))
    return out


def mutilde_holomorphic(a, b, bound):
    """Holomorphic part of mu~(a, b; w) = mu + (i/2) R(a - b)."""
    out = mu_expansion(a, b, bound)
    half_i = zeta(4) / 2
    extra = {}
    for e, c in r_leak_terms(a - b):
        if e < bound:
            extra[e] = extra[e] + c * half_i if e in extra else c * half_i
    return out + QExpansion(extra, bound)


def g_ab_expansion(a, b, bound):
    """g_{a,b}(w) = sum_{nu in a + Z} nu q^{nu^2/2} e(b nu)."""
    a, b, bound = Fraction(a), Fraction(b), Fraction(bound)
    terms = {}
    top = isqrt(int(2 * max(bound, 0))) + int(abs(a)) + 2
    for k in range(-top - 1, top + 2):
        nu = a + k
        e = nu * nu / 2
        if e < bound and nu:
            c = exp_2pi_i(b * nu) * nu
            terms[e] = terms[e] + c if e in terms else c
    return QExpansion(terms, bound)


# --- eta multiplier -----------------------------------------------------------


def eta_multiplier(g):
    """v(g) with eta(g tau) = v(g) (c tau + d)^{1/2} eta(tau), principal branch."""
    a, b, c, d = g
    if c == 0:
        if d == 1:
            return exp_2pi_i(Fraction(b, 24))
        return exp_2pi_i(Fraction(-b, 24) - Fraction(1, 4))
    if c < 0:
        return eta_multiplier((-a, -b, -c, -d)) * zeta(4)
    return exp_2pi_i(Fraction(a + d, 24 * c) - dedekind_sum(d, c) / 2 - Fraction(1, 8))


def eta_numeric(tau):
    tau = mpmath.mpc(tau)
    q = mpmath.exp(2j * mpmath.pi * tau)
    return mpmath.exp(2j * mpmath.pi * tau / 24) * mpmath.qp(q)


def eta_multiplier_numeric(g, tau):
    a, b, c, d = g
    tau = mpmath.mpc(tau)
    gt = (a * tau + b) / (c * tau + d)
    return eta_numeric(gt) / (mpmath.sqrt(c * tau + d) * eta_numeric(tau))


# --- the pre-image F_{h,t,N} ----------------------------------------------------


class MockSpec:
    """scale * F_{h,t,N}(rescale * tau).

    F_{h,t,N} depends on (h, N/t) only and xi(F_{h,t,N}) = sum_{r = h mod 2N/t} r q^{r^2},
    which is vartheta_{h,t,N}(tau / t).  Use preimage() for the form whose
    shadow is vartheta_{h,t,N} itself.
    """

    def __init__(self, h, t, N, rescale=1, scale=1):
        self.h, self.t, self.N = int(h), int(t), int(N)
        if self.t < 1 or (2 * self.N) % self.t:
            raise ValueError("need t | 2N")
        self.rescale = Fraction(rescale)
        if self.rescale <= 0:
            raise ValueError("rescale must be positive")
        self.scale = scale if isinstance(scale, CycloScalar) else CycloScalar.rational(Fraction(scale))
        self.u = Fraction(self.h * self.t - self.N, 2 * self.N)
        if self.u.denominator == 1:
            raise PoleError("u is an integer: the shadow vanishes identically")
        self.lam = Fraction(8 * self.N**2, self.t**2) * self.rescale

    @classmethod
    def preimage(cls, theta, rescale=1):
        """t^{-1/2} F_{h,t,N}(t s tau); its xi-image is s^{1/2} vartheta_{h,t,N}(s tau)."""
        t = theta.t
        return cls(theta.h, t, theta.N, rescale=Fraction(rescale) * t, scale=sqrt_rational(Fraction(1, t)))

    def __repr__(self):
        r = "" if self.rescale == 1 else f", rescale={self.rescale}"
        return f"MockSpec(h={self.h}, t={self.t}, N={self.N}{r})"

    @property
    def label(self):
        return f"F_{self.h},{self.t},{self.N}"

    def key(self):
        return (self.h, self.t, self.N, self.rescale, self.scale)

    @property
    def arg_a(self):
        return TorsionArg(self.u, 0)

    @property
    def arg_b(self):
        return TorsionArg(0, -HALF)

    @property
    def prefactor_exponent(self):
        """Exponent of the leading e(. tau): -(h - N/t)^2 times the rescale."""
        return -Fraction(self.h * self.t - self.N, self.t) ** 2 * self.rescale

    def group_levels(self):
        """(M0, M1) of Gamma_0(16N^2/t^2) cap Gamma_1(4N/t), for rescale 1."""
        return (16 * self.N**2 // self.t**2, 4 * self.N // self.t)

    def shadow_numeric(self, tau):
        """xi of this form at tau: scale rescale^{1/2} vartheta_{h,t,N}(rescale tau / t)."""
        s = _mpf(self.rescale)
        return to_mpc(self.scale) * mpmath.sqrt(s) * unary_theta_numeric(
            self.h, self.t, self.N, s * mpmath.mpc(tau) / self.t
        )

    def slash(self, gamma):
        return MockSlash.compute(self, SL2Matrix(*gamma))


class MockSlash:
    """F |_{1/2} gamma = const * e(ell w) mu~(X, Y; w), w = (A tau + B)/D."""

    __slots__ = ("const", "ell", "U", "X", "Y")

    def __init__(self, const, ell, U, X, Y):
        self.const, self.ell, self.U, self.X, self.Y = const, ell, U, X, Y

    def shape(self):
        return (self.ell, self.U, self.X, self.Y)

    def __repr__(self):
        return f"MockSlash({self.const}, ell={self.ell}, U={self.U}, X={self.X}, Y={self.Y})"

    @classmethod
    def compute(cls, spec, gamma):
        u = spec.u
        G, U = scaled_hnf(spec.lam, gamma)
        a, b, c, d = G
        # F(gamma tau) = -e(-u^2 Gw / 2) mu~(u Gw, -1/2; Gw) and Zwegers' modular law
        # with X = u (a w + b), Y = -(c w + d)/2 turns this into mu~(X, Y; w)
        X = TorsionArg(u * a, u * b)
        Y = TorsionArg(Fraction(-c, 2), Fraction(-d, 2))
        # exponent / (2 pi i): -(u^2 (a w + b) + c (X - Y)^2) / (2 (c w + d))
        p1, p0 = _linear_exponent(u, a, b, c, d)
        # elliptic normalisation of both arguments
        X0, k, l = X.normalized()
        Y0, m, n = Y.normalized()
        km = k - m
        diff = X0 - Y0
        p1 += Fraction(km * km, 2) + km * diff.alpha
        p0 += km * diff.beta
        sign = -1 if (k + l + m + n) % 2 else 1
        D = U[2]
        const = eta_multiplier(G) ** -3 * exp_2pi_i(p0) * sqrt_rational(1 / Fraction(D)) * (-sign)
        const = const * spec.scale
        if X0.is_lattice_point() or Y0.is_lattice_point():
            raise PoleError(f"pole at the cusp image of {tuple(gamma)}")
        return cls(const, p1, U, X0, Y0)

    def holomorphic(self, bound):
        """Holomorphic part in tau, complete below bound (absolute exponents)."""
        A, B, D = self.U
        s = Fraction(A) / Fraction(D)
        wb = Fraction(bound) / s
        inner = mutilde_holomorphic(self.X, self.Y, wb - self.ell)
        return inner.shift(self.ell).scale(self.const).substitute(A, B, D)

    def nonholomorphic_numeric(self, tau, terms=40):
        """The H^- part at tau: const e(ell w) (i/2) sum_nu (sgn(nu+al) - E(.)) (...)."""
        A, B, D = (_mpf(x) for x in self.U)
        w = (A * mpmath.mpc(tau) + B) / D
        z = self.X - self.Y
        al = z.alpha
        v = w.imag
        zz = z.value(w)
        s = mpmath.mpc(0)
        for k in range(-terms, terms):
            nu = Fraction(2 * k + 1, 2)
            x = nu + al
            env = _envelope((x > 0) - (x < 0), _mpf(x) * mpmath.sqrt(2 * v))
            s += env * mpmath.expjpi(_mpf(nu - HALF)) * mpmath.exp(
                -1j * mpmath.pi * _mpf(nu) ** 2 * w - 2j * mpmath.pi * zz * _mpf(nu)
            )
        return to_mpc(self.const) * mpmath.exp(2j * mpmath.pi * _mpf(self.ell) * w) * 0.5j * s

    def nonholo_labels(self, count=4):
        """Leading H^- terms as (nu, exponent in w, coefficient without the envelope)."""
        z = self.X - self.Y
        out = []
        for k in range(-count, count):
            nu = Fraction(2 * k + 1, 2)
            e = self.ell - nu * nu / 2 - nu * z.alpha
            c = self.const * zeta(4) / 2 * exp_2pi_i((nu - HALF) / 2 - nu * z.beta)
            out.append((nu, e, c))
        return out

    def numeric(self, tau):
        A, B, D = (_mpf(x) for x in self.U)
        w = (A * mpmath.mpc(tau) + B) / D
        return (
            to_mpc(self.const)
            * mpmath.exp(2j * mpmath.pi * _mpf(self.ell) * w)
            * mutilde_numeric(self.X.value(w), self.Y.value(w), w)
        )


def _linear_exponent(u, a, b, c, d):
    """Coefficients (p1, p0) of the w-linear exponent, checking exact divisibility."""
    # numerator N(w) = u^2 (a w + b) + c (u (a w + b) + (c w + d)/2)^2, divide by (c w + d)
    x1, x0 = u * a + Fraction(c, 2), u * b + Fraction(d, 2)
    n2 = c * x1 * x1
    n1 = u * u * a + 2 * c * x1 * x0
    n0 = u * u * b + c * x0 * x0
    if c == 0:
        q1, q0 = n1 / d, n0 / d
        assert n2 == 0
    else:
        q1 = n2 / c
        q0 = (n1 - q1 * d) / c
        assert n0 - q0 * d == 0, "exponent is not linear in w"
    return -q1 / 2, -q0 / 2


class HarmonicExpansion:
    """Holomorphic part as a QExpansion plus a symbolic description of the rest."""

    def __init__(self, holo, nonholo_labels, slash=None):
        self.holo = holo
        self.nonholo_labels = nonholo_labels
        self.slash = slash

    def principal_part(self):
        return principal_part(self.holo)

    def to_json(self):
        return {
            "holo": self.holo.to_json(),
            "nonholo_labels": [[str(nu), str(e), to_string(c)] for nu, e, c in self.nonholo_labels],
        }


def holo_part_at_cusp(spec, word, bound, width=1, reject_irregular=False, regular=True):
    """H^+ of spec |_{1/2} gamma_rho, gamma_rho given as an STWord or a matrix."""
    if reject_irregular and not regular:
        raise ValueError("irregular cusp rejected")
    gamma = word.matrix() if isinstance(word, STWord) else SL2Matrix(*word)
    sl = spec.slash(gamma)
    holo = sl.holomorphic(bound).with_width(width)
    return HarmonicExpansion(holo, sl.nonholo_labels(), sl)


# --- numerics (validation only) -------------------------------------------------


def theta_numeric(z, tau, terms=None):
    tau, z = mpmath.mpc(tau), mpmath.mpc(z)
    if terms is None:
        terms = int(mpmath.sqrt(60 / tau.imag)) + int(abs(z.imag) / tau.imag) + 6
    s = mpmath.mpc(0)
    for k in range(-terms - 1, terms + 1):
        nu = mpmath.mpf(2 * k + 1) / 2
        s += mpmath.exp(1j * mpmath.pi * nu * nu * tau + 2j * mpmath.pi * nu * (z + 0.5))
    return s


def mu_numeric(a, b, tau, terms=None):
    tau, a, b = mpmath.mpc(tau), mpmath.mpc(a), mpmath.mpc(b)
    v = tau.imag
    if terms is None:
        terms = int(mpmath.sqrt(80 / v)) + int((abs(b.imag) + abs(a.imag)) / v) + 6
    s = mpmath.mpc(0)
    for n in range(-terms, terms + 1):
        num = (-1) ** n * mpmath.exp(1j * mpmath.pi * (n * n + n) * tau + 2j * mpmath.pi * n * b)
        s += num / (1 - mpmath.exp(2j * mpmath.pi * (n * tau + a)))
    return mpmath.exp(1j * mpmath.pi * a) / theta_numeric(b, tau) * s


def E_function(z):
    """E(z) = sgn(z)(1 - beta(z^2)) = erf(sqrt(pi) z)."""
    return mpmath.erf(mpmath.sqrt(mpmath.pi) * z)


def _envelope(s, y):
    """s - E(y) without cancellation: erfc when the signs agree."""
    if y == 0:
        return mpmath.mpf(s)
    if (y > 0) == (s > 0):
        return s * mpmath.erfc(mpmath.sqrt(mpmath.pi) * abs(y))
    return s - E_function(y)


def beta_function(x):
    """beta(x) = int_x^oo t^{-1/2} e^{-pi t} dt = erfc(sqrt(pi x))."""
    return mpmath.erfc(mpmath.sqrt(mpmath.pi * x))


def r_function_numeric(a, tau, terms=None):
    tau, a = mpmath.mpc(tau), mpmath.mpc(a)
    v = tau.imag
    al = a.imag / v
    if terms is None:
        terms = int(mpmath.sqrt(80 / v)) + int(abs(al)) + 6
    s = mpmath.mpc(0)
    for k in range(-terms - 1, terms + 1):
        nu = mpmath.mpf(2 * k + 1) / 2
        env = _envelope(mpmath.sign(nu), (nu + al) * mpmath.sqrt(2 * v))
        s += env * mpmath.expjpi(nu - 0.5) * mpmath.exp(-1j * mpmath.pi * nu * nu * tau - 2j * mpmath.pi * a * nu)
    return s


def mutilde_numeric(a, b, tau):
    if isinstance(a, TorsionArg):
        a = a.value(tau)
    if isinstance(b, TorsionArg):
        b = b.value(tau)
    return mu_numeric(a, b, tau) + 0.5j * r_function_numeric(a - b, tau)


def F_numeric(spec, tau):
    """scale * F_{h,t,N}(rescale tau) by direct summation."""
    tau = mpmath.mpc(tau)
    tp = _mpf(spec.lam) * tau
    u = _mpf(spec.u)
    val = -mpmath.exp(-1j * mpmath.pi * u * u * tp) * mutilde_numeric(u * tp, mpmath.mpf(-0.5), tp)
    return to_mpc(spec.scale) * val


def unary_theta_numeric(h, t, N, tau, terms=None):
    tau = mpmath.mpc(tau)
    M = 2 * N // t if (2 * N) % t == 0 else None
    if terms is None:
        terms = int(mpmath.sqrt(40 / (t * tau.imag))) + M + 4
    s = mpmath.mpc(0)
    for r in range(-terms, terms + 1):
        if (r - h) % M == 0:
            s += r * mpmath.exp(2j * mpmath.pi * t * r * r * tau)
    return s


def xi_numeric(func, tau, step=1e-4):
    """xi_{1/2} f = 2 i v^{1/2} conj(d f / d taubar) by central differences."""
    tau = mpmath.mpc(tau)
    h = mpmath.mpf(step)
    fx = (func(tau + h) - func(tau - h)) / (2 * h)
    fy = (func(tau + 1j * h) - func(tau - 1j * h)) / (2 * h)
    dbar = (fx + 1j * fy) / 2
    return 2j * mpmath.sqrt(tau.imag) * mpmath.conj(dbar)


def qexp_numeric(f, tau):
    """mpmath value of a truncated expansion (validation only)."""
    tau = mpmath.mpc(tau)
    return mpmath.fsum(to_mpc(c) * mpmath.exp(2j * mpmath.pi * _mpf(e) * tau) for e, c in f.terms.items())


def xi_check(spec, samples, step=1e-4, target=None, subtract_holomorphic=True, holo_bound=None):
    """max |xi_{1/2}(F)(tau) - target(tau)| over samples.

    The default target is MockSpec.shadow_numeric.
    With subtract_holomorphic the differences are taken on F - H^+, which has the
    same d/dtaubar but no exponentially large holomorphic part to amplify the
    O(step^2) error.
    """
    if target is None:
        target = spec.shadow_numeric

    err = 0
    with mpmath.workdps(40):
        func = lambda x: F_numeric(spec, x)
        if subtract_holomorphic:
            vmin = min(complex(t).imag for t in samples)
            B = holo_bound or Fraction(int(60 / vmin) + 2)
            hol = spec.slash((1, 0, 0, 1)).holomorphic(B)
            func = lambda x: F_numeric(spec, x) - qexp_numeric(hol, x)
        for tau in samples:
            val = xi_numeric(func, tau, step)
            err = max(err, float(abs(val - target(mpmath.mpc(tau)))))
    return err


def elliptic_law_sides(spec, gamma, tau):
    """Both sides of the elliptic step used for gamma in the group of F (numerically).

    lhs = mu~(u (a tau' + lam b), -(c tau + d)/2; tau'),
    rhs = (-1)^{k + l + m + n} e(...) mu~(u tau', -1/2; tau').
    """
    a, b, c, d = gamma
    u, lam = spec.u, spec.lam
    tau = mpmath.mpc(tau)
    tp = _mpf(lam) * tau
    lhs = mutilde_numeric(_mpf(u) * (a * tp + _mpf(lam * b)), -(c * tau + d) / 2, tp)
    k = u * (a - 1)
    l = u * lam * b
    m = -Fraction(c, 2) / lam
    n = -Fraction(d - 1, 2)
    for x in (k, l, m, n):
        if x.denominator != 1:
            raise ValueError("gamma is not in the group of F")
    km = _mpf(k - m)
    expo = 1j * mpmath.pi * km**2 * tp + 2j * mpmath.pi * km * (_mpf(u) * tp + 0.5)
    sign = -1 if (k + l + m + n) % 2 else 1
    rhs = sign * mpmath.exp(expo) * mutilde_numeric(_mpf(u) * tp, -0.5, tp)
    return lhs, rhs


def modular_law_sides(spec, gamma, tau):
    """F(gamma tau) against the transformed right-hand side (numerically).

    The right side is v(gamma')^{-3} (c tau + d)^{1/2} e(...) mu~(X, -(c tau + d)/2; tau')
    with gamma' = (a, lam b; c / lam, d).
    """
    a, b, c, d = gamma
    u, lam = spec.u, spec.lam
    gp = (a, lam * b, Fraction(c) / lam, d)
    if any(Fraction(x).denominator != 1 for x in gp):
        raise ValueError("gamma' is not integral")
    gp = tuple(int(x) for x in gp)
    tau = mpmath.mpc(tau)
    tp = _mpf(lam) * tau
    j = c * tau + d
    gt = (a * tau + b) / j
    lhs = F_numeric(spec, gt) / to_mpc(spec.scale)
    c0 = _mpf(-spec.prefactor_exponent / spec.rescale)
    X = _mpf(u) * (a * tp + _mpf(lam * b))
    inner = (gp[2] * (X + j / 2) ** 2) / j
    v = to_mpc(eta_multiplier(gp))
    rhs = (
        -mpmath.exp(-2j * mpmath.pi * c0 * _mpf(spec.rescale) * gt)
        * v**-3
        * mpmath.sqrt(j)
        * mpmath.exp(-1j * mpmath.pi * inner)
        * mutilde_numeric(X, -j / 2, tp)
    )
    return lhs, rhs
