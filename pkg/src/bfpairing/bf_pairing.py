"""The Bruinier-Funke pairing <f, xi H> from expansions at the cusps.

With absolute exponents, Stokes on a fundamental domain of Gamma gives

    <f, xi H> = (1/[PSL2(Z) : Gamma-bar]) sum_rho N_rho CT(f_rho H_rho^+)

where f_rho = f | gamma_rho, H_rho = H | gamma_rho and N_rho is the cusp width.
The formula needs f H to be Gamma-invariant in weight 2.  That is checked on the
Schreier generators; when the characters of f and H disagree the pairing
vanishes by orthogonality of characters and is reported as such.
"""

from fractions import Fraction
from math import lcm

import numpy as np
from scipy import integrate

from .exact_arith import CycloScalar, to_string
from .mock_eichler import MockSpec
from .modular_group import CongruenceGroup, SL2Matrix, scaled_hnf
from .qseries import QExpansion, TruncationError
from .theta_forms import ThetaSource, UnaryThetaSpec, _lower_valuation, polygonal_to_lattice

ZERO = CycloScalar.zero


class CharacterError(ValueError):
    """f or H is not an eigenfunction of the group."""


class PairingReport:
    def __init__(self, group, f_label, H, per_cusp, total, character_mismatch=False, mismatch_at=None):
        self.group = group
        self.f_label = f_label
        self.H = H
        self.index = group.index()
        self.psl_index = group.psl_index()
        self.per_cusp = per_cusp
        self.total = total
        self.character_mismatch = character_mismatch
        self.mismatch_at = mismatch_at

    @property
    def is_zero(self):
        return self.total.is_zero()

    @property
    def label(self):
        return self.H.shadow_label

    def to_json(self):
        return {
            "group": self.group.label(),
            "index": self.index,
            "psl_index": self.psl_index,
            "minus_identity": self.group.contains_minus_identity(),
            "f": self.f_label,
            "H": self.H.label,
            "shadow": self.label,
            "character_mismatch": self.character_mismatch,
            "mismatch_at": None if self.mismatch_at is None else list(self.mismatch_at),
            "cusps": [
                {
                    "cusp": cd.label,
                    "width": cd.width,
                    "regular": cd.regular,
                    "contribution": to_string(contrib),
                    "terms": [[str(n), to_string(a), to_string(b)] for n, a, b in terms],
                }
                for cd, contrib, terms in self.per_cusp
            ],
            "total": to_string(self.total),
            "is_zero": self.is_zero,
        }

    def __repr__(self):
        flag = " (character mismatch)" if self.character_mismatch else ""
        return f"PairingReport({self.f_label} vs {self.label}: {self.total}{flag})"


class PairedForm:
    """A MockSpec together with the label of its shadow (what the pairing is against)."""

    def __init__(self, spec, shadow_label):
        self.spec = spec
        self.shadow_label = shadow_label

    @property
    def label(self):
        return self.spec.label

    def slash(self, g):
        return self.spec.slash(g)


def _as_paired(H):
    if isinstance(H, PairedForm):
        return H
    if isinstance(H, UnaryThetaSpec):
        return PairedForm(MockSpec.preimage(H), H.label)
    return PairedForm(H, f"xi({H.label})")


# --- characters -----------------------------------------------------------------


def _vec_ratio(v1, v2):
    """r with v1 = r v2 for dicts of CycloScalars, or None."""
    if set(v1) != set(v2):
        return None
    r = None
    for k, x in v1.items():
        y = v2[k]
        if r is None:
            r = x / y
        elif x != r * y:
            return None
    return r


def _source_ratio(s1, s2):
    """Structural ratio of two slashed sources (same term list), or None."""
    r = None
    for (c1, p1), (c2, p2) in zip(s1, s2):
        e1 = any(not v for _, _, v in p1)
        e2 = any(not v for _, _, v in p2)
        if e1 or e2:
            if e1 != e2:
                return None
            continue
        rt = c1 / c2
        for (f1, U1, v1), (f2, U2, v2) in zip(p1, p2):
            if f1 is not f2 or U1 != U2:
                return None
            x = _vec_ratio(v1, v2)
            if x is None:
                return None
            rt = rt * x
        if r is None:
            r = rt
        elif r != rt:
            return None
    return r if r is not None else CycloScalar.one


def _expansion_ratio(e1, e2):
    if e1.is_zero() and e2.is_zero():
        return CycloScalar.one
    if set(e1.terms) != set(e2.terms):
        return None
    return _vec_ratio(e1.terms, e2.terms)


def _f_ratio(f, g1, g2, cache):
    s1 = cache(g1)
    s2 = cache(g2)
    r = _source_ratio(s1, s2)
    if r is None:
        lo = min(_lower(s1), _lower(s2))
        B = lo + 4
        r = _expansion_ratio(f.slash_expansion(g1, B), f.slash_expansion(g2, B))
    return r


def _lower(slashed):
    out = None
    for _, parts in slashed:
        if any(not v for _, _, v in parts):
            continue
        v = sum(_lower_valuation(fam, U, vec) for fam, U, vec in parts)
        out = v if out is None else min(out, v)
    return out if out is not None else Fraction(0)


def _h_ratio(H, g1, g2, cache):
    a, b = cache(g1), cache(g2)
    if a.shape() == b.shape():
        return a.const / b.const
    B = Fraction(4) + max(-a.ell * a.U[0] / a.U[2], -b.ell * b.U[0] / b.U[2], 0)
    return _expansion_ratio(a.holomorphic(B), b.holomorphic(B))


def character_check(f, H, group):
    """Compare f | x and H | x along the Schreier graph of group.

    Returns (ok, first_mismatch).  ok means chi_f chi_H = 1 on every Schreier
    generator; raises CharacterError when f or H is not an eigenfunction.
    """
    H = _as_paired(H)
    reps = group.coset_representatives()
    fcache, hcache = {}, {}

    def fslash(g):
        if g not in fcache:
            fcache[g] = f.slashed_terms(g)
        return fcache[g]

    def hslash(g):
        if g not in hcache:
            hcache[g] = H.slash(g)
        return hcache[g]

    mismatch = None
    for i, gname, j, h in group.schreier_generators():
        x = reps[i] * (SL2Matrix(0, -1, 1, 0) if gname == "S" else SL2Matrix(1, 1, 0, 1))
        y = reps[j]
        rf = _f_ratio(f, x, y, fslash)
        if rf is None:
            raise CharacterError(f"{f.label} is not an eigenfunction of {tuple(h)}")
        rh = _h_ratio(H, x, y, hslash)
        if rh is None:
            raise CharacterError(f"{H.label} is not an eigenfunction of {tuple(h)}")
        if (rf * rh) != CycloScalar.one and mismatch is None:
            mismatch = tuple(h)
    return mismatch is None, mismatch


# --- the pairing ----------------------------------------------------------------


def _constant_term(fe, he):
    terms = []
    total = ZERO
    for e, c in sorted(he.terms.items()):
        a = fe.coefficient(-e)
        if not a.is_zero():
            terms.append((-e, a, c))
            total = total + a * c
    return total, terms


def cusp_contribution(f, H, cusp, reject_irregular=False):
    """(N_rho CT(f_rho H_rho^+), term list) at one cusp."""
    if reject_irregular and not cusp.regular:
        raise ValueError(f"irregular cusp {cusp.label}")
    g = cusp.gamma_rho
    sl = H.slash(g)
    fs = f.slashed_terms(g)
    lo = _lower(fs)
    # H^+ is needed up to -val(f); f up to -val(H^+)
    he = sl.holomorphic(-lo + 1)
    if he.is_zero():
        return ZERO, []
    vh = he.valuation()
    fe = f.slash_expansion(g, -vh + 1)
    he = he.truncate(-lo + 1)
    ct, terms = _constant_term(fe, he)
    return ct * cusp.width, terms


def bf_pair(f, H, group, check_characters=True, reject_irregular=False):
    """Exact <f, xi H> on group; H is a MockSpec, PairedForm or a UnaryThetaSpec (its preimage)."""
    H = _as_paired(H)
    if check_characters:
        ok, where = character_check(f, H, group)
        if not ok:
            return PairingReport(group, f.label, H, [], ZERO, True, where)
    per_cusp = []
    total = ZERO
    for cd in group.cusp_set():
        contrib, terms = cusp_contribution(f, H, cd, reject_irregular)
        per_cusp.append((cd, contrib, terms))
        total = total + contrib
    total = total * Fraction(1, group.psl_index())
    return PairingReport(group, f.label, H, per_cusp, total)


# --- candidates and the end-to-end report ------------------------------------------


def _squarefree(n):
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def unary_candidates(N):
    """All nonzero vartheta_{h,t,N}, t a squarefree divisor of 2N, one per +- pair."""
    out = []
    for t in range(1, 2 * N + 1):
        if (2 * N) % t or not _squarefree(t):
            continue
        M = 2 * N // t
        for h in range(M):
            if (2 * h) % M == 0:
                continue
            if (M - h) % M < h:
                continue
            out.append(UnaryThetaSpec(h, t, N))
    return out


def theta_level(theta):
    """Level 4 t M^2 of sum_{r = h mod M} r q^{t r^2}, M = 2N/t."""
    M = theta.modulus
    return 4 * theta.t * M * M


def candidates_for_level(L):
    """Nonzero unary thetas of level dividing L, one per +- pair.

    sum_{r = h mod M} r q^{t r^2} has level 4 t M^2; with N = t M / 2 it is
    vartheta_{h,t,N}, and (h mod M, t) determines it.
    """
    out = []
    for t in range(1, L + 1):
        if L % t or not _squarefree(t):
            continue
        M = 1
        while 4 * t * M * M <= L:
            if L % (4 * t * M * M) == 0 and (t * M) % 2 == 0:
                N = t * M // 2
                out.extend(th for th in unary_candidates(N) if th.t == t)
            M += 1
    return out


class OrthogonalityResult:
    def __init__(self, lattice, source, group, reports):
        self.lattice = lattice
        self.source = source
        self.group = group
        self.reports = reports

    @property
    def orthogonal(self):
        return all(r.is_zero for r in self.reports)

    def to_json(self):
        cusps = self.group.cusp_set()
        return {
            "group": self.group.label(),
            "index": self.group.index(),
            "cusps": [cd.to_json() for cd in cusps],
            "totals": {r.label: to_string(r.total) for r in self.reports},
            "character_mismatch": {r.label: r.character_mismatch for r in self.reports},
            "orthogonal": self.orthogonal,
        }


def octagonal_setup(m, a, b, c):
    """(lattice, f, group, candidates) for p_m(x) + ... in the tau -> 4 tau frame.

    f(tau) = Theta_{L+nu}(4 s tau) with s the exponent denominator, so that the
    unary thetas appear unrescaled.  The group is Gamma_0(L) cap Gamma_1(M1) with
    L the level of f and M1 covering f's factors and every candidate's preimage.
    """
    L_obj, _, _ = polygonal_to_lattice(m, a, b, c)
    s = L_obj.exponent_denominator()
    f = L_obj.to_source(4 * s)
    f.label = f"Theta_L+nu(p{m};{a},{b},{c})"
    level, M1 = 1, 1
    for _, fs in f.terms:
        for x in fs:
            lev = 4 * x.family.m * x.K
            if lev.denominator != 1:
                raise ValueError("non-integral level")
            level = lcm(level, int(lev))
            M1 = lcm(M1, 2 * x.family.m)
    cands = candidates_for_level(level)
    for th in cands:
        M1 = lcm(M1, 2 * th.modulus)
    return L_obj, f, CongruenceGroup(level, M1), cands


def orthogonality_report(m, a, b, c, group=None, use_filter=False, progress=None):
    lat, f, g0, cands = octagonal_setup(m, a, b, c)
    group = group or g0
    reports = []
    for th in cands:
        H = _as_paired(th)
        if use_filter:
            ok, where = character_check(f, H, group)
            if not ok:
                reports.append(PairingReport(group, f.label, H, [], ZERO, True, where))
                continue
            rep = bf_pair(f, H, group, check_characters=False)
        else:
            rep = bf_pair(f, H, group)
        reports.append(rep)
        if progress:
            progress(rep)
    return OrthogonalityResult(lat, f, group, reports)


# --- numerical Petersson oracle ------------------------------------------------------


def _eta_cubed(w, terms=60):
    n = np.arange(terms)
    k = (2 * n + 1).astype(float)
    coef = ((-1.0) ** n) * k
    return np.exp(2j * np.pi * np.multiply.outer(w, k * k / 8)) @ coef


def petersson_eta8_numeric(group, x_nodes=48, ymax=None):
    """<vartheta, vartheta> for vartheta = eta(8 tau)^3 = vartheta_{1,1,2}, numerically.

    Uses |eta(8 g tau)|^6 Im(g tau)^{3/2} = 8^{-3/2} phi((A tau + B)/D) with
    phi = |eta|^6 v^{3/2} invariant, summed over PSL2 coset representatives of
    group and integrated over the standard fundamental domain.
    """
    Us = [tuple(float(x) for x in scaled_hnf(8, g)[1]) for g in psl_representatives(group)]
    Us = np.array(Us)
    A, B, D = Us[:, 0], Us[:, 1], Us[:, 2]
    smin = float((A / D).min())
    if ymax is None:
        ymax = 45.0 / (np.pi * smin / 4)

    def phi_sum(x, y):
        tau = x + 1j * y
        w = (A * tau + B) / D
        v = w.imag
        e = _eta_cubed(w)
        return float(np.sum(np.abs(e) ** 2 * v**1.5)) / y**2

    xs, wx = np.polynomial.legendre.leggauss(x_nodes)
    xs, wx = xs / 2, wx / 2
    total = 0.0
    for x, wt in zip(xs, wx):
        y0 = np.sqrt(1 - x * x)
        # split the y range so quad sees both the bulk and the slow tail
        pts = [y0, 2.0, 8.0, 32.0, 128.0, ymax]
        pts = [p for p in pts if p >= y0]
        s = 0.0
        for lo, hi in zip(pts, pts[1:]):
            val, _ = integrate.quad(lambda y: phi_sum(x, y), lo, hi, limit=200, epsabs=0, epsrel=1e-10)
            s += val
        total += wt * s
    return total / 8**1.5 / group.psl_index()


def psl_representatives(group):
    """One SL2 representative per coset of +-Gamma."""
    seen, out = set(), []
    for g in group.coset_representatives():
        if group.coset_key(g) in seen:
            continue
        seen.add(group.coset_key(g))
        seen.add(group.coset_key(-g))
        out.append(g)
    return out
