"""The nine acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line; they are printed together at the end of
the run (see conftest.py).
"""

import contextlib
import io
import json
import math
import random
import time
from fractions import Fraction

import mpmath
import pytest

from conftest import CRITERIA

from bfpairing.bf_pairing import bf_pair, petersson_eta8_numeric
from bfpairing.cli import run
from bfpairing.exact_arith import CycloScalar, cyclo_normalize, to_complex, zeta
from bfpairing.mock_eichler import (
    F_numeric,
    MockSpec,
    elliptic_law_sides,
    eta_multiplier,
    eta_multiplier_numeric,
    modular_law_sides,
    unary_theta_numeric,
    xi_check,
)
from bfpairing.modular_group import (
    CongruenceGroup,
    SL2Matrix,
    cusp_to_matrix,
    decompose_st,
    gamma0_cusp_count_formula,
    gamma0_index_formula,
)
from bfpairing.qseries import QExpansion
from bfpairing.theta_forms import (
    UnaryThetaSpec,
    chi_theta_rewrite_check,
    octagonal_product,
    polygonal_to_lattice,
    theta_expansion_infty,
)

SAMPLES = [1j, 1 / 3 + 1j, 2j]


@contextlib.contextmanager
def criterion(n):
    """Yields a dict; set 'detail'. Any exception or failed assert records FAIL."""
    info = {"detail": ""}
    try:
        yield info
    except BaseException as e:
        CRITERIA[n] = (False, f"{info['detail']} [{type(e).__name__}: {e}]".strip())
        raise
    CRITERIA[n] = (True, info["detail"])


@pytest.mark.slow
def test_criterion_1_octagonal_orthogonality(tmp_path):
    with criterion(1) as info:
        out = io.StringIO()
        t0 = time.time()
        code = run(["almost-universal", "--m", "8", "--a", "1", "--b", "3", "--c", "3", "--no-cache"], stdout=out)
        dt = time.time() - t0
        assert code == 0
        res = json.loads(out.getvalue())
        totals = res["totals"]
        info["detail"] = f"{len(totals)} candidates on {res['group']}, totals {sorted(set(totals.values()))}, {dt:.0f}s"
        assert len(totals) == 6
        assert all(v == "0" for v in totals.values())
        assert res["orthogonal"]
        assert dt < 600


def test_criterion_2_product_identity():
    with criterion(2) as info:
        lat, _, _ = polygonal_to_lattice(8, 1, 3, 3)
        prod = octagonal_product(101)
        enum = theta_expansion_infty(lat, Fraction(101, 3)).rescale(3).scale(8)
        info["detail"] = f"{len(prod.terms)} exponents below 101 compared exactly"
        assert prod == enum
        assert prod.bound == 101


def test_criterion_3_chi_rewrite():
    with criterion(3) as info:
        info["detail"] = "exact to exponent 200; mutated sign rejected"
        assert chi_theta_rewrite_check(200)
        assert not chi_theta_rewrite_check(200, mutate=True)


def test_criterion_4_xi_image():
    with criterion(4) as info:
        err = xi_check(MockSpec(2, 1, 3), SAMPLES, step=1e-4)
        s4 = MockSpec(2, 1, 3, rescale=Fraction(1, 4))
        quarter = lambda tau: unary_theta_numeric(2, 1, 3, tau / 4) / 4  # noqa: E731
        half = lambda tau: unary_theta_numeric(2, 1, 3, tau / 4) / 2  # noqa: E731
        err_q = xi_check(s4, SAMPLES, step=1e-4, target=quarter)
        err_h = xi_check(s4, SAMPLES, step=1e-4, target=half)
        info["detail"] = (f"xi error {err:.2e}; rescaled identity with factor 1/4: {err_q:.2e} "
                          f"(factor 1/2 gives {err_h:.2e})")
        assert err < 1e-6
        assert err_q < 1e-6


def test_criterion_5_transformation_laws():
    with criterion(5) as info:
        spec = MockSpec(2, 1, 3)
        taus = [mpmath.mpc(0.1, 0.9), mpmath.mpc(-0.3, 1.4)]
        worst = 0.0
        with mpmath.workdps(40):
            for tau in taus:
                for g in [(1, 0, 144, 1), (13, 12, 144, 133)]:
                    lhs, rhs = elliptic_law_sides(spec, g, tau)
                    worst = max(worst, float(abs(lhs - rhs) / max(1, abs(rhs))))
                    lhs, rhs = modular_law_sides(spec, g, tau / 50)
                    worst = max(worst, float(abs(lhs - rhs) / max(1, abs(rhs))))
                # the S-law: F | S from the exact data against F(-1/tau) tau^{-1/2}
                direct = F_numeric(spec, -1 / tau) / mpmath.sqrt(tau)
                law = spec.slash((0, -1, 1, 0)).numeric(tau)
                worst = max(worst, float(abs(law - direct) / max(1, abs(direct))))
        # eta multipliers on 20 elements of Gamma_0(144) cap Gamma_1(12)
        G = CongruenceGroup(144, 12)
        rng = random.Random(7)
        gens = sorted({tuple(h) for *_, h in G.schreier_generators() if h.c != 0})
        mats = rng.sample(gens, 20)
        eta_err = 0.0
        with mpmath.workdps(30):
            for g in mats:
                a, b, c, d = g
                tau = mpmath.mpc(-mpmath.mpf(d) / c + 0.1 / c, 1 / mpmath.mpf(abs(c)))
                eta_err = max(eta_err, abs(to_complex(eta_multiplier(g)) - complex(eta_multiplier_numeric(g, tau))))
        info["detail"] = f"laws {worst:.1e} at 2 tau; eta multipliers {eta_err:.1e} on {len(mats)} matrices"
        assert worst < 1e-8
        assert eta_err < 1e-10
        assert all(SL2Matrix(*g) in G for g in mats)


def _random_sl2(rng, size):
    while True:
        c, d = rng.randint(-size, size), rng.randint(-size, size)
        if c and math.gcd(c, d) == 1:
            a = pow(d, -1, abs(c))
            k = rng.randint(-3, 3)
            return SL2Matrix(a + k * c, (a * d - 1) // c + k * d, c, d)


def test_criterion_6_word_decomposition():
    with criterion(6) as info:
        rng = random.Random(6)
        longest = 0
        for _ in range(1000):
            g = _random_sl2(rng, 10**6)
            w = decompose_st(g)
            assert w.matrix() == g
            assert len(w) <= 2 * math.log2(abs(g.c)) + 4
            longest = max(longest, len(w))
        info["detail"] = f"1000 matrices reconstructed, longest word {longest}"


def test_criterion_7_group_combinatorics():
    with criterion(7) as info:
        for M in range(1, 201):
            G = CongruenceGroup(M)
            assert G.index() == gamma0_index_formula(M), M
            assert len(G.cusp_set()) == gamma0_cusp_count_formula(M), M
        G = CongruenceGroup(108)
        assert G.index() == 216 and len(G.cusp_set()) == 18
        info["detail"] = "Gamma_0(M), M <= 200; Gamma_0(108): index 216, 18 cusps"


def test_criterion_8_self_pairing():
    with criterion(8) as info:
        th = UnaryThetaSpec(1, 1, 2)
        G = CongruenceGroup(64, 8)
        rep = bf_pair(th.to_source(), th, G)
        val = rep.total.to_fraction()
        num = petersson_eta8_numeric(G)
        rel = abs(num - float(val)) / float(val)
        info["detail"] = f"<vartheta_1,1,2, vartheta_1,1,2> = {val} exactly, numeric {num:.10f}, rel err {rel:.1e}"
        assert isinstance(val, Fraction) and val > 0
        assert rel < 1e-4


@pytest.mark.slow
def test_criterion_9_property_suites(octagonal, negative_control):
    with criterion(9) as info:
        rng = random.Random(9)
        # ring axioms on random cyclotomic q-series
        def rs():
            return QExpansion({Fraction(rng.randint(-4, 12), rng.choice([1, 2, 3])):
                               zeta(rng.choice([1, 3, 4, 12]), rng.randint(0, 11)) * rng.randint(-3, 3)
                               for _ in range(rng.randint(0, 5))}, rng.randint(3, 8))
        for _ in range(200):
            f, g, h = rs(), rs(), rs()
            assert f + g == g + f and f * g == g * f
            assert (f * g) * h == f * (g * h) and f * (g + h) == f * g + f * h
        # normal form idempotence
        for _ in range(200):
            x = sum((zeta(rng.choice([5, 8, 12, 24]), rng.randint(0, 23)) * rng.randint(-4, 4) for _ in range(4)),
                    CycloScalar.zero)
            assert cyclo_normalize(cyclo_normalize(x)) == cyclo_normalize(x)
        # two paths to the same cusp differ by one unit
        _, f, group, _ = octagonal
        h = SL2Matrix(13, 96, 2592, 19141)
        assert h in group
        for cusp in [(1, 2), (1, 3), (0, 1)]:
            g = cusp_to_matrix(*cusp)
            e1, e2 = f.slash_expansion(h * g, 3), f.slash_expansion(g, 3)
            r = e1.terms[min(e1.terms)] / e2.terms[min(e2.terms)]
            assert e1 == e2.scale(r) and abs(abs(to_complex(r)) - 1) < 1e-12
        # bilinearity
        t1, t2 = UnaryThetaSpec(1, 1, 3), UnaryThetaSpec(2, 1, 3)
        G = CongruenceGroup(144, 12)
        c = zeta(3) * 2
        mix = t1.to_source() + t2.to_source().scale(c)
        lhs = bf_pair(mix, t2, G, check_characters=False).total
        rhs = (bf_pair(t1.to_source(), t2, G, check_characters=False).total
               + c * bf_pair(t2.to_source(), t2, G, check_characters=False).total)
        assert lhs == rhs
        # negative control: f + vartheta_{2,1,3} against the pre-image of vartheta_{2,1,3}
        nc = negative_control.total
        info["detail"] = f"ring, normal form, two-path, bilinearity; negative control total {nc}"
        assert not nc.is_zero() and nc == Fraction(1, 288)
