from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bfpairing.exact_arith import sqrt_rational, to_complex, zeta
from bfpairing.modular_group import S, CongruenceGroup, SL2Matrix, T_pow, cusp_to_matrix, decompose_st
from bfpairing.qseries import QExpansion
from bfpairing.theta_forms import (
    ShiftedLattice,
    ThetaSpec,
    ThetaVector,
    UnaryThetaSpec,
    WeilFamily,
    _factor_slash,
    chi_theta_rewrite_check,
    expansion_at_cusp,
    octagonal_product,
    polygonal_series,
    polygonal_to_lattice,
    theta_expansion_infty,
    theta_numeric,
    theta_transform,
)

BIG_THETA = ThetaSpec((0,), ((2,),), 1)


def cube_oracle(gram, shift, bound, radius=9):
    # plain loop over a generous cube, no ellipsoid reasoning
    n = len(gram)
    terms = {}
    for j in product(range(-radius, radius + 1), repeat=n):
        x = [j[i] + Fraction(shift[i]) for i in range(n)]
        e = sum(gram[i][k] * x[i] * x[k] for i in range(n) for k in range(n)) / 2
        if e < bound:
            terms[e] = terms.get(e, 0) + 1
    return QExpansion(terms, bound)


@pytest.mark.parametrize(
    "gram,shift,bound",
    [
        ([[2, 0, 0], [0, 2, 0], [0, 0, 2]], [0, 0, 0], 30),
        ([[2, 1, 0], [1, 2, 0], [0, 0, 4]], [0, 0, 0], 25),
        ([[6, 0, 0], [0, 18, 0], [0, 0, 18]], [Fraction(-1, 3)] * 3, 50),
        ([[2, 1], [1, 4]], [Fraction(1, 2), Fraction(1, 5)], 40),
        ([[4, 0, 0], [0, 4, 0], [0, 0, 8]], [Fraction(1, 4), 0, Fraction(1, 2)], 20),
    ],
)
def test_enumeration_matches_cube(gram, shift, bound):
    lat = ShiftedLattice(gram, shift)
    assert theta_expansion_infty(lat, bound) == cube_oracle(gram, shift, bound)


def test_lattice_validation():
    with pytest.raises(ValueError):
        ShiftedLattice([[1, 2], [2, 1]], [0, 0])
    with pytest.raises(ValueError):
        ShiftedLattice([[2, 1], [0, 2]], [0, 0])


def test_classical_theta():
    e = theta_expansion_infty(BIG_THETA, 10)
    assert e == QExpansion({0: 1, 1: 2, 4: 2, 9: 2}, 10)


def test_unary_theta_coefficients():
    e = theta_expansion_infty(UnaryThetaSpec(2, 1, 3), 101)
    assert e == QExpansion({4: 2, 16: -4, 64: 8, 100: -10}, 101)
    # the factor form produces the same series
    assert UnaryThetaSpec(2, 1, 3).to_source().expansion_infty(101) == e


@pytest.mark.parametrize("h,t,N", [(1, 1, 3), (2, 1, 3), (1, 3, 9), (3, 2, 5), (1, 1, 2)])
def test_unary_odd_symmetry(h, t, N):
    a = UnaryThetaSpec(h, t, N).expansion(200)
    b = UnaryThetaSpec(-h, t, N).expansion(200)
    assert (a + b).is_zero()


def test_shimura_odd_symmetry():
    A = ((3, 0, 0), (0, 9, 0), (0, 0, 9))
    for h in [(3, 0, 0), (0, 1, 2), (3, 3, 3)]:
        up = ThetaSpec(h, A, 9, P=(1, 0, 0)).expansion(20)
        down = ThetaSpec(tuple(-x for x in h), A, 9, P=(1, 0, 0)).expansion(20)
        assert (up + down).is_zero()


def test_shimura_factor_form_agrees():
    spec = ThetaSpec((2, 0, 2), ((2, 0, 0), (0, 4, 0), (0, 0, 2)), 4)
    assert spec.to_source().expansion_infty(5) == spec.expansion(5)
    spec = ThetaSpec((1, 1), ((2, 0), (0, 2)), 2, P=(1, 3))
    assert spec.to_source().expansion_infty(5) == spec.expansion(5)


def test_octagonal_lattice_and_product():
    lat, const, scale = polygonal_to_lattice(8, 1, 3, 3)
    assert const == Fraction(7, 3) and scale == 1
    prod = octagonal_product(101)
    assert prod.coefficient(7) == 8 and prod.coefficient(10) == 8 and prod.coefficient(16) == 16
    assert prod.coefficient(13) == 0
    # enumeration of the shifted lattice, then tau -> 3 tau and the eight sign classes
    assert prod == theta_expansion_infty(lat, Fraction(101, 3)).rescale(3).scale(8)


def test_octagonal_brute_force_forms():
    # x^2 + 3y^2 + 3z^2 with 3 not dividing xyz
    terms = {}
    r = 11
    for x, y, z in product(range(-r, r + 1), repeat=3):
        if x * y * z % 3 and x * x + 3 * y * y + 3 * z * z < 101:
            e = x * x + 3 * y * y + 3 * z * z
            terms[e] = terms.get(e, 0) + 1
    assert octagonal_product(101) == QExpansion(terms, 101)


@pytest.mark.parametrize("m,a,b,c", [(3, 1, 1, 1), (4, 1, 1, 1), (8, 1, 3, 3), (5, 1, 2, 3)])
def test_polygonal_lattice_matches_direct_sum(m, a, b, c):
    lat, const, scale = polygonal_to_lattice(m, a, b, c)
    bound = 40
    direct = polygonal_series(m, a, b, c, bound)
    theta = theta_expansion_infty(lat, bound + const)
    assert theta.shift(-const) == direct


def test_triangular_first_exponent():
    lat, const, _ = polygonal_to_lattice(3, 1, 1, 1)
    assert const == Fraction(3, 8)
    assert theta_expansion_infty(lat, 2).valuation() == Fraction(3, 8)


def test_squares_shift_trivial():
    lat, const, _ = polygonal_to_lattice(4, 1, 1, 1)
    assert const == 0 and all(x.denominator == 1 for x in lat.shift)


def test_zero_exponent_counts_zero_vector():
    for lat in [ShiftedLattice([[2]], [0]), ShiftedLattice([[2, 0], [0, 6]], [Fraction(1, 3), 0]),
                polygonal_to_lattice(8, 1, 3, 3)[0]]:
        has_zero = all(x.denominator == 1 for x in lat.shift)
        assert theta_expansion_infty(lat, 1).coefficient(0) == (1 if has_zero else 0)


def test_chi_rewrite():
    assert chi_theta_rewrite_check(30)
    assert chi_theta_rewrite_check(200)
    assert chi_theta_rewrite_check(1)
    assert not chi_theta_rewrite_check(30, mutate=True)


def test_chi_rewrite_explicit_terms():
    from bfpairing.theta_forms import chi_theta_expansion

    assert chi_theta_expansion(-3, 30) == QExpansion({1: 2, 4: -4, 16: 8, 25: -10}, 30)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(3, 0), (3, 1), (4, 0), (6, 1), (9, 1)]), st.integers(0, 20), st.integers(-6, 6),
       st.integers(-6, 6))
def test_t_powers_compose(fam, label, m1, m2):
    family = WeilFamily(*fam)
    v = ThetaVector.basis(family, label)
    one_by_one = theta_transform(theta_transform(v, ("T", m1)), ("T", m2))
    assert one_by_one == theta_transform(v, ("T", m1 + m2))


@pytest.mark.parametrize("m,p", [(3, 0), (3, 1), (4, 0), (9, 1)])
def test_s_squared(m, p):
    # S^2 = -I acts by the constant (sqrt(i) sqrt(i))^{-(2p+1)} = i^{-(2p+1)}
    family = WeilFamily(m, p)
    unit = zeta(4, -(2 * p + 1))
    for a in range(2 * m):
        v = ThetaVector.basis(family, a)
        w = theta_transform(theta_transform(v, ("S", 1)), ("S", 1))
        expected = ThetaVector(family, {b: c * unit for b, c in v.coeffs.items()})
        assert w == expected


def test_t_phase_conductor():
    fam = WeilFamily(6, 1)
    v = theta_transform(ThetaVector.basis(fam, 4), ("T", 1))
    (c,) = v.coeffs.values()
    assert 24 % c.conductor == 0


def test_identity_cusp_is_infinity():
    lat = polygonal_to_lattice(8, 1, 3, 3)[0]
    src = lat.to_source(12)
    assert expansion_at_cusp(src, decompose_st(SL2Matrix(1, 0, 0, 1)), 60) == theta_expansion_infty(lat, 5).rescale(12)


def test_theta_at_cusp_zero_constant():
    e = expansion_at_cusp(BIG_THETA.to_source(), decompose_st(S), 2)
    assert e.coefficient(0) == zeta(8, -1) * sqrt_rational(Fraction(1, 2))


def numeric_slash(src, gamma, tau):
    tau = mpmath.mpc(tau)
    gt = (gamma.a * tau + gamma.b) / (gamma.c * tau + gamma.d)
    j = gamma.c * tau + gamma.d
    k = mpmath.mpf(src.weight.numerator) / src.weight.denominator
    return complex(theta_numeric(src, gt, terms=300) * j ** (-k))


SOURCES = {
    "Theta": BIG_THETA.to_source(),
    "vartheta213": UnaryThetaSpec(2, 1, 3).to_source(),
    "octagonal": polygonal_to_lattice(8, 1, 3, 3)[0].to_source(12),
}
# the octagonal series is dense at small cusps; a shorter truncation suffices at these tau
BOUNDS = {"Theta": 40, "vartheta213": 40, "octagonal": 12}


@pytest.mark.parametrize("name", sorted(SOURCES))
@pytest.mark.parametrize("tau", [1j, 1 + 0.5j])
def test_s_law_numeric(name, tau):
    src = SOURCES[name]
    exact = expansion_at_cusp(src, decompose_st(S), BOUNDS[name]).to_complex(tau)
    assert abs(exact - numeric_slash(src, S, tau)) < 1e-8


@pytest.mark.parametrize("name", sorted(SOURCES))
@pytest.mark.parametrize("gamma", [(2, 1, 5, 3), (-1, 0, 3, -1), (4, -1, 9, -2), (1, 0, 12, 1)])
def test_slash_numeric(name, gamma):
    src = SOURCES[name]
    g = SL2Matrix(*gamma)
    tau = 0.1 + 0.9j
    assert abs(src.slash_expansion(g, BOUNDS[name]).to_complex(tau) - numeric_slash(src, g, tau)) < 1e-8


def unit_ratio(e1, e2):
    assert set(e1.terms) == set(e2.terms) and e1.terms
    e = min(e1.terms)
    r = e1.terms[e] / e2.terms[e]
    for x in e1.terms:
        assert e1.terms[x] == e2.terms[x] * r
    return r


@pytest.mark.parametrize("cusp", [(1, 2), (1, 3), (0, 1), (1, 36)])
def test_two_paths_same_cusp(cusp):
    # gamma_rho and h gamma_rho, h in the group, differ by the multiplier only
    src = SOURCES["octagonal"]
    G = CongruenceGroup(432, 12)
    g = cusp_to_matrix(*cusp)
    for h in (SL2Matrix(1, 0, 432, 1), SL2Matrix(13, 96, 2592, 19141)):
        assert h in G
        r = unit_ratio(src.slash_expansion(h * g, 3), src.slash_expansion(g, 3))
        assert abs(abs(to_complex(r)) - 1) < 1e-12


def test_two_paths_with_translation():
    src = SOURCES["vartheta213"]
    g = cusp_to_matrix(1, 4)
    r = unit_ratio(src.slash_expansion(g * T_pow(9), 10), src.slash_expansion(g, 10).translate(9))
    assert r == 1


def test_factor_slash_cache_is_transparent():
    args = (9, 1, 6, Fraction(36), (2, 1, 5, 3))
    assert _factor_slash(*args) == _factor_slash.__wrapped__(*args)


def test_shimura_parameters_for_octagonal_lattice():
    lat = polygonal_to_lattice(8, 1, 3, 3)[0]
    match = ThetaSpec((2, 2, 2), ((6, 0, 0), (0, 18, 0), (0, 0, 18)), 3)
    assert match.expansion(60) == theta_expansion_infty(lat, 60)
    # the literal (3,9,9), diag(3,9,9), N = 9 reading at 6 tau starts with q^1
    literal = ThetaSpec((3, 9, 9), ((3, 0, 0), (0, 9, 0), (0, 0, 9)), 9).expansion(Fraction(40, 6)).rescale(6)
    assert literal.coefficient(1) == 1 and octagonal_product(40).coefficient(1) == 0
