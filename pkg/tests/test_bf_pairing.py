from fractions import Fraction

import pytest

from bfpairing.bf_pairing import (
    CharacterError,
    _constant_term,
    bf_pair,
    candidates_for_level,
    character_check,
    petersson_eta8_numeric,
    psl_representatives,
    theta_level,
    unary_candidates,
)
from bfpairing.exact_arith import CycloScalar, zeta
from bfpairing.mock_eichler import MockSpec
from bfpairing.modular_group import CongruenceGroup
from bfpairing.qseries import QExpansion
from bfpairing.theta_forms import ShiftedLattice, UnaryThetaSpec

T112 = UnaryThetaSpec(1, 1, 2)
T113, T213 = UnaryThetaSpec(1, 1, 3), UnaryThetaSpec(2, 1, 3)
G144 = CongruenceGroup(144, 12)


def keys(ths):
    return {th.key() for th in ths}


def test_unary_candidates():
    assert keys(unary_candidates(3)) == {(1, 1, 3), (2, 1, 3), (1, 2, 3)}
    # N = 1: 2h = 0 mod 2 for h in {0, 1} when t = 1, and M = 1 when t = 2
    assert unary_candidates(1) == []
    assert all(not th.is_zero() for th in unary_candidates(9))


def test_candidates_for_octagonal_level():
    got = keys(candidates_for_level(432))
    assert got == {(1, 1, 3), (2, 1, 3), (1, 2, 3), (1, 3, 9), (2, 3, 9), (1, 6, 9)}
    for th in candidates_for_level(432):
        assert 432 % theta_level(th) == 0


def test_constant_term_includes_n_zero():
    f = QExpansion({0: 3, 1: 1}, 3)
    h = QExpansion({-1: 2, 0: 5}, 3)
    total, terms = _constant_term(f, h)
    assert total == CycloScalar.rational(3 * 5 + 1 * 2)
    assert sorted(n for n, _, _ in terms) == [0, 1]


def test_self_pairing_112():
    rep = bf_pair(T112.to_source(), T112, CongruenceGroup(64, 8))
    assert rep.total == Fraction(1, 192)
    assert not rep.character_mismatch
    assert rep.index == 2 * rep.psl_index


@pytest.mark.parametrize("levels", [(128, 8), (64, 16)])
def test_self_pairing_independent_of_group(levels):
    assert bf_pair(T112.to_source(), T112, CongruenceGroup(*levels)).total == Fraction(1, 192)


def test_self_pairing_matches_petersson_integral():
    num = petersson_eta8_numeric(CongruenceGroup(64, 8))
    assert abs(num - 1 / 192) < 1e-4 / 192


def test_psl_representatives_count():
    G = CongruenceGroup(64, 8)
    assert len(psl_representatives(G)) == G.psl_index()


def test_self_pairings_level_144():
    assert bf_pair(T113.to_source(), T113, G144, check_characters=False).total == Fraction(1, 288)
    assert bf_pair(T213.to_source(), T213, G144, check_characters=False).total == Fraction(1, 288)


def test_distinct_thetas_are_orthogonal():
    assert bf_pair(T113.to_source(), T213, G144).is_zero
    assert bf_pair(T213.to_source(), T113, G144, check_characters=False).is_zero


def test_bilinearity_in_f():
    c = zeta(3)
    f = T113.to_source() + T213.to_source().scale(c)
    for H in (T113, T213):
        lhs = bf_pair(f, H, G144, check_characters=False).total
        rhs = (bf_pair(T113.to_source(), H, G144, check_characters=False).total
               + c * bf_pair(T213.to_source(), H, G144, check_characters=False).total)
        assert lhs == rhs
    assert bf_pair(f, T213, G144).total == c * Fraction(1, 288)


def test_bilinearity_in_H():
    # scaling the mock form scales the pairing; no conjugation enters
    f = T213.to_source()
    H = MockSpec.preimage(T213)
    H2 = MockSpec(H.h, H.t, H.N, rescale=H.rescale / H.t, scale=H.scale * zeta(5) * 3)
    assert bf_pair(f, H2, G144, check_characters=False).total == zeta(5) * 3 * Fraction(1, 288)


def test_character_check_detects_non_eigenfunction():
    # theta_{1,1,2} and theta_{1,1,3} have different characters on this group
    G = CongruenceGroup(144, 24)
    f = T112.to_source() + T113.to_source()
    with pytest.raises(CharacterError):
        character_check(f, T113, G)


def test_lattice_theta_pairs_to_zero_against_unrelated_shadow():
    # sums of three squares have no unary theta component: the cusp terms cancel
    f = ShiftedLattice([[2, 0, 0], [0, 2, 0], [0, 0, 2]], [0, 0, 0]).to_source(4)
    rep = bf_pair(f, T112, CongruenceGroup(64, 8))
    assert rep.is_zero and not rep.character_mismatch
    assert sum(1 for _, c, _ in rep.per_cusp if not c.is_zero()) >= 2


@pytest.mark.slow
def test_octagonal_pairings_vanish_non_vacuously(octagonal_result):
    res = octagonal_result
    assert res.orthogonal
    assert len(res.reports) == 6
    mism = {r.label for r in res.reports if r.character_mismatch}
    assert mism == {"vartheta_1,2,3", "vartheta_1,6,9"}
    for r in res.reports:
        if not r.character_mismatch:
            assert sum(1 for _, c, _ in r.per_cusp if not c.is_zero()) >= 2


@pytest.mark.slow
def test_negative_control(negative_control):
    assert not negative_control.character_mismatch
    assert negative_control.total == Fraction(1, 288)


def test_rescaled_pairing_scales_by_one_half():
    # f = vartheta_{2,1,3}(tau/4); xi of F_{2,1,3}(tau/4) is f / 2, and the Petersson
    # norm of g(tau/4) is 4^{3/2} = 8 times that of g, so the pairing is 8 / (2 * 288)
    f = T213.to_source().rescale(Fraction(1, 4))
    rep = bf_pair(f, MockSpec(2, 1, 3, rescale=Fraction(1, 4)), G144)
    assert rep.total == Fraction(1, 72)
