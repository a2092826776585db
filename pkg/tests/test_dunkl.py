import itertools
from dataclasses import replace
from fractions import Fraction

import pytest

from ellfk import dunkl as dk
from ellfk.freealg import AlgElem
from ellfk.scalars import AtomPoly, ParamSet, SamplePlan

PLAN = SamplePlan(rng_seed=3, num_points=5)


def elliptic(n, **kw):
    return dk.Setting(n, "elliptic", plan=PLAN, **kw)


# building blocks


def test_theta_is_sum_of_brackets():
    n = 4
    expected = dk.B(n, 2, 1) + dk.B(n, 2, 3) + dk.B(n, 2, 4)
    assert dk.theta(2, n) == expected


def test_thetas_sum_to_zero():
    n = 4
    total = AlgElem.zero(n)
    for i in range(1, n + 1):
        total = total + dk.theta(i, n)
    assert total.is_zero()


def test_perfect_matchings_count():
    # (2m - 1)!! matchings of 2m points
    assert len(list(dk.perfect_matchings([1, 2]))) == 1
    assert len(list(dk.perfect_matchings([1, 2, 3, 4]))) == 3
    assert len(list(dk.perfect_matchings(range(1, 7)))) == 15
    assert list(dk.perfect_matchings([])) == [()]


def test_phi_of_four_points():
    expected = dk.W(1, 2) * dk.W(3, 4) + dk.W(1, 3) * dk.W(2, 4) + dk.W(1, 4) * dk.W(2, 3)
    assert dk.phi_of([1, 2, 3, 4]) == expected
    assert dk.phi_of([]) == AtomPoly.const(1)
    with pytest.raises(ValueError):
        dk.phi_of([1, 2, 3])
    with pytest.raises(ValueError):
        dk.phi_of([1, 2], conv="mu")


def test_phi_lambda_reading_uses_spectral_atoms():
    assert dk.phi_of([2, 5], "lambda") == dk.P(2, 5)


def test_ek_small_cases():
    assert dk.ek_poly([1, 2, 3], 0) == {(): AtomPoly.const(1)}
    e1 = dk.ek_poly([1, 2, 3], 1)
    assert set(e1) == {(1,), (2,), (3,)}
    e2 = dk.ek_poly([1, 2], 2)
    assert e2[(1, 2)] == AtomPoly.const(1) and e2[()] == dk.P(1, 2)


def test_e3_of_three_elements():
    e3 = dk.ek_poly([1, 2, 3], 3)
    assert e3 == {(1, 2, 3): AtomPoly.const(1), (1,): dk.P(2, 3), (2,): dk.P(1, 3), (3,): dk.P(1, 2)}


def test_e4_constant_term_is_matching_sum():
    e4 = dk.ek_poly([1, 2, 3, 4], 4)
    expected = dk.P(1, 2) * dk.P(3, 4) + dk.P(1, 3) * dk.P(2, 4) + dk.P(1, 4) * dk.P(2, 3)
    assert e4[()] == expected


@pytest.mark.parametrize("k", range(0, 6))
def test_ek_insertion_order_irrelevant(k):
    for seed in range(3):
        assert dk.ek_insertion_independent([1, 2, 3, 4, 5], k, seed)


def test_ek_vanishes_above_size():
    assert dk.ek_poly([1, 2], 3) == {}


def test_star_words_counts():
    n = 5
    # one letter: a in A, b outside I
    s = dk.star_words(n, [1, 2], [1, 2], 1)
    assert len(s.terms) == 2 * 3
    assert dk.star_words(n, [1], [1], 0) == AlgElem.one(n)


def test_corollary_rhs_zero_for_odd_k():
    assert dk.corollary_rhs(4, 3).is_zero()
    assert not dk.corollary_rhs(4, 2).is_zero()


def test_printed_chain_endpoints():
    lines = dk.printed_p4_chain()
    assert len(lines) == 6
    assert lines[0] == -dk.p_k_lhs([1, 2, 3, 4], 5, 5)
    assert lines[-1] == -dk.p_k_rhs([1, 2, 3, 4], 5, 5)


# identities


@pytest.mark.parametrize("kind", ["elliptic", "trig", "rational", "psi_zero", "multiparam"])
def test_thetas_commute(kind):
    st = dk.Setting(4, kind, plan=PLAN)
    for i, j in itertools.combinations(range(1, 5), 2):
        assert dk.commutator_check(i, j, st).passed


def test_commutator_certificate_and_operator_both_recorded():
    v = dk.commutator_check(1, 2, elliptic(3))
    assert v.certificate.verdict and v.operator is not None and v.operator.passed
    assert v.to_json()["verdict"] == "member"


@pytest.mark.parametrize("indices", [(1, 2, 3), (1, 2, 3, 4)])
def test_q_k_vanishes(indices):
    assert dk.q_k_identity(indices, elliptic(4)).passed


def test_q_k_rejects_short_input():
    with pytest.raises(ValueError):
        dk.q_k_identity((1, 2), elliptic(3))


@pytest.mark.parametrize("indices", [(1, 2), (1, 2, 3)])
def test_p_k_lemma(indices):
    assert dk.p_k_identity(indices, 4, elliptic(4)).passed


def test_p_k_with_wrong_sign_fails():
    n, m, idx = 4, 4, [1, 2, 3]
    target = dk.p_k_lhs(idx, m, n) + dk.p_k_rhs(idx, m, n)
    assert not dk.certify(target, elliptic(n), "wrong sign").passed


@pytest.mark.parametrize("n,k,I", [(3, 1, (1,)), (3, 2, (1, 2)), (4, 2, (1, 3, 4)), (4, 3, (1, 2, 3))])
def test_pieri_with_x_reading(n, k, I):
    v = dk.verify_pieri(n, k, I, elliptic(n))
    assert v.passed and "x" in v.extra["winning"]


def test_lambda_reading_fails_when_pairs_occur():
    v = dk.verify_pieri(3, 2, (1, 2), elliptic(3), conv="lambda")
    assert not v.passed


def test_pieri_suite_is_consistent():
    out = dk.pieri_suite([2, 3], 2, elliptic)
    assert out["passed"] and out["convention"] == "x"


@pytest.mark.parametrize("k", [1, 2, 3])
def test_full_set_corollary(k):
    assert dk.corollary_check(4, k, elliptic(4)).passed


def test_pieri_without_pair_terms_fails():
    n, k, I = 3, 2, (1, 2)
    target = dk.ek_element(I, k, n) - dk.star_words(n, I, I, k)
    assert not dk.certify(target, elliptic(n), "no pair terms").passed


def test_pieri_rejects_k_above_size():
    with pytest.raises(ValueError):
        dk.verify_pieri(3, 3, (1, 2), elliptic(3))


def test_e3_example_readings():
    st = replace(elliptic(5), operator_check=False)
    assert dk.e3_example_check(st, "phi_x").passed
    assert not dk.e3_example_check(st, "psi").passed


# degenerations


@pytest.mark.parametrize("n,k,I", [(3, 2, (1, 2)), (4, 2, (2, 3)), (4, 3, (1, 2, 4))])
def test_equivariant_pieri(n, k, I):
    assert dk.equivariant_pieri(n, k, I).passed


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_equivariant_full_set_is_elementary_in_x(k):
    assert dk.equivariant_full_set(4, k).passed


def test_equivariant_control_fails():
    n = 3
    elems = {i: dk.theta_prime(i, n) for i in (1, 2)}
    wrong = dk.e_k_elements(elems, 2, n) - dk.equivariant_rhs(n, 1, (1, 2))
    assert not dk.certify(wrong, dk.exact_setting(n, "psi_zero"), "control").passed


@pytest.mark.parametrize("n,k,I", [(3, 2, (1, 2)), (4, 3, (1, 2, 3))])
def test_multiparam_pieri(n, k, I):
    assert dk.multiparam_pieri(n, k, I).passed


def test_multiparam_pieri_with_operator_oracle():
    # integer spectra and kappa = 2 keep p_ij = kappa / Lambda_ij^2 rational for the exact backend
    lam = (1, 2, 4)
    params = replace(ParamSet.random(3, seed=2), Lambda=lam, kappa=2)
    pv = {(i, j): Fraction(2, (lam[i - 1] - lam[j - 1]) ** 2)
          for i, j in itertools.combinations(range(1, 4), 2)}
    st = dk.Setting(3, "multiparam", params=params, plan=PLAN, p_values=pv)
    target = dk.ek_element((1, 2), 2, 3) - dk.multiparam_rhs(3, 2, (1, 2))
    v = dk.certify(target, st, "multiparam with operators")
    assert v.passed and v.operator is not None


def test_degeneration_coherence():
    v = dk.degeneration_coherence(3, 2, (1, 2))
    assert v.passed, v.extra
    assert 3.5 < v.extra["ratio"] < 4.5
