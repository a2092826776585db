import itertools
from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from ellfk.freealg import (
    DENSE_LIMIT,
    AlgElem,
    BackendMismatch,
    DegreeBoundExceeded,
    RelationSet,
    compose,
    degenerate,
    inverse,
    is_zero_mod_ideal,
    pair,
    relation_generators,
    three_term,
    word_perm,
)
from ellfk.freealg import _lsq_residual
from ellfk.oprep import TypeAFamily, verify_operator_identity
from ellfk.scalars import AtomPoly, ParamSet, SamplePlan, atom

N = 4
PARAMS = ParamSet.random(5, seed=0)


def B(i, j, n=N):
    return AlgElem.bracket(n, i, j)


def W(i, j):
    return AtomPoly.from_atom(atom("W", i, j))


def X(i):
    return AtomPoly.from_atom(atom("x", i))


# words and products


def test_bracket_antisymmetry():
    assert B(2, 1) == -B(1, 2)
    assert pair(3, 1) == ((1, 3), -1)


def test_bracket_out_of_range():
    with pytest.raises(ValueError):
        AlgElem.bracket(3, 1, 4)


def test_word_perm_is_product_of_transpositions():
    assert word_perm(((1, 2),), 3) == (2, 1, 3)
    w = ((1, 2), (2, 3))
    assert word_perm(w, 3) == compose(word_perm(((1, 2),), 3), word_perm(((2, 3),), 3))


def test_coefficient_moves_with_twist():
    # [12] x_1 = x_2 [12]
    lhs = B(1, 2) * AlgElem.scalar(N, X(1))
    rhs = AlgElem.scalar(N, X(2)) * B(1, 2)
    assert lhs == rhs


def test_w_atom_twists_through_brackets():
    # [12] W_13 = W_23 [12]
    assert B(1, 2) * AlgElem.scalar(N, W(1, 3)) == AlgElem.scalar(N, W(2, 3)) * B(1, 2)


def test_spectral_atom_is_central():
    P = AlgElem.scalar(N, AtomPoly.from_atom(atom("P", 1, 3)))
    assert B(1, 2) * P == P * B(1, 2)


def test_degree_and_grades():
    e = B(1, 2) * B(2, 3) + AlgElem.scalar(N, 3)
    assert e.degree() == 2
    assert word_perm(((1, 2), (2, 3)), N) in e.grades()


def test_json_roundtrip():
    e = AlgElem.scalar(N, W(1, 2) + 2) * B(1, 2) * B(3, 4) - B(2, 3)
    assert AlgElem.from_json(N, e.to_json()) == e


def test_sum_of_thetas_vanishes():
    total = AlgElem.zero(N)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i != j:
                total = total + B(i, j)
    assert total.is_zero()


@given(st.permutations([1, 2, 3, 4]), st.permutations([1, 2, 3, 4]))
def test_permutation_helpers(p, q):
    p, q = tuple(p), tuple(q)
    assert compose(p, inverse(p)) == (1, 2, 3, 4)
    assert inverse(compose(p, q)) == compose(inverse(q), inverse(p))


@st.composite
def words(draw, n=N, max_len=3):
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    length = draw(st.integers(0, max_len))
    return [pairs[draw(st.integers(0, len(pairs) - 1))] for _ in range(length)]


@given(words(), words(), words())
def test_multiplication_associative(a, b, c):
    A, Bw, C = (AlgElem.word(N, w, X(1) + W(1, 2)) for w in (a, b, c))
    assert (A * Bw) * C == A * (Bw * C)


# relation sets


def test_relation_counts():
    rs = RelationSet(4, "psi_zero")
    gens = relation_generators(rs)
    kinds = [k for k, _ in gens]
    assert kinds.count("i") == 6
    assert kinds.count("ii") == 3
    assert kinds.count("iii") == 8


def test_squares_by_kind():
    assert RelationSet(3, "psi_zero").square(1, 2).is_zero()
    assert RelationSet(3, "multiparam").square(1, 2) == AtomPoly.from_atom(atom("P", 1, 2))
    el = RelationSet(3, "elliptic", PARAMS).square(1, 2)
    assert el == AtomPoly.from_atom(atom("P", 1, 2)) - W(1, 2)


def test_numeric_relation_set_needs_params():
    with pytest.raises(ValueError):
        RelationSet(3, "trig")


def test_degenerate_exact_p_values():
    rs = degenerate(RelationSet(3, "psi_zero"), "multiparam", kappa=Fraction(2), Lambda=[0, 1, 3])
    assert rs.p_values[(1, 3)] == Fraction(2, 9)
    with pytest.raises(ValueError):
        degenerate(rs, "multiparam", kappa=1, Lambda=[1, 1, 2])


# membership


@pytest.mark.parametrize("kind", ["elliptic", "trig", "rational"])
def test_generators_are_members_numeric(kind):
    rs = RelationSet(4, kind, PARAMS)
    for _, r in relation_generators(rs):
        cert = is_zero_mod_ideal(r, rs)
        assert cert.verdict and cert.max_residual < 1e-10


@pytest.mark.parametrize("kind", ["psi_zero", "multiparam"])
def test_generators_are_members_exact(kind):
    rs = RelationSet(4, kind)
    for _, r in relation_generators(rs):
        assert is_zero_mod_ideal(r, rs).verdict


def test_consequence_needs_two_sided_multiples():
    rs = RelationSet(4, "elliptic", PARAMS)
    rel = B(1, 2) * B(3, 4) - B(3, 4) * B(1, 2)
    target = B(1, 4) * three_term(4, 1, 2, 3) * B(2, 4) + B(3, 4) * rel * B(1, 3)
    assert is_zero_mod_ideal(target, rs).verdict
    assert not is_zero_mod_ideal(target + B(1, 2) * B(2, 3) * B(3, 4) * B(1, 2), rs).verdict


@pytest.mark.parametrize("kind", ["elliptic", "psi_zero", "multiparam"])
def test_non_member_rejected(kind):
    rs = RelationSet(3, kind, PARAMS if kind == "elliptic" else None)
    cert = is_zero_mod_ideal(B(1, 2, 3) * B(2, 3, 3), rs)
    assert not cert.verdict


def test_braid_relation_separates_families():
    # holds with psi = 0, fails once [ij]^2 is a nonconstant function
    braid = B(1, 2, 3) * B(2, 3, 3) * B(1, 2, 3) - B(2, 3, 3) * B(1, 2, 3) * B(2, 3, 3)
    assert is_zero_mod_ideal(braid, RelationSet(3, "psi_zero")).verdict
    assert not is_zero_mod_ideal(braid, RelationSet(3, "elliptic", PARAMS)).verdict


def test_degree_bound_errors():
    rs = RelationSet(3, "psi_zero")
    with pytest.raises(DegreeBoundExceeded):
        is_zero_mod_ideal(B(1, 2, 3) * B(1, 2, 3), rs, degree_bound=1)


def test_rank_mismatch():
    with pytest.raises(BackendMismatch):
        is_zero_mod_ideal(B(1, 2, 3), RelationSet(4, "psi_zero"))


def test_exact_backend_rejects_x_dependent_relation_coefficients():
    rs = RelationSet(3, "multiparam")
    target = AlgElem.scalar(3, W(1, 2)) * B(1, 2, 3)
    with pytest.raises(BackendMismatch):
        is_zero_mod_ideal(target, rs)


def test_certificate_is_deterministic():
    rs = RelationSet(4, "elliptic", PARAMS)
    t = B(1, 2) * B(2, 3) + B(2, 3) * B(3, 1) + B(3, 1) * B(1, 2)
    a = is_zero_mod_ideal(t, rs, plan=SamplePlan(rng_seed=5)).to_json()
    b = is_zero_mod_ideal(t, rs, plan=SamplePlan(rng_seed=5)).to_json()
    assert a == b


def test_numeric_verdict_agrees_with_operator_oracle():
    # independent check: the three-term relation acts as zero in the Calogero-Moser representation
    fam = TypeAFamily("elliptic", PARAMS)
    rep = verify_operator_identity(three_term(5, 1, 2, 3), fam, SamplePlan(rng_seed=3))
    assert rep.passed
    bad = verify_operator_identity(B(1, 2, 5) * B(2, 3, 5), fam, SamplePlan(rng_seed=3))
    assert not bad.passed


def test_sparse_least_squares_path():
    rng = np.random.default_rng(0)
    rows, cols = 600, 900
    assert rows * cols > DENSE_LIMIT
    M = sp.random(rows, cols, density=0.004, random_state=1, format="csr") + sp.eye(rows, cols, format="csr")
    M = M.astype(complex)
    inside = M @ rng.standard_normal(cols)
    assert _lsq_residual(M, inside) < 1e-10
    # a vector orthogonal to the column space of a rank-deficient M is not reached
    Md = M[:, : rows - 50]
    y = rng.standard_normal(rows)
    dense = Md.toarray()
    c, *_ = np.linalg.lstsq(dense, y, rcond=None)
    expected = np.linalg.norm(dense @ c - y) / max(1, np.linalg.norm(y))
    assert abs(_lsq_residual(Md, y) - expected) < 1e-8
