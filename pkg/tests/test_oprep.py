import numpy as np
import pytest
import sympy

from ellfk import dunkl as dk
from ellfk.freealg import three_term
from ellfk.oprep import (
    MAX_POLE_RETRIES,
    DivisionFailure,
    ExactPolySpace,
    GroupAlgebraOperator,
    ParamError,
    TestFunctionBank,
    TypeAFamily,
    apply_divided_word,
    b2_sn_functions,
    conjugation_check,
    divided_difference,
    functional_equation_suite,
    g2_constraint_check,
    g2_lambda_constrained,
    lam_vec_from_simple,
    lambda_values,
    make_family,
    operator_residual,
    robust_points,
    square_check,
    truncated_dunkl,
    verify_operator_identity,
)
from ellfk.roots import root_system
from ellfk.scalars import EllipticContext, ParamSet, PoleError, SamplePlan, jacobi_sn

PLAN = SamplePlan(rng_seed=4, num_points=6)


# group-algebra operators


def test_composition_matches_sequential_application():
    rs = root_system("B2")
    ops = make_family("bfv_rational_exp", rs, lam_vec=[0.2, -0.1], k=0.7)
    A, B = ops[0], ops[2]
    bank = TestFunctionBank(2, seed=0)
    pts = PLAN.points(2)
    AB = A.compose(B)
    for F in bank:
        # apply B first, then A, by wrapping B F as a function
        BF = lambda P, F=F: B.apply(F, P)  # noqa: E731
        assert np.allclose(AB.apply(F, pts), A.apply(BF, pts), atol=1e-10)


def test_operator_algebra_basics():
    I = GroupAlgebraOperator.identity(2)
    m = GroupAlgebraOperator.multiplication(2, lambda P: P[:, 0])
    bank = TestFunctionBank(2, seed=1)
    pts = PLAN.points(2)
    assert operator_residual((m + I) - I, bank, pts, m) < 1e-14
    assert operator_residual(m.scale(2.0), bank, pts, m + m) < 1e-14
    assert (I @ m).num_group_elements() == 1


def test_bank_has_enough_functions():
    assert len(TestFunctionBank(3, seed=0)) >= 8
    with pytest.raises(ValueError):
        TestFunctionBank(3, seed=0, size=2)


def test_robust_points_gives_up_after_retries():
    with pytest.raises(PoleError):
        robust_points(PLAN, 2, ok=lambda p: False)
    assert MAX_POLE_RETRIES == 5


# exact divided differences


def test_divided_difference_examples():
    space = ExactPolySpace(root_system("A2"))
    x1, x2, x3 = space.gens
    i12 = root_system("A2").index_of_name("12")
    assert divided_difference(space, i12, space.poly(x1)).as_expr() == 1
    assert divided_difference(space, i12, space.poly(x1**2)).as_expr() == x1 + x2
    assert divided_difference(space, i12, space.poly(x3)).is_zero


def test_divided_difference_nilcoxeter_relations():
    rs = root_system("A2")
    space = ExactPolySpace(rs)
    a, b = rs.index_of_name("12"), rs.index_of_name("23")
    rng = np.random.default_rng(2)
    for _ in range(3):
        p = space.random_poly(rng)
        assert apply_divided_word(space, [a, a], p).is_zero
        assert apply_divided_word(space, [a, b, a], p) == apply_divided_word(space, [b, a, b], p)


def test_divided_difference_reports_nonzero_remainder(monkeypatch):
    space = ExactPolySpace(root_system("A2"))
    # a broken reflection makes the numerator indivisible by the root form
    monkeypatch.setattr(space, "reflect", lambda idx, p: space.poly(0))
    with pytest.raises(DivisionFailure):
        divided_difference(space, 0, space.poly(space.gens[0] + 1))


def test_irrational_reflections_have_no_exact_space():
    with pytest.raises(ParamError):
        ExactPolySpace(root_system("G2"))


def test_numeric_divided_difference_agrees_with_exact():
    rs = root_system("B2")
    space = ExactPolySpace(rs)
    ops = make_family("divided_difference", rs)
    x1, x2 = space.gens
    p = space.poly(3 * x1**3 * x2 - x2**2 + x1)
    F = sympy.lambdify((x1, x2), p.as_expr(), "numpy")
    pts = PLAN.points(2)
    for idx in range(rs.num_positive):
        q = divided_difference(space, idx, p)
        G = sympy.lambdify((x1, x2), q.as_expr(), "numpy")
        num = ops[idx].apply(lambda P: F(P[:, 0], P[:, 1]), pts)
        assert np.allclose(num, G(pts[:, 0], pts[:, 1]) * np.ones(len(pts)), atol=1e-9)


# type A families


@pytest.mark.parametrize("kind", ["elliptic", "trig", "rational"])
def test_square_is_psi(kind):
    fam = TypeAFamily(kind, ParamSet.random(3, seed=5), include_rational=True)
    for i, j in [(1, 2), (1, 3), (2, 3)]:
        assert square_check(fam, i, j, PLAN).passed


def test_square_without_rational_part_misses_psi():
    fam = TypeAFamily("elliptic", ParamSet.random(3, seed=5))
    assert not square_check(fam, 1, 2, PLAN).passed


@pytest.mark.parametrize("kind", ["elliptic", "trig", "rational", "multiparam"])
def test_truncated_dunkl_operators_commute(kind):
    fam = TypeAFamily(kind, ParamSet.random(4, seed=6), include_rational=kind != "multiparam")
    bank = TestFunctionBank(4, seed=0)
    pts = fam.points(PLAN)
    for i, j in [(1, 2), (1, 4), (2, 3)]:
        Di, Dj = truncated_dunkl(i, fam), truncated_dunkl(j, fam)
        assert operator_residual(Di @ Dj - Dj @ Di, bank, pts) < 1e-9


@pytest.mark.parametrize("kind", ["elliptic", "trig", "rational", "multiparam"])
def test_relations_act_as_zero(kind):
    fam = TypeAFamily(kind, ParamSet.random(4, seed=7))
    assert verify_operator_identity(three_term(4, 1, 2, 3), fam, PLAN).passed
    B = lambda i, j: dk.B(4, i, j)  # noqa: E731
    assert verify_operator_identity(B(1, 2) * B(3, 4) - B(3, 4) * B(1, 2), fam, PLAN).passed
    assert not verify_operator_identity(B(1, 2) * B(2, 3), fam, PLAN).passed


def test_bracket_square_matches_relation_coefficient():
    fam = TypeAFamily("elliptic", ParamSet.random(3, seed=8))
    target = dk.B(3, 1, 2) * dk.B(3, 1, 2) - dk.AlgElem.scalar(3, dk.P(1, 2) - dk.W(1, 2))
    assert verify_operator_identity(target, fam, PLAN).passed


def test_family_rejects_bad_kind_and_coincident_spectra():
    p = ParamSet.random(3, seed=0)
    with pytest.raises(ParamError):
        TypeAFamily("quartic", p)
    q = ParamSet.from_json({**p.to_json(), "Lambda": [1.0, 1.0, 2.0]})
    with pytest.raises(ParamError):
        TypeAFamily("multiparam", q)


# functional equations, conjugation, G2


def test_functional_equations_pass():
    reps = functional_equation_suite(SamplePlan(rng_seed=0, num_points=20))
    assert len(reps) == 7
    assert all(r.passed for r in reps), [(r.name, r.max_residual) for r in reps]


def test_functional_equations_fail_under_perturbation():
    reps = functional_equation_suite(SamplePlan(rng_seed=0, num_points=20), perturb=0.1)
    assert not any(r.passed for r in reps), [(r.name, r.max_residual) for r in reps]


def test_sn_displayed_eps_fails_four_term_equation():
    reps = functional_equation_suite(SamplePlan(rng_seed=0, num_points=20), eps_convention="displayed")
    by_name = {r.name: r for r in reps}
    assert not by_name["functional equation (3)"].passed


def test_sn_long_root_function_at_k0_is_half_angle_cot():
    fs = b2_sn_functions(1.0, 1.0, 1.0, 0.0)
    z = np.array([0.3 + 0.1j, -0.7 + 0.2j])
    # 1/sn(eps z, 1) = coth(z/(2i)) = i cot(z/2)
    assert np.allclose(fs["long"](z), 1j / np.tan(z / 2))
    assert np.allclose(fs["short"](z), 1 / np.sin(z))
    assert fs["k_tilde"] == 1


def test_b2_sn_family_operators_build():
    ops = make_family("b2_sn", root_system("B2"), modulus=0.4)
    assert len(ops) == 4
    with pytest.raises(ParamError):
        make_family("b2_sn", root_system("A2"))


@pytest.mark.parametrize("tag", ["A2", "B2", "G2"])
@pytest.mark.parametrize("sign", [-1, 1])
def test_conjugation_identity(tag, sign):
    rs = root_system(tag)
    lam = np.random.default_rng(3).normal(size=len(rs.simple)) * 0.3
    assert conjugation_check(rs, sign, lam, 0.8, PLAN).passed


def test_conjugation_fails_with_wrong_scale():
    # k = 0.8 on the left, k = 1 on the right
    rs = root_system("B2")
    rep = conjugation_check(rs, -1, [0.2, 0.1], 0.8, PLAN)
    assert rep.passed
    from ellfk import oprep

    D = oprep.make_family("bfv_rational_exp", rs, lam_vec=lam_vec_from_simple(rs, [0.2, 0.1]), k=0.8)
    dd = oprep.make_family("divided_difference", rs)
    forms = np.array([rs.vector(i) for i in range(rs.num_positive)])
    pts = robust_points(PLAN, 2, lambda p: np.min(np.abs(forms @ p)) > 0.05, forms=forms)
    assert operator_residual(D[0], TestFunctionBank(2, seed=0), pts, dd[0]) > 1e-3


def test_g2_constraint_passes_and_fails():
    ok = g2_constraint_check(0.21, -0.13, PLAN)
    assert ok.passed and ok.details["lambda_matches_coroot_pairing"]
    assert not g2_constraint_check(0.21, -0.13, PLAN, violation=0.1).passed
    assert g2_constraint_check(0.0, 0.0, PLAN).passed


def test_g2_constrained_lambda_is_coroot_pairing():
    rs = root_system("G2")
    vals = g2_lambda_constrained(0.3, 0.7)
    from_weights = lambda_values(rs, lam_vec_from_simple(rs, [0.3, 0.7]))
    assert np.allclose([vals[nm] for nm in rs.names], from_weights)


def test_sn_helper_consistency():
    # sn(u, 0) = sin u feeds the k = 0 case of the short-root function
    assert abs(jacobi_sn(0.4, 0.0) - np.sin(0.4)) < 1e-15


def test_elliptic_context_passes_through():
    fam = TypeAFamily("elliptic", ParamSet.random(3, seed=1), EllipticContext(tau=0.2 + 1.3j))
    assert fam.ctx.tau == 0.2 + 1.3j
