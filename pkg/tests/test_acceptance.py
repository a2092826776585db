"""The ten acceptance criteria, each timed against its budget.

Every test records one PASS/FAIL line; the lines are printed together in
the terminal summary (and immediately with ``-s``).
"""

import itertools
import json
import time
from contextlib import contextmanager
from dataclasses import replace

import mpmath
import numpy as np
import pytest

from ellfk import cli
from ellfk import dunkl as dk
from ellfk import oprep
from ellfk.nichols import b2_relations, hilbert_series, kernel_contains
from ellfk.roots import root_system
from ellfk.scalars import EllipticContext, ParamSet, SamplePlan, jacobi_sn, sigma_lambda, theta1, wp

pytestmark = pytest.mark.slow

PLAN = SamplePlan(rng_seed=11, num_points=5)
TOL = 1e-8


@contextmanager
def criterion(log, number, title, budget):
    """Collect (name, ok) checks; the criterion passes if all hold within ``budget`` seconds."""
    checks = []
    t0 = time.perf_counter()
    try:
        yield checks
    finally:
        elapsed = time.perf_counter() - t0
        bad = [name for name, ok in checks if not ok]
        ok = bool(checks) and not bad and elapsed < budget
        line = f"AC{number:02d} {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.1f}s / {budget:.0f}s, {len(checks)} checks)"
        if bad:
            line += f"  failing: {', '.join(bad[:5])}"
        log.append(line)
        print(line)
    assert checks and not bad, bad
    assert elapsed < budget, f"{elapsed:.1f}s over the {budget}s budget"


def elliptic(n, **kw):
    return dk.Setting(n, "elliptic", plan=PLAN, tol=TOL, **kw)


def test_ac01_dunkl_elements_commute(acceptance_log):
    with criterion(acceptance_log, 1, "Dunkl elements commute, n = 3, 4, 5", 60) as checks:
        for n in (3, 4, 5):
            st = elliptic(n)
            ex = dk.Setting(n, "multiparam", plan=PLAN)
            assert st.plan.num_points >= 5
            for i, j in itertools.combinations(range(1, n + 1), 2):
                v = dk.commutator_check(i, j, st)
                checks.append((f"elliptic n={n} [{i},{j}]", v.passed and v.certificate.max_residual < TOL))
                checks.append((f"multiparam n={n} [{i},{j}]", dk.commutator_check(i, j, ex).passed))


def test_ac02_cyclic_sums_vanish(acceptance_log):
    with criterion(acceptance_log, 2, "cyclic sums Q_k vanish, k = 3, 4, 5 in rank 5", 120) as checks:
        st = elliptic(5)
        ex = dk.Setting(5, "multiparam", plan=PLAN)
        for k in (3, 4, 5):
            for idx in [tuple(range(1, k + 1)), tuple(range(5, 5 - k, -1))]:
                checks.append((f"elliptic Q{k}{idx}", dk.q_k_identity(idx, st).passed))
                checks.append((f"multiparam Q{k}{idx}", dk.q_k_identity(idx, ex).passed))


def test_ac03_bracket_sum_lemma(acceptance_log):
    with criterion(acceptance_log, 3, "bracket-sum lemma, k = 2, 3, 4, and the worked k = 4 chain", 120) as checks:
        st = elliptic(5)
        for k in (2, 3, 4):
            checks.append((f"P_{k}", dk.p_k_identity(list(range(1, k + 1)), 5, st).passed))
        v = dk.printed_p4_check(st)
        checks.append(("worked chain steps", all(s["verdict"] for s in v.extra["steps"])))
        checks.append(("chain starts at -lhs", v.extra["first_line_is_minus_lhs"]))
        checks.append(("chain ends at -rhs", v.extra["last_line_is_minus_rhs"]))


def test_ac04_pieri_formula(acceptance_log):
    with criterion(acceptance_log, 4, "Pieri formula n <= 5, k <= 3, all I; worked E_3; full-set corollary", 600) as checks:
        suite = dk.pieri_suite([2, 3, 4, 5], 3, elliptic)
        bad = [v.identity for v in suite["verdicts"] if not v.passed]
        checks.append((f"{len(suite['verdicts'])} Pieri instances", not bad))
        checks.append(("one phi reading wins every instance", suite["consistent"] and suite["convention"] == "x"))
        st5 = replace(elliptic(5), operator_check=False)
        checks.append(("worked E_3 example", dk.e3_example_check(st5, "phi_x").passed))
        for n in (3, 4, 5):
            for k in (1, 2, 3):
                checks.append((f"full set n={n} k={k}", dk.corollary_check(n, k, elliptic(n)).passed))
            checks.append((f"odd k has no constant, n={n}", dk.corollary_rhs(n, 3).is_zero()))


def test_ac05_equivariant_degeneration(acceptance_log):
    with criterion(acceptance_log, 5, "equivariant degeneration, exact", 60) as checks:
        for n in range(2, 6):
            for size in range(1, n + 1):
                for I in itertools.combinations(range(1, n + 1), size):
                    for k in range(1, min(3, size) + 1):
                        checks.append((f"e_{k}{I} n={n}", dk.equivariant_pieri(n, k, I).passed))
            for k in range(1, n + 1):
                checks.append((f"e_{k}(theta') = e_{k}(x), n={n}", dk.equivariant_full_set(n, k).passed))


def test_ac06_multiparameter_degeneration(acceptance_log):
    with criterion(acceptance_log, 6, "multiparameter degeneration, exact and as a limit", 300) as checks:
        for n in range(2, 6):
            for size in range(1, n + 1):
                for I in itertools.combinations(range(1, n + 1), size):
                    for k in range(1, min(3, size) + 1):
                        checks.append((f"E_{k}{I} n={n}", dk.multiparam_pieri(n, k, I).passed))
        for n, k, I in [(3, 2, (1, 2)), (4, 3, (1, 2, 3)), (5, 2, (2, 4))]:
            v = dk.degeneration_coherence(n, k, I, delta=1e-3, tol=1e-4)
            checks.append((f"coherence n={n} E_{k}{I}", v.passed))


def test_ac07_operator_families(acceptance_log):
    with criterion(acceptance_log, 7, "operator families, functional equations, conjugation, G2", 120) as checks:
        for kind in ("elliptic", "trig", "rational"):
            fam = oprep.TypeAFamily(kind, ParamSet.random(4, seed=2), include_rational=True)
            for i, j in itertools.combinations(range(1, 5), 2):
                rep = oprep.square_check(fam, i, j, PLAN, TOL)
                checks.append((f"{kind} D{i}{j}^2", rep.passed))
        fe_plan = SamplePlan(rng_seed=0, num_points=20)
        for r in oprep.functional_equation_suite(fe_plan):
            checks.append((f"{r.name} holds", r.passed))
        for r in oprep.functional_equation_suite(fe_plan, perturb=0.1):
            checks.append((f"{r.name} perturbed fails", not r.passed))
        for tag in ("A2", "B2", "G2"):
            rs = root_system(tag)
            lam = np.random.default_rng(5).normal(size=len(rs.simple)) * 0.3
            for sign in (-1, 1):
                checks.append((f"conjugation {tag} {sign:+d}", oprep.conjugation_check(rs, sign, lam, 0.9, PLAN).passed))
        checks.append(("G2 constrained", oprep.g2_constraint_check(0.21, -0.13, PLAN).passed))
        checks.append(("G2 violated fails", not oprep.g2_constraint_check(0.21, -0.13, PLAN, violation=0.1).passed))


def test_ac08_braided_symmetrizer(acceptance_log):
    with criterion(acceptance_log, 8, "braided symmetrizer ranks and B2 relations", 300) as checks:
        b2 = hilbert_series("B2", 5)
        ranks = [r["rank"] for r in b2]
        checks.append(("B2 ranks 1,4,8,12,14,12", ranks == [1, 4, 8, 12, 14, 12]))
        checks.append(("B2 ranks exact", all(r["method"] == "exact" for r in b2)))
        rs = root_system("B2")
        space = oprep.ExactPolySpace(rs)
        rng = np.random.default_rng(0)
        polys = [space.random_poly(rng, max_degree=5, num_terms=10) for _ in range(3)]
        for fam, elems in b2_relations(rs).items():
            checks.append((f"family ({fam}) in kernel", all(kernel_contains(e) for e in elems)))
            checks.append((f"family ({fam}) kills polynomials",
                           all(oprep.braided_tensor_acts_as_zero(e, space, polys) for e in elems)))
        a2 = hilbert_series("A2", 4)
        checks.append(("A2 total dimension 12", sum(r["rank"] for r in a2) == 12))


def test_ac09_special_functions(acceptance_log):
    ctx = EllipticContext()
    rng = np.random.default_rng(9)
    pts = 0.45 * (rng.uniform(-1, 1, 20) + 1j * rng.uniform(-1, 1, 20))
    lams = 0.45 * (rng.uniform(-1, 1, 20) + 1j * rng.uniform(-1, 1, 20))

    def close(a, b):
        return abs(a - b) <= 1e-9 * max(1.0, abs(b))

    with criterion(acceptance_log, 9, "special functions at 20 seeded points", 10) as checks:
        q = mpmath.exp(1j * mpmath.pi * ctx.tau)
        for z, lam in zip(pts, lams):
            t = theta1(z, ctx)
            checks.append(("theta1 vs mpmath", close(t, complex(mpmath.jtheta(1, mpmath.pi * z, q)))))
            checks.append(("theta1 odd", close(theta1(-z, ctx), -t)))
            checks.append(("theta1(z+1)", close(theta1(z + 1, ctx), -t)))
            rhs = -np.exp(-1j * np.pi * ctx.tau - 2j * np.pi * z) * t
            checks.append(("theta1(z+tau)", close(theta1(z + ctx.tau, ctx), rhs)))
            w = wp(z, ctx)
            checks.append(("wp even", close(wp(-z, ctx), w)))
            checks.append(("wp periods", close(wp(z + 1, ctx), w) and close(wp(z + ctx.tau, ctx), w)))
            checks.append(("sigma product", close(sigma_lambda(z, lam, ctx) * sigma_lambda(-z, lam, ctx),
                                                  wp(lam, ctx) - wp(z, ctx))))
            checks.append(("sn(u, 0) = sin u", close(jacobi_sn(4 * z, 0.0), np.sin(4 * z))))
        doubled = ctx.doubled()
        checks.append(("theta1 truncation N -> 2N", max(abs(theta1(pts, ctx) - theta1(pts, doubled))) < 1e-9))
        checks.append(("wp truncation N -> 2N", all(close(wp(z, doubled), wp(z, ctx)) for z in pts)))


SUITES = [
    ["verify", "identities", "--n", "4"],
    ["verify", "pieri", "--n", "3", "--k", "2"],
    ["verify", "operators", "--n", "3"],
    ["verify", "funceq"],
    ["hilbert", "--type", "B2", "--max-degree", "4"],
    ["degenerate", "--n", "3", "--k", "2"],
]


def test_ac10_determinism_and_controls(acceptance_log, tmp_path):
    with criterion(acceptance_log, 10, "identical reports for identical seeds; controls rejected", 600) as checks:
        for argv in SUITES:
            name = " ".join(argv[:2])
            out = tmp_path / "report.json"
            blobs = []
            for _ in range(2):
                code = cli.main(argv + ["--seed", "17", "-o", str(out)])
                blobs.append(out.read_bytes())
            checks.append((f"{name} exit 0", code == 0))
            checks.append((f"{name} byte-identical", blobs[0] == blobs[1]))
            rep = json.loads(blobs[0])
            controls = [r for r in rep["results"] if r["expected"] is False]
            checks.append((f"{name} has controls", bool(controls)))
            checks.append((f"{name} controls rejected", all(not r["passed"] for r in controls)))
