"""Operators f((alpha, xi)) + g((alpha, xi)) s_alpha acting on functions of xi.

Group elements are orthogonal matrices on V (or C^n for type A).  The action
on functions is (w F)(xi) = F(w^{-1} xi), so

    (c g) o (d h) = (c * d(g^{-1} .)) gh,

which is what ``GroupAlgebraOperator.compose`` implements.  For a type A
bracket this gives [ij] F(xi) = g_ij(x_i - x_j) F(s_ij xi), matching the
commutation rule of the free algebra.

Identities are checked functionally: build the operator, apply it to a seeded
bank of test functions at generic points, and compare with zero.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import sympy

from .freealg import AlgElem
from .nichols import BraidedTensor
from .roots import RootSystemData, root_system
from .scalars import (
    AtomValues,
    EllipticContext,
    ParamSet,
    PoleError,
    SamplePlan,
    jacobi_sn,
    kernel_function,
    lattice_distance,
    psi_family,
)

MAX_POLE_RETRIES = 5


class DivisionFailure(ArithmeticError):
    """A divided difference left a remainder; signals a bug, never expected."""


class ParamError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Group algebra


def _key(G: np.ndarray) -> bytes:
    return (np.round(np.real(G), 9) + 0.0).tobytes()


def _twisted(d: Callable, Ginv: np.ndarray) -> Callable:
    return lambda P: d(P @ Ginv.T)


def _product(c: Callable, d: Callable) -> Callable:
    return lambda P: c(P) * d(P)


class GroupAlgebraOperator:
    """Finite sum of c_w(xi) w with callable coefficients, c_w: (P, dim) -> (P,)."""

    def __init__(self, dim: int, terms: Mapping | None = None):
        self.dim = dim
        # key -> (G, Ginv, [callables])
        self.terms: dict = dict(terms or {})

    @classmethod
    def zero(cls, dim: int) -> "GroupAlgebraOperator":
        return cls(dim)

    @classmethod
    def term(cls, G: np.ndarray, coeff: Callable) -> "GroupAlgebraOperator":
        G = np.asarray(G, dtype=float)
        Ginv = np.linalg.inv(G)
        return cls(G.shape[0], {_key(G): (G, Ginv, [coeff])})

    @classmethod
    def multiplication(cls, dim: int, coeff: Callable) -> "GroupAlgebraOperator":
        return cls.term(np.eye(dim), coeff)

    @classmethod
    def identity(cls, dim: int) -> "GroupAlgebraOperator":
        return cls.multiplication(dim, lambda P: np.ones(len(P), dtype=complex))

    def __add__(self, other: "GroupAlgebraOperator") -> "GroupAlgebraOperator":
        out = {k: (G, Gi, list(cs)) for k, (G, Gi, cs) in self.terms.items()}
        for k, (G, Gi, cs) in other.terms.items():
            if k in out:
                out[k][2].extend(cs)
            else:
                out[k] = (G, Gi, list(cs))
        return GroupAlgebraOperator(self.dim, out)

    def scale(self, c) -> "GroupAlgebraOperator":
        if callable(c):
            return GroupAlgebraOperator.multiplication(self.dim, c).compose(self)
        return GroupAlgebraOperator(
            self.dim, {k: (G, Gi, [(lambda P, f=f: c * f(P)) for f in cs]) for k, (G, Gi, cs) in self.terms.items()}
        )

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def compose(self, other: "GroupAlgebraOperator") -> "GroupAlgebraOperator":
        out: dict = {}
        for G, Gi, cs in self.terms.values():
            for H, Hi, ds in other.terms.values():
                GH = G @ H
                k = _key(GH)
                new = [_product(c, _twisted(d, Gi)) for c in cs for d in ds]
                if k in out:
                    out[k][2].extend(new)
                else:
                    out[k] = (GH, Hi @ Gi, new)
        return GroupAlgebraOperator(self.dim, out)

    __matmul__ = compose

    def num_group_elements(self) -> int:
        return len(self.terms)

    def coefficient_values(self, points: np.ndarray) -> dict:
        P = np.atleast_2d(points)
        return {k: sum(c(P) for c in cs) for k, (G, Gi, cs) in self.terms.items()}

    def apply(self, F: Callable, points: np.ndarray) -> np.ndarray:
        total, _ = self.apply_with_scale(F, points)
        return total

    def apply_with_scale(self, F: Callable, points: np.ndarray):
        """Value of (self F) at points, plus the sum of absolute term sizes."""
        P = np.atleast_2d(np.asarray(points, dtype=complex))
        total = np.zeros(len(P), dtype=complex)
        scale = np.zeros(len(P))
        for G, Gi, cs in self.terms.values():
            fv = F(P @ Gi.T)
            for c in cs:
                t = c(P) * fv
                total += t
                scale += np.abs(t)
        return total, scale


# ---------------------------------------------------------------------------
# Test functions


@dataclass
class TestFunctionBank:
    """Seeded exponentials, low-degree polynomials, and their products."""

    __test__ = False  # not a pytest class

    dim: int
    seed: int = 0
    size: int = 8
    functions: list = field(init=False, repr=False)
    labels: list = field(init=False)

    def __post_init__(self):
        if self.size < 8:
            raise ValueError("bank size must be at least 8")
        rng = np.random.default_rng(self.seed)
        self.functions, self.labels = [], []
        n_exp = self.size // 3
        n_poly = self.size // 3
        n_prod = self.size - n_exp - n_poly
        exps = [self._exp(rng) for _ in range(n_exp)]
        polys = [self._poly(rng) for _ in range(n_poly)]
        for f in exps:
            self._add(f, "exp")
        for f in polys:
            self._add(f, "poly")
        for t in range(n_prod):
            e, p = exps[t % len(exps)], polys[(t + 1) % len(polys)]
            self._add(lambda P, e=e, p=p: e(P) * p(P), "exp*poly")

    def _add(self, f, label):
        self.functions.append(f)
        self.labels.append(label)

    def _exp(self, rng):
        mu = rng.uniform(-1, 1, self.dim) + 1j * rng.uniform(-1, 1, self.dim)
        return lambda P: np.exp(np.asarray(P) @ mu)

    def _poly(self, rng, max_degree: int = 4, num_terms: int = 5):
        exps = []
        for _ in range(num_terms):
            deg = int(rng.integers(1, max_degree + 1))
            e = np.zeros(self.dim, dtype=int)
            for _ in range(deg):
                e[rng.integers(self.dim)] += 1
            exps.append(e)
        coeffs = rng.normal(size=num_terms) + 1j * rng.normal(size=num_terms)
        const = complex(rng.normal())

        def f(P, exps=exps, coeffs=coeffs, const=const):
            P = np.asarray(P)
            out = np.full(len(P), const, dtype=complex)
            for e, c in zip(exps, coeffs):
                out += c * np.prod(P**e, axis=1)
            return out

        return f

    def __iter__(self):
        return iter(self.functions)

    def __len__(self):
        return len(self.functions)


@dataclass
class IdentityReport:
    name: str
    family: str
    max_residual: float
    tol: float
    plan: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tol)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_json(self) -> dict:
        return {
            "identity": self.name,
            "family": self.family,
            "verdict": self.verdict,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "plan": self.plan,
            **({"details": self.details} if self.details else {}),
        }


def operator_residual(
    op: GroupAlgebraOperator,
    bank: TestFunctionBank,
    points: np.ndarray,
    target: GroupAlgebraOperator | None = None,
) -> float:
    """max over bank and points of |(op - target) F| / max(1, size of terms)."""
    worst = 0.0
    for F in bank:
        v, s = op.apply_with_scale(F, points)
        if target is not None:
            v2, s2 = target.apply_with_scale(F, points)
            v, s = v - v2, s + s2
        if not np.all(np.isfinite(v)):
            raise PoleError("non-finite operator value at a sample point")
        worst = max(worst, float(np.max(np.abs(v) / np.maximum(1.0, s))))
    return worst


def robust_points(plan: SamplePlan, dim: int, ok: Callable | None = None, forms=None) -> np.ndarray:
    """Sample points, each resampled at most MAX_POLE_RETRIES times if ``ok`` rejects it."""
    pts = []
    base = plan.points(dim, forms=forms)
    for idx, p in enumerate(base):
        tries = 0
        while ok is not None and not ok(p):
            tries += 1
            if tries > MAX_POLE_RETRIES:
                raise PoleError(f"sample point {idx} stays near a pole after {MAX_POLE_RETRIES} resamples")
            p = plan.with_seed(plan.rng_seed * 7919 + 31 * idx + tries).points(dim, forms=forms)[0]
        pts.append(p)
    return np.array(pts)


# ---------------------------------------------------------------------------
# Exact divided differences


class ExactPolySpace:
    """Q[x_1..x_dim] with the action of reflections with rational matrices."""

    def __init__(self, rs: RootSystemData):
        self.rs = rs
        self.dim = rs.rank
        self.gens = sympy.symbols(f"x1:{self.dim + 1}")
        self.mats = []
        for idx in range(rs.num_positive):
            M = rs.reflection_matrix(idx)
            Q = sympy.Matrix(self.dim, self.dim, lambda r, c: sympy.Rational(M[r, c]).limit_denominator(10**6))
            close = all(abs(float(Q[r, c]) - M[r, c]) < 1e-12 for r in range(self.dim) for c in range(self.dim))
            if not close or Q * Q != sympy.eye(self.dim):
                raise ParamError(f"reflection {rs.names[idx]} is not rational in this realization")
            self.mats.append(Q)

    def poly(self, expr) -> sympy.Poly:
        return sympy.Poly(expr, *self.gens, domain=sympy.QQ)

    def linear_form(self, idx: int) -> sympy.Poly:
        v = self.rs.vector(idx)
        return self.poly(sum(sympy.Rational(c).limit_denominator(10**6) * g for c, g in zip(v, self.gens)))

    def reflect(self, idx: int, p: sympy.Poly) -> sympy.Poly:
        # (s F)(xi) = F(s xi); s is an involution
        Q = self.mats[idx]
        images = list(Q * sympy.Matrix(self.gens))
        return self.poly(p.as_expr().subs(dict(zip(self.gens, images)), simultaneous=True))

    def random_poly(self, rng: np.random.Generator, max_degree: int = 4, num_terms: int = 6) -> sympy.Poly:
        expr = 0
        for _ in range(num_terms):
            c = sympy.Rational(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
            mono = 1
            for _ in range(int(rng.integers(0, max_degree + 1))):
                mono *= self.gens[int(rng.integers(self.dim))]
            expr += c * mono
        return self.poly(expr)


def divided_difference(space: ExactPolySpace, idx: int, p: sympy.Poly) -> sympy.Poly:
    """(p - s_alpha p) / (alpha, xi), divided exactly."""
    num = p - space.reflect(idx, p)
    q, r = num.div(space.linear_form(idx))
    if not r.is_zero:
        raise DivisionFailure(f"remainder {r.as_expr()} in divided difference")
    return q


def apply_divided_word(space: ExactPolySpace, word: Sequence[int], p: sympy.Poly) -> sympy.Poly:
    """d_{w1} d_{w2} ... d_{wm} p (rightmost acts first)."""
    for idx in reversed(word):
        p = divided_difference(space, idx, p)
    return p


def braided_tensor_acts_as_zero(elem: BraidedTensor, space: ExactPolySpace, polys: Sequence[sympy.Poly]) -> bool:
    for p in polys:
        total = space.poly(0)
        for word, c in elem.coeffs.items():
            total += c * apply_divided_word(space, word, p)
        if not total.is_zero:
            return False
    return True


# ---------------------------------------------------------------------------
# Operator families on root systems


def _root_operator(rs: RootSystemData, idx: int, f: Callable | None, g: Callable | None) -> GroupAlgebraOperator:
    v = rs.vector(idx)
    form = lambda P: np.asarray(P) @ v  # noqa: E731
    op = GroupAlgebraOperator.zero(rs.rank)
    if f is not None:
        op = op + GroupAlgebraOperator.multiplication(rs.rank, lambda P: f(form(P)))
    if g is not None:
        op = op + GroupAlgebraOperator.term(rs.reflection_matrix(idx), lambda P: g(form(P)))
    return op


def lambda_values(rs: RootSystemData, lam_vec) -> np.ndarray:
    """lambda(alpha^vee) for every positive root, lambda given as a vector of V."""
    lam_vec = np.asarray(lam_vec, dtype=complex)
    return np.array([lam_vec @ rs.coroot_vector(i) for i in range(rs.num_positive)])


def lam_vec_from_simple(rs: RootSystemData, simple_values) -> np.ndarray:
    """The vector sum_i lambda_{alpha_i} pi_i, i.e. lambda with prescribed values on simple coroots."""
    return np.asarray(simple_values, dtype=complex) @ rs.fundamental_weights


def make_family(family: str, rs: RootSystemData, **kw) -> dict[int, GroupAlgebraOperator]:
    """Operators D_alpha for every positive root index.

    divided_difference: (1 - s_alpha)/(alpha, xi)
    bfv_rational_exp:   k/z + sign k e^{lambda_alpha z}/z s_alpha,
                        lambda_alpha from ``lam_values`` or ``lam_vec``; k may be per root
    b2_sn:              A/sn(a z, k) on short roots, B/sn(eps a z, k~) on long roots,
                        g = sign e^{lambda(alpha^vee) z} f
    cm_elliptic/cm_trig/cm_rational: type A only, D_ij = a/x_ij + g_ij(x_ij) s_ij
    """
    N = rs.num_positive
    if family == "divided_difference":
        return {i: _root_operator(rs, i, lambda z: 1 / z, lambda z: -1 / z) for i in range(N)}
    if family == "bfv_rational_exp":
        sign = kw.get("sign", -1)
        if sign not in (1, -1):
            raise ParamError("sign must be +1 or -1")
        lam = kw.get("lam_values")
        if lam is None:
            lam = lambda_values(rs, kw.get("lam_vec", np.zeros(rs.rank)))
        k = kw.get("k", 1.0)
        ks = k if isinstance(k, (list, tuple, np.ndarray)) else [k] * N
        out = {}
        for i in range(N):
            ki, li = complex(ks[i]), complex(lam[i])
            out[i] = _root_operator(
                rs, i, lambda z, ki=ki: ki / z, lambda z, ki=ki, li=li: sign * ki * np.exp(li * z) / z
            )
        return out
    if family == "b2_sn":
        if rs.type_tag != "B2":
            raise ParamError("b2_sn needs the B2 root system")
        fs = b2_sn_functions(kw.get("A", 1.0), kw.get("B", 1.0), kw.get("a", 1.0), kw.get("modulus", 0.3),
                             kw.get("eps_convention", "half"))
        sign = kw.get("sign", 1)
        lam = lambda_values(rs, kw.get("lam_vec", np.zeros(2)))
        out = {}
        for i in range(N):
            f = fs["short"] if rs.ip(rs.positive[i], rs.positive[i]) == 1 else fs["long"]
            li = complex(lam[i])
            out[i] = _root_operator(rs, i, f, lambda z, f=f, li=li: sign * np.exp(li * z) * f(z))
        return out
    if family.startswith("cm_"):
        fam = TypeAFamily(family[3:], kw["params"], kw.get("ctx"), include_rational=True)
        return {i: fam.D(*_pair_of(rs, i)) for i in range(N)}
    raise ParamError(f"unknown operator family {family!r}")


def _pair_of(rs: RootSystemData, idx: int) -> tuple[int, int]:
    v = rs.positive[idx]
    i = v.index(1) + 1
    j = v.index(-1) + 1
    return i, j


def b2_sn_functions(A, B, a, modulus, eps_convention: str = "half") -> dict:
    """Short-root f = A/sn(a z, k), long-root f = B/sn(eps a z, k~) with k~ = (1-k)/(1+k).

    The four-term equation holds with eps = (1+k)/(2i) ("half"); the value
    (1+k)/i ("displayed") fails it already at k = 0, where the long-root
    function must be cot(z/2) rather than cot(z).
    """
    k = complex(modulus)
    kt = (1 - k) / (1 + k)
    if eps_convention == "half":
        eps = (1 + k) / 2j
    elif eps_convention == "displayed":
        eps = (1 + k) / 1j
    else:
        raise ParamError(f"unknown eps convention {eps_convention!r}")
    A, B, a = complex(A), complex(B), complex(a)
    return {
        "short": lambda z: A / jacobi_sn(a * np.asarray(z), k),
        "long": lambda z: B / jacobi_sn(eps * a * np.asarray(z), kt),
        "k_tilde": kt,
        "eps": eps,
    }


# ---------------------------------------------------------------------------
# Type A Calogero-Moser families and the bracket representation


class TypeAFamily:
    """[ij] -> g_ij(x_i - x_j) s_ij and <ij> -> a/x_ij + [ij] on functions of C^n.

    Kinds: elliptic, trig, rational (the three Calogero-Moser families), and
    multiparam, the delta -> 0 limit of the rational kernel, where
    g_ij = -sqrt(kappa)/Lambda_ij * e^{alpha_ij z} so that [ij]^2 = kappa/Lambda_ij^2.
    """

    KINDS = ("elliptic", "trig", "rational", "multiparam")

    def __init__(self, kind: str, params: ParamSet, ctx: EllipticContext | None = None, include_rational: bool = False):
        if kind not in self.KINDS:
            raise ParamError(f"no type A representation for kind {kind!r}")
        self.kind, self.params = kind, params
        self.ctx = ctx if ctx is not None or kind != "elliptic" else EllipticContext()
        self.n = params.n if kind != "multiparam" else len(params.Lambda)
        self.include_rational = include_rational
        self._check_params()
        self._kernels = {}
        for i, j in itertools.combinations(range(1, self.n + 1), 2):
            self._kernels[(i, j)] = self._kernel(i, j)
        self._atoms = None if kind == "multiparam" else AtomValues(kind, params, self.ctx)

    def _check_params(self):
        p = self.params
        for i, j in itertools.combinations(range(1, self.n + 1), 2):
            if self.kind == "multiparam":
                if abs(p.Lambda[i - 1] - p.Lambda[j - 1]) < 1e-12:
                    raise ParamError("Lambda_ij = 0")
                continue
            lij = p.lam_diff(i, j)
            bad = {
                "elliptic": lambda: lattice_distance(lij, self.ctx.tau) < 1e-8,
                "trig": lambda: abs(cmath.sin(complex(p.b) * lij)) < 1e-8,
                "rational": lambda: abs(lij) < 1e-12,
            }[self.kind]()
            if bad:
                raise ParamError(f"degenerate spectral parameters lambda_{i}{j}")

    def _kernel(self, i, j):
        if self.kind == "multiparam":
            c = -cmath.sqrt(complex(self.params.kappa)) / (self.params.Lambda[i - 1] - self.params.Lambda[j - 1])
            a = self.params.alpha_diff(i, j)
            return lambda z: c * np.exp(a * np.asarray(z))
        return kernel_function(self.kind, self.params, i, j, self.ctx)

    def transposition(self, i: int, j: int) -> np.ndarray:
        M = np.eye(self.n)
        M[[i - 1, j - 1]] = M[[j - 1, i - 1]]
        return M

    def bracket(self, i: int, j: int) -> GroupAlgebraOperator:
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        g = self._kernels[(i, j)]
        op = GroupAlgebraOperator.term(self.transposition(i, j), lambda P: g(P[:, i - 1] - P[:, j - 1]))
        return op if sign == 1 else -op

    def D(self, i: int, j: int) -> GroupAlgebraOperator:
        op = self.bracket(i, j)
        if self.include_rational and self.params.a != 0:
            a = complex(self.params.a)
            op = op + GroupAlgebraOperator.multiplication(self.n, lambda P: a / (P[:, i - 1] - P[:, j - 1]))
        return op

    def generator(self, i: int, j: int) -> GroupAlgebraOperator:
        return self.D(i, j) if self.include_rational else self.bracket(i, j)

    def psi(self, i: int, j: int) -> Callable:
        if self.kind == "multiparam":
            p = self.params.p_value(i, j)
            return lambda z: np.full(np.shape(z), p, dtype=complex)
        return psi_family(self.kind, self.params, i, j, self.ctx)

    def atom_table(self, point) -> dict:
        if self.kind == "multiparam":
            vals = {("A",): complex(self.params.A)}
            for i in range(1, self.n + 1):
                vals[("x", i)] = point[i - 1]
            for i, j in itertools.combinations(range(1, self.n + 1), 2):
                vals[("P", i, j)] = self.params.p_value(i, j)
                vals[("W", i, j)] = 0.0
                vals[("R", i, j)] = 1 / (point[i - 1] - point[j - 1]) ** 2
            return vals
        return self._atoms.table(point)

    def point_ok(self, p: np.ndarray, margin: float = 1e-2) -> bool:
        """Away from poles of every kernel at every S_n-image of p (differences only)."""
        b = complex(self.params.b)
        for i, j in itertools.combinations(range(self.n), 2):
            d = p[i] - p[j]
            if abs(d) < margin:
                return False
            if self.kind == "elliptic" and lattice_distance(b * d, self.ctx.tau) < margin:
                return False
            if self.kind == "trig" and abs(np.sin(b * d)) < margin:
                return False
        return True

    def points(self, plan: SamplePlan) -> np.ndarray:
        return robust_points(plan, self.n, lambda p: self.point_ok(p, plan.pole_margin))

    def name(self) -> str:
        return self.kind


def algelem_operator(elem: AlgElem, fam: TypeAFamily, points: np.ndarray) -> GroupAlgebraOperator:
    """The image of an algebra element under [ij] -> g_ij s_ij.

    AtomPoly coefficients are turned into callables by tabulating the atoms
    at the given points (the only points the result will be evaluated on,
    or their images under permutations, which the tables cover since atoms
    are looked up at the permuted point).
    """
    n = fam.n
    cache: dict = {}
    words: dict = {}
    for w, c in elem.terms.items():
        if w not in words:
            op = GroupAlgebraOperator.identity(n)
            for i, j in w:
                op = op.compose(fam.generator(i, j))
            words[w] = op
    out = GroupAlgebraOperator.zero(n)
    for w, c in elem.terms.items():
        out = out + words[w].scale(_atom_callable(c, fam, cache))
    return out


def _atom_callable(poly, fam: TypeAFamily, cache: dict) -> Callable:
    def f(P):
        vals = []
        for p in P:
            key = p.tobytes()
            if key not in cache:
                cache[key] = fam.atom_table(p)
            vals.append(complex(poly.evaluate(cache[key])))
        return np.array(vals)

    return f


def verify_operator_identity(
    expr: AlgElem,
    fam: TypeAFamily,
    plan: SamplePlan | None = None,
    tol: float = 1e-8,
    bank: TestFunctionBank | None = None,
    name: str = "identity",
) -> IdentityReport:
    """Apply the image of ``expr`` to every bank function at every sample point; PASS iff ~0."""
    plan = plan or SamplePlan()
    bank = bank or TestFunctionBank(fam.n, seed=plan.rng_seed)
    pts = fam.points(plan)
    op = algelem_operator(expr, fam, pts)
    res = operator_residual(op, bank, pts)
    return IdentityReport(name, fam.name(), res, tol, plan.to_json(), {"group_elements": op.num_group_elements()})


def truncated_dunkl(i: int, fam: TypeAFamily) -> GroupAlgebraOperator:
    """sum_{j != i} D_ij (with D_ji = -D_ij)."""
    op = GroupAlgebraOperator.zero(fam.n)
    for j in range(1, fam.n + 1):
        if j != i:
            op = op + fam.generator(i, j)
    return op


def square_check(fam: TypeAFamily, i: int, j: int, plan: SamplePlan | None = None, tol: float = 1e-8) -> IdentityReport:
    """D_ij^2 against multiplication by psi_ij(x_i - x_j); the rational part a/x_ij must be on."""
    plan = plan or SamplePlan()
    pts = fam.points(plan)
    D = fam.D(i, j)
    psi = fam.psi(i, j)
    target = GroupAlgebraOperator.multiplication(fam.n, lambda P: psi(P[:, i - 1] - P[:, j - 1]))
    res = operator_residual(D.compose(D), TestFunctionBank(fam.n, seed=plan.rng_seed), pts, target)
    return IdentityReport(f"D{i}{j}^2 = psi{i}{j}", fam.name(), res, tol, plan.to_json())


# ---------------------------------------------------------------------------
# Functional equations


def _rand_triples(plan: SamplePlan, count: int, dim: int, ok: Callable) -> np.ndarray:
    return robust_points(SamplePlan(plan.rng_seed, count, plan.pole_margin, plan.box), dim, ok)


def _far(margin, *vals) -> bool:
    return all(abs(v) > margin for v in vals)


def functional_equation_suite(
    plan: SamplePlan | None = None,
    tol: float = 1e-9,
    perturb: float = 0.0,
    seed_params: int = 0,
    eps_convention: str = "half",
) -> list[IdentityReport]:
    """Equations (1)-(7) at seeded (x, y, z).

    A2 equations use f = k/z and g_ij = k e^{lambda_ij z}/z with
    lambda_12 + lambda_23 + lambda_31 = 0.  (3)-(4) use the sn family with
    g = e^{lambda(alpha^vee) z} f; (5)-(7) use the rational B2 solution
    f_1 = f_2 = k'/z, g_1, g_2 with lambda_1 = lambda_12 + lambda_12bar,
    lambda_2 = -lambda_12 + lambda_12bar.  ``perturb`` shifts one structural
    constant per equation; the unperturbed suite should pass and a 0.1 shift
    should fail.
    """
    plan = plan or SamplePlan()
    rng = np.random.default_rng(seed_params)
    d = perturb
    k = complex(1 + 0.5 * rng.uniform())
    kp = complex(0.5 + 0.5 * rng.uniform())
    l12, l23 = complex(rng.normal() * 0.3), complex(rng.normal() * 0.3)
    l31 = -l12 - l23
    L12, L12b = complex(rng.normal() * 0.3), complex(rng.normal() * 0.3)
    lam1, lam2 = L12 + L12b, -L12 + L12b

    f = lambda z, c=k: c / z  # noqa: E731

    def g(lam, c=k):
        return lambda z: c * np.exp(lam * z) / z

    g12, g23, g31 = g(l12), g(l23), g(l31 + d)
    sn = b2_sn_functions(1.1, 0.8, 0.9, 0.35 + d, eps_convention)
    fs, fl = sn["short"], b2_sn_functions(1.1, 0.8, 0.9, 0.35, eps_convention)["long"]
    rsB = root_system("B2")
    lv = np.array([0.2, -0.1])
    lamB = {rsB.names[i]: complex(v) for i, v in enumerate(lambda_values(rsB, lv))}
    G = {nm: (lambda z, nm=nm: np.exp(lamB[nm] * z) * (fl if nm in ("12", "12bar") else fs)(z)) for nm in lamB}
    G["12bar"] = (lambda z, base=G["12bar"]: np.exp(d * z) * base(z))
    g1 = lambda z: kp * np.exp((lam1 + d) * z) / z  # noqa: E731
    g2 = lambda z: kp * np.exp(lam2 * z) / z  # noqa: E731
    f1 = lambda z: kp / z  # noqa: E731
    f2 = lambda z: (kp + d) / z  # noqa: E731
    phi1 = lambda z: np.exp((lam1 + d) * z)  # noqa: E731
    phi2 = lambda z: np.exp(lam2 * z)  # noqa: E731

    eqs = {
        "(1)": (3, lambda x, y, z: (f(x - y) * f(y - z) + f(y - z) * f(z - x, k + d) + f(z - x, k + d) * f(x - y),
                                    abs(f(x - y) * f(y - z)) + abs(f(y - z) * f(z - x)) + abs(f(z - x) * f(x - y)))),
        "(2)": (3, lambda x, y, z: _sum_terms(g12(x - y) * g23(x - z), g23(y - z) * g31(y - x), g31(z - x) * g12(z - y))),
        "(3)": (2, lambda x, y, z: _sum_terms(fl(x - y) * fs(x), -fs(y) * fl(x - y), fl(x + y) * fs(y), fs(x) * fl(x + y))),
        "(4)": (2, lambda x, y, z: _sum_terms(G["12"](x - y) * G["1"](y), -G["2"](y) * G["12"](x + y),
                                              G["12bar"](x + y) * G["2"](-x), G["1"](x) * G["12bar"](-x + y))),
        "(5)": (2, lambda x, y, z: _sum_terms((1 / (x - y) + 1 / (x + y)) * f1(x), (-1 / (x - y) + 1 / (x + y)) * f2(y))),
        "(6)": (2, lambda x, y, z: _sum_terms(np.exp(L12 * (x - y)) / (x - y) * g1(y), -np.exp(L12 * (x + y)) / (x + y) * g2(y),
                                              np.exp(L12b * (x + y)) / (x + y) * g2(-x),
                                              np.exp(L12b * (-x + y)) / (-x + y) * g1(x))),
        "(7)": (2, lambda x, y, z: _sum_terms((x + y) * np.exp(L12 * (x - y)) * phi1(y) / y,
                                              -(x - y) * np.exp(L12 * (x + y)) * phi2(y) / y,
                                              -(x - y) * np.exp(L12b * (x + y)) * phi2(-x) / x,
                                              -(x + y) * np.exp(L12b * (-x + y)) * phi1(x) / x)),
    }
    family = {"(1)": "bfv_rational_exp", "(2)": "bfv_rational_exp", "(3)": "b2_sn", "(4)": "b2_sn",
              "(5)": "b2_rational", "(6)": "b2_rational", "(7)": "b2_rational"}
    reports = []
    for name, (dim, fn) in eqs.items():
        def ok(p, dim=dim):
            x, y = p[0], p[1]
            z = p[2] if dim == 3 else 0.37 + 0.21j
            m = plan.pole_margin
            if not _far(m, x, y, x - y, x + y, y - z, z - x):
                return False
            if dim == 2:
                try:
                    vals = [fs(x), fs(y), fl(x - y), fl(x + y), fs(-x), fl(-x + y)]
                except ArithmeticError:
                    return False
                return all(np.isfinite(v) and abs(v) < 1e6 for v in vals)
            return True

        pts = _rand_triples(plan, max(plan.num_points, 20), dim, ok)
        worst = 0.0
        for p in pts:
            x, y = p[0], p[1]
            z = p[2] if dim == 3 else 0.37 + 0.21j
            val, scale = fn(x, y, z)
            worst = max(worst, float(abs(val) / max(1.0, scale)))
        reports.append(IdentityReport(f"functional equation {name}", family[name], worst, tol, plan.to_json(),
                                      {"perturbation": d}))
    return reports


def _sum_terms(*terms):
    return sum(terms), sum(abs(t) for t in terms)


# ---------------------------------------------------------------------------
# Conjugation and G2


def conjugation_check(
    rs: RootSystemData,
    sign: int = -1,
    lam_simple: Sequence | None = None,
    k: complex = 1.0,
    plan: SamplePlan | None = None,
    tol: float = 1e-9,
) -> IdentityReport:
    """D_alpha = k (1 -+ e^{lambda_alpha (alpha, xi)} s_alpha)/(alpha, xi) against k e o d_alpha o e^{-1}.

    e = exp(sum_i lambda_{alpha_i} pi_i(xi)), times prod_{beta > 0} (beta, xi) for sign +.
    """
    plan = plan or SamplePlan()
    lam_simple = np.zeros(len(rs.simple)) if lam_simple is None else np.asarray(lam_simple, dtype=complex)
    lam_vec = lam_vec_from_simple(rs, lam_simple)
    D = make_family("bfv_rational_exp", rs, sign=sign, lam_vec=lam_vec, k=k)
    dd = make_family("divided_difference", rs)
    roots = np.array([rs.vector(i) for i in range(rs.num_positive)])

    def e(P):
        val = np.exp(np.asarray(P) @ lam_vec)
        if sign == 1:
            val = val * np.prod(np.asarray(P) @ roots.T, axis=1)
        return val

    E = GroupAlgebraOperator.multiplication(rs.rank, e)
    Einv = GroupAlgebraOperator.multiplication(rs.rank, lambda P: 1 / e(P))
    forms = roots
    pts = robust_points(plan, rs.rank, lambda p: np.min(np.abs(forms @ p)) > plan.pole_margin, forms=forms)
    bank = TestFunctionBank(rs.rank, seed=plan.rng_seed)
    worst = 0.0
    for idx in range(rs.num_positive):
        rhs = E.compose(dd[idx]).compose(Einv).scale(complex(k))
        worst = max(worst, operator_residual(D[idx], bank, pts, rhs))
    return IdentityReport(f"conjugation sign {'+' if sign == 1 else '-'}", f"{rs.type_tag} bfv_rational_exp",
                          worst, tol, plan.to_json(), {"lambda_simple": [str(complex(v)) for v in lam_simple]})


G2_RELATION = [
    (1, ("a1", "a1+a2")),
    (1, ("a1+a2", "2a1+3a2")),
    (1, ("2a1+3a2", "a1+2a2")),
    (1, ("a1+2a2", "a1+3a2")),
    (1, ("a1+3a2", "a2")),
    (-1, ("a2", "a1")),
]


def g2_lambda_constrained(l1: complex, l2: complex) -> dict:
    """lambda_gamma = lambda(gamma^vee) from the simple values, in the displayed form."""
    return {
        "a1": l1,
        "a2": l2,
        "a1+a2": 3 * l1 + l2,
        "2a1+3a2": 2 * l1 + l2,
        "a1+2a2": 3 * l1 + 2 * l2,
        "a1+3a2": l1 + l2,
    }


def g2_constraint_check(
    l1: complex,
    l2: complex,
    plan: SamplePlan | None = None,
    tol: float = 1e-9,
    violation: float = 0.0,
    k_long: complex = 1.0,
    k_short: complex = 1.0,
    sign: int = -1,
) -> IdentityReport:
    """The six-term G2 quadratic relation for D_gamma = k_gamma (1 + sign e^{lambda_gamma z} s)/z.

    ``violation`` is added to lambda_{a1+a2}, breaking the first constraint.
    """
    rs = root_system("G2")
    plan = plan or SamplePlan()
    lam = g2_lambda_constrained(complex(l1), complex(l2))
    lam["a1+a2"] += violation
    lam_values_ = [lam[nm] for nm in rs.names]
    ks = [k_long if rs.ip(v, v) == 6 else k_short for v in rs.positive]
    D = make_family("bfv_rational_exp", rs, sign=sign, lam_values=lam_values_, k=ks)
    op = GroupAlgebraOperator.zero(2)
    for c, (a, b) in G2_RELATION:
        op = op + D[rs.index_of_name(a)].compose(D[rs.index_of_name(b)]).scale(c)
    forms = np.array([rs.vector(i) for i in range(rs.num_positive)])
    pts = robust_points(plan, 2, lambda p: np.min(np.abs(forms @ p)) > plan.pole_margin, forms=forms)
    res = operator_residual(op, TestFunctionBank(2, seed=plan.rng_seed), pts)
    consistent = np.allclose(lambda_values(rs, lam_vec_from_simple(rs, [l1, l2])), lam_values_)
    return IdentityReport("G2 quadratic relation", "G2 bfv_rational_exp", res, tol, plan.to_json(),
                          {"violation": violation, "lambda_matches_coroot_pairing": bool(consistent)})
