"""Free algebra on brackets [ij] over atom-polynomial coefficients.

Elements are stored in left-coefficient normal form: a map from words to
coefficients, the coefficient standing to the left of the word.  Moving a
coefficient f(x) left across a bracket uses [ij] f(x) = f(s_ij x) [ij].
A word u = [b1]...[bm] therefore acts on coefficients through the
permutation sigma_u = t_{b1} o ... o t_{bm}, which is also the S_n-degree of
u.  Every defining relation is homogeneous for this S_n-grading, so ideal
membership can be decided one graded piece at a time.

Membership itself is linear algebra: a target of degree <= D lies in the
ideal (up to degree D) iff it is a function-coefficient combination of the
elements u r v with r a relation and |u| + deg r + |v| <= D.  Numerically
this is a least-squares problem per generic sample point; in the exact
degenerations it is a rational span computation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .linalg import SparseEchelon
from .scalars import (
    AtomPoly,
    AtomValues,
    EllipticContext,
    ParamSet,
    SamplePlan,
    atom,
    random_rational,
)


class DegreeBoundExceeded(ValueError):
    pass


class SampleDegenerate(ArithmeticError):
    pass


class BackendMismatch(TypeError):
    pass


Word = tuple  # tuple of (i, j) pairs with i < j


def pair(i: int, j: int) -> tuple[tuple[int, int], int]:
    """Normalised bracket: [ji] = -[ij]; returns ((min, max), sign)."""
    if i == j:
        raise ValueError("bracket [ii] is not a generator")
    return ((i, j), 1) if i < j else ((j, i), -1)


def transposition_apply(perm: list, i: int, j: int) -> None:
    perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]


@lru_cache(maxsize=200_000)
def word_perm(word: Word, n: int) -> tuple:
    """sigma_u as a tuple of images (1-based); also the S_n-degree of u."""
    perm = list(range(1, n + 1))
    for i, j in word:
        transposition_apply(perm, i, j)
    return tuple(perm)


@lru_cache(maxsize=1 << 16)
def compose(p: tuple, q: tuple) -> tuple:
    """(p o q)(k) = p(q(k))."""
    return tuple(p[k - 1] for k in q)


@lru_cache(maxsize=1 << 12)
def inverse(p: tuple) -> tuple:
    out = [0] * len(p)
    for k, v in enumerate(p, start=1):
        out[v - 1] = k
    return tuple(out)


class AlgElem:
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict | None = None):
        self.n = n
        self.terms = {w: c for w, c in (terms or {}).items() if not c.is_zero()}

    # -- constructors

    @classmethod
    def zero(cls, n: int) -> "AlgElem":
        return cls(n)

    @classmethod
    def one(cls, n: int) -> "AlgElem":
        return cls(n, {(): AtomPoly.const(1)})

    @classmethod
    def scalar(cls, n: int, c) -> "AlgElem":
        return cls(n, {(): AtomPoly.coerce(c)})

    @classmethod
    def bracket(cls, n: int, i: int, j: int) -> "AlgElem":
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"bracket [{i}{j}] outside rank {n}")
        p, s = pair(i, j)
        return cls(n, {(p,): AtomPoly.const(s)})

    @classmethod
    def word(cls, n: int, brackets: Iterable[tuple[int, int]], coeff=1) -> "AlgElem":
        out = cls.scalar(n, coeff)
        for i, j in brackets:
            out = out * cls.bracket(n, i, j)
        return out

    @classmethod
    def normal_form(cls, n: int, factors: Sequence) -> "AlgElem":
        """Product of a sequence of brackets (i, j) and coefficients in any order."""
        out = cls.one(n)
        for f in factors:
            if isinstance(f, tuple) and len(f) == 2 and all(isinstance(v, int) for v in f):
                out = out * cls.bracket(n, *f)
            elif isinstance(f, AlgElem):
                out = out * f
            else:
                out = out * cls.scalar(n, f)
        return out

    # -- arithmetic

    def _check(self, other: "AlgElem"):
        if not isinstance(other, AlgElem):
            raise BackendMismatch(f"cannot combine AlgElem with {type(other).__name__}")
        if other.n != self.n:
            raise BackendMismatch(f"rank mismatch {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, AlgElem):
            other = AlgElem.scalar(self.n, other)
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return AlgElem(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return AlgElem(self.n, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return AlgElem.scalar(self.n, other) - self

    def __mul__(self, other):
        if not isinstance(other, AlgElem):
            other = AlgElem.scalar(self.n, other)
        self._check(other)
        out: dict = {}
        n = self.n
        for w1, c1 in self.terms.items():
            sigma = word_perm(w1, n)
            ident = sigma == tuple(range(1, n + 1))
            for w2, c2 in other.terms.items():
                c = c1 * (c2 if ident else c2.twist(sigma))
                w = w1 + w2
                out[w] = out[w] + c if w in out else c
        return AlgElem(n, out)

    def __rmul__(self, other):
        return AlgElem.scalar(self.n, other) * self

    def __eq__(self, other):
        if not isinstance(other, AlgElem):
            other = AlgElem.scalar(self.n, other)
        return self.n == other.n and (self - other).is_zero()

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def grades(self) -> set:
        return {word_perm(w, self.n) for w in self.terms}

    def coefficient(self, word: Word) -> AtomPoly:
        return self.terms.get(tuple(word), AtomPoly())

    def substitute(self, values: dict) -> "AlgElem":
        return AlgElem(self.n, {w: c.substitute(values) for w, c in self.terms.items()})

    def atoms(self) -> set:
        return set().union(*(c.atoms() for c in self.terms.values())) if self.terms else set()

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0])):
            ws = "".join(f"[{i}{j}]" for i, j in w)
            parts.append(f"({c}){ws}")
        return " + ".join(parts)

    def to_json(self) -> list:
        return [
            {"word": [[i, j, 1] for i, j in w], "coeff": {"backend": "atom", "terms": c.to_json()}}
            for w, c in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, n: int, data: list) -> "AlgElem":
        out = cls.zero(n)
        for item in data:
            coeff = AtomPoly.from_json(item["coeff"]["terms"])
            brackets = []
            sign = 1
            for i, j, s in item["word"]:
                brackets.append((i, j))
                sign *= s
            out = out + AlgElem.word(n, brackets, coeff * sign)
        return out


# ---------------------------------------------------------------------------
# Relations


NUMERIC_KINDS = ("elliptic", "trig", "rational")
EXACT_KINDS = ("psi_zero", "multiparam")


@dataclass
class RelationSet:
    """Defining relations (i)'-(iii)' of the deformed algebra for one psi family.

    The square of a generator is c_ij = P_ij - W_ij in the three
    Calogero-Moser families, 0 for psi = 0, and the central parameter P_ij
    in the multiparameter degeneration.
    """

    n: int
    kind: str = "elliptic"
    params: ParamSet | None = None
    ctx: EllipticContext | None = None
    p_values: dict | None = None  # exact p_ij for the multiparameter case

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("rank n must be >= 2")
        if self.kind not in NUMERIC_KINDS + EXACT_KINDS:
            raise ValueError(f"unknown relation kind {self.kind!r}")
        if self.kind in NUMERIC_KINDS:
            if self.params is None or self.params.n < self.n:
                raise ValueError("numeric relation sets need n spectral parameters")
            if self.kind == "elliptic" and self.ctx is None:
                self.ctx = EllipticContext()

    @property
    def exact(self) -> bool:
        return self.kind in EXACT_KINDS

    def square(self, i: int, j: int) -> AtomPoly:
        if self.kind == "psi_zero":
            return AtomPoly()
        P = AtomPoly.from_atom(atom("P", i, j))
        if self.kind == "multiparam":
            return P
        return P - AtomPoly.from_atom(atom("W", i, j))

    def pairs(self):
        return list(itertools.combinations(range(1, self.n + 1), 2))

    def atom_values(self) -> AtomValues:
        return AtomValues(self.kind, self.params, self.ctx)

    def describe(self) -> dict:
        d = {"n": self.n, "kind": self.kind}
        if self.params is not None:
            d["params"] = self.params.to_json()
        if self.ctx is not None and self.kind == "elliptic":
            d["ctx"] = self.ctx.to_json()
        if self.p_values is not None:
            d["p"] = {f"{i}{j}": str(v) for (i, j), v in sorted(self.p_values.items())}
        return d


def relation_generators(rs: RelationSet, types: str = "i,ii,iii") -> list[tuple[str, AlgElem]]:
    n = rs.n
    wanted = set(types.split(","))
    out = []
    if "i" in wanted:
        for i, j in rs.pairs():
            b = AlgElem.bracket(n, i, j)
            out.append(("i", b * b - AlgElem.scalar(n, rs.square(i, j))))
    if "ii" in wanted:
        for p1, p2 in itertools.combinations(rs.pairs(), 2):
            if set(p1) & set(p2):
                continue
            a, b = AlgElem.bracket(n, *p1), AlgElem.bracket(n, *p2)
            out.append(("ii", a * b - b * a))
    if "iii" in wanted:
        for i, j, k in itertools.combinations(range(1, n + 1), 3):
            for a, b, c in ((i, j, k), (i, k, j)):
                out.append(("iii", three_term(n, a, b, c)))
    return out


def three_term(n: int, i: int, j: int, k: int) -> AlgElem:
    B = lambda p, q: AlgElem.bracket(n, p, q)  # noqa: E731
    return B(i, j) * B(j, k) + B(j, k) * B(k, i) + B(k, i) * B(i, j)


def degenerate(rs: RelationSet, mode: str, kappa=None, Lambda: Sequence | None = None) -> RelationSet:
    """psi_zero: [ij]^2 = 0.  multiparam: [ij]^2 = p_ij = kappa / Lambda_ij^2, central.

    With ``kappa`` and ``Lambda`` given as rationals the p_ij are exact;
    otherwise they stay generic and are drawn at random per check.
    """
    if mode == "psi_zero":
        return RelationSet(rs.n, "psi_zero")
    if mode != "multiparam":
        raise ValueError(f"unknown degeneration mode {mode!r}")
    p_values = None
    if kappa is not None and Lambda is not None:
        p_values = {}
        for i, j in rs.pairs():
            d = Fraction(Lambda[i - 1]) - Fraction(Lambda[j - 1])
            if d == 0:
                raise ValueError("Lambda_ij must be nonzero")
            p_values[(i, j)] = Fraction(kappa) / d**2
    return RelationSet(rs.n, "multiparam", p_values=p_values)


# ---------------------------------------------------------------------------
# Ideal membership


@dataclass
class MembershipCertificate:
    verdict: bool
    backend: str
    degree_bound: int
    tol: float
    residuals: list = field(default_factory=list)
    plan: dict | None = None
    blocks: list = field(default_factory=list)  # per grade: (rows, cols)

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def to_json(self) -> dict:
        return {
            "verdict": "member" if self.verdict else "not member",
            "backend": self.backend,
            "degree_bound": self.degree_bound,
            "tol": self.tol,
            "max_residual": self.max_residual,
            "residuals": self.residuals,
            "plan": self.plan,
            "blocks": self.blocks,
        }


@lru_cache(maxsize=64)
def _words_by_grade(n: int, length: int) -> dict:
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    out: dict = {}
    for w in itertools.product(pairs, repeat=length):
        out.setdefault(word_perm(w, n), []).append(w)
    return out


@dataclass
class _Column:
    u: Word
    rel: int
    v: Word


def _span_columns(n: int, rels: list[AlgElem], grade: tuple, D: int) -> list[_Column]:
    """All u r v of degree <= D lying in the graded piece ``grade``."""
    cols = []
    rel_grades = []
    for r in rels:
        gs = r.grades()
        assert len(gs) == 1, "relations are homogeneous"
        rel_grades.append(next(iter(gs)))
    for ri, (r, g_r) in enumerate(zip(rels, rel_grades)):
        dr = r.degree()
        for p in range(D - dr + 1):
            ugroups = _words_by_grade(n, p)
            for q in range(D - dr - p + 1):
                vwords = _words_by_grade(n, q)
                for gu, us in ugroups.items():
                    vs = vwords.get(compose(inverse(compose(gu, g_r)), grade))
                    if vs:
                        cols.extend(_Column(u, ri, v) for u in us for v in vs)
    return cols


@lru_cache(maxsize=16)
def _pairs(n: int):
    return tuple(itertools.combinations(range(1, n + 1), 2))


def is_zero_mod_ideal(
    target: AlgElem,
    rs: RelationSet,
    degree_bound: int | None = None,
    plan: SamplePlan | None = None,
    tol: float = 1e-8,
    substitutions: int = 3,
) -> MembershipCertificate:
    """Decide whether ``target`` lies in the two-sided ideal up to ``degree_bound``."""
    if target.n != rs.n:
        raise BackendMismatch("target and relation set have different rank")
    D = target.degree() if degree_bound is None else degree_bound
    if target.degree() > D:
        raise DegreeBoundExceeded(f"target degree {target.degree()} exceeds bound {D}")
    plan = plan or SamplePlan()
    rels = [r for _, r in relation_generators(rs)]
    by_grade: dict = {}
    for w, c in target.terms.items():
        by_grade.setdefault(word_perm(w, rs.n), {})[w] = c
    if rs.exact:
        return _exact_membership(by_grade, rs, rels, D, plan, substitutions)
    return _numeric_membership(by_grade, rs, rels, D, plan, tol)


def _assemble(n, rels, cols, target_words):
    """Sparse structure: rows indexed by words; entries (row, col, coeff, sigma)."""
    rows: dict = {w: k for k, w in enumerate(sorted(target_words))}
    entries = []
    for ci, col in enumerate(cols):
        sigma = word_perm(col.u, n)
        for w_r, h in rels[col.rel].terms.items():
            w = col.u + w_r + col.v
            if w not in rows:
                rows[w] = len(rows)
            entries.append((rows[w], ci, h, sigma))
    return rows, entries


def _numeric_membership(by_grade, rs, rels, D, plan, tol):
    n = rs.n
    av = rs.atom_values()
    pts = plan.points(n, extra_ok=_pole_ok(rs, plan))
    residuals = [0.0] * len(pts)
    blocks = []
    for grade, tw in sorted(by_grade.items()):
        cols = _span_columns(n, rels, grade, D)
        rows, entries = _assemble(n, rels, cols, tw.keys())
        blocks.append([len(rows), len(cols)])
        R = np.fromiter((e[0] for e in entries), dtype=np.int64, count=len(entries))
        C = np.fromiter((e[1] for e in entries), dtype=np.int64, count=len(entries))
        for pi, xi in enumerate(pts):
            tables: dict = {}
            cache: dict = {}
            vals = np.empty(len(entries), dtype=complex)
            for e, (_, _, h, sigma) in enumerate(entries):
                key = (id(h), sigma)
                if key not in cache:
                    if sigma not in tables:
                        eta = xi[[s - 1 for s in sigma]]
                        if not plan.admissible(eta):
                            raise SampleDegenerate("twisted sample point violates the pole margin")
                        tables[sigma] = av.table(eta)
                    cache[key] = complex(h.evaluate(tables[sigma]))
                vals[e] = cache[key]
            M = sp.csr_matrix((vals, (R, C)), shape=(len(rows), len(cols)))
            ident = tuple(range(1, n + 1))
            if ident not in tables:
                tables[ident] = av.table(xi)
            t = np.zeros(len(rows), dtype=complex)
            for w, cf in tw.items():
                t[rows[w]] = complex(cf.evaluate(tables[ident]))
            residuals[pi] = max(residuals[pi], _lsq_residual(M, t))
    verdict = all(r < tol for r in residuals)
    return MembershipCertificate(verdict, "numeric", D, tol, residuals, plan.to_json(), blocks)


DENSE_LIMIT = 250_000  # matrix entries below which dense least squares is used


def _lsq_residual(M, t: np.ndarray) -> float:
    """Relative least-squares residual ||Mc - t|| / max(1, ||t||)."""
    t = np.asarray(t, dtype=np.result_type(M.dtype, np.asarray(t).dtype))
    scale = max(1.0, float(np.linalg.norm(t)))
    if M.shape[1] == 0:
        return float(np.linalg.norm(t)) / scale
    if M.shape[0] * M.shape[1] <= DENSE_LIMIT:
        A = M.toarray() if sp.issparse(M) else M
        c, *_ = np.linalg.lstsq(A, t, rcond=None)
        return float(np.linalg.norm(A @ c - t)) / scale
    # large blocks: column-equilibrated LSMR, dense fallback if it stalls
    norms = np.sqrt(np.asarray(abs(M).power(2).sum(axis=0))).ravel()
    norms[norms == 0] = 1.0
    Ms = (M @ sp.diags(1.0 / norms)).tocsr()
    out = spla.lsmr(Ms, t, atol=1e-15, btol=1e-15, maxiter=20 * max(M.shape))
    if out[1] == 7:
        return _lsq_residual(M.toarray(), t) if M.shape[0] * M.shape[1] <= 16 * DENSE_LIMIT else np.inf
    return float(np.linalg.norm(Ms @ out[0] - t)) / scale


def _pole_ok(rs: RelationSet, plan: SamplePlan):
    if rs.kind != "elliptic":
        return None
    tau, b = rs.ctx.tau, complex(rs.params.b)
    probe = SamplePlan(pole_margin=plan.pole_margin, tau=tau, scale=b)
    return lambda p: probe.admissible(p)


def _exact_membership(by_grade, rs, rels, D, plan, substitutions):
    n = rs.n
    rng = np.random.default_rng(plan.rng_seed)
    n_subs = 1 if (rs.kind == "psi_zero" or rs.p_values is not None) else substitutions
    x_free = all(not h.depends_on_x() for r in rels for h in r.terms.values())
    verdict = True
    residuals = []
    blocks = []
    structures = {}
    for grade, tw in sorted(by_grade.items()):
        cols = _span_columns(n, rels, grade, D)
        structures[grade] = (cols, _assemble(n, rels, cols, tw.keys()))
        rows = structures[grade][1][0]
        blocks.append([len(rows), len(cols)])
    for _ in range(n_subs):
        if rs.p_values is not None:
            pvals = {atom("P", i, j): v for (i, j), v in rs.p_values.items()}
        else:
            pvals = {atom("P", i, j): random_rational(rng) for i, j in rs.pairs()}
        xpoint = None if x_free else [random_rational(rng) for _ in range(n)]
        ok_all = True
        for grade, tw in sorted(by_grade.items()):
            cols, (rows, entries) = structures[grade]
            ech = SparseEchelon()
            colvecs: dict = {}
            for r, c, h, sigma in entries:
                if x_free:
                    val = h.substitute(pvals)
                    if not val.is_constant():
                        raise BackendMismatch(f"coefficient {h} not exact-evaluable")
                    val = val.constant_value()
                else:
                    vals = dict(pvals)
                    for i in range(1, n + 1):
                        vals[("x", i)] = xpoint[sigma[i - 1] - 1]
                    val = h.evaluate(vals)
                if val:
                    colvecs.setdefault(c, {})
                    colvecs[c][r] = colvecs[c].get(r, 0) + val
            for c in sorted(colvecs):
                ech.insert(colvecs[c])
            for vec in _exact_target_vectors(tw, rows, pvals, x_free, xpoint):
                rem = ech.reduce(vec)
                if rem:
                    ok_all = False
        residuals.append(0.0 if ok_all else 1.0)
        verdict = verdict and ok_all
    return MembershipCertificate(verdict, "exact", D, 0.0, residuals, plan.to_json(), blocks)


def _exact_target_vectors(tw, rows, pvals, x_free, xpoint):
    if not x_free:
        vec = {}
        vals = dict(pvals)
        for i, v in enumerate(xpoint, start=1):
            vals[("x", i)] = v
        for w, cf in tw.items():
            vec[rows[w]] = cf.evaluate(vals)
        return [vec]
    vecs: dict = {}
    for w, cf in tw.items():
        for xm, rest in cf.split_x_monomials().items():
            val = rest.substitute(pvals)
            if not val.is_constant():
                raise BackendMismatch(f"target coefficient {cf} has non-exact atoms")
            vecs.setdefault(xm, {})[rows[w]] = val.constant_value()
    return list(vecs.values())
