"""Special functions and coefficient backends.

Everything numeric here works on the lattice Z + Z*tau.  The theta series is
the single source of truth: sigma_lambda and the Weierstrass function are
both built from it.

Coefficients of algebra elements are kept symbolically as polynomials in a
small set of *atoms* (``AtomPoly``).  An atom is either a coordinate ``x_i``,
a function of one coordinate difference (``W_ij``, ``R_ij``), or a constant
(``P_ij``, ``A``).  The symmetric group acts on atoms by relabelling the
coordinate indices, which is all the coefficient twisting that the
commutation rule ``[ij] f(x) = f(s_ij x) [ij]`` needs.  Numbers are attached
only at evaluation time, either as floats at sample points or as exact
rationals.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

import mpmath
import numpy as np
from sympy import QQ
from sympy.polys.fields import field as sympy_field
from sympy.polys.orderings import grlex


class PoleError(ArithmeticError):
    """A special function was evaluated too close to a pole."""


class ConvergenceError(ArithmeticError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


POLE_EPS = 1e-10
EXTENDED_DPS = 40


def close(a, b, tol: float = 1e-9) -> bool:
    """Relative comparison above magnitude one, absolute below."""
    return abs(a - b) <= tol * max(1.0, abs(b))


def rel_residual(value, scale) -> float:
    return float(abs(value) / max(1.0, abs(scale)))


# ---------------------------------------------------------------------------
# Contexts and parameters


def _cjson(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _from_cjson(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


@dataclass(frozen=True)
class EllipticContext:
    tau: complex = 0.1 + 1.0j
    series_truncation: int = 30
    tol: float = 1e-9
    extended: bool = False
    # Im(tau) >= 0.5 keeps the N=30 tail below 1e-30
    min_imag_tau: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        if self.tau.imag < self.min_imag_tau:
            raise ValueError(f"Im(tau) must be >= {self.min_imag_tau}, got {self.tau}")
        if self.series_truncation < 1:
            raise ValueError("series_truncation must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    @cached_property
    def _halves(self) -> np.ndarray:
        n = np.arange(-self.series_truncation, self.series_truncation + 1)
        return n + 0.5

    @cached_property
    def theta1_derivs_at_zero(self) -> tuple:
        d1 = theta1(0.0, self, order=1)
        d3 = theta1(0.0, self, order=3)
        return d1, d3

    @cached_property
    def wp_shift(self):
        # Laurent expansion of -(log theta1)'' at 0 has constant -theta1'''(0)/(3 theta1'(0));
        # adding the opposite gives wp(z) = 1/z^2 + O(z^2).
        d1, d3 = self.theta1_derivs_at_zero
        return d3 / (3 * d1)

    def doubled(self) -> "EllipticContext":
        return replace(self, series_truncation=2 * self.series_truncation)

    def to_json(self) -> dict:
        return {
            "tau": _cjson(self.tau),
            "series_truncation": self.series_truncation,
            "tol": self.tol,
            "extended": self.extended,
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "EllipticContext":
        return cls(
            tau=_from_cjson(d["tau"]),
            series_truncation=int(d.get("series_truncation", 30)),
            tol=float(d.get("tol", 1e-9)),
            extended=bool(d.get("extended", False)),
        )


@dataclass(frozen=True)
class ParamSet:
    """Parameters of the deformed quadratic algebra and its operators.

    ``lam`` and ``exp_alpha`` are indexed by position 0..n-1 (index i of the
    algebra is position i-1).  ``Lambda`` holds per-index degeneration values
    with Lambda_ij = Lambda_i - Lambda_j.
    """

    a: complex = 0.0
    k_const: complex = 1.0
    b: complex = 1.0
    lam: tuple = ()
    exp_alpha: tuple = ()
    Lambda: tuple = ()
    kappa: complex = 1.0
    delta: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(complex(v) for v in self.lam))
        object.__setattr__(self, "exp_alpha", tuple(complex(v) for v in self.exp_alpha))
        object.__setattr__(self, "Lambda", tuple(complex(v) for v in self.Lambda))
        for i, j in itertools.combinations(range(len(self.lam)), 2):
            if self.lam[i] == self.lam[j]:
                raise ValueError(f"spectral parameters lambda_{i+1} and lambda_{j+1} coincide")

    @property
    def A(self) -> complex:
        return complex(self.a) ** 2

    @property
    def K(self) -> complex:
        return complex(self.k_const) ** 2

    @property
    def n(self) -> int:
        return len(self.lam)

    def lam_diff(self, i: int, j: int) -> complex:
        return self.lam[i - 1] - self.lam[j - 1]

    def alpha_diff(self, i: int, j: int) -> complex:
        if not self.exp_alpha:
            return 0.0
        return self.exp_alpha[i - 1] - self.exp_alpha[j - 1]

    def degenerated(self, delta: complex) -> "ParamSet":
        """K = kappa*delta^2 and lambda_i = delta*Lambda_i."""
        k = cmath.sqrt(complex(self.kappa)) * delta
        return replace(self, k_const=k, lam=tuple(delta * v for v in self.Lambda), delta=delta)

    def p_value(self, i: int, j: int) -> complex:
        """Limit value kappa / Lambda_ij^2 of the squared generator."""
        d = self.Lambda[i - 1] - self.Lambda[j - 1]
        return complex(self.kappa) / d**2

    def to_json(self) -> dict:
        return {
            "a": _cjson(self.a),
            "A": _cjson(self.A),
            "k_const": _cjson(self.k_const),
            "K": _cjson(self.K),
            "b": _cjson(self.b),
            "lambda": [_cjson(v) for v in self.lam],
            "exp_alpha": [_cjson(v) for v in self.exp_alpha],
            "Lambda": [_cjson(v) for v in self.Lambda],
            "kappa": _cjson(self.kappa),
            "delta": _cjson(self.delta),
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "ParamSet":
        return cls(
            a=_from_cjson(d.get("a", 0)),
            k_const=_from_cjson(d.get("k_const", 1)),
            b=_from_cjson(d.get("b", 1)),
            lam=tuple(_from_cjson(v) for v in d.get("lambda", [])),
            exp_alpha=tuple(_from_cjson(v) for v in d.get("exp_alpha", [])),
            Lambda=tuple(_from_cjson(v) for v in d.get("Lambda", [])),
            kappa=_from_cjson(d.get("kappa", 1)),
            delta=_from_cjson(d.get("delta", 0)),
        )

    @classmethod
    def random(cls, n: int, seed: int, *, a=0.7, k_const=1.0, b=1.0, tilt=True) -> "ParamSet":
        """Generic parameters: spectral values spread in a small box."""
        rng = np.random.default_rng(seed)
        while True:
            lam = 0.15 * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)) + 0.1j * np.arange(n)
            diffs = [abs(lam[i] - lam[j]) for i, j in itertools.combinations(range(n), 2)]
            if not diffs or min(diffs) > 0.05:
                break
        alpha = 0.3 * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)) if tilt else np.zeros(n)
        Lam = 1 + np.arange(n) + 0.3 * rng.uniform(-1, 1, n)
        return cls(
            a=a, k_const=k_const, b=b, lam=tuple(lam), exp_alpha=tuple(alpha),
            Lambda=tuple(Lam), kappa=1.0 + 0.5 * rng.uniform(), delta=0.0,
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# ---------------------------------------------------------------------------
# Theta, sigma, wp


def theta1(z, ctx: EllipticContext, order: int = 0):
    """Jacobi theta_1 (or its ``order``-th derivative) by the truncated series

        theta1(z) = -sum_n exp(2 pi i ((z + 1/2)(n + 1/2) + tau/2 (n + 1/2)^2)).
    """
    if ctx.extended:
        return _theta1_mp(z, ctx, order)
    h = ctx._halves
    z = np.asarray(z, dtype=complex)
    expo = 2j * np.pi * (np.multiply.outer(z + 0.5, h) + 0.5 * ctx.tau * h**2)
    terms = np.exp(expo)
    if order:
        terms = terms * (2j * np.pi * h) ** order
    out = -terms.sum(axis=-1)
    return out if out.ndim else complex(out)


def _theta1_mp(z, ctx, order):
    with mpmath.workdps(EXTENDED_DPS):
        tau = mpmath.mpc(ctx.tau)
        z = mpmath.mpc(z)
        s = mpmath.mpc(0)
        for n in range(-ctx.series_truncation, ctx.series_truncation + 1):
            h = mpmath.mpf(n) + mpmath.mpf(1) / 2
            t = mpmath.exp(2j * mpmath.pi * ((z + mpmath.mpf(1) / 2) * h + tau / 2 * h**2))
            if order:
                t *= (2j * mpmath.pi * h) ** order
            s += t
        return -s


def lattice_reduce(z, tau: complex):
    """Translate z into the parallelogram centred at 0."""
    z = np.asarray(z, dtype=complex)
    m = np.round(z.imag / tau.imag)
    z = z - m * tau
    z = z - np.round(z.real)
    return z


def lattice_distance(z, tau: complex):
    """Distance from z to the nearest point of Z + Z*tau."""
    z = np.asarray(z, dtype=complex)
    r = lattice_reduce(z, tau)
    best = np.abs(r)
    for m in (-1, 0, 1):
        for k in (-1, 0, 1):
            best = np.minimum(best, np.abs(r - m - k * tau))
    return best


def wp(z, ctx: EllipticContext):
    """Weierstrass wp for the lattice Z + Z*tau, normalised as 1/z^2 + O(z^2).

    Computed as -(log theta1)''(z) plus the constant theta1'''(0)/(3 theta1'(0)).
    """
    if ctx.extended:
        zr = complex(lattice_reduce(complex(z), ctx.tau))
        if abs(zr) < POLE_EPS:
            raise PoleError(f"wp evaluated on the lattice at {z}")
        with mpmath.workdps(EXTENDED_DPS):
            t0, t1, t2 = (_theta1_mp(zr, ctx, k) for k in range(3))
            d1, d3 = (_theta1_mp(0, ctx, 1), _theta1_mp(0, ctx, 3))
            return (t1**2 - t0 * t2) / t0**2 + d3 / (3 * d1)
    zr = lattice_reduce(z, ctx.tau)
    if np.any(np.abs(zr) < POLE_EPS):
        raise PoleError(f"wp evaluated on the lattice at {z}")
    t0 = theta1(zr, ctx)
    t1 = theta1(zr, ctx, 1)
    t2 = theta1(zr, ctx, 2)
    return (t1**2 - t0 * t2) / t0**2 + ctx.wp_shift


def sigma_lambda(z, lam: complex, ctx: EllipticContext):
    """theta1(z - lam) theta1'(0) / (theta1(z) theta1(-lam))."""
    if np.any(lattice_distance(lam, ctx.tau) < POLE_EPS):
        raise PoleError(f"sigma_lambda: lambda={lam} lies on the lattice")
    if np.any(lattice_distance(z, ctx.tau) < POLE_EPS):
        raise PoleError(f"sigma_lambda: z={z} lies on the lattice")
    if ctx.extended:
        with mpmath.workdps(EXTENDED_DPS):
            d1 = _theta1_mp(0, ctx, 1)
            return _theta1_mp(z - lam, ctx, 0) * d1 / (_theta1_mp(z, ctx, 0) * _theta1_mp(-lam, ctx, 0))
    d1 = ctx.theta1_derivs_at_zero[0]
    z = np.asarray(z, dtype=complex)
    out = theta1(z - lam, ctx) * d1 / (theta1(z, ctx) * theta1(-lam, ctx))
    return out


# ---------------------------------------------------------------------------
# Jacobi sn by descending Landen transformation


def jacobi_sn(u, modulus, *, threshold: float = 1e-12, max_steps: int = 60):
    """sn(u, k) for complex u; descending Landen steps until k < threshold.

    Each step uses k1 = (1 - k')/(1 + k') and
    sn(u, k) = (1 + k1) sn(u/(1 + k1), k1) / (1 + k1 sn(u/(1 + k1), k1)^2).
    """
    k = complex(modulus)
    if abs(k * k - 1) < threshold:
        # k' = 0: no descent possible, sn degenerates to tanh
        t = np.tanh(np.asarray(u, dtype=complex))
        return t if t.ndim else complex(t)
    chain = []
    while abs(k) > threshold:
        kp = cmath.sqrt(1 - k * k)
        if kp.real < 0:
            kp = -kp
        k_next = (1 - kp) / (1 + kp)
        if abs(k_next) >= abs(k) or len(chain) >= max_steps:
            raise ConvergenceError(f"Landen descent does not contract for modulus {modulus}")
        chain.append(k_next)
        k = k_next
    u = np.asarray(u, dtype=complex)
    for k1 in chain:
        u = u / (1 + k1)
    s = np.sin(u)
    for k1 in reversed(chain):
        s = (1 + k1) * s / (1 + k1 * s * s)
    return s if s.ndim else complex(s)


# ---------------------------------------------------------------------------
# psi families


PSI_KINDS = ("elliptic", "trig", "rational")


def psi_family(kind: str, params: ParamSet, i: int, j: int, ctx: EllipticContext | None = None):
    """Return z -> psi_ij(z) for one of the three Calogero-Moser families.

    elliptic:  A/z^2 - K (wp(b z) - wp(lambda_ij))
    trig:      A/z^2 - K (1/sin^2(b z) - 1/sin^2(b lambda_ij))
    rational:  (A - K)/z^2 + K/lambda_ij^2

    The trigonometric form is the square of the displayed trigonometric
    operator; the sin^2(b(z - lambda)) numerator printed alongside it is not.
    """
    A, K, b = params.A, params.K, complex(params.b)
    lij = params.lam_diff(i, j)
    if kind == "elliptic":
        if ctx is None:
            raise ValueError("elliptic psi needs an EllipticContext")
        if lattice_distance(lij, ctx.tau) < POLE_EPS:
            raise PoleError("lambda_i - lambda_j on the lattice")
        wl = wp(lij, ctx)
        return lambda z: A / np.asarray(z) ** 2 - K * (wp(b * np.asarray(z), ctx) - wl)
    if kind == "trig":
        sl = cmath.sin(b * lij)
        if abs(sl) < POLE_EPS:
            raise PoleError("sin(b lambda_ij) = 0")
        return lambda z: A / np.asarray(z) ** 2 - K * (1 / np.sin(b * np.asarray(z)) ** 2 - 1 / sl**2)
    if kind == "rational":
        if abs(lij) < POLE_EPS:
            raise PoleError("lambda_i = lambda_j")
        return lambda z: (A - K) / np.asarray(z) ** 2 + K / lij**2
    raise ValueError(f"unknown psi kind {kind!r}")


def psi_trig_printed(params: ParamSet, i: int, j: int):
    """The trigonometric psi exactly as typeset, kept for comparison only."""
    A, K, b = params.A, params.K, complex(params.b)
    lij = params.lam_diff(i, j)
    return lambda z: A / z**2 - K * np.sin(b * (z - lij)) ** 2 / (np.sin(b * z) ** 2 * np.sin(b * lij) ** 2)


def trig_limit_params(params: ParamSet) -> ParamSet:
    """Elliptic parameters whose Im(tau) -> oo limit is the trig family ``params``.

    theta1(z) ~ sin(pi z) in the limit, so b and lambda are rescaled by 1/pi
    (after lambda_i -> b lambda_i) and K by 1/pi^2.
    """
    b = complex(params.b)
    return replace(
        params,
        b=b / math.pi,
        lam=tuple(b * v / math.pi for v in params.lam),
        k_const=complex(params.k_const) / math.pi,
    )


def kernel_function(kind: str, params: ParamSet, i: int, j: int, ctx: EllipticContext | None = None):
    """Reflection coefficient g_ij(z) of the Calogero-Moser operator D_ij, including the tilt."""
    k, b = complex(params.k_const), complex(params.b)
    lij = params.lam_diff(i, j)
    aij = params.alpha_diff(i, j)
    if kind == "elliptic":
        return lambda z: k * sigma_lambda(b * np.asarray(z), lij, ctx) * np.exp(aij * np.asarray(z))
    if kind == "trig":
        return lambda z: (
            k * np.sin(b * (np.asarray(z) - lij)) / (np.sin(b * np.asarray(z)) * np.sin(b * lij))
            * np.exp(aij * np.asarray(z))
        )
    if kind == "rational":
        return lambda z: k * (1 / np.asarray(z) - 1 / lij) * np.exp(aij * np.asarray(z))
    raise ValueError(f"unknown psi kind {kind!r}")


# ---------------------------------------------------------------------------
# Atom polynomials: the coefficient ring of the free algebra

# atoms:
#   ("x", i)      coordinate x_i
#   ("W", i, j)   even function of x_i - x_j (K wp(b x_ij) in the elliptic case)
#   ("R", i, j)   1/(x_i - x_j)^2
#   ("P", i, j)   spectral constant (K wp(lambda_ij), or p_ij after degeneration)
#   ("A",)        the constant a^2

_PAIR_ATOMS = ("W", "R", "P")


def atom(kind: str, *idx) -> tuple:
    if kind in _PAIR_ATOMS:
        i, j = idx
        if i == j:
            raise ValueError("pair atom needs distinct indices")
        return (kind, min(i, j), max(i, j))
    if kind == "x":
        return ("x", idx[0])
    if kind == "A":
        return ("A",)
    raise ValueError(f"unknown atom kind {kind!r}")


def twist_atom(a: tuple, sigma: Sequence[int]) -> tuple:
    """Relabel coordinate indices of an atom by sigma (1-based, sigma[i-1] = image)."""
    kind = a[0]
    if kind == "x":
        return ("x", sigma[a[1] - 1])
    if kind in ("W", "R"):
        return atom(kind, sigma[a[1] - 1], sigma[a[2] - 1])
    return a


def _normalize_number(c):
    if isinstance(c, complex) and c.imag == 0:
        c = c.real
    if isinstance(c, float) and c.is_integer():
        return int(c)
    return c


class AtomPoly:
    """Sparse commutative polynomial in atoms with int/Fraction/complex coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c) -> "AtomPoly":
        return cls({(): c}) if c != 0 else cls()

    @classmethod
    def from_atom(cls, a: tuple, c=1) -> "AtomPoly":
        return cls({(a,): c})

    @classmethod
    def coerce(cls, v) -> "AtomPoly":
        if isinstance(v, AtomPoly):
            return v
        return cls.const(v)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        other = AtomPoly.coerce(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = AtomPoly.coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return AtomPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return AtomPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-AtomPoly.coerce(other))

    def __rsub__(self, other):
        return AtomPoly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, AtomPoly):
            if other == 0:
                return AtomPoly()
            return AtomPoly({m: c * other for m, c in self.terms.items()})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2)) if m1 and m2 else (m1 or m2)
                out[m] = out.get(m, 0) + c1 * c2
        return AtomPoly(out)

    __rmul__ = __mul__

    def twist(self, sigma: Sequence[int]) -> "AtomPoly":
        out: dict = {}
        for m, c in self.terms.items():
            nm = tuple(sorted(twist_atom(a, sigma) for a in m))
            out[nm] = out.get(nm, 0) + c
        return AtomPoly(out)

    def atoms(self) -> set:
        return {a for m in self.terms for a in m}

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self):
        return self.terms.get((), 0)

    def depends_on_x(self) -> bool:
        return any(a[0] in ("x", "W", "R") for a in self.atoms())

    def substitute(self, values: Mapping[tuple, object]) -> "AtomPoly":
        """Replace atoms by numbers or AtomPolys; unmentioned atoms are kept."""
        out = AtomPoly()
        for m, c in self.terms.items():
            term = AtomPoly.const(c)
            for a in m:
                term = term * (AtomPoly.coerce(values[a]) if a in values else AtomPoly.from_atom(a))
            out = out + term
        return out

    def evaluate(self, values: Mapping[tuple, object] | Callable[[tuple], object]):
        get = values if callable(values) else values.__getitem__
        total = 0
        for m, c in self.terms.items():
            t = c
            for a in m:
                t = t * get(a)
            total = total + t
        return total

    def split_x_monomials(self) -> dict:
        """Group terms by their x-atom part: {x-monomial: AtomPoly in the other atoms}."""
        out: dict = {}
        for m, c in self.terms.items():
            xs = tuple(a for a in m if a[0] == "x")
            rest = tuple(a for a in m if a[0] != "x")
            out.setdefault(xs, {})
            out[xs][rest] = out[xs].get(rest, 0) + c
        return {k: AtomPoly(v) for k, v in out.items()}

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0])):
            name = "*".join(_atom_str(a) for a in m)
            parts.append(f"{c}" + (f"*{name}" if name else ""))
        return " + ".join(parts)

    def to_json(self):
        out = []
        for m, c in sorted(self.terms.items()):
            out.append([[list(a) for a in m], _number_to_json(c)])
        return out

    @classmethod
    def from_json(cls, data) -> "AtomPoly":
        terms = {}
        for m, c in data:
            terms[tuple(tuple(a) for a in m)] = _number_from_json(c)
        return cls(terms)


def _atom_str(a):
    if a[0] == "x":
        return f"x{a[1]}"
    if a[0] == "A":
        return "A"
    return f"{a[0]}{a[1]}{a[2]}"


def _number_to_json(c):
    if isinstance(c, Fraction):
        return {"q": f"{c.numerator}/{c.denominator}"}
    if isinstance(c, int):
        return {"q": str(c)}
    c = complex(c)
    return {"c": [c.real, c.imag]}


def _number_from_json(d):
    if "q" in d:
        v = Fraction(d["q"])
        return int(v) if v.denominator == 1 else v
    return _normalize_number(complex(*d["c"]))


class AtomValues:
    """Numeric atom evaluator for one psi family at a point of C^n."""

    def __init__(self, kind: str, params: ParamSet, ctx: EllipticContext | None = None):
        if kind not in PSI_KINDS:
            raise ValueError(f"no numeric atoms for kind {kind!r}")
        self.kind, self.params, self.ctx = kind, params, ctx
        K, b = params.K, complex(params.b)
        n = params.n
        self._P = {}
        for i, j in itertools.combinations(range(1, n + 1), 2):
            lij = params.lam_diff(i, j)
            if kind == "elliptic":
                self._P[(i, j)] = K * complex(wp(lij, ctx))
            elif kind == "trig":
                self._P[(i, j)] = K / cmath.sin(b * lij) ** 2
            else:
                self._P[(i, j)] = K / lij**2

    def w_function(self, z):
        K, b = self.params.K, complex(self.params.b)
        if self.kind == "elliptic":
            return K * wp(b * z, self.ctx)
        if self.kind == "trig":
            return K / np.sin(b * z) ** 2
        return K / z**2

    def table(self, point: Sequence[complex]) -> dict:
        point = np.asarray(point, dtype=complex)
        n = len(point)
        vals: dict = {("A",): self.params.A}
        for i in range(1, n + 1):
            vals[("x", i)] = point[i - 1]
        pairs = list(itertools.combinations(range(1, n + 1), 2))
        diffs = np.array([point[i - 1] - point[j - 1] for i, j in pairs])
        wvals = self.w_function(diffs) if len(pairs) else []
        for (i, j), d, w in zip(pairs, diffs, wvals):
            vals[("W", i, j)] = complex(w)
            vals[("R", i, j)] = complex(1 / d**2)
            vals[("P", i, j)] = self._P[(i, j)]
        return vals


# ---------------------------------------------------------------------------
# Exact rational functions


class ExactField:
    """Q(x_1..x_n, p_ij) with graded-lex order x_1 > ... > x_n > p_12 > ..."""

    def __init__(self, n: int, with_p: bool = True):
        self.n = n
        self.pairs = list(itertools.combinations(range(1, n + 1), 2)) if with_p else []
        names = [f"x{i}" for i in range(1, n + 1)] + [f"p{i}{j}" for i, j in self.pairs]
        self.field, *gens = sympy_field(",".join(names), QQ, grlex)
        if len(names) == 1:
            gens = [gens[0]] if not isinstance(gens[0], (list, tuple)) else list(gens[0])
        self.ring = self.field.ring
        self.x = gens[:n]
        self.p = dict(zip(self.pairs, gens[n:]))

    def zero(self) -> "ExactScalar":
        return ExactScalar(self, self.field.zero)

    def one(self) -> "ExactScalar":
        return ExactScalar(self, self.field.one)

    def xvar(self, i: int) -> "ExactScalar":
        return ExactScalar(self, self.x[i - 1])

    def pvar(self, i: int, j: int) -> "ExactScalar":
        return ExactScalar(self, self.p[(min(i, j), max(i, j))])

    def const(self, q) -> "ExactScalar":
        return ExactScalar(self, self.field(QQ(Fraction(q).numerator, Fraction(q).denominator)))

    def _perm_exponents(self, sigma: Sequence[int]) -> list[int]:
        # position map: new exponent vector e'[sigma(i)] = e[i] for x-variables
        n = self.n
        pos = list(range(len(self.x) + len(self.pairs)))
        for i in range(1, n + 1):
            pos[i - 1] = sigma[i - 1] - 1
        return pos

    def permute(self, elem, sigma: Sequence[int]):
        pos = self._perm_exponents(sigma)

        def perm_poly(poly):
            out = {}
            for mon, c in poly.items():
                new = [0] * len(mon)
                for k, e in enumerate(mon):
                    new[pos[k]] = e
                out[tuple(new)] = c
            return self.ring.from_dict(out) if out else self.ring.zero

        return self.field((perm_poly(elem.numer), perm_poly(elem.denom)))


@dataclass(frozen=True)
class ExactScalar:
    fld: ExactField = field(repr=False, compare=False)
    value: object = None

    def _wrap(self, v):
        return ExactScalar(self.fld, v)

    def _other(self, o):
        if isinstance(o, ExactScalar):
            return o.value
        return self.fld.const(o).value

    def __add__(self, o):
        return self._wrap(self.value + self._other(o))

    __radd__ = __add__

    def __sub__(self, o):
        return self._wrap(self.value - self._other(o))

    def __rsub__(self, o):
        return self._wrap(self._other(o) - self.value)

    def __mul__(self, o):
        return self._wrap(self.value * self._other(o))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.value)

    def inverse(self) -> "ExactScalar":
        if not self.value:
            raise DivisionByZero("inverting the zero rational function")
        return self._wrap(1 / self.value)

    def __truediv__(self, o):
        return self * ExactScalar(self.fld, self._other(o)).inverse()

    def __eq__(self, o):
        if isinstance(o, ExactScalar):
            return self.value == o.value
        return self.value == self._other(o)

    def __hash__(self):
        return hash(self.value)

    def is_zero(self) -> bool:
        return not self.value

    def swap(self, i: int, j: int) -> "ExactScalar":
        """Action of the transposition s_ij on the x-variables; p-parameters are fixed."""
        sigma = list(range(1, self.fld.n + 1))
        sigma[i - 1], sigma[j - 1] = j, i
        return self.permute(sigma)

    def permute(self, sigma: Sequence[int]) -> "ExactScalar":
        return self._wrap(self.fld.permute(self.value, sigma))

    @property
    def numer(self):
        return self.value.numer

    @property
    def denom(self):
        return self.value.denom

    def is_polynomial(self) -> bool:
        return self.value.denom == self.fld.ring.one

    def __repr__(self):
        return f"ExactScalar({self.value})"


# ---------------------------------------------------------------------------
# Sample plans


@dataclass(frozen=True)
class SamplePlan:
    """Seeded generic points in the box [-box, box] + i[-box, box] per coordinate.

    A point is rejected if any linear form (by default all differences
    x_i - x_j) comes within ``pole_margin`` of zero, or, when ``tau`` is set,
    of the lattice Z + Z*tau after scaling by ``scale``.
    """

    rng_seed: int = 0
    num_points: int = 5
    pole_margin: float = 1e-2
    box: float = 1.0
    tau: complex | None = None
    scale: complex = 1.0

    def __post_init__(self):
        if self.num_points < 1:
            raise ValueError("num_points must be >= 1")
        if not self.pole_margin > 0:
            raise ValueError("pole_margin must be positive")

    def with_seed(self, seed: int) -> "SamplePlan":
        return replace(self, rng_seed=seed)

    def points(self, dim: int, forms: np.ndarray | None = None, extra_ok: Callable | None = None) -> np.ndarray:
        if forms is None:
            forms = pair_forms(dim)
        rng = np.random.default_rng(self.rng_seed)
        pts = []
        tries = 0
        while len(pts) < self.num_points:
            tries += 1
            if tries > 10000 * self.num_points:
                raise RuntimeError("could not draw sample points respecting the pole margin")
            p = self.box * (rng.uniform(-1, 1, dim) + 1j * rng.uniform(-1, 1, dim))
            if not self.admissible(p, forms):
                continue
            if extra_ok is not None and not extra_ok(p):
                continue
            pts.append(p)
        return np.array(pts)

    def admissible(self, p: np.ndarray, forms: np.ndarray | None = None) -> bool:
        if forms is None:
            forms = pair_forms(len(p))
        if len(forms) == 0:
            return True
        vals = forms @ p
        if np.min(np.abs(vals)) < self.pole_margin:
            return False
        if self.tau is not None:
            if np.min(lattice_distance(self.scale * vals, complex(self.tau))) < self.pole_margin:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "rng_seed": self.rng_seed,
            "num_points": self.num_points,
            "pole_margin": self.pole_margin,
            "box": self.box,
            "tau": None if self.tau is None else _cjson(self.tau),
            "scale": _cjson(self.scale),
        }


def pair_forms(n: int) -> np.ndarray:
    rows = []
    for i, j in itertools.combinations(range(n), 2):
        r = np.zeros(n)
        r[i], r[j] = 1, -1
        rows.append(r)
    return np.array(rows).reshape(-1, n)


def random_rational(rng: np.random.Generator, bits: int = 16) -> Fraction:
    while True:
        num = int(rng.integers(-(2**bits) + 1, 2**bits))
        den = int(rng.integers(1, 2**bits))
        if num != 0:
            return Fraction(num, den)


def iter_atoms_pairs(n: int) -> Iterable[tuple[int, int]]:
    return itertools.combinations(range(1, n + 1), 2)
