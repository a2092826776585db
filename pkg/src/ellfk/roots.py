"""Root systems of types A_{n-1}, B_n and G2 with their reflection tables.

Roots are integer vectors in a basis with integer Gram matrix: the
epsilon basis for A and B, the simple-root basis for G2 (long root alpha_1,
short root alpha_2, matching the positive-root list
{a1, a1+a2, 2a1+3a2, a1+2a2, a1+3a2, a2}).  ``realization`` maps these
coordinates to vectors of the Euclidean space V on which operators act.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Root:
    vec: tuple
    name: str

    def __neg__(self):
        return tuple(-v for v in self.vec)


class RootSystemData:
    def __init__(self, type_tag: str, positive: list[tuple], names: list[str], gram, realization, simple: list[int]):
        self.type_tag = type_tag
        self.gram = np.asarray(gram, dtype=np.int64)
        self.realization = np.asarray(realization, dtype=float)
        self.positive = [tuple(int(c) for c in v) for v in positive]
        self.names = list(names)
        self.simple = list(simple)  # indices into positive
        self.roots = self.positive + [tuple(-c for c in v) for v in self.positive]
        self._index = {v: k for k, v in enumerate(self.positive)}
        self._build_tables()

    # -- basic geometry

    @property
    def rank(self) -> int:
        return self.realization.shape[1]

    @property
    def num_positive(self) -> int:
        return len(self.positive)

    def ip(self, u, v) -> int:
        return int(np.asarray(u) @ self.gram @ np.asarray(v))

    def pairing(self, beta, alpha) -> int:
        """<beta, alpha^vee> = 2 (beta, alpha)/(alpha, alpha), an integer."""
        num, den = 2 * self.ip(beta, alpha), self.ip(alpha, alpha)
        if num % den:
            raise ValueError("non-crystallographic pairing")
        return num // den

    def reflect(self, alpha, beta) -> tuple:
        c = self.pairing(beta, alpha)
        return tuple(b - c * a for a, b in zip(alpha, beta))

    def signed_index(self, v) -> tuple[int, int]:
        """(index of the positive root +-v, sign)."""
        v = tuple(v)
        if v in self._index:
            return self._index[v], 1
        neg = tuple(-c for c in v)
        if neg in self._index:
            return self._index[neg], -1
        raise KeyError(f"{v} is not a root")

    def _build_tables(self):
        N = self.num_positive
        self.refl_index = np.zeros((N, N), dtype=np.int64)
        self.refl_sign = np.zeros((N, N), dtype=np.int64)
        for a, alpha in enumerate(self.positive):
            for b, beta in enumerate(self.positive):
                idx, sgn = self.signed_index(self.reflect(alpha, beta))
                self.refl_index[a, b] = idx
                self.refl_sign[a, b] = sgn

    # -- realizations used by operators

    def vector(self, idx: int) -> np.ndarray:
        """Positive root idx as a vector of V."""
        return np.asarray(self.positive[idx], dtype=float) @ self.realization

    def coroot_vector(self, idx: int) -> np.ndarray:
        v = self.vector(idx)
        return 2 * v / (v @ v)

    def reflection_matrix(self, idx: int) -> np.ndarray:
        v = self.vector(idx)
        return np.eye(self.rank) - 2 * np.outer(v, v) / (v @ v)

    @cached_property
    def fundamental_weights(self) -> np.ndarray:
        """Rows pi_i with (pi_i, alpha_j^vee) = delta_ij, inside the span of the roots."""
        cor = np.array([self.coroot_vector(s) for s in self.simple])
        simple = np.array([self.vector(s) for s in self.simple])
        # pi_i = sum_k c_ik alpha_k with C (alpha_k, alpha_j^vee) = I
        M = simple @ cor.T
        C = np.linalg.inv(M)
        return C @ simple

    def coroot_coefficients(self, idx: int) -> np.ndarray:
        """Coefficients of alpha^vee in the basis of simple coroots."""
        return self.fundamental_weights @ self.coroot_vector(idx)

    def index_of_name(self, name: str) -> int:
        return self.names.index(name)


def type_A(n: int) -> RootSystemData:
    """A_{n-1}: roots ij = e_i - e_j, positive when i < j."""
    pos, names = [], []
    for i, j in itertools.combinations(range(n), 2):
        v = [0] * n
        v[i], v[j] = 1, -1
        pos.append(tuple(v))
        names.append(f"{i+1}{j+1}")
    simple = [names.index(f"{i}{i+1}") for i in range(1, n)]
    return RootSystemData(f"A{n-1}", pos, names, np.eye(n, dtype=int), np.eye(n), simple)


def type_B(n: int) -> RootSystemData:
    """B_n: ij = e_i - e_j, ij-bar = e_i + e_j, i = e_i."""
    pos, names = [], []
    for i, j in itertools.combinations(range(n), 2):
        v = [0] * n
        v[i], v[j] = 1, -1
        pos.append(tuple(v))
        names.append(f"{i+1}{j+1}")
        w = [0] * n
        w[i], w[j] = 1, 1
        pos.append(tuple(w))
        names.append(f"{i+1}{j+1}bar")
    for i in range(n):
        v = [0] * n
        v[i] = 1
        pos.append(tuple(v))
        names.append(f"{i+1}")
    simple = [names.index(f"{i}{i+1}") for i in range(1, n)] + [names.index(f"{n}")]
    return RootSystemData(f"B{n}", pos, names, np.eye(n, dtype=int), np.eye(n), simple)


def type_G2() -> RootSystemData:
    # simple-root coordinates; Gram matrix scaled by 2: |a1|^2 = 6, |a2|^2 = 2, (a1, a2) = -3
    pos = [(1, 0), (1, 1), (2, 3), (1, 2), (1, 3), (0, 1)]
    names = ["a1", "a1+a2", "2a1+3a2", "a1+2a2", "a1+3a2", "a2"]
    gram = [[6, -3], [-3, 2]]
    realization = [[-1.5, math.sqrt(3) / 2], [1.0, 0.0]]
    return RootSystemData("G2", pos, names, gram, realization, simple=[0, 5])


def root_system(tag: str) -> RootSystemData:
    tag = tag.upper()
    if tag == "G2":
        return type_G2()
    kind, rank = tag[0], int(tag[1:])
    if kind == "A":
        return type_A(rank + 1)
    if kind == "B":
        return type_B(rank)
    raise ValueError(f"unsupported root system {tag!r}")
