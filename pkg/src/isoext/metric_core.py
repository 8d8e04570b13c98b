"""Exact-arithmetic finite metric spaces and their partial isometries.

Distances are `fractions.Fraction` values throughout; equality tests are
exact, which keeps every inequality decision in the search pipeline
decidable. Floating point never enters.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Optional, Sequence

Dist = Fraction


class IsoextError(Exception):
    """Base class for all errors raised by this library."""


class SpaceError(IsoextError):
    """Invalid metric space input."""


class AsymmetricMatrix(SpaceError):
    pass


class NonzeroDiagonal(SpaceError):
    pass


class ZeroOffDiagonal(SpaceError):
    pass


class NegativeDistance(SpaceError):
    pass


class TriangleViolation(SpaceError):
    def __init__(self, i: int, j: int, k: int, message: str = ""):
        self.triple = (i, j, k)
        super().__init__(message or f"triangle inequality fails at indices {(i, j, k)}")


def parse_dist(text) -> Dist:
    """Parse a rational from a JSON value: "p/q", "n", or an int."""
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text))


def format_dist(value: Dist) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class FiniteMetricSpace:
    """A finite metric space: point labels plus an exact distance matrix."""

    labels: tuple
    dist: tuple  # tuple of tuples of Fraction, row major, full square

    @property
    def n(self) -> int:
        return len(self.labels)

    def d(self, i: int, j: int) -> Dist:
        return self.dist[i][j]

    def index(self, label) -> int:
        return self.labels.index(label)

    def diameter(self) -> Dist:
        if self.n <= 1:
            return Fraction(0)
        return max(self.dist[i][j] for i in range(self.n) for j in range(i + 1, self.n))

    def min_positive(self) -> Dist:
        if self.n <= 1:
            raise SpaceError("no positive distances in a space with one point")
        return min(self.dist[i][j] for i in range(self.n) for j in range(i + 1, self.n))

    def restrict(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        idx = tuple(indices)
        labels = tuple(self.labels[i] for i in idx)
        dist = tuple(tuple(self.dist[i][j] for j in idx) for i in idx)
        return FiniteMetricSpace(labels, dist)

    def relabel(self, labels: Sequence[str]) -> "FiniteMetricSpace":
        if len(labels) != self.n:
            raise SpaceError("label count mismatch")
        return FiniteMetricSpace(tuple(labels), self.dist)

    def is_ultrametric(self) -> bool:
        n = self.n
        return all(
            self.dist[i][k] <= max(self.dist[i][j], self.dist[j][k])
            for i in range(n)
            for j in range(n)
            for k in range(n)
        )

    def to_json(self) -> dict:
        return {
            "points": list(self.labels),
            "dist": [[format_dist(v) for v in row] for row in self.dist],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiniteMetricSpace":
        labels = tuple(str(p) for p in data["points"])
        matrix = [[parse_dist(v) for v in row] for row in data["dist"]]
        return validate_metric(labels, matrix)


def validate_metric(labels: Sequence[str], matrix: Sequence[Sequence[Dist]]) -> FiniteMetricSpace:
    """Check all metric axioms and return the space, or raise a SpaceError."""
    n = len(labels)
    if len(set(labels)) != n:
        raise SpaceError("duplicate point labels")
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise SpaceError("distance matrix is not square of matching dimension")
    for i in range(n):
        if matrix[i][i] != 0:
            raise NonzeroDiagonal(f"dist[{i}][{i}] = {matrix[i][i]} != 0")
        for j in range(n):
            if matrix[i][j] < 0:
                raise NegativeDistance(f"dist[{i}][{j}] < 0")
            if matrix[i][j] != matrix[j][i]:
                raise AsymmetricMatrix(f"dist[{i}][{j}] != dist[{j}][{i}]")
            if i != j and matrix[i][j] == 0:
                raise ZeroOffDiagonal(f"dist[{i}][{j}] = 0 for distinct points")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if matrix[i][k] > matrix[i][j] + matrix[j][k]:
                    raise TriangleViolation(i, j, k)
    dist = tuple(tuple(Fraction(v) for v in row) for row in matrix)
    return FiniteMetricSpace(tuple(labels), dist)


def distance_set(space: FiniteMetricSpace) -> tuple:
    """Strictly increasing tuple of distinct off-diagonal distances."""
    values = {
        space.dist[i][j] for i in range(space.n) for j in range(space.n) if i != j
    }
    return tuple(sorted(values))


@dataclass(frozen=True)
class PartialIsometry:
    """A distance-preserving bijection between two subsets, as (src, tgt) index pairs."""

    space: FiniteMetricSpace
    pairs: tuple  # tuple of (source index, target index), sorted by source

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))

    @classmethod
    def from_labels(cls, space: FiniteMetricSpace, mapping: dict) -> "PartialIsometry":
        pairs = tuple(sorted((space.index(a), space.index(b)) for a, b in mapping.items()))
        return cls(space, pairs)

    @property
    def domain(self) -> tuple:
        return tuple(s for s, _ in self.pairs)

    @property
    def range(self) -> tuple:
        return tuple(sorted(t for _, t in self.pairs))

    def apply(self, i: int) -> Optional[int]:
        for s, t in self.pairs:
            if s == i:
                return t
        return None

    def inverse(self) -> "PartialIsometry":
        return PartialIsometry(self.space, tuple(sorted((t, s) for s, t in self.pairs)))

    @property
    def is_subidentity(self) -> bool:
        return all(s == t for s, t in self.pairs)

    def is_valid(self) -> bool:
        srcs = [s for s, _ in self.pairs]
        tgts = [t for _, t in self.pairs]
        if len(set(srcs)) != len(srcs) or len(set(tgts)) != len(tgts):
            return False
        d = self.space.dist
        return all(
            d[s1][s2] == d[t1][t2]
            for (s1, t1), (s2, t2) in combinations(self.pairs, 2)
        )

    def label_pairs(self) -> list:
        return [[self.space.labels[s], self.space.labels[t]] for s, t in self.pairs]


@dataclass(frozen=True)
class Isometry:
    """A total distance-preserving permutation of a space, as an image tuple."""

    space: FiniteMetricSpace
    perm: tuple

    def apply(self, i: int) -> int:
        return self.perm[i]

    def compose(self, other: "Isometry") -> "Isometry":
        # self after other: (self * other)(x) = self(other(x))
        return Isometry(self.space, tuple(self.perm[other.perm[i]] for i in range(len(self.perm))))

    def inverse(self) -> "Isometry":
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return Isometry(self.space, tuple(inv))

    def is_valid(self) -> bool:
        n = self.space.n
        if sorted(self.perm) != list(range(n)):
            return False
        d = self.space.dist
        return all(
            d[self.perm[i]][self.perm[j]] == d[i][j]
            for i in range(n)
            for j in range(i + 1, n)
        )

    def extends(self, p: PartialIsometry) -> bool:
        return all(self.perm[s] == t for s, t in p.pairs)


def compose_partial(p: PartialIsometry, q: PartialIsometry) -> Optional[PartialIsometry]:
    """p after q on the largest domain where defined; None if that domain is empty.

    The result may be contained in the identity; callers check is_subidentity.
    """
    if p.space != q.space:
        raise SpaceError("composition requires a common space")
    pairs = []
    for s, t in q.pairs:
        u = p.apply(t)
        if u is not None:
            pairs.append((s, u))
    if not pairs:
        return None
    return PartialIsometry(p.space, tuple(pairs))


def enumerate_partial_isometries(space: FiniteMetricSpace) -> tuple:
    """All nonidentity partial isometries, canonically sorted, closed under inverse."""
    n = space.n
    found = []
    points = range(n)
    for k in range(1, n + 1):
        for dom in combinations(points, k):
            for img in permutations(points, k):
                pairs = tuple(zip(dom, img))
                if all(s == t for s, t in pairs):
                    continue
                d = space.dist
                ok = all(
                    d[a][c] == d[b][e]
                    for (a, b), (c, e) in combinations(pairs, 2)
                )
                if ok:
                    found.append(PartialIsometry(space, pairs))
    found.sort(key=lambda p: (len(p.pairs), p.pairs))
    return tuple(found)
