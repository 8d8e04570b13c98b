"""Brute-force ground truth: isometry groups, homogeneity, exhaustive extension search.

Everything here is deliberately plain backtracking over exact distances, so the
rest of the library can be cross-checked against it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Optional, Sequence

from .metric_core import (
    FiniteMetricSpace,
    IsoextError,
    Isometry,
    PartialIsometry,
    SpaceError,
    validate_metric,
)


class TooLarge(IsoextError):
    pass


class PoolEmpty(IsoextError):
    pass


ISO_GROUP_CAP = 10


def _iso_backtrack(space: FiniteMetricSpace, partial: dict, collect_all: bool, out: list):
    """Extend a partial distance-preserving injection to total permutations."""
    n = space.n
    if len(partial) == n:
        perm = tuple(partial[i] for i in range(n))
        out.append(perm)
        return not collect_all
    src = min(i for i in range(n) if i not in partial)
    used = set(partial.values())
    d = space.dist
    for tgt in range(n):
        if tgt in used:
            continue
        if all(d[src][s] == d[tgt][t] for s, t in partial.items()):
            partial[src] = tgt
            if _iso_backtrack(space, partial, collect_all, out):
                return True
            del partial[src]
    return False


def brute_force_iso_group(space: FiniteMetricSpace, cap: int = ISO_GROUP_CAP) -> tuple:
    """All distance-preserving permutations, by backtracking."""
    if space.n > cap:
        raise TooLarge(f"{space.n} points exceeds the brute-force cap {cap}")
    out: list = []
    _iso_backtrack(space, {}, True, out)
    out.sort()
    return tuple(Isometry(space, perm) for perm in out)


def extend_to_isometry(space: FiniteMetricSpace, p: PartialIsometry) -> Optional[Isometry]:
    """First total isometry extending p in lexicographic order, or None."""
    out: list = []
    _iso_backtrack(space, dict(p.pairs), False, out)
    return Isometry(space, out[0]) if out else None


def extend_to_involution(space: FiniteMetricSpace, p: PartialIsometry) -> Optional[Isometry]:
    """First involutive total isometry extending a self-inverse p, or None."""
    if p.inverse().pairs != p.pairs:
        raise SpaceError("involutive extension requires a self-inverse partial map")
    n = space.n
    d = space.dist

    def rec(partial: dict) -> Optional[tuple]:
        # invariant: partial is symmetric, so keys and values coincide as sets
        if len(partial) == n:
            return tuple(partial[i] for i in range(n))
        src = min(i for i in range(n) if i not in partial)
        for tgt in range(n):
            if tgt != src and tgt in partial:
                continue
            if not all(d[src][s] == d[tgt][t] for s, t in partial.items()):
                continue
            if tgt != src and not all(
                d[tgt][s] == d[src][t] for s, t in partial.items()
            ):
                continue
            add = {src: tgt} if tgt == src else {src: tgt, tgt: src}
            partial.update(add)
            res = rec(partial)
            if res is not None:
                return res
            for key in add:
                del partial[key]
        return None

    perm = rec(dict(p.pairs))
    return Isometry(space, perm) if perm is not None else None


def is_homogeneous(space: FiniteMetricSpace, cap: int = ISO_GROUP_CAP) -> bool:
    """Transitivity of the brute-force isometry group."""
    if space.n > cap:
        raise TooLarge(f"{space.n} points exceeds the brute-force cap {cap}")
    if space.n <= 1:
        return True
    group = brute_force_iso_group(space, cap=cap)
    reached = {g.perm[0] for g in group}
    return len(reached) == space.n


def all_partial_isometries_extend(space: FiniteMetricSpace) -> bool:
    """Whether every nonidentity partial isometry extends to a total isometry."""
    from .metric_core import enumerate_partial_isometries

    return all(
        extend_to_isometry(space, p) is not None
        for p in enumerate_partial_isometries(space)
    )


def default_distance_pool(space: FiniteMetricSpace) -> tuple:
    """Sums of input distances, clipped at the diameter.

    Path-style constructions only ever produce such values, so the pool is a
    sound default for minimum-size witness search; callers may widen it.
    """
    if space.n <= 1:
        raise PoolEmpty("no distances to build a pool from")
    values = sorted({space.dist[i][j] for i in range(space.n) for j in range(i + 1, space.n)})
    diam = space.diameter()
    max_terms = int(diam / min(values)) + 1
    pool = set(values)
    frontier = set(values)
    for _ in range(max_terms - 1):
        frontier = {s + v for s in frontier for v in values if s + v <= diam}
        pool |= frontier
        if not frontier:
            break
    return tuple(sorted(pool))


@dataclass
class OracleReport:
    found: Optional[object]  # SExtension, set by the s_extension layer
    space: Optional[FiniteMetricSpace]
    assignment: Optional[dict]  # symbol index -> Isometry
    candidates_tried: int
    max_size_reached: int


def _candidate_spaces(space: FiniteMetricSpace, size: int, pool: Sequence[Fraction]):
    """All metric completions adding (size - n) new points, rows canonically ordered.

    New rows are generated nondecreasing lexicographically to prune relabelings
    of the added points.
    """
    n = space.n
    k = size - n
    if k == 0:
        yield space
        return

    labels = space.labels + tuple(f"z{i}" for i in range(k))

    def rec(rows: list):
        i = len(rows)  # index of the new point being placed, 0-based among new
        if i == k:
            m = size
            matrix = [[Fraction(0)] * m for _ in range(m)]
            for a in range(n):
                for b in range(n):
                    matrix[a][b] = space.dist[a][b]
            for a in range(k):
                for b in range(n):
                    matrix[n + a][b] = rows[a][b]
                    matrix[b][n + a] = rows[a][b]
                for b in range(a):
                    matrix[n + a][n + b] = rows[a][n + b]
                    matrix[n + b][n + a] = rows[a][n + b]
            yield validate_metric(labels, matrix)
            return
        width = n + i
        for row in product(pool, repeat=width):
            if i > 0 and row[: n + i - 1] < rows[-1][: n + i - 1]:
                continue  # canonical order on new points
            ok = True
            for a in range(width):
                for b in range(a + 1, width):
                    dab = space.dist[a][b] if b < n else rows[b - n][a]
                    if abs(row[a] - row[b]) > dab or dab > row[a] + row[b]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                yield from rec(rows + [row])

    yield from rec([])


def brute_force_s_extension(
    space: FiniteMetricSpace,
    symbols: Sequence[PartialIsometry],
    max_size: int = 7,
    distance_pool: Optional[Sequence[Fraction]] = None,
    max_candidates: Optional[int] = None,
) -> OracleReport:
    """Smallest extension space on which every generator extends compatibly.

    Returns the witness space plus one chosen total isometry per generator,
    with inverse pairs assigned mutually inverse images and self-inverse
    generators assigned involutions. Exhaustive over pool-valued completions
    in canonical order, so reports are deterministic.
    """
    if max_size > 7:
        raise IsoextError("oracle max_size capped at 7 by design")
    n = space.n
    if n > max_size:
        raise IsoextError("space larger than max_size")
    if space.n > 1:
        pool = tuple(distance_pool) if distance_pool is not None else default_distance_pool(space)
        if not pool:
            raise PoolEmpty("empty distance pool")
    else:
        pool = (Fraction(1),) if not distance_pool else tuple(distance_pool)

    symbols = list(symbols)
    index_of = {p.pairs: i for i, p in enumerate(symbols)}
    tried = 0
    reached = n
    for size in range(n, max_size + 1):
        reached = size
        for candidate in _candidate_spaces(space, size, pool):
            tried += 1
            if max_candidates is not None and tried > max_candidates:
                return OracleReport(None, None, None, tried - 1, size)
            assignment = {}
            ok = True
            for i, p in enumerate(symbols):
                if i in assignment:
                    continue
                lifted = PartialIsometry(candidate, p.pairs)
                j = index_of[p.inverse().pairs]
                if j == i:
                    iso = extend_to_involution(candidate, lifted)
                else:
                    iso = extend_to_isometry(candidate, lifted)
                if iso is None:
                    ok = False
                    break
                assignment[i] = iso
                if j != i:
                    assignment[j] = iso.inverse()
            if ok:
                return OracleReport(None, candidate, assignment, tried, size)
    return OracleReport(None, None, None, tried, reached)
