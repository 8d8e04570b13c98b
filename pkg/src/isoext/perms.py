"""Permutation helpers: tuples of images over range(n)."""
from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .metric_core import IsoextError


class ClosureBudgetExceeded(IsoextError):
    pass


def identity(n: int) -> tuple:
    return tuple(range(n))


def compose(p: tuple, q: tuple) -> tuple:
    # (p * q)(x) = p(q(x))
    return tuple(p[q[i]] for i in range(len(p)))


def inverse(p: tuple) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def perm_order(p: tuple) -> int:
    n = len(p)
    e = identity(n)
    q = p
    k = 1
    while q != e:
        q = compose(q, p)
        k += 1
    return k


def closure(gens: Iterable[tuple], cap: int = 10**6) -> list:
    """All elements of the group generated by gens, sorted; raises past cap."""
    gens = [g for g in dict.fromkeys(gens)]
    if not gens:
        return []
    n = len(gens[0])
    gens = [g for g in gens if g != identity(n)]
    elements = {identity(n)}
    frontier = [identity(n)]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = compose(g, h)
                if gh not in elements:
                    if len(elements) >= cap:
                        raise ClosureBudgetExceeded(f"subgroup closure exceeded {cap} elements")
                    elements.add(gh)
                    nxt.append(gh)
        frontier = nxt
    return sorted(elements)


def orbit_partition(n: int, gens: Sequence[tuple]) -> list:
    """orbit id per point under the group generated by gens."""
    ids = [-1] * n
    nid = 0
    for start in range(n):
        if ids[start] != -1:
            continue
        ids[start] = nid
        stack = [start]
        while stack:
            u = stack.pop()
            for g in gens:
                v = g[u]
                if ids[v] == -1:
                    ids[v] = nid
                    stack.append(v)
        nid += 1
    return ids


def pair_orbit_assign(n: int, gens: Sequence[tuple], seeds) -> Optional[dict]:
    """Close weighted ordered pairs under the diagonal action.

    seeds: iterable of ((i, j), value). Returns {unordered pair: value} or None
    on conflicting values (including a positive value landing on a diagonal pair).
    """
    assigned = {}
    stack = []
    inv_closed = list(gens) + [inverse(g) for g in gens]
    for (i, j), val in seeds:
        key = (min(i, j), max(i, j))
        if key[0] == key[1]:
            if val != 0:
                return None
            continue
        if key in assigned:
            if assigned[key] != val:
                return None
            continue
        assigned[key] = val
        stack.append(key)
    while stack:
        (i, j) = stack.pop()
        val = assigned[(i, j)]
        for g in inv_closed:
            a, b = g[i], g[j]
            key = (min(a, b), max(a, b))
            if key[0] == key[1]:
                return None
            if key in assigned:
                if assigned[key] != val:
                    return None
            else:
                assigned[key] = val
                stack.append(key)
    return assigned
