"""Weighted graphs, exact path (pseudo)metrics, reduced weights, metric identification."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from .metric_core import (
    Dist,
    FiniteMetricSpace,
    IsoextError,
    format_dist,
    validate_metric,
)


class GraphError(IsoextError):
    pass


class WeightConflict(GraphError):
    """Two different weights assigned to one vertex pair."""


class NoEdges(GraphError):
    pass


class Disconnected(GraphError):
    pass


class NotPseudoIsometry(GraphError):
    def __init__(self, map_index: int, message: str = ""):
        self.map_index = map_index
        super().__init__(message or f"map {map_index} does not preserve the pseudometric")


@dataclass(frozen=True)
class WeightedGraph:
    """Simple undirected graph with one exact weight per edge."""

    vertices: tuple
    edges: tuple  # tuple of (i, j, Fraction) with i < j, sorted

    @property
    def n(self) -> int:
        return len(self.vertices)

    def weight_bounds(self) -> tuple:
        if not self.edges:
            raise NoEdges("graph has no edges")
        weights = [w for _, _, w in self.edges]
        return min(weights), max(weights)

    def adjacency(self) -> list:
        adj = [[] for _ in range(self.n)]
        for i, j, w in self.edges:
            adj[i].append((j, w))
            adj[j].append((i, w))
        return adj

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [[self.vertices[i], self.vertices[j], format_dist(w)] for i, j, w in self.edges],
        }


def make_graph(vertices: Sequence[str], edge_triples, allow_zero: bool = False) -> WeightedGraph:
    """Build a WeightedGraph from (i, j, weight) triples, rejecting conflicts."""
    n = len(vertices)
    seen = {}
    for i, j, w in edge_triples:
        if i == j:
            raise GraphError("self-loops are not allowed")
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError("edge endpoint out of range")
        if w < 0 or (w == 0 and not allow_zero):
            raise GraphError(f"bad edge weight {w}")
        key = (min(i, j), max(i, j))
        if key in seen and seen[key] != w:
            raise WeightConflict(f"pair {key} assigned weights {seen[key]} and {w}")
        seen[key] = Fraction(w)
    edges = tuple(sorted((i, j, seen[(i, j)]) for i, j in seen))
    return WeightedGraph(tuple(vertices), edges)


@dataclass(frozen=True)
class PseudoMetric:
    """Symmetric, zero-diagonal, triangle-valid matrix; zeros off-diagonal allowed."""

    points: tuple
    pdist: tuple

    @property
    def n(self) -> int:
        return len(self.points)

    def d(self, i: int, j: int) -> Dist:
        return self.pdist[i][j]

    def check(self) -> None:
        n = self.n
        for i in range(n):
            if self.pdist[i][i] != 0:
                raise GraphError("nonzero diagonal in pseudometric")
            for j in range(n):
                if self.pdist[i][j] != self.pdist[j][i] or self.pdist[i][j] < 0:
                    raise GraphError("pseudometric not symmetric nonnegative")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.pdist[i][k] > self.pdist[i][j] + self.pdist[j][k]:
                        raise GraphError("pseudometric violates triangle inequality")


def _scaled_int_weights(edges) -> tuple:
    """Common denominator scaling so shortest paths run on integers."""
    denom = 1
    for _, _, w in edges:
        denom = lcm(denom, w.denominator)
    return denom, [(i, j, w.numerator * (denom // w.denominator)) for i, j, w in edges]


def shortest_from_sources(graph: WeightedGraph, sources: Sequence[int], cap: Optional[int] = None) -> list:
    """Exact single-source shortest path sums per source; None where unreachable.

    `cap` (scaled units) prunes anything strictly above it, since callers clamp
    at the weight ceiling anyway.
    """
    denom, int_edges = _scaled_int_weights(graph.edges) if graph.edges else (1, [])
    adj = [[] for _ in range(graph.n)]
    for i, j, w in int_edges:
        adj[i].append((j, w))
        adj[j].append((i, w))
    results = []
    for src in sources:
        dist = [None] * graph.n
        dist[src] = 0
        heap = [(0, src)]
        while heap:
            du, u = heapq.heappop(heap)
            if dist[u] != du:
                continue
            for v, w in adj[u]:
                nd = du + w
                if cap is not None and nd > cap:
                    continue
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        results.append([None if d is None else Fraction(d, denom) for d in dist])
    return results


def path_metric(graph: WeightedGraph) -> PseudoMetric:
    """d(x, y) = min(max edge weight, least path weight-sum); bound for disconnected pairs."""
    n = graph.n
    if n == 1:
        return PseudoMetric(graph.vertices, ((Fraction(0),),))
    if not graph.edges:
        raise NoEdges("path metric needs at least one edge")
    _, top = graph.weight_bounds()
    denom, _ = _scaled_int_weights(graph.edges)
    cap = top.numerator * (denom // top.denominator)
    rows = shortest_from_sources(graph, range(n), cap=cap)
    pdist = tuple(
        tuple(
            min(top, rows[i][j]) if rows[i][j] is not None else top
            for j in range(n)
        )
        for i in range(n)
    )
    return PseudoMetric(graph.vertices, pdist)


def path_pseudometric(graph: WeightedGraph) -> PseudoMetric:
    """Same as path_metric but zero weights are legal (pseudometric mode)."""
    return path_metric(graph)


def is_connected(graph: WeightedGraph) -> bool:
    if graph.n <= 1:
        return True
    adj = graph.adjacency()
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v, _ in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == graph.n


def is_reduced(graph: WeightedGraph) -> bool:
    """Every edge weight already equals the path metric of its endpoints."""
    if not graph.edges:
        return True
    pm = path_metric(graph)
    return all(pm.d(i, j) == w for i, j, w in graph.edges)


def reduce_weights(graph: WeightedGraph) -> WeightedGraph:
    """Replace each edge weight with the path metric of its endpoints.

    Produces the maximal reduced weight function bounded by the input.
    """
    if not is_connected(graph):
        raise Disconnected("weight reduction requires a connected graph")
    if not graph.edges:
        return graph
    pm = path_metric(graph)
    edges = tuple((i, j, pm.d(i, j)) for i, j, _ in graph.edges)
    return WeightedGraph(graph.vertices, edges)


def metric_identification(pm: PseudoMetric, maps: Sequence = ()) -> tuple:
    """Collapse zero-distance pairs to classes.

    Returns (space, projection, induced_maps): projection sends a point index to
    its class index; each induced map is the class permutation induced by the
    corresponding total point map, which must preserve pdist exactly.
    """
    n = pm.n
    for idx, mp in enumerate(maps):
        if sorted(mp) != list(range(n)):
            raise NotPseudoIsometry(idx, f"map {idx} is not a permutation")
        for i in range(n):
            for j in range(n):
                if pm.pdist[mp[i]][mp[j]] != pm.pdist[i][j]:
                    raise NotPseudoIsometry(idx)
    proj = [None] * n
    classes = []
    for i in range(n):
        if proj[i] is not None:
            continue
        cid = len(classes)
        members = [j for j in range(n) if pm.pdist[i][j] == 0]
        for j in members:
            proj[j] = cid
        classes.append(members)
    m = len(classes)
    reps = [members[0] for members in classes]
    matrix = [[pm.pdist[reps[a]][reps[b]] for b in range(m)] for a in range(m)]
    labels = tuple(str(pm.points[reps[a]]) for a in range(m))
    space = validate_metric(labels, matrix)
    induced = []
    for mp in maps:
        img = [None] * m
        for i in range(n):
            a, b = proj[i], proj[mp[i]]
            if img[a] is None:
                img[a] = b
            elif img[a] != b:
                raise GraphError("induced map is not well-defined on classes")
        induced.append(tuple(img))
    return space, tuple(proj), tuple(induced)
