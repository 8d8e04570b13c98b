"""Canonical finite extensions from admissible finite quotients.

Pipeline: enumerate the coset-avoidance conditions, search for an admissible
finite permutation quotient (oracle bootstrap, then completions of the partial
action, then random images), then realize the extension on the coset space of
the stabilizer image with the exact path metric.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from .metric_core import (
    Dist,
    FiniteMetricSpace,
    IsoextError,
    Isometry,
    PartialIsometry,
    format_dist,
    parse_dist,
    validate_metric,
)
from .group_core import (
    CosetPattern,
    CosetSpace,
    FiniteQuotient,
    GenSet,
    StabilizerGens,
    Word,
    build_coset_space,
    evaluate_word,
    pattern_excluded_in_cosets,
    stabilizer_generators,
)
from .perms import ClosureBudgetExceeded, closure, compose, identity, inverse, pair_orbit_assign
from . import oracle as oracle_mod
from .weighted_graph import PseudoMetric, metric_identification


class BudgetExhausted(IsoextError):
    pass


class ConflictingWeight(IsoextError):
    pass


class CollapsedPoints(IsoextError):
    pass


class NotReduced(IsoextError):
    pass


class IncompatibleQuotient(IsoextError):
    pass


class NotInvariant(IsoextError):
    pass


class NotConsistent(IsoextError):
    pass


@dataclass(frozen=True)
class SearchBudget:
    """Knobs for the admissible-quotient search; the seed fixes every choice."""

    seed: int = 0
    max_degree: int = 14
    max_candidates: int = 4000
    closure_cap: int = 10**6
    group_cap: int = 150_000
    max_cosets: int = 1200
    oracle_extra_points: int = 2  # oracle bootstrap margin above |X| for tiny spaces
    oracle_max_candidates: int = 3000
    jobs: int = 1


@dataclass(frozen=True)
class SExtension:
    """An extension space plus one total isometry per generator, extending it."""

    base: FiniteMetricSpace
    space: FiniteMetricSpace
    embed: tuple  # base point index -> space point index
    genset: GenSet
    smap: tuple  # one permutation of the space per generator symbol

    def symbol_perm(self, symbol_index: int) -> tuple:
        return self.smap[symbol_index]

    def symbol_iso(self, symbol_index: int) -> Isometry:
        return Isometry(self.space, self.smap[symbol_index])

    def letter_perm(self, letter: int) -> tuple:
        return self.smap[self.genset.symbol_for_letter(letter)]

    def word_perm(self, w: Word) -> tuple:
        acc = identity(self.space.n)
        for letter in w.letters:
            acc = compose(acc, self.letter_perm(letter))
        return acc

    def image_group(self, cap: int = 10**6) -> list:
        return closure([identity(self.space.n), *self.smap], cap=cap)

    def orbit_of_base(self) -> tuple:
        start = self.embed[self.genset.base]
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for perm in self.smap:
                v = perm[u]
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return tuple(sorted(seen))

    def is_minimal(self) -> bool:
        return len(self.orbit_of_base()) == self.space.n

    def as_quotient(self) -> FiniteQuotient:
        """The generator action on the extension's points, as a finite quotient."""
        return FiniteQuotient(
            self.space.n, tuple(self.smap[rep] for rep in self.genset.reps)
        )

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "space": self.space.to_json(),
            "base_point": self.base.labels[self.genset.base],
            "embed": {
                self.base.labels[i]: self.space.labels[self.embed[i]]
                for i in range(self.base.n)
            },
            "gens": {
                f"p{i}": p.label_pairs() for i, p in enumerate(self.genset.symbols)
            },
            "smap": {
                f"p{i}": [self.space.labels[v] for v in self.smap[i]]
                for i in range(len(self.genset.symbols))
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "SExtension":
        base = FiniteMetricSpace.from_json(data["base"])
        space = FiniteMetricSpace.from_json(data["space"])
        base_point = base.index(str(data["base_point"]))
        symbols = []
        ids = sorted(data["gens"], key=lambda s: int(s[1:]))
        for gid in ids:
            pairs = tuple(
                sorted((base.index(str(a)), base.index(str(b))) for a, b in data["gens"][gid])
            )
            symbols.append(PartialIsometry(base, pairs))
        genset = GenSet.from_symbols(base, symbols, base=base_point, require_rich=False)
        if [p.pairs for p in genset.symbols] != [p.pairs for p in symbols]:
            raise IsoextError("generator ids are not in canonical order")
        embed = tuple(space.index(str(data["embed"][base.labels[i]])) for i in range(base.n))
        smap = tuple(
            tuple(space.index(str(l)) for l in data["smap"][f"p{i}"])
            for i in range(len(symbols))
        )
        return cls(base, space, embed, genset, smap)


@dataclass(frozen=True)
class ConditionInstance:
    """One coset-avoidance requirement, with the point tuple that generated it."""

    kind: str  # C1 | C2 | C3 (C4..C6 in the coherent pipeline)
    pattern: CosetPattern
    provenance: tuple


def condition_instances(genset: GenSet) -> tuple:
    """Every distance-separation condition the quotient kernel must avoid.

    Enumerated over point tuples: the coset of a one-step word depends only on
    the reached point, so per-point canonical words cover all generator tuples.
    Degenerate tuples that reduce to shorter patterns are left to their own
    kind (a zero-length side of a C1 tuple is exactly a C2 instance).
    """
    space = genset.space
    reachable = [genset.base]
    for p in genset.symbols:
        t = p.apply(genset.base)
        if t is not None and t not in reachable:
            reachable.append(t)
    reachable.sort()
    pword = {a: genset.point_word(a) for a in reachable}
    labels = space.labels
    out = []
    seen = set()

    def emit(kind: str, words: tuple, provenance: tuple) -> None:
        pattern = CosetPattern(tuple(words))
        key = (kind, pattern.key())
        if key not in seen:
            seen.add(key)
            out.append(ConditionInstance(kind, pattern, provenance))

    pairs = [(a, b) for a in reachable for b in reachable if a != b]
    for a, b in pairs:
        emit("C2", (pword[a], pword[b].inverse()), (labels[a], labels[b]))
    for a, b in pairs:
        for c, e in pairs:
            if space.d(a, b) != space.d(c, e):
                emit(
                    "C1",
                    (pword[a], pword[c].inverse().concat(pword[e]), pword[b].inverse()),
                    (labels[a], labels[b], labels[c], labels[e]),
                )
    if len(reachable) >= 2:
        steps = sorted(pairs, key=lambda ce: (space.d(ce[0], ce[1]), ce))
        for a, b in pairs:
            target = space.d(a, b)

            def dfs(seq: list, total: Fraction) -> None:
                for c, e in steps:
                    v = space.d(c, e)
                    if total + v >= target:
                        break  # steps sorted by value, later ones only grow
                    nxt = seq + [(c, e)]
                    words = (
                        [pword[a]]
                        + [pword[x].inverse().concat(pword[y]) for x, y in nxt]
                        + [pword[b].inverse()]
                    )
                    emit(
                        "C3",
                        tuple(words),
                        (labels[a], labels[b], tuple((labels[x], labels[y]) for x, y in nxt)),
                    )
                    dfs(nxt, total + v)

            dfs([], Fraction(0))
    return tuple(out)


def certify_quotient(
    genset: GenSet,
    quotient: FiniteQuotient,
    hgens: Optional[StabilizerGens] = None,
    instances: Optional[Sequence[ConditionInstance]] = None,
    closure_cap: int = 10**6,
    group_cap: int = 150_000,
    max_cosets: int = 4000,
) -> bool:
    """All condition instances excluded, using one shared coset space."""
    hgens = hgens if hgens is not None else stabilizer_generators(genset)
    instances = instances if instances is not None else condition_instances(genset)
    space = build_coset_space(
        genset, quotient, hgens, closure_cap=closure_cap, group_cap=group_cap, max_cosets=max_cosets
    )
    return all(pattern_excluded_in_cosets(space, inst.pattern) for inst in instances)


def _coset_weights(cs: CosetSpace) -> dict:
    """Translate-closed edge weights of the coset graph; raises on conflicts."""
    genset = cs.genset
    space = genset.space
    reachable = sorted(
        {genset.base}
        | {p.apply(genset.base) for p in genset.symbols if p.apply(genset.base) is not None}
    )
    base_coset = {a: cs.coset_of_point(a) for a in reachable}
    for a in reachable:
        for b in reachable:
            if a < b and base_coset[a] == base_coset[b]:
                raise CollapsedPoints(
                    f"points {space.labels[a]} and {space.labels[b]} share a coset"
                )
    seeds = [
        ((base_coset[a], base_coset[b]), space.d(a, b))
        for a in reachable
        for b in reachable
        if a < b
    ]
    assigned = pair_orbit_assign(cs.size, cs.sigma_pos, seeds)
    if assigned is None:
        raise ConflictingWeight("translated edges assign conflicting weights")
    return assigned


def _coset_metric(cs: CosetSpace, weights: dict) -> tuple:
    """All-pairs path metric on the coset graph via vertex transitivity.

    One exact Dijkstra from the base coset; every other row is the base row
    pushed through the translation that carries that coset to the base.
    """
    size = cs.size
    zero = Fraction(0)
    if size == 1 or not weights:
        if size > 1:
            raise IsoextError("multi-coset graph with no edges")
        return ((zero,),)
    import heapq
    from math import lcm

    denom = 1
    for w in weights.values():
        denom = lcm(denom, w.denominator)
    adj = [[] for _ in range(size)]
    top = 0
    for (i, j), w in weights.items():
        iw = w.numerator * (denom // w.denominator)
        adj[i].append((j, iw))
        adj[j].append((i, iw))
        top = max(top, iw)
    dist0 = [None] * size
    dist0[cs.base] = 0
    heap = [(0, cs.base)]
    while heap:
        du, u = heapq.heappop(heap)
        if dist0[u] != du:
            continue
        for v, w in adj[u]:
            nd = du + w
            if nd > top:
                continue
            if dist0[v] is None or nd < dist0[v]:
                dist0[v] = nd
                heapq.heappush(heap, (nd, v))
    row0 = [top if d is None else min(top, d) for d in dist0]
    # BFS accumulating, per coset, the index action of a group element reaching it
    tau = [None] * size
    tau[cs.base] = tuple(range(size))
    queue = deque([cs.base])
    sigmas = list(cs.sigma_pos) + list(cs.sigma_neg)
    while queue:
        u = queue.popleft()
        for s in sigmas:
            v = s[u]
            if tau[v] is None:
                tau[v] = compose(s, tau[u])
                queue.append(v)
    matrix = [[zero] * size for _ in range(size)]
    for i in range(size):
        inv_tau = inverse(tau[i])
        row = matrix[i]
        for j in range(size):
            row[j] = zero if i == j else Fraction(row0[inv_tau[j]], denom)
    return tuple(tuple(r) for r in matrix)


def build_extension_from_quotient(
    quotient: FiniteQuotient,
    genset: GenSet,
    hgens: Optional[StabilizerGens] = None,
    closure_cap: int = 10**6,
    group_cap: int = 150_000,
    max_cosets: int = 4000,
) -> SExtension:
    """Realize the extension on the coset space of the stabilizer image.

    Raises ConflictingWeight, CollapsedPoints or NotReduced when the quotient
    violates the corresponding separation condition.
    """
    if not genset.rich:
        raise IsoextError("construction needs every point reachable in one step")
    hgens = hgens if hgens is not None else stabilizer_generators(genset)
    cs = build_coset_space(
        genset, quotient, hgens, closure_cap=closure_cap, group_cap=group_cap, max_cosets=max_cosets
    )
    weights = _coset_weights(cs)
    matrix = _coset_metric(cs, weights)
    for (i, j), w in weights.items():
        if matrix[i][j] != w:
            raise NotReduced(
                f"edge ({i},{j}) weight {w} undercut by a path of length {matrix[i][j]}"
            )
    labels = tuple(f"y{i}" for i in range(cs.size))
    space = validate_metric(labels, matrix)
    embed = tuple(cs.coset_of_point(a) for a in range(genset.space.n))
    smap = []
    for i in range(len(genset.symbols)):
        letter = genset.letter_for_symbol(i)
        k = abs(letter) - 1
        smap.append(cs.sigma_pos[k] if letter > 0 else cs.sigma_neg[k])
    return SExtension(genset.space, space, embed, genset, tuple(smap))


@dataclass
class VerifyReport:
    violations: list = field(default_factory=list)
    checked_full: bool = False  # whether the generator set covers all partial isometries

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_s_extension(ext: SExtension) -> VerifyReport:
    """Check every clause of the extension contract; list violations."""
    report = VerifyReport()
    say = report.violations.append
    base, space = ext.base, ext.space
    try:
        validate_metric(base.labels, base.dist)
        validate_metric(space.labels, space.dist)
    except IsoextError as err:
        say(f"invalid space: {err}")
        return report
    if len(set(ext.embed)) != base.n:
        say("embedding is not injective")
    for i in range(base.n):
        for j in range(i + 1, base.n):
            if space.d(ext.embed[i], ext.embed[j]) != base.d(i, j):
                say(f"embedding distorts d({base.labels[i]},{base.labels[j]})")
    if len(ext.smap) != len(ext.genset.symbols):
        say("one image required per generator")
        return report
    for idx, perm in enumerate(ext.smap):
        iso = Isometry(space, perm)
        if not iso.is_valid():
            say(f"image of p{idx} is not a total isometry")
            continue
        for s, t in ext.genset.symbols[idx].pairs:
            if perm[ext.embed[s]] != ext.embed[t]:
                say(f"image of p{idx} does not extend p{idx}")
                break
        partner = ext.genset.partner[idx]
        if ext.smap[partner] != inverse(perm):
            say(f"image of p{idx} is not inverse-compatible with its partner")
    if ext.genset.is_full():
        report.checked_full = True
        # with the full generator set the extension property holds for every
        # nonidentity partial isometry by the per-generator checks above
    return report


def minimalize(ext: SExtension) -> SExtension:
    """Restrict to the orbit of the embedded base point; identity if already minimal."""
    orbit = ext.orbit_of_base()
    if len(orbit) == ext.space.n:
        return ext
    renumber = {old: new for new, old in enumerate(orbit)}
    space = ext.space.restrict(orbit)
    embed = tuple(renumber[ext.embed[i]] for i in range(ext.base.n))
    smap = tuple(
        tuple(renumber[perm[old]] for old in orbit) for perm in ext.smap
    )
    return SExtension(ext.base, space, embed, ext.genset, smap)


def _coset_points(ext: SExtension, cs: CosetSpace) -> list:
    """Y-point tracked per coset; raises when the quotient disagrees with the action."""
    size = cs.size
    point = [None] * size
    point[cs.base] = ext.embed[ext.genset.base]
    queue = deque([cs.base])
    letters = []
    for k in range(len(cs.quotient.images)):
        letters.append((cs.sigma_pos[k], ext.letter_perm(k + 1)))
        letters.append((cs.sigma_neg[k], ext.letter_perm(-(k + 1))))
    while queue:
        u = queue.popleft()
        for sigma, perm in letters:
            v = sigma[u]
            target = perm[point[u]]
            if point[v] is None:
                point[v] = target
                queue.append(v)
    for u in range(size):
        for sigma, perm in letters:
            v = sigma[u]
            if point[v] != perm[point[u]]:
                raise IncompatibleQuotient(
                    "quotient cosets do not project onto the extension's action"
                )
    return point


def induced_pseudometric(ext: SExtension, quotient: FiniteQuotient) -> PseudoMetric:
    """Pull the extension's metric back to the quotient's coset space.

    The result is invariant under the translation action and agrees with the
    coset graph weights; collapsed cosets show up as zero rows.
    """
    hgens = stabilizer_generators(ext.genset)
    cs = build_coset_space(ext.genset, quotient, hgens)
    point = _coset_points(ext, cs)
    size = cs.size
    pdist = tuple(
        tuple(ext.space.d(point[i], point[j]) for j in range(size)) for i in range(size)
    )
    pm = PseudoMetric(tuple(f"c{i}" for i in range(size)), pdist)
    weights = _coset_weights(cs)
    for (i, j), w in weights.items():
        if pm.d(i, j) != w:
            raise IncompatibleQuotient("pulled-back metric conflicts with coset weights")
    return pm


def quotient_extension(
    quotient: FiniteQuotient,
    rho: PseudoMetric,
    genset: GenSet,
) -> SExtension:
    """Metric identification of the coset space under an invariant pseudometric."""
    hgens = stabilizer_generators(genset)
    cs = build_coset_space(genset, quotient, hgens)
    if rho.n != cs.size:
        raise IncompatibleQuotient(
            f"pseudometric on {rho.n} points, coset space has {cs.size}"
        )
    weights = _coset_weights(cs)
    for (i, j), w in weights.items():
        if rho.d(i, j) != w:
            raise NotConsistent(f"rho({i},{j}) = {rho.d(i, j)} but the edge weighs {w}")
    for sigma in cs.sigma_pos:
        for i in range(cs.size):
            for j in range(i + 1, cs.size):
                if rho.d(sigma[i], sigma[j]) != rho.d(i, j):
                    raise NotInvariant("pseudometric is not translation-invariant")
    maps = []
    for idx in range(len(genset.symbols)):
        letter = genset.letter_for_symbol(idx)
        k = abs(letter) - 1
        maps.append(cs.sigma_pos[k] if letter > 0 else cs.sigma_neg[k])
    space, proj, induced = metric_identification(rho, maps)
    labels = tuple(f"y{i}" for i in range(space.n))
    space = space.relabel(labels)
    embed = tuple(proj[cs.coset_of_point(a)] for a in range(genset.space.n))
    if len(set(embed)) != genset.space.n:
        raise CollapsedPoints("identification collapses base points")
    return SExtension(genset.space, space, embed, genset, tuple(induced))


def isomorphism_check(first: SExtension, second: SExtension) -> Optional[tuple]:
    """Equivariant isometry fixing the common base, as an image tuple, or None."""
    if first.base != second.base:
        return None
    if [p.pairs for p in first.genset.symbols] != [p.pairs for p in second.genset.symbols]:
        return None
    n = first.space.n
    if n != second.space.n:
        return None
    d1, d2 = first.space.dist, second.space.dist

    def propagate(mapping: dict) -> Optional[dict]:
        queue = deque(mapping.items())
        mapping = dict(mapping)
        while queue:
            y, z = queue.popleft()
            for perm1, perm2 in zip(first.smap, second.smap):
                ny, nz = perm1[y], perm2[z]
                if ny in mapping:
                    if mapping[ny] != nz:
                        return None
                else:
                    for oy, oz in mapping.items():
                        if d1[ny][oy] != d2[nz][oz]:
                            return None
                    if nz in mapping.values():
                        return None
                    mapping[ny] = nz
                    queue.append((ny, nz))
        return mapping

    start = {first.embed[i]: second.embed[i] for i in range(first.base.n)}
    if len(set(start.values())) != len(start):
        return None
    for oy, oz in start.items():
        for py, pz in start.items():
            if d1[oy][py] != d2[oz][pz]:
                return None

    def search(mapping: dict) -> Optional[dict]:
        mapping = propagate(mapping)
        if mapping is None:
            return None
        if len(mapping) == n:
            return mapping
        y = min(i for i in range(n) if i not in mapping)
        used = set(mapping.values())
        for z in range(n):
            if z in used:
                continue
            if any(d1[y][oy] != d2[z][oz] for oy, oz in mapping.items()):
                continue
            trial = dict(mapping)
            trial[y] = z
            res = search(trial)
            if res is not None:
                return res
        return None

    final = search(start)
    if final is None:
        return None
    return tuple(final[i] for i in range(n))


def _completion_images(genset: GenSet, m: int, scheme, rng: Optional[random.Random]) -> tuple:
    """One permutation of range(m) per positive generator, extending its partial map.

    Inverse pairs stay mutually inverse because only positive representatives
    are completed; self-inverse generators receive involutions.
    """
    images = []
    for rep in genset.reps:
        sym = genset.symbols[rep]
        assigned = dict(sym.pairs)
        self_inverse = genset.partner[rep] == rep
        if self_inverse:
            unmatched = [x for x in range(m) if x not in assigned]
            if scheme == 0:
                pairing = []  # leave unmatched points fixed
            elif isinstance(scheme, int):
                r = (scheme - 1) % (len(unmatched) or 1)
                rotated = unmatched[r:] + unmatched[:r]
                pairing = list(zip(rotated[0::2], rotated[1::2]))
            else:
                rotated = list(unmatched)
                rng.shuffle(rotated)
                pairing = list(zip(rotated[0::2], rotated[1::2])) if rng.random() < 0.7 else []
            for u, v in pairing:
                assigned[u] = v
                assigned[v] = u
            for x in range(m):
                assigned.setdefault(x, x)
        else:
            src = [x for x in range(m) if x not in assigned]
            ran = set(assigned.values())
            tgt = [x for x in range(m) if x not in ran]
            if scheme == 0:
                order = tgt
            elif isinstance(scheme, int):
                r = scheme % (len(tgt) or 1)
                order = tgt[r:] + tgt[:r]
            else:
                order = list(tgt)
                rng.shuffle(order)
            for u, v in zip(src, order):
                assigned[u] = v
        images.append(tuple(assigned[x] for x in range(m)))
    return tuple(images)


def _candidate_images(genset: GenSet, m: int, seed: int, index: int) -> tuple:
    """Deterministic candidate stream: systematic schemes first, then random."""
    if index <= 3:
        return _completion_images(genset, m, index, None)
    rng = random.Random(f"isoext:{seed}:{m}:{index}")
    return _completion_images(genset, m, "random", rng)


def _proxy_screen(genset: GenSet, images: tuple) -> Optional[FiniteQuotient]:
    """Accept a completion when it acts by isometries of an invariant path metric
    extending the input space on the orbit of the base point; the kernel of such
    an action avoids every separation condition."""
    from .weighted_graph import make_graph, shortest_from_sources

    space = genset.space
    n = space.n
    m = len(images[0]) if images else n
    gens = list(images) + [inverse(g) for g in images]
    orbit = {genset.base}
    stack = [genset.base]
    while stack:
        u = stack.pop()
        for g in gens:
            v = g[u]
            if v not in orbit:
                orbit.add(v)
                stack.append(v)
    if not set(range(n)) <= orbit:
        return None
    order = sorted(orbit)
    ren = {p: i for i, p in enumerate(order)}
    rimages = tuple(tuple(ren[g[p]] for p in order) for g in images)
    rgens = list(rimages) + [inverse(g) for g in rimages]
    # invariant weights, merging conflicts by minimum
    weights = {}
    stack = []
    for a in range(n):
        for b in range(a + 1, n):
            key = (min(ren[a], ren[b]), max(ren[a], ren[b]))
            val = space.d(a, b)
            if key not in weights or weights[key] > val:
                weights[key] = val
                stack.append(key)
    while stack:
        i, j = stack.pop()
        val = weights[(i, j)]
        for g in rgens:
            a, b = g[i], g[j]
            key = (min(a, b), max(a, b))
            if key not in weights or weights[key] > val:
                weights[key] = val
                stack.append(key)
    graph = make_graph(
        tuple(str(i) for i in range(len(order))),
        [(i, j, w) for (i, j), w in weights.items()],
    )
    rows = shortest_from_sources(graph, [ren[a] for a in range(n)])
    for a in range(n):
        for b in range(n):
            if a != b and rows[a][ren[b]] != space.d(a, b):
                return None
    return FiniteQuotient(len(order), rimages)


def _tierb_worker(args) -> tuple:
    genset, m, seed, index = args
    images = _candidate_images(genset, m, seed, index)
    return index, _proxy_screen(genset, images)


def _random_quotient(genset: GenSet, m: int, rng: random.Random) -> FiniteQuotient:
    images = []
    for rep in genset.reps:
        if genset.partner[rep] == rep:
            pts = list(range(m))
            rng.shuffle(pts)
            perm = list(range(m))
            for u, v in zip(pts[0::2], pts[1::2]):
                perm[u], perm[v] = v, u
            images.append(tuple(perm))
        else:
            perm = list(range(m))
            rng.shuffle(perm)
            images.append(tuple(perm))
    return FiniteQuotient(m, tuple(images))


@dataclass
class SearchStats:
    candidates: int = 0
    tier: str = ""
    degree: int = 0


def find_admissible_quotient(
    genset: GenSet,
    budget: SearchBudget = SearchBudget(),
    stats: Optional[SearchStats] = None,
) -> FiniteQuotient:
    """Search for a finite permutation quotient excluding every condition instance.

    Tiers: exhaustive small-witness bootstrap, completions of the partial action
    on padded point sets, random images. The winner is certified against the
    full condition list; failure to find one raises BudgetExhausted (a larger
    budget is the remedy, existence is not in question).
    """
    stats = stats if stats is not None else SearchStats()
    space = genset.space
    n = space.n
    hgens = stabilizer_generators(genset)
    instances = condition_instances(genset)

    def finalize(q: FiniteQuotient, tier: str) -> Optional[FiniteQuotient]:
        try:
            build_extension_from_quotient(
                q,
                genset,
                hgens,
                closure_cap=budget.closure_cap,
                group_cap=budget.group_cap,
                max_cosets=budget.max_cosets,
            )
            ok = certify_quotient(
                genset,
                q,
                hgens,
                instances,
                closure_cap=budget.closure_cap,
                group_cap=budget.group_cap,
                max_cosets=budget.max_cosets,
            )
        except IsoextError:
            return None
        if not ok:
            return None
        stats.tier = tier
        stats.degree = q.degree
        return q

    if not genset.symbols:
        q = FiniteQuotient(1, ())
        got = finalize(q, "trivial")
        if got is not None:
            return got

    if 2 <= n <= 4:
        extra = budget.oracle_extra_points if n <= 3 else 0
        report = oracle_mod.brute_force_s_extension(
            space,
            genset.symbols,
            max_size=min(7, n + extra),
            max_candidates=budget.oracle_max_candidates,
        )
        stats.candidates += report.candidates_tried
        if report.assignment is not None:
            images = tuple(report.assignment[rep].perm for rep in genset.reps)
            got = finalize(FiniteQuotient(report.space.n, images), "oracle")
            if got is not None:
                return got

    degrees = list(range(max(2, n), budget.max_degree + 1))
    per_degree = max(8, budget.max_candidates // max(1, len(degrees)))
    for m in degrees:
        args = [(genset, m, budget.seed, t) for t in range(per_degree)]
        if budget.jobs > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=budget.jobs) as pool:
                screened = list(pool.map(_tierb_worker, args, chunksize=8))
        else:
            screened = map(_tierb_worker, args)
        for index, q in screened:
            stats.candidates += 1
            if stats.candidates > budget.max_candidates:
                raise BudgetExhausted(f"no admissible quotient within {budget.max_candidates} candidates")
            if q is None:
                continue
            got = finalize(q, "completion")
            if got is not None:
                return got
        rng = random.Random(f"isoext:random:{budget.seed}:{m}")
        for _ in range(4):
            stats.candidates += 1
            if stats.candidates > budget.max_candidates:
                raise BudgetExhausted(f"no admissible quotient within {budget.max_candidates} candidates")
            got = finalize(_random_quotient(genset, m, rng), "random")
            if got is not None:
                return got
    raise BudgetExhausted(
        f"no admissible quotient up to degree {budget.max_degree} within {budget.max_candidates} candidates"
    )


def extend_space(
    space: FiniteMetricSpace,
    genset: Optional[GenSet] = None,
    budget: SearchBudget = SearchBudget(),
) -> tuple:
    """Full pipeline: search a quotient, build the extension, verify it."""
    genset = genset if genset is not None else GenSet.standard(space)
    stats = SearchStats()
    quotient = find_admissible_quotient(genset, budget, stats)
    ext = build_extension_from_quotient(
        quotient,
        genset,
        closure_cap=budget.closure_cap,
        group_cap=budget.group_cap,
        max_cosets=budget.max_cosets,
    )
    report = verify_s_extension(ext)
    if not report.ok:
        raise IsoextError(f"constructed extension failed verification: {report.violations}")
    return ext, quotient, stats
