"""Words over a symmetric generator set of partial isometries, the base-point
stabilizer subgroup, finite permutation quotients, and coset-product tests.

A generator set P is closed under inverse pairing. One generator of each
inverse pair is the positive representative; a word is a freely reduced tuple
of signed representative indices (1-based), a letter -k acting by the inverse
partial map of representative k. Self-inverse partial maps still give letters
of infinite order; only the pairing of a symbol with its inverse map is
identified, so the enveloping group stays free.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .metric_core import FiniteMetricSpace, IsoextError, PartialIsometry
from .perms import ClosureBudgetExceeded, closure, compose, identity, inverse, orbit_partition


class GenSetError(IsoextError):
    pass


def reduce_letters(letters: Sequence[int]) -> tuple:
    out = []
    for l in letters:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """Freely reduced word; letters[0] is applied last under evaluation."""

    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", reduce_letters(self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def concat(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-l for l in reversed(self.letters)))

    @property
    def is_identity(self) -> bool:
        return not self.letters


@dataclass(frozen=True)
class GenSet:
    """A set of nonidentity partial isometries closed under inverses, with a base point."""

    space: FiniteMetricSpace
    symbols: tuple  # all generators, canonically sorted
    partner: tuple  # partner[i] = index of the inverse partial map of symbols[i]
    base: int
    rich: bool  # every non-base point reachable from the base in one step
    reps: tuple = field(default=())  # positive representatives, one per inverse pair

    def __post_init__(self):
        if not self.reps:
            object.__setattr__(
                self,
                "reps",
                tuple(i for i in range(len(self.symbols)) if self.partner[i] >= i),
            )
        n = self.space.n
        pos, neg = [], []
        for rep in self.reps:
            table = [-1] * n
            for s, t in self.symbols[rep].pairs:
                table[s] = t
            pos.append(tuple(table))
            table = [-1] * n
            for s, t in self.symbols[rep].pairs:
                table[t] = s
            neg.append(tuple(table))
        object.__setattr__(self, "_pos_table", tuple(pos))
        object.__setattr__(self, "_neg_table", tuple(neg))
        object.__setattr__(
            self, "_rep_pos", {rep: k for k, rep in enumerate(self.reps)}
        )

    @classmethod
    def from_symbols(
        cls,
        space: FiniteMetricSpace,
        symbols: Sequence[PartialIsometry],
        base: int = 0,
        require_rich: bool = True,
    ) -> "GenSet":
        syms = sorted(set(symbols), key=lambda p: (len(p.pairs), p.pairs))
        for p in syms:
            if p.space != space:
                raise GenSetError("generator over a different space")
            if not p.is_valid():
                raise GenSetError(f"not a partial isometry: {p.pairs}")
            if p.is_subidentity:
                raise GenSetError(f"subidentity generator: {p.pairs}")
        index = {p.pairs: i for i, p in enumerate(syms)}
        partner = []
        for p in syms:
            q = p.inverse()
            if q.pairs not in index:
                raise GenSetError(f"generator set not closed under inverse at {p.pairs}")
            partner.append(index[q.pairs])
        reached = {base} | {p.apply(base) for p in syms if p.apply(base) is not None}
        rich = reached >= set(range(space.n))
        if require_rich and not rich:
            raise GenSetError("some point is not reachable from the base point in one step")
        return cls(space, tuple(syms), tuple(partner), base, rich)

    @classmethod
    def standard(cls, space: FiniteMetricSpace, base: int = 0) -> "GenSet":
        from .metric_core import enumerate_partial_isometries

        return cls.from_symbols(space, enumerate_partial_isometries(space), base=base)

    @property
    def rep_count(self) -> int:
        return len(self.reps)

    def letter_for_symbol(self, i: int) -> int:
        if self.partner[i] >= i:
            return self._rep_pos[i] + 1
        return -(self._rep_pos[self.partner[i]] + 1)

    def symbol_for_letter(self, letter: int) -> int:
        rep = self.reps[abs(letter) - 1]
        return rep if letter > 0 else self.partner[rep]

    def map_for_letter(self, letter: int) -> PartialIsometry:
        sym = self.symbols[self.reps[abs(letter) - 1]]
        return sym if letter > 0 else sym.inverse()

    def apply_letter(self, letter: int, x: int) -> Optional[int]:
        k = abs(letter) - 1
        y = self._pos_table[k][x] if letter > 0 else self._neg_table[k][x]
        return None if y < 0 else y

    def word_for_symbols(self, symbol_indices: Sequence[int]) -> Word:
        return Word(tuple(self.letter_for_symbol(i) for i in symbol_indices))

    def point_word(self, point: int) -> Word:
        """Canonical one-letter word sending the base point to `point`."""
        if point == self.base:
            return Word(())
        for i, p in enumerate(self.symbols):
            if p.apply(self.base) == point:
                return Word((self.letter_for_symbol(i),))
        raise GenSetError(f"point {point} not reachable in one step")

    def is_full(self) -> bool:
        """Whether the symbols are exactly all nonidentity partial isometries."""
        from .metric_core import enumerate_partial_isometries

        return set(p.pairs for p in self.symbols) == set(
            p.pairs for p in enumerate_partial_isometries(self.space)
        )


def evaluate_word(genset: GenSet, w: Word, x: int) -> Optional[int]:
    """Partial evaluation, rightmost letter first; None once any step is undefined."""
    cur = x
    for letter in reversed(w.letters):
        cur = genset.apply_letter(letter, cur)
        if cur is None:
            return None
    return cur


@dataclass(frozen=True)
class StabilizerGens:
    """Schreier generators of the subgroup of words fixing the base point."""

    words: tuple


def _action_tree(genset: GenSet) -> tuple:
    """BFS spanning tree of the labeled partial-action graph, from the base point.

    Returns (tree_word, tree_edges): tree_word[x] is a Word sending base to x
    (None if unreachable); tree_edges holds (src, rep_position, tgt) triples
    oriented along the positive generator maps.
    """
    n = genset.space.n
    tree_word = [None] * n
    tree_word[genset.base] = Word(())
    tree_edges = set()
    queue = deque([genset.base])
    while queue:
        u = queue.popleft()
        for k in range(genset.rep_count):
            steps = []
            v = genset.apply_letter(k + 1, u)
            if v is not None:
                steps.append((v, k + 1, (u, k, v)))
            v = genset.apply_letter(-(k + 1), u)
            if v is not None:
                steps.append((v, -(k + 1), (v, k, u)))
            for tgt, letter, edge in steps:
                if tree_word[tgt] is None:
                    tree_word[tgt] = Word((letter,)).concat(tree_word[u])
                    tree_edges.add(edge)
                    queue.append(tgt)
    return tree_word, tree_edges


def stabilizer_generators(genset: GenSet) -> StabilizerGens:
    """One loop word per non-tree labeled edge of the base point's component."""
    tree_word, tree_edges = _action_tree(genset)
    gens = []
    seen = set()
    for k, rep in enumerate(genset.reps):
        pm = genset.symbols[rep]
        for src, tgt in pm.pairs:
            if tree_word[src] is None:
                continue
            if (src, k, tgt) in tree_edges:
                continue
            w = tree_word[tgt].inverse().concat(Word((k + 1,))).concat(tree_word[src])
            if w.is_identity or w.letters in seen:
                continue
            assert evaluate_word(genset, w, genset.base) == genset.base
            seen.add(w.letters)
            gens.append(w)
    return StabilizerGens(tuple(gens))


def rewrite_loop(genset: GenSet, sgens: StabilizerGens, w: Word) -> list:
    """Express a base-point loop as a product of Schreier generator powers.

    Returns [(word, sign), ...] whose signed concatenation freely reduces to w.
    """
    if evaluate_word(genset, w, genset.base) != genset.base:
        raise GenSetError("not a loop at the base point")
    tree_word, tree_edges = _action_tree(genset)
    factors = []
    cur = genset.base
    for letter in reversed(w.letters):
        nxt = genset.apply_letter(letter, cur)
        factor = tree_word[nxt].inverse().concat(Word((letter,))).concat(tree_word[cur])
        k = abs(letter) - 1
        edge = (cur, k, nxt) if letter > 0 else (nxt, k, cur)
        if edge not in tree_edges and not factor.is_identity:
            if letter > 0:
                factors.append((factor, 1))
            else:
                factors.append((factor.inverse(), -1))
        cur = nxt
    # product of factors, leftmost applied last: reverse traversal order
    factors.reverse()
    return factors


@dataclass(frozen=True)
class FiniteQuotient:
    """Images of the positive generators in a symmetric group of given degree."""

    degree: int
    images: tuple  # one permutation per positive representative

    def image_of_letter(self, letter: int) -> tuple:
        img = self.images[abs(letter) - 1]
        return img if letter > 0 else inverse(img)

    def image_of_word(self, w: Word) -> tuple:
        acc = identity(self.degree)
        for letter in w.letters:
            acc = compose(acc, self.image_of_letter(letter))
        return acc

    def to_json(self, genset: GenSet) -> dict:
        return {
            "degree": self.degree,
            "images": {f"p{rep}": list(self.images[k]) for k, rep in enumerate(genset.reps)},
        }


@dataclass(frozen=True)
class CosetPattern:
    """Alternating product w0 . H . w1 . H . ... . H . w_t given by its fixed words."""

    words: tuple

    def key(self) -> tuple:
        return tuple(w.letters for w in self.words)


@dataclass
class CosetSpace:
    """Left cosets of the stabilizer image inside the image group of a quotient."""

    genset: GenSet
    quotient: FiniteQuotient
    reps: list  # canonical (minimal) coset representatives
    elem_to_coset: dict
    sigma_pos: list  # index action of each positive generator image
    sigma_neg: list
    h_orbit: list  # orbit id per coset under left multiplication by the stabilizer image
    subgroup: list  # elements of the stabilizer image

    @property
    def size(self) -> int:
        return len(self.reps)

    @property
    def base(self) -> int:
        return 0

    def coset_of_perm(self, g: tuple) -> int:
        return self.elem_to_coset[g]

    def coset_of_word(self, w: Word) -> int:
        return self.elem_to_coset[self.quotient.image_of_word(w)]

    def coset_of_point(self, point: int) -> int:
        return self.coset_of_word(self.genset.point_word(point))

    def word_action(self, w: Word) -> tuple:
        acc = tuple(range(self.size))
        for letter in reversed(w.letters):
            step = self.sigma_pos[abs(letter) - 1] if letter > 0 else self.sigma_neg[abs(letter) - 1]
            acc = compose(step, acc)
        return acc

    def h_close(self, cosets: set) -> set:
        wanted = {self.h_orbit[i] for i in cosets}
        return {i for i in range(self.size) if self.h_orbit[i] in wanted}


def build_coset_space(
    genset: GenSet,
    quotient: FiniteQuotient,
    hgens: StabilizerGens,
    closure_cap: int = 10**6,
    group_cap: int = 200_000,
    max_cosets: int = 4000,
) -> CosetSpace:
    m = quotient.degree
    e = identity(m)
    group = closure([e, *quotient.images], cap=group_cap)
    agens = sorted({quotient.image_of_word(w) for w in hgens.words} or {e})
    subgroup = closure([e, *agens], cap=closure_cap)
    elem_to_coset = {}
    reps = []
    for g in group:  # ascending, so each first-seen element is its coset's minimum
        if g in elem_to_coset:
            continue
        cid = len(reps)
        if cid >= max_cosets:
            raise ClosureBudgetExceeded(f"coset space exceeded {max_cosets} cosets")
        reps.append(g)
        for h in subgroup:
            elem_to_coset[compose(g, h)] = cid
    size = len(reps)
    sigma_pos = [
        tuple(elem_to_coset[compose(img, reps[i])] for i in range(size))
        for img in quotient.images
    ]
    sigma_neg = [inverse(s) for s in sigma_pos]
    taus = [tuple(elem_to_coset[compose(h, reps[i])] for i in range(size)) for h in agens]
    h_orbit = orbit_partition(size, taus) if taus else list(range(size))
    return CosetSpace(
        genset=genset,
        quotient=quotient,
        reps=reps,
        elem_to_coset=elem_to_coset,
        sigma_pos=sigma_pos,
        sigma_neg=sigma_neg,
        h_orbit=h_orbit,
        subgroup=subgroup,
    )


def pattern_excluded_in_cosets(space: CosetSpace, pattern: CosetPattern) -> bool:
    """True when the identity avoids the pattern's product set (the wanted outcome)."""
    return not _pattern_contains_identity(space, pattern)


def _pattern_contains_identity(space: CosetSpace, pattern: CosetPattern) -> bool:
    words = pattern.words
    if len(words) == 1:
        # degenerate: a bare fixed word, no H slots
        return space.quotient.image_of_word(words[0]) == identity(space.quotient.degree)
    target = space.coset_of_word(words[-1].inverse())
    current = {space.base}
    for w in reversed(words[:-1]):
        action = space.word_action(w)
        current = {action[i] for i in current}
        current = space.h_close(current)
    return target in current


def contains_identity_in_coset_product(
    quotient: FiniteQuotient,
    hgens: StabilizerGens,
    pattern: CosetPattern,
    genset: GenSet,
    closure_cap: int = 10**6,
    group_cap: int = 200_000,
    max_cosets: int = 4000,
) -> bool:
    """Whether the identity lies in w0 . psi(H) . w1 . ... . psi(H) . w_t.

    Folding runs on the coset space of psi(H), which represents the product
    set exactly; the naive subset-product enumeration (kept as a test oracle)
    must agree.
    """
    space = build_coset_space(
        genset, quotient, hgens, closure_cap=closure_cap, group_cap=group_cap, max_cosets=max_cosets
    )
    return _pattern_contains_identity(space, pattern)


def _naive_contains_identity(
    quotient: FiniteQuotient,
    hgens: StabilizerGens,
    pattern: CosetPattern,
    cap: int = 5000,
) -> bool:
    """Literal set-product fold; exponential-ish, for cross-checking only."""
    m = quotient.degree
    subgroup = closure([identity(m), *(quotient.image_of_word(w) for w in hgens.words)], cap=cap)
    current = {quotient.image_of_word(pattern.words[0])}
    for w in pattern.words[1:]:
        step = quotient.image_of_word(w)
        nxt = set()
        for g in current:
            for h in subgroup:
                gh = compose(g, h)
                nxt.add(compose(gh, step))
                if len(nxt) > cap * 20:
                    raise ClosureBudgetExceeded("naive product fold too large")
        current = nxt
    return identity(m) in current
