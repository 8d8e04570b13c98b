"""Sweep every small space over a fixed distance pool through the extend pipeline.

Enumerates all triangle-valid spaces on up to four points with distances drawn
from {1, 3/2, 2, 3}, up to relabeling, and reports extension sizes and timing.
"""
from __future__ import annotations

import sys
import time
from fractions import Fraction
from itertools import combinations, permutations, product

sys.path.insert(0, "src")

from isoext.metric_core import SpaceError, validate_metric
from isoext.s_extension import SearchBudget, extend_space, verify_s_extension

POOL = (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3))


def canonical_form(n, entries):
    """Entry tuple minimized over point relabelings."""
    idx = list(combinations(range(n), 2))
    pos = {p: k for k, p in enumerate(idx)}
    best = None
    for perm in permutations(range(n)):
        arranged = tuple(
            entries[pos[tuple(sorted((perm[i], perm[j])))]] for i, j in idx
        )
        if best is None or arranged < best:
            best = arranged
    return best


def all_spaces(n, pool=POOL):
    idx = list(combinations(range(n), 2))
    seen = set()
    out = []
    for entries in product(pool, repeat=len(idx)):
        canon = canonical_form(n, entries)
        if canon in seen:
            continue
        seen.add(canon)
        matrix = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), v in zip(idx, canon):
            matrix[i][j] = matrix[j][i] = v
        try:
            out.append(validate_metric(tuple(f"x{i}" for i in range(n)), matrix))
        except SpaceError:
            continue
    return out


def main():
    budget = SearchBudget()
    if len(sys.argv) > 1:
        budget = SearchBudget(seed=int(sys.argv[1]))
    total = 0
    worst = 0.0
    fails = []
    for n in (1, 2, 3, 4):
        spaces = all_spaces(n)
        print(f"n={n}: {len(spaces)} spaces up to relabeling")
        for k, sp in enumerate(spaces):
            t0 = time.time()
            try:
                ext, quotient, stats = extend_space(sp, budget=budget)
                dt = time.time() - t0
                ok = verify_s_extension(ext).ok
                worst = max(worst, dt)
                total += 1
                dists = sorted(set(v for row in sp.dist for v in row if v))
                print(
                    f"  [{k:3d}] dists={[str(d) for d in dists]} |Y|={ext.space.n:3d} "
                    f"deg={quotient.degree:3d} tier={stats.tier:10s} cand={stats.candidates:5d} "
                    f"{dt:6.2f}s ok={ok}"
                )
                if not ok:
                    fails.append((n, k, "verify"))
            except Exception as err:  # noqa: BLE001 - report and continue the sweep
                dt = time.time() - t0
                print(f"  [{k:3d}] FAILED after {dt:.2f}s: {type(err).__name__}: {err}")
                fails.append((n, k, str(err)))
    print(f"\ndone: {total} extended, worst time {worst:.2f}s, failures: {len(fails)}")
    for f in fails:
        print("  fail:", f)


if __name__ == "__main__":
    main()
