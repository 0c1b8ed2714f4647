"""Binary factorization of a region graph.

Every non-outer region with ``p > 2`` parents is replaced by ``p - 1`` copies
chained along its (sorted) parents: copy ``z`` hangs under parents ``z`` and
``z + 1``, so neighbouring copies share one parent.  The copies split the
original counting number into entries from {1, -1, 0}.  Children of a copied
region are attached to every copy.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import replace

import numpy as np

from .errors import InvalidInput
from .regions import RegionGraph, unity_sums


def _split(c, k, placement, rng):
    """``k`` integers from {1, -1, 0} summing to ``c``."""
    if abs(c) > k:
        raise InvalidInput(f"counting number {c} cannot be split over {k} copies")
    vals = [int(np.sign(c))] * abs(c) + [0] * (k - abs(c))
    if placement == "back":
        vals.reverse()
    elif placement == "random":
        rng.shuffle(vals)
    return vals


def rgbf_transform(rg: RegionGraph, placement="front", seed=0) -> RegionGraph:
    """Chain-copy every region below level 1 that has more than two parents.

    ``placement`` puts the non-zero counting numbers at the ``front`` or
    ``back`` of each copy chain, or at ``random`` positions drawn from ``seed``.
    """
    if any(r.factors for r in rg.regions if r.level > 1):
        raise InvalidInput("factors must all live in level-1 regions")
    rng = np.random.default_rng(seed)
    pos = {v: i for i, v in enumerate(rg.variables)}

    def sort_key(i):
        r = regions[i]
        return (tuple(pos.get(v, 0) for v in r.label), r.copy)

    regions, edges = [], []
    new_ids = {}  # old index -> list of new indices
    for k in sorted({r.level for r in rg.regions}):
        for old in rg.level(k):
            r = rg.regions[old]
            parents = sorted({n for p in rg.parents(old) for n in new_ids[p]}, key=sort_key)
            if k == 1 or len(parents) <= 2:
                j = len(regions)
                regions.append(r)
                edges.extend((p, j) for p in parents)
                new_ids[old] = [j]
                continue
            counts = _split(r.counting_number, len(parents) - 1, placement, rng)
            ids = []
            base = r.copy * 1000 if r.copy else 0
            for z, c in enumerate(counts):
                j = len(regions)
                regions.append(replace(r, counting_number=c, copy=base + z + 1))
                edges.extend([(parents[z], j), (parents[z + 1], j)])
                ids.append(j)
            new_ids[old] = ids
    return RegionGraph(regions, edges, rg.factors, rg.cards, rg.variables)


def local_cycles(rg: RegionGraph, i) -> int:
    """Undirected 4-cycles through region ``i``: grandparents shared by two of its parents."""
    ps = rg.parents(i)
    total = 0
    for a in range(len(ps)):
        for b in range(a + 1, len(ps)):
            total += len(set(rg.parents(ps[a])) & set(rg.parents(ps[b])))
    return total


def audit_equivalence(before: RegionGraph, after: RegionGraph) -> dict:
    """Consistency, unity, counting-number range and parent-count checks."""
    groups = defaultdict(list)
    for i, r in enumerate(after.regions):
        groups[(r.label, r.level)].append(i)
    consistency = True
    for ids in groups.values():
        if len(ids) < 2:
            continue
        adj = defaultdict(set)
        for a in ids:
            for b in ids:
                if a != b and set(after.parents(a)) & set(after.parents(b)):
                    adj[a].add(b)
        seen, stack = {ids[0]}, [ids[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        consistency &= len(seen) == len(ids)
    unity = unity_sums(before) == unity_sums(after)
    counts = all(r.counting_number in (1, -1, 0) for r in after.regions)
    max_parents = max((len(after.parents(i)) for i, r in enumerate(after.regions) if r.level > 1),
                      default=0)
    cycles = {i: local_cycles(after, i) for i, r in enumerate(after.regions) if r.level == after.depth and r.level > 1}
    return {
        "consistency": consistency,
        "unity": unity,
        "counts_in_range": counts,
        "max_parents": max_parents,
        "two_parents": max_parents <= 2,
        "max_local_cycles": max(cycles.values(), default=0),
        "ok": consistency and unity and counts and max_parents <= 2,
    }


def format_audit(report) -> str:
    keys = ("consistency", "unity", "counts_in_range", "two_parents", "max_local_cycles")
    return "\n".join(f"{k:<18} {report[k]}" for k in keys) + f"\n{'ok':<18} {report['ok']}"
