"""Flatten a region graph into contiguous arrays for the compiled kernels."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInput, UnknownVariable

FLOOR = 1e-12


def broadcast_table(table, scope, label, cards):
    """Reshape a factor over ``scope`` so it broadcasts against a table over ``label``."""
    axes = [label.index(v) for v in scope]
    perm = np.argsort(axes)
    t = np.transpose(np.asarray(table, dtype=float), perm)
    shape = [1] * len(label)
    for a in axes:
        shape[a] = cards[label[a]]
    return t.reshape(shape)


def entry_map(parent_label, child_label, cards):
    """Flat child index of every flat parent entry."""
    pshape = [cards[v] for v in parent_label]
    grid = np.indices(pshape).reshape(len(parent_label), -1)
    if not child_label:
        return np.zeros(grid.shape[1], dtype=np.int64)
    rows = [parent_label.index(v) for v in child_label]
    return np.ravel_multi_index(grid[rows], [cards[v] for v in child_label]).astype(np.int64)


def disjoint_batches(edges, order):
    """Greedy partition of ``order`` into batches whose edges touch pairwise-disjoint regions."""
    batches, busy = [], []
    for e in order:
        p, c = edges[e]
        for b, used in zip(batches, busy):
            if p not in used and c not in used:
                b.append(e)
                used.update((p, c))
                break
        else:
            batches.append([e])
            busy.append({p, c})
    return batches


@dataclass
class Layout:
    rg: object
    roff: np.ndarray
    rsize: np.ndarray
    eparent: np.ndarray
    echild: np.ndarray
    emap: np.ndarray
    moff: np.ndarray
    loff: np.ndarray
    logpot: np.ndarray   # per kept entry, log of the floored potential (0 for factor-free regions)
    counts: np.ndarray   # per region counting number
    maxchild: int
    order: np.ndarray    # deterministic edge schedule
    batches: np.ndarray
    boff: np.ndarray
    support: list        # per region, flat indices (into the full table) of the kept entries

    @property
    def total(self):
        return int(self.rsize.sum())

    @property
    def slots(self):
        return int(self.loff[-1] + self.rsize[self.echild[-1]]) if len(self.echild) else 0

    def per_entry(self, values):
        return np.repeat(np.asarray(values, dtype=float), self.rsize)

    def region_slice(self, r):
        return slice(int(self.roff[r]), int(self.roff[r] + self.rsize[r]))

    def table(self, flat, r, fill=0.0):
        """Full table of region ``r`` from the kept entries in ``flat``; pruned entries get ``fill``."""
        shape = [self.rg.cards[v] for v in self.rg.regions[r].label]
        out = np.full(math.prod(shape), fill)
        out[self.support[r]] = flat[self.region_slice(r)]
        return out.reshape(shape)


def evidence_host(rg, var):
    """Outer region that receives the evidence indicator of ``var``."""
    for i, r in enumerate(rg.regions):
        if r.level == 1 and any(rg.factors[f].child == var for f in r.factors
                                if getattr(rg.factors[f], "child", None) is not None):
            return i
    for i, r in enumerate(rg.regions):
        if r.level == 1 and var in r.vars:
            return i
    raise UnknownVariable(f"evidence variable {var!r} is in no outer region")


def region_potentials(rg, masks=None):
    """Product of each region's factors (and evidence indicators) as full, unfloored tables."""
    cards = rg.cards
    pots = [np.ones([cards[v] for v in r.label]) for r in rg.regions]
    for i, r in enumerate(rg.regions):
        for f in r.factors:
            fac = rg.factors[f]
            pots[i] = pots[i] * broadcast_table(fac.table, fac.scope, r.label, cards)
    for var, mask in (masks or {}).items():
        h = evidence_host(rg, var)
        pots[h] = pots[h] * broadcast_table(np.asarray(mask, dtype=float), (var,), rg.regions[h].label, cards)
    return pots


def prune_support(rg, pots, maps):
    """Entries that can carry mass in a locally consistent belief set.

    Zero-potential entries go first; then a child entry survives only if every
    parent has a surviving entry above it, and a parent entry only if the child
    entry below it survives.  Repeated to a fixed point.
    """
    supp = [p.ravel() > 0 for p in pots]
    changed = True
    while changed:
        changed = False
        for (p, c), m in zip(rg.edges, maps):
            covered = np.bincount(m, weights=supp[p], minlength=supp[c].size) > 0
            keep_c = supp[c] & covered
            keep_p = supp[p] & keep_c[m]
            if keep_c.sum() != supp[c].sum() or keep_p.sum() != supp[p].sum():
                supp[c], supp[p] = keep_c, keep_p
                changed = True
    for i, sp in enumerate(supp):
        if not sp.any():
            raise InvalidInput(f"region {rg.regions[i]} has no state consistent with the evidence")
    return supp


def compile_layout(rg, masks=None, prune=True) -> Layout:
    """Flat arrays for ``rg``; ``masks`` maps a variable to a boolean mask of allowed states.

    With ``prune`` the structural zeros (deterministic CPT entries, evidence)
    are dropped from every table instead of being floored.
    """
    cards = rg.cards
    edges = list(rg.edges)
    full_maps = [entry_map(rg.regions[p].label, rg.regions[c].label, cards) for p, c in edges]
    pots = region_potentials(rg, masks)
    if prune:
        supp = prune_support(rg, pots, full_maps)
    else:
        supp = [np.ones(p.size, dtype=bool) for p in pots]
    support = [np.flatnonzero(sp) for sp in supp]
    rsize = np.array([len(ix) for ix in support], dtype=np.int64)
    roff = np.zeros(len(support), dtype=np.int64)
    if len(support):
        roff[1:] = np.cumsum(rsize)[:-1]
    logpot = (np.concatenate([np.log(np.maximum(p.ravel()[ix], FLOOR)) for p, ix in zip(pots, support)])
              if pots else np.zeros(0))

    compact = []
    for sp in supp:
        lookup = np.full(sp.size, -1, dtype=np.int64)
        lookup[sp] = np.arange(int(sp.sum()))
        compact.append(lookup)
    maps = [compact[c][m[support[p]]] for (p, c), m in zip(edges, full_maps)]
    level = [r.level for r in rg.regions]
    order = sorted(range(len(edges)), key=lambda e: (level[edges[e][0]], edges[e][0], edges[e][1]))
    eparent = np.array([p for p, _ in edges], dtype=np.int64)
    echild = np.array([c for _, c in edges], dtype=np.int64)
    emap = np.concatenate(maps) if maps else np.zeros(0, dtype=np.int64)
    moff = np.zeros(len(edges), dtype=np.int64)
    loff = np.zeros(len(edges), dtype=np.int64)
    if edges:
        moff[1:] = np.cumsum([len(m) for m in maps])[:-1]
        loff[1:] = np.cumsum(rsize[echild])[:-1]
    batches = disjoint_batches(edges, order)
    flat = np.array([e for b in batches for e in b], dtype=np.int64)
    boff = np.zeros(len(batches) + 1, dtype=np.int64)
    boff[1:] = np.cumsum([len(b) for b in batches])
    return Layout(rg, roff, rsize, eparent, echild, emap, moff, loff, logpot,
                  np.array(rg.counts, dtype=float), int(max(rsize[echild], default=1)),
                  np.array(order, dtype=np.int64), flat, boff, support)
