"""Outer region identification: primary and interaction triplets.

A primary triplet is a BFG child with its two parents and carries that CPD.
Interaction triplets carry a uniform factor and exist only to give pairs of
primary triplets a shared node pair.  Candidates come from coupled Markov
blankets; two kinds are redundant and dropped:

* type 1 -- some node pair of the triplet is not an edge of the moral graph;
* type 2 -- the triplet holds a root of the BFG together with a moral edge.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .markov import Factor, FactorSystem, coupled_markov_blanket, moralize


@dataclass(frozen=True)
class PrimaryTriplet:
    nodes: frozenset
    child: str
    factors: tuple = ()  # indices into FactorSystem.factors


@dataclass(frozen=True)
class InteractionTriplet:
    nodes: frozenset


@dataclass
class OuterRegions:
    """Level-1 region labels with their factor assignment."""
    fs: FactorSystem
    labels: list = field(default_factory=list)   # tuples of variables
    factors: list = field(default_factory=list)  # tuples of factor indices
    kinds: list = field(default_factory=list)    # primary | interaction | extra


def _order(fs):
    return {v: i for i, v in enumerate(fs.variables)}


def _sorted_label(nodes, pos):
    return tuple(sorted(nodes, key=pos.__getitem__))


def primary_triplets(bfg, fs: FactorSystem = None) -> list[PrimaryTriplet]:
    """One triplet per two-parent node; smaller CPD factors are absorbed.

    A root or one-parent factor goes to the first primary triplet (in BFG
    variable order) whose node set contains its scope, e.g. P(X1) and
    P(X2 | X1) both land on the triplet of X3.
    """
    fs = fs or moralize(bfg)
    index = {f.child: i for i, f in enumerate(fs.factors) if f.source == "cpd"}
    trips = []
    for v in bfg.names:
        pa = bfg.parents(v)
        if len(pa) == 2:
            trips.append([frozenset((v,) + pa), v, [index[v]]])
    for v in bfg.names:
        pa = bfg.parents(v)
        if len(pa) < 2:
            scope = frozenset((v,) + pa)
            host = next((t for t in trips if scope <= t[0]), None)
            if host is not None:
                host[2].append(index[v])
    return [PrimaryTriplet(n, c, tuple(f)) for n, c, f in trips]


def unabsorbed_factors(fs: FactorSystem, primaries) -> list[int]:
    used = {i for t in primaries for i in t.factors}
    return [i for i, f in enumerate(fs.factors) if f.source == "cpd" and i not in used]


def candidate_interactions(bfg, fs: FactorSystem = None, primaries=None) -> list[InteractionTriplet]:
    """Every {a, b, c} with (a, b) a node pair of a primary triplet and c in their coupled blanket."""
    fs = fs or moralize(bfg)
    primaries = primaries if primaries is not None else primary_triplets(bfg, fs)
    prim_sets = {t.nodes for t in primaries}
    pos = _order(fs)
    seen = set()
    out = []
    for t in primaries:
        for a, b in combinations(_sorted_label(t.nodes, pos), 2):
            for c in sorted(coupled_markov_blanket(fs, a, b), key=pos.__getitem__):
                trip = frozenset((a, b, c))
                if trip in prim_sets or trip in seen:
                    continue
                seen.add(trip)
                out.append(InteractionTriplet(trip))
    return out


def redundancy_type(trip, fs: FactorSystem) -> str | None:
    """'type1', 'type2' or None (keep)."""
    nodes = tuple(trip.nodes if isinstance(trip, InteractionTriplet) else trip)
    pairs = list(combinations(nodes, 2))
    if any(not fs.has_edge(a, b) for a, b in pairs):
        return "type1"
    roots = set(fs.roots)
    if roots & set(nodes) and any(fs.is_moral(a, b) for a, b in pairs):
        return "type2"
    return None


def reject_redundant(cands, fs: FactorSystem, bfg=None) -> list[InteractionTriplet]:
    return [t for t in cands if redundancy_type(t, fs) is None]


def audit_candidates(bfg, fs: FactorSystem = None):
    """Candidate triplets with their verdict, for table-style audit output."""
    fs = fs or moralize(bfg)
    return [(t, redundancy_type(t, fs)) for t in candidate_interactions(bfg, fs)]


def interaction_from_moral_edges(bfg, fs: FactorSystem = None, primaries=None) -> list[InteractionTriplet]:
    """Streamlined construction: each moral edge plus a member of its coupled blanket."""
    fs = fs or moralize(bfg)
    primaries = primaries if primaries is not None else primary_triplets(bfg, fs)
    prim_sets = {t.nodes for t in primaries}
    pos = _order(fs)
    out, seen = [], set()
    for edge in sorted(fs.moral_edges, key=lambda e: sorted(pos[v] for v in e)):
        a, b = _sorted_label(edge, pos)
        for c in sorted(coupled_markov_blanket(fs, a, b), key=pos.__getitem__):
            trip = frozenset((a, b, c))
            if trip in prim_sets or trip in seen or redundancy_type(trip, fs):
                continue
            seen.add(trip)
            out.append(InteractionTriplet(trip))
    return out


def outer_regions(bfg, fs: FactorSystem = None, method="moral-edges") -> OuterRegions:
    """Level-1 regions: primaries, interactions (uniform factors), leftovers.

    ``method`` selects the interaction construction: ``"moral-edges"`` (the
    streamlined path) or ``"blanket"`` (candidates then redundancy rejection).
    Factors that fit no primary triplet become outer regions on their own.
    """
    fs = fs or moralize(bfg)
    prim = primary_triplets(bfg, fs)
    if method == "moral-edges":
        inter = interaction_from_moral_edges(bfg, fs, prim)
    elif method == "blanket":
        inter = reject_redundant(candidate_interactions(bfg, fs, prim), fs)
    else:
        raise ValueError(f"unknown interaction method {method!r}")
    pos = _order(fs)
    factors = list(fs.factors)
    out = OuterRegions(FactorSystem(fs.bfg, factors, fs.moral_edges, fs.adjacency))
    for t in prim:
        out.labels.append(_sorted_label(t.nodes, pos))
        out.factors.append(tuple(t.factors))
        out.kinds.append("primary")
    cards = fs.cards
    for t in inter:
        label = _sorted_label(t.nodes, pos)
        factors.append(Factor(label, np.ones([cards[v] for v in label]), "uniform"))
        out.labels.append(label)
        out.factors.append((len(factors) - 1,))
        out.kinds.append("interaction")
    leftovers = sorted(unabsorbed_factors(fs, prim), key=lambda i: -len(fs.factors[i].scope))
    for i in leftovers:
        scope = frozenset(fs.factors[i].scope)
        host = next((j for j, lab in enumerate(out.labels) if scope <= set(lab)), None)
        if host is not None:
            out.factors[host] = out.factors[host] + (i,)
            continue
        out.labels.append(_sorted_label(scope, pos))
        out.factors.append((i,))
        out.kinds.append("extra")
    return out
