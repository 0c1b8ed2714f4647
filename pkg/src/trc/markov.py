"""Undirected parametrization of a BFG: moral graph, factors, Markov blankets."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import SameVariable, UnknownVariable
from .model import DiscreteNetwork, validate_network


@dataclass(frozen=True, eq=False)
class Factor:
    scope: tuple[str, ...]
    table: np.ndarray
    source: str = "cpd"  # cpd | uniform
    child: str | None = None

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)


@dataclass
class FactorSystem:
    bfg: DiscreteNetwork
    factors: list[Factor]
    moral_edges: set = field(default_factory=set)
    adjacency: dict = field(default_factory=dict)

    @property
    def variables(self):
        return self.bfg.names

    @property
    def cards(self):
        return {v.name: v.card for v in self.bfg.variables}

    def has_edge(self, a, b) -> bool:
        return b in self.adjacency.get(a, ())

    def is_moral(self, a, b) -> bool:
        return frozenset((a, b)) in self.moral_edges

    @property
    def roots(self):
        return [v for v in self.bfg.names if not self.bfg.parents(v)]

    def cpd_factor(self, child) -> Factor:
        for f in self.factors:
            if f.source == "cpd" and f.child == child:
                return f
        raise UnknownVariable(f"no CPD factor for {child!r}")

    def _check(self, v):
        if v not in self.adjacency:
            raise UnknownVariable(f"unknown variable {v!r}")


def moralize(bfg: DiscreteNetwork) -> FactorSystem:
    """Moral graph of ``bfg`` plus one factor per CPT (phi = P(X | pa X))."""
    validate_network(bfg).raise_if_invalid()
    adj = {v: set() for v in bfg.names}
    moral = set()
    factors = []
    for cpt in bfg.cpts:
        for p in cpt.parents:
            adj[p].add(cpt.child)
            adj[cpt.child].add(p)
        factors.append(Factor(cpt.scope, cpt.table, "cpd", cpt.child))
    directed = {frozenset(e) for e in bfg.edges}
    for cpt in bfg.cpts:
        for a, b in combinations(cpt.parents, 2):
            if frozenset((a, b)) not in directed:
                moral.add(frozenset((a, b)))
            adj[a].add(b)
            adj[b].add(a)
    return FactorSystem(bfg, factors, moral, adj)


def markov_blanket(fs: FactorSystem, v) -> set:
    """Parents, children and the children's other parents of ``v`` in the BFG."""
    fs._check(v)
    net = fs.bfg
    out = set(net.parents(v))
    for c in net.children(v):
        out.add(c)
        out.update(net.parents(c))
    out.discard(v)
    return out


def coupled_markov_blanket(fs: FactorSystem, a, b) -> set:
    if a == b:
        raise SameVariable(f"coupled blanket needs two distinct variables, got {a!r} twice")
    return (markov_blanket(fs, a) | markov_blanket(fs, b)) - {a, b}


def to_dot(fs: FactorSystem) -> str:
    """Moral graph in DOT; moral edges dashed."""
    lines = ["graph moral {"]
    for v in fs.variables:
        shape = "box" if fs.bfg.kind(v) == "intermediate" else "ellipse"
        lines.append(f'  "{v}" [shape={shape}];')
    seen = set()
    for a in fs.variables:
        for b in sorted(fs.adjacency[a]):
            e = frozenset((a, b))
            if e in seen:
                continue
            seen.add(e)
            style = " [style=dashed]" if e in fs.moral_edges else ""
            lines.append(f'  "{a}" -- "{b}"{style};')
    lines.append("}")
    return "\n".join(lines) + "\n"
