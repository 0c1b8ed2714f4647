"""Binary factorization: rewrite a discrete BN so every node has at most two parents.

Two procedures live here:

* :func:`binary_factorize` inserts deterministic "pair" intermediates that encode
  the joint state of two parents, repeatedly, until each node has <= 2 parents.
* :func:`sparse_to_bfg` embeds a network whose nodes already have <= 2 parents
  into the full kappa_n layout, reusing every CPT and routing distant parents
  through replica intermediates.

Both return ``(bfg, BfgMetadata)``.  The metadata records, for every BFG
variable, the tuple of source variables whose joint state it encodes
(``carries``); the variable's state index is the C-order ravel of those
sources' states.  That is what lets evidence be replicated exactly.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidInput, TooLarge, TooManyParents
from .model import CPT, DiscreteNetwork, VariableDecl, enumeration_cap, topological_order, validate_network


def kappa(n: int) -> int:
    """Node count of the binary factorized graph of an ``n``-node complete BN."""
    if int(n) != n or n < 3:
        raise DomainError(f"kappa needs n >= 3, got {n}")
    n = int(n)
    return (n * n - 3 * n + 6) // 2


def kappa_structure(n: int, prefix="X", inter="E"):
    """Parent lists of the kappa_n BFG, in creation order.

    Returns ``[(name, parents, kind), ...]``.  Originals are ``X1..Xn``;
    intermediates ``E1, E2, ...`` are numbered in the order they are created
    while factorizing X4, X5, ... (so ``E1`` feeds ``X4``).
    """
    if n < 1:
        raise DomainError("n must be positive")
    x = [f"{prefix}{i}" for i in range(1, n + 1)]
    out, t = [], 0
    for i in range(n):
        if i < 3:
            out.append((x[i], tuple(x[:i]), "original"))
            continue
        prev = (x[0], x[1])
        for k in range(2, i - 1):
            t += 1
            out.append((f"{inter}{t}", prev, "intermediate"))
            prev = (f"{inter}{t}", x[k])
        t += 1
        out.append((f"{inter}{t}", prev, "intermediate"))
        out.append((x[i], (f"{inter}{t}", x[i - 1]), "original"))
    return out


@dataclass
class BfgMetadata:
    origin_map: dict = field(default_factory=dict)      # var -> source vars it was built from
    carries: dict = field(default_factory=dict)         # var -> source vars it encodes
    replica_groups: dict = field(default_factory=dict)  # source var -> [replicas]
    ordering: list = field(default_factory=list)        # parent-child order of originals
    source_cards: dict = field(default_factory=dict)

    @property
    def intermediates(self):
        return [v for v, src in self.origin_map.items() if src != (v,)]

    def decode(self, var, state):
        """Source-variable states encoded by ``state`` of BFG variable ``var``."""
        srcs = self.carries[var]
        idx = np.unravel_index(int(state), [self.source_cards[s] for s in srcs])
        return dict(zip(srcs, (int(i) for i in idx)))

    def evidence_mask(self, var, evidence):
        """Boolean mask over ``var``'s states consistent with source evidence, or None."""
        srcs = self.carries[var]
        hit = [s for s in srcs if s in evidence]
        if not hit:
            return None
        grids = np.indices([self.source_cards[s] for s in srcs]).reshape(len(srcs), -1)
        mask = np.ones(grids.shape[1], dtype=bool)
        for j, s in enumerate(srcs):
            if s in evidence:
                mask &= grids[j] == int(evidence[s])
        return mask


def identity_metadata(net: DiscreteNetwork) -> BfgMetadata:
    return BfgMetadata(
        origin_map={v: (v,) for v in net.names},
        carries={v: (v,) for v in net.names},
        replica_groups={v: [] for v in net.names},
        ordering=topological_order(net),
        source_cards={v.name: v.card for v in net.variables},
    )


def compose(first: BfgMetadata, second: BfgMetadata) -> BfgMetadata:
    """Metadata of ``second`` applied after ``first``, expressed against the first source."""
    carries = {}
    for v, srcs in second.carries.items():
        flat = []
        for s in srcs:
            for o in first.carries[s]:
                if o not in flat:
                    flat.append(o)
        carries[v] = tuple(flat)
    # nested encodings are only composable when the flattening is a pure ravel
    for v, srcs in second.carries.items():
        if len(carries[v]) != sum(len(first.carries[s]) for s in srcs):
            raise DomainError(f"cannot compose encodings for {v}")
    origin = dict(first.origin_map)
    origin.update({v: src for v, src in second.origin_map.items() if src != (v,)})
    sources = [v for v in first.origin_map if first.origin_map[v] == (v,)]
    groups = {s: [v for v, c in carries.items() if c == (s,) and v != s] for s in sources}
    return BfgMetadata(origin, carries, groups,
                       [v for v in second.ordering if v in sources] or list(first.ordering),
                       dict(first.source_cards))


def _fresh_names(taken, prefix="E"):
    t = 0
    while True:
        t += 1
        name = f"{prefix}{t}"
        if name not in taken:
            taken.add(name)
            yield name


def _pair_labels(a: VariableDecl, b: VariableDecl):
    return tuple(f"({x},{y})" for x in a.states for y in b.states)


def _merge_cpt(name, a: VariableDecl, b: VariableDecl) -> CPT:
    """Deterministic CPT: P(E = e_ij | a_k, b_l) = 1 iff (k, l) = (i, j)."""
    na, nb = a.card, b.card
    if float(na * nb) ** 2 > enumeration_cap():
        raise TooLarge(f"pair intermediate {name} over ({a.name}, {b.name}) needs {(na * nb) ** 2} entries; "
                       f"raise TRC_ENUM_CAP to allow it")
    table = np.eye(na * nb).reshape(na, nb, na * nb)
    return CPT(name, (a.name, b.name), table)


def binary_factorize(net: DiscreteNetwork):
    """Insert pair intermediates until every node has at most two parents.

    Parents are merged left to right after sorting them by the network's
    lexicographically smallest topological order, so a complete DAG always
    yields the canonical kappa_n layout.
    """
    validate_network(net).raise_if_invalid()
    order = topological_order(net)
    pos = {v: i for i, v in enumerate(order)}
    names = _fresh_names(set(net.names))
    decl = {v.name: v for v in net.variables}
    out_vars, out_cpts = [], []
    origin = {v: (v,) for v in net.names}
    carries = {v: (v,) for v in net.names}
    for v in order:
        cpt = net.cpt(v)
        if len(cpt.parents) <= 2:
            out_vars.append(decl[v])
            out_cpts.append(cpt)
            continue
        perm = sorted(range(len(cpt.parents)), key=lambda i: pos[cpt.parents[i]])
        parents = [cpt.parents[i] for i in perm]
        table = np.transpose(cpt.table, perm + [len(perm)])
        left = decl[parents[0]]
        for p in parents[1:-1]:
            right = decl[p]
            e = VariableDecl(next(names), _pair_labels(left, right), "intermediate")
            out_vars.append(e)
            out_cpts.append(_merge_cpt(e.name, left, right))
            origin[e.name] = (left.name, right.name)
            carries[e.name] = carries[left.name] + carries[right.name]
            decl[e.name] = e
            left = e
        last = parents[-1]
        shape = (left.card, decl[last].card, decl[v].card)
        out_vars.append(decl[v])
        out_cpts.append(CPT(v, (left.name, last), table.reshape(shape)))
    bfg = DiscreteNetwork(tuple(out_vars), tuple(out_cpts), name=f"{net.name}-bf")
    meta = BfgMetadata(origin, carries, {v: [] for v in net.names}, order,
                       {v.name: v.card for v in net.variables})
    return bfg, meta


def edge_first_order(net: DiscreteNetwork) -> list[str]:
    """Smallest topological order whose second node has the first as its only parent.

    The embedding turns ``X_1 -> X_2`` into a true edge, so starting on a real
    single-parent edge avoids a vacuous one.  Falls back to the plain order.
    """
    kids = {v: [] for v in net.names}
    for p, c in net.edges:
        kids[p].append(c)
    for r in sorted(v for v in net.names if not net.parents(v)):
        for c in sorted(kids[r]):
            if tuple(net.parents(c)) == (r,):
                return [r, c] + _topological_rest(net, {r, c})
    return topological_order(net)


def _topological_rest(net, placed):
    indeg = {v: sum(p not in placed for p in net.parents(v)) for v in net.names if v not in placed}
    kids = {v: [] for v in net.names}
    for p, c in net.edges:
        kids[p].append(c)
    heap = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for c in kids[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    return order


def _resolve_order(net, order):
    if order == "edge-first":
        return edge_first_order(net)
    if order == "lexicographic":
        return topological_order(net)
    order = list(order)
    pos = {v: i for i, v in enumerate(order)}
    if sorted(order) != sorted(net.names) or any(pos[p] > pos[c] for p, c in net.edges):
        raise InvalidInput("order must list every node once, parents before children")
    return order


def sparse_to_bfg(net: DiscreteNetwork, order="edge-first"):
    """Embed a network with <= 2 parents per node into the full kappa_n layout.

    The originals keep a parent-child path ``X_1 -> ... -> X_n`` following
    ``order``: ``edge-first`` (default), ``lexicographic`` or an explicit list.  Node ``X_i`` (i >= 4) gets
    parents ``(E, X_{i-1})`` where the chain ``E`` carries whichever of its true
    parents are not ``X_{i-1}``; CPTs are reused with the extra parents vacuous.
    """
    validate_network(net).raise_if_invalid()
    heavy = [v for v in net.names if len(net.parents(v)) > 2]
    if heavy:
        raise TooManyParents(f"nodes with more than two parents: {heavy}; run binary_factorize first")
    order = _resolve_order(net, order)
    n = len(order)
    decl = {v.name: v for v in net.variables}
    cards = {v: decl[v].card for v in order}
    names = _fresh_names(set(net.names))
    out_vars, out_cpts = [], []
    origin = {v: (v,) for v in net.names}
    carries = {v: (v,) for v in net.names}

    def state_label(srcs):
        if len(srcs) == 1:
            return decl[srcs[0]].states
        a, b = (decl[s] for s in srcs)
        return _pair_labels(a, b)

    def decoded(var, state):
        srcs = carries[var]
        idx = np.unravel_index(state, [cards[s] for s in srcs])
        return dict(zip(srcs, (int(i) for i in idx)))

    def deterministic(name, parents, srcs):
        pc = [_card(p) for p in parents]
        out = int(np.prod([cards[s] for s in srcs]))
        table = np.zeros(pc + [out])
        for combo in np.ndindex(*pc):
            vals = {}
            for p, s in zip(parents, combo):
                vals.update(decoded(p, s))
            table[combo + (int(np.ravel_multi_index([vals[s] for s in srcs],
                                                    [cards[s] for s in srcs])),)] = 1.0
        return CPT(name, tuple(parents), table)

    def _card(var):
        return int(np.prod([cards[s] for s in carries[var]]))

    def reuse(child, parents):
        """CPT of ``child`` over BFG ``parents`` looking up its true parents."""
        src = net.cpt(child)
        pc = [_card(p) for p in parents]
        table = np.zeros(pc + [cards[child]])
        for combo in np.ndindex(*pc):
            vals = {}
            for p, s in zip(parents, combo):
                vals.update(decoded(p, s))
            table[combo] = src.table[tuple(vals[p] for p in src.parents)]
        return CPT(child, tuple(parents), table)

    for i, x in enumerate(order):
        if i < 3:
            out_vars.append(decl[x])
            out_cpts.append(reuse(x, order[:i]))
            continue
        needed = [p for p in net.parents(x) if p != order[i - 1]]
        needed.sort(key=order.index)
        prev = (order[0], order[1])
        for k in range(1, i - 1):
            if k > 1:
                prev = (chain, order[k])
            srcs = tuple(p for p in needed if order.index(p) <= k) or (order[k],)
            chain = next(names)
            carries[chain] = srcs
            origin[chain] = srcs
            out_vars.append(VariableDecl(chain, state_label(srcs), "intermediate"))
            out_cpts.append(deterministic(chain, prev, srcs))
        out_vars.append(decl[x])
        out_cpts.append(reuse(x, (chain, order[i - 1])))
    bfg = DiscreteNetwork(tuple(out_vars), tuple(out_cpts), name=f"{net.name}-kappa")
    groups = {v: [e for e, c in carries.items() if c == (v,) and e != v] for v in net.names}
    meta = BfgMetadata(origin, carries, groups, list(order), dict(cards))
    return bfg, meta


def to_kappa_bfg(net: DiscreteNetwork, embed=True, order="edge-first"):
    """Binary factorize, then (for non-complete inputs) embed into kappa_n form."""
    from .model import is_complete

    bfg, meta = binary_factorize(net)
    if not embed or is_complete(net) or len(net) < 3:
        return bfg, meta
    full, meta2 = sparse_to_bfg(bfg, order)
    return full, compose(meta, meta2)
