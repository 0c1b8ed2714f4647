"""Discrete Bayesian networks: representation, validation, ordering, evidence.

CPT layout: ``table`` has shape ``(|pa_1|, ..., |pa_k|, |child|)`` in C order, so
flattening it lists parent combinations lexicographically with the last parent
varying fastest and the child state varying fastest inside each row.
"""
from __future__ import annotations

import heapq
import itertools
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NotComplete, TooLarge, UnknownVariable, ValidationError

PROB_TOL = 1e-9
DEFAULT_ENUM_CAP = 2 ** 24


def enumeration_cap():
    """Largest joint state space the enumeration oracle accepts (env ``TRC_ENUM_CAP``)."""
    return int(os.environ.get("TRC_ENUM_CAP", DEFAULT_ENUM_CAP))


@dataclass(frozen=True)
class VariableDecl:
    name: str
    states: tuple[str, ...]
    kind: str = "original"  # or "intermediate"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))

    @property
    def card(self) -> int:
        return len(self.states)

    def state_index(self, label) -> int:
        label = str(label)
        try:
            return self.states.index(label)
        except ValueError:
            raise DomainError(f"{self.name} has no state {label!r}") from None


@dataclass(frozen=True, eq=False)
class CPT:
    child: str
    parents: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        t = np.array(self.table, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def rows(self) -> np.ndarray:
        return self.table.reshape(-1, self.table.shape[-1])

    @property
    def scope(self) -> tuple[str, ...]:
        return self.parents + (self.child,)

    def __eq__(self, other):
        return (isinstance(other, CPT) and self.child == other.child
                and self.parents == other.parents
                and self.table.shape == other.table.shape
                and np.array_equal(self.table, other.table))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class DiscreteNetwork:
    variables: tuple[VariableDecl, ...]
    cpts: tuple[CPT, ...]
    name: str = "net"
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "cpts", tuple(self.cpts))
        object.__setattr__(self, "_index", {v.name: i for i, v in enumerate(self.variables)})

    @classmethod
    def from_tables(cls, states, cpts, kinds=None, name="net"):
        """Build from ``{var: states}`` and ``{child: (parents, table)}`` dicts."""
        kinds = kinds or {}
        variables = [VariableDecl(v, tuple(s), kinds.get(v, "original")) for v, s in states.items()]
        tables = [CPT(child, tuple(pa), np.asarray(t, dtype=float)) for child, (pa, t) in cpts.items()]
        return cls(tuple(variables), tuple(tables), name=name)

    # lookups -------------------------------------------------------------
    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def __contains__(self, name):
        return name in self._index

    def __len__(self):
        return len(self.variables)

    def index(self, name) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def var(self, name) -> VariableDecl:
        return self.variables[self.index(name)]

    def card(self, name) -> int:
        return self.var(name).card

    def cpt(self, name) -> CPT:
        for c in self.cpts:
            if c.child == name:
                return c
        raise UnknownVariable(f"no CPT for {name!r}")

    def parents(self, name) -> tuple[str, ...]:
        return self.cpt(name).parents

    def children(self, name) -> list[str]:
        return [c.child for c in self.cpts if name in c.parents]

    @property
    def edges(self) -> list[tuple[str, str]]:
        return [(p, c.child) for c in self.cpts for p in c.parents]

    def kind(self, name) -> str:
        return self.var(name).kind

    @property
    def originals(self) -> list[str]:
        return [v.name for v in self.variables if v.kind == "original"]


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def raise_if_invalid(self):
        if self.violations:
            raise ValidationError(self.violations)


def validate_network(net: DiscreteNetwork) -> ValidationReport:
    """Collect every structural and numerical violation; empty report iff valid."""
    out = []
    names = [v.name for v in net.variables]
    seen = set()
    for v in net.variables:
        if v.name in seen:
            out.append(f"duplicate variable name {v.name!r}")
        seen.add(v.name)
        if v.card < 2:
            out.append(f"{v.name}: needs at least 2 states, has {v.card}")
        if len(set(v.states)) != len(v.states):
            out.append(f"{v.name}: duplicate state labels")
        if v.kind not in ("original", "intermediate"):
            out.append(f"{v.name}: unknown kind {v.kind!r}")
    cards = {v.name: v.card for v in net.variables}
    counts = {}
    for c in net.cpts:
        counts[c.child] = counts.get(c.child, 0) + 1
        if c.child not in cards:
            out.append(f"CPT for undeclared variable {c.child!r}")
            continue
        if len(set(c.parents)) != len(c.parents):
            out.append(f"{c.child}: repeated parent")
        unknown = [p for p in c.parents if p not in cards]
        if unknown:
            out.append(f"{c.child}: undeclared parents {unknown}")
            continue
        if c.child in c.parents:
            out.append(f"{c.child}: self loop")
        want = tuple(cards[p] for p in c.parents) + (cards[c.child],)
        if c.table.shape != want:
            out.append(f"{c.child}: table shape {c.table.shape} != {want} "
                       f"(rows must equal product of parent state counts)")
            continue
        rows = c.rows
        if not np.all(np.isfinite(rows)) or rows.min(initial=0.0) < 0 or rows.max(initial=0.0) > 1:
            out.append(f"{c.child}: entries outside [0, 1]")
        bad = np.flatnonzero(np.abs(rows.sum(axis=1) - 1.0) > PROB_TOL)
        if bad.size:
            out.append(f"{c.child}: rows {bad.tolist()} do not sum to 1")
    for n in names:
        if counts.get(n, 0) != 1:
            out.append(f"{n}: has {counts.get(n, 0)} CPTs, expected 1")
    if not out and _find_cycle(net) is not None:
        out.append(f"cycle through {_find_cycle(net)}")
    return ValidationReport(out)


def _find_cycle(net):
    parents = {c.child: c.parents for c in net.cpts}
    color = {}
    for start in parents:
        if color.get(start, 0) == 2:
            continue
        stack = [(start, iter(parents.get(start, ())))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
            elif color.get(nxt, 0) == 1:
                return [s for s, _ in stack]
            elif color.get(nxt, 0) == 0:
                color[nxt] = 1
                stack.append((nxt, iter(parents.get(nxt, ()))))
    return None


def topological_order(net: DiscreteNetwork) -> list[str]:
    """Lexicographically smallest topological order (Kahn with a min-heap)."""
    indeg = {v: len(net.parents(v)) for v in net.names}
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
    if len(order) != len(net):
        raise ValidationError(["network has a cycle"])
    return order


def indegree_ordering(net: DiscreteNetwork) -> list[str]:
    """The unique ordering of a complete DAG with indegree(X_i) = i - 1."""
    indeg = {v: len(net.parents(v)) for v in net.names}
    by_deg = {}
    for v, d in indeg.items():
        by_deg.setdefault(d, []).append(v)
    n = len(net)
    if sorted(indeg.values()) != list(range(n)) or any(len(vs) != 1 for vs in by_deg.values()):
        raise NotComplete(f"indegrees {sorted(indeg.values())} are not 0..{n - 1}")
    order = [by_deg[i][0] for i in range(n)]
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        if {pos[p] for p in net.parents(v)} != set(range(pos[v])):
            raise NotComplete(f"{v} is not a child of every earlier node")
    return order


def is_complete(net: DiscreteNetwork) -> bool:
    try:
        indegree_ordering(net)
    except NotComplete:
        return False
    return True


# evidence -----------------------------------------------------------------

@dataclass(frozen=True)
class Evidence:
    assignments: dict = field(default_factory=dict)  # name -> state index

    @classmethod
    def from_labels(cls, net: DiscreteNetwork, labels: dict) -> "Evidence":
        return cls({k: net.var(k).state_index(v) for k, v in labels.items()})

    def check(self, net: DiscreteNetwork):
        for k, s in self.assignments.items():
            card = net.card(k)
            if not 0 <= int(s) < card:
                raise DomainError(f"evidence {k}={s} out of range 0..{card - 1}")

    def __len__(self):
        return len(self.assignments)

    def items(self):
        return self.assignments.items()


def as_evidence(evidence) -> Evidence:
    if evidence is None:
        return Evidence({})
    if isinstance(evidence, Evidence):
        return evidence
    return Evidence(dict(evidence))


# enumeration ----------------------------------------------------------------

def joint_table(net: DiscreteNetwork, evidence=None, cap=None):
    """Dense joint ``P(x_free, e)`` over the unobserved variables.

    Returns ``(free_names, table)``; table axes follow ``free_names``.
    """
    ev = as_evidence(evidence)
    ev.check(net)
    cap = enumeration_cap() if cap is None else cap
    free = [v for v in net.names if v not in ev.assignments]
    size = 1
    for v in free:
        size *= net.card(v)
    if size > cap:
        raise TooLarge(f"joint state space {size} exceeds enumeration cap {cap}")
    axis = {v: i for i, v in enumerate(free)}
    joint = np.ones([net.card(v) for v in free]) if free else np.ones(())
    for c in net.cpts:
        t = c.table
        scope = list(c.scope)
        index = tuple(ev.assignments[v] if v in ev.assignments else slice(None) for v in scope)
        t = t[index]
        kept = [v for v in scope if v not in ev.assignments]
        if not kept:
            joint = joint * float(t)
            continue
        perm = sorted(range(len(kept)), key=lambda i: axis[kept[i]])
        t = np.transpose(t, perm)
        shape = [1] * len(free)
        for i in perm:
            shape[axis[kept[i]]] = net.card(kept[i])
        joint = joint * t.reshape(shape)
    return free, joint


def joint_assignment_iterator(net: DiscreteNetwork, evidence=None, cap=None):
    """Yield ``(assignment, probability)`` for every completion of the evidence.

    ``assignment`` is a tuple of state indices in ``net.names`` order.
    """
    ev = as_evidence(evidence)
    free, joint = joint_table(net, ev, cap)
    pos = [free.index(v) if v in free else None for v in net.names]
    for idx in itertools.product(*[range(net.card(v)) for v in free]):
        full = tuple(idx[pos[i]] if pos[i] is not None else ev.assignments[v]
                     for i, v in enumerate(net.names))
        yield full, float(joint[idx])
