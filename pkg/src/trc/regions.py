"""Region graphs built by the cluster variation method, plus their property checks."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from itertools import combinations

from .errors import UncoveredFactor, InvalidInput


@dataclass(frozen=True)
class Region:
    label: tuple          # ordered variable names
    level: int
    counting_number: int = 1
    factors: tuple = ()   # indices into the factor list
    copy: int = 0         # > 0 for copies made by binary factorization of the graph

    @property
    def vars(self) -> frozenset:
        return frozenset(self.label)

    @property
    def key(self):
        return (self.label, self.copy)

    def __str__(self):
        name = "{" + ",".join(self.label) + "}"
        return f"{name}#{self.copy}" if self.copy else name


@dataclass
class RegionGraph:
    regions: list
    edges: list                      # (parent index, child index)
    factors: list = field(default_factory=list)
    cards: dict = field(default_factory=dict)
    variables: list = field(default_factory=list)

    def __post_init__(self):
        self._parents = defaultdict(list)
        self._children = defaultdict(list)
        for p, c in self.edges:
            self._parents[c].append(p)
            self._children[p].append(c)

    def __len__(self):
        return len(self.regions)

    def parents(self, i):
        return self._parents[i]

    def children(self, i):
        return self._children[i]

    def level(self, k):
        return [i for i, r in enumerate(self.regions) if r.level == k]

    @property
    def depth(self):
        return max((r.level for r in self.regions), default=0)

    def ancestors(self, i):
        seen, stack = set(), list(self._parents[i])
        while stack:
            p = stack.pop()
            if p not in seen:
                seen.add(p)
                stack.extend(self._parents[p])
        return seen

    def containing(self, v):
        return [i for i, r in enumerate(self.regions) if v in r.vars]

    @property
    def counts(self):
        return [r.counting_number for r in self.regions]

    def with_counts(self, counts):
        regions = [replace(r, counting_number=int(c)) for r, c in zip(self.regions, counts)]
        return RegionGraph(regions, list(self.edges), self.factors, self.cards, self.variables)

    def size_entries(self):
        """Number of table entries needed to store one belief per region."""
        return sum(math.prod(self.cards[v] for v in r.label) for r in self.regions)


def _label_key(pos):
    return lambda lab: tuple(pos[v] for v in lab)


def cvm_construct(outer, factors=None, cards=None, variables=None, keep_zero=False) -> RegionGraph:
    """Region graph from outer regions by intersection.

    ``outer`` is an :class:`~trc.ori.OuterRegions` or a list of
    ``(label, factor_indices)``.  Level 2 holds the node pairs shared by two or
    more outer regions; level 3 the single variables whose counting number,
    ``1 - sum`` over every larger region containing them, is non-zero (zero
    ones are kept too with ``keep_zero``, if they are level-2 intersections).
    """
    if hasattr(outer, "labels"):
        fs = outer.fs
        specs = list(zip(outer.labels, outer.factors))
        factors = fs.factors if factors is None else factors
        cards = fs.cards if cards is None else cards
        variables = list(fs.variables) if variables is None else variables
    else:
        specs = [(tuple(lab), tuple(f)) for lab, f in outer]
    factors = list(factors or [])
    if variables is None:
        variables = sorted({v for lab, _ in specs for v in lab})
    if cards is None:
        cards = {}
    pos = {v: i for i, v in enumerate(variables)}
    key = _label_key(pos)
    labels = [tuple(sorted(lab, key=pos.__getitem__)) for lab, _ in specs]
    if len(set(labels)) != len(labels):
        raise InvalidInput("outer region labels must be distinct")
    for lab, (_, fidx) in zip(labels, specs):
        for i in fidx:
            if not set(factors[i].scope) <= set(lab):
                raise InvalidInput(f"factor {factors[i].scope} assigned outside region {lab}")
    assigned = {i for _, fidx in specs for i in fidx}
    for i, f in enumerate(factors):
        if i in assigned:
            continue
        if f.source == "cpd" or not any(set(f.scope) <= set(lab) for lab in labels):
            raise UncoveredFactor(f"factor over {f.scope} is not assigned to an outer region")

    regions = [Region(lab, 1, 1, tuple(fidx)) for lab, (_, fidx) in zip(labels, specs)]
    order1 = sorted(range(len(regions)), key=lambda i: key(regions[i].label))
    regions = [regions[i] for i in order1]
    outer_set = set(labels)

    pair_hosts = defaultdict(list)
    for i, r in enumerate(regions):
        for pair in combinations(r.label, 2):
            pair_hosts[pair].append(i)
    level2 = sorted((p for p, h in pair_hosts.items() if len(h) >= 2 and p not in outer_set), key=key)
    edges = []
    for pair in level2:
        j = len(regions)
        regions.append(Region(pair, 2, 1 - len(pair_hosts[pair])))
        edges.extend((h, j) for h in pair_hosts[pair])

    members = defaultdict(list)
    for i, r in enumerate(regions):
        for v in r.label:
            members[v].append(i)
    from_pairs = defaultdict(int)
    for i in range(len(order1), len(regions)):
        for v in regions[i].label:
            from_pairs[v] += 1
    for v in sorted(members, key=pos.__getitem__):
        if (v,) in outer_set:
            continue
        c = 1 - sum(regions[i].counting_number for i in members[v])
        if c == 0 and not (keep_zero and from_pairs[v] >= 2):
            continue
        j = len(regions)
        regions.append(Region((v,), 3, c))
        hosts = [i for i in members[v] if regions[i].level == 2] or members[v]
        edges.extend((h, j) for h in hosts)
    rg = RegionGraph(regions, edges, factors, dict(cards), list(variables))
    return rg


def counting_numbers(rg: RegionGraph) -> list[int]:
    """``c_r = 1 - sum of c over the ancestors of r``, evaluated top-down."""
    order = sorted(range(len(rg)), key=lambda i: rg.regions[i].level)
    c = [None] * len(rg)
    for i in order:
        anc = rg.ancestors(i)
        c[i] = 1 - sum(c[a] for a in anc)
    return c


def check_perfect_correlation(rg: RegionGraph):
    total = sum(r.counting_number for r in rg.regions)
    return total == 1, total


def unity_sums(rg: RegionGraph) -> dict:
    """Per variable, the sum of counting numbers of regions that contain it."""
    out = defaultdict(int)
    for r in rg.regions:
        for v in r.label:
            out[v] += r.counting_number
    return dict(out)


def factor_unity(rg: RegionGraph) -> list:
    """Per factor: (number of level-1 regions holding it, sum of c over regions covering its scope)."""
    out = []
    for i, f in enumerate(rg.factors):
        holders = sum(1 for r in rg.regions if i in r.factors)
        scope = set(f.scope)
        total = sum(r.counting_number for r in rg.regions if scope <= r.vars)
        out.append((holders, total))
    return out


def is_connected_for(rg: RegionGraph, v) -> bool:
    """Regions containing ``v`` form a connected subgraph of the region graph."""
    nodes = set(rg.containing(v))
    if not nodes:
        return True
    adj = defaultdict(set)
    for p, c in rg.edges:
        if p in nodes and c in nodes:
            adj[p].add(c)
            adj[c].add(p)
    start = next(iter(nodes))
    seen, stack = {start}, [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == nodes


def check_maxent_uniform(rg: RegionGraph, cards=None, tol=1e-9):
    """Region entropy at uniform beliefs against the true maximum ``sum ln m_v``.

    Returns ``(ok, H_region, H_max)``.
    """
    cards = cards or rg.cards
    h = sum(r.counting_number * sum(math.log(cards[v]) for v in r.label) for r in rg.regions)
    variables = {v for r in rg.regions for v in r.label}
    hmax = sum(math.log(cards[v]) for v in variables)
    return abs(h - hmax) <= tol, h, hmax


def uncovered_pairs(rg: RegionGraph, pairs) -> list:
    """Pairs (from ``pairs``) that are not the label of some region shared by two outer regions."""
    level2 = {frozenset(rg.regions[i].label) for i in rg.level(2)}
    return [p for p in pairs if frozenset(p) not in level2]


def table2_report(rg: RegionGraph, n: int) -> dict:
    """Per-level structure against the closed forms for a kappa_n TRC graph."""
    expect = {1: (3, (n - 2) ** 2, 1, 1), 2: (2, (n - 2) ** 2, -1, 3 - n), 3: (1, n - 3, n - 3, 1)}
    levels, deviations = {}, []
    for k in (1, 2, 3):
        idx = [i for i in rg.level(k) if rg.regions[i].counting_number != 0 or k < 3]
        cs = [rg.regions[i].counting_number for i in idx]
        sizes = sorted({len(rg.regions[i].label) for i in idx})
        row = {"size": sizes[0] if len(sizes) == 1 else sizes, "length": len(idx),
               "max_c": max(cs) if cs else None, "min_c": min(cs) if cs else None}
        levels[k] = row
        want = dict(zip(("size", "length", "max_c", "min_c"), expect[k]))
        for name, val in want.items():
            if row[name] != val:
                deviations.append(f"level {k} {name}: {row[name]} != {val}")
    return {"n": n, "levels": levels, "deviations": deviations, "ok": not deviations}


def format_level_report(report) -> str:
    lines = [f"kappa_{report['n']} region graph", "level  v(r)  length  max(c_r)  min(c_r)"]
    for k, row in report["levels"].items():
        lines.append(f"{k:>5}  {row['size']!s:>4}  {row['length']:>6}  {row['max_c']!s:>8}  {row['min_c']!s:>8}")
    lines.append("deviations: " + ("none" if report["ok"] else "; ".join(report["deviations"])))
    return "\n".join(lines)


def to_dot(rg: RegionGraph) -> str:
    lines = ["digraph regions {", "  rankdir=TB;"]
    for i, r in enumerate(rg.regions):
        lines.append(f'  r{i} [label="{r}\\nc={r.counting_number}", shape=box];')
    for k in sorted({r.level for r in rg.regions}):
        same = " ".join(f"r{i};" for i in rg.level(k))
        lines.append(f"  {{ rank=same; {same} }}")
    for p, c in rg.edges:
        lines.append(f"  r{p} -> r{c};")
    lines.append("}")
    return "\n".join(lines) + "\n"
