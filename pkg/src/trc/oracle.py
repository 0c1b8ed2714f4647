"""Exact inference for verification: dense enumeration and variable elimination."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import SupportMismatch, TooLarge
from .model import DiscreteNetwork, as_evidence, enumeration_cap, joint_table
from .report import MarginalReport

KL_FLOOR = 1e-12


def _normalized_marginals(names, joint):
    z = joint.sum()
    if not z > 0:
        raise ValueError("evidence has zero probability")
    out = {}
    for i, v in enumerate(names):
        axes = tuple(j for j in range(len(names)) if j != i)
        out[v] = joint.sum(axis=axes) / z
    return out


def enumerate_marginals(net: DiscreteNetwork, evidence=None, cap=None) -> dict:
    ev = as_evidence(evidence)
    free, joint = joint_table(net, ev, cap)
    out = _normalized_marginals(free, joint)
    for v, s in ev.items():
        out[v] = np.eye(net.card(v))[int(s)]
    return {v: out[v] for v in net.names}


def _min_fill_pick(candidates, neighbours, cards):
    best, best_key = None, None
    for v in candidates:
        nb = neighbours[v]
        fill = sum(1 for a in nb for b in nb if a < b and b not in neighbours[a])
        size = int(np.prod([cards[u] for u in nb | {v}], dtype=float))
        key = (fill, size, v)
        if best_key is None or key < best_key:
            best, best_key = v, key
    return best, best_key[1]


def _contract(factors, out):
    """einsum over named scopes with locally numbered axes (einsum allows only 52 labels)."""
    local = {}
    for s, _ in factors:
        for u in s:
            local.setdefault(u, len(local))
    for u in out:
        local.setdefault(u, len(local))
    args = []
    for s, t in factors:
        args += [t, [local[u] for u in s]]
    if not args:
        return np.ones(())
    return np.einsum(*args, [local[u] for u in out], optimize=True)


def eliminate(net: DiscreteNetwork, query, evidence=None, cap=None):
    """Joint over ``query`` (unnormalized, evidence applied) by min-fill elimination.

    Returns ``(query_names, table)``.  Raises TooLarge when an intermediate or
    the final table would exceed ``cap`` entries.
    """
    ev = as_evidence(evidence)
    ev.check(net)
    cap = enumeration_cap() if cap is None else cap
    cards = {v: net.card(v) for v in net.names}
    query = [v for v in query if v not in ev.assignments]
    if np.prod([float(cards[v]) for v in query]) > cap:
        raise TooLarge(f"query table over {len(query)} variables exceeds cap {cap}")
    factors = []
    for c in net.cpts:
        idx = tuple(ev.assignments[v] if v in ev.assignments else slice(None) for v in c.scope)
        kept = tuple(v for v in c.scope if v not in ev.assignments)
        factors.append((kept, np.asarray(c.table[idx], dtype=float)))
    ids = {v: i for i, v in enumerate(net.names)}
    hidden = {v for v in net.names if v not in ev.assignments and v not in query}
    while hidden:
        neighbours = {}
        for scope, _ in factors:
            for v in scope:
                neighbours.setdefault(v, set()).update(u for u in scope if u != v)
        for v in hidden:
            neighbours.setdefault(v, set())
        v, size = _min_fill_pick(sorted(hidden), neighbours, cards)
        if size > cap:
            raise TooLarge(f"elimination width {size} exceeds cap {cap}")
        touching = [f for f in factors if v in f[0]]
        factors = [f for f in factors if v not in f[0]]
        union = sorted({u for s, _ in touching for u in s}, key=ids.__getitem__)
        out = [u for u in union if u != v]
        table = _contract(touching, out)
        factors.append((tuple(out), table))
        hidden.discard(v)
    return query, _contract(factors, query)


def eliminate_marginals(net: DiscreteNetwork, evidence=None, variables=None, cap=None) -> dict:
    ev = as_evidence(evidence)
    variables = list(variables or net.names)
    names, joint = eliminate(net, variables, ev, cap)
    out = _normalized_marginals(names, joint)
    for v, s in ev.items():
        out[v] = np.eye(net.card(v))[int(s)]
    return {v: out[v] for v in variables}


def exact_marginals(net: DiscreteNetwork, evidence=None, method="auto", variables=None, cap=None) -> MarginalReport:
    """Posterior marginals of ``variables`` (default: the network's original variables).

    ``method`` is ``enumeration``, ``elimination`` or ``auto`` (enumeration when
    the joint fits under the cap, elimination otherwise).
    """
    t0 = time.perf_counter()
    variables = list(variables or net.originals)
    cap = enumeration_cap() if cap is None else cap
    if method == "auto":
        ev = as_evidence(evidence)
        size = np.prod([float(net.card(v)) for v in net.names if v not in ev.assignments])
        method = "enumeration" if size <= cap else "elimination"
    if method == "enumeration":
        allm = enumerate_marginals(net, evidence, cap)
        marg = {v: allm[v] for v in variables}
    elif method == "elimination":
        marg = eliminate_marginals(net, evidence, variables, cap)
    else:
        raise ValueError(f"unknown exact method {method!r}")
    return MarginalReport(marg, method=f"exact-{method}", seconds=time.perf_counter() - t0)


def kl_distance(p, q, floor=KL_FLOOR) -> float:
    """``sum p ln(p / q)`` with ``q`` floored; terms with ``p = 0`` contribute nothing."""
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    if p.shape != q.shape:
        raise SupportMismatch(f"distributions over {p.size} and {q.size} states")
    q = np.maximum(q, floor)
    nz = p > 0
    return float(max(0.0, np.sum(p[nz] * np.log(p[nz] / q[nz]))))


@dataclass
class Comparison:
    kl: dict
    mean_abs_error: dict
    iterations: int = 0
    label: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def max_kl(self):
        return max(self.kl.values(), default=0.0)

    @property
    def min_kl(self):
        return min(self.kl.values(), default=0.0)

    @property
    def avg_kl(self):
        return float(np.mean(list(self.kl.values()))) if self.kl else 0.0

    @property
    def mean_error(self):
        return float(np.mean(list(self.mean_abs_error.values()))) if self.mean_abs_error else 0.0

    def summary(self) -> dict:
        return {"max(KL)": self.max_kl, "min(KL)": self.min_kl, "average(KL)": self.avg_kl,
                "mean |mean error|": self.mean_error, "iterations": self.iterations}

    def to_text(self) -> str:
        head = f"{self.label}\n" if self.label else ""
        return head + "\n".join(f"{k:<18} {v:.3e}" if isinstance(v, float) else f"{k:<18} {v}"
                                for k, v in self.summary().items()) + "\n"


def compare_report(approx: MarginalReport, exact: MarginalReport, label="") -> Comparison:
    """Per-variable KL(exact || approx) and absolute error of the means."""
    missing = set(exact.marginals) ^ set(approx.marginals)
    if missing:
        raise SupportMismatch(f"reports cover different variables: {sorted(missing)}")
    kl, err = {}, {}
    em, am = exact.means, approx.means
    for v in exact.marginals:
        kl[v] = kl_distance(exact.marginals[v], approx.marginals[v])
        err[v] = abs(em[v] - am[v])
    return Comparison(kl, err, approx.iterations, label)


def format_kl_columns(rows) -> str:
    """``rows``: list of (label, Comparison).  One column per row: max, min and average KL."""
    labels = [lab for lab, _ in rows]
    width = max([len(l) for l in labels] + [10])
    lines = [f"{'':<12}" + "".join(f"{l:>{width + 2}}" for l in labels)]
    for key in ("max(KL)", "min(KL)", "average(KL)", "iterations"):
        vals = [c.summary()[key] for _, c in rows]
        cells = "".join(f"{v:>{width + 2}.3e}" if isinstance(v, float) else f"{v:>{width + 2}}" for v in vals)
        lines.append(f"{key:<12}{cells}")
    return "\n".join(lines) + "\n"
