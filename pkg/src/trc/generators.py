"""Model generators: random complete BNs, random kappa_n BFGs and two fixed reference models."""
from __future__ import annotations

import numpy as np

from .errors import DomainError
from .factorize import kappa_structure
from .model import DiscreteNetwork


def random_rows(rng, count, m, alpha=1.0, clip=(0.01, 0.99)):
    """``count`` distributions over ``m`` states: Dirichlet draws clipped and renormalized."""
    rows = rng.dirichlet(np.full(m, alpha), size=count)
    if clip is not None:
        rows = np.clip(rows, *clip)
        rows /= rows.sum(axis=1, keepdims=True)
    return rows


def _labels(m):
    return tuple(str(k + 1) for k in range(m))


def random_complete_bn(n: int, m: int = 2, seed=0, prefix="X", alpha=1.0) -> DiscreteNetwork:
    """Complete DAG ``X1 -> ... -> Xn`` (every earlier node a parent) with random NPTs."""
    if n < 3 or m < 2:
        raise DomainError(f"need n >= 3 and m >= 2, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    names = [f"{prefix}{i + 1}" for i in range(n)]
    cpts = {}
    for i, v in enumerate(names):
        rows = random_rows(rng, m ** i, m, alpha)
        cpts[v] = (tuple(names[:i]), rows.reshape((m,) * i + (m,)))
    return DiscreteNetwork.from_tables({v: _labels(m) for v in names}, cpts,
                                       name=f"complete{n}-m{m}-s{seed}")


def random_kappa_bfg(n: int, m: int = 2, seed=0, alpha=1.0) -> DiscreteNetwork:
    """A kappa_n-shaped BFG whose every node (intermediates included) has ``m`` states and random NPTs."""
    if n < 3 or m < 2:
        raise DomainError(f"need n >= 3 and m >= 2, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    layout = kappa_structure(n)
    cpts = {}
    for v, parents, _ in layout:
        k = len(parents)
        cpts[v] = (tuple(parents), random_rows(rng, m ** k, m, alpha).reshape((m,) * k + (m,)))
    return DiscreteNetwork.from_tables({v: _labels(m) for v, _, _ in layout}, cpts,
                                       {v: kind for v, _, kind in layout}, name=f"kappa{n}-m{m}-s{seed}")


def asia() -> DiscreteNetwork:
    """The chest-clinic network; state "1" is no and "2" is yes."""
    yes = lambda p: (1 - p, p)
    cpts = {
        "a": ((), np.array(yes(0.01))),
        "s": ((), np.array(yes(0.5))),
        "t": (("a",), np.array([yes(0.01), yes(0.05)])),
        "l": (("s",), np.array([yes(0.01), yes(0.1)])),
        "b": (("s",), np.array([yes(0.3), yes(0.6)])),
        # e is "t or l"
        "e": (("t", "l"), np.array([[yes(0.0), yes(1.0)], [yes(1.0), yes(1.0)]])),
        "x": (("e",), np.array([yes(0.05), yes(0.98)])),
        "d": (("e", "b"), np.array([[yes(0.1), yes(0.8)], [yes(0.7), yes(0.9)]])),
    }
    return DiscreteNetwork.from_tables({v: ("1", "2") for v in cpts}, cpts, name="asia")


DBN_TABLES = {
    "s1": ((), [0.8, 0.2]),
    "s2": (("s1",), [0.1, 0.9, 0.2, 0.8]),
    "s3": (("s2",), [0.9, 0.1, 0.7, 0.3]),
    "x1t1": ((), [0.6, 0.4]),
    "x1t2": (("x1t1",), [0.7, 0.3, 0.6, 0.4]),
    "x1t3": (("x1t2",), [0.1, 0.9, 0.4, 0.6]),
    "xmt1": ((), [0.3, 0.7]),
    "xmt2": (("xmt1",), [0.2, 0.8, 0.3, 0.7]),
    "xmt3": (("xmt2",), [0.4, 0.6, 0.7, 0.3]),
    "yt1": (("s1", "x1t1", "xmt1"),
            [0.1, 0.9, 0.2, 0.8, 0.3, 0.7, 0.4, 0.6, 0.5, 0.5, 0.6, 0.4, 0.7, 0.3, 0.8, 0.2]),
    "yt2": (("s2", "x1t2", "xmt2"),
            [0.3, 0.7, 0.4, 0.6, 0.5, 0.5, 0.6, 0.4, 0.7, 0.3, 0.8, 0.2, 0.9, 0.1, 0.1, 0.9]),
    "yt3": (("s3", "x1t3", "xmt3"),
            [0.6, 0.4, 0.7, 0.3, 0.8, 0.2, 0.9, 0.1, 0.1, 0.9, 0.2, 0.8, 0.3, 0.7, 0.4, 0.6]),
}
DBN_OBSERVED = ("yt1", "yt2", "yt3")


def switching_dbn() -> DiscreteNetwork:
    """Three-slice switching state-space model with binary nodes.

    Flat probability lists run over parent configurations with the last
    parent varying fastest, two entries (state 1, state 2) per configuration.
    """
    cpts = {v: (pa, np.reshape(vals, (2,) * len(pa) + (2,))) for v, (pa, vals) in DBN_TABLES.items()}
    return DiscreteNetwork.from_tables({v: ("1", "2") for v in cpts}, cpts, name="switching-dbn")
