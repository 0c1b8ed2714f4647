import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trc.errors import DomainError, InvalidInput, TooLarge, TooManyParents
from trc.factorize import (binary_factorize, edge_first_order, kappa, kappa_structure, sparse_to_bfg,
                           to_kappa_bfg)
from trc.generators import asia, random_complete_bn, switching_dbn
from trc.model import DiscreteNetwork, validate_network
from trc.oracle import enumerate_marginals, exact_marginals


@pytest.mark.parametrize("n, k", [(3, 3), (4, 5), (5, 8), (12, 57), (20, 173), (80, 3083)])
def test_kappa_values(n, k):
    assert kappa(n) == k


def test_kappa_domain():
    with pytest.raises(DomainError):
        kappa(2)


@pytest.mark.parametrize("n", range(4, 13))
def test_kappa_structure_counts(n):
    layout = kappa_structure(n)
    assert len(layout) == kappa(n)
    assert sum(kind == "intermediate" for _, _, kind in layout) == (n - 2) * (n - 3) // 2
    assert all(len(pa) <= 2 for _, pa, _ in layout)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_binary_factorize_complete_is_kappa_and_exact(n):
    net = random_complete_bn(n, 2, seed=n)
    bfg, meta = binary_factorize(net)
    assert validate_network(bfg).ok
    assert len(bfg) == kappa(n)
    assert all(len(c.parents) <= 2 for c in bfg.cpts)
    src = enumerate_marginals(net)
    out = enumerate_marginals(bfg)
    for v in net.names:
        assert np.allclose(src[v], out[v], atol=1e-10)


def test_binary_factorize_keeps_small_nodes():
    net = asia()
    bfg, meta = binary_factorize(net)
    assert len(bfg) == len(net) and not meta.intermediates


def test_pair_intermediate_guard(monkeypatch):
    monkeypatch.setenv("TRC_ENUM_CAP", "100")
    with pytest.raises(TooLarge):
        binary_factorize(random_complete_bn(6))


def test_sparse_to_bfg_requires_two_parents():
    with pytest.raises(TooManyParents):
        sparse_to_bfg(switching_dbn())


@pytest.mark.parametrize("order", ["edge-first", "lexicographic"])
def test_sparse_embedding_preserves_marginals(order):
    net = asia()
    full, meta = sparse_to_bfg(net, order)
    assert len(full) == kappa(len(net))
    src = enumerate_marginals(net, {"a": 1, "d": 1})
    masks = {v: meta.evidence_mask(v, {"a": 1, "d": 1}) for v in full.names}
    # clamp every replica through its mask and compare original-variable marginals
    ev_full = {}
    for v, m in masks.items():
        if m is not None and m.sum() == 1:
            ev_full[v] = int(np.flatnonzero(m)[0])
    out = enumerate_marginals(full, ev_full)
    for v in net.names:
        assert np.allclose(src[v], out[v], atol=1e-10)


def test_edge_first_order_on_asia():
    assert edge_first_order(asia())[:2] == ["a", "t"]


def test_explicit_order_validated():
    with pytest.raises(InvalidInput):
        sparse_to_bfg(asia(), ["t", "a", "s", "b", "l", "e", "d", "x"])


def test_to_kappa_bfg_dbn_embeds_all_nodes():
    net = switching_dbn()
    full, meta = to_kappa_bfg(net)
    assert all(len(c.parents) <= 2 for c in full.cpts)
    assert set(meta.source_cards) == set(net.names)
    a = exact_marginals(net, {"yt1": 0}).marginals
    b = exact_marginals(full, {v: int(np.flatnonzero(meta.evidence_mask(v, {"yt1": 0}))[0])
                               for v in full.names if meta.evidence_mask(v, {"yt1": 0}) is not None
                               and len(meta.carries[v]) == 1}, variables=net.names).marginals
    for v in net.names:
        assert np.allclose(a[v], b[v], atol=1e-10)


@given(st.integers(3, 5), st.integers(0, 10_000))
def test_factorization_never_changes_the_distribution(n, seed):
    net = random_complete_bn(n, 2, seed)
    bfg, meta = binary_factorize(net)
    src = enumerate_marginals(net)
    out = enumerate_marginals(bfg)
    assert all(np.allclose(src[v], out[v], atol=1e-10) for v in net.names)
    for v in bfg.names:
        for s in range(bfg.card(v)):
            assert set(meta.decode(v, s)) == set(meta.carries[v])
