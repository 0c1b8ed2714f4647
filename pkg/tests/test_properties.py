"""Randomized invariants across the pipeline."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from trc.factorize import sparse_to_bfg
from trc.generators import random_kappa_bfg
from trc.model import DiscreteNetwork
from trc.oracle import enumerate_marginals
from trc.propagate import EngineConfig, TRCConfig, build_regions, cccp_run, compile_layout, extract_marginal
from trc.propagate.pipeline import evidence_masks
from trc.regions import unity_sums
from trc.rgbf import audit_equivalence, rgbf_transform

kappa_nets = st.builds(random_kappa_bfg, st.integers(4, 7), st.integers(2, 3), st.integers(0, 10_000))


@settings(max_examples=10)
@given(kappa_nets, st.data())
def test_cccp_invariants(net, data):
    obs = data.draw(st.dictionaries(st.sampled_from(net.originals), st.integers(0, 1), max_size=2))
    built = build_regions(net)
    state = cccp_run(compile_layout(built.rg, evidence_masks(built, obs)))
    trace = np.array(state.free_energy_trace)
    assert np.all(np.diff(trace) <= 1e-7)
    assert state.converged
    lay = state.layout
    b = np.exp(state.logb)
    sums = np.add.reduceat(b, lay.roff)
    assert np.allclose(sums, 1, atol=1e-9)
    assert state.consistency_gap() < 1e-4
    for v, s in obs.items():
        p, _ = extract_marginal(state, v)
        assert p[s] > 1 - 1e-9


@given(st.integers(4, 14), st.sampled_from(["front", "back", "random"]), st.integers(0, 1000))
def test_rgbf_preserves_unity(n, placement, seed):
    rg = build_regions(random_kappa_bfg(n), TRCConfig(rgbf=False)).rg
    after = rgbf_transform(rg, placement, seed)
    assert audit_equivalence(rg, after)["ok"]
    assert unity_sums(after) == unity_sums(rg)
    assert sum(after.counts) == 1


def _random_sparse(seed, n):
    """Random DAG with <= 2 parents per node over n binary variables."""
    rng = np.random.default_rng(seed)
    names = [f"V{i}" for i in range(n)]
    cpts = {}
    for i, v in enumerate(names):
        k = int(rng.integers(0, min(i, 2) + 1))
        pa = tuple(sorted(rng.choice(names[:i], size=k, replace=False))) if k else ()
        cpts[v] = (pa, rng.dirichlet(np.ones(2), size=2 ** k).reshape((2,) * k + (2,)))
    return DiscreteNetwork.from_tables({v: ("1", "2") for v in names}, cpts)


@given(st.integers(0, 10_000), st.integers(3, 7))
def test_sparse_embedding_is_exact(seed, n):
    net = _random_sparse(seed, n)
    full, meta = sparse_to_bfg(net)
    src = enumerate_marginals(net)
    out = enumerate_marginals(full)
    for v in net.names:
        assert np.allclose(src[v], out[v], atol=1e-10)
    for v in full.names:
        assert set(meta.carries[v]) <= set(net.names)


@given(st.integers(0, 10_000), st.integers(3, 6))
def test_evidence_masks_cover_every_replica(seed, n):
    net = _random_sparse(seed, n)
    built = build_regions(net, TRCConfig(factorize="kappa"))
    target = net.names[-1]
    masks = evidence_masks(built, {target: 1})
    holders = [v for v, c in built.meta.carries.items() if target in c]
    assert set(holders) == set(masks)
    for v in holders:
        assert masks[v].sum() * 2 == masks[v].size
