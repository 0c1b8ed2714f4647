import pytest

from trc.generators import asia, random_kappa_bfg
from trc.markov import moralize
from trc.ori import audit_candidates, outer_regions, primary_triplets, redundancy_type
from trc.propagate import TRCConfig, build_regions
from trc.regions import (check_maxent_uniform, check_perfect_correlation, counting_numbers, cvm_construct,
                         factor_unity, is_connected_for, table2_report, unity_sums)
from trc.rgbf import audit_equivalence, rgbf_transform


def _rg(n, **kw):
    return build_regions(random_kappa_bfg(n), TRCConfig(rgbf=False, **kw)).rg


def test_rgbf_audit_on_kappa5():
    verdict = {frozenset(t.nodes): v for t, v in audit_candidates(random_kappa_bfg(5))}
    assert verdict[frozenset({"X1", "X3", "X4"})] == "type1"
    assert verdict[frozenset({"X1", "X3", "E2"})] == "type2"
    assert verdict[frozenset({"X2", "X3", "E1"})] is None


@pytest.mark.parametrize("n", range(4, 13))
def test_triplet_counts(n):
    bfg = random_kappa_bfg(n)
    o = outer_regions(bfg)
    inter = (n - 2) * (n - 3) // 2
    assert o.kinds.count("primary") == n - 2 + inter
    assert o.kinds.count("interaction") == inter
    assert len(primary_triplets(bfg)) == n - 2 + inter


@pytest.mark.parametrize("n", range(4, 13))
def test_level_report_counts(n):
    rg = _rg(n)
    rep = table2_report(rg, n)
    assert rep["ok"], rep["deviations"]
    assert check_perfect_correlation(rg) == (True, 1)
    for i in rg.level(2):
        assert 3 - n <= rg.regions[i].counting_number <= -1
    for i in rg.level(3):
        assert 1 <= rg.regions[i].counting_number <= n - 3


@pytest.mark.parametrize("n", [4, 6, 9])
def test_counting_numbers_are_recomputable(n):
    rg = _rg(n)
    assert counting_numbers(rg) == rg.counts


@pytest.mark.parametrize("n", [4, 7, 10])
def test_unity_and_connectivity(n):
    rg = _rg(n)
    assert set(unity_sums(rg).values()) == {1}
    assert all(total == 1 for _, total in factor_unity(rg))
    assert all(is_connected_for(rg, v) for v in rg.variables)
    ok, h, hmax = check_maxent_uniform(rg)
    assert ok, (h, hmax)


@pytest.mark.parametrize("placement", ["front", "back", "random"])
@pytest.mark.parametrize("n", [5, 8, 12])
def test_rgbf_invariants(n, placement):
    rg = _rg(n)
    after = rgbf_transform(rg, placement, seed=n)
    audit = audit_equivalence(rg, after)
    assert audit["ok"], audit
    assert set(after.counts) <= {1, 0, -1}
    assert sum(after.counts) == 1
    assert unity_sums(after) == unity_sums(rg)


def test_asia_region_graph_is_valid():
    built = build_regions(asia(), TRCConfig(factorize="kappa"))
    assert sum(built.rg.counts) == 1
    assert set(unity_sums(built.rg).values()) == {1}


def test_redundancy_type_accepts_node_sets():
    fs = moralize(random_kappa_bfg(5))
    assert redundancy_type(frozenset({"X1", "X3", "X4"}), fs) == "type1"
