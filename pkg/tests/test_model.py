import numpy as np
import pytest

from trc.errors import DomainError, TooLarge, UnknownVariable, ValidationError
from trc.generators import DBN_TABLES, asia, random_complete_bn, switching_dbn
from trc.model import (DiscreteNetwork, Evidence, indegree_ordering, is_complete, joint_assignment_iterator,
                       joint_table, topological_order, validate_network)


def test_cycle_is_a_violation():
    net = DiscreteNetwork.from_tables({"A": "12", "B": "12"},
                                      {"A": (("B",), np.full((2, 2), 0.5)), "B": (("A",), np.full((2, 2), 0.5))})
    rep = validate_network(net)
    assert not rep.ok and any("cycle" in v for v in rep.violations)
    with pytest.raises(ValidationError):
        rep.raise_if_invalid()


def test_row_sums_and_shapes_checked():
    bad = DiscreteNetwork.from_tables({"A": "12", "B": "12"},
                                      {"A": ((), [0.5, 0.6]), "B": (("A",), np.full((3, 2), 0.5))})
    v = validate_network(bad).violations
    assert any("do not sum to 1" in s for s in v)
    assert any("table shape" in s for s in v)


def test_missing_cpt_and_duplicate_state():
    net = DiscreteNetwork.from_tables({"A": ("1", "1")}, {})
    v = validate_network(net).violations
    assert any("duplicate state" in s for s in v) and any("0 CPTs" in s for s in v)


def test_cpt_ordering_last_parent_fastest():
    # p(s2 | s1) = (0.1, 0.9) for s1 = 1 and (0.2, 0.8) for s1 = 2
    net = switching_dbn()
    assert np.allclose(net.cpt("s2").table, [[0.1, 0.9], [0.2, 0.8]])
    y = net.cpt("yt1")
    flat = np.asarray(DBN_TABLES["yt1"][1]).reshape(-1, 2)
    assert np.allclose(y.table[0, 0, 1], flat[1])  # s1=1, x1t1=1, xmt1=2
    assert np.allclose(y.table[1, 0, 0], flat[4])  # s1=2 is the slowest parent


def test_joint_sums_to_one_and_to_evidence_probability():
    net = asia()
    assert sum(p for _, p in joint_assignment_iterator(net)) == pytest.approx(1.0, abs=1e-9)
    pa = sum(p for _, p in joint_assignment_iterator(net, {"a": 1}))
    assert pa == pytest.approx(0.01, abs=1e-12)


def test_joint_cap():
    with pytest.raises(TooLarge):
        joint_table(random_complete_bn(6), cap=10)


def test_evidence_labels_and_range():
    net = asia()
    assert Evidence.from_labels(net, {"a": "2"}).assignments == {"a": 1}
    with pytest.raises(DomainError):
        Evidence.from_labels(net, {"a": "3"})
    with pytest.raises(UnknownVariable):
        Evidence.from_labels(net, {"zz": "1"})
    with pytest.raises(DomainError):
        Evidence({"a": 5}).check(net)


def test_topological_order_and_completeness():
    net = asia()
    order = topological_order(net)
    pos = {v: i for i, v in enumerate(order)}
    assert all(pos[p] < pos[c] for p, c in net.edges)
    assert not is_complete(net)
    assert is_complete(random_complete_bn(5))


def test_indegree_ordering_rebuilds_edges():
    net = random_complete_bn(6, seed=3)
    order = indegree_ordering(net)
    edges = {(order[i], order[j]) for i in range(6) for j in range(i + 1, 6)}
    assert edges == set(net.edges)
