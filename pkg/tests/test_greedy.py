import math

import pytest

from nonsubgreedy.exceptions import DomainError
from nonsubgreedy.graphs import CommGraph
from nonsubgreedy.greedy import (GreedyPlanner, greedy_full, greedy_limited, make_epsilon_selector, make_selector,
                                 step_eta)
from nonsubgreedy.matroid import PartitionMatroid
from nonsubgreedy.setfn import GroundElement, TabularOracle

from conftest import tab


@pytest.fixture
def two_agents():
    # agent 1: a1 or a2; agent 2: b1 or b2. b2 pairs well with a2.
    blocks = {"a1": 1, "a2": 1, "b1": 2, "b2": 2}
    vals = {"": 0, "a1": 3, "a2": 2.5, "b1": 1, "b2": 1,
            "a1,a2": 3.5, "b1,b2": 1.5, "a1,b1": 4, "a1,b2": 4, "a2,b1": 3.5, "a2,b2": 6,
            "a1,a2,b1": 4.5, "a1,a2,b2": 6, "a1,b1,b2": 4.5, "a2,b1,b2": 6, "a1,a2,b1,b2": 6.5}
    return tab(vals, blocks)


def test_full_greedy(two_agents):
    tr = greedy_full(two_agents)
    assert tr.selection == ("a1", "b1")
    assert tr.value == 4 and tr.eta_realized == 1
    assert tr.contexts == [(), ("a1",)]


def test_epsilon_selector_takes_worst_admissible(two_agents):
    tr = greedy_full(two_agents, selector=0.25)
    # a2 is within 3/2.5 = 1.2 of the best, then b2 gains 3.5
    assert tr.selection == ("a2", "b2")
    assert abs(tr.eta_realized - 1.2) < 1e-12
    assert tr.value == 6


def test_limited_with_empty_graph(two_agents):
    tr = greedy_limited(two_agents, g=CommGraph.empty(2))
    assert tr.contexts == [(), ()]
    assert tr.selection == ("a1", "b1")


def test_complete_graph_equals_full(small_instances):
    for o in small_instances:
        m = PartitionMatroid.from_elements(o.elements)
        full = greedy_full(o, m)
        lim = greedy_limited(o, m, CommGraph.complete(m.n_agents))
        assert full.chosen == lim.chosen and full.contexts == lim.contexts and full.value == lim.value


def test_step_eta():
    assert step_eta(2.0, 1.0) == 2.0
    assert step_eta(0.0, 0.0) == 1.0
    assert math.isinf(step_eta(1.0, 0.0))


def test_selector_parsing():
    assert make_selector("exact").label == "exact"
    assert make_selector("epsilon:0.5").label == "epsilon:0.5"
    with pytest.raises(DomainError):
        make_selector("best")
    with pytest.raises(DomainError):
        make_epsilon_selector(-1)


def test_selector_must_return_block_member(two_agents):
    with pytest.raises(DomainError):
        greedy_full(two_agents, selector=lambda cands: "zz")


def test_graph_size_mismatch(two_agents):
    with pytest.raises(DomainError):
        greedy_limited(two_agents, g=CommGraph.empty(3))


def test_planner_estimator(two_agents):
    p = GreedyPlanner(selector="exact").fit(two_agents)
    assert p.predict() == ("a1", "b1") and p.eta_ == 1
    p = GreedyPlanner(order=(2, 1)).fit(two_agents)
    # b1/b2 tie at 1; lowest id first, then a1 gains 3 over b1
    assert p.selection_ == ("b1", "a1")
    with pytest.raises(DomainError):
        GreedyPlanner(mode="limited").fit(two_agents)
    assert GreedyPlanner(mode="limited", graph=CommGraph.empty(2)).fit(two_agents).value_ == 4
