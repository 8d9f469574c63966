import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonsubgreedy.bos import (BeliefState, BenefitOfSearch, CellModel, GridMap, SensorModel, anticipated_risk,
                              bayes_estimate, benefit, bos_oracle, cell_curvature_table, joint_objective, load_map,
                              sensor_likelihood, sequence_probability_mass, synthetic_map, truncated_poisson,
                              update_beliefs)
from nonsubgreedy.curvature import curvatures, interchangeable_oracle
from nonsubgreedy.exceptions import CapacityError, DegenerateEvidenceError, DomainError
from nonsubgreedy.instances import random_cell_model, rng_for
from nonsubgreedy.setfn import GroundElement


@pytest.fixture
def one_env():
    return SensorModel((0.8,), (0.3,), ((1.0,),), 6)


@pytest.fixture
def perfect():
    return SensorModel((1.0, 1.0), (0.0, 0.0), ((1.0, 0.0), (0.0, 1.0)), 4)


def test_likelihood_examples(one_env):
    assert abs(sensor_likelihood(one_env, 1, 1, 0) - 0.602) < 1e-15
    assert abs(sensor_likelihood(one_env, 3, 0, 0) - 0.7 * 0.3**3) < 1e-15
    s = SensorModel((0.9,), (0.0,), ((1.0,),), 3)
    assert [sensor_likelihood(s, z, 1, 0) for z in range(3)] == pytest.approx([0.1, 0.9, 0.0], abs=1e-15)
    with pytest.raises(DomainError):
        sensor_likelihood(one_env, 7, 0, 0)
    with pytest.raises(DomainError):
        sensor_likelihood(one_env, 0, 0, 1)


def test_likelihood_tail_and_tightening():
    s = SensorModel()
    assert s.tail_mass(2).max() > 1e-9
    t = s.tightened(2)
    assert t.z_max > 12 and t.tail_mass(2).max() < 1e-9
    assert s.tightened(2, tol=1e-3).z_max == 12 or s.tail_mass(2).max() >= 1e-3
    # untruncated sums: the table plus the tail is exactly one
    P = t.likelihood_table(2)
    assert np.allclose(P.sum(axis=0) + t.tail_mass(2), 1.0, atol=1e-15)


def test_sensor_validation():
    with pytest.raises(DomainError):
        SensorModel((0.5,), (1.0,), ((1.0,),))
    with pytest.raises(ValueError):
        SensorModel((0.5, 0.5), (0.1, 0.1), ((0.5, 0.4), (0.5, 0.5)))
    with pytest.raises(DomainError):
        SensorModel((0.5,), (0.1, 0.2), ((1.0,),))


def test_update_examples(one_env, perfect):
    b = BeliefState.from_priors((0.9, 0.1), (1.0,))
    b2 = update_beliefs(b, one_env, 1, 0)
    assert abs(b2.pt[1] - 0.1 * 0.602 / (0.9 * 0.21 + 0.1 * 0.602)) < 1e-12
    assert abs(b2.pt[1] - 0.2416) < 1e-4
    assert b2.history == ((1, 0),)
    b = BeliefState.from_priors((1 / 3, 1 / 3, 1 / 3), (0.5, 0.5))
    b3 = update_beliefs(b, perfect, 0, 1)
    assert np.allclose(b3.pe, [0, 1]) and np.allclose(b3.pt, [1, 0, 0])


@pytest.mark.parametrize("rule", ["exact", "literal"])
def test_update_keeps_distributions(rule):
    s = SensorModel()
    b = BeliefState.from_priors(truncated_poisson(0.2, 2), (0.2, 0.3, 0.5), rule)
    for z, y in [(0, 1), (2, 2), (1, 0)]:
        b = update_beliefs(b, s, z, y)
        assert abs(b.pt.sum() - 1) < 1e-12 and abs(b.pe.sum() - 1) < 1e-12 and np.all(b.joint >= 0)


def test_literal_rule_env_ignores_targets():
    s = SensorModel()
    b = BeliefState.from_priors(truncated_poisson(0.2, 2), (0.2, 0.3, 0.5), "literal")
    pe = update_beliefs(b, s, 5, 1).pe
    expect = s.pye[:, 1] * np.array([0.2, 0.3, 0.5])
    assert np.allclose(pe, expect / expect.sum(), atol=1e-14)


def test_rules_agree_with_one_env(one_env):
    a = BeliefState.from_priors((0.5, 0.3, 0.2), (1.0,))
    b = BeliefState.from_priors((0.5, 0.3, 0.2), (1.0,), "literal")
    for z in (0, 2, 1):
        a, b = update_beliefs(a, one_env, z, 0), update_beliefs(b, one_env, z, 0)
    assert np.allclose(a.joint, b.joint, atol=1e-14)


def test_degenerate_evidence(perfect):
    b = BeliefState.from_priors((1.0, 0.0, 0.0), (0.5, 0.5))
    with pytest.raises(DegenerateEvidenceError):
        update_beliefs(b, perfect, 2, 0)


def test_bayes_estimate_examples():
    assert bayes_estimate((0.0, 1.0, 0.0), 3, 1) == (1, 0.0)
    d, r = bayes_estimate((0.5, 0.5), 3, 1)
    assert d == 1 and abs(r - 0.5) < 1e-15
    assert bayes_estimate((0.25, 0.5, 0.25), 1, 1)[0] == 1
    # exact tie goes up
    assert bayes_estimate((0.5, 0.5), 1, 1)[0] == 1


def test_risk_one_visit_direct_sum(one_env):
    cell = CellModel((0.9, 0.1), (1.0,), 3.0, 1.0)
    D, A = 0.8, 0.3
    expected = 0.0
    for z in range(7):
        p0 = 0.9 * (1 - A) * A**z
        p1 = 0.1 * ((1 - D) * (1 - A) * A**z + (D * (1 - A) * A ** (z - 1) if z >= 1 else 0.0))
        # estimate 0 costs 3 p1, estimate 1 costs p0
        expected += min(3 * p1, p0)
    for method in ("multiset", "joint", "chain"):
        assert abs(anticipated_risk(cell, one_env, 1, method=method) - expected) < 1e-15


def test_prior_risk_and_perfect_sensors(perfect):
    cell = CellModel((0.5, 0.3, 0.2), (0.4, 0.6))
    r0 = anticipated_risk(cell, perfect, 0)
    assert r0 == bayes_estimate(cell.prior_t, cell.c1, cell.c2)[1]
    assert anticipated_risk(cell, perfect, 1) < 1e-15
    assert abs(benefit(cell, perfect, 1) - r0) < 1e-15
    assert benefit(cell, perfect, 0) == 0.0


def test_capacity(one_env):
    cell = CellModel((0.9, 0.1), (1.0,))
    with pytest.raises(CapacityError):
        anticipated_risk(cell, one_env, 6, method="joint", budget=1000)
    with pytest.raises(DomainError):
        anticipated_risk(cell, one_env, 1, method="multiset", rule="literal")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_routes_agree_and_risk_decreases(seed):
    cell, s = random_cell_model(np.random.default_rng(seed), max_false_alarm=0.4)
    r = [anticipated_risk(cell, s, k) for k in range(4)]
    assert all(b <= a + 1e-10 for a, b in zip(r, r[1:]))
    for k in (1, 2):
        rj, mj = anticipated_risk(cell, s, k, method="joint", return_mass=True)
        rc, mc = anticipated_risk(cell, s, k, method="chain", return_mass=True)
        assert abs(rj - r[k]) < 1e-10 and abs(rc - r[k]) < 1e-10
        assert abs(mj - 1) < 1e-9 and abs(mc - 1) < 1e-9


def test_literal_chain_runs():
    cell = CellModel.poisson((0.2, 0.3, 0.5), 0.3)
    s = SensorModel().tightened(2)
    r = anticipated_risk(cell, s, 2, rule="literal")
    assert 0 <= r <= anticipated_risk(cell, s, 0)
    assert abs(sequence_probability_mass(cell, s, 2, rule="literal") - 1) < 1e-9


def test_map_loading_and_objective(write_json):
    obj = {"sensor": {"D": [0.8], "A": [0.3], "Pye": [[1.0]], "z_max": 6},
           "cells": [{"id": "r1c1", "prior_e": [1.0], "lambda_t": 0.2, "t_max": 2, "c1": 3, "c2": 1},
                     {"id": "r1c2", "prior_e": [1.0], "prior_t": [0.7, 0.2, 0.1]}]}
    grid = load_map(write_json("m.json", obj))
    assert grid.sensor.z_max >= 6 and grid.sensor.tail_mass(2).max() < 1e-9
    c = grid.cell("r1c1")
    assert np.allclose(c.prior_t, truncated_poisson(0.2, 2))
    p1, p2 = GroundElement("p1", 1, ("r1c1",)), GroundElement("p2", 2, ("r1c1", "r1c2"))
    assert joint_objective(grid, []) == 0.0
    assert joint_objective(grid, [p1]) == pytest.approx(benefit(c, grid.sensor, 1), abs=1e-15)
    both = joint_objective(grid, [p1, p2])
    direct = benefit(c, grid.sensor, 2) + benefit(grid.cell("r1c2"), grid.sensor, 1)
    assert abs(both - direct) < 1e-15
    assert joint_objective(grid, [p1, p2], k_cap=1) == pytest.approx(
        benefit(c, grid.sensor, 1) + benefit(grid.cell("r1c2"), grid.sensor, 1), abs=1e-15)
    o = bos_oracle(grid, [p1, p2])
    assert o.evaluate(["p1", "p2"]) == both
    with pytest.raises(DomainError):
        joint_objective(grid, [("nope",)])
    with pytest.raises(DomainError):
        load_map({"cells": [{"prior_e": [1.0]}]})


def test_grid_rejects_duplicates():
    c = CellModel((0.5, 0.5), (1 / 3, 1 / 3, 1 / 3), id="x")
    with pytest.raises(DomainError):
        GridMap([c, c])


def test_synthetic_table_structure():
    grid = synthetic_map()
    t = cell_curvature_table(grid, (1, 2, 3, 4), truncate=True)
    rows = {(r["id"], r["k"]): r for r in t.rows}
    assert all(r["alpha"] == 0 and r["beta"] == 0 for r in t.rows if r["k"] == 1)
    summ = {r["k"]: r for r in t.summary}
    assert summ[2]["max_beta"] == 0 and summ[3]["max_beta"] > 0
    assert t.truncated["alpha"] == 1.0
    assert t.to_csv().splitlines()[0] == "id,k,normalized_benefit,alpha,beta"
    assert all(0 < r["normalized_benefit"] <= 1 for r in t.rows)


def test_synthetic_table_matches_token_brute_force():
    grid = synthetic_map()
    t = cell_curvature_table(grid, (3,))
    for r in t.rows:
        F = grid.benefits(r["id"], 3)
        rep = curvatures(interchangeable_oracle(F, 3))
        assert abs(rep.alpha - r["alpha"]) < 1e-12 and abs(rep.beta - r["beta"]) < 1e-12
    with pytest.raises(DomainError):
        cell_curvature_table(grid, (7,))


def test_estimator():
    grid = synthetic_map()
    est = BenefitOfSearch(k_max=3).fit(grid)
    X = np.array([[0, 1, 2, 3], [3, 3, 0, 0]])
    out = est.transform(X)
    assert out[0, 0] == 0.0
    assert out[1, 0] == grid.benefit("r1c1", 3)
    assert BenefitOfSearch(k_max=3, k_cap=1).fit(grid).transform(X)[1, 0] == grid.benefit("r1c1", 1)
    with pytest.raises(DomainError):
        est.transform([[4, 0, 0, 0]])
