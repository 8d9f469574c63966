"""Acceptance criteria 1-8; each test prints one PASS/FAIL line.

Run alone with ``python3 tests/test_acceptance.py`` or through pytest.
"""

import itertools
import sys
import time

import numpy as np
import pytest

from nonsubgreedy.bos import (CellModel, SensorModel, anticipated_risk, benefit, cell_curvature_table,
                              synthetic_map)
from nonsubgreedy.bounds import bound_t1, bound_t2
from nonsubgreedy.curvature import (curvatures, interchangeable_cell_curvature, interchangeable_oracle,
                                    total_curvature)
from nonsubgreedy.exceptions import DomainError
from nonsubgreedy.graphs import (CommGraph, fractional_clique_cover, fractional_clique_cover_naive)
from nonsubgreedy.greedy import greedy_full, greedy_limited
from nonsubgreedy.instances import (block_elements, random_cell_model, random_instance, random_partition_matroid,
                                    random_table, rng_for, run_t1_suite, run_t2_suite)
from nonsubgreedy.matroid import PartitionMatroid, matroid_axiom_check
from nonsubgreedy.setfn import TabularOracle, check_submodular, exchange_identity_residual, telescope_check

SEED = 7


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail, seconds):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'} ({seconds:.1f}s) {detail}")
    return _report


def test_criterion_1_formula_fidelity(report):
    t0 = time.perf_counter()
    worked = bound_t1(1, 0.6564, 1.25)
    checks = [abs(worked - 0.2156) <= 1e-4, bound_t1(1, 0, 1) == 0.5, bound_t1(0, 0, 1) == 1.0]
    checks += [bound_t2(1, 0, 1, k) == 1 / (1 + k) for k in (1, 2, 3)]
    ok = all(checks)
    report(1, ok, f"bound_t1(1,0.6564,1.25)={worked:.6f}; closed forms exact={all(checks[1:])}",
           time.perf_counter() - t0)
    assert ok


def test_criterion_2_full_information_suite(report):
    res = run_t1_suite(n_instances=1000, seed=SEED)
    ok = res.all_hold and res.n_certificates == 4000 and res.seconds < 60
    report(2, ok, res.summary(), res.seconds)
    assert ok, res.failures[:3]


def test_criterion_3_limited_information_suite(report):
    t0 = time.perf_counter()
    res = run_t2_suite(n_graphs=200, per_graph=5, seed=SEED)
    same_trace = True
    for i in range(100):
        o = random_instance(rng_for(SEED, "misc", i))
        m = PartitionMatroid.from_elements(o.elements)
        a, b = greedy_full(o, m), greedy_limited(o, m, CommGraph.complete(m.n_agents))
        same_trace &= a.chosen == b.chosen and a.contexts == b.contexts and a.value == b.value
    kstar_ok = all(abs(fractional_clique_cover(CommGraph.complete(n)).objective - 1) < 1e-12 and
                   abs(fractional_clique_cover(CommGraph.empty(n)).objective - n) < 1e-12 for n in range(1, 9))
    secs = time.perf_counter() - t0
    ok = res.all_hold and same_trace and kstar_ok and secs < 60
    report(3, ok, f"{res.summary()}; complete==full {same_trace}; k* complete/empty {kstar_ok}", secs)
    assert ok, res.failures[:3]


def test_criterion_4_lp_correctness(report):
    t0 = time.perf_counter()
    c5 = CommGraph.from_undirected(5, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)])
    k5 = fractional_clique_cover(c5).objective
    rng = rng_for(SEED, "graph", 10**6)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 8))
        g = CommGraph.random(n, float(rng.uniform(0, 1)), rng)
        worst = max(worst, abs(fractional_clique_cover(g).objective - fractional_clique_cover_naive(g).objective))
    secs = time.perf_counter() - t0
    ok = abs(k5 - 2.5) <= 1e-9 and worst <= 1e-9 and secs < 10
    report(4, ok, f"k*(C5)={k5:.12g}; simplex vs vertex enumeration max diff={worst:.2e} over 50 graphs", secs)
    assert ok


def test_criterion_5_curvature_correctness(report):
    t0 = time.perf_counter()
    rng = rng_for(SEED, "misc", 5)
    n_sub = alpha_viol = 0
    for i in range(150):
        n = int(rng.integers(1, 9))
        o = TabularOracle.from_table(block_elements([1] * n), random_table(n, "coverage", rng))
        if not check_submodular(o):
            continue
        try:
            ac = total_curvature(o)
        except DomainError:
            continue
        n_sub += 1
        alpha_viol += curvatures(o).alpha > ac + 1e-12
    iff_bad = 0
    for i in range(200):
        fam = ("increment", "coverage", "supermodular", "mixed", "modular")[i % 5]
        n = int(rng.integers(1, 7))
        o = TabularOracle.from_table(block_elements([1] * n), random_table(n, fam, rng))
        iff_bad += (curvatures(o).beta == 0) != bool(check_submodular(o, atol=0.0))
    worst = 0.0
    for i in range(200):
        k = int(rng.integers(1, 7))
        g = rng.uniform(0, 1, k) * (rng.random(k) > 0.1)
        F = np.concatenate([[0.0], np.cumsum(g)])
        rep = curvatures(interchangeable_oracle(F, k))
        a, b = interchangeable_cell_curvature(g, k)
        worst = max(worst, abs(a - rep.alpha), abs(b - rep.beta))
    secs = time.perf_counter() - t0
    ok = n_sub > 50 and alpha_viol == 0 and iff_bad == 0 and worst <= 1e-12 and secs < 120
    report(5, ok, f"alpha<=alpha_c on {n_sub} submodular instances (violations {alpha_viol}); "
                  f"beta=0 iff submodular mismatches {iff_bad}/200; fast path vs tokens max diff {worst:.1e}", secs)
    assert ok


def test_criterion_6_benefit_of_search(report):
    t0 = time.perf_counter()
    # the defining parameters with the default z_max, tightened per model
    sensor = SensorModel(z_max=12).tightened(2)
    cells = [CellModel.poisson(pe, lam) for lam, pe in
             [(0.2, (1 / 3, 1 / 3, 1 / 3)), (0.1, (0.8, 0.1, 0.1)), (0.5, (0.2, 0.5, 0.3))]]
    f0_exact = all(benefit(c, sensor, 0) == 0.0 for c in cells)
    worst_norm = worst_route = 0.0
    for c in cells:
        for k in (1, 2, 3):
            r_ms = anticipated_risk(c, sensor, k)
            r_j, m_j = anticipated_risk(c, sensor, k, method="joint", return_mass=True)
            r_c, m_c = anticipated_risk(c, sensor, k, method="chain", return_mass=True)
            worst_norm = max(worst_norm, abs(m_j - 1), abs(m_c - 1))
            worst_route = max(worst_route, abs(r_j - r_c), abs(r_ms - r_c))
    worst_rise = -np.inf
    for i in range(200):
        cell, s = random_cell_model(rng_for(SEED, "misc", 10**5 + i))
        r = [anticipated_risk(cell, s, k) for k in range(5)]
        worst_rise = max(worst_rise, max(np.diff(r)))
    secs = time.perf_counter() - t0
    ok = f0_exact and worst_rise <= 1e-10 and worst_norm <= 1e-9 and worst_route <= 1e-10 and secs < 300
    report(6, ok, f"f(0)==0 {f0_exact}; max r(k)-r(k-1)={worst_rise:.1e} over 200 models; "
                  f"mass error {worst_norm:.1e}; chain vs joint {worst_route:.1e}; z_max 12->{sensor.z_max}", secs)
    assert ok


def test_criterion_7_table_methodology(report):
    t0 = time.perf_counter()
    grid = synthetic_map()
    table = cell_curvature_table(grid, (1, 2, 3, 4), truncate=True)
    k1_zero = all(r["alpha"] == 0 and r["beta"] == 0 for r in table.rows if r["k"] == 1)
    beta_by_3 = any(r["beta"] > 0 for r in table.rows if r["k"] <= 3)
    first_k = min((r["k"] for r in table.rows if r["beta"] > 0), default=None)
    trunc_alpha = table.truncated["alpha"]
    secs = time.perf_counter() - t0
    ok = k1_zero and beta_by_3 and trunc_alpha == 1.0
    report(7, ok, f"k=1 alpha=beta=0 {k1_zero}; beta first positive at k={first_k}; "
                  f"truncated global alpha={trunc_alpha}", secs)
    assert ok


def test_criterion_8_algebraic_identities(report):
    t0 = time.perf_counter()
    worst_tel = worst_ex = 0.0
    n_orders = n_pairs = 0
    for i in range(40):
        o = random_instance(rng_for(SEED, "misc", 2 * 10**5 + i), max_agents=3, max_block=2)
        for perm in itertools.permutations(o.ids):
            worst_tel = max(worst_tel, telescope_check(o, perm))
            n_orders += 1
        m = PartitionMatroid.from_elements(o.elements)
        maximal = list(m.enumerate_maximal())
        for x, xs in itertools.product(maximal, repeat=2):
            worst_ex = max(worst_ex, exchange_identity_residual(o, x, xs, m))
            n_pairs += 1
    axioms = all(matroid_axiom_check(random_partition_matroid(rng_for(SEED, "matroid", i))) for i in range(100))
    secs = time.perf_counter() - t0
    ok = worst_tel < 1e-12 and worst_ex < 1e-12 and axioms
    report(8, ok, f"telescoping max {worst_tel:.1e} over {n_orders} orders; exchange max {worst_ex:.1e} over "
                  f"{n_pairs} pairs; axioms on 100 matroids {axioms}", secs)
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
