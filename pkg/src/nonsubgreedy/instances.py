"""Seeded random instances and the randomized certification suites."""

import time
from dataclasses import dataclass, field

import numpy as np

from .bounds import certify
from .curvature import curvatures
from .exceptions import DomainError
from .graphs import CommGraph, fractional_clique_cover
from .matroid import PartitionMatroid
from .setfn import GroundElement, TabularOracle

FAMILIES = ("increment", "coverage", "supermodular", "mixed", "modular")
SUITE_SELECTORS = ("exact", 0.1, 0.25, 0.5)

_STREAMS = {"instance": 1, "graph": 2, "matroid": 3, "misc": 4}


def rng_for(seed, stream, index=0):
    """Counter-based generator: one independent Philox stream per (seed, stream, index)."""
    sid = _STREAMS[stream] if isinstance(stream, str) else int(stream)
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, sid, int(index)]))


def block_elements(block_sizes):
    return [GroundElement(f"b{b}e{j}", b) for b, size in enumerate(block_sizes, start=1) for j in range(size)]


def _masks_sizes(n):
    masks = np.arange(1 << n)
    sizes = np.zeros(1 << n, dtype=int)
    for i in range(n):
        sizes += masks >> i & 1
    return masks, sizes


def random_table(n, family, rng):
    """Bitmask-indexed values of a normalized monotone set function on ``n`` elements."""
    masks, sizes = _masks_sizes(n)
    if family == "modular":
        w = rng.uniform(0.0, 1.0, n)
        return np.array([w[[i for i in range(n) if m >> i & 1]].sum() for m in masks])
    if family == "coverage":
        universe = int(rng.integers(3, 9))
        weights = rng.uniform(0.2, 1.0, universe)
        covers = [rng.random(universe) < rng.uniform(0.2, 0.6) for _ in range(n)]
        out = np.zeros(1 << n)
        for m in masks[1:]:
            cov = np.zeros(universe, dtype=bool)
            for i in range(n):
                if m >> i & 1:
                    cov |= covers[i]
            out[m] = weights[cov].sum()
        return out
    if family == "supermodular":
        single = rng.uniform(0.0, 1.0, n)
        pair = rng.uniform(0.0, 1.0, (n, n)) * (rng.random((n, n)) < 0.4)
        out = np.zeros(1 << n)
        for m in masks[1:]:
            idx = [i for i in range(n) if m >> i & 1]
            out[m] = single[idx].sum() + np.triu(pair[np.ix_(idx, idx)], 1).sum()
        return out
    if family == "mixed":
        a = random_table(n, "coverage", rng)
        b = random_table(n, "supermodular", rng)
        return a + rng.uniform(0.1, 1.0) * b
    if family == "increment":
        # f(S) = max over one-smaller subsets + non-negative jump: monotone, usually neither sub- nor supermodular
        out = np.zeros(1 << n)
        order = np.argsort(sizes, kind="stable")
        scale = rng.uniform(0.2, 2.0)
        # occasional zero jumps exercise the beta = 1 (vacuous) path
        zero_p = rng.uniform(0.0, 0.4) if rng.random() < 0.15 else 0.0
        for m in order[1:]:
            prev = max(out[m & ~(1 << i)] for i in range(n) if m >> i & 1)
            jump = 0.0 if rng.random() < zero_p else rng.exponential(scale)
            out[m] = prev + jump
        return out
    raise DomainError(f"unknown family {family!r}")


def random_instance(rng, *, max_agents=4, max_block=3, family=None, n_agents=None):
    """Random normalized monotone tabular oracle with block structure."""
    n_agents = int(rng.integers(1, max_agents + 1)) if n_agents is None else n_agents
    sizes = [int(rng.integers(1, max_block + 1)) for _ in range(n_agents)]
    family = family or FAMILIES[int(rng.integers(len(FAMILIES)))]
    els = block_elements(sizes)
    vals = random_table(len(els), family, rng)
    return TabularOracle.from_table(els, vals, name=family)


def random_partition_matroid(rng, max_ground=12):
    n = int(rng.integers(1, max_ground + 1))
    n_blocks = int(rng.integers(1, n + 1))
    labels = np.concatenate([np.arange(n_blocks), rng.integers(0, n_blocks, n - n_blocks)])
    rng.shuffle(labels)
    blocks = [[f"e{i:02d}" for i in range(n) if labels[i] == b] for b in range(n_blocks)]
    return PartitionMatroid(tuple(blocks))


@dataclass
class SuiteResult:
    theorem: str
    seed: int
    n_instances: int
    n_certificates: int = 0
    n_holds: int = 0
    n_vacuous: int = 0
    min_slack: float = np.inf
    failures: list = field(default_factory=list)
    families: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def all_hold(self):
        return self.n_certificates > 0 and self.n_holds == self.n_certificates

    def summary(self):
        tag = "HOLDS" if self.all_hold else "FAILS"
        return (f"{tag} suite={self.theorem} seed={self.seed} instances={self.n_instances} "
                f"certificates={self.n_holds}/{self.n_certificates} vacuous={self.n_vacuous} "
                f"min_slack={self.min_slack:.3g} time={self.seconds:.1f}s")

    def to_dict(self):
        d = dict(self.__dict__)
        d["all_hold"] = self.all_hold
        return d


def _record(res, cert, family, label):
    res.n_certificates += 1
    res.n_vacuous += int(cert.vacuous)
    res.families[family] = res.families.get(family, 0) + 1
    if cert.holds:
        res.n_holds += 1
    else:
        res.failures.append({"family": family, "selector": label, **cert.to_dict()})
    if not cert.vacuous:
        res.min_slack = min(res.min_slack, cert.ratio - cert.bound)


def run_t1_suite(n_instances=1000, seed=7, selectors=SUITE_SELECTORS, max_agents=4, max_block=3):
    """Certify the full-information guarantee on seeded random instances."""
    t0 = time.perf_counter()
    res = SuiteResult("t1", seed, n_instances)
    for idx in range(n_instances):
        oracle = random_instance(rng_for(seed, "instance", idx), max_agents=max_agents, max_block=max_block)
        rep = curvatures(oracle)
        for sel in selectors:
            cert = certify(oracle, mode="full", selector=sel, curvature_report=rep, validate=False)
            _record(res, cert, oracle.name, str(sel))
    res.seconds = time.perf_counter() - t0
    return res


def run_t2_suite(n_graphs=200, per_graph=5, seed=7, selectors=SUITE_SELECTORS, max_agents=4, max_block=3):
    """Certify the limited-information guarantee: random DAGs, each with several instances."""
    t0 = time.perf_counter()
    res = SuiteResult("t2", seed, n_graphs * per_graph)
    for gi in range(n_graphs):
        grng = rng_for(seed, "graph", gi)
        n = int(grng.integers(1, max_agents + 1))
        g = CommGraph.random(n, float(grng.uniform(0.0, 1.0)), grng)
        kstar = fractional_clique_cover(g).objective
        for j in range(per_graph):
            irng = rng_for(seed, "instance", gi * per_graph + j)
            oracle = random_instance(irng, max_block=max_block, n_agents=n)
            rep = curvatures(oracle)
            for sel in selectors:
                cert = certify(oracle, mode="limited", g=g, selector=sel, curvature_report=rep,
                               kstar=kstar, validate=False)
                _record(res, cert, oracle.name, str(sel))
    res.seconds = time.perf_counter() - t0
    return res


def random_cell_model(rng, *, n_env=None, t_max=None, max_false_alarm=0.6, z_max=12):
    """Random valid sensor and cell priors for benefit-of-search property checks."""
    from .bos import CellModel, SensorModel

    n_env = int(rng.integers(1, 4)) if n_env is None else n_env
    t_max = int(rng.integers(1, 4)) if t_max is None else t_max
    D = rng.uniform(0.0, 1.0, n_env)
    A = rng.uniform(0.0, max_false_alarm, n_env)
    Pye = rng.dirichlet(np.ones(n_env), size=n_env)
    sensor = SensorModel(tuple(D), tuple(A), tuple(map(tuple, Pye)), z_max).tightened(t_max)
    cell = CellModel(tuple(rng.dirichlet(np.ones(t_max + 1))), tuple(rng.dirichlet(np.ones(n_env))),
                     float(rng.uniform(0.5, 4.0)), float(rng.uniform(0.5, 4.0)))
    return cell, sensor
