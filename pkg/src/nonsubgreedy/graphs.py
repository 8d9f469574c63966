"""Communication graphs for limited-information greedy.

Agent ``i`` sees the picks of its in-neighbors ``N_i``, a subset of
``{1..i-1}``. Clique covers are computed on the undirected graph underlying
that DAG: a clique there is a set of agents that all see each other's
earlier picks.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import CapacityError, DomainError
from .lp import LP_TOL, simplex, vertex_enumeration

GRAPH_BUDGET = 20


@dataclass(frozen=True)
class CommGraph:
    """Agents ``1..n`` with in-neighbor sets ``in_neighbors[i]`` (only indices ``< i``)."""

    n: int
    in_neighbors: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"need at least one agent, got n={self.n}")
        nb = {}
        for i in range(1, self.n + 1):
            ns = frozenset(int(j) for j in self.in_neighbors.get(i, ()))
            bad = [j for j in ns if not 1 <= j < i]
            if bad:
                raise DomainError(f"N_{i} may only hold agents 1..{i - 1}; got {sorted(bad)}")
            nb[i] = ns
        extra = set(self.in_neighbors) - set(nb)
        if extra:
            raise DomainError(f"in_neighbors names unknown agents {sorted(extra)}")
        object.__setattr__(self, "in_neighbors", nb)

    @classmethod
    def complete(cls, n):
        return cls(n, {i: range(1, i) for i in range(1, n + 1)})

    @classmethod
    def empty(cls, n):
        return cls(n, {})

    @classmethod
    def from_undirected(cls, n, edges):
        nb = {i: set() for i in range(1, n + 1)}
        for a, b in edges:
            if a == b:
                raise DomainError(f"self-loop on agent {a}")
            lo, hi = sorted((int(a), int(b)))
            nb[hi].add(lo)
        return cls(n, nb)

    @classmethod
    def random(cls, n, p, rng):
        """Each pair ``j < i`` is linked independently with probability ``p``."""
        return cls(n, {i: [j for j in range(1, i) if rng.random() < p] for i in range(1, n + 1)})

    def edges(self):
        return sorted((j, i) for i, ns in self.in_neighbors.items() for j in ns)

    def adjacency(self):
        """Undirected closure as ``{agent: set(neighbors)}``."""
        adj = {i: set() for i in range(1, self.n + 1)}
        for j, i in self.edges():
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def is_complete(self):
        return all(self.in_neighbors[i] == frozenset(range(1, i)) for i in range(1, self.n + 1))

    def without_edge(self, j, i):
        lo, hi = sorted((j, i))
        nb = {k: set(v) for k, v in self.in_neighbors.items()}
        nb[hi].discard(lo)
        return CommGraph(self.n, nb)

    def to_dict(self):
        return {"n": self.n, "in_neighbors": {str(i): sorted(ns) for i, ns in self.in_neighbors.items() if i > 1}}


def load_graph(path_or_obj):
    """Read ``{"n": 4, "in_neighbors": {"2": [1], "3": [1, 2], "4": []}}``."""
    if isinstance(path_or_obj, (str, Path)):
        with open(path_or_obj) as fh:
            obj = json.load(fh)
    else:
        obj = path_or_obj
    try:
        n = int(obj["n"])
        nb = {int(k): [int(j) for j in v] for k, v in obj.get("in_neighbors", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"bad graph JSON: {exc}") from exc
    return CommGraph(n, nb)


def enumerate_cliques(g, budget=GRAPH_BUDGET):
    """All maximal cliques of the undirected closure (Bron-Kerbosch with pivoting).

    Cliques come back as sorted tuples, ordered lexicographically.
    """
    if g.n > budget:
        raise CapacityError(f"n={g.n} exceeds the clique-enumeration budget {budget}")
    adj = g.adjacency()
    out = []

    def expand(R, P, X):
        if not P and not X:
            out.append(tuple(sorted(R)))
            return
        pivot = max(P | X, key=lambda u: len(adj[u] & P))
        for v in sorted(P - adj[pivot]):
            expand(R | {v}, P & adj[v], X & adj[v])
            P = P - {v}
            X = X | {v}

    expand(set(), set(adj), set())
    return sorted(out)


@dataclass
class CliqueCoverSolution:
    cliques: list
    weights: np.ndarray
    objective: float

    def coverage(self, n):
        cov = np.zeros(n)
        for c, y in zip(self.cliques, self.weights):
            for i in c:
                cov[i - 1] += y
        return cov

    def to_dict(self):
        return {"kstar": self.objective,
                "cliques": [list(c) for c in self.cliques],
                "weights": [float(w) for w in self.weights]}


def cover_matrix(cliques, n):
    C = np.zeros((n, len(cliques)))
    for k, c in enumerate(cliques):
        for i in c:
            C[i - 1, k] = 1.0
    return C


def fractional_clique_cover(g, cliques=None, *, tol=LP_TOL):
    """Fractional clique cover number ``k*(G)``.

    Solves ``min sum y_c`` s.t. every agent is covered with total weight at
    least 1, ``y >= 0``, over the maximal cliques. Restricting to maximal
    cliques loses nothing: weight on a clique can move to any superset.
    """
    if cliques is None:
        cliques = enumerate_cliques(g)
    C = cover_matrix(cliques, g.n)
    res = simplex(np.ones(len(cliques)), A_ge=C, b_ge=np.ones(g.n), tol=tol)
    if res.status != "optimal":
        raise RuntimeError(f"clique-cover LP ended with status {res.status}")
    return CliqueCoverSolution(list(cliques), res.x, float(res.x.sum()))


def fractional_clique_cover_naive(g, cliques=None):
    """Same LP solved by brute-force vertex enumeration (cross-check only)."""
    if cliques is None:
        cliques = enumerate_cliques(g)
    C = cover_matrix(cliques, g.n)
    k = len(cliques)
    G = np.vstack([C, np.eye(k)])
    h = np.concatenate([np.ones(g.n), np.zeros(k)])
    res = vertex_enumeration(np.ones(k), G, h)
    return CliqueCoverSolution(list(cliques), res.x, res.objective)


def neighbor_context(g, i, x):
    """Picks visible to agent ``i``: ``{x_j : j in N_i}``.

    ``x`` maps agent index to its pick (a dict) or is a sequence whose
    ``j-1``-th entry is agent ``j``'s pick.
    """
    if not 1 <= i <= g.n:
        raise DomainError(f"agent {i} is outside 1..{g.n}")
    picks = x if isinstance(x, dict) else {j + 1: v for j, v in enumerate(x)}
    missing = [j for j in range(1, i) if j not in picks]
    if missing:
        raise DomainError(f"agent {i} needs predecessor picks; missing {missing}")
    return {picks[j] for j in sorted(g.in_neighbors[i])}
