"""Sequential greedy planning over a partition matroid.

Agent ``i`` picks one element of its block given a context: every earlier
pick (full information) or only the picks of its in-neighbors (limited
information). The selection policy decides how close to the block maximum
each pick is; the trace records the realized ``eta``.
"""

import math
from dataclasses import asdict, dataclass, field

from sklearn.base import BaseEstimator

from .exceptions import DomainError
from .graphs import CommGraph, neighbor_context
from .matroid import PartitionMatroid
from .setfn import SetFunctionOracle, marginal
from .validation import check_scalar


@dataclass
class GreedyTrace:
    chosen: list
    contexts: list
    per_step_best: list
    per_step_chosen_marginal: list
    block_marginals: list
    value: float
    mode: str = "full"
    selector: str = "exact"
    step_eta: list = field(default_factory=list)

    @property
    def selection(self):
        return tuple(e for _, e in self.chosen)

    @property
    def eta_realized(self):
        return max(self.step_eta, default=1.0)

    @property
    def eta_infinite(self):
        return math.isinf(self.eta_realized)

    def to_dict(self):
        d = asdict(self)
        d["chosen"] = [[a, e] for a, e in self.chosen]
        d["contexts"] = [list(c) for c in self.contexts]
        eta = self.eta_realized
        d["eta_realized"] = "inf" if math.isinf(eta) else eta
        d["step_eta"] = ["inf" if math.isinf(v) else v for v in self.step_eta]
        return d


def step_eta(best, chosen):
    if chosen > 0:
        return max(best / chosen, 1.0)
    return 1.0 if best <= 0 else math.inf


def make_exact_selector():
    """Pick the block argmax; ties go to the lowest element id."""

    def exact(candidates):
        best = max(m for _, m in candidates)
        return min(e for e, m in candidates if m == best)

    exact.label = "exact"
    return exact


def make_epsilon_selector(eps):
    """Pick the *worst* element still within a factor ``1 + eps`` of the block maximum.

    Admissible means ``best / m <= 1 + eps`` (or every marginal is zero).
    Ties go to the lowest id. ``eps = 0`` behaves like the exact selector.
    """
    eps = check_scalar(eps, "eps", min_val=0.0)
    limit = 1.0 + eps

    def epsilon(candidates):
        best = max(m for _, m in candidates)
        if best <= 0:
            ok = [(m, e) for e, m in candidates if m == best]
        else:
            ok = [(m, e) for e, m in candidates if m > 0 and best / m <= limit]
        return min(ok)[1]

    epsilon.label = f"epsilon:{eps:g}"
    return epsilon


def make_selector(spec):
    """``"exact"``, ``"epsilon:0.25"``, a float ``eps`` or a callable."""
    if callable(spec):
        return spec
    if spec is None or spec == "exact":
        return make_exact_selector()
    if isinstance(spec, (int, float)):
        return make_epsilon_selector(spec)
    if isinstance(spec, str) and spec.startswith(("epsilon:", "eps:")):
        return make_epsilon_selector(float(spec.split(":", 1)[1]))
    raise DomainError(f"unknown selector {spec!r}")


def _run(oracle, m, context_of, selector, mode):
    selector = make_selector(selector)
    picks = {}
    chosen, contexts, bests, chosen_m, blocks, etas = [], [], [], [], [], []
    for i, block in enumerate(m.blocks, start=1):
        ctx = tuple(sorted(context_of(i, picks)))
        cands = [(e, marginal(oracle, [e], ctx)) for e in block]
        pick = selector(cands)
        lookup = dict(cands)
        if pick not in lookup:
            raise DomainError(f"selector returned {pick!r}, which is not in block {i}")
        best = max(lookup.values())
        picks[i] = pick
        chosen.append((i, pick))
        contexts.append(ctx)
        bests.append(best)
        chosen_m.append(lookup[pick])
        blocks.append(lookup)
        etas.append(step_eta(best, lookup[pick]))
    value = oracle.evaluate([e for _, e in chosen])
    return GreedyTrace(chosen, contexts, bests, chosen_m, blocks, value, mode,
                       getattr(selector, "label", getattr(selector, "__name__", "custom")), etas)


def greedy_full(oracle, m=None, selector=None):
    """Standard greedy: agent ``i`` conditions on all picks ``x_1..x_{i-1}``."""
    m = m if m is not None else PartitionMatroid.from_elements(oracle.elements)
    return _run(oracle, m, lambda i, picks: [picks[j] for j in range(1, i)], selector, "full")


def greedy_limited(oracle, m=None, g=None, selector=None):
    """Greedy where agent ``i`` only sees the picks of its in-neighbors ``N_i``."""
    m = m if m is not None else PartitionMatroid.from_elements(oracle.elements)
    if g is None:
        raise DomainError("limited-information greedy needs a communication graph")
    if g.n != m.n_agents:
        raise DomainError(f"graph has {g.n} agents but the matroid has {m.n_agents} blocks")
    return _run(oracle, m, lambda i, picks: neighbor_context(g, i, picks), selector, "limited")


class GreedyPlanner(BaseEstimator):
    """Estimator-style greedy planner.

    ``fit(oracle)`` runs the planner over the partition matroid implied by the
    elements' ``block`` fields and stores ``trace_``, ``selection_``,
    ``value_`` and ``eta_``.

    Parameters
    ----------
    selector : "exact", "epsilon:<eps>", float or callable
    mode : "full" or "limited"
    graph : CommGraph, required when ``mode="limited"``
    order : optional permutation of block numbers giving the planning order
    """

    def __init__(self, selector="exact", mode="full", graph=None, order=None):
        self.selector = selector
        self.mode = mode
        self.graph = graph
        self.order = order

    def fit(self, oracle, y=None):
        if not isinstance(oracle, SetFunctionOracle):
            raise DomainError(f"expected a SetFunctionOracle, got {type(oracle).__name__}")
        m = PartitionMatroid.from_elements(oracle.elements, order=self.order)
        if self.mode == "full":
            trace = greedy_full(oracle, m, self.selector)
        elif self.mode == "limited":
            if not isinstance(self.graph, CommGraph):
                raise DomainError("mode='limited' needs graph=CommGraph(...)")
            trace = greedy_limited(oracle, m, self.graph, self.selector)
        else:
            raise DomainError(f"mode must be 'full' or 'limited', got {self.mode!r}")
        self.matroid_ = m
        self.trace_ = trace
        self.selection_ = trace.selection
        self.value_ = trace.value
        self.eta_ = trace.eta_realized
        return self

    def predict(self, oracle=None):
        """The joint plan found by ``fit``."""
        return self.selection_
