"""Closed-form greedy guarantees, brute-force optima and bound certificates."""

import math
from dataclasses import asdict, dataclass, field

from .curvature import curvatures
from .exceptions import DegenerateBoundError, DomainError, UncertifiableError
from .graphs import CommGraph, fractional_clique_cover
from .greedy import greedy_full, greedy_limited, make_selector
from .matroid import MAXIMAL_BUDGET, PartitionMatroid
from .setfn import marginal, require_normalized_monotone
from .validation import check_scalar

HOLD_ATOL = 1e-9


def _check_inputs(alpha, beta, eta):
    alpha = check_scalar(alpha, "alpha", min_val=0.0, max_val=1.0)
    beta = check_scalar(beta, "beta", min_val=0.0, max_val=1.0)
    eta = check_scalar(eta, "eta", min_val=1.0)
    if beta == 1.0:
        raise DegenerateBoundError("beta = 1 makes the guarantee 0")
    return alpha, beta, eta


def bound_t1(alpha, beta, eta=1.0):
    """Full-information guarantee ``(1 - beta) / (eta + (1 - beta) alpha)``."""
    alpha, beta, eta = _check_inputs(alpha, beta, eta)
    return (1.0 - beta) / (eta + (1.0 - beta) * alpha)


def bound_t2(alpha, beta, eta, kstar):
    """Limited-information guarantee.

    ``(1-beta)^2 / ((1-beta)^2 + (alpha + eta - 1 + beta - alpha beta) k*)``
    with ``k*`` the fractional clique cover number of the communication graph.
    """
    alpha, beta, eta = _check_inputs(alpha, beta, eta)
    kstar = check_scalar(kstar, "kstar", min_val=1.0)
    q = (1.0 - beta) ** 2
    return q / (q + (alpha + eta - 1.0 + beta - alpha * beta) * kstar)


def brute_force_optimum(oracle, m=None, budget=MAXIMAL_BUDGET):
    """Best maximal independent set by exhaustive search.

    Returns ``(ids in block order, value)``; the first maximum in
    lexicographic order of the block-ordered id tuples wins ties.
    """
    m = m if m is not None else PartitionMatroid.from_elements(oracle.elements)
    best, best_val = None, -math.inf
    f = oracle.table() if len(oracle) <= 20 else None
    for combo in m.enumerate_maximal(budget):
        val = f[oracle.mask_of(combo)] if f is not None else oracle.evaluate(combo)
        if val > best_val:
            best, best_val = combo, float(val)
    return tuple(best), best_val


@dataclass
class BoundCertificate:
    theorem: str
    alpha: float
    beta: float
    eta: float
    bound: float
    f_greedy: float
    f_opt: float
    ratio: float
    holds: bool
    kstar: float = None
    eta_measured: float = 1.0
    eta_declared: float = None
    vacuous: bool = False
    optimum: tuple = ()
    selection: tuple = ()
    trace: dict = field(default_factory=dict)
    curvature: dict = field(default_factory=dict)
    chain: dict = field(default_factory=dict)

    def verdict(self):
        tag = "VACUOUS" if self.vacuous else ("HOLDS" if self.holds else "FAILS")
        return f"{tag} ratio={self.ratio:.6g} bound={self.bound:.6g}"

    def to_dict(self):
        return asdict(self)


def proof_chain(oracle, x, xstar, alpha, beta, eta):
    """Evaluate each link of the full-information proof chain on a concrete pair.

    ``x`` is the greedy plan and ``xstar`` an optimum, both in block order.
    Returns the two sides of every link; ``final`` is the closing inequality
    ``(1-beta) f(x*) <= eta f(x) + (1-beta) alpha f(x)``. Intermediate links
    are diagnostics: they can be loose or even fail when ``x`` and ``xstar``
    share elements, while ``final`` still holds.
    """
    fx, fopt = oracle.evaluate(x), oracle.evaluate(xstar)
    gains_opt = [marginal(oracle, [v], list(xstar[:i]) + list(x)) for i, v in enumerate(xstar)]
    gains_x = [marginal(oracle, [v], x[:i]) for i, v in enumerate(x)]
    opt_on_prefix = [marginal(oracle, [v], x[:i]) for i, v in enumerate(xstar)]
    links = {
        "curvature_step": (fopt, sum(gains_opt) + alpha * sum(gains_x)),
        "inverse_step": ((1 - beta) * sum(gains_opt), sum(opt_on_prefix)),
        "eta_step": (sum(opt_on_prefix), eta * sum(gains_x)),
        "final": ((1 - beta) * fopt, eta * fx + (1 - beta) * alpha * fx),
    }
    return {k: {"lhs": a, "rhs": b, "holds": a <= b + HOLD_ATOL} for k, (a, b) in links.items()}


def certify(oracle, m=None, mode="full", g=None, selector=None, declared_eta=None,
            curvature_report=None, kstar=None, validate=True):
    """Run greedy, measure the curvature quantities and compare with the guarantee.

    ``eta`` in the bound is ``max(measured, declared)``. An infinite measured
    ``eta`` raises ``UncertifiableError``; ``beta = 1`` yields a certificate
    flagged ``vacuous`` with bound 0.
    """
    if validate:
        require_normalized_monotone(oracle)
    m = m if m is not None else PartitionMatroid.from_elements(oracle.elements)
    if declared_eta is not None:
        declared_eta = check_scalar(declared_eta, "declared_eta", min_val=1.0)
    sel = make_selector(selector)
    if mode == "full":
        trace = greedy_full(oracle, m, sel)
    elif mode == "limited":
        if not isinstance(g, CommGraph):
            raise DomainError("limited mode needs a CommGraph")
        trace = greedy_limited(oracle, m, g, sel)
    else:
        raise DomainError(f"mode must be 'full' or 'limited', got {mode!r}")
    measured = trace.eta_realized
    if math.isinf(measured):
        raise UncertifiableError("a greedy step picked a zero-gain element while a positive gain was available")
    eta = max(measured, declared_eta or 1.0)
    rep = curvature_report if curvature_report is not None else curvatures(oracle, validate=False)
    if mode == "limited" and kstar is None:
        kstar = fractional_clique_cover(g).objective
    xstar, f_opt = brute_force_optimum(oracle, m)
    f_x = trace.value
    ratio = 1.0 if f_opt <= 0 else f_x / f_opt
    vacuous = rep.beta >= 1.0
    if vacuous:
        bound = 0.0
    elif mode == "full":
        bound = bound_t1(rep.alpha, rep.beta, eta)
    else:
        bound = bound_t2(rep.alpha, rep.beta, eta, kstar)
    chain = proof_chain(oracle, trace.selection, xstar, rep.alpha, rep.beta, eta) if mode == "full" else {}
    return BoundCertificate(
        theorem="T1" if mode == "full" else "T2",
        alpha=rep.alpha, beta=rep.beta, eta=eta, bound=bound,
        f_greedy=f_x, f_opt=f_opt, ratio=ratio,
        holds=ratio >= bound - HOLD_ATOL,
        kstar=kstar, eta_measured=measured, eta_declared=declared_eta, vacuous=vacuous,
        optimum=xstar, selection=trace.selection, trace=trace.to_dict(),
        curvature=rep.to_dict(), chain=chain,
    )
