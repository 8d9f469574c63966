"""Benefit of search: Bayes risk reduction from repeated noisy looks at a cell.

Each cell hides ``t`` targets (prior ``P(t)``) in environment ``e`` (prior
``P(e)``, independent of ``t``). One visit returns a target count ``z`` with
likelihood ``P(z|t,e)`` (binomial detections plus geometric false alarms)
and an environment reading ``y`` with confusion ``P(y|e)``. The benefit of
``k`` visits is ``r(0) - r(k)``: the drop in expected asymmetric-linear
estimation loss.

Belief updates default to the exact joint posterior over ``(t, e)``. The
``"literal"`` rule keeps the product form ``P(t|.) P(e|.)``, with ``P(e|.)``
driven by ``y`` alone and ``P(t|.)`` mixed over ``P(t|z,e)``. The two
rules coincide with a single environment type.
"""

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .curvature import interchangeable_cell_curvature
from .exceptions import CapacityError, DegenerateEvidenceError, DomainError
from .setfn import GroundElement, SetFunctionOracle
from .validation import check_probability_vector, check_row_stochastic, check_scalar, check_unit_interval

DEFAULT_D = (0.65, 0.8, 0.95)
DEFAULT_A = (0.4, 0.3, 0.05)
DEFAULT_PYE = ((0.82, 0.09, 0.09), (0.08, 0.84, 0.08), (0.06, 0.06, 0.88))
DEFAULT_Z_MAX = 12
DEFAULT_TAIL_TOL = 1e-10
DEFAULT_LAMBDA = 0.2
DEFAULT_T_MAX = 2
DEFAULT_C1 = 3.0
DEFAULT_C2 = 1.0
Z_MAX_CAP = 2000
SEQUENCE_BUDGET = 5 * 10**7
CHUNK = 200_000
RULES = ("exact", "literal")


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SensorModel:
    """Shared sensor: detection ``D[e]``, false-alarm parameter ``A[e]``, confusion ``Pye[e][y]``.

    Measurements are enumerated over ``z = 0..z_max``; see :meth:`tightened`.
    """

    D: tuple = DEFAULT_D
    A: tuple = DEFAULT_A
    Pye: tuple = DEFAULT_PYE
    z_max: int = DEFAULT_Z_MAX

    def __post_init__(self):
        D = check_unit_interval(self.D, "D")
        A = check_unit_interval(self.A, "A", open_right=True)
        P = check_row_stochastic(self.Pye, "Pye")
        if not (D.ndim == A.ndim == 1 and D.size == A.size == P.shape[0]):
            raise DomainError(f"D, A and Pye disagree on the number of environment types: {D.size}, {A.size}, {P.shape}")
        z = int(self.z_max)
        if z < 0:
            raise DomainError(f"z_max must be >= 0, got {self.z_max}")
        object.__setattr__(self, "D", tuple(D.tolist()))
        object.__setattr__(self, "A", tuple(A.tolist()))
        object.__setattr__(self, "Pye", tuple(tuple(r) for r in P.tolist()))
        object.__setattr__(self, "z_max", z)

    @property
    def n_env(self):
        return len(self.D)

    @property
    def pye(self):
        return np.array(self.Pye)

    def likelihood_table(self, t_max, z_max=None):
        """``P[z, t, e]`` for ``z <= z_max``, ``t <= t_max``."""
        z_max = self.z_max if z_max is None else z_max
        D = np.array(self.D)
        A = np.array(self.A)
        out = np.zeros((z_max + 1, t_max + 1, self.n_env))
        for t in range(t_max + 1):
            for k in range(t + 1):
                det = math.comb(t, k) * D**k * (1.0 - D) ** (t - k)
                for z in range(k, z_max + 1):
                    out[z, t] += det * (1.0 - A) * A ** (z - k)
        return out

    def tail_mass(self, t_max, z_max=None):
        """Probability ``P(z > z_max | t, e)`` lost to truncation, shape ``(t_max+1, n_env)``."""
        P = self.likelihood_table(t_max, z_max)
        return np.maximum(1.0 - P.sum(axis=0), 0.0)

    def tightened(self, t_max, tol=DEFAULT_TAIL_TOL):
        """Copy with ``z_max`` raised until every truncated tail is below ``tol``."""
        z = self.z_max
        while self.tail_mass(t_max, z).max() >= tol:
            z += max(1, z // 4)
            if z > Z_MAX_CAP:
                raise CapacityError(f"no z_max <= {Z_MAX_CAP} brings the tail below {tol}")
        while z > self.z_max and self.tail_mass(t_max, z - 1).max() < tol:
            z -= 1
        return SensorModel(self.D, self.A, self.Pye, z)

    def to_dict(self):
        return {"D": list(self.D), "A": list(self.A), "Pye": [list(r) for r in self.Pye], "z_max": self.z_max}


def truncated_poisson(lam, t_max):
    lam = check_scalar(lam, "lambda_t", min_val=0.0)
    p = np.array([lam**t / math.factorial(t) for t in range(t_max + 1)])
    return p / p.sum()


@dataclass(frozen=True)
class CellModel:
    """Priors and loss weights for one cell. ``c1`` prices underestimates, ``c2`` overestimates."""

    prior_t: tuple
    prior_e: tuple
    c1: float = DEFAULT_C1
    c2: float = DEFAULT_C2
    id: str = "cell"

    def __post_init__(self):
        pt = check_probability_vector(self.prior_t, "prior_t")
        pe = check_probability_vector(self.prior_e, "prior_e")
        check_scalar(self.c1, "c1", min_val=0.0, include_min=False)
        check_scalar(self.c2, "c2", min_val=0.0, include_min=False)
        object.__setattr__(self, "prior_t", tuple(pt.tolist()))
        object.__setattr__(self, "prior_e", tuple(pe.tolist()))
        object.__setattr__(self, "c1", float(self.c1))
        object.__setattr__(self, "c2", float(self.c2))

    @classmethod
    def poisson(cls, prior_e, lambda_t=DEFAULT_LAMBDA, t_max=DEFAULT_T_MAX, c1=DEFAULT_C1, c2=DEFAULT_C2, id="cell"):
        return cls(tuple(truncated_poisson(lambda_t, t_max)), tuple(prior_e), c1, c2, id)

    @property
    def t_max(self):
        return len(self.prior_t) - 1

    def loss_matrix(self):
        return loss_matrix(self.t_max, self.c1, self.c2)

    def initial_belief(self, rule="exact"):
        return BeliefState.from_priors(self.prior_t, self.prior_e, rule)


def loss_matrix(t_max, c1, c2):
    """``L[t, d]``: ``c1 (t - d)`` when ``d < t``, ``c2 (d - t)`` when ``d > t``."""
    t = np.arange(t_max + 1)[:, None]
    d = np.arange(t_max + 1)[None, :]
    return np.where(d < t, c1 * (t - d), c2 * (d - t)).astype(float)


@dataclass(frozen=True)
class BeliefState:
    """Posterior over ``(t, e)`` after a measurement history.

    ``joint[t, e]`` is the full posterior under the exact rule; under the
    literal rule it is always the outer product of ``pt`` and ``pe``.
    """

    joint: np.ndarray
    history: tuple = ()
    rule: str = "exact"

    @classmethod
    def from_priors(cls, pt, pe, rule="exact"):
        if rule not in RULES:
            raise DomainError(f"rule must be one of {RULES}, got {rule!r}")
        pt = check_probability_vector(pt, "pt")
        pe = check_probability_vector(pe, "pe")
        return cls(np.outer(pt, pe), (), rule)

    @property
    def pt(self):
        return self.joint.sum(axis=1)

    @property
    def pe(self):
        return self.joint.sum(axis=0)


def sensor_likelihood(s, z, t, e):
    """``P(z|t,e)``: binomial detections of the ``t`` targets plus geometric false alarms."""
    for name, v, hi in (("z", z, s.z_max), ("t", t, None), ("e", e, s.n_env - 1)):
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0 or (hi is not None and v > hi):
            raise DomainError(f"{name}={v!r} is out of range")
    D, A = s.D[e], s.A[e]
    return sum(math.comb(t, k) * D**k * (1 - D) ** (t - k) * (1 - A) * A ** (z - k) for k in range(min(t, z) + 1))


def _check_zy(s, z, y):
    if not 0 <= z <= s.z_max:
        raise DomainError(f"z={z} outside 0..{s.z_max}")
    if not 0 <= y < s.n_env:
        raise DomainError(f"y={y} outside 0..{s.n_env - 1}")


def update_beliefs(b, s, z, y, P=None):
    """Bayes update on one measurement pair ``(z, y)``.

    Exact rule: ``joint'(t,e) ~ P(z|t,e) P(y|e) joint(t,e)``. Literal rule:
    ``pe'(e) ~ P(y|e) pe(e)``, ``P(t|z,e) ~ P(z|t,e) pt(t)``,
    ``pt'(t) = sum_e P(t|z,e) pe'(e)``.
    """
    _check_zy(s, z, y)
    t_max = b.joint.shape[0] - 1
    Pz = (P if P is not None else s.likelihood_table(t_max))[z]
    py = s.pye[:, y]
    if b.rule == "exact":
        w = b.joint * Pz * py[None, :]
        tot = w.sum()
        if tot <= 0:
            raise DegenerateEvidenceError(f"measurement (z={z}, y={y}) has zero probability")
        joint = w / tot
    else:
        pt, pe = b.pt, b.pe
        pe2 = py * pe
        if pe2.sum() <= 0:
            raise DegenerateEvidenceError(f"environment reading y={y} has zero probability")
        pe2 = pe2 / pe2.sum()
        num = Pz * pt[:, None]
        pz_e = num.sum(axis=0)
        live = pe2 > 0
        if np.any(pz_e[live] <= 0):
            raise DegenerateEvidenceError(f"target count z={z} is impossible in a live environment")
        pt2 = (num[:, live] / pz_e[live] * pe2[live]).sum(axis=1)
        joint = np.outer(pt2, pe2)
    return BeliefState(joint, b.history + ((int(z), int(y)),), b.rule)


def bayes_estimate(pt, c1, c2):
    """``(estimate, risk)`` minimizing posterior expected loss; ties go to the larger estimate."""
    pt = check_probability_vector(pt, "pt")
    exp_loss = pt @ loss_matrix(pt.size - 1, c1, c2)
    best = exp_loss.min()
    d = int(np.flatnonzero(exp_loss <= best)[-1])
    return d, float(exp_loss[d])


# ---------------------------------------------------------------------------
# anticipated risk
# ---------------------------------------------------------------------------

def _multinomial_coef(rows, n_symbols):
    """Number of orderings of each sorted row (a multiset)."""
    k = rows.shape[1]
    counts = np.zeros((rows.shape[0], n_symbols), dtype=np.int64)
    np.add.at(counts, (np.repeat(np.arange(rows.shape[0]), k), rows.ravel()), 1)
    log_fact = np.array([math.lgamma(i + 1) for i in range(k + 1)])
    return np.exp(log_fact[k] - log_fact[counts].sum(axis=1))


def _risk_multiset(cell, s, k, P, L):
    """Exact-rule risk summed over multisets of ``z`` and ``y`` values.

    Under the exact rule the posterior only depends on the multiset of
    readings, so ``r(k) = sum_multisets coef * min_d sum_t L[t,d] J(t)``
    with ``J(t) = sum_e P(t) P(e) prod_j P(z_j|t,e) P(y_j|e)``.
    """
    Z, E = P.shape[0], s.n_env
    prior = np.outer(cell.prior_t, cell.prior_e)
    zsets = np.array(list(itertools.combinations_with_replacement(range(Z), k)), dtype=np.int64).reshape(-1, k)
    ysets = np.array(list(itertools.combinations_with_replacement(range(E), k)), dtype=np.int64).reshape(-1, k)
    zc = _multinomial_coef(zsets, Z)
    yc = _multinomial_coef(ysets, E)
    Y = np.prod(s.pye.T[ysets], axis=1) * yc[:, None]  # (ny, E)
    total = 0.0
    mass = 0.0
    for start in range(0, zsets.shape[0], max(1, CHUNK // max(1, ysets.shape[0]))):
        zs = zsets[start:start + max(1, CHUNK // max(1, ysets.shape[0]))]
        W = np.prod(P[zs], axis=1) * prior[None] * zc[start:start + zs.shape[0], None, None]  # (nz, T, E)
        J = np.einsum("zte,ye->zyt", W, Y)
        total += float((J @ L).min(axis=-1).sum())
        mass += float(J.sum())
    return total, mass


def _expand_joint(J, P, pye):
    """Append one measurement to every sequence: ``(S,T,E) -> (S*Z*Y, T,E)``."""
    S, T, E = J.shape
    Z = P.shape[0]
    out = J[:, None, None] * P[None, :, None] * pye.T[None, None, :, None, :]
    return out.reshape(S * Z * E, T, E)


def _risk_joint(cell, s, k, P, L):
    """Risk over ordered sequences with ``P(z,y,t) = sum_e P(t)P(e) prod_j P(z_j|t,e)P(y_j|e)``."""
    pye = s.pye
    step = P.shape[0] * s.n_env

    def walk(J, depth):
        if depth == k:
            return float((J.sum(axis=2) @ L).min(axis=1).sum()), float(J.sum())
        tot = mass = 0.0
        per = max(1, CHUNK // step)
        for start in range(0, J.shape[0], per):
            a, b = walk(_expand_joint(J[start:start + per], P, pye), depth + 1)
            tot += a
            mass += b
        return tot, mass

    return walk(np.outer(cell.prior_t, cell.prior_e)[None], 0)


def _risk_chain(cell, s, k, P, L, rule):
    """Risk via the sequential chain ``P(z,y) = prod_j P(z_j, y_j | earlier readings)``.

    Each factor is the predictive probability under the current belief; the
    belief is then updated with the chosen rule.
    """
    pye = s.pye
    Z, E = P.shape[0], s.n_env
    T = cell.t_max + 1

    def expand(B, w):
        # B: (S, T, E) normalized beliefs; w: (S,) prefix probabilities
        S = B.shape[0]
        if rule == "exact":
            post = B[:, None, None] * P[None, :, None] * pye.T[None, None, :, None, :]  # (S,Z,Y,T,E)
            pred = post.sum(axis=(3, 4))
            safe = np.where(pred > 0, pred, 1.0)
            post = post / safe[..., None, None]
        else:
            pt = B.sum(axis=2)
            pe = B.sum(axis=1)
            pred = np.einsum("zte,ye,st,se->szy", P, pye.T, pt, pe)
            pe2 = pe[:, None, :] * pye.T[None]  # (S,Y,E)
            pe2 = pe2 / np.where(pe2.sum(-1, keepdims=True) > 0, pe2.sum(-1, keepdims=True), 1.0)
            num = P[None] * pt[:, None, :, None]  # (S,Z,T,E)
            den = num.sum(axis=2, keepdims=True)
            pte = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
            pt2 = np.einsum("szte,sye->szyt", pte, pe2)
            post = pt2[..., :, None] * pe2[:, None, :, None, :]
        post = np.where((pred > 0)[..., None, None], post, 0.0)
        return post.reshape(S * Z * E, T, E), (w[:, None, None] * pred).reshape(-1)

    def walk(B, w, depth):
        if depth == k:
            pt = B.sum(axis=2)
            return float((w * (pt @ L).min(axis=1)).sum()), float(w.sum())
        tot = mass = 0.0
        per = max(1, CHUNK // (Z * E))
        for start in range(0, B.shape[0], per):
            B2, w2 = expand(B[start:start + per], w[start:start + per])
            a, b = walk(B2, w2, depth + 1)
            tot += a
            mass += b
        return tot, mass

    return walk(np.outer(cell.prior_t, cell.prior_e)[None], np.ones(1), 0)


def _sequence_count(s, k):
    return ((s.z_max + 1) * s.n_env) ** k


def anticipated_risk(cell, s, k, *, method="auto", rule="exact", budget=SEQUENCE_BUDGET, return_mass=False):
    """Expected posterior Bayes risk after ``k`` visits.

    ``method`` picks the enumeration: ``"multiset"`` (exact rule only,
    fastest), ``"joint"`` (ordered sequences, direct joint products) or
    ``"chain"`` (ordered sequences, sequential predictive factors; the only
    route for the literal rule). ``"auto"`` uses ``"multiset"`` for the exact
    rule and ``"chain"`` otherwise. With ``return_mass`` the total
    probability of the enumerated sequences is returned as well.
    """
    k = int(check_scalar(k, "k", min_val=0))
    if rule not in RULES:
        raise DomainError(f"rule must be one of {RULES}, got {rule!r}")
    if cell.prior_e and len(cell.prior_e) != s.n_env:
        raise DomainError(f"cell has {len(cell.prior_e)} environment types, sensor has {s.n_env}")
    L = cell.loss_matrix()
    if k == 0:
        r = bayes_estimate(cell.prior_t, cell.c1, cell.c2)[1]
        return (r, 1.0) if return_mass else r
    if method == "auto":
        method = "multiset" if rule == "exact" else "chain"
    P = s.likelihood_table(cell.t_max)
    if method == "multiset":
        if rule != "exact":
            raise DomainError("the multiset route relies on the exact rule")
        count = math.comb(s.z_max + k, k) * math.comb(s.n_env + k - 1, k)
        if count > budget:
            raise CapacityError(f"{count} measurement multisets exceed the budget {budget}")
        r, mass = _risk_multiset(cell, s, k, P, L)
    elif method in ("joint", "chain"):
        count = _sequence_count(s, k)
        if count > budget:
            raise CapacityError(f"{count} measurement sequences exceed the budget {budget}")
        if method == "joint":
            if rule != "exact":
                raise DomainError("direct joint enumeration is the exact rule by construction")
            r, mass = _risk_joint(cell, s, k, P, L)
        else:
            r, mass = _risk_chain(cell, s, k, P, L, rule)
    else:
        raise DomainError(f"unknown method {method!r}")
    return (r, mass) if return_mass else r


def sequence_probability_mass(cell, s, k, *, method="chain", rule="exact"):
    """Total probability of all enumerated length-``k`` measurement sequences."""
    return anticipated_risk(cell, s, k, method=method, rule=rule, return_mass=True)[1]


def benefit(cell, s, k, **kw):
    """``f(k) = r(0) - r(k)``; exactly 0 at ``k = 0``."""
    if k == 0:
        return 0.0
    return anticipated_risk(cell, s, 0) - anticipated_risk(cell, s, k, **kw)


# ---------------------------------------------------------------------------
# maps and the joint objective
# ---------------------------------------------------------------------------

@dataclass
class GridMap:
    """Cells sharing one sensor. Benefits are memoized per ``(cell id, k)``."""

    cells: list
    sensor: SensorModel = field(default_factory=SensorModel)
    rule: str = "exact"
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        ids = [c.id for c in self.cells]
        if len(set(ids)) != len(ids):
            raise DomainError("cell ids must be unique")
        for c in self.cells:
            if len(c.prior_e) != self.sensor.n_env:
                raise DomainError(f"cell {c.id} has {len(c.prior_e)} environment types, sensor has {self.sensor.n_env}")
        self.by_id = {c.id: c for c in self.cells}

    @property
    def t_max(self):
        return max(c.t_max for c in self.cells)

    def cell(self, cid):
        try:
            return self.by_id[cid]
        except KeyError:
            raise DomainError(f"unknown cell id {cid!r}") from None

    def risk(self, cid, k):
        key = (cid, int(k))
        if key not in self._cache:
            self._cache[key] = anticipated_risk(self.cell(cid), self.sensor, k, rule=self.rule)
        return self._cache[key]

    def benefit(self, cid, k):
        return 0.0 if k == 0 else self.risk(cid, 0) - self.risk(cid, k)

    def benefits(self, cid, k_max):
        return np.array([self.benefit(cid, k) for k in range(k_max + 1)])

    def to_dict(self):
        return {"sensor": self.sensor.to_dict(), "rule": self.rule,
                "cells": [{"id": c.id, "prior_t": list(c.prior_t), "prior_e": list(c.prior_e),
                           "c1": c.c1, "c2": c.c2} for c in self.cells]}


def load_map(path_or_obj, *, tighten=True, tail_tol=DEFAULT_TAIL_TOL):
    """Read the map JSON; by default ``z_max`` is raised until the truncated tail is below ``tail_tol``.

    Cells give either ``prior_t`` or ``lambda_t`` (+ ``t_max``) for a truncated Poisson prior.
    """
    if isinstance(path_or_obj, (str, Path)):
        with open(path_or_obj) as fh:
            obj = json.load(fh)
    else:
        obj = path_or_obj
    try:
        sd = obj.get("sensor", {})
        sensor = SensorModel(tuple(sd.get("D", DEFAULT_D)), tuple(sd.get("A", DEFAULT_A)),
                             tuple(map(tuple, sd.get("Pye", DEFAULT_PYE))), int(sd.get("z_max", DEFAULT_Z_MAX)))
        cells = []
        for c in obj["cells"]:
            t_max = int(c.get("t_max", DEFAULT_T_MAX))
            pt = c.get("prior_t") or tuple(truncated_poisson(float(c.get("lambda_t", DEFAULT_LAMBDA)), t_max))
            cells.append(CellModel(tuple(pt), tuple(c["prior_e"]), float(c.get("c1", DEFAULT_C1)),
                                   float(c.get("c2", DEFAULT_C2)), str(c["id"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"bad map JSON: {exc}") from exc
    grid = GridMap(cells, sensor, obj.get("rule", "exact"))
    if tighten:
        grid.sensor = sensor.tightened(grid.t_max, tail_tol)
    return grid


def synthetic_map(**kw):
    """The shipped 4x4 synthetic map with the default sensor parameters."""
    text = resources.files("nonsubgreedy").joinpath("data/synthetic_map.json").read_text()
    return load_map(json.loads(text), **kw)


def visit_counts(grid, paths):
    counts = {}
    for p in paths:
        for cid in p:
            grid.cell(cid)
            counts[cid] = counts.get(cid, 0) + 1
    return counts


def joint_objective(grid, joint_paths, k_cap=None):
    """``sum_cells f_cell(visits)`` where visits count every occurrence across the chosen paths.

    ``joint_paths`` holds ``GroundElement`` objects (their ``path`` payload)
    or plain lists of cell ids. With ``k_cap`` visits past the cap earn nothing.
    """
    paths = [e.path if isinstance(e, GroundElement) else tuple(e) for e in joint_paths]
    total = 0.0
    for cid, n in visit_counts(grid, paths).items():
        total += grid.benefit(cid, n if k_cap is None else min(n, k_cap))
    return total


def bos_oracle(grid, elements, k_cap=None):
    """Set-function oracle over candidate paths scored by :func:`joint_objective`."""
    elements = list(elements)
    for e in elements:
        for cid in e.path:
            grid.cell(cid)
    return SetFunctionOracle(elements, lambda els: joint_objective(grid, els, k_cap), name="benefit-of-search")


# ---------------------------------------------------------------------------
# per-cell curvature tables
# ---------------------------------------------------------------------------

@dataclass
class CurvatureTable:
    rows: list
    summary: list
    truncated: dict = None

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "k", "normalized_benefit", "alpha", "beta"])
        for r in self.rows:
            w.writerow([r["id"], r["k"], repr(r["normalized_benefit"]), repr(r["alpha"]), repr(r["beta"])])
        return buf.getvalue()

    def summary_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "max_alpha", "max_beta"])
        for r in self.summary:
            w.writerow([r["k"], repr(r["max_alpha"]), repr(r["max_beta"])])
        return buf.getvalue()


def cell_curvature_table(grid, k_values=(1, 2, 3, 4), truncate=False):
    """Per-cell ``(alpha, beta)`` for at most ``k`` visits, plus per-``k`` maxima.

    With ``truncate`` the summary also carries the global pair used for a
    bound: ``alpha`` from the zero-gain convention past the largest ``k``
    (1 whenever some cell has positive benefit) and the largest ``beta``.
    """
    k_values = sorted({int(k) for k in k_values})
    if not k_values or k_values[0] < 1 or k_values[-1] > 6:
        raise DomainError(f"k values must lie in 1..6, got {k_values}")
    k_top = k_values[-1]
    rows, summary = [], []
    per_k = {k: [] for k in k_values}
    for c in grid.cells:
        f = grid.benefits(c.id, k_top)
        g = np.diff(f)
        r0 = grid.risk(c.id, 0)
        for k in k_values:
            a, b = interchangeable_cell_curvature(g, k, neg_tol=1e-10)
            rows.append({"id": c.id, "k": k, "normalized_benefit": float(f[k] / r0) if r0 > 0 else 0.0,
                         "alpha": a, "beta": b})
            per_k[k].append((a, b))
    for k in k_values:
        summary.append({"k": k, "max_alpha": max(a for a, _ in per_k[k]), "max_beta": max(b for _, b in per_k[k])})
    truncated = None
    if truncate:
        alphas = []
        for c in grid.cells:
            g = np.diff(grid.benefits(c.id, k_top))
            alphas.append(interchangeable_cell_curvature(g, k_top, truncate=True, neg_tol=1e-10)[0])
        truncated = {"k_cap": k_top, "alpha": max(alphas), "beta": summary[-1]["max_beta"]}
    return CurvatureTable(rows, summary, truncated)


class BenefitOfSearch(TransformerMixin, BaseEstimator):
    """``fit(grid)`` tabulates ``f_cell(k)`` for ``k <= k_max``; ``transform`` maps visit counts to benefits.

    ``transform`` takes an ``(n_samples, n_cells)`` array of visit counts in
    the grid's cell order and returns per-cell benefits of the same shape.
    """

    def __init__(self, k_max=4, k_cap=None):
        self.k_max = k_max
        self.k_cap = k_cap

    def fit(self, grid, y=None):
        if not isinstance(grid, GridMap):
            raise DomainError(f"expected a GridMap, got {type(grid).__name__}")
        self.cell_ids_ = [c.id for c in grid.cells]
        self.benefit_ = np.vstack([grid.benefits(cid, self.k_max) for cid in self.cell_ids_])
        self.risk_ = np.vstack([[grid.risk(cid, k) for k in range(self.k_max + 1)] for cid in self.cell_ids_])
        self.n_features_in_ = len(self.cell_ids_)
        return self

    def transform(self, X):
        X = np.asarray(X)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise DomainError(f"expected shape (n, {self.n_features_in_}), got {X.shape}")
        if np.any(X < 0) or np.any(X != np.round(X)):
            raise DomainError("visit counts must be non-negative integers")
        X = X.astype(int)
        if self.k_cap is not None:
            X = np.minimum(X, self.k_cap)
        if X.max(initial=0) > self.k_max:
            raise DomainError(f"visit count {X.max()} exceeds k_max={self.k_max}; refit with a larger k_max")
        return self.benefit_[np.arange(self.n_features_in_)[None, :], X]
