"""Total, generalized and inverse generalized curvature by exhaustive search.

Both generalized quantities only depend on ``A = S \\ v`` and
``B = (S u Q) \\ v`` with ``A`` a subset of ``B`` subset of ``V \\ v``, so the
search runs over ``(v, A, B)`` triples rather than ``(S, Q)`` pairs.

Two exact routes are provided. ``method="dp"`` (default) reduces each ``v``
to a subset/superset max-propagation over bitmasks, ``O(n^2 2^n)`` in total.
``method="enumerate"`` walks every triple explicitly, ``O(n 3^n)``, and is
kept as an independent cross-check.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import CapacityError, DomainError, ValidationError
from .setfn import GroundElement, SetFunctionOracle, check_submodular, require_normalized_monotone

CURVATURE_BUDGET = 12
IDENTITY_ATOL = 1e-12


@dataclass
class CurvatureReport:
    """Curvature values plus the maximizing witnesses.

    ``alpha_witness`` / ``beta_witness`` are ``(v, A, B)`` id tuples with
    ``A`` a subset of ``B``; ``alpha_c_witness`` is the maximizing ``v``.
    """

    alpha: float
    beta: float
    alpha_c: float = None
    alpha_witness: tuple = None
    beta_witness: tuple = None
    alpha_c_witness: str = None
    skipped_alpha: int = 0
    skipped_beta: int = 0
    n_triples: int = 0
    method: str = "dp"
    extra: dict = field(default_factory=dict)

    @property
    def skipped_zero_denominators(self):
        return self.skipped_alpha + self.skipped_beta

    def to_dict(self):
        d = asdict(self)
        d["skipped_zero_denominators"] = self.skipped_zero_denominators
        return d


def _prepare(oracle, budget, validate):
    n = len(oracle)
    if n > budget:
        raise CapacityError(f"|V|={n} exceeds the curvature budget {budget}")
    if validate:
        require_normalized_monotone(oracle)
    return n, np.asarray(oracle.table(), dtype=float)


def _insert_zero_bit(c, b):
    low = c & ((1 << b) - 1)
    return ((c >> b) << (b + 1)) | low


def _marginals_of(f, n, b):
    """``g[c] = f(A + v) - f(A)`` with ``A`` the full mask of compressed index ``c``."""
    comp = np.arange(1 << (n - 1), dtype=np.int64)
    full = _insert_zero_bit(comp, b)
    return f[full | (1 << b)] - f[full], full


def _propagate(values, nbits, *, upward):
    """Max over subsets (``upward=False``) or supersets of every mask, with argmax."""
    best = values.copy()
    arg = np.arange(values.size, dtype=np.int64)
    masks = arg.copy()
    for i in range(nbits):
        bit = 1 << i
        if upward:
            sel = masks[(masks & bit) == 0]
            src = sel | bit
        else:
            sel = masks[(masks & bit) != 0]
            src = sel ^ bit
        better = best[src] > best[sel]
        best[sel[better]] = best[src[better]]
        arg[sel[better]] = arg[src[better]]
    return best, arg


def _popcount(a):
    a = np.asarray(a, dtype=np.int64)
    out = np.zeros_like(a)
    while np.any(a):
        out += a & 1
        a = a >> 1
    return out


def _dp_curvatures(oracle, f, n, zero_tol):
    alpha, beta = 0.0, 0.0
    aw = bw = None
    skipped_a = skipped_b = 0
    for b in range(n):
        g, full = _marginals_of(f, n, b)
        num = np.maximum(g, 0.0)
        pos = np.where(g > zero_tol, g, -np.inf)
        sizes = _popcount(np.arange(g.size))
        zero = ~(g > zero_tol)
        # denominators g(A) = 0 are skipped for every superset B
        skipped_a += int(np.sum(np.left_shift(1, (n - 1) - sizes[zero])))
        skipped_b += int(np.sum(np.left_shift(1, sizes[zero])))
        down, darg = _propagate(pos, n - 1, upward=False)
        ok = np.isfinite(down)
        if np.any(ok):
            cand = np.where(ok, 1.0 - num / np.where(ok, down, 1.0), -np.inf)
            j = int(np.argmax(cand))
            if cand[j] > alpha or aw is None and cand[j] >= alpha:
                alpha = max(alpha, float(cand[j]))
                aw = (oracle.elements[b].id, oracle.subset_of_mask(int(full[darg[j]])), oracle.subset_of_mask(int(full[j])))
        up, uarg = _propagate(pos, n - 1, upward=True)
        ok = np.isfinite(up)
        if np.any(ok):
            cand = np.where(ok, 1.0 - num / np.where(ok, up, 1.0), -np.inf)
            j = int(np.argmax(cand))
            if cand[j] > beta or bw is None and cand[j] >= beta:
                beta = max(beta, float(cand[j]))
                bw = (oracle.elements[b].id, oracle.subset_of_mask(int(full[j])), oracle.subset_of_mask(int(full[uarg[j]])))
    return min(alpha, 1.0), aw, skipped_a, min(beta, 1.0), bw, skipped_b


def _submasks(m):
    s = m
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & m


def _enum_curvatures(oracle, f, n, zero_tol):
    alpha, beta = 0.0, 0.0
    aw = bw = None
    skipped_a = skipped_b = 0
    full = (1 << n) - 1
    f = f.tolist()
    for b in range(n):
        vb = 1 << b
        rest = full & ~vb
        for B in _submasks(rest):
            gB = f[B | vb] - f[B]
            for A in _submasks(B):
                gA = f[A | vb] - f[A]
                wit = (oracle.elements[b].id, oracle.subset_of_mask(A), oracle.subset_of_mask(B))
                if gA > zero_tol:
                    c = 1.0 - max(gB, 0.0) / gA
                    if c > alpha or aw is None and c >= alpha:
                        alpha, aw = max(alpha, c), wit
                else:
                    skipped_a += 1
                if gB > zero_tol:
                    c = 1.0 - max(gA, 0.0) / gB
                    if c > beta or bw is None and c >= beta:
                        beta, bw = max(beta, c), wit
                else:
                    skipped_b += 1
    return min(alpha, 1.0), aw, skipped_a, min(beta, 1.0), bw, skipped_b


def curvatures(oracle, *, budget=CURVATURE_BUDGET, method="dp", validate=True, zero_tol=0.0):
    """Generalized curvature ``alpha`` and inverse generalized curvature ``beta``.

    ``alpha`` is the smallest scalar with ``D(v|B) >= (1 - alpha) D(v|A)`` and
    ``beta`` the smallest with ``D(v|A) >= (1 - beta) D(v|B)``, over all
    ``v`` and ``A`` subset ``B`` subset ``V \\ v``. Reference marginals at or
    below ``zero_tol`` impose no constraint and are counted as skipped.
    """
    n, f = _prepare(oracle, budget, validate)
    if n == 0:
        return CurvatureReport(0.0, 0.0, method=method)
    if method == "dp":
        res = _dp_curvatures(oracle, f, n, zero_tol)
    elif method == "enumerate":
        res = _enum_curvatures(oracle, f, n, zero_tol)
    else:
        raise DomainError(f"unknown method {method!r}")
    alpha, aw, sa, beta, bw, sb = res
    return CurvatureReport(alpha=alpha, beta=beta, alpha_witness=aw, beta_witness=bw,
                           skipped_alpha=sa, skipped_beta=sb, n_triples=n * 3 ** (n - 1), method=method)


def generalized_curvature(oracle, **kw):
    return curvatures(oracle, **kw).alpha


def inverse_generalized_curvature(oracle, **kw):
    return curvatures(oracle, **kw).beta


def total_curvature(oracle, *, force=False, validate=True, budget=10, return_witness=False):
    """Classic total curvature ``max_v [D(v|{}) - D(v|V - v)] / D(v|{})``.

    Only defined for submodular ``f``; a non-submodular oracle raises
    ``ValidationError`` unless ``force`` is set.
    """
    n = len(oracle)
    if validate:
        require_normalized_monotone(oracle)
        if not force:
            if n > budget:
                raise CapacityError(f"|V|={n} exceeds the submodularity-check budget {budget}")
            chk = check_submodular(oracle)
            if not chk:
                raise ValidationError(f"total curvature needs a submodular oracle; witnesses {chk.witnesses[:2]}")
    ids = oracle.ids
    best, arg = 0.0, None
    fv_all = oracle.evaluate(ids)
    for v in ids:
        fv = oracle.evaluate([v])
        if fv < 0:
            continue
        if fv <= 0:
            raise DomainError(f"D({v}|{{}}) = 0; total curvature needs positive singleton values")
        rest = [u for u in ids if u != v]
        c = (fv - (fv_all - oracle.evaluate(rest))) / fv
        if arg is None or c > best:
            best, arg = c, v
    best = float(min(max(best, 0.0), 1.0))
    return (best, arg) if return_witness else best


def interchangeable_oracle(F, k):
    """Set function on ``k`` visit tokens whose value only depends on how many are chosen."""
    F = list(F)
    if len(F) < k + 1:
        raise DomainError(f"need F(0..{k}), got {len(F)} values")
    tokens = [GroundElement(f"v{j:02d}") for j in range(k)]
    return SetFunctionOracle(tokens, lambda els: F[len(els)], name="tokens")


def interchangeable_cell_curvature(g, k, *, truncate=False, neg_tol=1e-12):
    """``(alpha, beta)`` for ``k`` interchangeable visits with marginal gains ``g``.

    ``g[j]`` is the gain of the ``(j+1)``-th visit. Only ``g[0..k-1]`` enter:
    ``alpha = max 1 - g(n)/g(m)`` and ``beta = max 1 - g(m)/g(n)`` over
    ``0 <= m <= n <= k-1``. With ``truncate`` one extra zero-gain visit is
    appended, modelling "no reward past ``k`` visits".
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    g = np.asarray(g, dtype=float)[:k]
    if g.size < k:
        raise DomainError(f"need {k} marginal gains, got {g.size}")
    if np.any(g < -neg_tol):
        raise DomainError(f"negative marginal gain in {g}")
    g = np.maximum(g, 0.0)
    if truncate:
        g = np.append(g, 0.0)
    alpha = beta = 0.0
    for m in range(g.size):
        for n in range(m, g.size):
            if g[m] > 0:
                alpha = max(alpha, 1.0 - g[n] / g[m])
            if g[n] > 0:
                beta = max(beta, 1.0 - g[m] / g[n])
    return float(min(alpha, 1.0)), float(min(beta, 1.0))


def inequality_residuals(oracle, alpha, beta):
    """Worst violations of the defining inequalities at the given ``alpha``, ``beta``.

    Returns ``(worst_alpha, worst_beta)`` where each is
    ``max (1 - x) D(v|ref) - D(v|other)``; non-positive means satisfied.
    """
    n = len(oracle)
    f = np.asarray(oracle.table(), dtype=float)
    wa = wb = -math.inf
    for b in range(n):
        g, _ = _marginals_of(f, n, b)
        down, _ = _propagate(g, n - 1, upward=False)
        up, _ = _propagate(g, n - 1, upward=True)
        wa = max(wa, float(np.max((1 - alpha) * down - g)))
        wb = max(wb, float(np.max((1 - beta) * up - g)))
    return wa, wb


class CurvatureEstimator(BaseEstimator):
    """Estimator-style wrapper: ``fit(oracle)`` sets ``alpha_``, ``beta_``, ``alpha_c_``.

    ``total`` is ``"auto"`` (compute ``alpha_c`` only when the oracle passes
    the submodularity check), ``True`` (force) or ``False``.
    """

    def __init__(self, budget=CURVATURE_BUDGET, method="dp", total="auto", zero_tol=0.0):
        self.budget = budget
        self.method = method
        self.total = total
        self.zero_tol = zero_tol

    def fit(self, oracle, y=None):
        if not isinstance(oracle, SetFunctionOracle):
            raise DomainError(f"expected a SetFunctionOracle, got {type(oracle).__name__}")
        rep = curvatures(oracle, budget=self.budget, method=self.method, zero_tol=self.zero_tol)
        if self.total is True or (self.total == "auto" and len(oracle) <= 10 and check_submodular(oracle)):
            try:
                rep.alpha_c, rep.alpha_c_witness = total_curvature(
                    oracle, force=self.total is True, validate=False, return_witness=True)
            except DomainError as exc:
                rep.extra["alpha_c_error"] = str(exc)
        self.report_ = rep
        self.alpha_ = rep.alpha
        self.beta_ = rep.beta
        self.alpha_c_ = rep.alpha_c
        return self
