"""Ground sets, memoizing set-function oracles and the marginal-reward algebra.

Subsets are passed around as iterables of element ids (or ``GroundElement``
objects); the canonical cache key of a subset is its sorted id tuple.
"""

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import CapacityError, DomainError, ValidationError

IDENTITY_ATOL = 1e-12
MONOTONE_ATOL = 1e-12
KEY_SEP = ","
TABLE_BUDGET = 20


@dataclass(frozen=True, order=True)
class GroundElement:
    """One selectable item: a candidate path for agent ``block``."""

    id: str
    block: int = 1
    path: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id or KEY_SEP in self.id:
            raise DomainError(f"element id must be a non-empty string without {KEY_SEP!r}: {self.id!r}")
        if int(self.block) < 1:
            raise DomainError(f"block index must be >= 1, got {self.block}")
        object.__setattr__(self, "block", int(self.block))
        object.__setattr__(self, "path", tuple(self.path))


def subset_key(ids):
    """Canonical memo key: the sorted id tuple."""
    return tuple(sorted(ids))


def key_to_str(key):
    return KEY_SEP.join(key)


def str_to_key(s):
    return subset_key(s.split(KEY_SEP)) if s else ()


class SetFunctionOracle:
    """Memoizing evaluator of ``f`` over subsets of a finite ground set.

    ``func`` receives a tuple of ``GroundElement`` objects (sorted by id) and
    returns a real. Normalization and monotonicity are not enforced here; use
    :func:`check_normalized` and :func:`check_monotone`.

    The cache is a plain dict. Concurrent evaluations may compute the same
    subset twice; that is harmless because ``func`` must be pure.
    """

    def __init__(self, elements, func, *, cache=True, name=None):
        elements = list(elements)
        ids = [e.id for e in elements]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise DomainError(f"duplicate element ids: {dup}")
        self.elements = tuple(elements)
        self.by_id = {e.id: e for e in elements}
        self.index = {e.id: i for i, e in enumerate(elements)}
        self._func = func
        self.cache_enabled = cache
        self._cache = {}
        self.n_calls = 0
        self.name = name
        self._table = None

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<{type(self).__name__}{label} |V|={len(self)}>"

    @property
    def ids(self):
        return tuple(e.id for e in self.elements)

    def key(self, subset):
        """Validate ``subset`` and return its canonical key."""
        ids = []
        for s in subset:
            sid = s.id if isinstance(s, GroundElement) else s
            if sid not in self.by_id:
                raise DomainError(f"element {sid!r} is not in the ground set")
            ids.append(sid)
        return subset_key(set(ids))

    def evaluate(self, subset):
        k = self.key(subset)
        if self.cache_enabled:
            hit = self._cache.get(k)
            if hit is not None:
                return hit
        self.n_calls += 1
        value = float(self._func(tuple(self.by_id[i] for i in k)))
        if self.cache_enabled:
            self._cache[k] = value
        return value

    __call__ = evaluate

    def clear_cache(self):
        self._cache.clear()
        self._table = None

    def mask_of(self, subset):
        m = 0
        for i in self.key(subset):
            m |= 1 << self.index[i]
        return m

    def subset_of_mask(self, mask):
        return tuple(sorted(self.elements[i].id for i in range(len(self)) if mask >> i & 1))

    def table(self, budget=TABLE_BUDGET):
        """Values of ``f`` on all ``2^|V|`` subsets, indexed by bitmask.

        Bit ``i`` of the mask corresponds to ``self.elements[i]``.
        """
        n = len(self)
        if n > budget:
            raise CapacityError(f"|V|={n} exceeds the tabulation budget {budget}")
        if self._table is None:
            vals = np.empty(1 << n)
            for mask in range(1 << n):
                vals[mask] = self.evaluate(self.subset_of_mask(mask))
            vals.setflags(write=False)
            self._table = vals
        return self._table


class TabularOracle(SetFunctionOracle):
    """Oracle backed by an explicit value for every subset."""

    def __init__(self, elements, values, *, name=None):
        elements = list(elements)
        table = {}
        for k, v in values.items():
            key = str_to_key(k) if isinstance(k, str) else subset_key(k)
            table[key] = float(v)
        super().__init__(elements, lambda els: table[subset_key(e.id for e in els)], name=name)
        ids = self.ids
        missing = []
        for r in range(len(ids) + 1):
            for combo in itertools.combinations(ids, r):
                key = subset_key(combo)
                if key not in table:
                    missing.append(key_to_str(key) or "{}")
        if missing:
            raise ValidationError(f"tabular oracle is not total; {len(missing)} subsets missing, e.g. {missing[:3]}")
        extra = set(table) - {subset_key(c) for r in range(len(ids) + 1) for c in itertools.combinations(ids, r)}
        if extra:
            raise DomainError(f"values reference unknown subsets: {sorted(extra)[:3]}")
        self.values = table

    @classmethod
    def from_table(cls, elements, vals, *, name=None):
        """Build from a bitmask-indexed array over ``elements``."""
        elements = list(elements)
        vals = np.asarray(vals, dtype=float)
        if vals.shape != (1 << len(elements),):
            raise DomainError(f"table must have length 2^{len(elements)}")
        values = {}
        for mask in range(1 << len(elements)):
            key = subset_key(elements[i].id for i in range(len(elements)) if mask >> i & 1)
            values[key] = vals[mask]
        out = cls(elements, values, name=name)
        tab = vals.copy()
        tab.setflags(write=False)
        out._table = tab
        return out

    @classmethod
    def from_oracle(cls, oracle):
        return cls.from_table(oracle.elements, oracle.table(), name=oracle.name)

    def to_dict(self):
        return {
            "elements": [{"id": e.id, "block": e.block, "path": list(e.path)} for e in self.elements],
            "values": {key_to_str(k): v for k, v in sorted(self.values.items(), key=lambda kv: (len(kv[0]), kv[0]))},
        }


def elements_from_json(items):
    if not isinstance(items, list) or not items:
        raise DomainError("'elements' must be a non-empty list")
    out = []
    for it in items:
        try:
            out.append(GroundElement(str(it["id"]), int(it.get("block", 1)), tuple(it.get("path", ()))))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"bad element record {it!r}: {exc}") from exc
    return out


def load_tabular(path_or_obj):
    """Read the tabular set-function JSON format.

    ``{"elements": [{"id": "a", "block": 1, "path": ["c3"]}, ...],
    "values": {"": 0.0, "a": 1.0, "a,b": 1.5, ...}}``; keys are sorted ids
    joined by commas, the empty string is the empty set.
    """
    if isinstance(path_or_obj, (str, Path)):
        with open(path_or_obj) as fh:
            obj = json.load(fh)
    else:
        obj = path_or_obj
    if not isinstance(obj, dict) or "elements" not in obj or "values" not in obj:
        raise DomainError("set-function JSON needs 'elements' and 'values'")
    return TabularOracle(elements_from_json(obj["elements"]), obj["values"])


def save_tabular(oracle, path):
    tab = oracle if isinstance(oracle, TabularOracle) else TabularOracle.from_oracle(oracle)
    with open(path, "w") as fh:
        json.dump(tab.to_dict(), fh, indent=1)


# ---------------------------------------------------------------------------
# marginal-reward algebra
# ---------------------------------------------------------------------------

def marginal(oracle, S, Q=()):
    """Marginal reward of ``S`` given ``Q``: ``f(S u Q) - f(Q)``."""
    s = set(oracle.key(S))
    q = set(oracle.key(Q))
    return oracle.evaluate(s | q) - oracle.evaluate(q)


def telescope_check(oracle, ordered):
    """Largest deviation between ``f(S)`` and the running sum of marginals.

    Deviations are checked at every prefix of ``ordered``.
    """
    ordered = [s.id if isinstance(s, GroundElement) else s for s in ordered]
    if len(set(ordered)) != len(ordered):
        raise DomainError("ordered list contains duplicates")
    oracle.key(ordered)
    worst = abs(oracle.evaluate(()))
    running = 0.0
    for i, s in enumerate(ordered):
        running += marginal(oracle, [s], ordered[:i])
        worst = max(worst, abs(oracle.evaluate(ordered[: i + 1]) - running))
    return worst


def exchange_identity_residual(oracle, x, xstar, matroid=None):
    """Residual of ``f(x*) = f(x) + sum D(x*_i|x*_{1:i-1}, x) - sum D(x_i|x_{1:i-1}, x*)``.

    Both ``x`` and ``xstar`` must be maximal independent sets of the partition
    matroid; they are re-ordered by block before the sums are taken.
    """
    from .matroid import PartitionMatroid

    m = matroid if matroid is not None else PartitionMatroid.from_elements(oracle.elements)
    x = m.order_by_block(x)
    xstar = m.order_by_block(xstar)
    for name, s in (("x", x), ("xstar", xstar)):
        if not m.is_maximal(s):
            raise DomainError(f"{name} is not a maximal independent set")
    gain = sum(marginal(oracle, [xs], list(xstar[:i]) + list(x)) for i, xs in enumerate(xstar))
    loss = sum(marginal(oracle, [xi], list(x[:i]) + list(xstar)) for i, xi in enumerate(x))
    return abs(oracle.evaluate(xstar) - (oracle.evaluate(x) + gain - loss))


# ---------------------------------------------------------------------------
# property validators
# ---------------------------------------------------------------------------

@dataclass
class PropertyCheck:
    """Outcome of a property validator with up to ``max_witnesses`` counterexamples."""

    name: str
    holds: bool
    n_checked: int
    witnesses: list = field(default_factory=list)

    def __bool__(self):
        return self.holds


def _single_adds(n):
    """Yield ``(mask, bit)`` pairs with ``bit`` not in ``mask``."""
    for mask in range(1 << n):
        for i in range(n):
            if not mask >> i & 1:
                yield mask, i


def check_normalized(oracle, atol=0.0):
    v = oracle.evaluate(())
    return PropertyCheck("normalized", abs(v) <= atol, 1, [] if abs(v) <= atol else [((), v)])


def check_monotone(oracle, atol=MONOTONE_ATOL, max_witnesses=10):
    """Check ``f(S) <= f(Q)`` for all ``S`` subset ``Q`` via single-element additions.

    Witnesses are ``(S, v, f(S), f(S + v))`` tuples.
    """
    f = oracle.table()
    n = len(oracle)
    bad = []
    checked = 0
    for mask, i in _single_adds(n):
        checked += 1
        hi = mask | 1 << i
        if f[hi] < f[mask] - atol:
            if len(bad) < max_witnesses:
                bad.append((oracle.subset_of_mask(mask), oracle.elements[i].id, f[mask], f[hi]))
            else:
                break
    return PropertyCheck("monotone", not bad, checked, bad)


def check_submodular(oracle, atol=MONOTONE_ATOL, max_witnesses=10):
    """Check diminishing returns ``D(v|S) >= D(v|S + u)`` for all ``S``, ``u != v`` outside ``S``.

    The pairwise condition is equivalent to ``D(v|S) >= D(v|Q)`` for all
    ``S`` subset ``Q`` (chain the single-element steps from ``S`` up to ``Q``).
    """
    f = oracle.table()
    n = len(oracle)
    masks = np.arange(1 << n)
    bad = []
    checked = 0
    for v, u in itertools.permutations(range(n), 2):
        base = masks[(masks >> v & 1) == 0]
        base = base[(base >> u & 1) == 0]
        checked += base.size
        dv = f[base | 1 << v] - f[base]
        dvu = f[base | 1 << v | 1 << u] - f[base | 1 << u]
        for j in np.flatnonzero(dv < dvu - atol)[: max_witnesses - len(bad)]:
            m = int(base[j])
            bad.append((oracle.subset_of_mask(m), oracle.elements[v].id, oracle.elements[u].id, dv[j], dvu[j]))
        if len(bad) >= max_witnesses:
            break
    return PropertyCheck("submodular", not bad, checked, bad)


def check_modular(oracle, atol=MONOTONE_ATOL, max_witnesses=10):
    """Check ``f(S u Q) + f(S n Q) == f(S) + f(Q)`` on every pair of subsets."""
    f = oracle.table()
    size = len(f)
    masks = np.arange(size)
    bad = []
    for s in range(size):
        lhs = f[s | masks] + f[s & masks]
        rhs = f[s] + f
        viol = np.flatnonzero(np.abs(lhs - rhs) > atol)
        for q in viol[: max_witnesses - len(bad)]:
            bad.append((oracle.subset_of_mask(s), oracle.subset_of_mask(int(q))))
        if len(bad) >= max_witnesses:
            break
    return PropertyCheck("modular", not bad, size * size, bad)


def require_normalized_monotone(oracle):
    norm = check_normalized(oracle, atol=MONOTONE_ATOL)
    if not norm:
        raise ValidationError(f"oracle is not normalized: f(empty) = {oracle.evaluate(())}")
    mono = check_monotone(oracle)
    if not mono:
        raise ValidationError(f"oracle is not monotone; witnesses: {mono.witnesses[:3]}")
