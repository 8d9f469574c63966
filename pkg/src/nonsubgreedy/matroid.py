"""Simple partition matroids: one pick allowed per agent block."""

import itertools
import math
from dataclasses import dataclass

from .exceptions import CapacityError, DomainError
from .setfn import GroundElement

MAXIMAL_BUDGET = 10**6
AXIOM_BUDGET = 15


@dataclass(frozen=True)
class PartitionMatroid:
    """Blocks ``X_1..X_N`` of element ids; independent iff at most one id per block.

    ``blocks[i]`` holds the ids of agent ``i + 1``. Agents plan in block order.
    """

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        if not blocks:
            raise DomainError("a partition matroid needs at least one block")
        seen = {}
        for i, b in enumerate(blocks, start=1):
            if not b:
                raise DomainError(f"block {i} is empty")
            for e in b:
                if e in seen:
                    raise DomainError(f"element {e!r} appears in blocks {seen[e]} and {i}")
                seen[e] = i
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_block_of", seen)

    @classmethod
    def from_elements(cls, elements, order=None):
        """Group ``GroundElement`` objects by their ``block`` field.

        Block numbers must be ``1..N`` without gaps. ``order`` optionally
        permutes the agents: ``order[j]`` is the original block planned ``j``-th.
        """
        by_block = {}
        for e in elements:
            by_block.setdefault(e.block, []).append(e.id)
        n = len(by_block)
        if sorted(by_block) != list(range(1, n + 1)):
            raise DomainError(f"block indices must be 1..N without gaps, got {sorted(by_block)}")
        if order is None:
            order = range(1, n + 1)
        order = list(order)
        if sorted(order) != list(range(1, n + 1)):
            raise DomainError(f"agent order must be a permutation of 1..{n}, got {order}")
        return cls(tuple(by_block[b] for b in order))

    @property
    def n_agents(self):
        return len(self.blocks)

    @property
    def ground(self):
        return frozenset(self._block_of)

    def block_of(self, element):
        """1-based block index of ``element`` in planning order."""
        eid = element.id if isinstance(element, GroundElement) else element
        try:
            return self._block_of[eid]
        except KeyError:
            raise DomainError(f"element {eid!r} is not in the ground set") from None

    def _check(self, S):
        return [self.block_of(s) for s in S]

    def is_independent(self, S):
        blocks = self._check(S)
        return len(blocks) == len(set(blocks))

    def is_maximal(self, S):
        ids = {s.id if isinstance(s, GroundElement) else s for s in S}
        return self.is_independent(ids) and len(ids) == self.n_agents

    def order_by_block(self, S):
        """Return the ids of ``S`` sorted by block."""
        ids = [s.id if isinstance(s, GroundElement) else s for s in S]
        return tuple(sorted(ids, key=self.block_of))

    def n_maximal(self):
        return math.prod(len(b) for b in self.blocks)

    def enumerate_maximal(self, budget=MAXIMAL_BUDGET):
        """Stream every joint assignment (one id per block, in block order)."""
        count = self.n_maximal()
        if count > budget:
            raise CapacityError(f"{count} maximal sets exceed the enumeration budget {budget}")
        return itertools.product(*self.blocks)

    def independent_sets(self):
        """All independent sets as frozensets (exponential; for axiom checks)."""
        return [frozenset(c for c in combo if c is not None)
                for combo in itertools.product(*[(None,) + b for b in self.blocks])]


def is_independent(m, S):
    return m.is_independent(S)


def enumerate_maximal(m, budget=MAXIMAL_BUDGET):
    return m.enumerate_maximal(budget)


def matroid_axiom_check(ground, family=None, budget=AXIOM_BUDGET):
    """Verify downward closure and the exchange axiom on an explicit family.

    ``ground`` may be a ``PartitionMatroid`` (its family is generated) or an
    iterable of elements, in which case ``family`` lists the independent sets.

    Closure is checked one removed element at a time. For exchange, a set
    ``X`` fails iff some member ``Z`` with ``|Z| > |X|`` fits inside ``X``
    plus the elements that cannot augment ``X``; a subset-max table over
    bitmasks answers that in one lookup per ``X``.
    """
    if isinstance(ground, PartitionMatroid):
        if len(ground.ground) > budget:
            raise CapacityError(f"|V|={len(ground.ground)} exceeds the axiom-check budget {budget}")
        family = ground.independent_sets()
        ground = ground.ground
    ground = sorted(set(ground) | {e for s in family for e in s})
    n = len(ground)
    if n > budget:
        raise CapacityError(f"|V|={n} exceeds the axiom-check budget {budget}")
    bit = {e: 1 << i for i, e in enumerate(ground)}
    fam = {sum(bit[e] for e in s) for s in family}
    if not fam:
        return False
    for X in fam:
        for i in range(n):
            if X >> i & 1 and X & ~(1 << i) not in fam:
                return False
    largest = [-1] * (1 << n)
    for X in fam:
        largest[X] = bin(X).count("1")
    for i in range(n):
        step = 1 << i
        for W in range(1 << n):
            if W & step and largest[W ^ step] > largest[W]:
                largest[W] = largest[W ^ step]
    full = (1 << n) - 1
    for X in fam:
        aug = 0
        for i in range(n):
            if not X >> i & 1 and X | 1 << i in fam:
                aug |= 1 << i
        if largest[full & ~aug] > bin(X).count("1"):
            return False
    return True
