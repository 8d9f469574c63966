"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numbers

import numpy as np

from .exceptions import CapacityError, DomainError

DIST_ATOL = 1e-12


def check_probability_vector(p, name="p", atol=DIST_ATOL):
    """Return ``p`` as a float array after checking it is a distribution."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    if np.any(arr < 0):
        raise DomainError(f"{name} has negative entries: {arr}")
    if abs(arr.sum() - 1.0) > atol:
        raise DomainError(f"{name} must sum to 1 (+/-{atol}), sums to {arr.sum()!r}")
    return arr


def check_row_stochastic(m, name="matrix", atol=DIST_ATOL):
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DomainError(f"{name} must be square, got shape {arr.shape}")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must have finite non-negative entries")
    bad = np.abs(arr.sum(axis=1) - 1.0) > atol
    if np.any(bad):
        raise DomainError(f"rows {np.flatnonzero(bad).tolist()} of {name} do not sum to 1")
    return arr


def check_unit_interval(x, name, *, open_right=False):
    arr = np.asarray(x, dtype=float)
    hi_ok = arr < 1 if open_right else arr <= 1
    if np.any(arr < 0) or not np.all(hi_ok) or not np.all(np.isfinite(arr)):
        rng = "[0, 1)" if open_right else "[0, 1]"
        raise DomainError(f"{name} must lie in {rng}, got {x!r}")
    return arr


def check_scalar(x, name, *, min_val=None, max_val=None, include_min=True, include_max=True):
    """Light version of ``sklearn.utils.check_scalar`` raising DomainError."""
    if isinstance(x, bool) or not isinstance(x, numbers.Real):
        raise DomainError(f"{name} must be a real number, got {type(x).__name__}")
    x = float(x)
    if not np.isfinite(x) and not (max_val is None and x == np.inf):
        raise DomainError(f"{name} must be finite, got {x}")
    if min_val is not None and (x < min_val or (x == min_val and not include_min)):
        raise DomainError(f"{name}={x} is below its lower limit {min_val}")
    if max_val is not None and (x > max_val or (x == max_val and not include_max)):
        raise DomainError(f"{name}={x} is above its upper limit {max_val}")
    return x


def check_budget(count, budget, what):
    if count > budget:
        raise CapacityError(f"{what}: {count} exceeds the enumeration budget {budget}")
    return count
