"""Input validation helpers shared by the estimators and region functions."""

import numbers

import numpy as np

PROB_ATOL = 1e-12
BASES = ("bits", "nats")


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(ValueError):
    """A distribution, channel, or configuration is malformed."""


class SupportTooLarge(RuntimeError):
    """Exhaustive enumeration was refused by the resource guard."""

    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"joint support of {size} states exceeds the limit of {limit}")


def check_base(base):
    if base not in BASES:
        raise ValidationError(f"base must be one of {BASES}, got {base!r}")
    return base


def check_probability(p, name="p", upper=1.0):
    if not isinstance(p, numbers.Real) or isinstance(p, bool):
        raise DomainError(f"{name} must be a real number, got {p!r}")
    p = float(p)
    if not (0.0 <= p <= upper):
        raise DomainError(f"{name} must lie in [0, {upper}], got {p}")
    return p


def check_prob_vector(values, name="distribution"):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-D array")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValidationError(f"{name} has negative or non-finite entries")
    if abs(arr.sum() - 1.0) > PROB_ATOL * max(1, arr.size):
        raise ValidationError(f"{name} sums to {arr.sum()!r}, not 1")
    return arr


def check_stochastic(table, name="channel", n_rows=None):
    """Validate a row-stochastic matrix and return it as a float array."""
    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 2-D table")
    if n_rows is not None and arr.shape[0] != n_rows:
        raise ValidationError(f"{name} has {arr.shape[0]} rows, expected {n_rows}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValidationError(f"{name} has negative or non-finite entries")
    sums = arr.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > PROB_ATOL * max(1, arr.shape[1])):
        raise ValidationError(f"rows of {name} do not sum to 1: {sums}")
    return arr


def check_positive_int(value, name):
    if not isinstance(value, numbers.Integral) or isinstance(value, bool) or value < 1:
        raise ValidationError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_random_state(seed):
    """Turn ``None``, an int, or a Generator into a numpy Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
