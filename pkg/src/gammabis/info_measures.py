"""Entropy and mutual information on finite distributions.

Every quantity is returned as an :class:`InfoValue`, a ``float`` that also
remembers whether it is measured in bits or nats.
"""

import math

import numpy as np

from ._validation import (
    PROB_ATOL,
    DomainError,
    ValidationError,
    check_base,
    check_probability,
    check_prob_vector,
)

# masses below this are treated as exact zeros inside logarithms
ZERO_MASS = 1e-15
LN2 = math.log(2.0)


class InfoValue(float):
    """Non-negative information amount tagged with its unit.

    Arithmetic on an ``InfoValue`` yields a plain ``float``; use :meth:`to`
    to change units explicitly.
    """

    def __new__(cls, amount, base="bits"):
        check_base(base)
        amount = float(amount)
        if amount < 0.0:
            if amount < -PROB_ATOL:
                raise ValidationError(f"information amount {amount} is negative")
            amount = 0.0
        obj = super().__new__(cls, amount)
        obj.base = base
        return obj

    @property
    def amount(self):
        return float(self)

    def to(self, base):
        check_base(base)
        if base == self.base:
            return self
        if base == "nats":
            return InfoValue(float(self) * LN2, "nats")
        return InfoValue(float(self) / LN2, "bits")

    def __repr__(self):
        return f"InfoValue({float(self)!r}, {self.base!r})"

    def __reduce__(self):
        return (InfoValue, (float(self), self.base))


def _log(x, base):
    return np.log2(x) if base == "bits" else np.log(x)


def _plogp_sum(mass, base):
    mass = np.asarray(mass, dtype=float).ravel()
    mass = mass[mass > ZERO_MASS]
    return -float(np.sum(mass * _log(mass, base)))


def binary_entropy(p, base="bits"):
    """Binary entropy of ``p``; ``0 log 0`` is taken as 0."""
    p = check_probability(p)
    check_base(base)
    if p <= ZERO_MASS or p >= 1.0 - ZERO_MASS:
        return InfoValue(0.0, base)
    q = 1.0 - p
    return InfoValue(-(p * _log(p, base) + q * _log(q, base)), base)


def binary_entropy_array(p, base="bits"):
    """Vectorised :func:`binary_entropy` for numpy input, returning floats."""
    check_base(base)
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise DomainError("probabilities must lie in [0, 1]")
    out = np.zeros_like(p)
    inner = (p > ZERO_MASS) & (p < 1.0 - ZERO_MASS)
    pi = p[inner]
    out[inner] = -(pi * _log(pi, base) + (1.0 - pi) * _log(1.0 - pi, base))
    return out


def inv_binary_entropy(h, xtol=1e-12, max_iter=200):
    """Return the ``p`` in [0, 0.5] whose binary entropy (in bits) is ``h``.

    Bisection keeps the result monotone in ``h``.
    """
    if not isinstance(h, (int, float, np.floating, np.integer)) or isinstance(h, bool):
        raise DomainError(f"entropy must be a real number, got {h!r}")
    h = float(h)
    if h < 0.0 or h > 1.0:
        if -PROB_ATOL <= h < 0.0:
            h = 0.0
        elif 1.0 < h <= 1.0 + PROB_ATOL:
            h = 1.0
        else:
            raise DomainError(f"binary entropy must lie in [0, 1] bits, got {h}")
    if h == 0.0:
        return 0.0
    if h == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(max_iter):
        if hi - lo < xtol:
            break
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def star(a, b):
    """Crossover of two cascaded binary symmetric channels."""
    a = check_probability(a, "a")
    b = check_probability(b, "b")
    return min(1.0, max(0.0, a * (1.0 - b) + (1.0 - a) * b))


def entropy(dist, base="bits"):
    """Shannon entropy of a probability vector."""
    check_base(base)
    arr = check_prob_vector(dist)
    return InfoValue(_plogp_sum(arr, base), base)


class JointTable:
    """A joint probability mass function with named axes.

    Parameters
    ----------
    axes : sequence of str
        One unique name per array dimension.
    mass : array_like
        Non-negative table summing to one.
    """

    def __init__(self, axes, mass):
        mass = np.asarray(mass, dtype=float)
        axes = tuple(axes)
        if len(set(axes)) != len(axes):
            raise ValidationError(f"axis names must be unique: {axes}")
        if mass.ndim != len(axes):
            raise ValidationError(
                f"table has {mass.ndim} dimensions but {len(axes)} axis names"
            )
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise ValidationError("joint table has negative or non-finite entries")
        if abs(mass.sum() - 1.0) > PROB_ATOL * max(1.0, math.sqrt(mass.size)):
            raise ValidationError(f"joint table sums to {mass.sum()!r}, not 1")
        self.axes = axes
        self.mass = mass
        self.mass.setflags(write=False)

    @property
    def shape(self):
        return self.mass.shape

    def _index(self, name):
        try:
            return self.axes.index(name)
        except ValueError:
            raise KeyError(f"unknown axis {name!r}; table has {self.axes}") from None

    def _names(self, names):
        if isinstance(names, str):
            return (names,)
        return tuple(names)

    def marginal(self, names):
        """Marginal table over ``names`` (kept in the given order)."""
        names = self._names(names)
        idx = [self._index(n) for n in names]
        drop = tuple(i for i in range(len(self.axes)) if i not in idx)
        m = self.mass.sum(axis=drop) if drop else self.mass
        kept = [i for i in range(len(self.axes)) if i in idx]
        order = [kept.index(i) for i in idx]
        return np.transpose(m, order) if m.ndim > 1 else m

    def entropy(self, names, base="bits"):
        check_base(base)
        return InfoValue(_plogp_sum(self.marginal(names), base), base)


def conditional_entropy(joint, target, given, base="bits"):
    """H(target | given); either argument may be one axis name or several."""
    target = joint._names(target)
    given = joint._names(given) if given else ()
    if not given:
        return joint.entropy(target, base)
    h_all = joint.entropy(target + tuple(g for g in given if g not in target), base)
    return InfoValue(float(h_all) - float(joint.entropy(given, base)), base)


def mutual_information(joint, a, b, base="bits"):
    """I(A;B) after marginalising every other axis out of ``joint``."""
    a = joint._names(a)
    b = joint._names(b)
    if set(a) & set(b):
        raise ValidationError("mutual information needs disjoint axis groups")
    value = (
        float(joint.entropy(a, base))
        + float(joint.entropy(b, base))
        - float(joint.entropy(a + b, base))
    )
    return InfoValue(value, base)


def empirical_joint(**samples):
    """Plug-in joint table from paired samples of hashable symbols.

    >>> t = empirical_joint(a=[0, 1, 1], b=[0, 1, 1])
    >>> t.axes
    ('a', 'b')
    """
    names = tuple(samples)
    if not names:
        raise ValidationError("need at least one sample column")
    columns = [list(samples[n]) for n in names]
    size = len(columns[0])
    if size == 0 or any(len(c) != size for c in columns):
        raise ValidationError("sample columns must be non-empty and equally long")
    codes = []
    for col in columns:
        lookup = {}
        codes.append([lookup.setdefault(v, len(lookup)) for v in col])
    shape = tuple(max(c) + 1 for c in codes)
    counts = np.zeros(shape)
    np.add.at(counts, tuple(np.asarray(c) for c in codes), 1.0)
    return JointTable(names, counts / size)
