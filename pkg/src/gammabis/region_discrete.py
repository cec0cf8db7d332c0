"""Capacity-region membership for discrete models.

A rate tuple is in the region when *some* auxiliary channel P(u|y) makes all
five inequalities hold. :func:`check_rates` tests one channel;
:class:`TestChannelSearch` looks for a witness channel by randomized hill
climbing and never claims non-membership.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import ValidationError, check_positive_int
from .models import BinaryBIS, DiscreteBIS, RateQuery, RegionBounds, TestChannel, induced_joint, region_bounds

RATE_TOL = 1e-9

CONSTRAINTS = ("identification_chosen", "identification_generated", "key_sum", "storage", "privacy")


@dataclass(frozen=True)
class RateCheck:
    """Outcome of :func:`check_rates`; ``slacks`` are >= 0 when satisfied."""

    ok: bool
    slacks: dict

    def __bool__(self):
        return self.ok

    @property
    def min_slack(self):
        return min(self.slacks.values())


def theorem1_bounds(bis, test, base="bits"):
    """I(Z;U), I(Y;U), I(X;U) of the joint law induced by ``test``."""
    if isinstance(bis, BinaryBIS):
        bis = bis.to_discrete()
    return region_bounds(induced_joint(bis, test), base)


def _slacks(q, izu, iyu, ixu):
    return {
        "identification_chosen": izu - (q.r_i + q.r_c),
        "identification_generated": izu - (q.r_i + q.r_g),
        "key_sum": izu + min(q.gamma, q.r_c, q.r_g) - (q.r_i + q.r_c + q.r_g),
        "storage": q.r_j - (iyu - izu + q.r_i + q.r_c),
        "privacy": q.r_l - (ixu - izu + q.r_i),
    }


def check_rates(q, b, tol=RATE_TOL):
    """Test the five region inequalities for rates ``q`` against bounds ``b``."""
    if q.base != b.base:
        raise ValidationError(f"rate query is in {q.base} but bounds are in {b.base}")
    slacks = _slacks(q, float(b.izu), float(b.iyu), float(b.ixu))
    return RateCheck(all(s >= -tol for s in slacks.values()), slacks)


def max_rg(b, r_i, r_c, gamma):
    """Largest generated-key rate compatible with ``r_i``, ``r_c`` and ``gamma``.

    Storage and privacy rates are left unconstrained. Returns ``None`` when
    ``r_i + r_c`` already exceeds I(Z;U).
    """
    izu = float(b.izu) if isinstance(b, RegionBounds) else float(b)
    if r_i < 0 or r_c < 0 or gamma < 0:
        raise ValidationError("rates and gamma must be non-negative")
    if r_i + r_c > izu + RATE_TOL:
        return None
    return max(0.0, min(izu - r_i, izu - r_i - r_c + min(gamma, r_c)))


def corollary_region(q, b, variant):
    """Reduced region with no generated key (``"cor1"``) or one user (``"cor2"``).

    Both variants require ``gamma == 0``; ``cor1`` also requires ``r_g == 0``
    and ``cor2`` requires ``r_i == 0``.
    """
    if q.base != b.base:
        raise ValidationError(f"rate query is in {q.base} but bounds are in {b.base}")
    if q.gamma != 0.0:
        raise ValidationError("corollary regions need gamma == 0")
    izu, iyu, ixu = float(b.izu), float(b.iyu), float(b.ixu)
    tol = RATE_TOL
    if variant == "cor1":
        if q.r_g != 0.0:
            raise ValidationError("cor1 needs r_g == 0")
        return (
            q.r_i + q.r_c <= izu + tol
            and q.r_j >= iyu - izu + q.r_i + q.r_c - tol
            and q.r_l >= ixu - izu + q.r_i - tol
        )
    if variant == "cor2":
        if q.r_i != 0.0:
            raise ValidationError("cor2 needs r_i == 0")
        return (
            q.r_c + q.r_g <= izu + tol
            and q.r_j >= iyu - izu + q.r_c - tol
            and q.r_l >= ixu - izu - tol
        )
    raise ValidationError(f"unknown corollary variant {variant!r}")


@dataclass(frozen=True)
class SearchResult:
    found: bool
    witness: TestChannel = None
    restart: int = None
    min_slack: float = float("-inf")
    restarts_run: int = 0

    @property
    def status(self):
        return "witness" if self.found else "not-found"


def _score(bis, q, table):
    b = region_bounds(induced_joint(bis, TestChannel(table)), q.base)
    return min(_slacks(q, float(b.izu), float(b.iyu), float(b.ixu)).values())


def _softmax_rows(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _run_restart(bis, q, u_size, steps, step_size, seed, index, tol):
    rng = np.random.default_rng([seed, index])
    table = rng.dirichlet(np.ones(u_size), size=bis.y_size)
    logits = np.log(np.clip(table, 1e-300, None))
    best = _score(bis, q, table)
    for k in range(steps):
        if best >= -tol:
            break
        scale = step_size * (0.01 ** (k / max(steps - 1, 1)))
        cand_logits = logits + scale * rng.standard_normal(logits.shape)
        cand = _softmax_rows(cand_logits)
        score = _score(bis, q, cand)
        if score > best:
            best, logits, table = score, cand_logits, cand
    return best, table


class TestChannelSearch(BaseEstimator):
    """Multi-start hill climbing for a test channel that certifies membership.

    Each restart draws a Dirichlet channel with |U| = |Y| + 2 and perturbs its
    row logits with a shrinking Gaussian step, keeping moves that raise the
    smallest constraint slack. The lowest-index restart that reaches a
    non-negative slack wins, so results do not depend on ``n_jobs``.

    Parameters
    ----------
    restarts : int
    steps : int
        Proposals per restart.
    step_size : float
        Initial standard deviation of the logit perturbation.
    seed : int
    tol : float
        Slack tolerance on the feasible side.
    n_jobs : int or None
        Restarts evaluated in parallel (joblib).
    """

    __test__ = False

    def __init__(self, restarts=64, steps=500, step_size=1.0, seed=0, tol=RATE_TOL, n_jobs=None):
        self.restarts = restarts
        self.steps = steps
        self.step_size = step_size
        self.seed = seed
        self.tol = tol
        self.n_jobs = n_jobs

    def fit(self, model, rates):
        if isinstance(model, BinaryBIS):
            model = model.to_discrete()
        if not isinstance(model, DiscreteBIS):
            raise ValidationError("search needs a discrete or binary model")
        if not isinstance(rates, RateQuery):
            raise ValidationError("rates must be a RateQuery")
        restarts = check_positive_int(self.restarts, "restarts")
        steps = int(self.steps)
        if steps < 0:
            raise ValidationError("steps must be >= 0")
        u_size = model.y_size + 2
        args = (model, rates, u_size, steps, float(self.step_size), int(self.seed))

        n_jobs = self.n_jobs or 1
        batch = max(1, n_jobs)
        result = SearchResult(found=False)
        best = float("-inf")
        for start in range(0, restarts, batch):
            idx = range(start, min(start + batch, restarts))
            if n_jobs > 1:
                from joblib import Parallel, delayed

                outs = Parallel(n_jobs=n_jobs)(
                    delayed(_run_restart)(*args, i, self.tol) for i in idx
                )
            else:
                outs = [_run_restart(*args, i, self.tol) for i in idx]
            for i, (score, table) in zip(idx, outs):
                best = max(best, score)
                if score >= -self.tol:
                    result = SearchResult(True, TestChannel(table), i, score, i + 1)
                    break
            if result.found:
                break
        if not result.found:
            result = SearchResult(False, None, None, best, restarts)

        self.result_ = result
        self.found_ = result.found
        self.witness_ = result.witness
        self.restart_ = result.restart
        self.min_slack_ = result.min_slack
        return self

    def score(self, model, rates):
        """Best smallest-slack found (>= -tol means a witness exists)."""
        return self.fit(model, rates).min_slack_


def search_test_channel(bis, q, restarts=64, steps=500, step_size=1.0, seed=0, n_jobs=None):
    """Functional wrapper around :class:`TestChannelSearch`."""
    est = TestChannelSearch(restarts=restarts, steps=steps, step_size=step_size, seed=seed, n_jobs=n_jobs)
    return est.fit(bis, q).result_
