"""Closed-form region for a uniform binary source with symmetric channels.

The boundary is traced by a binary symmetric test channel with crossover
``gamma_param`` in [0, 0.5]. All values are in bits.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import DomainError, ValidationError, check_probability
from .info_measures import binary_entropy, conditional_entropy, inv_binary_entropy, star
from .models import BinaryBIS, induced_joint
from .region_discrete import max_rg

DEFAULT_GRID = 513

_RULES = {"full": 1.0, "full_izu": 1.0, "half": 0.5, "half_izu": 0.5}


@dataclass(frozen=True)
class BinaryRegionPoint:
    gamma_param: float
    izu: float
    iyu: float
    ixu: float
    rj_offset: float
    rl_offset: float


@dataclass(frozen=True)
class SweepRow:
    """One boundary point; ``rg_max`` is ``None`` where the chosen R_C is infeasible."""

    param: float
    izu: float
    rj_min: float
    rg_max: float
    feasible: bool

    @property
    def pair(self):
        return (self.rj_min, self.rg_max)


def rule_fraction(rule):
    try:
        return _RULES[rule]
    except KeyError:
        raise ValidationError(f"unknown chosen-key rule {rule!r}") from None


def binary_point(gamma_param, p_e, p_d):
    g = check_probability(gamma_param, "gamma_param", upper=0.5)
    p_e = check_probability(p_e, "p_e", upper=0.5)
    p_d = check_probability(p_d, "p_d", upper=0.5)
    h_zu = float(binary_entropy(star(star(g, p_e), p_d)))
    h_xu = float(binary_entropy(star(g, p_e)))
    h_yu = float(binary_entropy(g))
    return BinaryRegionPoint(
        gamma_param=g,
        izu=1.0 - h_zu,
        iyu=1.0 - h_yu,
        ixu=1.0 - h_xu,
        rj_offset=h_zu - h_yu,
        rl_offset=h_zu - h_xu,
    )


def boundary_rows(izus, rj_offsets, params, gamma, r_i, rule):
    """Shared sweep construction: set R_C from the rule, then maximise R_G."""
    frac = rule_fraction(rule)
    if gamma < 0 or r_i < 0:
        raise ValidationError("gamma and r_i must be non-negative")
    rows = []
    for param, izu, off in zip(params, izus, rj_offsets):
        r_c = frac * izu
        rg = max_rg(izu, r_i, r_c, gamma)
        rows.append(SweepRow(float(param), float(izu), off + r_i + r_c, rg, rg is not None))
    return rows


def fig3_sweep(p_e, p_d, gamma, r_i=0.0, r_c_rule="full", grid_points=DEFAULT_GRID):
    """Boundary of (R_J, R_G) over a uniform crossover grid on [0, 0.5].

    ``r_c_rule`` fixes the chosen-key rate to I(Z;U) (``"full"``) or half of
    it (``"half"``) at each grid point.
    """
    if int(grid_points) != grid_points or grid_points < 2:
        raise ValidationError("grid_points must be an integer >= 2")
    params = np.linspace(0.0, 0.5, int(grid_points))
    points = [binary_point(g, p_e, p_d) for g in params]
    return boundary_rows(
        [p.izu for p in points], [p.rj_offset for p in points], params, gamma, r_i, r_c_rule
    )


@dataclass(frozen=True)
class MGLReport:
    """Slacks of the two binary-convolution entropy bounds (>= 0 when they hold)."""

    zu_slack: float
    xu_slack: float
    h_xu: float
    h_yu: float
    h_zu: float


def mgl_check(p_e, p_d, test):
    """Check both directions of Mrs. Gerber's Lemma on the induced joint law.

    ``zu_slack`` is H(Z|U) - H_b(H_b^-1(H(X|U)) * p_d) and ``xu_slack`` is
    H(X|U) - H_b(H_b^-1(H(Y|U)) * p_e).
    """
    model = BinaryBIS(p_e, p_d)
    if test.y_size != 2 or test.u_size > 4:
        raise DomainError("mgl_check needs a binary-input test channel with |U| <= 4")
    joint = induced_joint(model.to_discrete(), test)
    h_xu = float(conditional_entropy(joint, "X", "U"))
    h_yu = float(conditional_entropy(joint, "Y", "U"))
    h_zu = float(conditional_entropy(joint, "Z", "U"))
    zu_bound = float(binary_entropy(star(inv_binary_entropy(h_xu), model.p_d)))
    xu_bound = float(binary_entropy(star(inv_binary_entropy(h_yu), model.p_e)))
    return MGLReport(h_zu - zu_bound, h_xu - xu_bound, h_xu, h_yu, h_zu)
