"""Parametric region for scalar Gaussian sources (natural units).

The boundary is indexed by ``alpha`` in (0, 1], the conditional variance of
Y given a jointly Gaussian auxiliary U.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from ._validation import DomainError, ValidationError, check_base
from .info_measures import LN2
from .region_binary import boundary_rows

DEFAULT_GRID = 256
ALPHA_MIN = 1e-4
TWO_PI_E = 2.0 * math.pi * math.e


def _check_alpha(alpha):
    if not isinstance(alpha, (int, float, np.floating)) or not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    return float(alpha)


@dataclass(frozen=True)
class GaussianRegionPoint:
    alpha: float
    izu: float
    iyu: float
    ixu: float
    rj_offset: float
    rl_offset: float
    base: str = "nats"

    def to(self, base):
        check_base(base)
        if base == self.base:
            return self
        f = 1.0 / LN2 if base == "bits" else LN2
        return replace(
            self,
            izu=self.izu * f,
            iyu=self.iyu * f,
            ixu=self.ixu * f,
            rj_offset=self.rj_offset * f,
            rl_offset=self.rl_offset * f,
            base=base,
        )


def _variances(alpha, g):
    r1, r2 = g.rho1**2, g.rho2**2
    var_xu = alpha * r1 + 1.0 - r1
    var_zu = alpha * r1 * r2 + 1.0 - r1 * r2
    return var_xu, var_zu


def gaussian_point(alpha, g):
    alpha = _check_alpha(alpha)
    var_xu, var_zu = _variances(alpha, g)
    return GaussianRegionPoint(
        alpha=alpha,
        izu=0.5 * math.log(1.0 / var_zu),
        iyu=0.5 * math.log(1.0 / alpha),
        ixu=0.5 * math.log(1.0 / var_xu),
        rj_offset=0.5 * math.log(var_zu / alpha),
        rl_offset=0.5 * math.log(var_zu / var_xu),
    )


def alpha_grid(grid=DEFAULT_GRID, alpha_min=ALPHA_MIN):
    if int(grid) != grid or grid < 2:
        raise ValidationError("grid must be an integer >= 2")
    if not (0.0 < alpha_min < 1.0):
        raise ValidationError("alpha_min must lie in (0, 1)")
    alphas = np.geomspace(alpha_min, 1.0, int(grid))
    alphas[-1] = 1.0
    return alphas


def gaussian_sweep(g, gamma, r_i=0.0, r_c_rule="full", grid=DEFAULT_GRID, alpha_min=ALPHA_MIN):
    """Boundary rows over a log-spaced alpha grid, smallest alpha first.

    Returns ``(points, rows)``: the :class:`GaussianRegionPoint` at each
    alpha and the matching sweep rows in nats.
    """
    alphas = alpha_grid(grid, alpha_min)
    points = [gaussian_point(a, g) for a in alphas]
    rows = boundary_rows(
        [p.izu for p in points], [p.rj_offset for p in points], alphas, gamma, r_i, r_c_rule
    )
    return points, rows


@dataclass(frozen=True)
class EPIReport:
    """Entropy-power-inequality slacks in units of 2*pi*e (>= 0 when they hold).

    ``zu_slack`` compares exp(2h(Z|U)) with rho2^2 exp(2h(X|U)) + 2*pi*e*(1 - rho2^2);
    ``yu_slack`` compares exp(2h(X|U)) with rho1^2 exp(2h(Y|U)) + 2*pi*e*(1 - rho1^2).
    """

    zu_slack: float
    yu_slack: float
    h_xu: float
    h_yu: float
    h_zu: float


def epi_verify(alpha, g):
    """Evaluate both conditional EPI bounds for the jointly Gaussian auxiliary.

    h(X|U) is pinned to 0.5*ln(2*pi*e*(alpha*rho1^2 + 1 - rho1^2)). h(Y|U) and
    h(Z|U) come from the construction Y = U + Phi, Phi ~ N(0, alpha), pushed
    through the converted channels. The Gaussian choice meets both bounds
    with equality, so the slacks should vanish.
    """
    alpha = _check_alpha(alpha)
    c = g.converted()
    pinned_var_xu = alpha * g.rho1**2 + 1.0 - g.rho1**2
    # residual variances of the construction, stage by stage
    var_yu = alpha
    var_xu = c.xy_coef**2 * var_yu + c.xy_noise_var
    var_zu = c.zx_coef**2 * var_xu + c.zx_noise_var
    zu_slack = var_zu - (c.zx_coef**2 * pinned_var_xu + c.zx_noise_var)
    yu_slack = pinned_var_xu - (c.xy_coef**2 * var_yu + c.xy_noise_var)
    return EPIReport(
        zu_slack=zu_slack,
        yu_slack=yu_slack,
        h_xu=0.5 * math.log(TWO_PI_E * pinned_var_xu),
        h_yu=0.5 * math.log(TWO_PI_E * var_yu),
        h_zu=0.5 * math.log(TWO_PI_E * var_zu),
    )
