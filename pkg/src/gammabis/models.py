"""Source/channel models, auxiliary test channels and rate queries."""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import (
    ValidationError,
    check_base,
    check_probability,
    check_prob_vector,
    check_stochastic,
)
from .info_measures import InfoValue, JointTable, mutual_information

ORDER_TOL = 1e-10


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteBIS:
    """Source ``px`` with enrollment channel P(y|x) and identification channel P(z|x).

    Alphabets are integer ranges; row ``x`` of each channel is the output law
    given input symbol ``x``.
    """

    px: np.ndarray
    enrollment: np.ndarray
    identification: np.ndarray

    def __post_init__(self):
        px = check_prob_vector(self.px, "px")
        enr = check_stochastic(self.enrollment, "enrollment", n_rows=px.size)
        ide = check_stochastic(self.identification, "identification", n_rows=px.size)
        object.__setattr__(self, "px", _frozen(px))
        object.__setattr__(self, "enrollment", _frozen(enr))
        object.__setattr__(self, "identification", _frozen(ide))

    @property
    def x_size(self):
        return self.px.size

    @property
    def y_size(self):
        return self.enrollment.shape[1]

    @property
    def z_size(self):
        return self.identification.shape[1]

    @property
    def py(self):
        return self.px @ self.enrollment

    def to_dict(self):
        return {
            "kind": "discrete",
            "px": self.px.tolist(),
            "enrollment": self.enrollment.tolist(),
            "identification": self.identification.tolist(),
        }


@dataclass(frozen=True)
class BinaryBIS:
    """Uniform binary source observed through two binary symmetric channels."""

    p_e: float
    p_d: float

    def __post_init__(self):
        object.__setattr__(self, "p_e", check_probability(self.p_e, "p_e", upper=0.5))
        object.__setattr__(self, "p_d", check_probability(self.p_d, "p_d", upper=0.5))

    def to_discrete(self):
        return binary_to_discrete(self)

    def to_dict(self):
        return {"kind": "binary", "p_e": self.p_e, "p_d": self.p_d}


@dataclass(frozen=True)
class ConvertedGaussian:
    """Reverse-direction form X = xy_coef*Y + N1', Z = zx_coef*X + N2."""

    xy_coef: float
    xy_noise_var: float
    zx_coef: float
    zx_noise_var: float

    @property
    def zy_coef(self):
        return self.xy_coef * self.zx_coef

    @property
    def zy_noise_var(self):
        return self.zx_coef**2 * self.xy_noise_var + self.zx_noise_var

    @property
    def x_var(self):
        # Y is standard normal in the converted form as well
        return self.xy_coef**2 + self.xy_noise_var


@dataclass(frozen=True)
class GaussianBIS:
    """Standard Gaussian source with Y = rho1*X + N1 and Z = rho2*X + N2."""

    rho1: float
    rho2: float

    def __post_init__(self):
        for name in ("rho1", "rho2"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValidationError(f"{name} must be a finite real number")
            if abs(value) >= 1.0:
                raise ValidationError(f"|{name}| must be < 1, got {value}")
            object.__setattr__(self, name, float(value))

    @property
    def enrollment_noise_var(self):
        return 1.0 - self.rho1**2

    @property
    def identification_noise_var(self):
        return 1.0 - self.rho2**2

    def converted(self):
        return converted_gaussian(self)

    def to_dict(self):
        return {"kind": "gaussian", "rho1": self.rho1, "rho2": self.rho2}


@dataclass(frozen=True, eq=False)
class TestChannel:
    """Auxiliary channel P(u|y) stored as a |Y| x |U| row-stochastic table."""

    __test__ = False  # keep pytest from collecting this class

    table: np.ndarray

    def __post_init__(self):
        table = check_stochastic(self.table, "test channel")
        if table.shape[1] > table.shape[0] + 2:
            raise ValidationError(
                f"|U| = {table.shape[1]} exceeds |Y| + 2 = {table.shape[0] + 2}"
            )
        object.__setattr__(self, "table", _frozen(table))

    @property
    def y_size(self):
        return self.table.shape[0]

    @property
    def u_size(self):
        return self.table.shape[1]

    @classmethod
    def bsc(cls, crossover):
        g = check_probability(crossover, "crossover")
        return cls([[1.0 - g, g], [g, 1.0 - g]])

    @classmethod
    def constant(cls, y_size, u_size=1):
        table = np.zeros((y_size, u_size))
        table[:, 0] = 1.0
        return cls(table)

    @classmethod
    def identity(cls, y_size):
        return cls(np.eye(y_size))

    def to_dict(self):
        return {"table": self.table.tolist()}


@dataclass(frozen=True)
class RateQuery:
    """Candidate rate tuple plus the key-correlation budget, in one unit."""

    r_i: float
    r_c: float
    r_g: float
    r_j: float
    r_l: float
    gamma: float = 0.0
    base: str = "bits"

    def __post_init__(self):
        check_base(self.base)
        for name in ("r_i", "r_c", "r_g", "r_j", "r_l", "gamma"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not value >= 0.0:
                raise ValidationError(f"{name} must be a non-negative number, got {value!r}")
            object.__setattr__(self, name, float(value))

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ValidationError("rate query JSON must be an object")
        known = {"r_i", "r_c", "r_g", "r_j", "r_l", "gamma", "base"}
        extra = set(data) - known
        if extra:
            raise ValidationError(f"unknown rate fields: {sorted(extra)}")
        missing = {"r_i", "r_c", "r_g", "r_j", "r_l"} - set(data)
        if missing:
            raise ValidationError(f"missing rate fields: {sorted(missing)}")
        return cls(**data)

    def to_dict(self):
        return {k: getattr(self, k) for k in ("r_i", "r_c", "r_g", "r_j", "r_l", "gamma", "base")}


@dataclass(frozen=True)
class RegionBounds:
    """I(Z;U), I(Y;U), I(X;U) for one auxiliary channel."""

    izu: float
    iyu: float
    ixu: float
    base: str = "bits"

    def __post_init__(self):
        check_base(self.base)
        for name in ("izu", "iyu", "ixu"):
            object.__setattr__(self, name, InfoValue(getattr(self, name), self.base))
        if not (self.iyu >= self.ixu - ORDER_TOL and self.ixu >= self.izu - ORDER_TOL):
            raise ValidationError(
                f"bounds violate I(Y;U) >= I(X;U) >= I(Z;U): {self.iyu}, {self.ixu}, {self.izu}"
            )


def model_from_dict(data):
    """Build a model from its JSON form ``{"kind": ..., ...}``."""
    if not isinstance(data, dict) or "kind" not in data:
        raise ValidationError("model JSON must be an object with a 'kind' field")
    fields_ = {k: v for k, v in data.items() if k != "kind"}
    kinds = {"discrete": DiscreteBIS, "binary": BinaryBIS, "gaussian": GaussianBIS}
    try:
        cls = kinds[data["kind"]]
    except KeyError:
        raise ValidationError(f"unknown model kind {data['kind']!r}") from None
    try:
        return cls(**fields_)
    except TypeError as exc:
        raise ValidationError(f"bad fields for {data['kind']} model: {exc}") from None


def binary_to_discrete(b):
    """Matrix form of a :class:`BinaryBIS`."""
    def bsc(p):
        return [[1.0 - p, p], [p, 1.0 - p]]

    return DiscreteBIS([0.5, 0.5], bsc(b.p_e), bsc(b.p_d))


def converted_gaussian(g):
    return ConvertedGaussian(
        xy_coef=g.rho1,
        xy_noise_var=1.0 - g.rho1**2,
        zx_coef=g.rho2,
        zx_noise_var=1.0 - g.rho2**2,
    )


def induced_joint(bis, test):
    """Joint law of (U, Y, X, Z) under the chain Z - X - Y - U."""
    if test.y_size != bis.y_size:
        raise ValidationError(
            f"test channel expects |Y| = {test.y_size}, model has |Y| = {bis.y_size}"
        )
    mass = np.einsum(
        "x,xy,xz,yu->uyxz", bis.px, bis.enrollment, bis.identification, test.table
    )
    return JointTable(("U", "Y", "X", "Z"), mass)


def region_bounds(joint, base="bits"):
    return RegionBounds(
        izu=mutual_information(joint, "Z", "U", base),
        iyu=mutual_information(joint, "Y", "U", base),
        ixu=mutual_information(joint, "X", "U", base),
        base=base,
    )
