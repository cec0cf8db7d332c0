"""Finite-blocklength simulation of the random-binning identification scheme.

Index conventions: every key and index is a 0-based residue. A chosen key
``s_c`` in ``[0, m_gamma * m_c_rest)`` splits into a shared high-order digit
and an unshared low-order digit; the generated key is the pair
``(shared digit of s_c, s2)``. The helper data stored for a user is
``(m, (s_c + s1) mod M_C)``.
"""

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import (
    SupportTooLarge,
    ValidationError,
    check_positive_int,
    check_prob_vector,
    check_random_state,
)
from .info_measures import JointTable, empirical_joint, mutual_information
from .models import BinaryBIS, DiscreteBIS, TestChannel, induced_joint

EXACT_STATE_LIMIT = 2**24
EVENTS = ("E1", "E2", "E3", "E4", "E5", "E6")
TYPICAL_ATOL = 1e-12


@dataclass(frozen=True)
class SimConfig:
    """Blocklength, set sizes, typicality slack and Monte Carlo settings."""

    n: int
    m_i: int = 1
    m_gamma: int = 1
    m_c_rest: int = 1
    m_g_rest: int = 1
    m_m: int = 1
    epsilon: float = 0.2
    seed: int = 0
    trials: int = 1000

    def __post_init__(self):
        for name in ("n", "m_i", "m_gamma", "m_c_rest", "m_g_rest", "m_m", "trials"):
            check_positive_int(getattr(self, name), name)
        if not isinstance(self.epsilon, (int, float)) or not self.epsilon > 0:
            raise ValidationError(f"epsilon must be positive, got {self.epsilon!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")

    @property
    def m_c(self):
        return self.m_gamma * self.m_c_rest

    @property
    def m_g(self):
        return self.m_gamma * self.m_g_rest

    @property
    def codebook_size(self):
        return self.m_c * self.m_g_rest * self.m_m

    @property
    def helper_size(self):
        return self.m_m * self.m_c

    def rates(self):
        """Per-symbol rates in bits implied by the set sizes."""
        n = self.n
        return {
            "r_i": math.log2(self.m_i) / n,
            "r_c": math.log2(self.m_c) / n,
            "r_g": math.log2(self.m_g) / n,
            "gamma": math.log2(self.m_gamma) / n,
            "r_m": math.log2(self.m_m) / n,
            "r_j": math.log2(self.helper_size) / n,
            "codebook": math.log2(self.codebook_size) / n,
        }

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ValidationError("simulation config JSON must be an object")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValidationError(f"bad simulation config: {exc}") from None

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class KeySplit:
    shared: int
    rest: int


def split_key(k, radix_rest, m_gamma=None):
    """Mixed-radix split with the shared digit in the high-order position."""
    radix_rest = check_positive_int(radix_rest, "radix_rest")
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError(f"key index must be a non-negative integer, got {k!r}")
    if m_gamma is not None and k >= m_gamma * radix_rest:
        raise ValueError(f"key index {k} out of range [0, {m_gamma * radix_rest})")
    return KeySplit(int(k) // radix_rest, int(k) % radix_rest)


def join_key(ks, radix_rest):
    if not (0 <= ks.rest < radix_rest) or ks.shared < 0:
        raise ValueError(f"{ks} is not a valid split for radix {radix_rest}")
    return ks.shared * radix_rest + ks.rest


@dataclass(frozen=True, eq=False)
class Codebook:
    """Sequences ``u(s1, s2, m)`` stored as an int array of shape (M_C, m_g_rest, m_m, n)."""

    sequences: np.ndarray
    u_size: int

    def __post_init__(self):
        seqs = np.asarray(self.sequences)
        if seqs.ndim != 4:
            raise ValidationError("codebook must have shape (M_C, m_g_rest, m_m, n)")
        if seqs.size and (seqs.min() < 0 or seqs.max() >= self.u_size):
            raise ValidationError("codebook symbol outside the U alphabet")
        seqs = seqs.astype(np.int64)
        seqs.setflags(write=False)
        object.__setattr__(self, "sequences", seqs)

    @property
    def shape(self):
        return self.sequences.shape[:3]

    @property
    def n(self):
        return self.sequences.shape[3]

    def flat(self):
        return self.sequences.reshape(-1, self.n)


def _sample_rows(rng, cum, inputs):
    """Draw one output symbol per input symbol from row-cumulative table ``cum``."""
    draws = rng.random(inputs.shape)
    return (draws[..., None] >= cum[inputs][..., :-1]).sum(axis=-1)


def generate_codebook(cfg, p_u, rng=None):
    """Draw every codebook symbol i.i.d. from ``p_u``."""
    p_u = check_prob_vector(p_u, "p_u")
    rng = check_random_state(cfg.seed if rng is None else rng)
    shape = (cfg.m_c, cfg.m_g_rest, cfg.m_m, cfg.n)
    seqs = rng.choice(p_u.size, size=shape, p=p_u)
    return Codebook(seqs, p_u.size)


def pair_counts(a, seqs, a_size, b_size):
    """Counts of each symbol pair between ``a`` (n,) and every row of ``seqs`` (K, n)."""
    seqs = np.atleast_2d(seqs)
    k = seqs.shape[0]
    cells = a_size * b_size
    flat = np.asarray(a)[None, :] * b_size + seqs + (np.arange(k) * cells)[:, None]
    return np.bincount(flat.ravel(), minlength=k * cells).reshape(k, a_size, b_size)


def typical_mask(a, seqs, p_ab, epsilon):
    """Strong joint typicality of ``a`` with each row of ``seqs``.

    A pair of sequences is typical when every pair frequency is within
    ``epsilon * p(a, b)`` of ``p(a, b)``; pairs of probability zero must not occur.
    """
    p_ab = np.asarray(p_ab)
    counts = pair_counts(a, seqs, *p_ab.shape)
    freq = counts / len(a)
    ok = np.abs(freq - p_ab[None]) <= epsilon * p_ab[None] + TYPICAL_ATOL
    return ok.all(axis=(1, 2))


@dataclass(frozen=True)
class EnrollmentRecord:
    """Stored helper ``(m, masked)``, generated key ``(s_c1, s2)`` and the encoder's choice."""

    helper: tuple
    generated_key: tuple
    choice: tuple
    encoder_failed: bool = False


@dataclass(frozen=True)
class Decision:
    """Decoder output; ``user`` is ``None`` when no unique candidate exists."""

    user: int = None
    chosen_key: int = None
    generated_key: tuple = None
    typical: np.ndarray = field(default=None, repr=False)

    @property
    def failed(self):
        return self.user is None


@dataclass(frozen=True)
class Truth:
    user: int
    chosen_key: int
    record: EnrollmentRecord


def enroll(y, s_c, cb, cfg, p_yu, rng):
    """Encode one user's enrollment sequence ``y`` and chosen key ``s_c``.

    Picks uniformly among codewords jointly typical with ``y``. When none
    exists the failure is flagged and a codeword is drawn uniformly from the
    whole codebook, so helper data and keys stay well defined.
    """
    if not (0 <= s_c < cfg.m_c):
        raise ValueError(f"chosen key {s_c} out of range [0, {cfg.m_c})")
    mask = typical_mask(np.asarray(y), cb.flat(), p_yu, cfg.epsilon)
    hits = np.flatnonzero(mask)
    failed = hits.size == 0
    pick = int(rng.integers(cb.flat().shape[0])) if failed else int(hits[rng.integers(hits.size)])
    s1, s2, m = (int(v) for v in np.unravel_index(pick, cb.shape))
    shared = split_key(int(s_c), cfg.m_c_rest).shared
    return EnrollmentRecord(
        helper=(m, (int(s_c) + s1) % cfg.m_c),
        generated_key=(shared, s2),
        choice=(s1, s2, m),
        encoder_failed=failed,
    )


def identify(z, helper_db, cb, cfg, p_zu):
    """Look for the unique (user, s1, s2) whose codeword is typical with ``z``."""
    ms = np.array([rec.helper[0] for rec in helper_db])
    seqs = cb.sequences[:, :, ms, :]  # (M_C, m_g_rest, users, n)
    seqs = np.moveaxis(seqs, 2, 0)
    shape = seqs.shape[:3]
    typical = typical_mask(np.asarray(z), seqs.reshape(-1, cb.n), p_zu, cfg.epsilon).reshape(shape)
    cand = np.argwhere(typical)
    if len(cand) != 1:
        return Decision(typical=typical)
    user, s1, s2 = (int(v) for v in cand[0])
    s_c = (helper_db[user].helper[1] - s1) % cfg.m_c
    shared = split_key(s_c, cfg.m_c_rest).shared
    return Decision(user, s_c, (shared, s2), typical)


def classify_error(truth, decision):
    """First applicable error event for the identified user, or ``None``."""
    rec = truth.record
    if rec.encoder_failed:
        return "E1"
    s1, s2, _ = rec.choice
    typ = decision.typical
    own = typ[truth.user]
    if not own[s1, s2]:
        return "E2"
    others_s2 = np.delete(own[s1, :], s2)
    if others_s2.any():
        return "E3"
    if np.delete(own[:, s2], s1).any():
        return "E4"
    if np.delete(np.delete(own, s1, axis=0), s2, axis=1).any():
        return "E5"
    if np.delete(typ, truth.user, axis=0).any():
        return "E6"
    return None


def _as_discrete(bis):
    if isinstance(bis, BinaryBIS):
        return bis.to_discrete()
    if not isinstance(bis, DiscreteBIS):
        raise ValidationError("the simulator needs a discrete or binary model")
    return bis


class BISCodec(BaseEstimator):
    """Random-binning codec: ``fit`` draws the codebook, ``transform`` enrolls,
    ``predict`` identifies.

    Parameters mirror :class:`SimConfig`; ``m_i``, ``trials`` belong to the
    experiment and are not codec parameters.
    """

    def __init__(self, n=8, m_gamma=1, m_c_rest=1, m_g_rest=1, m_m=1, epsilon=0.2, seed=0):
        self.n = n
        self.m_gamma = m_gamma
        self.m_c_rest = m_c_rest
        self.m_g_rest = m_g_rest
        self.m_m = m_m
        self.epsilon = epsilon
        self.seed = seed

    @classmethod
    def from_config(cls, cfg):
        return cls(cfg.n, cfg.m_gamma, cfg.m_c_rest, cfg.m_g_rest, cfg.m_m, cfg.epsilon, cfg.seed)

    def _config(self):
        return SimConfig(
            n=self.n,
            m_gamma=self.m_gamma,
            m_c_rest=self.m_c_rest,
            m_g_rest=self.m_g_rest,
            m_m=self.m_m,
            epsilon=self.epsilon,
            seed=self.seed,
        )

    def fit(self, model, test, codebook=None):
        model = _as_discrete(model)
        if not isinstance(test, TestChannel):
            raise ValidationError("test must be a TestChannel")
        self.config_ = self._config()
        joint = induced_joint(model, test)
        self.model_ = model
        self.test_ = test
        self.p_u_ = joint.marginal("U")
        self.p_yu_ = joint.marginal(("Y", "U"))
        self.p_zu_ = joint.marginal(("Z", "U"))
        if codebook is None:
            codebook = generate_codebook(self.config_, self.p_u_, np.random.default_rng([self.seed, 0]))
        elif codebook.shape != (self.config_.m_c, self.m_g_rest, self.m_m) or codebook.n != self.n:
            raise ValidationError("supplied codebook does not match the codec parameters")
        self.codebook_ = codebook
        return self

    def _check_fitted(self):
        if not hasattr(self, "codebook_"):
            from sklearn.exceptions import NotFittedError

            raise NotFittedError("BISCodec is not fitted yet; call fit first")

    def transform(self, Y, chosen_keys, rng=None):
        """Enroll each row of ``Y`` with the matching chosen key."""
        self._check_fitted()
        Y = np.atleast_2d(np.asarray(Y))
        if Y.shape[1] != self.n:
            raise ValidationError(f"sequences must have length {self.n}")
        rng = check_random_state(rng)
        return [
            enroll(y, int(k), self.codebook_, self.config_, self.p_yu_, rng)
            for y, k in zip(Y, np.atleast_1d(chosen_keys))
        ]

    def predict(self, z, helper_db):
        self._check_fitted()
        z = np.asarray(z)
        if z.shape != (self.n,):
            raise ValidationError(f"z must have length {self.n}")
        return identify(z, helper_db, self.codebook_, self.config_, self.p_zu_)


@dataclass(frozen=True)
class LeakageValue:
    value: float
    exact: bool


@dataclass
class SimReport:
    """Measured error and leakage statistics of one campaign (leakages in bits)."""

    n: int
    trials: int
    errors: int
    error_rate: float
    std_error: float
    event_tallies: dict
    rates: dict
    key_correlation: LeakageValue
    secrecy_leakage: LeakageValue
    privacy_leakage: LeakageValue
    encoder_failure_rate: float = 0.0
    transcript: list = field(default=None, repr=False)

    def to_dict(self):
        out = {
            "unit": "bits",
            "n": self.n,
            "trials": self.trials,
            "errors": self.errors,
            "error_rate": self.error_rate,
            "std_error": self.std_error,
            "encoder_failure_rate": self.encoder_failure_rate,
            "event_tallies": dict(self.event_tallies),
            "rates": dict(self.rates),
        }
        for name in ("key_correlation", "secrecy_leakage", "privacy_leakage"):
            lv = getattr(self, name)
            out[name] = {"value": lv.value, "exact": lv.exact}
        return out


def _trial(codec, cfg, cum_enr, cum_ide, px, t):
    rng = np.random.default_rng([cfg.seed, 1, t])
    x = rng.choice(px.size, size=(cfg.m_i, cfg.n), p=px)
    y = _sample_rows(rng, cum_enr, x)
    keys = rng.integers(cfg.m_c, size=cfg.m_i)
    records = codec.transform(y, keys, rng)
    w = int(rng.integers(cfg.m_i))
    z = _sample_rows(rng, cum_ide, x[w])
    decision = codec.predict(z, records)
    truth = Truth(w, int(keys[w]), records[w])
    event = classify_error(truth, decision)
    # the encoder declares an error when no typical codeword exists
    correct = (
        not records[w].encoder_failed
        and decision.user == w
        and decision.chosen_key == truth.chosen_key
        and decision.generated_key == records[w].generated_key
    )
    sample = (int(keys[w]), records[w].generated_key, records[w].helper, tuple(x[w].tolist()))
    return event, correct, decision.user, w, records[w].encoder_failed, sample


def _trial_chunk(codec, cfg, cum_enr, cum_ide, px, indices):
    return [_trial(codec, cfg, cum_enr, cum_ide, px, t) for t in indices]


def run_monte_carlo(cfg, bis, test, n_jobs=None, transcript=False, codebook=None):
    """Simulate ``cfg.trials`` enrollment/identification rounds.

    Each trial uses its own random stream derived from ``(seed, trial)``, so
    the report is identical for any ``n_jobs``. Leakage fields are plug-in
    estimates over the identified user's samples and are flagged inexact.
    """
    bis = _as_discrete(bis)
    codec = BISCodec.from_config(cfg).fit(bis, test, codebook=codebook)
    cum_enr = np.cumsum(bis.enrollment, axis=1)
    cum_ide = np.cumsum(bis.identification, axis=1)
    trials = range(cfg.trials)
    if n_jobs and n_jobs > 1:
        from joblib import Parallel, delayed

        chunks = np.array_split(np.arange(cfg.trials), n_jobs)
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_trial_chunk)(codec, cfg, cum_enr, cum_ide, bis.px, c.tolist()) for c in chunks
        )
        outcomes = [o for part in parts for o in part]
    else:
        outcomes = _trial_chunk(codec, cfg, cum_enr, cum_ide, bis.px, trials)

    tallies = {e: 0 for e in EVENTS}
    errors = 0
    enc_fail = 0
    rows = []
    for t, (event, correct, w_hat, w, failed, _) in enumerate(outcomes):
        errors += not correct
        enc_fail += failed
        if event is not None:
            tallies[event] += 1
        if transcript:
            rows.append({"trial": t, "event": event or "none", "w": w, "w_hat": w_hat, "correct": correct})
    rate = errors / cfg.trials
    samples = [o[5] for o in outcomes]
    sc, sg, j, xs = zip(*samples)
    table = empirical_joint(sc=sc, sg=sg, j=j, x=xs)
    return SimReport(
        n=cfg.n,
        trials=cfg.trials,
        errors=errors,
        error_rate=rate,
        std_error=math.sqrt(rate * (1 - rate) / cfg.trials),
        event_tallies=tallies,
        rates=cfg.rates(),
        key_correlation=LeakageValue(float(mutual_information(table, "sc", "sg")), False),
        secrecy_leakage=LeakageValue(float(mutual_information(table, ("sc", "sg"), "j")), False),
        privacy_leakage=LeakageValue(float(mutual_information(table, "x", "j")), False),
        encoder_failure_rate=enc_fail / cfg.trials,
        transcript=rows if transcript else None,
    )


@dataclass(frozen=True)
class ExactLeakage:
    """Exact single-user quantities in bits under a fixed codebook."""

    key_correlation: float
    secrecy_leakage: float
    privacy_leakage: float
    chosen_key_helper_leakage: float
    pad_helper_leakage: float
    pad_entropy: float
    encoder_failure_prob: float
    joint: JointTable = field(repr=False, default=None)


def _all_sequences(size, n):
    return np.array(list(itertools.product(range(size), repeat=n)), dtype=np.int64).reshape(-1, n)


def encoder_choice_law(cb, cfg, p_yu, y_seqs):
    """P(codeword index | y) of the encoder for every row of ``y_seqs``."""
    flat = cb.flat()
    law = np.zeros((len(y_seqs), flat.shape[0]))
    failed = np.zeros(len(y_seqs), dtype=bool)
    for r, y in enumerate(y_seqs):
        mask = typical_mask(y, flat, p_yu, cfg.epsilon)
        if mask.any():
            law[r, mask] = 1.0 / mask.sum()
        else:
            failed[r] = True
            law[r, :] = 1.0 / flat.shape[0]
    return law, failed


def exact_leakage(cfg, bis, test, cb, max_states=EXACT_STATE_LIMIT):
    """Enumerate (x^n, y^n, s_c, codeword) to get the leakage quantities exactly.

    Raises :class:`SupportTooLarge` when |X|^n |Y|^n M_C |codebook| exceeds
    ``max_states``.
    """
    bis = _as_discrete(bis)
    n = cfg.n
    size = bis.x_size**n * bis.y_size**n * cfg.m_c * cfg.codebook_size
    if size > max_states:
        raise SupportTooLarge(size, max_states)
    if cb.shape != (cfg.m_c, cfg.m_g_rest, cfg.m_m) or cb.n != n:
        raise ValidationError("codebook does not match the configuration")
    joint_u = induced_joint(bis, test)
    p_yu = joint_u.marginal(("Y", "U"))

    xs = _all_sequences(bis.x_size, n)
    ys = _all_sequences(bis.y_size, n)
    p_x = np.prod(bis.px[xs], axis=1)
    # P(y^n | x^n) for every pair
    p_y_x = np.prod(bis.enrollment[xs[:, None, :], ys[None, :, :]], axis=2)
    law, failed = encoder_choice_law(cb, cfg, p_yu, ys)
    p_y = p_x @ p_y_x
    p_x_v = (p_x[:, None] * p_y_x) @ law  # (X^n, codeword)

    s1, s2, m = np.unravel_index(np.arange(cfg.codebook_size), cb.shape)
    mc = cfg.m_c
    table = np.zeros((len(xs), mc, cfg.m_g, cfg.m_m, mc, mc))
    for s_c in range(mc):
        shared = s_c // cfg.m_c_rest
        sg = shared * cfg.m_g_rest + s2
        masked = (s_c + s1) % mc
        # several codewords can share a cell, so accumulate per column
        for v in range(cfg.codebook_size):
            table[:, s_c, sg[v], m[v], masked[v], s1[v]] += p_x_v[:, v] / mc
    joint = JointTable(("X", "SC", "SG", "M", "K", "S1"), table)
    pad = joint.marginal("S1")
    return ExactLeakage(
        key_correlation=float(mutual_information(joint, "SC", "SG")),
        secrecy_leakage=float(mutual_information(joint, ("SC", "SG"), ("M", "K"))),
        privacy_leakage=float(mutual_information(joint, "X", ("M", "K"))),
        chosen_key_helper_leakage=float(mutual_information(joint, "SC", "K")),
        pad_helper_leakage=float(mutual_information(joint, "S1", "K")),
        pad_entropy=float(joint.entropy("S1")),
        encoder_failure_prob=float(p_y[failed].sum()),
        joint=joint,
    )


def one_time_pad_leakage(pad_law, modulus):
    """I(S; (S + P) mod modulus) in bits for uniform S and independent pad P ~ ``pad_law``."""
    pad_law = check_prob_vector(pad_law, "pad_law")
    if pad_law.size != modulus:
        raise ValidationError("pad law must have one entry per residue")
    table = np.zeros((modulus, modulus))
    for s in range(modulus):
        for p in range(modulus):
            table[s, (s + p) % modulus] += pad_law[p] / modulus
    return float(mutual_information(JointTable(("S", "K"), table), "S", "K"))
