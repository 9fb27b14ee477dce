"""Destination decision rules.

Every receiver follows the same recipe: build per-slot log-likelihoods
``LL[..., k, s] = log p(obs_k | slot k carries symbol s)``, add them along
each codeword of the codebook, and marginalise the codeword log-likelihoods
onto each user's symbol with log-sum-exp.  Receivers differ only in how the
network-coded slots are modelled.  All functions accept a leading batch shape.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import modem
from .codec import NetworkCode
from .equivalent import EquivalentKind, EquivalentScaling, equivalent_coefficients, equivalent_gamma


class ReceiverKind(enum.Enum):
    OPT_SOFT = "opt-soft"
    OPT_HARD = "opt-hard"
    NOSTATS_SOFT = "nostats-soft"
    QINV_SOFT = "qinv-soft"
    QINV_HARD = "qinv-hard"
    MIN_SOFT = "min-soft"
    MIN_HARD = "min-hard"

    @property
    def is_soft(self) -> bool:
        return self.value.endswith("soft")


@dataclass
class DestinationSideInfo:
    """What the destination knows about one block (or a batch of blocks).

    h : (..., K) destination fading coefficients, systematic slots first.
    relay_log_probs : (..., K-N, q) log p(e_R) per parity slot, or None.
    foreign_gamma : per parity slot, (..., n_l) SNRs of the links into its
        relay from ``code.foreign_sources(l)``; needed by minimum receivers.
    """

    code: NetworkCode
    h: np.ndarray
    relay_log_probs: np.ndarray | None = None
    foreign_gamma: tuple[np.ndarray, ...] | None = None
    sigma2: float = 1.0

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=complex)
        if self.h.shape[-1] != self.code.K:
            raise ValueError(f"need {self.code.K} destination links, got {self.h.shape[-1]}")
        if self.relay_log_probs is not None:
            self.relay_log_probs = np.asarray(self.relay_log_probs, dtype=float)
            want = (self.code.K - self.code.N, self.code.q)
            if self.relay_log_probs.shape[-2:] != want:
                raise ValueError(f"relay statistics must have trailing shape {want}")

    @property
    def gamma(self) -> np.ndarray:
        return np.abs(self.h) ** 2 / self.sigma2

    @classmethod
    def from_links(cls, code, dest_links, relay_stats=None, foreign_links=None, sigma2=1.0):
        """Single-block side info from LinkRealization / RelayErrorDistribution objects.

        ``foreign_links[l]`` maps 0-based user index to the user -> relay link of parity l.
        """
        h = np.array([lk.h for lk in dest_links])
        lp = None if relay_stats is None else np.stack([d.log_probs for d in relay_stats])
        fg = None
        if foreign_links is not None:
            fg = tuple(
                np.array([foreign_links[l][n].gamma for n in code.foreign_sources(l)], dtype=float)
                for l in range(code.K - code.N)
            )
        return cls(code, h, lp, fg, sigma2)


@dataclass
class Decision:
    u_hat: np.ndarray
    per_user_metrics: np.ndarray  # (..., N, q) normalised log posteriors
    fallback: bool = False
    notes: list[str] = field(default_factory=list)


# --------------------------------------------------------------------------
# per-slot log-likelihoods


def soft_slot_loglik(y, h, sigma2, code: NetworkCode) -> np.ndarray:
    """Gaussian log-likelihoods; ``sigma2`` may be a per-slot array.  Infinite noise gives a flat row."""
    pts = modem.constellation(code.M).label_points
    y = np.asarray(y)[..., None]
    h = np.asarray(h)[..., None]
    s2 = np.asarray(sigma2, dtype=float)[..., None]
    flat = np.isinf(s2)
    s2 = np.where(flat, 1.0, s2)
    ll = -np.log(np.pi * s2) - np.abs(y - h * pts) ** 2 / s2
    return np.where(flat, 0.0, ll)


def hard_slot_loglik(z, gamma, code: NetworkCode) -> np.ndarray:
    gf = code.field
    law = modem.log_error_law(gamma, modem.constellation(code.M), gf)  # (..., K, q)
    idx = gf.sub_table[np.asarray(z)[..., None], np.arange(gf.q)]  # z - s
    return np.take_along_axis(law, idx, axis=-1)


def symmetric_slot_loglik(z, log_sep, q: int) -> np.ndarray:
    """q-ary symmetric channel: keep w.p. 1 - P, else uniform over the q - 1 others."""
    log_sep = np.asarray(log_sep, dtype=float)
    stay = modem.log1mexp(np.minimum(log_sep, 0.0))
    move = log_sep - np.log(q - 1)
    hit = np.asarray(z)[..., None] == np.arange(q)
    return np.where(hit, stay[..., None], move[..., None])


def mix_relay_errors(ll: np.ndarray, log_pe: np.ndarray, code: NetworkCode) -> np.ndarray:
    """log sum_e p(e) p(obs | s + e) for each candidate s."""
    add = code.field.add_table  # add[s, e]
    return special.logsumexp(ll[..., add] + log_pe[..., None, :], axis=-1)


# --------------------------------------------------------------------------
# codeword combination


def combine(ll: np.ndarray, code: NetworkCode, fallback: bool = False) -> Decision:
    """Marginal per-user log posteriors from per-slot log-likelihoods (..., K, q)."""
    _, words = code.codebook_labels()
    K, N, q = code.K, code.N, code.q
    cw = ll[..., np.arange(K), words].sum(axis=-1)  # (..., q^N)
    grid = cw.reshape(cw.shape[:-1] + (q,) * N)
    batch_nd = cw.ndim - 1
    metrics = np.empty(cw.shape[:-1] + (N, q))
    for i in range(N):
        other = tuple(batch_nd + j for j in range(N) if j != i)
        metrics[..., i, :] = special.logsumexp(grid, axis=other) if other else grid
    metrics -= special.logsumexp(metrics, axis=-1, keepdims=True)
    u_hat = np.argmax(metrics, axis=-1)
    return Decision(u_hat, metrics, fallback)


def _parity(code: NetworkCode) -> slice:
    return slice(code.N, code.K)


def decide_soft_nostats(y, side: DestinationSideInfo) -> Decision:
    ll = soft_slot_loglik(y, side.h, side.sigma2, side.code)
    return combine(ll, side.code)


def decide_soft_optimal(y, side: DestinationSideInfo) -> Decision:
    if side.relay_log_probs is None:
        d = decide_soft_nostats(y, side)
        d.fallback = True
        d.notes.append("relay statistics missing: used the no-statistics rule")
        return d
    code = side.code
    ll = soft_slot_loglik(y, side.h, side.sigma2, code)
    par = _parity(code)
    ll[..., par, :] = mix_relay_errors(ll[..., par, :], side.relay_log_probs, code)
    return combine(ll, code)


def _hard_nostats(z, side: DestinationSideInfo) -> np.ndarray:
    return hard_slot_loglik(z, side.gamma, side.code)


def decide_hard_optimal(z, side: DestinationSideInfo) -> Decision:
    code = side.code
    ll = _hard_nostats(z, side)
    if side.relay_log_probs is None:
        d = combine(ll, code, fallback=True)
        d.notes.append("relay statistics missing: used the no-statistics rule")
        return d
    par = _parity(code)
    ll[..., par, :] = mix_relay_errors(ll[..., par, :], side.relay_log_probs, code)
    return combine(ll, code)


def equivalent_gammas(kind: EquivalentKind, side: DestinationSideInfo) -> np.ndarray:
    """(..., K-N) equivalent SNRs of the network-coded slots."""
    code = side.code
    L = code.K - code.N
    g_rd = side.gamma[..., code.N :]
    out = np.empty(g_rd.shape)
    for l in range(L):
        if kind is EquivalentKind.Q_INVERSE:
            if side.relay_log_probs is None:
                raise ValueError("Q-inverse receivers need relay statistics")
            out[..., l] = equivalent_gamma(kind, code, side.relay_log_probs[..., l, :], g_rd[..., l], None)
        else:
            if side.foreign_gamma is None:
                raise ValueError("minimum receivers need the foreign link SNRs")
            out[..., l] = equivalent_gamma(kind, code, None, g_rd[..., l], side.foreign_gamma[l])
    return out


def decide_soft_equivalent(
    kind: EquivalentKind, y, side: DestinationSideInfo, scaling: EquivalentScaling = EquivalentScaling.NOISE
) -> Decision:
    """No-statistics rule with each coded slot replaced by its equivalent Gaussian channel."""
    code = side.code
    g_eq = equivalent_gammas(kind, side)
    h_eq, s2_eq = equivalent_coefficients(g_eq, side.h[..., code.N :], side.sigma2, scaling)
    h = side.h.copy()
    h[..., code.N :] = h_eq
    s2 = np.broadcast_to(np.float64(side.sigma2), side.h.shape).copy()
    s2[..., code.N :] = s2_eq
    ll = soft_slot_loglik(y, h, s2, code)
    return combine(ll, code)


def decide_hard_equivalent(kind: EquivalentKind, z, side: DestinationSideInfo) -> Decision:
    code = side.code
    g_eq = equivalent_gammas(kind, side)
    ll = _hard_nostats(z, side)
    if kind is EquivalentKind.Q_INVERSE:
        lsep = modem.log_sep_approx(g_eq, code.M)
    else:
        rows = modem.log_index_rows(g_eq, code.M)
        lsep = special.logsumexp(rows[..., 1:], axis=-1)
    ll[..., code.N :, :] = symmetric_slot_loglik(np.asarray(z)[..., code.N :], lsep, code.q)
    return combine(ll, code)


def decide(kind: ReceiverKind, y, z, side: DestinationSideInfo) -> Decision:
    """Dispatch by receiver kind; soft kinds read y, hard kinds read z."""
    if kind is ReceiverKind.OPT_SOFT:
        return decide_soft_optimal(y, side)
    if kind is ReceiverKind.NOSTATS_SOFT:
        return decide_soft_nostats(y, side)
    if kind is ReceiverKind.OPT_HARD:
        return decide_hard_optimal(z, side)
    if kind is ReceiverKind.QINV_SOFT:
        return decide_soft_equivalent(EquivalentKind.Q_INVERSE, y, side)
    if kind is ReceiverKind.MIN_SOFT:
        return decide_soft_equivalent(EquivalentKind.MINIMUM, y, side)
    if kind is ReceiverKind.QINV_HARD:
        return decide_hard_equivalent(EquivalentKind.Q_INVERSE, z, side)
    if kind is ReceiverKind.MIN_HARD:
        return decide_hard_equivalent(EquivalentKind.MINIMUM, z, side)
    raise ValueError(f"unknown receiver {kind}")
