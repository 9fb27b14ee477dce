"""Detect-and-forward relaying and the law of the network-coded relay error.

A relay forms sum_n g_n * (own symbol or detected foreign symbol).  Its
network-coded error e_R is therefore sum over foreign sources of
g_n * delta_n, where delta_n = detected - sent is the detection error on the
link from user n.  For the supported mappings delta_n has a law that does not
depend on the sent symbol, which makes p(e_R) well defined.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import special

from . import modem
from .channel import LinkRealization
from .codec import NetworkCode
from .galois import GaloisField, GfElement


@dataclass(frozen=True)
class RelayErrorDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < -1e-15) or abs(p.sum() - 1) > 1e-9:
            raise ValueError("relay error probabilities must be a distribution")
        object.__setattr__(self, "probs", p)

    @property
    def log_probs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.maximum(np.log(self.probs), modem.LOG_FLOOR)


class RelayError(ValueError):
    pass


# --------------------------------------------------------------------------
# log-domain algebra over GF(q) distributions


def log_point_mass(gf: GaloisField, shape=()) -> np.ndarray:
    out = np.full(tuple(shape) + (gf.q,), modem.LOG_FLOOR)
    out[..., 0] = 0.0
    return out


def log_scale(logp: np.ndarray, g: int, gf: GaloisField) -> np.ndarray:
    """Law of g * e given the law of e (g != 0 permutes the labels)."""
    if g == 0:
        return log_point_mass(gf, logp.shape[:-1])
    return logp[..., gf.mul_table[gf.inv(g)]]


def log_convolve(a: np.ndarray, b: np.ndarray, gf: GaloisField) -> np.ndarray:
    """Law of x + y for independent x ~ a, y ~ b (log domain, GF addition)."""
    # idx[x, s] = s - x
    idx = gf.sub_table.T
    terms = a[..., :, None] + b[..., idx]
    return special.logsumexp(terms, axis=-2)


# --------------------------------------------------------------------------


def log_relay_error(code: NetworkCode, l: int, foreign_gamma: np.ndarray) -> np.ndarray:
    """Vectorised log p(e_R) for parity l.

    ``foreign_gamma[..., i]`` is the SNR of the link from the i-th entry of
    ``code.foreign_sources(l)`` to the relay.
    """
    gf = code.field
    const = modem.constellation(code.M)
    sources = code.foreign_sources(l)
    foreign_gamma = np.asarray(foreign_gamma, dtype=float)
    if foreign_gamma.shape[-1] != len(sources):
        raise RelayError(f"parity {l} needs {len(sources)} foreign link SNRs")
    col = code.parity_column(l)
    out = log_point_mass(gf, foreign_gamma.shape[:-1])
    for i, n in enumerate(sources):
        law = modem.log_error_law(foreign_gamma[..., i], const, gf)
        out = log_convolve(out, log_scale(law, int(col[n]), gf), gf)
    return out


def log_relay_error_average(code: NetworkCode, l: int, foreign_snr_avg, m: float, nodes: int = 64) -> np.ndarray:
    """log p(e_R) averaged over Nakagami-m fading of the foreign links."""
    gf = code.field
    const = modem.constellation(code.M)
    sources = code.foreign_sources(l)
    foreign_snr_avg = np.broadcast_to(np.asarray(foreign_snr_avg, dtype=float), (len(sources),))
    x, w = special.roots_genlaguerre(nodes, m - 1)
    w = w / special.gamma(m)
    col = code.parity_column(l)
    out = log_point_mass(gf)
    for i, n in enumerate(sources):
        laws = np.exp(modem.log_error_law(x * foreign_snr_avg[i] / m, const, gf))
        avg = np.clip(w @ laws, 0, None)
        avg /= avg.sum()
        with np.errstate(divide="ignore"):
            law = np.maximum(np.log(avg), modem.LOG_FLOOR)
        out = log_convolve(out, log_scale(law, int(col[n]), gf), gf)
    return out


def relay_error_distribution(
    parity: int, foreign_links: Mapping[int, LinkRealization], code: NetworkCode
) -> RelayErrorDistribution:
    """Exact p(e_R) for one parity slot at fixed link realisations.

    ``foreign_links`` maps 0-based user index to the user -> relay link.
    Links of users with a zero coefficient are ignored.
    """
    sources = code.foreign_sources(parity)
    missing = [n for n in sources if n not in foreign_links]
    if missing:
        raise RelayError(f"no link for foreign source(s) {missing}")
    gam = np.array([foreign_links[n].gamma for n in sources], dtype=float)
    logp = log_relay_error(code, parity, gam)
    p = np.exp(logp)
    return RelayErrorDistribution(p / p.sum())


def relay_transmit(
    own: GfElement | int,
    foreign_obs: Mapping[int, tuple[complex, LinkRealization]],
    parity: int,
    code: NetworkCode,
) -> GfElement:
    """Detect the foreign symbols and return the network-coded symbol to send.

    ``foreign_obs`` maps 0-based user index to (observation, link).
    """
    gf = code.field
    const = modem.constellation(code.M)
    relay = code.relay_of_parity[parity] - 1
    col = code.parity_column(parity)
    acc = gf.mul(int(col[relay]), int(own))
    for n in range(code.N):
        if n == relay or col[n] == 0:
            continue
        if n not in foreign_obs:
            raise RelayError(f"missing observation of user {n} at relay {relay}")
        y, link = foreign_obs[n]
        detected = int(modem.detect_labels(y, link.h, const))
        acc = gf.add(acc, gf.mul(int(col[n]), detected))
    return gf.element(acc)
