"""Single-hop equivalent models of a relay path (Q-inverse and minimum-SNR)."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np
from scipy import integrate, special

from . import modem
from .channel import draw_gains
from .codec import NetworkCode
from .relay import RelayErrorDistribution, log_relay_error


class EquivalentKind(enum.Enum):
    Q_INVERSE = "qinv"
    MINIMUM = "min"


class EquivalentScaling(enum.Enum):
    """How gamma_eq = |h_eq|^2 / sigma2_eq is split between gain and noise.

    GAIN keeps the actual noise variance and shrinks |h_eq|; NOISE keeps the
    actual relay-destination coefficient and inflates the noise variance.
    """

    GAIN = "gain"
    NOISE = "noise"


@dataclass(frozen=True)
class EquivalentChannel:
    kind: EquivalentKind
    gamma: float
    h: complex
    sigma2: float = 1.0


# --------------------------------------------------------------------------
# end-to-end SEP and its Q-inverse SNR


def log_end_to_end_sep(log_pe: np.ndarray, gamma_rd, M: int, gf) -> np.ndarray:
    """log Pr(destination decision != error-free relay symbol).

    Sums over every relay error value, including e_R = 0.
    """
    const = modem.constellation(M)
    law = modem.log_error_law(gamma_rd, const, gf)  # law[..., d] = log Pr(detected - sent = d)
    # sent = u + e and the decision must equal u, i.e. detection error -e
    hit = law[..., gf.neg_table]
    miss = modem.log1mexp(np.minimum(hit, 0.0))
    miss[..., 0] = special.logsumexp(law[..., 1:], axis=-1)
    return special.logsumexp(np.asarray(log_pe) + miss, axis=-1)


def end_to_end_sep(p_eR: RelayErrorDistribution | np.ndarray, gamma_rd: float, M: int) -> float:
    from .galois import field_new

    if gamma_rd < 0:
        raise ValueError("SNR must be non-negative")
    dist = p_eR if isinstance(p_eR, RelayErrorDistribution) else RelayErrorDistribution(p_eR)
    return float(np.exp(log_end_to_end_sep(dist.log_probs, gamma_rd, M, field_new(M))))


def qinv_snr_log(log_sep, M: int):
    """Equivalent SNR whose single-hop SEP equals exp(log_sep); clamps to 0."""
    log_sep = np.asarray(log_sep, dtype=float)
    if M == 2:
        arg = log_sep
        scale = 0.5
    else:
        arg = np.log(0.5) + log_sep
        scale = 1.0 / (2 * np.sin(np.pi / M) ** 2)
    clamp = arg >= np.log(0.5)
    x = modem.Q_inv_log(np.minimum(arg, np.log(0.5)))
    return np.where(clamp, 0.0, scale * x**2)


def qinv_snr(sep: float, M: int) -> float:
    if sep <= 0:
        raise ValueError("SEP must be positive")
    return float(qinv_snr_log(np.log(sep), M))


# --------------------------------------------------------------------------
# minimum equivalent channel


def min_snr(gammas: Sequence[float]) -> float:
    if len(gammas) == 0:
        raise ValueError("need at least one link SNR")
    if min(gammas) < 0:
        raise ValueError("SNRs must be non-negative")
    return float(min(gammas))


def _gamma_pdf(x, snr_avg, m):
    return np.exp(
        (m - 1) * np.log(np.maximum(x, 1e-300)) + m * np.log(m / snr_avg) - m * x / snr_avg - special.gammaln(m)
    )


def _gamma_sf(x, snr_avg, m):
    return special.gammaincc(m, m * x / snr_avg)


def min_pdf(gamma, snr_sr: float, snr_rd: float, m_sr: float, m_rd: float):
    """Density of min(gamma_SR, gamma_RD) for independent Nakagami links."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("SNR must be non-negative")
    if float(m_sr).is_integer() and float(m_rd).is_integer():
        m1, m2 = int(m_sr), int(m_rd)
        a, b = m1 * gamma / snr_sr, m2 * gamma / snr_rd
        common = np.exp(-(a + b))
        s1 = sum(a**k / special.factorial(k) for k in range(m1))
        s2 = sum(b**k / special.factorial(k) for k in range(m2))
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = a**m1 / (special.gamma(m1) * gamma) * common * s2
            t2 = b**m2 / (special.gamma(m2) * gamma) * common * s1
        out = np.where(gamma > 0, t1 + t2, _min_pdf_at_zero(snr_sr, snr_rd, m1, m2))
    else:
        out = _gamma_pdf(gamma, snr_sr, m_sr) * _gamma_sf(gamma, snr_rd, m_rd) + _gamma_pdf(
            gamma, snr_rd, m_rd
        ) * _gamma_sf(gamma, snr_sr, m_sr)
    return float(out) if out.ndim == 0 else out


def _min_pdf_at_zero(snr_sr, snr_rd, m1, m2):
    val = 0.0
    if m1 == 1:
        val += 1 / snr_sr
    if m2 == 1:
        val += 1 / snr_rd
    return val


def min_avg_snr(snr_sr: float, snr_rd: float, m: float) -> float:
    """Mean of the minimum-equivalent SNR by quadrature of gamma * min_pdf."""
    scale = min(snr_sr, snr_rd)
    f = lambda t: t * min_pdf(t * scale, snr_sr, snr_rd, m, m) * scale * scale  # noqa: E731
    pts = [0.0, 1.0, 5.0, 20.0, np.inf]
    total = sum(
        integrate.quad(f, a, b, epsabs=0, epsrel=1e-12, limit=200)[0] for a, b in zip(pts, pts[1:])
    )
    return float(total)


def min_avg_snr_multi(snr_avgs: Sequence[float], m: float) -> float:
    """E[min] of independent Gamma(m) SNRs: integral of the joint survival function."""
    snr_avgs = np.asarray(snr_avgs, dtype=float)
    scale = snr_avgs.min()
    f = lambda t: np.prod(_gamma_sf(t * scale, snr_avgs, m)) * scale  # noqa: E731
    pts = [0.0, 1.0, 5.0, 20.0, np.inf]
    return float(sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-12, limit=200)[0] for a, b in zip(pts, pts[1:])))


def min_avg_snr_closed_form(snr_sr: float, snr_rd: float, m: int) -> float:
    """Incomplete-Beta closed form of the minimum's mean, for integer m.

    The incomplete Beta with negative arguments is taken as
    B(x; a, b) = x^a / a * 2F1(a, 1 - b; a + 1; x).  Used as a cross-check.
    """
    if not float(m).is_integer():
        raise ValueError("closed form needs integer m")
    m = int(m)
    mpmath.mp.dps = 30

    def B(x, a, b):
        return x**a / a * mpmath.hyp2f1(a, 1 - b, a + 1, x)

    val = (
        -2
        * mpmath.mpf(-1) ** (-m)
        * mpmath.gamma(2 * m)
        / mpmath.gamma(m) ** 2
        * (snr_rd * B(-mpmath.mpf(snr_sr) / snr_rd, m + 1, -2 * m) + snr_sr * B(-mpmath.mpf(snr_rd) / snr_sr, m + 1, -2 * m))
    )
    return float(mpmath.re(val))


# --------------------------------------------------------------------------
# Q-inverse average SNR by Monte Carlo


def equivalent_gamma_samples(
    code: NetworkCode,
    parity: int,
    snr_sr,
    snr_rd: float,
    m: float,
    trials: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Paired (Q-inverse, minimum) instantaneous SNRs of one parity path over random fading."""
    n_foreign = len(code.foreign_sources(parity))
    snr_sr = np.broadcast_to(np.asarray(snr_sr, dtype=float), (n_foreign,))
    g_sr = draw_gains(rng, (trials, n_foreign), snr_sr, m)
    g_rd = draw_gains(rng, (trials,), snr_rd, m)
    log_pe = log_relay_error(code, parity, g_sr)
    lsep = log_end_to_end_sep(log_pe, g_rd, code.M, code.field)
    g_min = np.minimum(g_rd, g_sr.min(axis=-1)) if n_foreign else g_rd
    return qinv_snr_log(lsep, code.M), g_min


def qinv_gamma_samples(code, parity, snr_sr, snr_rd, m, trials, rng) -> np.ndarray:
    """Instantaneous Q-inverse SNRs of one parity path over random fading."""
    return equivalent_gamma_samples(code, parity, snr_sr, snr_rd, m, trials, rng)[0]


def qinv_avg_snr(
    code: NetworkCode,
    parity: int,
    snr_sr,
    snr_rd: float,
    m: float,
    trials: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of the Q-inverse equivalent SNR."""
    if trials < 10_000:
        raise ValueError("use at least 1e4 trials")
    g = qinv_gamma_samples(code, parity, snr_sr, snr_rd, m, trials, rng)
    return float(g.mean()), float(g.std(ddof=1) / np.sqrt(trials))


# --------------------------------------------------------------------------


def equivalent_coefficients(gamma_eq, h_rd, sigma2: float, scaling: EquivalentScaling):
    """(h_eq, sigma2_eq) with the phase of h_rd; sigma2_eq is inf where gamma_eq = 0 under NOISE."""
    gamma_eq = np.asarray(gamma_eq, dtype=float)
    h_rd = np.asarray(h_rd, dtype=complex)
    if scaling is EquivalentScaling.GAIN:
        h = np.sqrt(gamma_eq * sigma2) * np.exp(1j * np.angle(h_rd))
        return h, np.full(gamma_eq.shape, float(sigma2))
    with np.errstate(divide="ignore", invalid="ignore"):
        s2 = np.where(gamma_eq > 0, np.abs(h_rd) ** 2 / gamma_eq, np.inf)
    return h_rd.copy(), s2


def equivalent_gamma(kind: EquivalentKind, code: NetworkCode, log_pe, gamma_rd, gamma_sr_foreign) -> np.ndarray:
    """Vectorised equivalent SNR for one parity slot.

    ``gamma_sr_foreign[..., i]`` are the foreign-link SNRs in
    ``code.foreign_sources(l)`` order (may have zero width).
    """
    gamma_rd = np.asarray(gamma_rd, dtype=float)
    if kind is EquivalentKind.Q_INVERSE:
        return qinv_snr_log(log_end_to_end_sep(log_pe, gamma_rd, code.M, code.field), code.M)
    gsr = np.asarray(gamma_sr_foreign, dtype=float)
    if gsr.shape[-1] == 0:
        return gamma_rd.copy()
    return np.minimum(gamma_rd, gsr.min(axis=-1))


def build_equivalent(
    kind: EquivalentKind,
    code: NetworkCode,
    parity: int,
    h_rd: complex,
    foreign_links: dict,
    p_eR: RelayErrorDistribution | None = None,
    sigma2: float = 1.0,
    scaling: EquivalentScaling = EquivalentScaling.GAIN,
) -> EquivalentChannel:
    """Equivalent single-hop channel for one parity slot at a fixed realisation.

    The equivalent coefficient keeps the phase of the actual relay-destination
    coefficient.  With GAIN scaling |h_eq|^2 = gamma_eq * sigma2 and the noise
    variance is the actual one; with NOISE scaling h_eq = h_rd and the noise
    variance is |h_rd|^2 / gamma_eq.
    """
    from .relay import relay_error_distribution

    sources = code.foreign_sources(parity)
    gamma_rd = abs(h_rd) ** 2 / sigma2
    if kind is EquivalentKind.Q_INVERSE:
        if p_eR is None:
            p_eR = relay_error_distribution(parity, foreign_links, code)
        g = float(equivalent_gamma(kind, code, p_eR.log_probs, gamma_rd, None))
    else:
        g = min_snr([gamma_rd] + [foreign_links[n].gamma for n in sources])
    h, s2 = equivalent_coefficients(g, h_rd, sigma2, scaling)
    return EquivalentChannel(kind, g, complex(h), float(s2))
