"""M-PSK mapping, coherent detection and symbol-transition probabilities.

Two independent routes compute the transition probabilities.  The scalar
:func:`transition_matrix` integrates the received-phase density over every
decision wedge with adaptive quadrature.  The vectorised
:func:`log_index_rows` used inside Monte Carlo loops works in the log domain
from closed forms (M = 2, 4) or Craig's single-integral form (other M), so
that symbol error probabilities far below the double-precision floor are
still usable in likelihoods.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .galois import GaloisField, GfElement, field_new

LOG_FLOOR = -1e100  # stands in for log(0) so differences never produce nan


class DegenerateChannelError(ValueError):
    pass


# --------------------------------------------------------------------------
# Gaussian tail helpers


def Q(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return special.ndtr(-np.asarray(x, dtype=float))


def log_Q(x):
    return special.log_ndtr(-np.asarray(x, dtype=float))


def Q_inv(p):
    """Inverse of Q on (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("Q_inv needs 0 < p < 1")
    return -special.ndtri(p)


def Q_inv_log(log_p):
    """Q^{-1}(exp(log_p)); stays accurate for log_p down to about -1e300."""
    return -special.ndtri_exp(np.asarray(log_p, dtype=float))


def log1mexp(x):
    """log(1 - exp(x)) for x <= 0, accurate near both ends."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > -0.6931471805599453, np.log(-np.expm1(x)), np.log1p(-np.exp(x)))


# --------------------------------------------------------------------------
# Constellation


def _gray(i: int) -> int:
    return i ^ (i >> 1)


@dataclass(frozen=True, eq=False)
class PskConstellation:
    """Unit-energy M-PSK points exp(j 2 pi i / M) indexed by position i.

    ``gray_map[label]`` is the constellation index that carries a field label.
    Powers of two use the binary-reflected Gray code (so for M = 4:
    0 -> 1, 1 -> j, 2 -> -j, 3 -> -1); other orders use the natural map.
    """

    M: int
    points: np.ndarray = field(repr=False)
    gray_map: np.ndarray = field(repr=False)
    label_of_index: np.ndarray = field(repr=False)

    @property
    def label_points(self) -> np.ndarray:
        """Points ordered by field label."""
        return self.points[self.gray_map]


@lru_cache(maxsize=None)
def constellation(M: int) -> PskConstellation:
    if M < 2:
        raise ValueError("PSK order must be at least 2")
    idx = np.arange(M)
    pts = np.exp(2j * np.pi * idx / M)
    pts = np.where(np.abs(pts.real) < 1e-15, 0, pts.real) + 1j * np.where(
        np.abs(pts.imag) < 1e-15, 0, pts.imag
    )
    if M & (M - 1) == 0:
        label_of_index = np.array([_gray(i) for i in idx])
    else:
        label_of_index = idx.copy()
    gray_map = np.argsort(label_of_index)
    for a in (pts, gray_map, label_of_index):
        a.setflags(write=False)
    return PskConstellation(M, pts, gray_map, label_of_index)


def map_symbol(c: GfElement | int, const: PskConstellation) -> complex:
    label = int(c)
    if not 0 <= label < const.M:
        raise ValueError(f"label {label} not representable in {const.M}-PSK")
    return complex(const.points[const.gray_map[label]])


def map_labels(labels, const: PskConstellation) -> np.ndarray:
    return const.label_points[np.asarray(labels)]


def detect_labels(y, h, const: PskConstellation) -> np.ndarray:
    """Vectorised coherent ML detection; ties go to the smallest label."""
    y = np.asarray(y)
    h = np.asarray(h)
    metric = np.real((y * np.conj(h))[..., None] * np.conj(const.label_points))
    return np.argmax(metric, axis=-1)


def detect_coherent(y: complex, h: complex, const: PskConstellation, field: GaloisField | None = None):
    if h == 0:
        raise DegenerateChannelError("cannot detect through a zero fading coefficient")
    label = int(detect_labels(y, h, const))
    field = field or (field_new(const.M) if _is_prime_power(const.M) else None)
    return field.element(label) if field is not None else label


def _is_prime_power(n: int) -> bool:
    try:
        field_new(n)
        return True
    except ValueError:
        return False


# --------------------------------------------------------------------------
# Exact transition probabilities by quadrature


def phase_density(theta, gamma: float):
    """Density of the received phase (relative to the sent phase) at SNR gamma."""
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta)
    return np.exp(-gamma) / (2 * np.pi) + np.sqrt(gamma / np.pi) * c * np.exp(
        -gamma * np.sin(theta) ** 2
    ) * special.ndtr(np.sqrt(2 * gamma) * c)


def _wedge_probability(center: float, half: float, gamma: float) -> float:
    lo, hi = center - half, center + half
    # put a breakpoint wherever the peak of the periodic density falls inside
    peaks = [2 * np.pi * k for k in range(int(np.floor(lo / (2 * np.pi))), int(np.ceil(hi / (2 * np.pi))) + 1)]
    pts = [p for p in peaks if lo < p < hi]
    val, _ = integrate.quad(
        phase_density, lo, hi, args=(gamma,), points=pts or None, epsabs=1e-13, epsrel=1e-12, limit=200
    )
    return val


def transition_matrix(gamma: float, M: int) -> np.ndarray:
    """p[i, j] = Pr(detect index j | sent index i) at instantaneous SNR gamma."""
    if gamma < 0:
        raise ValueError("SNR must be non-negative")
    half = np.pi / M
    P = np.empty((M, M))
    for i in range(M):
        for j in range(M):
            P[i, j] = _wedge_probability(2 * np.pi * (j - i) / M, half, gamma)
    return P


def label_transition(P: np.ndarray, const: PskConstellation) -> np.ndarray:
    """Re-index a transition matrix from constellation indices to field labels."""
    g = const.gray_map
    return P[np.ix_(g, g)]


def error_law_is_invariant(const: PskConstellation, gf: GaloisField) -> bool:
    """True when the law of e = detected - sent is the same for every sent label.

    Checked structurally: index offsets d and -d are equiprobable for PSK, so
    the law is invariant iff every sent label sends each offset class
    {d, -d} to the same multiset of field errors.
    """
    M = const.M
    if gf.q != M:
        return False
    ref = None
    for a in range(M):
        ia = const.gray_map[a]
        classes = {}
        for d in range(M):
            e = gf.sub(int(const.label_of_index[(ia + d) % M]), a)
            classes.setdefault(min(d, M - d), []).append(e)
        sig = {k: sorted(v) for k, v in classes.items()}
        if ref is None:
            ref = sig
        elif sig != ref:
            return False
    return True


# --------------------------------------------------------------------------
# Vectorised log-domain transition rows


@lru_cache(maxsize=None)
def _gl_nodes(n: int = 160):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _log_craig_tail(alpha: float, gamma):
    """log Pr(phase error in [alpha, pi]) for 0 < alpha < pi."""
    x, w = _gl_nodes()
    span = np.pi - alpha
    phi = 0.5 * span * (x + 1)
    s2 = np.sin(alpha) ** 2
    expo = -np.asarray(gamma, dtype=float)[..., None] * s2 / np.sin(phi) ** 2
    return special.logsumexp(expo, b=w * 0.5 * span / (2 * np.pi), axis=-1)


def log_index_rows(gamma, M: int) -> np.ndarray:
    """log Pr(detected index - sent index = d), d = 0..M-1, for SNR array gamma."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("SNR must be non-negative")
    out = np.empty(gamma.shape + (M,))
    if M == 2:
        x = np.sqrt(2 * gamma)
        out[..., 0] = special.log_ndtr(x)
        out[..., 1] = special.log_ndtr(-x)
    elif M == 4:
        x = np.sqrt(gamma)
        lq, lc = special.log_ndtr(-x), special.log_ndtr(x)
        out[..., 0] = 2 * lc
        out[..., 1] = out[..., 3] = lq + lc
        out[..., 2] = 2 * lq
    else:
        edges = [(2 * d - 1) * np.pi / M for d in range(1, M // 2 + 2)]
        tails = [_log_craig_tail(a, gamma) if a < np.pi else None for a in edges]
        for d in range(1, M // 2 + 1):
            lo, hi = tails[d - 1], tails[d]
            if hi is None:
                # wedge straddles pi: both halves have the same mass
                val = np.log(2.0) + lo
            else:
                val = lo + log1mexp(np.minimum(hi - lo, 0.0))
            out[..., d] = val
            out[..., M - d] = val
        out[..., 0] = log1mexp(np.log(2.0) + tails[0])
    return np.maximum(out, LOG_FLOOR)


def log_error_law(gamma, const: PskConstellation, gf: GaloisField) -> np.ndarray:
    """log Pr(e) over field labels e for e = detected - sent (input-invariant)."""
    if not error_law_is_invariant(const, gf):
        raise ValueError(f"detection error law is not input-invariant for {const.M}-PSK over GF({gf.q})")
    rows = log_index_rows(gamma, const.M)
    # sent label 0 sits at index 0, so e equals the detected label
    return rows[..., const.gray_map]


# --------------------------------------------------------------------------
# Symbol error probability formulas


def sep_exact(gamma: float, M: int) -> float:
    """Coherent M-PSK symbol error probability by single-integral quadrature.

    P = Q(sqrt(2g)) + (2/sqrt(pi)) int_0^inf exp(-(u - sqrt g)^2) Q(sqrt 2 u tan(pi/M)) du
    """
    if gamma < 0:
        raise ValueError("SNR must be non-negative")
    if M < 2:
        raise ValueError("PSK order must be at least 2")
    first = float(Q(np.sqrt(2 * gamma)))
    if M == 2:
        return first
    r = np.sqrt(gamma)
    t = np.sqrt(2) * np.tan(np.pi / M)

    def f(u):
        return np.exp(-((u - r) ** 2)) * special.ndtr(-t * u)

    pieces = [0.0] + [b for b in (r - 12.0, r, r + 12.0) if b > 0] + [np.inf]
    total = sum(
        integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0] for a, b in zip(pieces, pieces[1:])
    )
    return first + 2 / np.sqrt(np.pi) * total


def sep_approx(gamma, M: int):
    """High-SNR M-PSK approximation 2 Q(sqrt(2g) sin(pi/M)); BPSK uses Q(sqrt(2g))."""
    gamma = np.asarray(gamma, dtype=float)
    if M == 2:
        val = Q(np.sqrt(2 * gamma))
    else:
        val = np.minimum(2 * Q(np.sqrt(2 * gamma) * np.sin(np.pi / M)), 1.0)
    return float(val) if val.ndim == 0 else val


def log_sep_approx(gamma, M: int):
    gamma = np.asarray(gamma, dtype=float)
    if M == 2:
        return log_Q(np.sqrt(2 * gamma))
    return np.minimum(np.log(2.0) + log_Q(np.sqrt(2 * gamma) * np.sin(np.pi / M)), 0.0)


def llr_bpsk(y: complex, h: complex, sigma2: float) -> float:
    """ln p(y | bit 0) / p(y | bit 1) for BPSK over a known complex gain."""
    if sigma2 <= 0:
        raise ValueError("noise variance must be positive")
    return 2 * np.real(y * np.conj(h)) / sigma2
