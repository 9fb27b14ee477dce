"""Fading-averaged pairwise error probabilities, union bounds and diversity order.

PEPs use the MGF form (1/pi) int_0^{pi/2} prod_k M_k(-|dphi_k|^2 / (4 sin^2 t)) dt
with the Nakagami-m MGF M(s) = (1 - s gbar / m)^(-m), evaluated by
Gauss-Legendre quadrature with node doubling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from scipy import special

from . import modem
from .codec import NetworkCode


@dataclass(frozen=True)
class AvgSnrVector:
    """Average SNR per slot (systematic slots first) and the fading figure."""

    values: tuple[float, ...]
    m: float

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(v <= 0 for v in vals):
            raise ValueError("average SNRs must be positive")
        object.__setattr__(self, "values", vals)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values)


class QuadratureError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def _gl(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    theta = np.pi / 4 * (x + 1)
    return theta, w * np.pi / 4


def _log_integrand(theta, d2, snr, m):
    """log prod_k (1 + gbar_k d2_k / (4 m sin^2 t))^(-m); d2 (..., K), theta (T,)."""
    s2 = np.sin(theta) ** 2
    ratio = (snr * d2)[..., None, :] / (4 * m * s2[:, None])
    return -m * np.log1p(ratio).sum(axis=-1)


def _pep_quadrature(d2, snr, m, n0=64, rtol=1e-8, max_nodes=4096):
    """PEPs for an array of squared-distance profiles d2 (..., K)."""
    prev = None
    n = n0
    while n <= max_nodes:
        theta, w = _gl(n)
        vals = np.exp(_log_integrand(theta, d2, snr, m)) @ w / np.pi
        if prev is not None:
            scale = np.maximum(np.abs(vals), 1e-300)
            if np.all(np.abs(vals - prev) <= rtol * scale):
                return vals, n
        prev = vals
        n *= 2
    raise QuadratureError("PEP quadrature did not converge")


def distance_profile(xi: Sequence[int], xj: Sequence[int], M: int) -> np.ndarray:
    pts = modem.constellation(M).label_points
    xi, xj = np.asarray(xi, dtype=int), np.asarray(xj, dtype=int)
    if xi.shape != xj.shape:
        raise ValueError("codewords must have the same length")
    return np.abs(pts[xi] - pts[xj]) ** 2


class PepDetail(NamedTuple):
    value: float
    nodes: int
    same_codeword: bool


def pep_detail(xi, xj, snr: AvgSnrVector, M: int) -> PepDetail:
    d2 = distance_profile(xi, xj, M)
    if d2.shape[-1] != len(snr.values):
        raise ValueError("SNR vector length differs from codeword length")
    same = not np.any(d2 > 0)
    val, n = _pep_quadrature(d2, snr.array, snr.m)
    return PepDetail(float(val), n, same)


def pep(xi, xj, snr: AvgSnrVector, M: int) -> float:
    """Average PEP P(X_i -> X_j); identical codewords give 1/2 (see ``pep_detail``)."""
    return pep_detail(xi, xj, snr, M).value


def double_factorial(n: int) -> int:
    if n <= 0:
        return 1
    return math.prod(range(n, 0, -2))


def sin_power_integral(p: float) -> float:
    """int_0^{pi/2} sin^{2p}(t) dt = (pi/2) (2p-1)!! / (2p)!!.

    Integer p uses exact double factorials; real p uses the Gamma-function form.
    """
    if p < 0:
        raise ValueError("power must be non-negative")
    if float(p).is_integer():
        p = int(p)
        return math.pi / 2 * double_factorial(2 * p - 1) / double_factorial(2 * p)
    return float(np.sqrt(np.pi) / 2 * np.exp(special.gammaln(p + 0.5) - special.gammaln(p + 1)))


def pep_asymptotic(xi, xj, snr: AvgSnrVector, M: int) -> float:
    """High-SNR upper bound on the PEP.

    Each differing position contributes (4 m sin^2 t / (gbar_k |dphi_k|^2))^m,
    so with D differing positions the bound is
    (4m)^(mD) (2mD - 1)!! / (2 (2mD)!!) / prod_k gbar_k^m |dphi_k|^(2m).
    """
    d2 = distance_profile(xi, xj, M)
    diff = d2 > 0
    if not np.any(diff):
        raise ValueError("identical codewords have no asymptotic PEP")
    m = snr.m
    D = int(diff.sum())
    num = (4 * m) ** (m * D) * sin_power_integral(m * D) / math.pi
    den = np.prod(snr.array[diff] ** m * d2[diff] ** m)
    return float(num / den)


# --------------------------------------------------------------------------
# union bound


def pairwise_matrix(code: NetworkCode, snr: AvgSnrVector) -> np.ndarray:
    """PEP for every ordered codeword pair (diagonal set to 0)."""
    _, words = code.codebook_labels()
    pts = modem.constellation(code.M).label_points[words]
    d2 = np.abs(pts[:, None, :] - pts[None, :, :]) ** 2
    vals, _ = _pep_quadrature(d2, snr.array, snr.m)
    np.fill_diagonal(vals, 0.0)
    return vals


def union_bound(code: NetworkCode, snr: AvgSnrVector, mode: str = "codeword") -> float:
    """Union bound on the average symbol error probability.

    mode="codeword": (1 / (K|X|)) sum_k sum_{i,j: j_k != i_k} P(X_i -> X_j),
    the bound over all K codeword positions.
    mode="info": the same sum restricted to the N systematic positions and
    normalised by N|X|, i.e. a bound on the users' symbol error rate.
    """
    sources, words = code.codebook_labels()
    C = len(words)
    if C < 2:
        return 0.0
    if len(snr.values) != code.K:
        raise ValueError(f"SNR vector needs {code.K} entries")
    P = pairwise_matrix(code, snr)
    if mode == "codeword":
        weight = (words[:, None, :] != words[None, :, :]).sum(axis=-1)
        norm = code.K * C
    elif mode == "info":
        weight = (sources[:, None, :] != sources[None, :, :]).sum(axis=-1)
        norm = code.N * C
    else:
        raise ValueError(f"unknown union-bound mode {mode!r}")
    return float((weight * P).sum() / norm)


# --------------------------------------------------------------------------
# diversity order


class DiversityEstimate(NamedTuple):
    two_point: float
    least_squares: float


def diversity_estimate(curve: Sequence[tuple[float, float]]) -> DiversityEstimate:
    """Negative log-log slope of an error-rate curve given as (SNR dB, rate) pairs.

    ``two_point`` uses the last two points, ``least_squares`` a fit over the
    last three (equal to ``two_point`` when only two points are given).
    """
    pts = sorted((float(s), float(p)) for s, p in curve)
    if len(pts) < 2:
        raise ValueError("need at least two points")
    snr_db = np.array([s for s, _ in pts])
    rate = np.array([p for _, p in pts])
    if np.any(rate <= 0):
        raise ValueError("error rates must be positive")
    tail = rate[-3:]
    if np.any(np.diff(tail) >= 0):
        raise ValueError("error rate is not strictly decreasing over the tail")
    x = snr_db / 10.0
    y = np.log10(rate)
    two = -(y[-1] - y[-2]) / (x[-1] - x[-2])
    xs, ys = x[-3:], y[-3:]
    ls = -np.polyfit(xs, ys, 1)[0] if len(xs) >= 3 else two
    return DiversityEstimate(float(two), float(ls))


# --------------------------------------------------------------------------
# average SNR vectors of the actual and equivalent networks


def error_free_snr_vector(code: NetworkCode, snr_avg: float, m: float) -> AvgSnrVector:
    return AvgSnrVector((snr_avg,) * code.K, m)


def equivalent_snr_vector(
    code: NetworkCode,
    snr_avg: float,
    m: float,
    kind,
    trials: int = 100_000,
    rng: np.random.Generator | None = None,
) -> AvgSnrVector:
    """Average SNR vector with every network-coded slot replaced by its equivalent.

    All physical links share the average SNR ``snr_avg``.  Minimum slots use
    the exact mean of the minimum of the relay's incoming foreign links and
    its destination link; Q-inverse slots use a Monte Carlo mean.
    """
    from .equivalent import EquivalentKind, min_avg_snr, min_avg_snr_multi, qinv_avg_snr

    vals = [snr_avg] * code.N
    for l in range(code.K - code.N):
        n_foreign = len(code.foreign_sources(l))
        if n_foreign == 0:
            vals.append(snr_avg)
        elif kind is EquivalentKind.MINIMUM:
            if n_foreign == 1:
                vals.append(min_avg_snr(snr_avg, snr_avg, m))
            else:
                vals.append(min_avg_snr_multi([snr_avg] * (n_foreign + 1), m))
        else:
            if rng is None:
                rng = np.random.default_rng(0)
            mean, _ = qinv_avg_snr(code, l, snr_avg, snr_avg, m, trials, rng)
            vals.append(max(mean, 1e-12))
    return AvgSnrVector(tuple(vals), m)
