"""Nakagami-m block fading, AWGN and the Nakagami SNR moment generating function.

Symbol energy and noise variance are both fixed to 1, so a link's
instantaneous SNR is |h|^2 and its average SNR is E|h|^2.

Random streams are counter-based (Philox) and keyed by integer tuples, so any
(block range, link) can be regenerated independently of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FadingSpec:
    m: float
    snr_avg: float
    Es: float = 1.0
    sigma2: float = 1.0

    def __post_init__(self):
        if self.m < 0.5:
            raise ValueError(f"Nakagami fading figure must be >= 0.5, got {self.m}")
        if self.snr_avg <= 0:
            raise ValueError("average SNR must be positive")


@dataclass(frozen=True)
class LinkRealization:
    h: complex
    gamma: float

    @classmethod
    def from_h(cls, h: complex, sigma2: float = 1.0) -> "LinkRealization":
        return cls(complex(h), abs(h) ** 2 / sigma2)

    @classmethod
    def from_gamma(cls, gamma: float, phase: float = 0.0) -> "LinkRealization":
        return cls(complex(np.sqrt(gamma) * np.exp(1j * phase)), float(gamma))


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox generator for the integer key (seed, *key)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def draw_gains(rng: np.random.Generator, shape, snr_avg, m: float) -> np.ndarray:
    """Gamma(shape m, mean snr_avg) instantaneous SNRs."""
    shape = tuple(np.atleast_1d(shape)) if not isinstance(shape, tuple) else shape
    scale = np.asarray(snr_avg, dtype=float) / m
    if float(m).is_integer():
        g = rng.standard_exponential(shape + (int(m),)).sum(axis=-1)
    else:
        g = rng.standard_gamma(m, shape)
    return g * scale


def draw_fading(rng: np.random.Generator, shape, snr_avg, m: float) -> tuple[np.ndarray, np.ndarray]:
    """Complex coefficients with |h|^2 ~ Gamma(m, snr_avg) and uniform phase.

    Returns (h, gamma).
    """
    shape = tuple(np.atleast_1d(shape)) if not isinstance(shape, tuple) else shape
    gamma = draw_gains(rng, shape, snr_avg, m)
    phase = rng.uniform(0.0, 2 * np.pi, shape)
    return np.sqrt(gamma) * np.exp(1j * phase), gamma


def draw_link(spec: FadingSpec, rng: np.random.Generator) -> LinkRealization:
    h, gamma = draw_fading(rng, (1,), spec.snr_avg * spec.sigma2 / spec.Es, spec.m)
    return LinkRealization(complex(h[0]), float(gamma[0]) * spec.Es / spec.sigma2)


def complex_noise(rng: np.random.Generator, shape, sigma2: float = 1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian noise with total variance sigma2."""
    shape = tuple(np.atleast_1d(shape)) if not isinstance(shape, tuple) else shape
    z = rng.standard_normal(shape + (2,))
    return np.sqrt(sigma2 / 2) * (z[..., 0] + 1j * z[..., 1])


def apply_awgn(s, h, sigma2: float, rng: np.random.Generator):
    if sigma2 < 0:
        raise ValueError("noise variance must be non-negative")
    clean = np.asarray(h) * np.asarray(s)
    y = clean + complex_noise(rng, clean.shape, sigma2) if sigma2 > 0 else clean
    return complex(y) if np.ndim(y) == 0 else y


def nakagami_mgf(s, snr_avg, m: float):
    """E[exp(s * gamma)] = (1 - s * snr_avg / m)^(-m) for Gamma-distributed SNR."""
    base = 1.0 - np.asarray(s, dtype=float) * np.asarray(snr_avg, dtype=float) / m
    if np.any(base <= 0):
        raise ValueError("MGF argument outside the region of convergence")
    out = base ** (-m)
    return float(out) if np.ndim(out) == 0 else out
