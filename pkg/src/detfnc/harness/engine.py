"""Monte Carlo engine for error-rate curves.

Each SNR point is simulated in batches of blocks.  Every batch draws its
randomness from counter-based substreams keyed by (seed, point, batch,
purpose), so the result of a batch depends only on those integers.  Batches
are folded in index order and the run stops at the first batch after which
every receiver has seen ``min_errors`` errors; this makes the output
independent of how many worker processes evaluated the batches.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import modem
from ..analysis import equivalent_snr_vector, error_free_snr_vector, union_bound
from ..channel import complex_noise, db_to_linear, draw_fading, stream
from ..codec import NetworkCode
from ..equivalent import EquivalentKind
from ..receivers import DestinationSideInfo, ReceiverKind, decide
from ..relay import log_relay_error, log_relay_error_average
from .config import ScenarioConfig

# substream purposes
_SOURCES, _SR_FADE, _SR_NOISE, _RD_FADE, _RD_NOISE = range(5)
_BOUND_BATCH = 2**32 - 1


@dataclass(frozen=True)
class CurvePoint:
    snr_db: float
    label: str
    error_rate: float
    errors: int
    trials: int
    stderr: float
    censored: bool = False


@dataclass
class RunReport:
    name: str
    points: list[CurvePoint] = field(default_factory=list)

    @property
    def labels(self) -> list[str]:
        seen: dict[str, None] = {}
        for p in self.points:
            seen.setdefault(p.label)
        return list(seen)

    def curve(self, label: str) -> list[tuple[float, float]]:
        return [(p.snr_db, p.error_rate) for p in self.points if p.label == label]

    def point(self, label: str, snr_db: float) -> CurvePoint:
        for p in self.points:
            if p.label == label and p.snr_db == snr_db:
                return p
        raise KeyError((label, snr_db))


# --------------------------------------------------------------------------
# one batch of blocks


def simulate_blocks(
    code: NetworkCode,
    u: np.ndarray,
    h_sr: np.ndarray,
    n_sr: np.ndarray,
    h_rd: np.ndarray,
    n_rd: np.ndarray,
    kinds,
    relay_log_probs: np.ndarray | None = None,
    sigma2: float = 1.0,
) -> dict[ReceiverKind, np.ndarray]:
    """Run every receiver on the same blocks and return their decisions.

    u : (B, N) source labels.
    h_sr, n_sr : (B, K-N, N) coefficient and noise of the link from user n to
        the relay of parity l (entries of non-foreign users are ignored).
    h_rd, n_rd : (B, K) destination links, systematic slots first.
    relay_log_probs : (B, K-N, q) relay statistics given to the destination;
        computed from the instantaneous S-R SNRs when omitted.
    """
    gf = code.field
    const = modem.constellation(code.M)
    pts = const.label_points
    B = u.shape[0]
    L = code.K - code.N
    c = code.encode_labels(u)
    e_R = np.zeros((B, L), dtype=int)
    foreign_gamma = []
    for l in range(L):
        col = code.parity_column(l)
        relay = code.relay_of_parity[l] - 1
        acc = gf.mul_table[col[relay], u[:, relay]]
        srcs = code.foreign_sources(l)
        for n in srcs:
            h = h_sr[:, l, n]
            y = h * pts[u[:, n]] + n_sr[:, l, n]
            det = modem.detect_labels(y, h, const)
            acc = gf.add_table[acc, gf.mul_table[col[n], det]]
        e_R[:, l] = gf.sub_table[acc, c[:, code.N + l]]
        foreign_gamma.append(np.abs(h_sr[:, l, srcs]) ** 2 / sigma2)
    if relay_log_probs is None:
        relay_log_probs = np.stack(
            [log_relay_error(code, l, foreign_gamma[l]) for l in range(L)], axis=1
        )
    x = c.copy()
    x[:, code.N :] = gf.add_table[c[:, code.N :], e_R]
    y = h_rd * pts[x] + n_rd
    z = modem.detect_labels(y, h_rd, const)
    side = DestinationSideInfo(code, h_rd, relay_log_probs, tuple(foreign_gamma), sigma2)
    return {k: decide(k, y, z, side).u_hat for k in kinds}


def simulate_batch(config: ScenarioConfig, point: int, batch: int, size: int) -> dict[str, int]:
    """Error counts of one batch at SNR point index ``point``."""
    code = config.code
    N, K, q = code.N, code.K, code.q
    L = K - N
    snr = float(db_to_linear(config.snr_db[point]))
    key = (config.seed, point, batch)
    u = stream(*key, _SOURCES).integers(0, q, size=(size, N))

    rng = stream(*key, _SR_FADE)
    if config.refade:
        h_sr, _ = draw_fading(rng, (size, L, N), snr, config.m)
    else:
        # one realisation per (source, relay) pair, shared by that relay's parities
        h_pair, _ = draw_fading(rng, (size, N, N), snr, config.m)
        relays = np.array(code.relay_of_parity) - 1
        h_sr = np.transpose(h_pair[:, :, relays], (0, 2, 1))
    rng = stream(*key, _SR_NOISE)
    if config.refade:
        n_sr = complex_noise(rng, (size, L, N))
    else:
        n_pair = complex_noise(rng, (size, N, N))
        n_sr = np.transpose(n_pair[:, :, np.array(code.relay_of_parity) - 1], (0, 2, 1))

    h_rd, _ = draw_fading(stream(*key, _RD_FADE), (size, K), snr, config.m)
    n_rd = complex_noise(stream(*key, _RD_NOISE), (size, K))

    lp = None
    if config.relay_stats == "average":
        lp = np.stack([log_relay_error_average(code, l, snr, config.m) for l in range(L)])
        lp = np.broadcast_to(lp, (size, L, q))
    u_hat = simulate_blocks(code, u, h_sr, n_sr, h_rd, n_rd, config.receivers, lp)
    return {k.value: int(np.count_nonzero(v != u)) for k, v in u_hat.items()}


# --------------------------------------------------------------------------
# curves


def _batch_size(config: ScenarioConfig, batch: int) -> int:
    return max(0, min(config.batch, config.max_trials - batch * config.batch))


def _simulate_point(config: ScenarioConfig, point: int, pool: ProcessPoolExecutor | None, workers: int):
    labels = [k.value for k in config.receivers]
    errors = dict.fromkeys(labels, 0)
    trials = 0
    n_batches = math.ceil(config.max_trials / config.batch)
    b = 0
    done = False
    while b < n_batches and not done:
        idx = list(range(b, min(b + max(workers, 1), n_batches)))
        if pool is None:
            results = (simulate_batch(config, point, i, _batch_size(config, i)) for i in idx)
        else:
            futures = [pool.submit(simulate_batch, config, point, i, _batch_size(config, i)) for i in idx]
            results = (f.result() for f in futures)
        for i, res in zip(idx, results):
            for lab in labels:
                errors[lab] += res[lab]
            trials += _batch_size(config, i)
            if all(errors[lab] >= config.min_errors for lab in labels):
                done = True
                break
        b = idx[-1] + 1
    return errors, trials


def _point(snr_db, label, errors, trials, n_sym, min_errors) -> CurvePoint:
    total = trials * n_sym
    p = errors / total if total else 0.0
    se = math.sqrt(p * (1 - p) / total) if total else 0.0
    return CurvePoint(snr_db, label, p, errors, trials, se, errors < min_errors)


def bound_value(config: ScenarioConfig, point: int, label: str) -> float:
    _, kind, mode = label.split("-")
    snr = float(db_to_linear(config.snr_db[point]))
    code = config.code
    if kind == "errfree":
        vec = error_free_snr_vector(code, snr, config.m)
    elif kind == "min":
        vec = equivalent_snr_vector(code, snr, config.m, EquivalentKind.MINIMUM)
    else:
        rng = stream(config.seed, point, _BOUND_BATCH)
        vec = equivalent_snr_vector(code, snr, config.m, EquivalentKind.Q_INVERSE, config.bound_trials, rng)
    return union_bound(code, vec, mode)


def run_bounds(config: ScenarioConfig) -> RunReport:
    report = RunReport(config.name)
    for i, s in enumerate(config.snr_db):
        for lab in config.bounds:
            report.points.append(CurvePoint(s, lab, bound_value(config, i, lab), 0, 0, 0.0))
    return report


def run_curve(config: ScenarioConfig, workers: int = 1) -> RunReport:
    """Simulate every receiver and evaluate every requested bound over the sweep."""
    report = RunReport(config.name)
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for i, s in enumerate(config.snr_db):
            if config.receivers:
                errors, trials = _simulate_point(config, i, pool, workers)
                for k in config.receivers:
                    report.points.append(_point(s, k.value, errors[k.value], trials, config.code.N, config.min_errors))
            for lab in config.bounds:
                report.points.append(CurvePoint(s, lab, bound_value(config, i, lab), 0, 0, 0.0))
    finally:
        if pool is not None:
            pool.shutdown()
    return report
