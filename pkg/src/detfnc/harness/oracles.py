"""Brute-force reference computations for the destination receivers.

These deliberately avoid the vectorised machinery: codewords are formed with
scalar field arithmetic, likelihoods are evaluated in the linear domain with
plain loops, and hard-decision channels use the quadrature transition
matrices.  They are only practical for tiny codes.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .. import modem
from ..codec import NetworkCode
from ..receivers import DestinationSideInfo, ReceiverKind, decide_hard_optimal
from .engine import simulate_blocks

ENUMERATION_CAP = 4096


class OracleSizeError(ValueError):
    pass


def _codeword(code: NetworkCode, u) -> list[int]:
    gf = code.field
    out = []
    for k in range(code.K):
        acc = 0
        for n in range(code.N):
            acc = gf.add(acc, gf.mul(int(code.G[n, k]), int(u[n])))
        out.append(acc)
    return out


def _transmitted(code: NetworkCode, u, e) -> list[int]:
    c = _codeword(code, u)
    return c[: code.N] + [code.field.add(c[code.N + l], int(e[l])) for l in range(code.K - code.N)]


def _label_transition(gamma: float, M: int) -> np.ndarray:
    const = modem.constellation(M)
    return modem.label_transition(modem.transition_matrix(gamma, M), const)


def _check_size(code: NetworkCode):
    if code.q**code.K > ENUMERATION_CAP:
        raise OracleSizeError(f"q^K = {code.q ** code.K} exceeds {ENUMERATION_CAP}")


def _marginals(code: NetworkCode, joint: dict) -> np.ndarray:
    post = np.zeros((code.N, code.q))
    for u, w in joint.items():
        for n in range(code.N):
            post[n, u[n]] += w
    return post / post.sum(axis=1, keepdims=True)


def soft_posteriors(y, side: DestinationSideInfo, use_stats: bool = True) -> np.ndarray:
    """(N, q) posteriors of a single block for the soft optimal receiver."""
    code = side.code
    _check_size(code)
    pts = modem.constellation(code.M).label_points
    L = code.K - code.N
    probs = None if side.relay_log_probs is None or not use_stats else np.exp(side.relay_log_probs)
    joint = {}
    for u in itertools.product(range(code.q), repeat=code.N):
        total = 0.0
        for e in itertools.product(range(code.q), repeat=L):
            if probs is None:
                if any(e):
                    continue
                pe = 1.0
            else:
                pe = math.prod(float(probs[l, e[l]]) for l in range(L))
            x = _transmitted(code, u, e)
            lik = 1.0
            for k in range(code.K):
                d = complex(y[k]) - complex(side.h[k]) * complex(pts[x[k]])
                lik *= math.exp(-(abs(d) ** 2) / side.sigma2) / (math.pi * side.sigma2)
            total += pe * lik
        joint[u] = total
    return _marginals(code, joint)


def hard_posteriors(z, side: DestinationSideInfo) -> np.ndarray:
    """(N, q) posteriors of a single block for the hard optimal receiver."""
    code = side.code
    _check_size(code)
    L = code.K - code.N
    T = [_label_transition(float(g), code.M) for g in side.gamma]
    probs = np.exp(side.relay_log_probs)
    joint = {}
    for u in itertools.product(range(code.q), repeat=code.N):
        total = 0.0
        for e in itertools.product(range(code.q), repeat=L):
            pe = math.prod(float(probs[l, e[l]]) for l in range(L))
            x = _transmitted(code, u, e)
            total += pe * math.prod(T[k][x[k], int(z[k])] for k in range(code.K))
        joint[u] = total
    return _marginals(code, joint)


# --------------------------------------------------------------------------
# exact SER of the hard optimal receiver at a fixed realisation


def _sr_pairs(code: NetworkCode) -> list[tuple[int, int]]:
    """(source, relay) links that matter; shared by parities with the same relay."""
    pairs = []
    for l in range(code.K - code.N):
        r = code.relay_of_parity[l] - 1
        for n in code.foreign_sources(l):
            if (n, r) not in pairs:
                pairs.append((n, r))
    return pairs


def exact_ser_hard(code: NetworkCode, dest_gamma, sr_gamma) -> float:
    """Exact average symbol error rate of the hard optimal receiver.

    dest_gamma : (K,) destination link SNRs.
    sr_gamma : (N, N) array, ``sr_gamma[n, r]`` is the SNR of the link from
        user n to relay user r (0-based).
    The destination is given the exact relay-error law of this realisation.
    """
    _check_size(code)
    gf = code.field
    q, N, K, L = code.q, code.N, code.K, code.K - code.N
    sr_gamma = np.asarray(sr_gamma, dtype=float)
    dest_gamma = np.asarray(dest_gamma, dtype=float)
    pairs = _sr_pairs(code)
    n_outcomes = q**N * q ** len(pairs) * q**K
    if n_outcomes > 50 * ENUMERATION_CAP**2:
        raise OracleSizeError("enumeration too large")

    T_sr = {p: _label_transition(float(sr_gamma[p]), code.M) for p in pairs}
    T_d = [_label_transition(float(g), code.M) for g in dest_gamma]

    # relay statistics handed to the receiver: law of e_R from the same matrices
    lp = np.empty((L, q))
    for l in range(L):
        col = code.parity_column(l)
        r = code.relay_of_parity[l] - 1
        srcs = code.foreign_sources(l)
        dist = np.zeros(q)
        for dets in itertools.product(range(q), repeat=len(srcs)):
            # error law evaluated from sent symbol 0 (invariant for supported maps)
            p = math.prod(T_sr[(n, r)][0, d] for n, d in zip(srcs, dets))
            e = 0
            for n, d in zip(srcs, dets):
                e = gf.add(e, gf.mul(int(col[n]), d))
            dist[e] += p
        with np.errstate(divide="ignore"):
            lp[l] = np.maximum(np.log(dist / dist.sum()), modem.LOG_FLOOR)

    side = DestinationSideInfo(code, np.sqrt(dest_gamma).astype(complex), lp)
    all_z = np.array(list(itertools.product(range(q), repeat=K)))
    zside = DestinationSideInfo(code, np.broadcast_to(side.h, all_z.shape), np.broadcast_to(lp, (len(all_z), L, q)))
    u_hat = decide_hard_optimal(all_z, zside).u_hat
    z_index = {tuple(z): i for i, z in enumerate(all_z)}

    ser = 0.0
    for u in itertools.product(range(q), repeat=N):
        c = _codeword(code, u)
        for dets in itertools.product(range(q), repeat=len(pairs)):
            det = dict(zip(pairs, dets))
            p_det = math.prod(T_sr[pr][u[pr[0]], det[pr]] for pr in pairs)
            if p_det == 0.0:
                continue
            x = list(c[:N])
            for l in range(L):
                col = code.parity_column(l)
                r = code.relay_of_parity[l] - 1
                acc = gf.mul(int(col[r]), u[r])
                for n in code.foreign_sources(l):
                    acc = gf.add(acc, gf.mul(int(col[n]), det[(n, r)]))
                x.append(acc)
            for z in all_z:
                pz = math.prod(T_d[k][x[k], z[k]] for k in range(K))
                if pz == 0.0:
                    continue
                wrong = sum(int(u_hat[z_index[tuple(z)], n] != u[n]) for n in range(N))
                ser += p_det * pz * wrong / N
    return ser / q**N


def mc_ser_hard(code: NetworkCode, dest_gamma, sr_gamma, trials: int, rng: np.random.Generator):
    """Monte Carlo estimate (rate, standard error) matching ``exact_ser_hard``."""
    dest_gamma = np.asarray(dest_gamma, dtype=float)
    sr_gamma = np.asarray(sr_gamma, dtype=float)
    N, K, L = code.N, code.K, code.K - code.N
    relays = np.array(code.relay_of_parity) - 1
    h_sr = np.broadcast_to(np.sqrt(sr_gamma[:, relays].T).astype(complex), (trials, L, N))
    h_rd = np.broadcast_to(np.sqrt(dest_gamma).astype(complex), (trials, K))
    u = rng.integers(0, code.q, size=(trials, N))
    n_sr = rng.standard_normal((trials, N, N, 2)) @ np.array([1, 1j]) / np.sqrt(2)
    n_sr = np.transpose(n_sr[:, :, relays], (0, 2, 1))
    n_rd = rng.standard_normal((trials, K, 2)) @ np.array([1, 1j]) / np.sqrt(2)
    u_hat = simulate_blocks(code, u, h_sr, n_sr, h_rd, n_rd, [ReceiverKind.OPT_HARD])[ReceiverKind.OPT_HARD]
    p = np.count_nonzero(u_hat != u) / (trials * N)
    return p, math.sqrt(p * (1 - p) / (trials * N))


# --------------------------------------------------------------------------


def run_verification(seed: int = 0, cases: int = 5, mc_trials: int = 100_000) -> list[tuple[str, bool, str]]:
    """Oracle suite used by the ``verify`` command: (check, passed, detail) rows."""
    from ..channel import stream
    from ..codec import preset_code
    from ..receivers import decide_soft_optimal

    rows = []
    rng = stream(seed, 0)
    for name in ("G2", "G1"):
        code = preset_code(name)
        worst_soft = worst_hard = 0.0
        for _ in range(cases):
            g = rng.uniform(0.2, 8.0, code.K)
            h = np.sqrt(g) * np.exp(1j * rng.uniform(0, 2 * np.pi, code.K))
            lp = np.log(rng.dirichlet(np.ones(code.q), size=code.K - code.N))
            side = DestinationSideInfo(code, h, lp)
            pts = modem.constellation(code.M).label_points
            x = code.encode_labels(rng.integers(0, code.q, code.N))
            y = h * pts[x] + (rng.standard_normal(code.K) + 1j * rng.standard_normal(code.K)) / np.sqrt(2)
            z = modem.detect_labels(y, h, modem.constellation(code.M))
            ref = soft_posteriors(y, side)
            got = np.exp(decide_soft_optimal(y, side).per_user_metrics)
            worst_soft = max(worst_soft, float(np.max(np.abs(got - ref) / ref)))
            ref = hard_posteriors(z, side)
            got = np.exp(decide_hard_optimal(z, side).per_user_metrics)
            worst_hard = max(worst_hard, float(np.max(np.abs(got - ref) / ref)))
        rows.append((f"{name} soft posteriors", worst_soft <= 1e-10, f"max rel err {worst_soft:.2e}"))
        rows.append((f"{name} hard posteriors", worst_hard <= 1e-10, f"max rel err {worst_hard:.2e}"))

    code = preset_code("G2")
    dest = np.array([3.0, 2.0, 4.0, 1.5])
    sr = np.array([[0.0, 2.5], [1.0, 0.0]])
    exact = exact_ser_hard(code, dest, sr)
    est, se = mc_ser_hard(code, dest, sr, mc_trials, stream(seed, 1))
    rows.append(("G2 exact vs Monte Carlo SER", bool(abs(est - exact) <= 3 * se), f"exact {exact:.5f} mc {est:.5f} +- {se:.5f}"))
    return rows
