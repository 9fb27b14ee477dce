import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detfnc import modem
from detfnc.channel import LinkRealization, draw_gains, stream
from detfnc.codec import preset_code
from detfnc.relay import (
    RelayError,
    RelayErrorDistribution,
    log_convolve,
    log_relay_error,
    log_relay_error_average,
    relay_error_distribution,
    relay_transmit,
)


def test_g1_relay_error_closed_form():
    # parity 0 of G1: relay T1, foreign user 2 with coefficient 2; QPSK detection
    code = preset_code("G1")
    p = modem.Q(np.sqrt(3.0))
    d = relay_error_distribution(0, {1: LinkRealization.from_gamma(3.0)}, code)
    np.testing.assert_allclose(d.probs, [(1 - p) ** 2, p * p, p * (1 - p), p * (1 - p)], rtol=1e-10)


def test_g2_relay_error_is_bpsk_error():
    code = preset_code("G2")
    d = relay_error_distribution(1, {0: LinkRealization.from_gamma(2.0)}, code)
    assert d.probs[1] == pytest.approx(modem.Q(2.0), rel=1e-10)


def test_g3_two_foreign_sources():
    code = preset_code("G3")
    p1, p2 = modem.Q(np.sqrt(2 * 1.0)), modem.Q(np.sqrt(2 * 4.0))
    lp = log_relay_error(code, 0, np.array([1.0, 4.0]))
    assert np.exp(lp[1]) == pytest.approx(p1 * (1 - p2) + p2 * (1 - p1), rel=1e-10)


def test_error_free_links_give_point_mass():
    code = preset_code("G1")
    d = relay_error_distribution(1, {0: LinkRealization.from_gamma(1e6)}, code)
    assert d.probs[0] == pytest.approx(1.0)


def test_missing_link():
    with pytest.raises(RelayError):
        relay_error_distribution(0, {}, preset_code("G2"))


def test_distribution_validation():
    with pytest.raises(ValueError):
        RelayErrorDistribution(np.array([0.5, 0.6]))


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_convolution_is_commutative_and_normalised(seed):
    gf = preset_code("G1").field
    rng = np.random.default_rng(seed)
    a, b = np.log(rng.dirichlet(np.ones(4), 2))
    ab, ba = log_convolve(a, b, gf), log_convolve(b, a, gf)
    np.testing.assert_allclose(ab, ba, atol=1e-12)
    assert np.exp(ab).sum() == pytest.approx(1.0)


def test_average_law_matches_monte_carlo():
    code = preset_code("G1")
    g = draw_gains(stream(5, 0), (200_000, 1), 4.0, 1.0)
    mc = np.exp(log_relay_error(code, 0, g)).mean(axis=0)
    avg = np.exp(log_relay_error_average(code, 0, 4.0, 1.0))
    np.testing.assert_allclose(avg, mc, rtol=0.02)


def test_relay_transmit():
    code = preset_code("G1")
    const = modem.constellation(4)
    h = 1.5 * np.exp(0.3j)
    u = [3, 2]
    y2 = h * modem.map_symbol(u[1], const)
    out = relay_transmit(u[0], {1: (y2, LinkRealization.from_h(h))}, 0, code)
    assert int(out) == int(code.encode_labels(np.array(u))[2])
    with pytest.raises(RelayError):
        relay_transmit(u[0], {}, 0, code)


def test_empirical_relay_errors_match_law():
    code = preset_code("G1")
    gamma = 2.0
    rng = stream(9, 0)
    n = 200_000
    const = modem.constellation(4)
    u = rng.integers(0, 4, (n, 2))
    h = np.sqrt(gamma)
    y = h * const.label_points[u[:, 1]] + (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    det = modem.detect_labels(y, h, const)
    gf = code.field
    e = gf.sub_table[gf.mul_table[2, det], gf.mul_table[2, u[:, 1]]]
    freq = np.bincount(e, minlength=4) / n
    law = np.exp(log_relay_error(code, 0, np.array([gamma])))
    assert np.all(np.abs(freq - law) <= 4 * np.sqrt(law * (1 - law) / n) + 1e-4)
