import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from detfnc import modem
from detfnc.channel import LinkRealization, draw_gains, stream
from detfnc.codec import preset_code
from detfnc.equivalent import (
    EquivalentKind,
    EquivalentScaling,
    build_equivalent,
    end_to_end_sep,
    min_avg_snr,
    min_avg_snr_closed_form,
    min_avg_snr_multi,
    min_pdf,
    min_snr,
    qinv_avg_snr,
    qinv_snr,
)


@pytest.mark.parametrize("gbar", [0.5, 10.0, 1000.0])
def test_min_mean_rayleigh_equal(gbar):
    assert min_avg_snr(gbar, gbar, 1.0) == pytest.approx(gbar / 2, rel=1e-9)


def test_min_mean_rayleigh_unequal():
    # min of exponentials: rate adds
    assert min_avg_snr(2.0, 1.0, 1.0) == pytest.approx(2 / 3, rel=1e-9)


def test_min_mean_frozen_values():
    # mpmath quadrature of the squared Gamma(2) survival function
    assert min_avg_snr(1.0, 1.0, 2.0) == pytest.approx(0.625, rel=1e-9)
    assert min_avg_snr_multi([1.0, 1.0, 1.0], 2.0) == pytest.approx(0.48148148148148148, rel=1e-9)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("a,b", [(1.0, 1.0), (3.0, 0.5), (10.0, 40.0)])
def test_min_mean_closed_form(m, a, b):
    assert min_avg_snr_closed_form(a, b, m) == pytest.approx(min_avg_snr(a, b, m), rel=1e-8)


def test_min_multi_reduces_to_pair():
    assert min_avg_snr_multi([2.0, 5.0], 1.5) == pytest.approx(min_avg_snr(2.0, 5.0, 1.5), rel=1e-8)


@pytest.mark.parametrize("m", [1.0, 2.0, 1.7])
def test_min_pdf_normalised(m):
    from scipy import integrate

    total = integrate.quad(lambda g: min_pdf(g, 2.0, 3.0, m, m), 0, np.inf, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-8)


def test_min_pdf_integer_and_general_forms_agree():
    g = np.linspace(0.01, 10, 50)
    a = min_pdf(g, 2.0, 3.0, 2, 2)
    from detfnc.equivalent import _gamma_pdf, _gamma_sf

    b = _gamma_pdf(g, 2.0, 2) * _gamma_sf(g, 3.0, 2) + _gamma_pdf(g, 3.0, 2) * _gamma_sf(g, 2.0, 2)
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_min_mean_monte_carlo_m2():
    rng = stream(4, 0)
    g = np.minimum(draw_gains(rng, (1_000_000,), 10.0, 2.0), draw_gains(rng, (1_000_000,), 10.0, 2.0))
    assert g.mean() == pytest.approx(min_avg_snr(10.0, 10.0, 2.0), rel=0.01)


def test_min_snr():
    assert min_snr([3.0, 1.0, 2.0]) == 1.0
    with pytest.raises(ValueError):
        min_snr([])
    with pytest.raises(ValueError):
        min_snr([-1.0])


@given(st.floats(1e-12, 0.49))
def test_qinv_round_trip_bpsk(p):
    g = qinv_snr(p, 2)
    assert modem.sep_approx(g, 2) == pytest.approx(p, rel=1e-8)


@given(st.sampled_from([4, 8, 16]), st.floats(1e-12, 0.99))
def test_qinv_round_trip_mpsk(M, p):
    g = qinv_snr(p, M)
    assert modem.sep_approx(g, M) == pytest.approx(p, rel=1e-8)


def test_qinv_clamps_and_rejects():
    assert qinv_snr(0.5, 2) == 0.0
    assert qinv_snr(0.9, 2) == 0.0
    with pytest.raises(ValueError):
        qinv_snr(0.0, 2)


def test_qinv_error_free_relay_recovers_rd_snr():
    # e_R = 0 surely: end-to-end SEP is the R-D SEP, so the Q-inverse SNR is gamma_RD (BPSK)
    sep = end_to_end_sep(np.array([1.0, 0.0]), 7.0, 2)
    assert sep == pytest.approx(modem.Q(np.sqrt(14.0)), rel=1e-10)
    assert qinv_snr(sep, 2) == pytest.approx(7.0, rel=1e-9)


def test_end_to_end_sep_bpsk_formula():
    pe, prd = 0.1, modem.Q(np.sqrt(2 * 3.0))
    sep = end_to_end_sep(np.array([1 - pe, pe]), 3.0, 2)
    assert sep == pytest.approx(pe * (1 - prd) + (1 - pe) * prd, rel=1e-10)


def test_qinv_average_rayleigh_anchor():
    code = preset_code("G2")
    mean, se = qinv_avg_snr(code, 0, 1000.0, 1000.0, 1.0, 200_000, stream(6, 0))
    assert mean == pytest.approx(500.0, rel=0.02)
    assert se < 5.0
    with pytest.raises(ValueError):
        qinv_avg_snr(code, 0, 10.0, 10.0, 1.0, 100, stream(6, 0))


def test_build_equivalent():
    code = preset_code("G2")
    links = {1: LinkRealization.from_gamma(2.0)}
    h_rd = 3.0 * np.exp(0.4j)
    eq = build_equivalent(EquivalentKind.MINIMUM, code, 0, h_rd, links)
    assert eq.gamma == pytest.approx(2.0)
    assert abs(eq.h) == pytest.approx(np.sqrt(2.0))
    assert np.angle(eq.h) == pytest.approx(0.4)
    eqn = build_equivalent(EquivalentKind.MINIMUM, code, 0, h_rd, links, scaling=EquivalentScaling.NOISE)
    assert eqn.h == pytest.approx(h_rd)
    assert abs(eqn.h) ** 2 / eqn.sigma2 == pytest.approx(2.0)
    q = build_equivalent(EquivalentKind.Q_INVERSE, code, 0, h_rd, links)
    assert 0 < q.gamma < 2.0 + 1e-9
    assert abs(q.h) ** 2 / q.sigma2 == pytest.approx(q.gamma)


def test_minimum_error_free_sr_gives_rd():
    code = preset_code("G1")
    eq = build_equivalent(EquivalentKind.MINIMUM, code, 1, 0.5 + 0j, {0: LinkRealization.from_gamma(1e9)})
    assert eq.gamma == pytest.approx(0.25)


@pytest.mark.parametrize("snr_db", [25, 30, 35, 40])
def test_qinv_close_to_min_at_high_snr(snr_db):
    code = preset_code("G2")
    g = 10 ** (snr_db / 10)
    qi, _ = qinv_avg_snr(code, 0, g, g, 1.0, 100_000, stream(1, snr_db))
    assert abs(qi - g / 2) / (g / 2) <= 0.1
