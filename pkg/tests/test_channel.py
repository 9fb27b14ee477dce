import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detfnc.channel import (
    FadingSpec,
    LinkRealization,
    apply_awgn,
    complex_noise,
    db_to_linear,
    draw_fading,
    draw_gains,
    draw_link,
    nakagami_mgf,
    stream,
)


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 3.5])
def test_gain_moments(m):
    g = draw_gains(stream(1, 0), (400_000,), 5.0, m)
    assert g.mean() == pytest.approx(5.0, rel=0.01)
    assert g.var() == pytest.approx(25.0 / m, rel=0.03)


def test_fading_phase_uniform_and_consistent():
    h, g = draw_fading(stream(2, 0), (200_000,), 3.0, 1.0)
    np.testing.assert_allclose(np.abs(h) ** 2, g, rtol=1e-12)
    assert abs(np.mean(np.exp(1j * np.angle(h)))) < 0.01


def test_noise_variance():
    n = complex_noise(stream(3, 0), (1_000_000,), 2.0)
    assert np.mean(np.abs(n) ** 2) == pytest.approx(2.0, rel=0.01)
    assert np.var(n.real) == pytest.approx(1.0, rel=0.01)


def test_streams_are_reproducible_and_distinct():
    a = stream(7, 1, 2).standard_normal(5)
    np.testing.assert_array_equal(a, stream(7, 1, 2).standard_normal(5))
    assert not np.allclose(a, stream(7, 1, 3).standard_normal(5))
    assert not np.allclose(a, stream(8, 1, 2).standard_normal(5))


def test_awgn_noise_free():
    assert apply_awgn(1j, 2.0, 0.0, stream(0)) == 2j
    with pytest.raises(ValueError):
        apply_awgn(1, 1, -1.0, stream(0))


def test_spec_validation():
    with pytest.raises(ValueError):
        FadingSpec(m=0.2, snr_avg=1.0)
    with pytest.raises(ValueError):
        FadingSpec(m=1.0, snr_avg=0.0)
    link = draw_link(FadingSpec(1.0, 4.0), stream(0))
    assert isinstance(link, LinkRealization) and link.gamma >= 0


def test_link_from_gamma():
    lk = LinkRealization.from_gamma(4.0, np.pi / 2)
    assert lk.h == pytest.approx(2j)
    assert LinkRealization.from_h(1 + 1j).gamma == pytest.approx(2.0)


def test_db():
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert db_to_linear(-3.0) == pytest.approx(0.501187, rel=1e-5)


@settings(deadline=None, max_examples=50)
@given(st.floats(0.5, 4.0), st.floats(0.1, 100.0), st.floats(-50.0, 0.0))
def test_mgf_matches_gamma_law(m, snr, s):
    from scipy import integrate, stats

    law = stats.gamma(a=m, scale=snr / m)
    ref = integrate.quad(lambda x: np.exp(s * x) * law.pdf(x), 0, np.inf, limit=200)[0]
    assert nakagami_mgf(s, snr, m) == pytest.approx(ref, rel=1e-6, abs=1e-12)


def test_mgf_domain():
    with pytest.raises(ValueError):
        nakagami_mgf(1.0, 2.0, 1.0)
