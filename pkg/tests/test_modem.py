import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detfnc import modem
from detfnc.galois import field_new

GAMMAS = [0.0, 1.0, 5.0, 10.0, 20.0]

# Independent reference: 1 - P(correct) from a 2-D polar integral of the
# complex Gaussian density (mpmath, 30 digits).
SEP_REFERENCE = {
    (8, 10.0): 0.087004760116903288,
    (8, 1.0): 0.57690557732176902,
    (16, 20.0): 0.21725525059984736,
    (4, 5.0): 0.025186697036433981,
}


def test_gray_maps():
    c4 = modem.constellation(4)
    np.testing.assert_allclose(c4.label_points, [1, 1j, -1j, -1], atol=1e-15)
    c2 = modem.constellation(2)
    np.testing.assert_allclose(c2.label_points, [1, -1], atol=1e-15)


@pytest.mark.parametrize("M", [2, 4, 8, 16])
def test_gray_neighbours_differ_in_one_bit(M):
    c = modem.constellation(M)
    order = [c.label_of_index[i] for i in range(M)]
    for a, b in zip(order, order[1:] + order[:1]):
        assert bin(a ^ b).count("1") == 1


@pytest.mark.parametrize("gamma", GAMMAS)
def test_bpsk_transition_matches_q(gamma):
    P = modem.transition_matrix(gamma, 2)
    assert P[0, 1] == pytest.approx(modem.Q(np.sqrt(2 * gamma)), abs=1e-10)


@pytest.mark.parametrize("gamma", GAMMAS)
def test_qpsk_sep_closed_form(gamma):
    x = modem.Q(np.sqrt(gamma))
    assert modem.sep_exact(gamma, 4) == pytest.approx(2 * x - x * x, abs=1e-12)


@pytest.mark.parametrize("key", sorted(SEP_REFERENCE))
def test_sep_reference_values(key):
    M, gamma = key
    assert modem.sep_exact(gamma, M) == pytest.approx(SEP_REFERENCE[key], rel=1e-9)


@pytest.mark.parametrize("M", [2, 4, 8])
@pytest.mark.parametrize("gamma", GAMMAS)
def test_transition_rows_and_symmetry(M, gamma):
    P = modem.transition_matrix(gamma, M)
    np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-9)
    for i in range(M):
        np.testing.assert_allclose(P[i], np.roll(P[0], i), atol=1e-12)
    assert 1 - P[0, 0] == pytest.approx(modem.sep_exact(gamma, M), abs=1e-9)


def test_uniform_at_zero_snr():
    np.testing.assert_allclose(modem.transition_matrix(0.0, 8), np.full((8, 8), 1 / 8), atol=1e-12)


@pytest.mark.parametrize("M", [2, 4, 8, 16])
@pytest.mark.parametrize("gamma", [0.0, 0.3, 4.0, 25.0])
def test_vectorised_rows_match_quadrature(M, gamma):
    rows = np.exp(modem.log_index_rows(np.array([gamma]), M))[0]
    np.testing.assert_allclose(rows, modem.transition_matrix(gamma, M)[0], atol=1e-12)


def test_log_rows_stay_finite_deep_in_the_tail():
    rows = modem.log_index_rows(np.array([1e4]), 4)[0]
    assert np.all(np.isfinite(rows))
    assert rows[2] < rows[1] < 0


def test_error_law_invariance():
    assert modem.error_law_is_invariant(modem.constellation(2), field_new(2))
    assert modem.error_law_is_invariant(modem.constellation(4), field_new(4))
    assert not modem.error_law_is_invariant(modem.constellation(8), field_new(8))
    with pytest.raises(ValueError):
        modem.log_error_law(np.array([1.0]), modem.constellation(8), field_new(8))


def test_qpsk_error_law():
    p = modem.Q(np.sqrt(3.0))
    law = np.exp(modem.log_error_law(np.array(3.0), modem.constellation(4), field_new(4)))
    np.testing.assert_allclose(law, [(1 - p) ** 2, p * (1 - p), p * (1 - p), p * p], rtol=1e-10)


def test_sep_approx():
    assert modem.sep_approx(4.0, 2) == pytest.approx(modem.Q(np.sqrt(8.0)))
    assert modem.sep_approx(4.0, 8) == pytest.approx(2 * modem.Q(np.sqrt(8.0) * np.sin(np.pi / 8)))
    assert modem.sep_approx(0.0, 8) == 1.0


@given(st.floats(1e-300, 0.5), st.sampled_from([-1.0, 1.0]))
def test_q_inverse_round_trip(p, _):
    x = modem.Q_inv(p)
    assert modem.Q(x) == pytest.approx(p, rel=1e-9)
    assert modem.Q_inv_log(np.log(p)) == pytest.approx(x, rel=1e-9, abs=1e-12)


@given(st.sampled_from([2, 4, 8, 16]), st.integers(0, 15), st.floats(-np.pi, np.pi))
def test_detection_noise_free(M, label, phase):
    label %= M
    const = modem.constellation(M)
    h = 0.7 * np.exp(1j * phase)
    y = h * modem.map_symbol(label, const)
    assert int(modem.detect_labels(y, h, const)) == label
    assert int(modem.detect_coherent(y, h, const, field_new(M))) == label


def test_detection_degenerate_channel():
    with pytest.raises(modem.DegenerateChannelError):
        modem.detect_coherent(1.0 + 0j, 0.0, modem.constellation(4))


def test_detection_tie_breaks_to_smallest_label():
    const = modem.constellation(4)
    # midway between the points of labels 0 (1) and 1 (j)
    assert int(modem.detect_labels(1 + 1j, 1.0, const)) == 0


@settings(max_examples=25)
@given(st.floats(0.0, 30.0))
def test_phase_density_normalised(gamma):
    from scipy import integrate

    total = integrate.quad(lambda t: modem.phase_density(t, gamma), -np.pi, np.pi, points=[0.0], limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-8)


def test_llr_bpsk():
    assert modem.llr_bpsk(0.5 + 0.2j, 2.0, 0.5) == pytest.approx(2 * 1.0 / 0.5)
