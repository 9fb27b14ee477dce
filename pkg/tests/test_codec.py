import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from detfnc.codec import CodeError, encode, enumerate_codebook, make_code, preset_code
from detfnc.galois import field_new


def test_g1_example_codeword():
    code = preset_code("G1")
    assert [int(c) for c in encode([0, 1], code)] == [0, 1, 2, 1]


def test_g2_codebook():
    code = preset_code("G2")
    _, words = code.codebook_labels()
    np.testing.assert_array_equal(words, [[0, 0, 0, 0], [0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 0]])


def test_g3_shape_and_relays():
    code = preset_code("G3")
    assert (code.N, code.K, code.q, code.M) == (3, 6, 2, 2)
    assert code.relay_of_parity == (1, 2, 3)
    assert code.foreign_sources(0) == [1, 2]
    assert code.foreign_sources(1) == [0]
    assert code.foreign_sources(2) == [0]


def test_systematic_prefix():
    code = preset_code("G1")
    for w, src in zip(*reversed(code.codebook_labels())):
        np.testing.assert_array_equal(w[: code.N], src)


@pytest.mark.parametrize(
    "rows,relays",
    [
        ([[1, 0], [0, 1]], None),  # K == N
        ([[1, 1, 1], [0, 1, 1]], None),  # not systematic
        ([[1, 0, 2], [0, 1, 1]], None),  # entry outside GF(2)
        ([[1, 0, 1], [0, 1, 1]], [3]),  # relay index out of range
        ([[1, 0, 1, 1], [0, 1, 1, 1]], [1]),  # wrong relay count
    ],
)
def test_invalid_codes(rows, relays):
    with pytest.raises(CodeError):
        make_code(2, rows, relays)


def test_encode_checks():
    code = preset_code("G1")
    with pytest.raises(CodeError):
        encode([0, 1, 2], code)
    with pytest.raises(CodeError):
        encode([field_new(2).element(1), field_new(2).element(0)], code)


def test_codebook_cap():
    code = make_code(16, [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]])
    with pytest.raises(CodeError):
        code.codebook_labels(cap=1000)
    assert len(enumerate_codebook(code, cap=4096)) == 4096


@given(st.sampled_from(["G1", "G2", "G3"]), st.data())
def test_encoding_is_linear(name, data):
    code = preset_code(name)
    gf = code.field
    draw = lambda: np.array(data.draw(st.lists(st.integers(0, code.q - 1), min_size=code.N, max_size=code.N)))  # noqa: E731
    u, v = draw(), draw()
    a = data.draw(st.integers(0, code.q - 1))
    lhs = code.encode_labels(gf.add_table[gf.mul_table[a, u], v])
    rhs = gf.add_table[gf.mul_table[a, code.encode_labels(u)], code.encode_labels(v)]
    np.testing.assert_array_equal(lhs, rhs)
