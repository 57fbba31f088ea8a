import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lbcbeam.codes import (
    ERROR_CORRECTION_PAIRS,
    HAMMING_15_11_H,
    SEARCHED_8_2_H,
    LinearCode,
    NoCodeFound,
    PatternCapExceeded,
    encoded_parity,
    get_code,
    hamming_code,
    identity_code,
    minimum_distance,
    reed_muller,
    registry_keys,
    search_code,
    shortened_hamming,
    systematic_generator,
    verify_correction,
)
from lbcbeam.gf2 import BinMatrix, is_systematic, lift_to_real, matmul_gf2, rank_gf2

EQ4 = [
    "100010011010111",
    "010011010111100",
    "001001101011110",
    "000100110101111",
]


def distinct_syndromes_oracle(h: BinMatrix, e: int) -> bool:
    """Dense enumeration: stack every weight-<=e pattern and count unique syndromes."""
    n = h.cols
    hd = h.to_array().astype(int)
    pats = []
    for w in range(e + 1):
        for sup in itertools.combinations(range(n), w):
            v = np.zeros(n, dtype=int)
            v[list(sup)] = 1
            pats.append(v)
    syn = (np.array(pats) @ hd.T) % 2
    return len({tuple(r) for r in syn}) == len(pats)


def min_weight_oracle(g: BinMatrix) -> int:
    ga = g.to_array().astype(int)
    best = g.cols
    for coeffs in itertools.product([0, 1], repeat=g.rows):
        if any(coeffs):
            best = min(best, int(((np.array(coeffs) @ ga) % 2).sum()))
    return best


def test_eq4_verbatim():
    assert HAMMING_15_11_H.to_text().split() == EQ4
    code = hamming_code(4)
    assert code.H == HAMMING_15_11_H
    assert (code.n, code.k, code.d, code.e_n) == (15, 11, 3, 1)


def test_hamming_7_4():
    c = hamming_code(3)
    assert (c.n, c.k, c.d, c.e_n) == (7, 4, 3, 1)
    assert min_weight_oracle(c.G) == 3


@pytest.mark.parametrize("r", [2, 3, 4, 5])
def test_hamming_columns_distinct_nonzero(r):
    c = hamming_code(r)
    cols = c.H.column_masks()
    assert len(set(cols)) == len(cols) and 0 not in cols
    assert distinct_syndromes_oracle(c.H, 1)


def test_reed_muller_2_5():
    c = reed_muller(2, 5)
    assert (c.n, c.k, c.d, c.e_n, c.m) == (32, 16, 8, 3, 16)
    assert verify_correction(c.H, 3)
    assert minimum_distance(c.G) == 8


def test_reed_muller_repetition():
    c = reed_muller(0, 3)
    assert c.k == 1 and c.n == 8
    assert c.G.to_array().tolist() == [[1] * 8]


def test_shortened():
    c = shortened_hamming(5, 10)
    assert (c.n, c.k, c.e_n) == (21, 16, 1)
    assert c.d >= 3
    assert rank_gf2(c.H) == 5
    plain = shortened_hamming(4, 0)
    assert (plain.n, plain.k, plain.d) == (15, 11, 3)


def test_search_8_2():
    c = search_code(8, 2)
    assert c.m == 6 and c.e_n >= 2
    assert verify_correction(c.H, 2)
    assert distinct_syndromes_oracle(c.H, 2)
    assert c.H == SEARCHED_8_2_H  # frozen registry entry is the first result
    assert min_weight_oracle(c.G) == 5


def test_search_small_cases():
    c = search_code(3, 1)
    assert c.H.shape == (2, 3)
    assert search_code(15, 1).m == 4


def test_search_exhaustion():
    with pytest.raises(NoCodeFound):
        search_code(8, 2, max_nodes=5)


def test_verify_correction_examples():
    assert verify_correction(HAMMING_15_11_H, 1)
    assert not verify_correction(HAMMING_15_11_H, 2)
    assert not distinct_syndromes_oracle(HAMMING_15_11_H, 2)
    assert verify_correction(BinMatrix.parse("11\n11"), 0)


def test_verify_correction_cap():
    with pytest.raises(PatternCapExceeded):
        verify_correction(get_code("rm-32-16").H, 3, cap=100)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(3, 9), st.integers(0, 2), st.integers(0, 2**32 - 1))
def test_verify_correction_matches_oracle(r, n, e, seed):
    a = np.random.default_rng(seed).integers(0, 2, size=(r, n))
    h = BinMatrix.from_array(a)
    assert verify_correction(h, e) == distinct_syndromes_oracle(h, e)


@pytest.mark.parametrize("key", registry_keys())
def test_registry_invariants(key):
    c = get_code(key)
    assert rank_gf2(c.H) == c.n - c.k
    if c.G is not None:
        assert not matmul_gf2(c.G, c.H.T).to_array().any()
    if c.d is not None:
        assert c.e_n == (c.d - 1) // 2
    assert verify_correction(c.H, c.e_n)


def test_registry_unknown_key():
    with pytest.raises(KeyError):
        get_code("bch-15-7")


def test_identity_code():
    c = get_code("identity-15")
    assert c.m == 15 and c.H == BinMatrix.identity(15)
    assert identity_code(4).k == 0


def test_linear_code_validation():
    with pytest.raises(ValueError):
        LinearCode(3, 1, 1, BinMatrix.parse("110\n110"))  # rank deficient
    with pytest.raises(ValueError):
        LinearCode(7, 4, 2, hamming_code(3).H, d=3)  # e_n inconsistent


def test_encoded_parity_examples():
    h = HAMMING_15_11_H
    assert encoded_parity(h, BinMatrix.identity(4)) == h
    g_c = systematic_generator(get_code("hamming-7-4"))
    assert is_systematic(g_c)
    assert encoded_parity(h, g_c).shape == (7, 15)
    g2 = systematic_generator(get_code("short-hamming-21-16"))
    assert encoded_parity(get_code("rm-32-16").H, g2).shape == (21, 32)
    with pytest.raises(ValueError):
        encoded_parity(h, BinMatrix.identity(3))


def test_encoded_parity_dense_oracle():
    h = HAMMING_15_11_H
    g_c = systematic_generator(get_code("hamming-7-4"))
    want = (g_c.to_array().T.astype(int) @ h.to_array().astype(int)) % 2
    assert np.array_equal(encoded_parity(h, g_c).to_array(), want)


@pytest.mark.parametrize("key,ec", ERROR_CORRECTION_PAIRS)
def test_gram_identity_oracle(key, ec):
    # independent construction of P_m from the dense standard-form blocks
    h = get_code(key).H
    g_c = systematic_generator(get_code(ec))
    m = h.rows
    ga = g_c.to_array().astype(int)
    assert np.array_equal(ga[:, :m], np.eye(m, dtype=int))
    p = ga[:, m:]
    ha = h.to_array().astype(int)
    hv = (ga.T @ ha) % 2
    pm = (p.T @ ha) % 2
    lhs = hv.T @ hv - ha.T @ ha
    assert np.array_equal(lhs, pm.T @ pm)
    assert np.array_equal(lift_to_real(encoded_parity(h, g_c)), hv.astype(float))


@pytest.mark.parametrize("key,ec", ERROR_CORRECTION_PAIRS)
def test_encoded_columns_independent(key, ec):
    # any e_n columns of the encoded matrix are independent over the reals
    code = get_code(key)
    hv = lift_to_real(encoded_parity(code.H, systematic_generator(get_code(ec))))
    for sup in itertools.combinations(range(code.n), code.e_n):
        assert np.linalg.matrix_rank(hv[:, list(sup)]) == code.e_n


def test_ascii_export():
    text = get_code("searched-8-2").H.to_text()
    assert text.splitlines()[0] == "10000011"
