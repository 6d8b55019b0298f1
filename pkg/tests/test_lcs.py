import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcslab import (
    AlphabetTooLarge,
    LengthMismatch,
    Word,
    diagonal_match_count,
    lcs_detail,
    lcs_length,
    lcs_length_batch,
    lcs_partitioned,
    lcs_restricted,
)
from oracles import diagonal_matches_by_loop, lcs_recursive

KERNELS = ("quadratic", "linear_space", "bit_parallel")

word = st.lists(st.integers(0, 3), min_size=0, max_size=40).map(
    lambda xs: np.array(xs, dtype=np.int64))


# --- correctness against the independent oracle


@given(word, word)
@settings(max_examples=200, deadline=None)
def test_kernels_match_recursive_oracle(u, v):
    want = lcs_recursive(u, v)
    for kernel in KERNELS:
        assert lcs_length(u, v, kernel=kernel) == want


def test_hand_picked_values():
    cases = [
        ("", "", 0),
        ("abc", "abc", 3),
        ("abc", "def", 0),
        ("abcbdab", "bdcaba", 4),
        ("xmjyauz", "mzjawxu", 4),
    ]
    for s, t, want in cases:
        u = Word.from_string(s, alphabet=tuple("abcdefghijklmnopqrstuvwxyz"))
        v = Word.from_string(t, alphabet=tuple("abcdefghijklmnopqrstuvwxyz"))
        for kernel in KERNELS:
            assert lcs_length(u, v, kernel=kernel) == want


# --- structural properties


@given(word, word)
@settings(max_examples=100, deadline=None)
def test_symmetry_and_range(u, v):
    l = lcs_length(u, v)
    assert l == lcs_length(v, u)
    assert 0 <= l <= min(len(u), len(v))


@given(word)
@settings(max_examples=50, deadline=None)
def test_self_lcs_is_length(u):
    assert lcs_length(u, u) == len(u)


@given(word, word, st.integers(0, 3))
@settings(max_examples=100, deadline=None)
def test_appending_a_letter_moves_lcs_by_at_most_one(u, v, letter):
    base = lcs_length(u, v)
    extended = lcs_length(np.append(u, letter), v)
    assert base <= extended <= base + 1


@given(word, word)
@settings(max_examples=100, deadline=None)
def test_superadditivity_under_concatenation(u, v):
    # LCS(u+v, u'+v') >= LCS(u, u') + LCS(v, v') with u' = v, v' = u swapped halves
    w1 = np.concatenate([u, v])
    w2 = np.concatenate([v, u])
    assert lcs_length(w1, w1) >= lcs_length(u, u) + lcs_length(v, v)
    assert lcs_length(w1, w2) >= lcs_length(u, v) + lcs_length(v, u)


# --- restricted / partitioned variants


@given(word, word, st.integers(0, 12))
@settings(max_examples=100, deadline=None)
def test_restricted_is_suffix_lcs(u, v, cut):
    cut = min(cut, len(u), len(v))
    want = lcs_recursive(u[cut:], v[cut:])
    assert lcs_restricted(u, v, cut) == want
    assert lcs_restricted(u, v, 0) == lcs_length(u, v)


def test_partitioned_trivial_and_split():
    u = np.array([0, 1, 0, 1, 1, 0], dtype=np.int64)
    v = np.array([1, 1, 0, 0, 1, 0], dtype=np.int64)
    L = len(u)
    whole = lcs_partitioned(u, v, (1, L + 1), (1, L + 1))
    assert whole == lcs_length(u, v)
    blocks = lcs_partitioned(u, v, (1, 3, L + 1), (1, 4, L + 1))
    want = lcs_recursive(u[:2], v[:3]) + lcs_recursive(u[2:], v[3:])
    assert blocks == want
    assert blocks <= whole


def test_partitioned_rejects_bad_cuts():
    u = np.zeros(4, dtype=np.int64)
    with pytest.raises(LengthMismatch):
        lcs_partitioned(u, u, (1, 3), (1, 5))       # endpoints disagree
    with pytest.raises(LengthMismatch):
        lcs_partitioned(u, u, (1, 4, 2, 5), (1, 2, 3, 5))  # not nondecreasing


# --- batch mode


def test_batch_agrees_with_scalar():
    gen = np.random.default_rng(5)
    us = gen.integers(0, 2, size=(20, 64))
    vs = gen.integers(0, 2, size=(20, 64))
    for kernel in ("quadratic", "linear_space"):
        got = lcs_length_batch(us, vs, kernel=kernel)
        want = [lcs_length(us[i], vs[i]) for i in range(20)]
        assert list(got) == want


# --- words and alphabet handling


def test_word_roundtrip():
    w = Word.from_string("bacaab", alphabet=("a", "b", "c"))
    assert w.to_string(("a", "b", "c")) == "bacaab"
    assert w.alphabet_size == 3
    assert lcs_length(w, w) == 6


def test_bit_parallel_rejects_huge_alphabet():
    u = np.arange(300, dtype=np.int64)
    with pytest.raises(AlphabetTooLarge):
        lcs_length(u, u, kernel="bit_parallel")
    assert lcs_length(u, u, kernel="quadratic") == 300


def test_detail_reports_kernel_and_ops():
    u = np.array([0, 1, 1, 0], dtype=np.int64)
    res = lcs_detail(u, u, kernel="quadratic")
    assert res.length == 4
    assert res.kernel == "quadratic"
    assert res.n_ops > 0


# --- diagonal matches


@given(st.lists(st.integers(0, 2), min_size=1, max_size=30), st.integers(1, 5))
@settings(max_examples=100, deadline=None)
def test_diagonal_match_count_matches_loop(xs, k):
    x = np.array(xs, dtype=np.int64)
    gen = np.random.default_rng(len(xs) * 7 + k)
    y = gen.integers(0, 3, size=len(x))
    assert diagonal_match_count(x, y, k) == diagonal_matches_by_loop(x, y, k)


def test_diagonal_match_count_rejects_length_mismatch():
    with pytest.raises(LengthMismatch):
        diagonal_match_count(np.zeros(3, dtype=np.int64),
                             np.zeros(4, dtype=np.int64), 1)
