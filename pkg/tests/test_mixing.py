import math

import numpy as np
import pytest

from lcslab import (
    ChainSpec,
    PairHMM,
    beta_star_estimate,
    beta_xy_exact,
    beta_zx_y_exact,
    h_n,
    mismatch_prefix,
    p_mismatch,
)
from oracles import beta_by_paths


def single_state_pair(E):
    chain = ChainSpec(states=("s",), mu=np.array([1.0]), P=np.array([[1.0]]))
    E = np.asarray(E, dtype=float)
    return PairHMM(chain=chain, alphabet=tuple(str(i) for i in range(E.shape[0])),
                   emit=E[None, :, :])


# --- exact beta values


def test_beta_degenerate_copy_closed_form(copy_uniform2, copy_uniform3):
    for hmm, A in ((copy_uniform2, 2), (copy_uniform3, 3)):
        for n in range(1, 5):
            got = beta_xy_exact(hmm, n).beta_xy
            assert got == pytest.approx(1.0 - A ** -n, abs=1e-12)


def test_beta_zero_iff_independent(iid_uniform2, lazy3, dependent2):
    for n in (1, 2, 3):
        assert beta_xy_exact(iid_uniform2, n).beta_xy <= 1e-12
        assert beta_xy_exact(lazy3, n).beta_xy <= 1e-12
    # dependence shows up from n = 2 for this fixture
    assert beta_xy_exact(dependent2, 2).beta_xy > 0.05


def test_beta_one_step_perturbation_closed_form():
    # E = [[1/4+d, 1/4-d], [1/4-d, 1/4+d]] has uniform marginals and
    # beta(1) = half the L1 gap = 2d exactly
    for d in (0.01, 0.05, 0.2):
        hmm = single_state_pair([[0.25 + d, 0.25 - d], [0.25 - d, 0.25 + d]])
        assert beta_xy_exact(hmm, 1).beta_xy == pytest.approx(2 * d, abs=1e-12)


def test_beta_matches_path_sum_oracle(dependent2, bernoulli_mix):
    for hmm in (dependent2, bernoulli_mix):
        for n in (1, 2):
            assert beta_xy_exact(hmm, n).beta_xy == pytest.approx(
                beta_by_paths(hmm, n), abs=1e-12)


def test_beta_monotone_and_zx_dominates(dependent2):
    prev_xy, prev_zx = -1.0, -1.0
    for n in (1, 2, 3):
        b_xy = beta_xy_exact(dependent2, n).beta_xy
        b_zx = beta_zx_y_exact(dependent2, n)
        assert b_xy >= prev_xy - 1e-12
        assert b_zx >= prev_zx - 1e-12
        assert b_zx >= b_xy - 1e-12
        prev_xy, prev_zx = b_xy, b_zx


def test_beta_star_estimate_reports_last(dependent2):
    est = beta_star_estimate(dependent2, 3)
    assert len(est.sequence) == 3
    assert est.beta_star_lower == est.sequence[-1]
    assert all(b2 >= b1 - 1e-12 for b1, b2 in zip(est.sequence, est.sequence[1:]))


# --- mismatch prefix sums and h(n)


def test_mismatch_prefix_is_cumulative(dependent2):
    S = mismatch_prefix(dependent2, 6)
    assert S[0] == 0.0
    for j in range(1, 7):
        want = sum(p_mismatch(dependent2, i) for i in range(1, j + 1))
        assert S[j] == pytest.approx(want, abs=1e-12)


def test_h_equals_n_for_bernoulli_mixture(bernoulli_mix):
    # p_mismatch = 1/6 + 2/6 = 1/2 at every position, collapsing h(n) to n
    assert p_mismatch(bernoulli_mix, 1) == pytest.approx(0.5, abs=1e-15)
    for n in (1, 2, 10, 55, 100):
        rep = h_n(bernoulli_mix, n)
        assert rep.h == float(n)


def test_h_constant_mismatch_closed_form(iid_uniform2, copy_uniform2):
    # stationary single-state models have p_i = p for all i, so every m
    # yields the same value and h(n) = 2 n p
    for hmm in (iid_uniform2, copy_uniform2):
        p = p_mismatch(hmm, 1)
        for n in (1, 4, 9):
            assert h_n(hmm, n).h == pytest.approx(2 * n * p, abs=1e-12)
            assert h_n(hmm, n).argmax_m == 0


def test_h_bounded_by_2n(dependent2, bernoulli_mix, lazy3):
    for hmm in (dependent2, bernoulli_mix, lazy3):
        for n in (1, 3, 7, 20):
            rep = h_n(hmm, n)
            assert 0.0 <= rep.h <= 2.0 * n + 1e-12
            assert 0 <= rep.argmax_m <= n
