"""Dependence coefficients between the two emitted words.

beta(n) is half the L1 distance between the joint law of (X^(n), Y^(n)) and
the product of its marginals, computed exactly by full enumeration of the
pair law.  A second coefficient measures dependence between the augmented
word (Z, X)^(n) and Y^(n).  Both are non-decreasing in n; the value at the
largest computed n is a certified lower bound for their common limit.

The asymmetry functional h(n) bounds how much an imbalanced cut of a
2n-window can cost the LCS in terms of per-position mismatch probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationCapExceeded
from .hmm import PairHMM, joint_law_tensor, product_chain

DEFAULT_JOINT_CAP = 10**8


@dataclass(frozen=True)
class BetaReport:
    n: int
    beta_xy: float
    beta_zx_y: float | None
    cost: int


@dataclass(frozen=True)
class BetaStarEstimate:
    sequence: tuple[float, ...]
    beta_star_lower: float


@dataclass(frozen=True)
class AsymmetryReport:
    n: int
    h: float
    argmax_m: int


def _half_l1(joint: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> float:
    # fixed C-order traversal with exactly rounded accumulation
    diff = np.abs(joint - np.outer(rows, cols))
    return 0.5 * math.fsum(diff.ravel(order="C").tolist())


def beta_xy_exact(hmm: PairHMM, n: int, cap: int = DEFAULT_JOINT_CAP) -> BetaReport:
    """beta between X^(n) and Y^(n) by full joint enumeration."""
    J, Px, Py = joint_law_tensor(hmm, n, cap=cap)
    return BetaReport(n=n, beta_xy=_half_l1(J, Px, Py), beta_zx_y=None,
                      cost=J.size)


def beta_zx_y_exact(hmm: PairHMM, n: int, cap: int = DEFAULT_JOINT_CAP) -> float:
    """beta between the pair word (Z, X)^(n) and Y^(n).

    Path probabilities of the triple chain (Z, X, Y) are plain products of
    product-chain transition weights, so the full law is built by one tensor
    recursion over triple digits.
    """
    S, A = hmm.chain.n_states, hmm.n_letters
    K = S * A * A
    if (S * A) ** n * A ** n > cap:
        raise EnumerationCapExceeded(
            f"(S*A)^n * A^n = {(S * A) ** n * A ** n} exceeds cap {cap}")
    prod = product_chain(hmm)
    alpha = prod.mu.reshape(1, K)
    for _ in range(n - 1):
        alpha = (alpha[:, :, None] * prod.P[None, :, :]).reshape(-1, K)
    F = alpha.reshape((S, A, A) * n)
    # axes: (z1, x1, y1, z2, x2, y2, ...) -> (z1, x1, z2, x2, ..., y1, y2, ...)
    zx_axes = [3 * i + d for i in range(n) for d in (0, 1)]
    y_axes = [3 * i + 2 for i in range(n)]
    Jzx_y = F.transpose(zx_axes + y_axes).reshape((S * A) ** n, A ** n)
    return _half_l1(Jzx_y, Jzx_y.sum(axis=1), Jzx_y.sum(axis=0))


def beta_star_estimate(hmm: PairHMM, n_max: int,
                       cap: int = DEFAULT_JOINT_CAP) -> BetaStarEstimate:
    """beta(1..n_max); the last value is a certified lower bound for the
    limit beta* (the sequence is non-decreasing)."""
    seq = tuple(beta_xy_exact(hmm, n, cap=cap).beta_xy for n in range(1, n_max + 1))
    return BetaStarEstimate(sequence=seq, beta_star_lower=seq[-1])


def mismatch_prefix(hmm: PairHMM, length: int) -> np.ndarray:
    """[0, P(X_1 != Y_1), P1 + P2, ...] cumulative mismatch masses."""
    per_state = 1.0 - np.einsum("zaa->z", hmm.emit)
    dist = hmm.chain.mu.copy()
    p = np.empty(length)
    for i in range(length):
        p[i] = dist @ per_state
        dist = dist @ hmm.chain.P
    return np.concatenate([[0.0], np.cumsum(p)])


def h_n(hmm: PairHMM, n: int) -> AsymmetryReport:
    """max over m in [-n, n] of 2*sum_{i<=n-|m|} P(X_i != Y_i)
    + sum_{n-|m| < i <= n+|m|} P(X_i != Y_i).

    The objective depends on m only through |m| (swapping the roles of the
    two words maps m to -m), so the reported argmax is the smallest
    maximizing m in [0, n].  The value never exceeds 2n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    S = mismatch_prefix(hmm, 2 * n)
    best_val, best_m = -1.0, 0
    for m in range(0, n + 1):
        val = 2.0 * S[n - m] + (S[n + m] - S[n - m])
        if val > best_val:
            best_val, best_m = val, m
    return AsymmetryReport(n=n, h=float(best_val), argmax_m=best_m)
