"""Pair-emission hidden Markov models.

A hidden chain Z emits a letter *pair* (X_i, Y_i) at every step from a
per-state distribution over A x A.  The module provides exact law evaluation
(forward recursion with log-scale accumulation on long words), reproducible
path sampling keyed by (seed, stream, replicate), the independent Doeblin
coupling of a mu-start and a pi-start copy, and the two standard model
constructions: the product chain over (state, pair) triples and the pairing
of two independent single-emission models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from itertools import product

import numpy as np

from . import rng
from .errors import DimensionMismatch, EnumerationCapExceeded
from .markov import (
    ChainSpec,
    DoeblinConstants,
    ROW_SUM_TOL,
    check_irreducible_aperiodic,
    doeblin_constants,
    matrix_power,
)

EMIT_TOL = 1e-12
SCALING_THRESHOLD = 64  # forward recursion switches to per-step scaling above this
DEFAULT_JOINT_CAP = 10**8


@dataclass
class PairHMM:
    """Hidden chain plus per-state pair-emission matrices (S, A, A).

    ``state_swap`` optionally names an involution sigma of the hidden states
    under which the model is exchangeable: mu and P are sigma-invariant and
    E_sigma(z) is the transpose of E_z.  Models built from two independent
    identical components carry sigma = coordinate swap, which certifies the
    joint law of (X, Y) as symmetric even though individual E_z are not.
    """

    chain: ChainSpec
    alphabet: tuple[str, ...]
    emit: np.ndarray
    state_swap: np.ndarray | None = None

    def __post_init__(self):
        self.emit = np.asarray(self.emit, dtype=float)
        S, A = self.chain.n_states, len(self.alphabet)
        if self.emit.shape != (S, A, A):
            raise DimensionMismatch(f"emit must be {(S, A, A)}, got {self.emit.shape}")
        if np.any(self.emit < 0):
            raise ValueError("emission probabilities must be nonnegative")
        bad = np.abs(self.emit.reshape(S, -1).sum(axis=1) - 1.0)
        if bad.max() > EMIT_TOL:
            raise ValueError(f"emission sums deviate from 1 by {bad.max():.3e}")
        if self.state_swap is not None:
            self.state_swap = np.asarray(self.state_swap, dtype=np.int64)

    @property
    def n_letters(self) -> int:
        return len(self.alphabet)

    @cached_property
    def emit_x(self) -> np.ndarray:
        return self.emit.sum(axis=2)

    @cached_property
    def emit_y(self) -> np.ndarray:
        return self.emit.sum(axis=1)

    @cached_property
    def _mu_cum(self) -> np.ndarray:
        return np.cumsum(self.chain.mu)

    @cached_property
    def _pi_cum(self) -> np.ndarray:
        return np.cumsum(self.chain.pi)

    @cached_property
    def _p_cum(self) -> np.ndarray:
        return np.cumsum(self.chain.P, axis=1)

    @cached_property
    def _emit_cum(self) -> np.ndarray:
        S = self.chain.n_states
        return np.cumsum(self.emit.reshape(S, -1), axis=1)


@dataclass(frozen=True)
class SamplePath:
    z: np.ndarray
    x: np.ndarray
    y: np.ndarray
    seed: int
    meeting_time: int | None = None


@dataclass
class TwoChainHMM:
    """Two independent copies of one single-emission HMM, to be paired."""

    chain: ChainSpec
    alphabet: tuple[str, ...]
    emit: np.ndarray  # (S, A) letter distribution per state, shared by X and Y
    independent: bool = True

    def __post_init__(self):
        self.emit = np.asarray(self.emit, dtype=float)
        S, A = self.chain.n_states, len(self.alphabet)
        if self.emit.shape != (S, A):
            raise DimensionMismatch(f"emit must be {(S, A)}, got {self.emit.shape}")
        if np.any(self.emit < 0) or np.abs(self.emit.sum(axis=1) - 1.0).max() > EMIT_TOL:
            raise ValueError("emission rows must be probability vectors")
        if not self.independent:
            raise ValueError("only independent two-chain models are supported")


# ---------------------------------------------------------------------------
# validation


def _swap_symmetry_holds(hmm: PairHMM) -> bool:
    sigma = hmm.state_swap
    if sigma is None:
        return False
    S = hmm.chain.n_states
    if sorted(sigma.tolist()) != list(range(S)) or np.any(sigma[sigma] != np.arange(S)):
        return False
    mu, P, E = hmm.chain.mu, hmm.chain.P, hmm.emit
    if np.abs(mu[sigma] - mu).max() > EMIT_TOL:
        return False
    if np.abs(P[np.ix_(sigma, sigma)] - P).max() > EMIT_TOL:
        return False
    return bool(np.abs(E[sigma] - E.transpose(0, 2, 1)).max() <= EMIT_TOL)


def _marginal_letter_law(hmm: PairHMM, i: int, side: str) -> np.ndarray:
    dist = hmm.chain.mu @ matrix_power(hmm.chain.P, i - 1)
    return dist @ (hmm.emit_x if side == "x" else hmm.emit_y)


def validate(hmm: PairHMM) -> dict:
    """Stochasticity, symmetry, common-letter and marginal-equality flags."""
    S = hmm.chain.n_states
    stochastic = bool(
        np.abs(hmm.emit.reshape(S, -1).sum(axis=1) - 1.0).max() <= EMIT_TOL
        and np.abs(hmm.chain.P.sum(axis=1) - 1.0).max() <= ROW_SUM_TOL
    )
    per_state = bool(np.abs(hmm.emit - hmm.emit.transpose(0, 2, 1)).max() <= EMIT_TOL)
    symmetric = per_state or _swap_symmetry_holds(hmm)

    flags = check_irreducible_aperiodic(hmm.chain.P)
    weights = hmm.chain.pi if flags["irreducible"] else hmm.chain.mu
    qx = weights @ hmm.emit_x
    qy = weights @ hmm.emit_y
    common_letter = bool(np.any((qx > 0) & (qy > 0)))

    horizon = max(4, S)
    identical_marginals = all(
        np.abs(_marginal_letter_law(hmm, i, "x") - _marginal_letter_law(hmm, i, "y")).max()
        <= 100 * EMIT_TOL
        for i in range(1, horizon + 1)
    )
    if symmetric and not identical_marginals:
        raise AssertionError("symmetric model with unequal X/Y marginals")
    return {
        "stochastic": stochastic,
        "symmetric": symmetric,
        "common_letter": common_letter,
        "identical_marginals": identical_marginals,
    }


# ---------------------------------------------------------------------------
# sampling


def _pick_batch(cum_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    # first index whose cumulative mass reaches u; clip guards the u ~ 1 edge
    idx = (cum_rows < u[:, None]).sum(axis=1)
    return np.minimum(idx, cum_rows.shape[1] - 1)


def sample_batch(hmm: PairHMM, n: int, reps: int, seed: int,
                 stream: int = rng.STREAM_SAMPLE, rep_offset: int = 0):
    """Hidden and emitted paths for replicates rep_offset..rep_offset+reps-1.

    Returns (Z, X, Y) int arrays of shape (reps, n).  Each replicate consumes
    two uniforms per position (hidden step, pair emission) from its own
    substream, so results do not depend on batch or worker boundaries.
    """
    A = hmm.n_letters
    U = np.empty((reps, n, 2))
    for r in range(reps):
        U[r] = rng.uniform_block(seed, stream, rep_offset + r, n, 2)
    Z = np.empty((reps, n), dtype=np.int64)
    X = np.empty((reps, n), dtype=np.int64)
    Y = np.empty((reps, n), dtype=np.int64)
    mu_cum = np.broadcast_to(hmm._mu_cum, (reps, hmm.chain.n_states))
    z = _pick_batch(mu_cum, U[:, 0, 0])
    for i in range(n):
        if i > 0:
            z = _pick_batch(hmm._p_cum[z], U[:, i, 0])
        e = _pick_batch(hmm._emit_cum[z], U[:, i, 1])
        Z[:, i] = z
        X[:, i] = e // A
        Y[:, i] = e % A
    return Z, X, Y


def sample_path(hmm: PairHMM, n: int, seed: int, replicate: int = 0,
                stream: int = rng.STREAM_SAMPLE) -> SamplePath:
    """One path; bit-reproducible in (seed, stream, replicate)."""
    Z, X, Y = sample_batch(hmm, n, 1, seed, stream=stream, rep_offset=replicate)
    return SamplePath(z=Z[0], x=X[0], y=Y[0], seed=seed)


def coupled_batch(hmm: PairHMM, n: int, reps: int, seed: int,
                  stream: int = rng.STREAM_COUPLE, rep_offset: int = 0):
    """Doeblin coupling of a mu-start and a pi-start copy, batched.

    The two hidden paths move independently until they first agree, and are
    identical (states and emitted pairs) from the meeting index on.  Returns
    (Z, X, Y, Zb, Xb, Yb, tau) with tau = n + 1 when no meeting occurs.
    Each replicate consumes four uniforms per position.
    """
    A = hmm.n_letters
    U = np.empty((reps, n, 4))
    for r in range(reps):
        U[r] = rng.uniform_block(seed, stream, rep_offset + r, n, 4)
    S = hmm.chain.n_states
    Z = np.empty((reps, n), dtype=np.int64)
    Zb = np.empty((reps, n), dtype=np.int64)
    X = np.empty((reps, n), dtype=np.int64)
    Y = np.empty((reps, n), dtype=np.int64)
    Xb = np.empty((reps, n), dtype=np.int64)
    Yb = np.empty((reps, n), dtype=np.int64)
    tau = np.full(reps, n + 1, dtype=np.int64)
    met = np.zeros(reps, dtype=bool)
    z = zb = None
    for i in range(n):
        if i == 0:
            z = _pick_batch(np.broadcast_to(hmm._mu_cum, (reps, S)), U[:, 0, 0])
            zb = _pick_batch(np.broadcast_to(hmm._pi_cum, (reps, S)), U[:, 0, 1])
        else:
            z = _pick_batch(hmm._p_cum[z], U[:, i, 0])
            zb_free = _pick_batch(hmm._p_cum[zb], U[:, i, 1])
            zb = np.where(met, z, zb_free)
        newly = (~met) & (z == zb)
        tau[newly] = i + 1
        met |= newly
        e = _pick_batch(hmm._emit_cum[z], U[:, i, 2])
        eb_free = _pick_batch(hmm._emit_cum[zb], U[:, i, 3])
        eb = np.where(met, e, eb_free)
        Z[:, i], Zb[:, i] = z, zb
        X[:, i], Y[:, i] = e // A, e % A
        Xb[:, i], Yb[:, i] = eb // A, eb % A
    return Z, X, Y, Zb, Xb, Yb, tau


def coupled_sample(hmm: PairHMM, n: int, seed: int, replicate: int = 0):
    """One coupled draw: (path from mu, path from pi, meeting time)."""
    Z, X, Y, Zb, Xb, Yb, tau = coupled_batch(hmm, n, 1, seed, rep_offset=replicate)
    t = int(tau[0])
    a = SamplePath(z=Z[0], x=X[0], y=Y[0], seed=seed, meeting_time=t)
    b = SamplePath(z=Zb[0], x=Xb[0], y=Yb[0], seed=seed, meeting_time=t)
    return a, b, t


def coupled_taus(hmm: PairHMM, n: int, reps: int, seed: int) -> np.ndarray:
    return coupled_batch(hmm, n, reps, seed)[6]


# ---------------------------------------------------------------------------
# exact laws


def _forward(hmm: PairHMM, emission_probs: np.ndarray) -> float:
    """P of the word(s) whose per-position state likelihoods are given.

    emission_probs has shape (n, S).  Beyond SCALING_THRESHOLD positions the
    recursion renormalizes each step and accumulates log scale factors.
    """
    n = emission_probs.shape[0]
    alpha = hmm.chain.mu * emission_probs[0]
    if n <= SCALING_THRESHOLD:
        for i in range(1, n):
            alpha = (alpha @ hmm.chain.P) * emission_probs[i]
        return float(alpha.sum())
    log_scale = 0.0
    for i in range(n):
        if i > 0:
            alpha = (alpha @ hmm.chain.P) * emission_probs[i]
        s = alpha.sum()
        if s == 0.0:
            return 0.0
        alpha = alpha / s
        log_scale += math.log(s)
    return float(math.exp(log_scale))


def exact_law(hmm: PairHMM, u, v) -> float:
    """P(X^(n) = u, Y^(n) = v) by the forward recursion, O(n S^2)."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if u.shape != v.shape or u.ndim != 1:
        raise DimensionMismatch("u and v must be equal-length 1-d words")
    if len(u) == 0:
        return 1.0
    return _forward(hmm, hmm.emit[:, u, v].T.copy())


def marginal_law(hmm: PairHMM, u, side: str = "x") -> float:
    """P(X^(n) = u) (side 'x') or P(Y^(n) = u) (side 'y')."""
    if side not in ("x", "y"):
        raise ValueError("side must be 'x' or 'y'")
    u = np.asarray(u, dtype=np.int64)
    if len(u) == 0:
        return 1.0
    marg = hmm.emit_x if side == "x" else hmm.emit_y
    return _forward(hmm, marg[:, u].T.copy())


def joint_law_tensor(hmm: PairHMM, n: int, cap: int = DEFAULT_JOINT_CAP):
    """Full joint law over pairs of length-n words.

    Returns (J, Px, Py): J[iu, iv] = P(X = word(iu), Y = word(iv)) indexed by
    base-A big-endian word codes, with the exact marginal vectors.
    """
    A, S = hmm.n_letters, hmm.chain.n_states
    if A ** (2 * n) > cap:
        raise EnumerationCapExceeded(f"|A|^(2n) = {A ** (2 * n)} exceeds cap {cap}")
    emit_flat = hmm.emit.reshape(S, A * A)  # (z, pair)
    alpha = (hmm.chain.mu[:, None] * emit_flat).T  # (pairs, S)
    for _ in range(n - 1):
        beta = alpha @ hmm.chain.P  # (W, S)
        alpha = (beta[:, None, :] * emit_flat.T[None, :, :]).reshape(-1, S)
    probs = alpha.sum(axis=1)  # over (x1 y1 x2 y2 ...) digit order
    T = probs.reshape((A,) * (2 * n))
    order = tuple(range(0, 2 * n, 2)) + tuple(range(1, 2 * n, 2))
    J = T.transpose(order).reshape(A ** n, A ** n)
    return J, J.sum(axis=1), J.sum(axis=0)


def enumerate_words(n: int, alphabet_size: int):
    """All length-n words in the base-A big-endian code order of joint_law_tensor."""
    return (np.array(w, dtype=np.int64) for w in product(range(alphabet_size), repeat=n))


def p_mismatch(hmm: PairHMM, i: int) -> float:
    """P(X_i != Y_i), exact."""
    if i < 1:
        raise ValueError("positions are 1-based")
    dist = hmm.chain.mu @ matrix_power(hmm.chain.P, i - 1)
    per_state = 1.0 - np.einsum("zaa->z", hmm.emit)
    return float(dist @ per_state)


def match_probability(hmm: PairHMM) -> float:
    """P(X_1 = Y_1), exact."""
    return float(hmm.chain.mu @ np.einsum("zaa->z", hmm.emit))


# ---------------------------------------------------------------------------
# model constructions


def product_chain(hmm: PairHMM) -> ChainSpec:
    """The chain of triples (Z_i, X_i, Y_i).

    Transition ((z,x,y) -> (z',x',y')) = P(z,z') E_{z'}(x',y'); the emitted
    coordinates of the *current* state do not influence the move, which is
    what makes the triple chain mix exactly as fast as the hidden chain.
    """
    S, A = hmm.chain.n_states, hmm.n_letters
    emit_flat = hmm.emit.reshape(S, A * A)
    # Q[(z,e), (z2,e2)] = P[z,z2] * emit_flat[z2,e2], one identical row per e
    Q = np.einsum("zw,we->zwe", hmm.chain.P, emit_flat).reshape(S, S * A * A)
    Q = np.repeat(Q, A * A, axis=0)
    mu0 = (hmm.chain.mu[:, None] * emit_flat).reshape(-1)
    states = tuple(
        f"{s}|{a}{b}" for s in hmm.chain.states for a in hmm.alphabet for b in hmm.alphabet
    )
    return ChainSpec(states=states, mu=mu0, P=Q)


def two_hmm_as_pair(two: TwoChainHMM) -> PairHMM:
    """Pair model of two independent identical single-emission HMMs.

    Hidden states are ordered pairs (s, t) with product transitions; the
    emission at (s, t) is the outer product of the two letter laws.  The
    coordinate swap (s, t) -> (t, s) is recorded as the symmetry involution.
    """
    S = two.chain.n_states
    P2 = np.kron(two.chain.P, two.chain.P)
    mu2 = np.kron(two.chain.mu, two.chain.mu)
    states = tuple(f"{a}&{b}" for a in two.chain.states for b in two.chain.states)
    emit = np.einsum("sa,tb->stab", two.emit, two.emit).reshape(
        S * S, len(two.alphabet), len(two.alphabet)
    )
    swap = np.array([t * S + s for s in range(S) for t in range(S)], dtype=np.int64)
    return PairHMM(
        chain=ChainSpec(states=states, mu=mu2, P=P2),
        alphabet=two.alphabet,
        emit=emit,
        state_swap=swap,
    )


def doeblin_for(hmm: PairHMM, max_k: int | None = None) -> DoeblinConstants:
    """Doeblin constants of the hidden chain plus a positive floor on
    P(X_1 = Y_{k+1} = a) for the best letter a:

        P(X_1 = a, Y_{k+1} = a) >= eps * P(X_1 = a) * sum_z E_z(y = a)

    since every k-step transition probability is at least eps.
    """
    dc = doeblin_constants(hmm.chain, max_k=max_k)
    qx = hmm.chain.mu @ hmm.emit_x
    ysum = hmm.emit_y.sum(axis=0)
    p_match = float(dc.eps * np.max(qx * ysum))
    return replace(dc, p_match=p_match)
