"""Mean-LCS estimation and the concentration / rate-bound checks.

Monte Carlo estimates draw one substream per replicate, so results are
bit-identical for a fixed seed regardless of the worker count; reductions
run over the replicate-ordered value array with numpy's fixed pairwise
scheme.  The closed-form side (Hoeffding tails from the mixing time,
coupling decay from Doeblin constants, the two-sided rate sandwich) is
evaluated by pure functions of the reported constants.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import PreconditionViolated
from .hmm import (
    PairHMM,
    coupled_taus,
    joint_law_tensor,
    match_probability,
    sample_batch,
    validate,
)
from .lcs import lcs_length
from .markov import DoeblinConstants, MixingReport, doeblin_constants, tau_min
from .mixing import beta_xy_exact, beta_zx_y_exact, h_n

_CHUNK_ELEMENTS = 20_000_000  # replicate-batch sizing only; no effect on values


@dataclass(frozen=True)
class MeanLcEstimate:
    """Normalized mean: ``mean`` estimates E[LC_n] / n."""

    n: int
    reps: int
    mean: float
    std_err: float
    exact: float | None = None


@dataclass(frozen=True)
class GammaStarEstimate:
    gamma_hat: float
    C_hat: float
    fekete_lower: float
    ns: tuple[int, ...]
    means: tuple[float, ...]
    std_errs: tuple[float, ...]


@dataclass(frozen=True)
class TailCheckReport:
    n: int
    reps: int
    A: float
    t: tuple[float, ...]
    empirical: tuple[float, ...]
    bound: tuple[float, ...]
    ok_each: tuple[bool, ...]
    ok: bool


@dataclass(frozen=True)
class CouplingCheckReport:
    n: int
    reps: int
    alpha: float
    c: float
    K: tuple[int, ...]
    empirical: tuple[float, ...]
    bound: tuple[float, ...]
    ok_each: tuple[bool, ...]
    ok: bool


@dataclass(frozen=True)
class RateBoundReport:
    n: int
    gamma_hat: float
    beta_star_lb: float
    C: float
    A: float
    c: float
    alpha: float
    stationary: bool
    lower: float
    upper: float
    h_n: float | None = None


@dataclass(frozen=True)
class SandwichRow:
    n: int
    mean: float
    se: float
    lower: float
    upper: float
    inside: bool


@dataclass(frozen=True)
class SandwichReport:
    rows: tuple[SandwichRow, ...]
    gamma: GammaStarEstimate
    beta_star_lb: float
    beta_source: str
    mixing: MixingReport
    doeblin: DoeblinConstants
    stationary: bool
    symmetric: bool
    ok: bool


@dataclass(frozen=True)
class StrictMatchReport:
    n: int
    reps: int
    mean: float
    std_err: float
    match_prob: float
    ok: bool


# ---------------------------------------------------------------------------
# Monte Carlo means


def _lcs_of_chunk(hmm: PairHMM, n: int, seed: int, stream: int, lo: int, hi: int,
                  kernel: str) -> tuple[int, np.ndarray]:
    _, X, Y = sample_batch(hmm, n, hi - lo, seed, stream=stream, rep_offset=lo)
    vals = np.array([lcs_length(X[r], Y[r], kernel) for r in range(hi - lo)],
                    dtype=np.int64)
    return lo, vals


def _chunk_ranges(reps: int, n: int, threads: int):
    chunk = max(1, min(reps, _CHUNK_ELEMENTS // max(n, 1)))
    if threads > 1:
        chunk = max(1, min(chunk, -(-reps // threads)))
    return [(lo, min(lo + chunk, reps)) for lo in range(0, reps, chunk)]


def mc_lc_values(hmm: PairHMM, n: int, reps: int, seed: int, threads: int = 1,
                 stream: int = rng.STREAM_MEAN, kernel: str = "bit_parallel") -> np.ndarray:
    """LC_n for replicates 0..reps-1, ordered by replicate index."""
    values = np.empty(reps, dtype=np.int64)
    ranges = _chunk_ranges(reps, n, threads)
    if threads <= 1 or len(ranges) == 1:
        for lo, hi in ranges:
            values[lo:hi] = _lcs_of_chunk(hmm, n, seed, stream, lo, hi, kernel)[1]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_lcs_of_chunk, hmm, n, seed, stream, lo, hi, kernel)
                       for lo, hi in ranges]
            for fut in futures:
                lo, vals = fut.result()
                values[lo:lo + len(vals)] = vals
    return values


def mc_mean_lc(hmm: PairHMM, n: int, reps: int, seed: int, threads: int = 1,
               stream: int = rng.STREAM_MEAN, kernel: str = "bit_parallel") -> MeanLcEstimate:
    if reps < 2:
        raise ValueError("need at least 2 replicates")
    values = mc_lc_values(hmm, n, reps, seed, threads=threads, stream=stream, kernel=kernel)
    scaled = values / n
    mean = float(np.mean(scaled))
    se = float(np.std(scaled, ddof=1) / math.sqrt(reps))
    return MeanLcEstimate(n=n, reps=reps, mean=mean, std_err=se)


def exact_mean_lc(hmm: PairHMM, n: int, cap: int = 10**8,
                  kernel: str = "bit_parallel") -> float:
    """E[LC_n] by full enumeration of the joint pair law."""
    J, _, _ = joint_law_tensor(hmm, n, cap=cap)
    A = hmm.n_letters
    words = [np.array(w, dtype=np.int64)
             for w in np.ndindex(*(A,) * n)] if n > 0 else []
    terms = []
    for iu, u in enumerate(words):
        row = J[iu]
        for iv, v in enumerate(words):
            p = row[iv]
            if p > 0.0:
                terms.append(p * lcs_length(u, v, kernel))
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# gamma* estimation


def _fekete_correction(k: int, dc: DoeblinConstants) -> float:
    # |E[LC_k] - stationary mean| <= k c alpha^K + K for every K; take the best
    best = math.inf
    for K in range(1, k + 1):
        best = min(best, dc.c * dc.alpha ** K + K / k)
    return best


def gamma_star_estimate(hmm: PairHMM, ns, reps: int, seed: int,
                        threads: int = 1) -> GammaStarEstimate:
    """Fit mean(n) = gamma - C * sqrt(ln n / n) over the grid.

    ``fekete_lower`` is max_k (mean(k) - 4 SE(k)), a statistical lower bound
    for gamma* = sup_k E[LC_k]/k under a stationary start; for non-stationary
    starts each term is first shifted down by the coupling correction
    min_K (c alpha^K + K/k).
    """
    ns = tuple(int(n) for n in ns)
    if len(ns) < 2:
        raise ValueError("need at least two grid points for the fit")
    means, ses = [], []
    for i, n in enumerate(ns):
        est = mc_mean_lc(hmm, n, reps, seed, threads=threads, stream=rng.STREAM_GRID + i)
        means.append(est.mean)
        ses.append(est.std_err)
    design = np.column_stack([np.ones(len(ns)),
                              [-math.sqrt(math.log(n) / n) for n in ns]])
    coef, *_ = np.linalg.lstsq(design, np.array(means), rcond=None)
    gamma_hat, c_hat = float(coef[0]), float(coef[1])
    if hmm.chain.stationary_start:
        corrections = [0.0] * len(ns)
    else:
        dc = doeblin_constants(hmm.chain)
        corrections = [_fekete_correction(n, dc) for n in ns]
    fekete = max(m - 4 * s - corr for m, s, corr in zip(means, ses, corrections))
    return GammaStarEstimate(gamma_hat=gamma_hat, C_hat=c_hat, fekete_lower=float(fekete),
                             ns=ns, means=tuple(means), std_errs=tuple(ses))


# ---------------------------------------------------------------------------
# concentration checks


def hoeffding_tail_check(hmm: PairHMM, n: int, reps: int, seed: int,
                         t_grid=None, n_points: int = 20,
                         mixing: MixingReport | None = None,
                         threads: int = 1) -> TailCheckReport:
    """Empirical upper-tail frequencies of LC_n against exp(-t^2 / (A^2 n)).

    A comes from the hidden chain's mixing time; the triple chain
    (Z, X, Y) provably shares it.  Slack of three binomial standard errors
    absorbs the plug-in of the empirical mean.
    """
    if mixing is None:
        mixing = tau_min(hmm.chain)
    A = mixing.A
    values = mc_lc_values(hmm, n, reps, seed, threads=threads, stream=rng.STREAM_TAIL)
    mean = values.mean()
    if t_grid is None:
        t_grid = np.linspace(0.0, 3.0 * A * math.sqrt(n), n_points)
    t_grid = np.asarray(t_grid, dtype=float)
    emp, bnd, oks = [], [], []
    for t in t_grid:
        p = float(np.mean(values - mean >= t))
        b = math.exp(-t * t / (A * A * n))
        se = math.sqrt(p * (1.0 - p) / reps)
        emp.append(p)
        bnd.append(b)
        oks.append(p <= b + 3.0 * se)
    return TailCheckReport(n=n, reps=reps, A=A, t=tuple(float(t) for t in t_grid),
                           empirical=tuple(emp), bound=tuple(bnd),
                           ok_each=tuple(oks), ok=all(oks))


def coupling_decay_check(hmm: PairHMM, n: int, reps: int, seed: int,
                         k_max: int | None = None,
                         doeblin: DoeblinConstants | None = None) -> CouplingCheckReport:
    """Empirical P(tau > K) against c * alpha^K for K = 1..k_max."""
    if doeblin is None:
        doeblin = doeblin_constants(hmm.chain)
    if k_max is None:
        k_max = min(n, 50)
    taus = coupled_taus(hmm, n, reps, seed)
    ks, emp, bnd, oks = [], [], [], []
    for K in range(1, k_max + 1):
        p = float(np.mean(taus > K))
        b = doeblin.c * doeblin.alpha ** K
        se = math.sqrt(p * (1.0 - p) / reps)
        ks.append(K)
        emp.append(p)
        bnd.append(b)
        oks.append(p <= b + 3.0 * se)
    return CouplingCheckReport(n=n, reps=reps, alpha=doeblin.alpha, c=doeblin.c,
                               K=tuple(ks), empirical=tuple(emp), bound=tuple(bnd),
                               ok_each=tuple(oks), ok=all(oks))


# ---------------------------------------------------------------------------
# rate bounds


def rate_bound_evaluate(n: int, gamma_hat: float, beta_star_lb: float,
                        mixing: MixingReport, doeblin: DoeblinConstants,
                        stationary: bool, h_value: float | None = None) -> RateBoundReport:
    """Two-sided bracket for E[LC_n]/n.

        lower = gamma - 2 beta* - C sqrt(ln n / n) - 2/n - coupling - h(n)/n
        upper = gamma + coupling

    with C = 2 A sqrt(10) and coupling = 1/sqrt(n) + c alpha^sqrt(n) unless
    the start is stationary, in which case the coupling term vanishes.  The
    h(n)/n term applies only to models without a symmetric joint law.
    """
    A = mixing.A
    C = 2.0 * A * math.sqrt(10.0)
    coupling = 0.0 if stationary else 1.0 / math.sqrt(n) + doeblin.c * doeblin.alpha ** math.sqrt(n)
    lower = (gamma_hat - 2.0 * beta_star_lb - C * math.sqrt(math.log(n) / n)
             - 2.0 / n - coupling)
    if h_value is not None:
        lower -= h_value / n
    upper = gamma_hat + coupling
    return RateBoundReport(n=n, gamma_hat=gamma_hat, beta_star_lb=beta_star_lb,
                           C=C, A=A, c=doeblin.c, alpha=doeblin.alpha,
                           stationary=stationary, lower=lower, upper=upper,
                           h_n=h_value)


def _beta_lower_bound(hmm: PairHMM, atom_cap: int = 2 * 10**6) -> tuple[float, str]:
    """Largest-n exact beta within the atom cap; the conservative (larger)
    of the plain and the (Z,X)-augmented coefficient is used."""
    S, A = hmm.chain.n_states, hmm.n_letters
    n_xy = 1
    while A ** (2 * (n_xy + 1)) <= atom_cap:
        n_xy += 1
    b_xy = beta_xy_exact(hmm, n_xy, cap=atom_cap).beta_xy
    n_zx = 0
    while (S * A) ** (n_zx + 1) * A ** (n_zx + 1) <= atom_cap:
        n_zx += 1
    if n_zx >= 1:
        b_zx = beta_zx_y_exact(hmm, n_zx, cap=atom_cap)
        if b_zx > b_xy:
            return b_zx, f"beta_zx_y({n_zx})"
    return b_xy, f"beta_xy({n_xy})"


def sandwich_check(hmm: PairHMM, ns, reps: int, seed: int, threads: int = 1,
                   beta_star_lb: float | None = None) -> SandwichReport:
    """Check mean(n) +/- 4 SE against [lower(n), upper(n)] on a grid of n."""
    ns = tuple(int(n) for n in ns)
    gamma = gamma_star_estimate(hmm, ns, reps, seed, threads=threads)
    mix = tau_min(hmm.chain)
    dc = doeblin_constants(hmm.chain)
    stationary = hmm.chain.stationary_start
    symmetric = validate(hmm)["symmetric"]
    if beta_star_lb is None:
        beta_star_lb, beta_source = _beta_lower_bound(hmm)
    else:
        beta_source = "caller"
    rows = []
    for n, mean, se in zip(gamma.ns, gamma.means, gamma.std_errs):
        h_value = None if symmetric else h_n(hmm, n).h
        rb = rate_bound_evaluate(n, gamma.gamma_hat, beta_star_lb, mix, dc,
                                 stationary, h_value=h_value)
        inside = (mean + 4 * se >= rb.lower) and (mean - 4 * se <= rb.upper)
        rows.append(SandwichRow(n=n, mean=mean, se=se, lower=rb.lower,
                                upper=rb.upper, inside=inside))
    return SandwichReport(rows=tuple(rows), gamma=gamma, beta_star_lb=beta_star_lb,
                          beta_source=beta_source, mixing=mix, doeblin=dc,
                          stationary=stationary, symmetric=symmetric,
                          ok=all(r.inside for r in rows))


def strict_match_check(hmm: PairHMM, n: int, reps: int, seed: int,
                       threads: int = 1) -> StrictMatchReport:
    """Evidence for gamma* strictly above the one-letter match probability.

    Requires a symmetric joint law, a stationary start, and every letter
    pair reachable at one step: P(X_1 = a, Y_1 = b) > 0 for all a, b.
    """
    flags = validate(hmm)
    one_step = np.einsum("z,zab->ab", hmm.chain.mu, hmm.emit)
    if not flags["symmetric"]:
        raise PreconditionViolated("joint law is not symmetric")
    if not hmm.chain.stationary_start:
        raise PreconditionViolated("start distribution is not stationary")
    if not np.all(one_step > 0):
        raise PreconditionViolated("some letter pair has zero one-step probability")
    est = mc_mean_lc(hmm, n, reps, seed, threads=threads)
    p = match_probability(hmm)
    ok = est.mean - 4 * est.std_err > p
    return StrictMatchReport(n=n, reps=reps, mean=est.mean, std_err=est.std_err,
                             match_prob=p, ok=ok)
