"""Finite-state chains: stationarity, mixing times, Doeblin minorization.

All quantities are computed on row-stochastic matrices.  Matrix powers use
repeated squaring and renormalize every product back to row sums of one so
that round-off cannot accumulate over long horizons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DimensionMismatch, IterationCap, NoPositivePower, NotIrreducible, NotMixing

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10
DEFAULT_ITERATION_CAP = 10**6

# Grid on which the mixing-time objective tau(eps) * ((2-eps)/(1-eps))^2 is
# minimized.  0.99 is the last point; eps = 1 makes the objective infinite.
DEFAULT_EPS_GRID = tuple(round(0.01 * i, 2) for i in range(100))


def _as_matrix(chain) -> np.ndarray:
    P = chain.P if hasattr(chain, "P") else np.asarray(chain, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise DimensionMismatch(f"transition matrix must be square, got {P.shape}")
    return P


def _check_stochastic(P: np.ndarray) -> None:
    if np.any(P < 0):
        raise ValueError("transition matrix has negative entries")
    bad = np.abs(P.sum(axis=1) - 1.0)
    if bad.max() > ROW_SUM_TOL:
        raise ValueError(f"row sums deviate from 1 by {bad.max():.3e}")


@dataclass
class ChainSpec:
    """An initial distribution plus a row-stochastic transition matrix.

    ``pi`` is computed on first access and cached; the spec is otherwise
    treated as immutable.
    """

    states: tuple[str, ...]
    mu: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.P = np.asarray(self.P, dtype=float)
        n = len(self.states)
        if self.P.shape != (n, n):
            raise DimensionMismatch(f"P must be {n}x{n}, got {self.P.shape}")
        if self.mu.shape != (n,):
            raise DimensionMismatch(f"mu must have length {n}")
        _check_stochastic(self.P)
        if np.any(self.mu < 0) or abs(self.mu.sum() - 1.0) > ROW_SUM_TOL:
            raise ValueError("mu is not a probability vector")

    @property
    def n_states(self) -> int:
        return len(self.states)

    @cached_property
    def pi(self) -> np.ndarray:
        return stationary_distribution(self.P)

    @property
    def stationary_start(self) -> bool:
        return bool(np.abs(self.mu - self.pi).sum() <= ROW_SUM_TOL * max(1, self.n_states))


@dataclass(frozen=True)
class MixingReport:
    """Result of minimizing tau(eps) * ((2-eps)/(1-eps))^2 over an eps grid."""

    epsilon: float
    tau_eps: int
    tau_min: float
    A: float


@dataclass(frozen=True)
class DoeblinConstants:
    """Minorization P^k >= eps and the induced coupling decay constants."""

    k: int
    eps: float
    alpha: float
    c: float
    p_match: float | None = None


def tv_distance(mu, nu) -> float:
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if mu.shape != nu.shape:
        raise DimensionMismatch(f"shape mismatch {mu.shape} vs {nu.shape}")
    return 0.5 * float(np.abs(mu - nu).sum())


def stationary_distribution(P) -> np.ndarray:
    """Unique stationary row vector of an irreducible P, by linear solve."""
    P = _as_matrix(P)
    _check_stochastic(P)
    flags = check_irreducible_aperiodic(P)
    if not flags["irreducible"]:
        raise NotIrreducible("stationary distribution requested for a reducible chain")
    n = P.shape[0]
    A = np.vstack([P.T - np.eye(n), np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    resid = np.abs(pi @ P - pi).sum()
    if resid > STATIONARY_TOL:
        raise ValueError(f"stationary solve residual {resid:.3e} exceeds tolerance")
    return pi


def _period_of_class(P: np.ndarray, members: np.ndarray) -> int:
    # gcd of cycle lengths through members[0], via BFS levels: every edge
    # u -> v inside the class contributes gcd(level[u] + 1 - level[v]).
    start = int(members[0])
    inside = np.zeros(P.shape[0], dtype=bool)
    inside[members] = True
    level = {start: 0}
    frontier = [start]
    g = 0
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.nonzero(P[u] > 0)[0]:
                v = int(v)
                if not inside[v]:
                    continue
                if v in level:
                    g = math.gcd(g, level[u] + 1 - level[v])
                else:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    return abs(g) if g != 0 else 0


def check_irreducible_aperiodic(P) -> dict:
    """Structural check of the support digraph.

    ``period`` is the period of the communicating class containing state 0;
    ``aperiodic`` means that period equals 1.
    """
    P = _as_matrix(P)
    n = P.shape[0]
    graph = csr_matrix((P > 0).astype(np.int8))
    n_comp, labels = connected_components(graph, directed=True, connection="strong")
    irreducible = bool(n_comp == 1)
    members = np.nonzero(labels == labels[0])[0]
    period = _period_of_class(P, members)
    return {
        "irreducible": irreducible,
        "aperiodic": irreducible and period == 1,
        "period": period,
    }


def _renorm(M: np.ndarray) -> np.ndarray:
    return M / M.sum(axis=1, keepdims=True)


def matrix_power(P, t: int) -> np.ndarray:
    """P^t by repeated squaring, each product renormalized to row sums 1."""
    P = _as_matrix(P)
    if t < 0:
        raise ValueError("negative power")
    out = np.eye(P.shape[0])
    base = P.copy()
    while t:
        if t & 1:
            out = _renorm(out @ base)
        t >>= 1
        if t:
            base = _renorm(base @ base)
    return out


class _DbarCurve:
    """dbar(t) evaluated through a cache of squared powers.

    dbar is non-increasing in t (it is submultiplicative and bounded by 1),
    which makes exponential search plus bisection valid.
    """

    def __init__(self, P: np.ndarray):
        self.P = P
        self._squares = [P]          # squares[j] = P^(2^j)
        self._values: dict[int, float] = {}

    def _square(self, j: int) -> np.ndarray:
        while len(self._squares) <= j:
            M = self._squares[-1]
            self._squares.append(_renorm(M @ M))
        return self._squares[j]

    def power(self, t: int) -> np.ndarray:
        out = None
        j = 0
        while t:
            if t & 1:
                M = self._square(j)
                out = M if out is None else _renorm(out @ M)
            t >>= 1
            j += 1
        return np.eye(self.P.shape[0]) if out is None else out

    def dbar(self, t: int) -> float:
        if t not in self._values:
            M = self.power(t)
            d = 0.0
            for i in range(M.shape[0] - 1):
                d = max(d, 0.5 * np.abs(M[i + 1:] - M[i]).sum(axis=1).max())
            self._values[t] = float(d)
        return self._values[t]

    def first_time_below(self, eps: float, cap: int) -> int:
        """Smallest t >= 1 with dbar(t) <= eps."""
        if self.dbar(1) <= eps:
            return 1
        lo = hi = 1
        while self.dbar(hi) > eps:
            if hi >= cap:
                raise IterationCap(f"dbar did not reach {eps} within {cap} steps")
            lo, hi = hi, min(hi * 2, cap)
        # dbar(lo) > eps, dbar(hi) <= eps
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.dbar(mid) <= eps:
                hi = mid
            else:
                lo = mid
        return hi


def dbar(chain, t: int) -> float:
    """Worst-case TV distance between rows of P^t."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return _DbarCurve(_as_matrix(chain)).dbar(t)


def _require_mixing(P: np.ndarray) -> None:
    flags = check_irreducible_aperiodic(P)
    if not flags["irreducible"]:
        raise NotIrreducible("chain is reducible")
    if not flags["aperiodic"]:
        raise NotMixing(f"chain is periodic with period {flags['period']}")


def mixing_time(chain, eps: float, cap: int = DEFAULT_ITERATION_CAP) -> int:
    """Smallest t with dbar(t) <= eps."""
    P = _as_matrix(chain)
    _require_mixing(P)
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    return _DbarCurve(P).first_time_below(eps, cap)


def mixing_profile(chain, eps_grid=DEFAULT_EPS_GRID, cap: int = DEFAULT_ITERATION_CAP):
    """Rows (eps, tau_eps, objective) over the grid, descending in eps.

    tau_eps is None for grid points unreachable within the cap.
    """
    P = _as_matrix(chain)
    _require_mixing(P)
    curve = _DbarCurve(P)
    rows = []
    for eps in sorted(eps_grid, reverse=True):
        try:
            tau = curve.first_time_below(eps, cap)
        except IterationCap:
            rows.append((eps, None, None))
            continue
        rows.append((eps, tau, tau * ((2.0 - eps) / (1.0 - eps)) ** 2))
    return rows


def tau_min(chain, eps_grid=DEFAULT_EPS_GRID, cap: int = DEFAULT_ITERATION_CAP) -> MixingReport:
    """Minimize tau(eps) * ((2 - eps)/(1 - eps))^2 over the grid.

    Grid points whose tau(eps) is unreachable within the cap are skipped:
    the minimum over the remaining points still upper-bounds the infimum,
    which only weakens (never invalidates) the concentration constant A.
    """
    best = None
    for eps, tau, obj in mixing_profile(chain, eps_grid, cap):
        if obj is not None and (best is None or obj < best[0]):
            best = (obj, eps, tau)
    if best is None:
        raise IterationCap("no eps-grid point reached within the iteration cap")
    obj, eps, tau = best
    return MixingReport(epsilon=eps, tau_eps=tau, tau_min=obj, A=math.sqrt(obj / 2.0))


def doeblin_constants(chain, max_k: int | None = None) -> DoeblinConstants:
    """Smallest k with P^k entrywise positive, and the coupling decay pair
    (alpha, c) = ((1-eps)^(1/k), 1/(1-eps)^2) for eps = min entry of P^k.

    The default search range is the Wielandt bound (n-1)^2 + 1, beyond which
    a primitive matrix must already have become positive.
    """
    P = _as_matrix(chain)
    _require_mixing(P)
    n = P.shape[0]
    if max_k is None:
        max_k = (n - 1) ** 2 + 1
    M = np.eye(n)
    for k in range(1, max_k + 1):
        M = _renorm(M @ P)
        if np.all(M > 0):
            eps = float(M.min())
            if eps >= 1.0:
                # Single-state chain: coupling meets instantly.  The generic
                # constants degenerate, so report the tight valid pair.
                return DoeblinConstants(k=k, eps=1.0, alpha=0.0, c=1.0)
            alpha = (1.0 - eps) ** (1.0 / k)
            c = 1.0 / (1.0 - eps) ** 2
            return DoeblinConstants(k=k, eps=eps, alpha=alpha, c=c)
    raise NoPositivePower(f"P^k has zero entries for every k <= {max_k}")
