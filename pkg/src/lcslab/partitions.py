"""Block partitions of aligned word pairs of length k*n.

An r-partition cuts both words into r aligned blocks: cut sequences
1 = nu_1 <= ... <= nu_{r+1} = kn+1 (same for tau), every non-final block
satisfying (nu_{j+1}-nu_j) + (tau_{j+1}-tau_j) in {2n-1, 2n} and the final
block strictly smaller than 2n, with k <= r <= ceil(2kn/(2n-1)).  The LCS of
the full pair equals the maximum over all r-partitions of the summed
per-block LCS; enumeration and counting of the partition family plus that
max identity live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EnumerationCapExceeded, InvalidPartition
from .lcs import _letters, lcs_length

DEFAULT_ENUM_CAP = 10**7


@dataclass(frozen=True)
class RPartition:
    nu: tuple[int, ...]
    tau: tuple[int, ...]
    k: int
    n: int

    @property
    def r(self) -> int:
        return len(self.nu) - 1


def r_range(k: int, n: int) -> tuple[int, int]:
    """Admissible numbers of blocks: k <= r <= ceil(2kn / (2n-1))."""
    return k, -(-2 * k * n // (2 * n - 1))


def validate(part: RPartition, allow_empty_final: bool = True) -> None:
    """Raise InvalidPartition unless all structural constraints hold."""
    k, n = part.k, part.n
    total = k * n
    nu, tau = part.nu, part.tau
    if len(nu) != len(tau) or len(nu) < 2:
        raise InvalidPartition("cut sequences must share a length >= 2")
    r = len(nu) - 1
    lo, hi = r_range(k, n)
    if not lo <= r <= hi:
        raise InvalidPartition(f"r = {r} outside [{lo}, {hi}]")
    if nu[0] != 1 or tau[0] != 1 or nu[-1] != total + 1 or tau[-1] != total + 1:
        raise InvalidPartition("cut sequences must run from 1 to kn + 1")
    if any(nu[j + 1] < nu[j] for j in range(r)) or any(tau[j + 1] < tau[j] for j in range(r)):
        raise InvalidPartition("cut sequences must be nondecreasing")
    for j in range(r - 1):
        s = (nu[j + 1] - nu[j]) + (tau[j + 1] - tau[j])
        if s not in (2 * n - 1, 2 * n):
            raise InvalidPartition(f"block {j + 1} has joint size {s}")
    last = (nu[r] - nu[r - 1]) + (tau[r] - tau[r - 1])
    if last >= 2 * n:
        raise InvalidPartition(f"final block has joint size {last} >= {2 * n}")
    if not allow_empty_final and last == 0:
        raise InvalidPartition("final block is empty")


def enumerate_partitions(k: int, n: int, r: int | None = None,
                         allow_empty_final: bool = True,
                         cap: int = DEFAULT_ENUM_CAP):
    """Yield every r-partition, r ascending then cuts lexicographic.

    Raises EnumerationCapExceeded once more than ``cap`` partitions would be
    produced.
    """
    if k < 1 or n < 1:
        raise ValueError("k and n must be >= 1")
    total = k * n
    lo, hi = r_range(k, n)
    rs = range(lo, hi + 1) if r is None else (r,)
    produced = 0
    for rr in rs:
        if not lo <= rr <= hi:
            raise ValueError(f"r = {rr} outside [{lo}, {hi}]")
        stack_a = [0] * (rr - 1)
        stack_b = [0] * (rr - 1)

        def rec(j: int, sa: int, sb: int):
            nonlocal produced
            if j == rr - 1:
                fa, fb = total - sa, total - sb
                if fa + fb >= 2 * n or (not allow_empty_final and fa + fb == 0):
                    return
                nu = [1]
                tau = [1]
                for a, b in zip(stack_a, stack_b):
                    nu.append(nu[-1] + a)
                    tau.append(tau[-1] + b)
                nu.append(total + 1)
                tau.append(total + 1)
                produced += 1
                if produced > cap:
                    raise EnumerationCapExceeded(
                        f"more than {cap} partitions for k={k}, n={n}")
                yield RPartition(nu=tuple(nu), tau=tuple(tau), k=k, n=n)
                return
            for a in range(0, min(2 * n, total - sa) + 1):
                for s in (2 * n - 1, 2 * n):
                    b = s - a
                    if b < 0 or sb + b > total:
                        continue
                    stack_a[j] = a
                    stack_b[j] = b
                    yield from rec(j + 1, sa + a, sb + b)

        yield from rec(0, 0, 0)


def count_partitions(k: int, n: int, allow_empty_final: bool = True) -> dict[int, int]:
    """Exact |B^r| for every admissible r, by dynamic programming over the
    running block-size sums (agrees with exhaustive enumeration)."""
    total = k * n
    lo, hi = r_range(k, n)
    counts = {}
    for r in range(lo, hi + 1):
        f = np.zeros((total + 1, total + 1), dtype=object)
        f[0, 0] = 1
        for _ in range(r - 1):
            g = np.zeros_like(f)
            for sa in range(total + 1):
                for sb in range(total + 1):
                    w = f[sa, sb]
                    if w == 0:
                        continue
                    for a in range(0, min(2 * n, total - sa) + 1):
                        for s in (2 * n - 1, 2 * n):
                            b = s - a
                            if 0 <= b <= total - sb:
                                g[sa + a, sb + b] += w
            f = g
        c = 0
        for sa in range(total + 1):
            for sb in range(total + 1):
                if f[sa, sb] == 0:
                    continue
                last = (total - sa) + (total - sb)
                if last < 2 * n and (allow_empty_final or last > 0):
                    c += int(f[sa, sb])
        counts[r] = c
    return counts


@dataclass(frozen=True)
class CountBoundReport:
    k: int
    n: int
    per_r: dict[int, tuple[int, int, bool]]  # r -> (count, bound, ok)
    total: int
    exp_bound: float | None
    exp_ok: bool | None


def count_bound_check(k: int, n: int, allow_empty_final: bool = True) -> CountBoundReport:
    """Compare |B^r| with 2^(r-1) * 2n * C(nk+r-1, r-1) for every r, and the
    total with exp(10 k ln n) when k > n.

    The total bound is vacuous at n = 1 (exp(0) = 1) and is only reported
    for n >= 2.
    """
    counts = count_partitions(k, n, allow_empty_final=allow_empty_final)
    per_r = {}
    for r, c in counts.items():
        bound = 2 ** (r - 1) * 2 * n * math.comb(n * k + r - 1, r - 1)
        per_r[r] = (c, bound, c <= bound)
    total = sum(counts.values())
    if k > n and n >= 2:
        exp_bound = math.exp(10 * k * math.log(n))
        exp_ok = total <= exp_bound
    else:
        exp_bound, exp_ok = None, None
    return CountBoundReport(k=k, n=n, per_r=per_r, total=total,
                            exp_bound=exp_bound, exp_ok=exp_ok)


@dataclass(frozen=True)
class PartitionMaxReport:
    lhs: int
    rhs: int
    equal: bool
    n_partitions: int
    argmax: RPartition | None


def partition_max_identity(u, v, k: int, n: int, kernel: str = "linear_space",
                           allow_empty_final: bool = True,
                           cap: int = DEFAULT_ENUM_CAP) -> PartitionMaxReport:
    """Check LCS(u, v) == max over r-partitions of the summed block LCS.

    Every partitioned sum is a lower bound (disjoint ordered blocks), and
    some partition achieves the full LCS, so lhs == rhs.  Block values are
    memoized per (u, v) since many partitions share cut intervals.
    """
    ua, va = _letters(u), _letters(v)
    if len(ua) != k * n or len(va) != k * n:
        raise ValueError(f"words must have length k*n = {k * n}")

    @lru_cache(maxsize=None)
    def block(i0: int, i1: int, j0: int, j1: int) -> int:
        return lcs_length(ua[i0:i1], va[j0:j1], kernel)

    lhs = lcs_length(ua, va, kernel)
    rhs = -1
    best = None
    count = 0
    for part in enumerate_partitions(k, n, allow_empty_final=allow_empty_final, cap=cap):
        count += 1
        s = 0
        for j in range(part.r):
            s += block(part.nu[j] - 1, part.nu[j + 1] - 1,
                       part.tau[j] - 1, part.tau[j + 1] - 1)
        if s > rhs:
            rhs, best = s, part
    return PartitionMaxReport(lhs=lhs, rhs=rhs, equal=lhs == rhs,
                              n_partitions=count, argmax=best)
