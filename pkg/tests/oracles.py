"""Independent reference implementations used only by the tests.

Everything here is written the slow, obvious way — recursive LCS, explicit
path sums for joint laws, nested-loop partition enumeration — so the fast
library code is checked against logic that shares none of its structure.
"""

from functools import lru_cache
from itertools import product

import numpy as np


def lcs_by_subsequence_sets(u, v) -> int:
    """Literal definition: longest element of subseq(u) & subseq(v).

    Exponential; only for very short words.
    """

    def subsequences(w):
        w = tuple(w)
        out = set()
        for mask in range(1 << len(w)):
            out.add(tuple(c for i, c in enumerate(w) if mask >> i & 1))
        return out

    common = subsequences(u) & subsequences(v)
    return max(len(s) for s in common)


def lcs_recursive(u, v) -> int:
    u, v = tuple(u), tuple(v)

    @lru_cache(maxsize=None)
    def rec(i, j):
        if i == 0 or j == 0:
            return 0
        if u[i - 1] == v[j - 1]:
            return rec(i - 1, j - 1) + 1
        return max(rec(i - 1, j), rec(i, j - 1))

    return rec(len(u), len(v))


def joint_law_by_paths(hmm, n):
    """P(X = u, Y = v) by explicit summation over hidden paths."""
    S, A = hmm.chain.n_states, hmm.n_letters
    law = {}
    for z_path in product(range(S), repeat=n):
        pz = hmm.chain.mu[z_path[0]]
        for a, b in zip(z_path, z_path[1:]):
            pz *= hmm.chain.P[a, b]
        if pz == 0.0:
            continue
        for u in product(range(A), repeat=n):
            for v in product(range(A), repeat=n):
                p = pz
                for z, a, b in zip(z_path, u, v):
                    p *= hmm.emit[z, a, b]
                if p:
                    law[u, v] = law.get((u, v), 0.0) + p
    return law


def beta_by_paths(hmm, n) -> float:
    """Half L1 between the path-sum joint law and its marginal product."""
    A = hmm.n_letters
    law = joint_law_by_paths(hmm, n)
    px, py = {}, {}
    for (u, v), p in law.items():
        px[u] = px.get(u, 0.0) + p
        py[v] = py.get(v, 0.0) + p
    total = 0.0
    for u in product(range(A), repeat=n):
        for v in product(range(A), repeat=n):
            total += abs(law.get((u, v), 0.0) - px.get(u, 0.0) * py.get(v, 0.0))
    return 0.5 * total


def partitions_by_loops(k, n, allow_empty_final=True):
    """All admissible cut pairs, by filtering every nondecreasing cut tuple.

    Exponential in r; intended for small k*n only.
    """
    import math
    from itertools import combinations_with_replacement as cwr

    L = k * n
    out = set()
    for r in range(k, math.ceil(2 * k * n / (2 * n - 1)) + 1):
        for nu_mid in cwr(range(1, L + 2), r - 1):
            nu = (1,) + nu_mid + (L + 1,)
            for tau_mid in cwr(range(1, L + 2), r - 1):
                tau = (1,) + tau_mid + (L + 1,)
                sums = [nu[j + 1] - nu[j] + tau[j + 1] - tau[j] for j in range(r)]
                if not all(s in (2 * n - 1, 2 * n) for s in sums[:-1]):
                    continue
                if sums[-1] >= 2 * n:
                    continue
                if sums[-1] == 0 and not allow_empty_final:
                    continue
                out.add((nu, tau))
    return out


def diagonal_matches_by_loop(x, y, k):
    x = list(x)
    y = list(y)
    count = 0
    j = 1
    while j * k <= len(x) - 1:
        if x[(j - 1) * k] == y[j * k]:
            count += 1
        j += 1
    return count
