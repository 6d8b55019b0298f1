"""Longest-common-subsequence kernels and block variants.

Three interchangeable kernels compute the plain LCS length: a full-table
dynamic program, a two-row refinement of it, and a bit-parallel scan that
packs DP rows into big-integer bitmasks (gmpy2 when available).  The block
variants (suffix-restricted, partitioned, diagonal match count) are the
quantities the partition and estimator modules are built on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import AlphabetTooLarge, LengthMismatch

try:  # big-int bit ops are ~2.5x faster under gmpy2; plain ints work too
    from gmpy2 import mpz, popcount as _popcount

    _ONE = mpz(1)
except ImportError:  # pragma: no cover - exercised only without gmpy2
    mpz = int
    _ONE = 1

    def _popcount(x: int) -> int:
        return x.bit_count()

DEFAULT_MAX_ALPHABET = 256
KERNELS = ("quadratic", "linear_space", "bit_parallel")


@dataclass(frozen=True)
class Word:
    """Letters as indices 0..alphabet_size-1."""

    letters: tuple[int, ...]
    alphabet_size: int

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise ValueError("alphabet_size must be positive")
        if any(c < 0 or c >= self.alphabet_size for c in self.letters):
            raise ValueError("letter index out of range")

    def __len__(self) -> int:
        return len(self.letters)

    @classmethod
    def from_string(cls, text: str, alphabet: tuple[str, ...]) -> "Word":
        index = {a: i for i, a in enumerate(alphabet)}
        try:
            letters = tuple(index[ch] for ch in text)
        except KeyError as e:
            raise ValueError(f"letter {e.args[0]!r} not in alphabet") from e
        return cls(letters=letters, alphabet_size=len(alphabet))

    def to_string(self, alphabet: tuple[str, ...]) -> str:
        return "".join(alphabet[c] for c in self.letters)


@dataclass(frozen=True)
class LcsResult:
    length: int
    kernel: str
    n_ops: int | None = None


def _letters(w) -> np.ndarray:
    if isinstance(w, Word):
        return np.asarray(w.letters, dtype=np.int64)
    return np.ascontiguousarray(np.asarray(w, dtype=np.int64))


@njit(cache=True)
def _lcs_table(u, v):
    m, n = len(u), len(v)
    T = np.zeros((m + 1, n + 1), dtype=np.int32)
    for i in range(1, m + 1):
        ui = u[i - 1]
        for j in range(1, n + 1):
            if ui == v[j - 1]:
                T[i, j] = T[i - 1, j - 1] + 1
            else:
                a = T[i - 1, j]
                b = T[i, j - 1]
                T[i, j] = a if a >= b else b
    return T[m, n]


@njit(cache=True)
def _lcs_two_rows(u, v):
    m, n = len(u), len(v)
    prev = np.zeros(n + 1, dtype=np.int32)
    cur = np.zeros(n + 1, dtype=np.int32)
    for i in range(m):
        ui = u[i]
        for j in range(1, n + 1):
            if ui == v[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                a = prev[j]
                b = cur[j - 1]
                cur[j] = a if a >= b else b
        prev, cur = cur, prev
    return prev[n]


def _lcs_bit_parallel(u: np.ndarray, v: np.ndarray, max_alphabet: int) -> int:
    if len(v) > len(u):  # keep the bitmask over the shorter word
        u, v = v, u
    n = len(v)
    if n == 0:
        return 0
    vl = v.tolist()
    asize = max(vl) + 1
    if asize > max_alphabet:
        raise AlphabetTooLarge(f"alphabet size {asize} exceeds budget {max_alphabet}")
    masks = [mpz(0)] * asize
    bit = _ONE
    for c in vl:
        masks[c] |= bit
        bit <<= 1
    full = (_ONE << n) - 1
    row = mpz(0)
    for c in u.tolist():
        x = (masks[c] if c < asize else mpz(0)) | row
        y = ((row << 1) | _ONE) & full
        row = x & (full ^ ((x - y) & full))
    return int(_popcount(row))


def lcs_length(u, v, kernel: str = "bit_parallel",
               max_alphabet: int = DEFAULT_MAX_ALPHABET) -> int:
    """LCS length of two words; all kernels return identical values."""
    ua, va = _letters(u), _letters(v)
    if len(ua) == 0 or len(va) == 0:
        return 0
    if kernel == "quadratic":
        return int(_lcs_table(ua, va))
    if kernel == "linear_space":
        return int(_lcs_two_rows(ua, va))
    if kernel == "bit_parallel":
        return _lcs_bit_parallel(ua, va, max_alphabet)
    raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")


def lcs_detail(u, v, kernel: str = "bit_parallel") -> LcsResult:
    ua, va = _letters(u), _letters(v)
    length = lcs_length(ua, va, kernel)
    n_ops = len(ua) * len(va) if kernel in ("quadratic", "linear_space") else len(ua)
    return LcsResult(length=length, kernel=kernel, n_ops=n_ops)


def lcs_restricted(u, v, k_cut: int, kernel: str = "bit_parallel") -> int:
    """LCS of the suffixes that start after position k_cut (1-based words)."""
    ua, va = _letters(u), _letters(v)
    if k_cut < 0:
        raise ValueError("k_cut must be >= 0")
    return lcs_length(ua[k_cut:], va[k_cut:], kernel)


@njit(cache=True)
def _batch_lengths(us, vs, mode):
    npairs = us.shape[0]
    out = np.empty(npairs, dtype=np.int64)
    for p in range(npairs):
        if mode == 0:
            out[p] = _lcs_table(us[p], vs[p])
        else:
            out[p] = _lcs_two_rows(us[p], vs[p])
    return out


def lcs_length_batch(us: np.ndarray, vs: np.ndarray, kernel: str = "bit_parallel",
                     max_alphabet: int = DEFAULT_MAX_ALPHABET) -> np.ndarray:
    """LCS lengths for aligned rows of two (npairs, length) arrays."""
    us = np.ascontiguousarray(us, dtype=np.int64)
    vs = np.ascontiguousarray(vs, dtype=np.int64)
    if us.shape[0] != vs.shape[0]:
        raise LengthMismatch("batch sizes differ")
    if kernel == "quadratic":
        return _batch_lengths(us, vs, 0)
    if kernel == "linear_space":
        return _batch_lengths(us, vs, 1)
    if kernel == "bit_parallel":
        return np.array([_lcs_bit_parallel(u, v, max_alphabet) for u, v in zip(us, vs)],
                        dtype=np.int64)
    raise ValueError(f"unknown kernel {kernel!r}")


def lcs_partitioned(u, v, nu, tau, kernel: str = "bit_parallel") -> int:
    """Sum of per-block LCS lengths for 1-based cut sequences nu, tau.

    Block j spans u[nu_j .. nu_{j+1} - 1] and v[tau_j .. tau_{j+1} - 1].
    Any such sum lower-bounds the unpartitioned LCS length.
    """
    ua, va = _letters(u), _letters(v)
    nu = list(nu)
    tau = list(tau)
    if len(nu) != len(tau) or len(nu) < 2:
        raise LengthMismatch("cut sequences must share a length >= 2")
    if nu[0] != 1 or tau[0] != 1 or nu[-1] != len(ua) + 1 or tau[-1] != len(va) + 1:
        raise LengthMismatch("cut sequences must run from 1 to word length + 1")
    total = 0
    for j in range(len(nu) - 1):
        if nu[j + 1] < nu[j] or tau[j + 1] < tau[j]:
            raise LengthMismatch("cut sequences must be nondecreasing")
        total += lcs_length(ua[nu[j] - 1:nu[j + 1] - 1],
                            va[tau[j] - 1:tau[j + 1] - 1], kernel)
    return total


def diagonal_match_count(x, y, k: int) -> int:
    """Count positions j >= 1 with x[(j-1)k + 1] == y[jk + 1] (1-based).

    Each match witnesses one unit of common subsequence along a stride-k
    diagonal, so the count lower-bounds the LCS length.
    """
    xa, ya = _letters(x), _letters(y)
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(xa) != len(ya):
        raise LengthMismatch("words must have equal length")
    jmax = (len(xa) - 1) // k
    if jmax < 1:
        return 0
    j = np.arange(1, jmax + 1)
    return int(np.sum(xa[(j - 1) * k] == ya[j * k]))
