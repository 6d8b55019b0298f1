import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcslab import (
    EnumerationCapExceeded,
    InvalidPartition,
    RPartition,
    count_bound_check,
    count_partitions,
    enumerate_partitions,
    lcs_length,
    partition_max_identity,
    r_range,
)
from lcslab.partitions import validate as validate_partition
from oracles import lcs_recursive, partitions_by_loops


SMALL_SHAPES = [(1, 1), (2, 2), (3, 2), (2, 3), (4, 1), (1, 4), (3, 1), (1, 2)]


# --- enumeration against the nested-loop oracle


@pytest.mark.parametrize("k,n", SMALL_SHAPES)
def test_enumeration_matches_loop_oracle(k, n):
    got = {(p.nu, p.tau) for p in enumerate_partitions(k, n)}
    assert got == partitions_by_loops(k, n)


@pytest.mark.parametrize("k,n", SMALL_SHAPES)
def test_enumeration_matches_loop_oracle_strict_final(k, n):
    got = {(p.nu, p.tau) for p in enumerate_partitions(k, n, allow_empty_final=False)}
    assert got == partitions_by_loops(k, n, allow_empty_final=False)


@pytest.mark.parametrize("k,n", SMALL_SHAPES)
def test_counts_match_enumeration_per_r(k, n):
    by_r = {}
    for p in enumerate_partitions(k, n):
        by_r[p.r] = by_r.get(p.r, 0) + 1
    counted = count_partitions(k, n)
    for r in counted:
        assert counted[r] == by_r.get(r, 0)
    assert sum(counted.values()) == sum(by_r.values())


def test_every_enumerated_partition_validates():
    for k, n in [(2, 2), (3, 2), (2, 3)]:
        for p in enumerate_partitions(k, n):
            validate_partition(p)  # raises on violation
            lo, hi = r_range(k, n)
            assert lo <= p.r <= hi
            assert p.nu[0] == p.tau[0] == 1
            assert p.nu[-1] == p.tau[-1] == k * n + 1


def test_validate_rejects_bad_partitions():
    # block sums outside {2n-1, 2n}
    with pytest.raises(InvalidPartition):
        validate_partition(RPartition(nu=(1, 5, 9), tau=(1, 5, 9), k=2, n=2))
    # final block not shorter than 2n
    with pytest.raises(InvalidPartition):
        validate_partition(RPartition(nu=(1, 3, 5), tau=(1, 3, 5), k=2, n=2))
    # first block sum 5 outside {3, 4}
    with pytest.raises(InvalidPartition):
        validate_partition(RPartition(nu=(1, 3, 5), tau=(1, 4, 5), k=2, n=2))


def test_r_range_formula():
    assert r_range(2, 2) == (2, math.ceil(8 / 3))
    assert r_range(1, 1) == (1, 2)
    assert r_range(5, 3) == (5, math.ceil(30 / 5))


def test_enumeration_cap_trips():
    with pytest.raises(EnumerationCapExceeded):
        list(enumerate_partitions(4, 1, cap=10))


def test_boundary_k1_n1_empty_final_convention():
    with_empty = list(enumerate_partitions(1, 1))
    strict = list(enumerate_partitions(1, 1, allow_empty_final=False))
    assert len(with_empty) == 3
    assert len(strict) == 2
    # the extra partition carries the whole pair in its first block
    extra = {(p.nu, p.tau) for p in with_empty} - {(p.nu, p.tau) for p in strict}
    assert extra == {((1, 2, 2), (1, 2, 2))}


# --- counting bounds


@pytest.mark.parametrize("k,n", [(2, 2), (3, 2), (2, 3), (4, 2)])
def test_count_bound_holds(k, n):
    report = count_bound_check(k, n)
    for r, (count, bound, ok) in report.per_r.items():
        assert bound == 2 ** (r - 1) * 2 * n * math.comb(n * k + r - 1, r - 1)
        assert ok and count <= bound


def test_count_bound_pinned_value():
    report = count_bound_check(2, 2)
    count, bound, ok = report.per_r[2]
    assert bound == 40  # 2^1 * 4 * C(5,1)
    assert ok


def test_exp_bound_only_when_k_exceeds_n():
    assert count_bound_check(2, 3).exp_bound is None       # k < n
    assert count_bound_check(3, 1).exp_bound is None       # n = 1 degenerate
    rep = count_bound_check(3, 2)
    assert rep.exp_bound == pytest.approx(math.exp(10 * 3 * math.log(2)))
    assert rep.exp_ok is True


# --- the partition-max identity


def test_identity_exhaustive_small():
    k = n = 2
    L = k * n
    for bits_u in range(2 ** L):
        u = np.array([(bits_u >> i) & 1 for i in range(L)], dtype=np.int64)
        for bits_v in range(2 ** L):
            v = np.array([(bits_v >> i) & 1 for i in range(L)], dtype=np.int64)
            rep = partition_max_identity(u, v, k, n)
            assert rep.equal, (u, v, rep.lhs, rep.rhs)


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=30, deadline=None)
def test_identity_random_words(seed):
    gen = np.random.default_rng(seed)
    k, n = gen.choice([(2, 3), (3, 2), (2, 4)])
    u = gen.integers(0, 3, size=k * n)
    v = gen.integers(0, 3, size=k * n)
    rep = partition_max_identity(u, v, k, n)
    assert rep.lhs == lcs_recursive(u, v)
    assert rep.equal
    assert rep.n_partitions == sum(count_partitions(k, n).values())


def test_identity_edge_cases():
    u = np.array([0, 1, 0, 1], dtype=np.int64)
    same = partition_max_identity(u, u, 2, 2)
    assert same.lhs == same.rhs == 4
    v = np.array([2, 3, 2, 3], dtype=np.int64)   # disjoint alphabet
    disjoint = partition_max_identity(u, v, 2, 2)
    assert disjoint.lhs == disjoint.rhs == 0


def test_partitioned_value_never_exceeds_lcs():
    gen = np.random.default_rng(17)
    k, n = 2, 3
    for _ in range(20):
        u = gen.integers(0, 2, size=k * n)
        v = gen.integers(0, 2, size=k * n)
        full = lcs_length(u, v)
        for p in enumerate_partitions(k, n):
            from lcslab import lcs_partitioned
            assert lcs_partitioned(u, v, p.nu, p.tau) <= full
