from __future__ import annotations

import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from earthfixed.hopping import assign_hop_indices, block_dims, blocks_per_super_block, plan_for_layout

PARTITION_CASES = (1, 7, 56, 61, 62, 64, 107)


def _grid60():
    i, j = np.meshgrid(np.arange(60), np.arange(60), indexing="ij")
    return i.ravel(), j.ravel()


def test_block_dims_pins():
    assert block_dims(64) == (8, 8)
    assert block_dims(56) == (8, 7)
    assert block_dims(1) == (1, 1)
    assert block_dims(61) == (8, 8)
    assert block_dims(62) == (8, 8)
    assert block_dims(107) == (11, 10)
    with pytest.raises(ValueError):
        block_dims(0)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5000))
def test_block_dims_ceil_formulas(n):
    n_cols, n_rows = block_dims(n)
    assert n_cols == math.ceil(math.sqrt(n))
    assert n_rows == math.ceil(n / n_cols)
    assert n_cols * n_rows >= n > n_cols * (n_rows - 1)


def test_regular_formula():
    plan = assign_hop_indices([3], [5], 64)
    assert plan.index[0] == 29
    assert plan.regular


@pytest.mark.parametrize("n", PARTITION_CASES)
def test_partition_exhaustive(n):
    i, j = _grid60()
    plan = assign_hop_indices(i, j, n)
    assert plan.index.min() >= 0 and plan.index.max() < n
    seen = np.zeros(len(i), dtype=int)
    for ih in range(n):
        seen[plan.active_set(ih)] += 1
    assert np.all(seen == 1)
    assert plan.active_counts().sum() == len(i)
    assert np.all(plan.active_counts() > 0)


@pytest.mark.parametrize("n", [n for n in PARTITION_CASES if block_dims(n)[0] * block_dims(n)[1] == n])
def test_regular_separation(n):
    i, j = _grid60()
    plan = assign_hop_indices(i, j, n)
    for ih in range(n):
        s = plan.active_set(ih)
        di = np.abs(i[s][:, None] - i[s][None, :])
        dj = np.abs(j[s][:, None] - j[s][None, :])
        same = np.eye(len(s), dtype=bool)
        assert np.all(same | (di >= plan.n_rows) | (dj >= plan.n_cols))


@pytest.mark.parametrize("n", PARTITION_CASES)
def test_block_repeat_bound(n):
    i, j = _grid60()
    plan = assign_hop_indices(i, j, n)
    cap = math.ceil(plan.n_cols * plan.n_rows / n)
    grid = plan.index.reshape(60, 60)
    for r0 in range(0, 60 - plan.n_rows + 1, plan.n_rows):
        for c0 in range(0, 60 - plan.n_cols + 1, plan.n_cols):
            block = grid[r0 : r0 + plan.n_rows, c0 : c0 + plan.n_cols]
            assert max(Counter(block.ravel().tolist()).values()) <= cap


def test_irregular_fill_order():
    plan = assign_hop_indices([0], [0], 61)
    sb = plan.super_block()
    first = sb[:8].ravel()
    assert list(first[:61]) == list(range(61))
    assert list(first[61:]) == [0, 1, 2]
    assert sb[8, 0] == 3
    # the stack closes the cycle: it holds a whole number of hop cycles
    assert sb.size % 61 == 0
    assert Counter(sb.ravel().tolist()) == {ih: sb.size // 61 for ih in range(61)}


def test_blocks_per_super_block():
    assert blocks_per_super_block(64) == 1
    assert blocks_per_super_block(56) == 1
    assert blocks_per_super_block(62) == 31
    assert blocks_per_super_block(61) == math.lcm(61, 64) // 64


def test_single_hop():
    i, j = _grid60()
    assert np.all(assign_hop_indices(i, j, 1).index == 0)


def test_active_set_range():
    plan = assign_hop_indices([0, 1], [0, 1], 4)
    with pytest.raises(IndexError):
        plan.active_set(4)


def test_active_spans_d3_and_a(layouts):
    c = plan_for_layout(layouts("D3"), 62).active_counts()
    assert (c.min(), c.max()) == (6, 10)
    c = plan_for_layout(layouts("A"), 65).active_counts()
    assert (c.min(), c.max()) == (1, 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 150), st.integers(-50, 50), st.integers(-50, 50))
def test_periodic_and_deterministic(n, di, dj):
    i, j = _grid60()
    a = assign_hop_indices(i, j, n)
    b = assign_hop_indices(i, j, n)
    assert np.array_equal(a.index, b.index)
    period = a.blocks_per_super_block * a.n_rows
    shifted = assign_hop_indices(i + di * period, j + dj * a.n_cols, n)
    assert np.array_equal(shifted.index, a.index)
