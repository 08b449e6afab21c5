"""Hop-index assignment over the Earth-fixed grid.

Consecutive hop indexes fill rectangular blocks of ``n_rows x n_cols`` grid
points. A block row is a stretch of one east-west grid row, so rows extend
along longitude and successive rows step in latitude. When
``n_rows * n_cols`` exceeds the number of hops the indexes keep running
cyclically from one block into the next, and the stack of blocks needed to
close the cycle forms a super-block that tiles the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def block_dims(n_hops: int) -> tuple[int, int]:
    """(n_cols, n_rows) of the hop block for ``n_hops`` hops."""
    if n_hops < 1:
        raise ValueError("n_hops must be >= 1")
    n_cols = math.isqrt(n_hops - 1) + 1 if n_hops > 1 else 1
    n_rows = -(-n_hops // n_cols)
    return n_cols, n_rows


@dataclass(frozen=True)
class HopPlan:
    n_hops: int
    n_cols: int
    n_rows: int
    blocks_per_super_block: int
    index: np.ndarray
    row: np.ndarray
    col: np.ndarray

    @property
    def regular(self) -> bool:
        return self.n_cols * self.n_rows == self.n_hops

    def active_set(self, ih: int) -> np.ndarray:
        """Beam ids lit during hop ``ih``, in ascending order."""
        if not 0 <= ih < self.n_hops:
            raise IndexError(f"hop index {ih} outside [0, {self.n_hops})")
        return np.flatnonzero(self.index == ih)

    def active_counts(self) -> np.ndarray:
        """Number of lit beams in every hop."""
        return np.bincount(self.index, minlength=self.n_hops)

    def super_block(self) -> np.ndarray:
        """Hop indexes of one super-block, shape (blocks * n_rows, n_cols)."""
        rows = self.blocks_per_super_block * self.n_rows
        i, j = np.meshgrid(np.arange(rows), np.arange(self.n_cols), indexing="ij")
        return _fill_index(i, j, self.n_hops, self.n_cols, rows)


def _fill_index(i, j, n_hops, n_cols, period_rows):
    # row-major position inside the super-block, then wrap over the hop cycle
    pos = np.mod(i, period_rows) * n_cols + np.mod(j, n_cols)
    return np.mod(pos, n_hops)


def blocks_per_super_block(n_hops: int) -> int:
    n_cols, n_rows = block_dims(n_hops)
    cells = n_cols * n_rows
    return math.lcm(n_hops, cells) // cells


def assign_hop_indices(row, col, n_hops: int) -> HopPlan:
    """Hop index of every grid point from its integer (row, col) position.

    ``row`` is the grid row (latitude step) and ``col`` the position inside
    the row (longitude step). Even and odd rows of the hexagonal grid are the
    two shifted rectangular sub-grids; both are read with one continuous row
    counter, so equal indexes repeat every ``n_cols`` steps east-west and
    every ``n_rows`` rows north-south.
    """
    row = np.asarray(row, dtype=np.int64)
    col = np.asarray(col, dtype=np.int64)
    n_cols, n_rows = block_dims(n_hops)
    blocks = blocks_per_super_block(n_hops)
    index = _fill_index(row, col, n_hops, n_cols, blocks * n_rows)
    return HopPlan(
        n_hops=n_hops,
        n_cols=n_cols,
        n_rows=n_rows,
        blocks_per_super_block=blocks,
        index=index.astype(np.int64),
        row=row,
        col=col,
    )


def plan_for_layout(layout, n_hops: int) -> HopPlan:
    """Hop plan over a :class:`~earthfixed.layout.BeamLayout`."""
    return assign_hop_indices(layout.lat_index, layout.lon_index, n_hops)
