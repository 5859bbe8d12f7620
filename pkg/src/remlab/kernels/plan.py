"""Flattened integer layout consumed by the enumeration kernels.

Configurations are identified with integers 0 .. b^N - 1 (block-major digits,
most significant first).  Every per-index table key is a linear form in the
digits, so the kernels only need stride matrices:

    key_s(code) = sum_t digit_t(code) * strides[s, t]
                = sum_j value_j(code) * idx_block_stride[s, j]
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model import ModelSpec, Realization, index_size


@dataclass(frozen=True, eq=False)
class EnumerationPlan:
    base: int
    n_spins: int
    total: int
    n_scale: float  # multiplies the weighted table sum (energy = n_scale*val + h*mag)
    h: float
    weights: np.ndarray          # (n_idx,) float64
    tables: tuple[np.ndarray, ...]
    flat: np.ndarray             # concatenated tables, float64
    offsets: np.ndarray          # (n_idx,) int64 into flat
    strides: np.ndarray          # (n_idx, n_spins) int64 per-spin key strides
    idx_block_stride: np.ndarray  # (n_idx, n_blocks) int64 per-block key strides
    block_divisor: np.ndarray    # (n_blocks,) int64: b^(digits after block j)
    block_mod: np.ndarray        # (n_blocks,) int64: b^(k_j)
    block_sizes: np.ndarray      # (n_blocks,) int64
    block_of_spin: np.ndarray    # (n_spins,) int64, 0-based block ids


def build_plan(spec: ModelSpec, realization: Realization) -> EnumerationPlan:
    part = realization.partition
    b, N, n = spec.b, realization.N, spec.n
    n_idx = len(spec.indices)
    k = part.k
    spin_start = [part.spin_start(j) for j in range(1, n + 1)]

    strides = np.zeros((n_idx, N), dtype=np.int64)
    idx_block_stride = np.zeros((n_idx, n), dtype=np.int64)
    for s, idx in enumerate(spec.indices):
        suffix = 0  # digits of this index that come after the current block
        for blk in reversed(idx.blocks):
            j = blk - 1
            idx_block_stride[s, j] = b**suffix
            for pos in range(k[j]):
                strides[s, spin_start[j] + pos] = b ** (suffix + k[j] - 1 - pos)
            suffix += k[j]

    block_divisor = np.array(
        [b ** (N - spin_start[j] - k[j]) for j in range(n)], dtype=np.int64
    )
    block_mod = np.array([b ** k[j] for j in range(n)], dtype=np.int64)
    block_of_spin = np.repeat(np.arange(n, dtype=np.int64), k)

    sizes = np.array([t.size for t in realization.tables], dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(sizes[:-1]))).astype(np.int64)
    flat = np.ascontiguousarray(np.concatenate(realization.tables), dtype=np.float64)
    tables = tuple(flat[o : o + sz] for o, sz in zip(offsets, sizes))

    return EnumerationPlan(
        base=b,
        n_spins=N,
        total=b**N,
        n_scale=float(N),
        h=float(spec.h),
        weights=np.array([idx.weight for idx in spec.indices], dtype=np.float64),
        tables=tables,
        flat=flat,
        offsets=offsets,
        strides=strides,
        idx_block_stride=idx_block_stride,
        block_divisor=block_divisor,
        block_mod=block_mod,
        block_sizes=np.array(k, dtype=np.int64),
        block_of_spin=block_of_spin,
    )
