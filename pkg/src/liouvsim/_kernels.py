"""Gather/scatter kernels for k-bit operators on a flat amplitude vector.

The stacked density vector of an n-qubit register is handled as a 2n-bit
"state vector": a 1-qubit channel on qubit q touches bits (q, q+n), a 2-qubit
channel on (q0, q1) touches bits (q0, q1, q0+n, q1+n).  Each group of
``2**k`` amplitudes shares every untouched bit; its base index is the group
counter with zero bits inserted at the touched positions.
"""
from __future__ import annotations

import numpy as np
from numba import njit, prange

#: groups gathered per block; the 16-wide case becomes a [16,16] x [16,8] product
BLOCK = 8


@njit(cache=True, nogil=True, inline="always")
def _base_index(g, sorted_pos):
    base = g
    for p in sorted_pos:
        low = base & ((1 << p) - 1)
        base = ((base >> p) << (p + 1)) | low
    return base


@njit(cache=True, nogil=True, inline="always")
def _do_block(amps, mat, sorted_pos, offsets, start, stop, bases, scratch):
    dim = offsets.shape[0]
    width = stop - start
    for b in range(width):
        base = _base_index(start + b, sorted_pos)
        bases[b] = base
        for a in range(dim):
            scratch[a, b] = amps[base + offsets[a]]
    for r in range(dim):
        for b in range(width):
            acc = 0j
            for c in range(dim):
                acc += mat[r, c] * scratch[c, b]
            amps[bases[b] + offsets[r]] = acc


@njit(cache=True, nogil=True)
def apply_serial(amps, mat, sorted_pos, offsets):
    dim = offsets.shape[0]
    ngroups = amps.shape[0] // dim
    nblocks = (ngroups + BLOCK - 1) // BLOCK
    scratch = np.empty((dim, BLOCK), dtype=np.complex128)
    bases = np.empty(BLOCK, dtype=np.int64)
    for blk in range(nblocks):
        start = blk * BLOCK
        stop = min(start + BLOCK, ngroups)
        _do_block(amps, mat, sorted_pos, offsets, start, stop, bases, scratch)


@njit(cache=True, nogil=True, parallel=True)
def apply_parallel(amps, mat, sorted_pos, offsets, nchunks):
    # groups are disjoint, so chunks need no synchronisation
    dim = offsets.shape[0]
    ngroups = amps.shape[0] // dim
    nblocks = (ngroups + BLOCK - 1) // BLOCK
    per = (nblocks + nchunks - 1) // nchunks
    for ch in prange(nchunks):
        scratch = np.empty((dim, BLOCK), dtype=np.complex128)
        bases = np.empty(BLOCK, dtype=np.int64)
        for blk in range(ch * per, min((ch + 1) * per, nblocks)):
            start = blk * BLOCK
            stop = min(start + BLOCK, ngroups)
            _do_block(amps, mat, sorted_pos, offsets, start, stop, bases, scratch)


def local_offsets(positions) -> np.ndarray:
    """Offset of each local basis index; local bit j sits at ``positions[j]``."""
    k = len(positions)
    out = np.zeros(1 << k, dtype=np.int64)
    for a in range(1 << k):
        out[a] = sum(1 << p for j, p in enumerate(positions) if (a >> j) & 1)
    return out
