"""Hot enumeration kernels.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy version.
The numba path is used when numba imports and ``GKMQUIVER_DISABLE_NUMBA`` is
unset (or "0").  Both paths must agree bit for bit; tests run both.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def numba_enabled() -> bool:
    flag = os.environ.get("GKMQUIVER_DISABLE_NUMBA", "0").strip().lower()
    return HAVE_NUMBA and flag in ("", "0", "false", "no")


# -- subset filter -------------------------------------------------------------


def _closed_subsets_numpy(succ_masks, fiber_of, e):
    n = succ_masks.shape[0]
    masks = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(masks.shape[0], dtype=np.bool_)
    counts = np.zeros((masks.shape[0], e.shape[0]), dtype=np.int64)
    for b in range(n):
        has_b = (masks >> b) & 1
        ok &= (has_b == 0) | ((succ_masks[b] & ~masks) == 0)
        counts[:, fiber_of[b]] += has_b
    ok &= (counts == e[None, :]).all(axis=1)
    return masks[ok]


def _closed_subsets_py(succ_masks, fiber_of, e):
    n = succ_masks.shape[0]
    k = e.shape[0]
    out = np.empty(1 << n, dtype=np.int64)
    found = 0
    counts = np.zeros(k, dtype=np.int64)
    for mask in range(1 << n):
        good = True
        for i in range(k):
            counts[i] = 0
        for b in range(n):
            if (mask >> b) & 1:
                if succ_masks[b] & ~mask:
                    good = False
                    break
                counts[fiber_of[b]] += 1
        if good:
            for i in range(k):
                if counts[i] != e[i]:
                    good = False
                    break
        if good:
            out[found] = mask
            found += 1
    return out[:found]


if HAVE_NUMBA:
    _closed_subsets_jit = njit(cache=True)(_closed_subsets_py)


def closed_subsets(succ_masks: np.ndarray, fiber_of: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Bitmasks of all successor-closed subsets with fiber cardinalities ``e``.

    ``succ_masks[b]`` is the bitmask of direct successors of basis vector b,
    ``fiber_of[b]`` the index of the quiver vertex under b.
    """
    succ_masks = np.ascontiguousarray(succ_masks, dtype=np.int64)
    fiber_of = np.ascontiguousarray(fiber_of, dtype=np.int64)
    e = np.ascontiguousarray(e, dtype=np.int64)
    if numba_enabled():
        return _closed_subsets_jit(succ_masks, fiber_of, e)
    return _closed_subsets_numpy(succ_masks, fiber_of, e)


# -- constrained tuple counting ------------------------------------------------


def _count_tuples_py(sizes, con_ptr, con_other, con_off, buf):
    n = sizes.shape[0]
    if n == 0:
        return 1
    for L in range(n):
        if sizes[L] == 0:
            return 0
    idx = np.full(n, -1, dtype=np.int64)
    L = 0
    count = 0
    while L >= 0:
        idx[L] += 1
        if idx[L] >= sizes[L]:
            idx[L] = -1
            L -= 1
            continue
        good = True
        for c in range(con_ptr[L], con_ptr[L + 1]):
            o = con_other[c]
            if buf[con_off[c] + idx[o] * sizes[L] + idx[L]] == 0:
                good = False
                break
        if good:
            if L == n - 1:
                count += 1
            else:
                L += 1
    return count


if HAVE_NUMBA:
    _count_tuples_jit = njit(cache=True)(_count_tuples_py)


def _count_tuples_numpy(sizes, con_ptr, con_other, con_off, buf):
    n = sizes.shape[0]
    if n == 0:
        return 1
    rows = []
    for L in range(n):
        rows.append([
            (int(con_other[c]), buf[con_off[c]: con_off[c] + sizes[con_other[c]] * sizes[L]].reshape(sizes[con_other[c]], sizes[L]))
            for c in range(con_ptr[L], con_ptr[L + 1])
        ])
    choice = np.zeros(n, dtype=np.int64)

    def rec(L):
        mask = np.ones(sizes[L], dtype=np.bool_)
        for o, mat in rows[L]:
            mask &= mat[choice[o]].astype(np.bool_)
        if L == n - 1:
            return int(mask.sum())
        total = 0
        for i in np.flatnonzero(mask):
            choice[L] = i
            total += rec(L + 1)
        return total

    return rec(0)


def count_tuples(sizes, constraints) -> int:
    """Count index tuples (i_0, ..., i_{n-1}), 0 <= i_L < sizes[L], meeting all constraints.

    ``constraints`` is a list of (L, o, allowed) with o < L and ``allowed`` a
    boolean matrix of shape (sizes[o], sizes[L]).
    """
    sizes = np.asarray(sizes, dtype=np.int64)
    n = sizes.shape[0]
    by_level = [[] for _ in range(n)]
    for L, o, allowed in constraints:
        if not o < L:
            raise ValueError("constraint must point to an earlier level")
        by_level[L].append((o, np.ascontiguousarray(allowed, dtype=np.uint8).ravel()))
    con_ptr = np.zeros(n + 1, dtype=np.int64)
    con_other, con_off, chunks = [], [], []
    off = 0
    for L in range(n):
        for o, flat in by_level[L]:
            con_other.append(o)
            con_off.append(off)
            chunks.append(flat)
            off += flat.shape[0]
        con_ptr[L + 1] = len(con_other)
    buf = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.uint8)
    con_other = np.asarray(con_other, dtype=np.int64)
    con_off = np.asarray(con_off, dtype=np.int64)
    if numba_enabled():
        return int(_count_tuples_jit(sizes, con_ptr, con_other, con_off, buf))
    return int(_count_tuples_numpy(sizes, con_ptr, con_other, con_off, buf))
