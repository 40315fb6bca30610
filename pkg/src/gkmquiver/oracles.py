"""Brute-force ground truth used to cross-check the combinatorial pipeline.

Everything here is deliberately naive: subspaces over F_p are listed in
reduced row-echelon form, Hom spaces are counted triple by triple, and the
Bruhat order uses rank matrices.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import prod
from typing import Mapping, Sequence

import numpy as np

from ._kernels import closed_subsets, count_tuples
from .fixed_cells import FixedPoint
from .gradings import AlignedBasis
from .quiver_core import CoefficientForest, Quiver, restrict_forest

DEFAULT_BUDGET = 10**7
MAX_BRUTE_FORCE_BASIS = 16


class BudgetExceeded(RuntimeError):
    def __init__(self, needed: int, budget: int):
        super().__init__(f"{needed} candidate tuples exceed the budget of {budget}")
        self.needed = needed
        self.budget = budget


class OracleSizeError(ValueError):
    pass


@dataclass
class FqCountResult:
    q: int
    count: int
    enumerated: int
    per_cell: dict[FixedPoint, int] = field(default_factory=dict)


def gaussian_binomial(m: int, e: int, p: int) -> int:
    if e < 0 or e > m:
        return 0
    num = den = 1
    for t in range(e):
        num *= p ** (m - t) - 1
        den *= p ** (t + 1) - 1
    return num // den


def rref_subspaces(m: int, e: int, p: int) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """All e-dimensional subspaces of F_p^m as RREF matrices, with their pivot columns."""
    mats, pivots = [], []
    for piv in itertools.combinations(range(m), e):
        free = [(t, c) for t in range(e) for c in range(piv[t] + 1, m) if c not in piv]
        base = np.zeros((e, m), dtype=np.int64)
        for t, c in enumerate(piv):
            base[t, c] = 1
        for vals in itertools.product(range(p), repeat=len(free)):
            mat = base.copy()
            for (t, c), x in zip(free, vals):
                mat[t, c] = x
            mats.append(mat)
            pivots.append(piv)
    return np.array(mats, dtype=np.int64).reshape(len(mats), e, m), pivots


def _contained(images: np.ndarray, target: np.ndarray, piv: Sequence[int], p: int) -> np.ndarray:
    """For each stack of row vectors in ``images``, whether all rows lie in rowspace(target)."""
    if images.shape[1] == 0:
        return np.ones(images.shape[0], dtype=bool)
    coeffs = images[:, :, list(piv)] if len(piv) else np.zeros(images.shape[:2] + (0,), dtype=np.int64)
    resid = (images - coeffs @ target) % p
    return ~resid.any(axis=(1, 2))


def count_points_fq(
    q: Quiver,
    f: CoefficientForest,
    e: Mapping[str, int],
    p: int,
    *,
    align: AlignedBasis | None = None,
    budget: int = DEFAULT_BUDGET,
    per_cell: bool = False,
) -> FqCountResult:
    """Number of F_p-points of the quiver Grassmannian, all structure constants 1.

    With ``per_cell`` the points are also grouped by their pivot sets, which
    (columns taken in the aligned fiber order) name the limit fixed point.
    """
    order = {v: tuple((align.fiber_order if align else f.fibers).get(v, ())) for v in q.vertices}
    m = {v: len(order[v]) for v in q.vertices}
    ev = {v: e.get(v, 0) for v in q.vertices}
    if any(ev[v] < 0 or ev[v] > m[v] for v in q.vertices):
        return FqCountResult(p, 0, 0)
    sizes = [gaussian_binomial(m[v], ev[v], p) for v in q.vertices]
    needed = prod(sizes)
    if needed > budget:
        raise BudgetExceeded(needed, budget)
    pos = {v: {b: n for n, b in enumerate(order[v])} for v in q.vertices}
    subs = {v: rref_subspaces(m[v], ev[v], p) for v in q.vertices}
    level = {v: n for n, v in enumerate(q.vertices)}

    def arrow_matrix(a):
        mat = np.zeros((m[a.source], m[a.target]), dtype=np.int64)  # row vectors: x -> x @ mat
        for (b, aid), t in f.successor.items():
            if aid == a.id:
                mat[pos[a.source][b], pos[a.target][t]] = 1
        return mat

    keep = {v: np.ones(len(subs[v][1]), dtype=bool) for v in q.vertices}
    constraints = []
    for a in q.arrows:
        mats_s, _ = subs[a.source]
        mats_t, piv_t = subs[a.target]
        images = (mats_s @ arrow_matrix(a)) % p
        if a.source == a.target:
            keep[a.source] &= np.array(
                [_contained(images[n : n + 1], mats_t[n], piv_t[n], p)[0] for n in range(len(piv_t))], dtype=bool
            )
            continue
        allowed = np.zeros((len(mats_s), len(mats_t)), dtype=bool)
        for n in range(len(mats_t)):
            allowed[:, n] = _contained(images, mats_t[n], piv_t[n], p)
        constraints.append((a.source, a.target, allowed))

    def count_with(selection):
        # selection: vertex -> boolean mask over that vertex's subspaces
        idx = {v: np.flatnonzero(selection[v] & keep[v]) for v in q.vertices}
        lv_sizes = [len(idx[v]) for v in q.vertices]
        packed = []
        for s, t, allowed in constraints:
            sub = allowed[np.ix_(idx[s], idx[t])]
            if level[s] < level[t]:
                packed.append((level[t], level[s], sub))
            else:
                packed.append((level[s], level[t], sub.T))
        return count_tuples(lv_sizes, packed)

    full = {v: np.ones(len(subs[v][1]), dtype=bool) for v in q.vertices}
    result = FqCountResult(p, count_with(full), needed)
    if per_cell:
        from .fixed_cells import enumerate_fixed_points

        for u in enumerate_fixed_points(q, f, e):
            sel = {}
            for v in q.vertices:
                want = tuple(n for n, b in enumerate(order[v]) if b in u.selected)
                sel[v] = np.array([piv == want for piv in subs[v][1]], dtype=bool)
            result.per_cell[u] = count_with(sel)
    return result


# -- Hom triples ---------------------------------------------------------------


def _connected_subsets(f: CoefficientForest) -> list[frozenset[str]]:
    adj = {b: set() for b in f.basis}
    for a in f.arrows:
        adj[a.source].add(a.target)
        adj[a.target].add(a.source)
    seen = set()
    frontier = [frozenset([b]) for b in f.basis]
    seen.update(frontier)
    while frontier:
        nxt = []
        for s in frontier:
            for x in s:
                for y in adj[x] - s:
                    t = s | {y}
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
        frontier = nxt
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def _isomorphisms(f_s: CoefficientForest, s: frozenset[str], f_t: CoefficientForest, t: frozenset[str]) -> int:
    """Number of label-preserving quiver isomorphisms between two connected pieces.

    By the winding condition an isomorphism is fixed by the image of one vertex.
    """
    if len(s) != len(t):
        return 0
    root = min(s)
    count = 0
    for y in sorted(t):
        if f_t.over[y] != f_s.over[root]:
            continue
        mu = {root: y}
        queue = [root]
        ok = True
        while queue and ok:
            x = queue.pop()
            mx = mu[x]
            steps = [(a.target, f_t.successor.get((mx, a.over))) for a in f_s.out_arrows[x] if a.target in s]
            for a in f_s.in_arrows[x]:
                if a.source in s:
                    cands = [b.source for b in f_t.in_arrows[mx] if b.over == a.over]
                    steps.append((a.source, cands[0] if len(cands) == 1 else None))
            for z, img in steps:
                if img is None or img not in t:
                    ok = False
                    break
                if z in mu:
                    ok = mu[z] == img
                    if not ok:
                        break
                    continue
                mu[z] = img
                queue.append(z)
        if ok and len(mu) == len(s):
            count += _verify_iso(f_s, s, f_t, t, mu)
    return count


def _verify_iso(f_s, s, f_t, t, mu) -> int:
    if set(mu.values()) != set(t):
        return 0
    arrows_s = {(mu[a.source], mu[a.target], a.over) for a in f_s.arrows if a.source in s and a.target in s}
    arrows_t = {(a.source, a.target, a.over) for a in f_t.arrows if a.source in t and a.target in t}
    labels = all(f_s.over[x] == f_t.over[y] for x, y in mu.items())
    return int(labels and arrows_s == arrows_t)


def hom_triples(f: CoefficientForest, u: FixedPoint) -> list[tuple[frozenset[str], frozenset[str], int]]:
    """(S', T', number of isomorphisms S' -> T') for all admissible pieces."""
    fu = restrict_forest(f, u.selected)
    ft = restrict_forest(f, [b for b in f.basis if b not in u.selected])
    subs = [
        s for s in _connected_subsets(fu) if all(a.source in s for x in s for a in fu.in_arrows[x])
    ]
    quots = [
        t for t in _connected_subsets(ft) if all(a.target in t for x in t for a in ft.out_arrows[x])
    ]
    out = []
    for s in subs:
        for t in quots:
            n = _isomorphisms(fu, s, ft, t)
            if n:
                out.append((s, t, n))
    return out


def hom_dim_triples(f: CoefficientForest, u: FixedPoint) -> int:
    """dim Hom(U, M/U) counted by triples (S', mu, T')."""
    return sum(n for _, _, n in hom_triples(f, u))


# -- Bruhat order --------------------------------------------------------------


def _rank_matrix(w: Sequence[int]) -> np.ndarray:
    n = len(w)
    r = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            r[i, j] = sum(1 for a in range(i + 1) if w[a] >= j + 1)
    return r


def bruhat_leq(v: Sequence[int], w: Sequence[int]) -> bool:
    """v <= w in the Bruhat order of S_n (rank-matrix dominance)."""
    if len(v) != len(w):
        raise ValueError("permutations of different length")
    if sorted(v) != list(range(1, len(v) + 1)) or sorted(w) != list(range(1, len(w) + 1)):
        raise ValueError("not permutations of 1..n")
    return bool((_rank_matrix(v) <= _rank_matrix(w)).all())


def bruhat_lower_interval(w: Sequence[int]) -> list[tuple[int, ...]]:
    return [v for v in itertools.permutations(range(1, len(w) + 1)) if bruhat_leq(v, w)]


# -- exhaustive fixed points ---------------------------------------------------


def brute_force_fixed_points(q: Quiver, f: CoefficientForest, e: Mapping[str, int]) -> list[FixedPoint]:
    """Filter all 2^|B| subsets by successor-closure and dimension vector."""
    basis = f.basis
    if len(basis) > MAX_BRUTE_FORCE_BASIS:
        raise OracleSizeError(f"{len(basis)} basis vectors exceed the limit of {MAX_BRUTE_FORCE_BASIS}")
    pos = f.position
    vidx = {v: n for n, v in enumerate(q.vertices)}
    succ = np.zeros(len(basis), dtype=np.int64)
    for a in f.arrows:
        succ[pos[a.source]] |= 1 << pos[a.target]
    fiber_of = np.array([vidx[f.over[b]] for b in basis], dtype=np.int64)
    target = np.array([e.get(v, 0) for v in q.vertices], dtype=np.int64)
    if (target < 0).any():
        return []
    masks = closed_subsets(succ, fiber_of, target)
    out = [FixedPoint(frozenset(b for b in basis if (int(mk) >> pos[b]) & 1)) for mk in masks]
    out.sort(key=lambda u: u.sort_key(f))
    return out
