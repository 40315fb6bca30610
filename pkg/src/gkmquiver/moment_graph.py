"""Mutations, the character-labelled moment graph and tangent dimensions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .fixed_cells import FixedPoint, enumerate_fixed_points, initial_parameters
from .gradings import (
    AlignedBasis,
    Character,
    Cocharacter,
    InternalInvariantError,
    pairing,
)
from .quiver_core import CoefficientForest, Quiver, is_straight, iso_type, quotient_forest, restrict_forest


class InvalidMutation(ValueError):
    pass


class GenericityViolation(ValueError):
    pass


@dataclass(frozen=True)
class Mutation:
    """Exchange of the path L (starting at b_k) for L' (starting at b_l) over one vertex."""

    base: FixedPoint
    vertex: str
    k: int
    ell: int
    path: tuple[str, ...]  # Q-arrow ids traversed by L and L'
    removed: tuple[str, ...]  # L
    added: tuple[str, ...]  # L'

    @property
    def fundamental(self) -> bool:
        return self.k < self.ell

    @property
    def target(self) -> FixedPoint:
        return FixedPoint((self.base.selected - set(self.removed)) | set(self.added))


def apply_mutation(m: Mutation) -> FixedPoint:
    return m.target


def inverse_mutation(m: Mutation) -> Mutation:
    return Mutation(m.target, m.vertex, m.ell, m.k, m.path, m.added, m.removed)


def _mutations_from(f: CoefficientForest, s: frozenset[str], bk: str, bl: str):
    """All (path, L, L') with L a directed path in s from bk, L' its copy from bl."""
    out = []

    def grow(path, lpath, lprime):
        last, lastp = lpath[-1], lprime[-1]
        new_s = (s - set(lpath)) | set(lprime)
        if f.is_successor_closed(new_s):
            out.append((tuple(path), tuple(lpath), tuple(lprime)))
        for a in f.out_arrows[last]:
            c = a.target
            # S minus L stays successor-closed: no other selected vector may point into L
            if any(x.source in s and x.source != last for x in f.in_arrows[c]):
                continue
            cp = f.successor.get((lastp, a.over))
            if cp is None or cp in s:
                continue
            grow(path + [a.over], lpath + [c], lprime + [cp])

    grow([], [bk], [bl])
    return out


def enumerate_mutations(f: CoefficientForest, align: AlignedBasis, u: FixedPoint) -> list[Mutation]:
    """Every mutation with base u, fundamental and inverse, in deterministic order."""
    s = u.selected
    out = []
    for v in sorted(align.fiber_order):
        bs = align.fiber_order[v]
        for kpos, bk in enumerate(bs):
            if bk not in s or any(a.source in s for a in f.in_arrows[bk]):
                continue
            for lpos, bl in enumerate(bs):
                if bl in s:
                    continue
                for path, lp, lq in _mutations_from(f, s, bk, bl):
                    out.append(Mutation(u, v, kpos + 1, lpos + 1, path, lp, lq))
    out.sort(key=lambda m: (m.vertex, m.k, m.ell, m.path))
    return out


def mutation_from_triple(f: CoefficientForest, align: AlignedBasis, u: FixedPoint, vertex: str, k: int, ell: int) -> Mutation:
    """The mutation of u determined by (vertex, k, ell)."""
    found = [m for m in enumerate_mutations(f, align, u) if (m.vertex, m.k, m.ell) == (vertex, k, ell)]
    if not found:
        raise InvalidMutation(f"no mutation at vertex {vertex} with k={k}, l={ell}")
    if len(found) > 1:
        raise InvalidMutation(f"triple ({vertex}, {k}, {ell}) determines {len(found)} mutations")
    return found[0]


def vertex_character(f: CoefficientForest, b: str, arrow_ids: tuple[str, ...]) -> Character:
    """epsilon of b's component plus the signed arrow counts on the path from its source."""
    eps = [0] * len(f.components)
    eps[f.component_of[b]] = 1
    delta = [0] * len(arrow_ids)
    idx = {a: n for n, a in enumerate(arrow_ids)}
    for step in f.path_from_source(b):
        if step.startswith("-"):
            delta[idx[step[1:]]] -= 1
        else:
            delta[idx[step]] += 1
    return Character(tuple(eps), tuple(delta))


def edge_character(f: CoefficientForest, m: Mutation, arrow_ids: tuple[str, ...]) -> Character:
    """Label of the mutation: character of the l-side start minus that of the k-side start."""
    return vertex_character(f, m.added[0], arrow_ids) - vertex_character(f, m.removed[0], arrow_ids)


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    mutation: Mutation
    character: Character


@dataclass
class MomentGraph:
    vertices: list[FixedPoint]
    edges: list[Edge]
    chi: Cocharacter
    experimental: bool = False
    # experimental mode: vertices whose out-degree differs from the initial-parameter count
    unmatched: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.index = {u: n for n, u in enumerate(self.vertices)}
        self.out_edges = [[] for _ in self.vertices]
        self.in_edges = [[] for _ in self.vertices]
        for n, e in enumerate(self.edges):
            self.out_edges[e.source].append(n)
            self.in_edges[e.target].append(n)

    def out_degree(self, x: int) -> int:
        return len(self.out_edges[x])

    def degree(self, x: int) -> int:
        return len(self.out_edges[x]) + len(self.in_edges[x])

    def topological_order(self) -> list[int]:
        """Vertices with every edge x -> y placing y before x (sinks first)."""
        pending = [self.out_degree(x) for x in range(len(self.vertices))]
        ready = [x for x, d in enumerate(pending) if d == 0]
        order = []
        while ready:
            ready.sort(reverse=True)
            y = ready.pop()
            order.append(y)
            for n in self.in_edges[y]:
                x = self.edges[n].source
                pending[x] -= 1
                if pending[x] == 0:
                    ready.append(x)
        if len(order) != len(self.vertices):
            raise InternalInvariantError("moment graph has a directed cycle")
        return order


def build_moment_graph(
    q: Quiver,
    f: CoefficientForest,
    align: AlignedBasis,
    chi: Cocharacter,
    e: Mapping[str, int],
    *,
    experimental: bool | None = None,
) -> MomentGraph:
    """Fixed points with one edge per fundamental mutation, oriented base -> target."""
    if experimental is None:
        experimental = not is_straight(f)
    arrow_ids = chi.arrow_ids
    verts = enumerate_fixed_points(q, f, e)
    index = {u: n for n, u in enumerate(verts)}
    edges = []
    for n, u in enumerate(verts):
        for m in enumerate_mutations(f, align, u):
            if not m.fundamental:
                continue
            ch = edge_character(f, m, arrow_ids)
            if ch.is_zero():
                raise GenericityViolation(f"zero character on mutation {m.vertex},{m.k},{m.ell}")
            if pairing(chi, ch) <= 0:
                raise GenericityViolation(
                    f"pairing {pairing(chi, ch)} <= 0 on mutation {m.vertex},{m.k},{m.ell}"
                )
            t = index.get(m.target)
            if t is None:
                raise InternalInvariantError("mutation leaves the fixed-point set")
            edges.append(Edge(n, t, m, ch))
    g = MomentGraph(verts, edges, chi, experimental)
    g.topological_order()
    if experimental:
        g.unmatched = [
            n for n, u in enumerate(verts) if g.out_degree(n) != initial_parameters(f, align, u).dimension
        ]
    return g


def partial_order(g: MomentGraph) -> np.ndarray:
    """Boolean matrix R with R[x, y] iff x >= y (a directed path x -> ... -> y exists)."""
    n = len(g.vertices)
    reach = [0] * n
    for y in g.topological_order():
        r = 1 << y
        for k in g.out_edges[y]:
            r |= reach[g.edges[k].target]
        reach[y] = r
    out = np.zeros((n, n), dtype=bool)
    for x in range(n):
        r = reach[x]
        for y in range(n):
            if (r >> y) & 1:
                out[x, y] = True
    return out


def is_palais_smale(g: MomentGraph) -> bool:
    return all(g.out_degree(e.source) > g.out_degree(e.target) for e in g.edges)


def tangent_dimension(f: CoefficientForest, align: AlignedBasis, u: FixedPoint) -> int:
    return len(enumerate_mutations(f, align, u))


def hall_key(f: CoefficientForest, u: FixedPoint):
    return (iso_type(restrict_forest(f, u.selected)), iso_type(quotient_forest(f, u.selected)))


def hall_strata(q: Quiver, f: CoefficientForest, e: Mapping[str, int]) -> list[list[FixedPoint]]:
    """Fixed points grouped by the iso types of subrepresentation and quotient."""
    groups: dict = {}
    for u in enumerate_fixed_points(q, f, e):
        groups.setdefault(hall_key(f, u), []).append(u)
    return sorted(groups.values(), key=lambda us: us[0].sort_key(f))
