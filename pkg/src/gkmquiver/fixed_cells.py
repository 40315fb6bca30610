"""Torus fixed points, attracting cells and the Poincare polynomial."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .gradings import AlignedBasis
from .quiver_core import CoefficientForest, CoefficientTree, InstanceError, Quiver


@dataclass(frozen=True, order=False)
class FixedPoint:
    """An e-dimensional successor-closed subset of the coefficient forest."""

    selected: frozenset[str]

    def fibers(self, f: CoefficientForest, align: AlignedBasis) -> dict[str, tuple[int, ...]]:
        out = {}
        for v, bs in align.fiber_order.items():
            out[v] = tuple(n + 1 for n, b in enumerate(bs) if b in self.selected)
        return out

    def sort_key(self, f: CoefficientForest) -> tuple[int, ...]:
        return tuple(sorted(f.position[b] for b in self.selected))

    def label(self, f: CoefficientForest, align: AlignedBasis, vertex_order: Sequence[str]) -> str:
        fib = self.fibers(f, align)
        return " ".join(f"{v}:{{{','.join(map(str, fib.get(v, ())))}}}" for v in vertex_order)


def _component_up_sets(f: CoefficientForest, comp: CoefficientTree, vindex: Mapping[str, int]):
    """All successor-closed subsets of one tree with their dimension vectors."""
    verts = [b for b, _ in comp.vertices]
    # reverse topological order: successors before predecessors
    outdeg = {b: len(f.out_arrows[b]) for b in verts}
    order = []
    ready = [b for b in verts if outdeg[b] == 0]
    while ready:
        b = ready.pop()
        order.append(b)
        for a in f.in_arrows[b]:
            outdeg[a.source] -= 1
            if outdeg[a.source] == 0:
                ready.append(a.source)
    out = []
    k = len(vindex)

    def rec(pos, chosen, dims):
        if pos == len(order):
            out.append((frozenset(chosen), tuple(dims)))
            return
        b = order[pos]
        rec(pos + 1, chosen, dims)
        if all(a.target in chosen for a in f.out_arrows[b]):
            chosen.add(b)
            dims[vindex[f.over[b]]] += 1
            rec(pos + 1, chosen, dims)
            dims[vindex[f.over[b]]] -= 1
            chosen.discard(b)

    rec(0, set(), [0] * k)
    return out


def enumerate_fixed_points(q: Quiver, f: CoefficientForest, e: Mapping[str, int]) -> list[FixedPoint]:
    """All e-dimensional successor-closed subquivers, in deterministic order.

    Up-sets are listed per component and combined by a sweep that prunes on
    the running dimension vector.
    """
    vindex = {v: n for n, v in enumerate(q.vertices)}
    target = tuple(e.get(v, 0) for v in q.vertices)
    if any(x < 0 for x in target):
        return []
    options = [_component_up_sets(f, comp, vindex) for comp in f.components]
    # remaining capacity per vertex from components after position j
    k = len(target)
    cap = [[0] * k for _ in range(len(options) + 1)]
    for j in range(len(options) - 1, -1, -1):
        best = [max((d[i] for _, d in options[j]), default=0) for i in range(k)]
        cap[j] = [cap[j + 1][i] + best[i] for i in range(k)]
    found = []

    def rec(j, chosen, dims):
        if j == len(options):
            if tuple(dims) == target:
                found.append(FixedPoint(frozenset().union(*chosen) if chosen else frozenset()))
            return
        for sub, d in options[j]:
            nd = [x + y for x, y in zip(dims, d)]
            if any(nd[i] > target[i] or nd[i] + cap[j + 1][i] < target[i] for i in range(k)):
                continue
            chosen.append(sub)
            rec(j + 1, chosen, nd)
            chosen.pop()

    rec(0, [], [0] * k)
    found.sort(key=lambda u: u.sort_key(f))
    return found


@dataclass(frozen=True)
class CellData:
    point: FixedPoint
    initial_params: frozenset[tuple[str, str]]  # (j not selected, k selected)

    @property
    def dimension(self) -> int:
        return len(self.initial_params)


def _follow(f: CoefficientForest, b: str, path: tuple[str, ...]) -> str | None:
    for aid in path:
        b = f.successor.get((b, aid))
        if b is None:
            return None
    return b


def initial_parameters(f: CoefficientForest, align: AlignedBasis, u: FixedPoint) -> CellData:
    """Initial parameters of the attracting cell of u.

    A pair (b_j, b_k) over one vertex with b_k selected, b_j not, j > k, is
    initial when no predecessor of b_k is selected and every non-selected
    descendant of b_j, reached along a path p of quiver arrows, is matched by
    a descendant of b_k along the same p.
    """
    s = u.selected
    params = set()
    for v, bs in align.fiber_order.items():
        for kpos, bk in enumerate(bs):
            if bk not in s:
                continue
            if any(a.source in s for a in f.in_arrows[bk]):
                continue
            for bj in bs[kpos + 1:]:
                if bj in s:
                    continue
                if all(
                    _follow(f, bk, path) is not None
                    for path, c in f.descendants(bj)
                    if c not in s
                ):
                    params.add((bj, bk))
    return CellData(u, frozenset(params))


def poincare_polynomial(q: Quiver, f: CoefficientForest, align: AlignedBasis, e: Mapping[str, int]) -> list[int]:
    """c_k = number of fixed points whose cell has dimension k."""
    dims = [initial_parameters(f, align, u).dimension for u in enumerate_fixed_points(q, f, e)]
    if not dims:
        return []
    coeffs = [0] * (max(dims) + 1)
    for d in dims:
        coeffs[d] += 1
    return coeffs


def evaluate_polynomial(coeffs: Sequence[int], x: int) -> int:
    return sum(c * x**k for k, c in enumerate(coeffs))


def euler_characteristic(q: Quiver, f: CoefficientForest, e: Mapping[str, int]) -> int:
    return len(enumerate_fixed_points(q, f, e))


# -- flag varieties ------------------------------------------------------------


def _type_a_path(q: Quiver) -> list[str]:
    if not q.vertices:
        raise InstanceError("empty quiver")
    targets = {a.target for a in q.arrows}
    starts = [v for v in q.vertices if v not in targets]
    if len(starts) != 1 or len(q.arrows) != len(q.vertices) - 1:
        raise InstanceError("quiver is not an equioriented type A quiver")
    out = {a.source: a.target for a in q.arrows}
    path = [starts[0]]
    while path[-1] in out:
        path.append(out[path[-1]])
    if len(path) != len(q.vertices):
        raise InstanceError("quiver is not an equioriented type A quiver")
    return path


def permutation_of_fixed_point(
    q: Quiver, f: CoefficientForest, align: AlignedBasis, u: FixedPoint, e: Mapping[str, int] | None = None
) -> tuple[int, ...]:
    """One-line permutation of a fixed point of a complete flag instance.

    The strings are stacked by height, height 1 being the largest fiber index;
    letter i is the height of the string whose selected part starts over the
    i-th vertex (i = n for strings with nothing selected).
    """
    path = _type_a_path(q)
    n = len(path) + 1
    if len(f.components) != n or any(len(c.vertices) != n - 1 for c in f.components):
        raise InstanceError("not a complete flag instance: need n full strings over A_(n-1)")
    if e is not None and [e[v] for v in path] != list(range(1, n)):
        raise InstanceError("not a complete flag instance: e must be (1, ..., n-1)")
    first = path[0]
    height = {}
    for b in align.fiber_order[first]:
        height[f.component_of[b]] = n + 1 - align.index(b)
    letters = [0] * n
    for j, comp in enumerate(f.components):
        chosen = [f.over[b] for b, _ in comp.vertices if b in u.selected]
        start = min((path.index(v) for v in chosen), default=n - 1)
        if letters[start]:
            raise InstanceError("fixed point does not match the flag shape")
        letters[start] = height[j]
    return tuple(letters)


def inversions(w: Sequence[int]) -> int:
    return sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])
