"""Constructible gradings, cocharacters and aligned bases."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .quiver_core import CoefficientForest, Quiver, is_straight


class GradingError(ValueError):
    pass


class AlignmentInfeasible(GradingError):
    """Raised in strict mode when no fiber order satisfies every (SA1) condition."""

    def __init__(self, conflicts):
        self.conflicts = tuple(conflicts)
        a, killed, mapped = self.conflicts[0]
        super().__init__(
            f"(SA1) unsatisfiable over arrow {a!r}: {killed!r} is killed but sits below {mapped!r}"
        )


class InternalInvariantError(RuntimeError):
    """A constructed object failed its own verification.  Always a bug."""


def support_arrows(q: Quiver, f: CoefficientForest) -> tuple[str, ...]:
    """Arrows of Q carrying at least one coefficient arrow, declaration order."""
    used = {a.over for a in f.arrows}
    return tuple(a.id for a in q.arrows if a.id in used)


@dataclass(frozen=True)
class Character:
    """Integer vector in the basis eps_1..eps_d, delta_1..delta_c."""

    eps: tuple[int, ...]
    delta: tuple[int, ...]

    def __add__(self, other: "Character") -> "Character":
        return Character(
            tuple(x + y for x, y in zip(self.eps, other.eps)),
            tuple(x + y for x, y in zip(self.delta, other.delta)),
        )

    def __neg__(self) -> "Character":
        return Character(tuple(-x for x in self.eps), tuple(-x for x in self.delta))

    def __sub__(self, other: "Character") -> "Character":
        return self + (-other)

    def is_zero(self) -> bool:
        return not any(self.eps) and not any(self.delta)

    @property
    def vector(self) -> tuple[int, ...]:
        return self.eps + self.delta

    def render(self, arrow_ids: Sequence[str]) -> str:
        # positive eps terms first, then negative ones, then delta terms
        parts = [_term(x, f"e{n + 1}") for n, x in enumerate(self.eps) if x > 0]
        parts += [_term(x, f"e{n + 1}") for n, x in enumerate(self.eps) if x < 0]
        for a, x in zip(arrow_ids, self.delta):
            if x:
                parts.append(_term(x, f"d[{a}]"))
        return " ".join(parts) if parts else "0"


def _term(x: int, name: str) -> str:
    sign = "+" if x > 0 else "-"
    mag = abs(x)
    return f"{sign}{name}" if mag == 1 else f"{sign}{mag}{name}"


@dataclass(frozen=True)
class Cocharacter:
    gamma: tuple[int, ...]
    nu: tuple[int, ...]
    arrow_ids: tuple[str, ...]

    def weight_of_arrow(self, aid: str) -> int:
        return self.nu[self.arrow_ids.index(aid)]


def pairing(chi: Cocharacter, char: Character) -> int:
    if len(chi.gamma) != len(char.eps) or len(chi.nu) != len(char.delta):
        raise ValueError("cocharacter and character live on tori of different rank")
    return sum(g * x for g, x in zip(chi.gamma, char.eps)) + sum(n * x for n, x in zip(chi.nu, char.delta))


@dataclass(frozen=True)
class ConstructibleGrading:
    edge_weights: Mapping[str, int]
    initial_weights: tuple[int, ...]


def _path_coefficients(f: CoefficientForest, b: str) -> dict[str, int]:
    coef: dict[str, int] = {}
    for step in f.path_from_source(b):
        if step.startswith("-"):
            coef[step[1:]] = coef.get(step[1:], 0) - 1
        else:
            coef[step] = coef.get(step, 0) + 1
    return coef


def expand_grading(g: ConstructibleGrading, f: CoefficientForest) -> dict[str, int]:
    if len(g.initial_weights) != len(f.components):
        raise GradingError("one initial weight per component required")
    out = {}
    for b in f.basis:
        w = g.initial_weights[f.component_of[b]]
        for aid, n in _path_coefficients(f, b).items():
            w += n * g.edge_weights[aid]
        out[b] = w
    return out


def expand_cocharacter(chi: Cocharacter, f: CoefficientForest) -> dict[str, int]:
    return expand_grading(
        ConstructibleGrading(dict(zip(chi.arrow_ids, chi.nu)), chi.gamma), f
    )


@dataclass
class ConstructibilityResult:
    ok: bool
    edge_weights: dict[str, int] = field(default_factory=dict)
    violations: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def is_constructible(wt: Mapping[str, int], f: CoefficientForest) -> ConstructibilityResult:
    diffs: dict[str, set[int]] = {}
    for a in f.arrows:
        diffs.setdefault(a.over, set()).add(wt[a.target] - wt[a.source])
    res = ConstructibilityResult(True)
    for aid, ds in diffs.items():
        if len(ds) == 1:
            res.edge_weights[aid] = next(iter(ds))
        else:
            res.ok = False
            res.violations[aid] = tuple(sorted(ds))
    return res


def distinct_weight_cocharacter(q: Quiver, f: CoefficientForest) -> Cocharacter:
    """Unit edge weights, components shifted apart by the longest string length."""
    if not is_straight(f):
        raise GradingError("distinct-weight cocharacter requires a straight forest")
    arrows = support_arrows(q, f)
    ell = max((len(c.vertices) for c in f.components), default=0)
    return Cocharacter(tuple(j * ell for j in range(len(f.components))), (1,) * len(arrows), arrows)


# -- aligned bases -------------------------------------------------------------


@dataclass(frozen=True)
class AlignedBasis:
    fiber_order: Mapping[str, tuple[str, ...]]
    segment_of: Mapping[str, int]
    arrow_index: Mapping[str, int]
    sa1_conflicts: tuple[tuple[str, str, str], ...] = ()
    realized_ideal_order: bool = True

    def index(self, b: str, over: str | None = None) -> int:
        """1-based position of b in the order of its fiber."""
        return self._index[b]

    @property
    def _index(self) -> dict[str, int]:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {b: n + 1 for bs in self.fiber_order.values() for n, b in enumerate(bs)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    @property
    def arrow_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.arrow_index, key=self.arrow_index.get))


def _future_key(f: CoefficientForest, b: str, arrow_rank: Sequence[str], memo: dict):
    # one slot per arrow: (0, key of the image) beats (1,) = "killed"
    if b in memo:
        return memo[b]
    slots = []
    for aid in arrow_rank:
        t = f.successor.get((b, aid))
        slots.append((0, _future_key(f, t, arrow_rank, memo)) if t is not None else (1,))
    memo[b] = tuple(slots)
    return memo[b]


def ideal_fiber_order(
    q: Quiver, f: CoefficientForest, vertex_order: Sequence[str] | None = None
) -> dict[str, tuple[str, ...]]:
    """Target order: vectors killed by an arrow above vectors it maps, then
    order propagated backwards along arrows, ties by past length, then by the
    vertex order of the component start, then declaration order of components."""
    vorder = {v: n for n, v in enumerate(vertex_order or q.vertices)}
    arrows = support_arrows(q, f)
    arrow_rank = sorted(arrows, key=lambda a: (vorder[q.arrow(a).target], arrows.index(a)))
    memo: dict = {}
    keys = {}
    for b in f.basis:
        j = f.component_of[b]
        keys[b] = (
            _future_key(f, b, arrow_rank, memo),
            len(f.path_from_source(b)),
            vorder[f.over[f.sources[j]]],
            j,
        )
    return {v: tuple(sorted(bs, key=keys.__getitem__)) for v, bs in f.fibers.items()}


def _realize_order(f, arrows, order) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Integer (gamma, nu) making every fiber order strictly weight-increasing."""
    from scipy.optimize import Bounds, LinearConstraint, milp

    d, c = len(f.components), len(arrows)
    n = d + c
    if n == 0:
        return (), ()
    aidx = {a: k for k, a in enumerate(arrows)}

    def row(b):
        r = np.zeros(n)
        r[f.component_of[b]] = 1
        for aid, m in _path_coefficients(f, b).items():
            r[d + aidx[aid]] += m
        return r

    rows = []
    for bs in order.values():
        for lo, hi in zip(bs, bs[1:]):
            rows.append(row(hi) - row(lo))
    big = 10**6
    cost = np.ones(n)
    attempts = [(0, big), (-big, big)]
    for nu_lo, nu_hi in attempts:
        lb = np.concatenate([np.zeros(d), np.full(c, nu_lo)])
        ub = np.concatenate([np.full(d, big), np.full(c, nu_hi)])
        cons = [LinearConstraint(np.array(rows), lb=1, ub=np.inf)] if rows else []
        obj = cost if nu_lo == 0 else np.concatenate([np.ones(d), np.zeros(c)])
        res = milp(obj, constraints=cons, integrality=np.ones(n), bounds=Bounds(lb, ub))
        if res.status == 0:
            x = np.rint(res.x).astype(np.int64)
            return tuple(int(v) for v in x[:d]), tuple(int(v) for v in x[d:])
    return None


def sa1_conflicts(q: Quiver, f: CoefficientForest, order: Mapping[str, Sequence[str]]):
    """(arrow, killed, mapped) triples where a killed vector sits below a mapped one."""
    out = []
    for a in q.arrows:
        bs = order.get(a.source, ())
        for lo_pos, lo in enumerate(bs):
            if (lo, a.id) in f.successor:
                continue
            for hi in bs[lo_pos + 1:]:
                if (hi, a.id) in f.successor:
                    out.append((a.id, lo, hi))
    return tuple(out)


@dataclass
class AlignmentReport:
    ag1: list = field(default_factory=list)
    ag2: list = field(default_factory=list)
    sa2: list = field(default_factory=list)
    sa1: tuple = ()

    @property
    def ok(self) -> bool:
        # SA1 is reported, not enforced
        return not (self.ag1 or self.ag2 or self.sa2)


def check_alignment(q: Quiver, f: CoefficientForest, align: AlignedBasis, chi: Cocharacter) -> AlignmentReport:
    rep = AlignmentReport()
    wt = expand_cocharacter(chi, f)
    for v, bs in align.fiber_order.items():
        for lo, hi in zip(bs, bs[1:]):
            if not wt[hi] > wt[lo]:
                rep.ag1.append((v, lo, hi))
    cons = is_constructible(wt, f)
    if not cons.ok:
        rep.ag2.extend(cons.violations.items())
    for aid, w in cons.edge_weights.items():
        if w != chi.weight_of_arrow(aid):
            rep.ag2.append((aid, w))
    for a in q.arrows:
        pairs = [(align.index(x), align.index(y)) for (x, lab), y in f.successor.items() if lab == a.id]
        for k, kk in pairs:
            for l, ll in pairs:
                if l > k and not ll > kk:
                    rep.sa2.append((a.id, k, l))
    rep.sa1 = sa1_conflicts(q, f, align.fiber_order)
    return rep


def attractive_aligned(
    q: Quiver,
    f: CoefficientForest,
    vertex_order: Sequence[str] | None = None,
    *,
    strict: bool = False,
    allow_trees: bool = False,
) -> tuple[AlignedBasis, Cocharacter]:
    """Aligned fiber orders together with a compatible attractive cocharacter.

    The fiber order is first fixed combinatorially and then realised by an
    integer feasibility problem for (gamma, nu).  When no constructible grading
    realises it, components are separated by large initial weights and the
    fibers are ordered by the resulting weights instead.
    """
    if not allow_trees and not is_straight(f):
        raise GradingError("attractive alignment requires a straight forest")
    arrows = support_arrows(q, f)
    order = ideal_fiber_order(q, f, vertex_order)
    realized = _realize_order(f, arrows, order)
    if realized is not None:
        chi = Cocharacter(realized[0], realized[1], arrows)
        ideal = True
    else:
        total = len(f.basis) + 1
        chi = Cocharacter(tuple(j * total for j in range(len(f.components))), (1,) * len(arrows), arrows)
        wt = expand_cocharacter(chi, f)
        order = {v: tuple(sorted(bs, key=wt.__getitem__)) for v, bs in f.fibers.items()}
        ideal = False
    align = AlignedBasis(
        order,
        dict(f.component_of),
        {a: n for n, a in enumerate(arrows)},
        sa1_conflicts(q, f, order),
        ideal,
    )
    rep = check_alignment(q, f, align, chi)
    if not rep.ok:
        raise InternalInvariantError(f"constructed grading fails verification: {rep}")
    if strict and align.sa1_conflicts:
        raise AlignmentInfeasible(align.sa1_conflicts)
    return align, chi


def grading_alignment(q: Quiver, f: CoefficientForest, chi: Cocharacter) -> AlignedBasis:
    """Fiber orders read off from a user-supplied cocharacter (must separate every fiber)."""
    wt = expand_cocharacter(chi, f)
    order = {}
    for v, bs in f.fibers.items():
        srt = tuple(sorted(bs, key=wt.__getitem__))
        for lo, hi in zip(srt, srt[1:]):
            if wt[lo] == wt[hi]:
                raise GradingError(f"weights of {lo!r} and {hi!r} over {v!r} coincide")
        order[v] = srt
    return AlignedBasis(
        order,
        dict(f.component_of),
        {a: n for n, a in enumerate(chi.arrow_ids)},
        sa1_conflicts(q, f, order),
        False,
    )
