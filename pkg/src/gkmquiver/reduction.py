"""Normal forms (flexible reduction, identity collapsing) and GKM classification."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .fixed_cells import enumerate_fixed_points
from .quiver_core import (
    Arrow,
    CoefficientForest,
    ForestArrow,
    Instance,
    InstanceError,
    Quiver,
    forest_from_pieces,
    is_straight,
    is_string,
    restrict_forest,
)

GKM_STRAIGHT = "GKM_STRAIGHT"
NO_GKM = "NO_GKM"
POINT_OR_EMPTY = "POINT_OR_EMPTY"
UNKNOWN_TREE = "UNKNOWN_TREE"


class InfeasibleDimension(InstanceError):
    pass


@dataclass(frozen=True)
class ReductionStep:
    kind: str  # "inflexible" or "identity"
    vertex: str  # the vertex removed
    detail: Mapping[str, object]


@dataclass
class Reduction:
    instance: Instance
    trace: list[ReductionStep] = field(default_factory=list)


def _check_dimensions(q: Quiver, f: CoefficientForest, e: Mapping[str, int]) -> None:
    m = {v: len(f.fibers.get(v, ())) for v in q.vertices}
    bad = [v for v in q.vertices if not 0 <= e.get(v, 0) <= m[v]]
    if bad:
        raise InfeasibleDimension(
            "dimension vector out of range at " + ", ".join(f"{v} (e={e.get(v, 0)}, m={m[v]})" for v in bad)
        )


def projections(q: Quiver, f: CoefficientForest, e: Mapping[str, int]) -> dict[str, set[frozenset[str]]]:
    """Per vertex, the distinct coordinate subspaces met by fixed points."""
    out = {v: set() for v in q.vertices}
    fibers = f.fibers
    for u in enumerate_fixed_points(q, f, e):
        for v in q.vertices:
            out[v].add(frozenset(b for b in fibers.get(v, ()) if b in u.selected))
    return out


def is_flexible(q: Quiver, f: CoefficientForest, e: Mapping[str, int]) -> dict[str, bool]:
    """Vertex i is flexible iff the projection of the Grassmannian to Gr(e_i, m_i) is not a point.

    The image is a closed torus-stable subvariety, so it is positive
    dimensional exactly when fixed points project to at least two coordinate
    subspaces.
    """
    _check_dimensions(q, f, e)
    return {v: len(ps) >= 2 for v, ps in projections(q, f, e).items()}


def _drop_vertices(q: Quiver, gone: set[str]) -> Quiver:
    return Quiver(
        tuple(v for v in q.vertices if v not in gone),
        tuple(a for a in q.arrows if a.source not in gone and a.target not in gone),
    )


def _reduce_at(inst: Instance, v: str, forced: frozenset[str]) -> tuple[Instance, ReductionStep]:
    q, f, e = inst.quiver, inst.forest, inst.e
    excluded = set(f.fibers.get(v, ())) - forced
    removed_below = f.predecessor_closure(excluded)
    removed_above = f.successor_closure(forced)
    if removed_below & removed_above:
        raise InstanceError("forced and excluded vectors overlap")
    dims = f.dimension_of(removed_above)
    new_e = {w: e[w] - dims.get(w, 0) for w in q.vertices if w != v}
    if any(x < 0 for x in new_e.values()):
        raise InstanceError("dimension bookkeeping underflow during reduction")
    keep = [b for b in f.basis if b not in removed_below and b not in removed_above]
    nf = restrict_forest(f, keep)
    nq = _drop_vertices(q, {v})
    order = tuple(w for w in inst.vertex_order if w != v)
    step = ReductionStep(
        "inflexible",
        v,
        {"selected": tuple(sorted(removed_above)), "excluded": tuple(sorted(removed_below))},
    )
    return Instance(nq, nf, new_e, order), step


def flexible_reduce(q: Quiver, f: CoefficientForest, e: Mapping[str, int], *, order: Sequence[str] | None = None, vertex_order=()) -> Reduction:
    """Remove inflexible vertices one at a time until every vertex is flexible.

    At an inflexible vertex every subrepresentation has the same coordinate
    subspace K there; the subrepresentation generated by K is quotiented out,
    and the vectors mapping into the excluded part are deleted.  ``order``
    picks which inflexible vertex goes first (default: declaration order).
    An empty Grassmannian is returned unchanged.
    """
    _check_dimensions(q, f, e)
    inst = Instance(q, f, dict(e), tuple(vertex_order))
    trace = []
    while True:
        proj = projections(inst.quiver, inst.forest, inst.e)
        if any(not ps for ps in proj.values()):
            break  # no fixed points at all
        rank = {v: n for n, v in enumerate(order or inst.quiver.vertices)}
        stuck = sorted((v for v, ps in proj.items() if len(ps) == 1), key=lambda v: rank.get(v, len(rank)))
        if not stuck:
            break
        v = stuck[0]
        inst, step = _reduce_at(inst, v, next(iter(proj[v])))
        trace.append(step)
    return Reduction(inst, trace)


def _identity_arrow(q: Quiver, f: CoefficientForest, e: Mapping[str, int], a: Arrow) -> bool:
    if a.source == a.target or e.get(a.source, 0) != e.get(a.target, 0):
        return False
    src, tgt = f.fibers.get(a.source, ()), f.fibers.get(a.target, ())
    if len(src) != len(tgt):
        return False
    return all((b, a.id) in f.successor for b in src) and all(
        any(x.over == a.id for x in f.in_arrows[b]) for b in tgt
    )


def _fresh(name: str, taken: set[str]) -> str:
    out, n = name, 2
    while out in taken:
        out = f"{name}#{n}"
        n += 1
    taken.add(out)
    return out


def _collapse(inst: Instance, a: Arrow) -> tuple[Instance, ReductionStep]:
    """Contract the bijection M_a: vertex a.target is identified with a.source."""
    q, f, e = inst.quiver, inst.forest, inst.e
    i, j = a.source, a.target
    pre = {f.successor[(b, a.id)]: b for b in f.fibers.get(i, ())}  # vector over j -> its a-preimage

    def image(b):
        return pre.get(b, b)

    taken = {x.id for x in q.arrows if x.id != a.id}
    relabel = {}
    new_arrows = []
    for x in q.arrows:
        if x.id == a.id:
            continue
        if j not in (x.source, x.target):
            new_arrows.append(x)
            continue
        name = x.id
        if x.source == j:
            name = f"{name}.{a.id}"
        if x.target == j:
            name = f"{a.id}^-1.{name}"
        taken.discard(x.id)
        name = _fresh(name, taken)
        relabel[x.id] = name
        new_arrows.append(Arrow(name, i if x.source == j else x.source, i if x.target == j else x.target))
    nq = Quiver(tuple(v for v in q.vertices if v != j), tuple(new_arrows))
    verts = [(b, f.over[b]) for b in f.basis if f.over[b] != j]
    arrows = [
        ForestArrow(image(x.source), image(x.target), relabel.get(x.over, x.over))
        for x in f.arrows
        if x.over != a.id
    ]
    nf = forest_from_pieces(verts, arrows)
    ne = {v: e[v] for v in nq.vertices}
    order = tuple(v for v in inst.vertex_order if v != j)
    step = ReductionStep("identity", j, {"arrow": a.id, "into": i, "relabel": dict(sorted(relabel.items()))})
    return Instance(nq, nf, ne, order), step


def collapse_identity_arrows(
    q: Quiver, f: CoefficientForest, e: Mapping[str, int], *, order: Sequence[str] | None = None, vertex_order=()
) -> Reduction:
    """Collapse arrows acting bijectively between full fibers of equal target dimension."""
    inst = Instance(q, f, dict(e), tuple(vertex_order))
    trace = []
    while True:
        rank = {x: n for n, x in enumerate(order or ())}
        cands = [x for x in inst.quiver.arrows if _identity_arrow(inst.quiver, inst.forest, inst.e, x)]
        if not cands:
            break
        cands.sort(key=lambda x: rank.get(x.id, len(rank)))
        inst, step = _collapse(inst, cands[0])
        trace.append(step)
    return Reduction(inst, trace)


@dataclass
class GkmVerdict:
    tag: str
    witness: dict | None
    reduced: Instance
    trace: list[ReductionStep]


def normalize(q: Quiver, f: CoefficientForest, e: Mapping[str, int], vertex_order=()) -> Reduction:
    """Alternate both reductions until neither applies."""
    inst = Instance(q, f, dict(e), tuple(vertex_order))
    trace: list[ReductionStep] = []
    while True:
        r1 = flexible_reduce(inst.quiver, inst.forest, inst.e, vertex_order=inst.vertex_order)
        r2 = collapse_identity_arrows(r1.instance.quiver, r1.instance.forest, r1.instance.e, vertex_order=r1.instance.vertex_order)
        trace += r1.trace + r2.trace
        inst = r2.instance
        if not r1.trace and not r2.trace:
            return Reduction(inst, trace)


def _non_straight_witness(q: Quiver, f: CoefficientForest) -> dict:
    for comp in f.components:
        ids = {b for b, _ in comp.vertices}
        for b in sorted(ids, key=f.position.__getitem__):
            ins = f.in_arrows[b]
            outs = f.out_arrows[b]
            if len(ins) >= 2:
                x, y = ins[0], ins[1]
                return {
                    "kind": "two-sink",
                    "center": b,
                    "arms": [x.source, y.source],
                    "arrows": [x.over, y.over],
                    "shape": f"{x.source} -> {b} <- {y.source}",
                }
            if len(outs) >= 2:
                x, y = outs[0], outs[1]
                return {
                    "kind": "two-source",
                    "center": b,
                    "arms": [x.target, y.target],
                    "arrows": [x.over, y.over],
                    "shape": f"{x.target} <- {b} -> {y.target}",
                }
    raise InstanceError("forest is straight; no witness")


def classify_gkm(q: Quiver, f: CoefficientForest, e: Mapping[str, int], vertex_order=()) -> GkmVerdict:
    red = normalize(q, f, e, vertex_order)
    inst = red.instance
    rq, rf, re = inst.quiver, inst.forest, inst.e
    if len(enumerate_fixed_points(rq, rf, re)) <= 1:
        return GkmVerdict(POINT_OR_EMPTY, None, inst, red.trace)
    if not all(is_string(c) for c in rf.components):
        return GkmVerdict(UNKNOWN_TREE, None, inst, red.trace)
    if is_straight(rf):
        return GkmVerdict(GKM_STRAIGHT, None, inst, red.trace)
    return GkmVerdict(NO_GKM, _non_straight_witness(rq, rf), inst, red.trace)
