"""Quivers, coefficient forests and problem instances.

A tree (or forest) representation is stored through its coefficient quiver:
every basis vector is a vertex lying over a quiver vertex, every nonzero
matrix coefficient is an arrow lying over a quiver arrow.  All coefficients
are 1, so the forest determines the representation completely.
"""
from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping


class InstanceError(ValueError):
    """Malformed input document or invalid instance data."""


@dataclass(frozen=True)
class Arrow:
    id: str
    source: str
    target: str


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise InstanceError("duplicate vertex labels")
        ids = [a.id for a in self.arrows]
        if len(set(ids)) != len(ids):
            raise InstanceError("duplicate arrow ids")
        vs = set(self.vertices)
        for a in self.arrows:
            if a.source not in vs or a.target not in vs:
                raise InstanceError(f"arrow {a.id} has an undeclared endpoint")

    @cached_property
    def arrow_map(self) -> dict[str, Arrow]:
        return {a.id: a for a in self.arrows}

    def arrow(self, aid: str) -> Arrow:
        return self.arrow_map[aid]


@dataclass(frozen=True)
class ForestArrow:
    source: str
    target: str
    over: str


@dataclass(frozen=True)
class CoefficientTree:
    vertices: tuple[tuple[str, str], ...]  # (basis id, quiver vertex)
    arrows: tuple[ForestArrow, ...]


@dataclass(frozen=True)
class CoefficientForest:
    components: tuple[CoefficientTree, ...]

    # -- derived lookup tables -------------------------------------------------
    @cached_property
    def basis(self) -> tuple[str, ...]:
        """All basis ids in declaration order."""
        return tuple(b for comp in self.components for b, _ in comp.vertices)

    @cached_property
    def position(self) -> dict[str, int]:
        return {b: n for n, b in enumerate(self.basis)}

    @cached_property
    def over(self) -> dict[str, str]:
        return {b: v for comp in self.components for b, v in comp.vertices}

    @cached_property
    def component_of(self) -> dict[str, int]:
        return {b: j for j, comp in enumerate(self.components) for b, _ in comp.vertices}

    @cached_property
    def arrows(self) -> tuple[ForestArrow, ...]:
        return tuple(a for comp in self.components for a in comp.arrows)

    @cached_property
    def out_arrows(self) -> dict[str, tuple[ForestArrow, ...]]:
        out = defaultdict(list)
        for a in self.arrows:
            out[a.source].append(a)
        return {b: tuple(out[b]) for b in self.basis}

    @cached_property
    def in_arrows(self) -> dict[str, tuple[ForestArrow, ...]]:
        inc = defaultdict(list)
        for a in self.arrows:
            inc[a.target].append(a)
        return {b: tuple(inc[b]) for b in self.basis}

    @cached_property
    def successor(self) -> dict[tuple[str, str], str]:
        """(basis id, quiver arrow) -> the basis id it is sent to."""
        return {(a.source, a.over): a.target for a in self.arrows}

    @cached_property
    def fibers(self) -> dict[str, tuple[str, ...]]:
        """Quiver vertex -> basis ids over it, declaration order."""
        fib = defaultdict(list)
        for b in self.basis:
            fib[self.over[b]].append(b)
        return dict(fib)

    @cached_property
    def sources(self) -> tuple[str, ...]:
        """Distinguished start vector of each component (its first source)."""
        out = []
        for comp in self.components:
            targets = {a.target for a in comp.arrows}
            out.append(next(b for b, _ in comp.vertices if b not in targets))
        return tuple(out)

    def path_from_source(self, b: str) -> tuple[str, ...]:
        """Quiver arrows (with signs for inverse steps) from the component source to b.

        Forward steps are reported as the arrow id, backward steps as "-id".
        For equioriented strings every step is forward.
        """
        comp = self.components[self.component_of[b]]
        start = self.sources[self.component_of[b]]
        adj = defaultdict(list)
        for a in comp.arrows:
            adj[a.source].append((a.target, a.over))
            adj[a.target].append((a.source, "-" + a.over))
        prev: dict[str, tuple[str, str] | None] = {start: None}
        stack = [start]
        while stack:
            x = stack.pop()
            for y, lab in adj[x]:
                if y not in prev:
                    prev[y] = (x, lab)
                    stack.append(y)
        steps = []
        while prev[b] is not None:
            x, lab = prev[b]
            steps.append(lab)
            b = x
        return tuple(reversed(steps))

    def descendants(self, b: str) -> list[tuple[tuple[str, ...], str]]:
        """All (arrow path, basis id) pairs reachable from b by forward arrows, b excluded."""
        out = []
        stack = [((), b)]
        while stack:
            path, x = stack.pop()
            for a in self.out_arrows[x]:
                p = path + (a.over,)
                out.append((p, a.target))
                stack.append((p, a.target))
        return out

    def is_successor_closed(self, subset: Iterable[str]) -> bool:
        s = set(subset)
        return all(a.target in s for a in self.arrows if a.source in s)

    def successor_closure(self, subset: Iterable[str]) -> frozenset[str]:
        s = set(subset)
        stack = list(s)
        while stack:
            x = stack.pop()
            for a in self.out_arrows[x]:
                if a.target not in s:
                    s.add(a.target)
                    stack.append(a.target)
        return frozenset(s)

    def predecessor_closure(self, subset: Iterable[str]) -> frozenset[str]:
        s = set(subset)
        stack = list(s)
        while stack:
            x = stack.pop()
            for a in self.in_arrows[x]:
                if a.source not in s:
                    s.add(a.source)
                    stack.append(a.source)
        return frozenset(s)

    def dimension_of(self, subset: Iterable[str]) -> Counter:
        return Counter(self.over[b] for b in subset)


def forest_from_pieces(vertices: Iterable[tuple[str, str]], arrows: Iterable[ForestArrow]) -> CoefficientForest:
    """Split an arbitrary vertex/arrow set into its connected components.

    Component order follows the first appearance of a vertex in ``vertices``.
    """
    vertices = list(vertices)
    arrows = list(arrows)
    parent = {b: b for b, _ in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in arrows:
        ra, rb = find(a.source), find(a.target)
        if ra != rb:
            parent[rb] = ra
    groups: dict[str, list] = {}
    for b, v in vertices:
        groups.setdefault(find(b), []).append((b, v))
    garrows = defaultdict(list)
    for a in arrows:
        garrows[find(a.source)].append(a)
    comps = tuple(
        CoefficientTree(tuple(vs), tuple(garrows[root])) for root, vs in groups.items()
    )
    return CoefficientForest(comps)


@dataclass(frozen=True)
class Instance:
    """A quiver, a coefficient forest over it and a target dimension vector."""

    quiver: Quiver
    forest: CoefficientForest
    dimension_vector: Mapping[str, int]
    vertex_order: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.vertex_order:
            object.__setattr__(self, "vertex_order", self.quiver.vertices)
        object.__setattr__(self, "dimension_vector", dict(self.dimension_vector))

    @property
    def e(self) -> dict[str, int]:
        return self.dimension_vector


# -- validation ----------------------------------------------------------------


@dataclass
class ValidationReport:
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "pass" if self.ok else "\n".join(self.problems)


def validate_forest(q: Quiver, f: CoefficientForest) -> ValidationReport:
    rep = ValidationReport()
    seen = Counter(b for comp in f.components for b, _ in comp.vertices)
    for b, n in sorted(seen.items()):
        if n > 1:
            rep.problems.append(f"duplicate basis id {b!r}")
    qverts = set(q.vertices)
    for j, comp in enumerate(f.components):
        local = {b: v for b, v in comp.vertices}
        for b, v in comp.vertices:
            if v not in qverts:
                rep.problems.append(f"component {j}: basis {b!r} lies over unknown vertex {v!r}")
        for a in comp.arrows:
            if a.source not in local or a.target not in local:
                rep.problems.append(
                    f"component {j}: arrow {a.source}->{a.target} leaves the component"
                )
                continue
            if a.over not in q.arrow_map:
                rep.problems.append(f"component {j}: arrow {a.source}->{a.target} over unknown arrow {a.over!r}")
                continue
            qa = q.arrow(a.over)
            if local[a.source] != qa.source or local[a.target] != qa.target:
                rep.problems.append(
                    f"component {j}: arrow {a.source}->{a.target} incompatible with {a.over} ({qa.source}->{qa.target})"
                )
        # tree check: connected and |arrows| = |vertices| - 1
        if comp.vertices:
            adj = defaultdict(set)
            for a in comp.arrows:
                if a.source in local and a.target in local:
                    adj[a.source].add(a.target)
                    adj[a.target].add(a.source)
            start = comp.vertices[0][0]
            reached = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in reached:
                        reached.add(y)
                        stack.append(y)
            if len(reached) != len(local):
                rep.problems.append(f"component {j}: not connected")
            if len(comp.arrows) != len(local) - 1:
                rep.problems.append(f"component {j}: contains an undirected cycle")
        else:
            rep.problems.append(f"component {j}: empty component")
        # winding
        outs = Counter((a.source, a.over) for a in comp.arrows)
        ins = Counter((a.target, a.over) for a in comp.arrows)
        for (b, lab), n in sorted(outs.items()):
            if n > 1:
                rep.problems.append(f"winding violation: {b!r} has {n} outgoing arrows over {lab!r}")
        for (b, lab), n in sorted(ins.items()):
            if n > 1:
                rep.problems.append(f"winding violation: {b!r} has {n} incoming arrows over {lab!r}")
    return rep


def validate_instance(inst: Instance) -> ValidationReport:
    rep = validate_forest(inst.quiver, inst.forest)
    qv = set(inst.quiver.vertices)
    if set(inst.e) != qv:
        rep.problems.append("dimension_vector domain differs from the vertex set")
    for v, n in inst.e.items():
        if not isinstance(n, int) or n < 0:
            rep.problems.append(f"dimension_vector[{v!r}] must be a non-negative integer")
    if sorted(inst.vertex_order) != sorted(inst.quiver.vertices):
        rep.problems.append("vertex_order is not a permutation of the vertices")
    return rep


# -- basic invariants ----------------------------------------------------------


def push_down_dimensions(q: Quiver, f: CoefficientForest) -> dict[str, int]:
    counts = Counter(f.over.values())
    return {v: counts.get(v, 0) for v in q.vertices}


def is_string(comp: CoefficientTree) -> bool:
    """Underlying graph is a path (any orientation)."""
    deg = Counter()
    for a in comp.arrows:
        deg[a.source] += 1
        deg[a.target] += 1
    return all(n <= 2 for n in deg.values())


def is_straight_component(comp: CoefficientTree) -> bool:
    indeg = Counter(a.target for a in comp.arrows)
    outdeg = Counter(a.source for a in comp.arrows)
    return all(n <= 1 for n in indeg.values()) and all(n <= 1 for n in outdeg.values())


def is_straight(f: CoefficientForest) -> bool:
    # a tree with in/out degree <= 1 everywhere is a single directed chain
    return all(is_straight_component(c) for c in f.components)


def restrict_forest(f: CoefficientForest, subset: Iterable[str]) -> CoefficientForest:
    """Full subquiver on ``subset``, split into connected components."""
    s = set(subset)
    verts = [(b, f.over[b]) for b in f.basis if b in s]
    arrows = [a for a in f.arrows if a.source in s and a.target in s]
    return forest_from_pieces(verts, arrows)


def quotient_forest(f: CoefficientForest, u: Iterable[str]) -> CoefficientForest:
    """Coefficient forest of M/U for a coordinate subrepresentation U."""
    u = frozenset(u)
    if not f.is_successor_closed(u):
        raise InstanceError("subset is not successor-closed")
    return restrict_forest(f, [b for b in f.basis if b not in u])


# -- isomorphism types ---------------------------------------------------------


def _component_shape(comp: CoefficientTree):
    over = dict(comp.vertices)
    adj = defaultdict(list)
    for a in comp.arrows:
        adj[a.source].append((a.target, ">", a.over))
        adj[a.target].append((a.source, "<", a.over))

    def encode(x, parent):
        children = sorted(
            (d, lab, encode(y, x)) for y, d, lab in adj[x] if y != parent
        )
        return (over[x], tuple(children))

    # canonical form: minimum rooted encoding over all roots
    return min(encode(b, None) for b, _ in comp.vertices)


def iso_type(f: CoefficientForest) -> tuple:
    """Sorted multiset of canonical component shapes, as (shape, multiplicity) pairs."""
    counts = Counter(_component_shape(c) for c in f.components)
    return tuple(sorted(counts.items()))


# -- document format -----------------------------------------------------------


def instance_to_document(inst: Instance) -> dict:
    doc = {
        "quiver": {
            "vertices": list(inst.quiver.vertices),
            "arrows": [
                {"id": a.id, "source": a.source, "target": a.target} for a in inst.quiver.arrows
            ],
        },
        "forest": {
            "components": [
                {
                    "vertices": [{"id": b, "over": v} for b, v in comp.vertices],
                    "arrows": [
                        {"source": a.source, "target": a.target, "over": a.over} for a in comp.arrows
                    ],
                }
                for comp in inst.forest.components
            ]
        },
        "dimension_vector": {v: inst.e[v] for v in inst.quiver.vertices},
    }
    if tuple(inst.vertex_order) != tuple(inst.quiver.vertices):
        doc["vertex_order"] = list(inst.vertex_order)
    return doc


def _field(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise InstanceError(f"{where}: missing field {key!r}")
    return obj[key]


def instance_from_document(doc: dict) -> Instance:
    qd = _field(doc, "quiver", "document")
    verts = _field(qd, "vertices", "quiver")
    arrows = []
    for n, a in enumerate(_field(qd, "arrows", "quiver")):
        where = f"quiver.arrows[{n}]"
        arrows.append(
            Arrow(str(_field(a, "id", where)), str(_field(a, "source", where)), str(_field(a, "target", where)))
        )
    q = Quiver(tuple(str(v) for v in verts), tuple(arrows))
    comps = []
    for j, c in enumerate(_field(_field(doc, "forest", "document"), "components", "forest")):
        where = f"forest.components[{j}]"
        cv = []
        for n, v in enumerate(_field(c, "vertices", where)):
            w = f"{where}.vertices[{n}]"
            cv.append((str(_field(v, "id", w)), str(_field(v, "over", w))))
        ca = []
        for n, a in enumerate(c.get("arrows", [])):
            w = f"{where}.arrows[{n}]"
            ca.append(ForestArrow(str(_field(a, "source", w)), str(_field(a, "target", w)), str(_field(a, "over", w))))
        comps.append(CoefficientTree(tuple(cv), tuple(ca)))
    dv = _field(doc, "dimension_vector", "document")
    if not isinstance(dv, dict):
        raise InstanceError("dimension_vector: expected a map")
    inst = Instance(
        q,
        CoefficientForest(tuple(comps)),
        {str(k): v for k, v in dv.items()},
        tuple(str(v) for v in doc.get("vertex_order", ())),
    )
    return inst


def load_instance(path: str | Path) -> Instance:
    """Parse and validate an instance document (JSON)."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    inst = instance_from_document(doc)
    rep = validate_instance(inst)
    if not rep.ok:
        raise InstanceError(f"{path}: invalid instance\n{rep}")
    return inst


def dump_instance(inst: Instance) -> str:
    return json.dumps(instance_to_document(inst), indent=2) + "\n"
