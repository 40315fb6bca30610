"""Generators for the named example instances."""
from __future__ import annotations

import re

from .quiver_core import (
    Arrow,
    CoefficientForest,
    CoefficientTree,
    ForestArrow,
    Instance,
    InstanceError,
    Quiver,
)


def _string(prefix: str, verts: list[str], arrows: list[str], *, by_position: bool = False) -> CoefficientTree:
    ids = [f"{prefix}_{t + 1 if by_position else v}" for t, v in enumerate(verts)]
    return CoefficientTree(
        tuple(zip(ids, verts)),
        tuple(ForestArrow(ids[t], ids[t + 1], a) for t, a in enumerate(arrows)),
    )


def fl_n(n: int) -> Instance:
    """Complete flags in C^n: n full strings over 1 -> 2 -> ... -> n-1, e = (1, ..., n-1).

    String ``s{h}`` is the one drawn at height h; strings are listed from the
    top (height n) down, so that equal weights order fibers by height.
    """
    if n < 2:
        raise InstanceError("fl_n needs n >= 2")
    verts = [str(t) for t in range(1, n)]
    arrows = [f"a{t}" for t in range(1, n - 1)]
    q = Quiver(tuple(verts), tuple(Arrow(f"a{t}", str(t), str(t + 1)) for t in range(1, n - 1)))
    f = CoefficientForest(tuple(_string(f"s{h}", verts, arrows) for h in range(n, 0, -1)))
    return Instance(q, f, {v: int(v) for v in verts})


def x3124() -> Instance:
    """Schubert variety X_(3124) as a quiver Grassmannian of an enhanced A_3 quiver."""
    q = Quiver(("1", "2", "3", "4"), (Arrow("a", "1", "2"), Arrow("b", "2", "3"), Arrow("c", "2", "4")))

    def enhanced(prefix):
        ids = {v: f"{prefix}_{v}" for v in ("1", "2", "3", "4")}
        return CoefficientTree(
            tuple((ids[v], v) for v in ("1", "2", "3", "4")),
            (
                ForestArrow(ids["1"], ids["2"], "a"),
                ForestArrow(ids["2"], ids["3"], "b"),
                ForestArrow(ids["2"], ids["4"], "c"),
            ),
        )

    f = CoefficientForest((enhanced("t1"), enhanced("t2"), _string("s", ["1", "2", "3"], ["a", "b"])))
    return Instance(q, f, {"1": 1, "2": 2, "3": 3, "4": 1})


def branched_tree() -> Instance:
    """Two enhanced trees over 1 -> 2, 2 -> 3, 2 -> 4 plus three simple summands.

    No vertex is inflexible and no arrow acts as an identity, so the branched
    components survive every reduction.
    """
    q = Quiver(("1", "2", "3", "4"), (Arrow("a", "1", "2"), Arrow("b", "2", "3"), Arrow("c", "2", "4")))
    trees = []
    for p in ("t1", "t2"):
        ids = {v: f"{p}_{v}" for v in ("1", "2", "3", "4")}
        trees.append(
            CoefficientTree(
                tuple((ids[v], v) for v in ("1", "2", "3", "4")),
                (
                    ForestArrow(ids["1"], ids["2"], "a"),
                    ForestArrow(ids["2"], ids["3"], "b"),
                    ForestArrow(ids["2"], ids["4"], "c"),
                ),
            )
        )
    singles = [CoefficientTree(((b, v),), ()) for b, v in (("w2", "2"), ("z3", "3"), ("z4", "4"))]
    return Instance(q, CoefficientForest(tuple(trees + singles)), {"1": 1, "2": 2, "3": 2, "4": 2})


def a2_p1() -> Instance:
    """Two copies of C -> C over 1 -> 2 with e = (1, 1): a projective line."""
    q = Quiver(("1", "2"), (Arrow("a", "1", "2"),))
    f = CoefficientForest(tuple(_string(p, ["1", "2"], ["a"]) for p in ("x", "y")))
    return Instance(q, f, {"1": 1, "2": 1})


def no_gkm_sink() -> Instance:
    """C^3 -> C^3 <- C^3 with identity maps and e = (1, 2, 1)."""
    q = Quiver(("1", "2", "3"), (Arrow("a", "1", "2"), Arrow("b", "3", "2")))
    comps = []
    for k in (1, 2, 3):
        ids = (f"x{k}", f"y{k}", f"z{k}")
        comps.append(
            CoefficientTree(
                ((ids[0], "1"), (ids[1], "2"), (ids[2], "3")),
                (ForestArrow(ids[0], ids[1], "a"), ForestArrow(ids[2], ids[1], "b")),
            )
        )
    return Instance(q, CoefficientForest(tuple(comps)), {"1": 1, "2": 2, "3": 1})


def no_gkm_source() -> Instance:
    """C^3 <- C^3 -> C^3 with identity maps and e = (2, 1, 2)."""
    q = Quiver(("1", "2", "3"), (Arrow("a", "2", "1"), Arrow("b", "2", "3")))
    comps = []
    for k in (1, 2, 3):
        ids = (f"x{k}", f"y{k}", f"z{k}")
        comps.append(
            CoefficientTree(
                ((ids[0], "1"), (ids[1], "2"), (ids[2], "3")),
                (ForestArrow(ids[1], ids[0], "a"), ForestArrow(ids[1], ids[2], "b")),
            )
        )
    return Instance(q, CoefficientForest(tuple(comps)), {"1": 2, "2": 1, "3": 2})


def point() -> Instance:
    """The A_2 instance with e = 0: a single point."""
    inst = a2_p1()
    return Instance(inst.quiver, inst.forest, {"1": 0, "2": 0})


def parallel_strings() -> Instance:
    """Three strings C -> C over three parallel arrows 1 -> 2, e = (1, 2).

    No fiber order at vertex 1 puts the vectors killed by every arrow above
    the ones it maps.  The Grassmannian is a triangle of projective lines
    with a line attached at each corner and has 6q points over F_q.
    """
    q = Quiver(("1", "2"), tuple(Arrow(a, "1", "2") for a in ("a", "b", "c")))
    f = CoefficientForest(tuple(_string(p, ["1", "2"], [a]) for p, a in (("x", "a"), ("y", "b"), ("z", "c"))))
    return Instance(q, f, {"1": 1, "2": 2})


def nilpotent_loop() -> Instance:
    """Nilpotent operator of Jordan type (4, 3, 2) on a one-loop quiver, e = 3.

    Maps from the tail of a string into its own head give tangent vectors
    that are not mutations, so mutation counts undercount Hom(U, M/U).
    """
    q = Quiver(("1",), (Arrow("n", "1", "1"),))
    f = CoefficientForest(tuple(_string(p, ["1"] * size, ["n"] * (size - 1), by_position=True) for p, size in (("x", 4), ("y", 3), ("z", 2))))
    return Instance(q, f, {"1": 3})


FIXTURES = {
    "x3124": x3124,
    "a2_p1": a2_p1,
    "branched_tree": branched_tree,
    "no_gkm_sink": no_gkm_sink,
    "no_gkm_source": no_gkm_source,
    "nilpotent_loop": nilpotent_loop,
    "parallel_strings": parallel_strings,
    "point": point,
}


def fixture_names() -> list[str]:
    return ["fl_<n>"] + sorted(FIXTURES)


def get_fixture(name: str) -> Instance:
    m = re.fullmatch(r"fl_?(\d+)", name)
    if m:
        return fl_n(int(m.group(1)))
    try:
        return FIXTURES[name]()
    except KeyError:
        raise InstanceError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}") from None
