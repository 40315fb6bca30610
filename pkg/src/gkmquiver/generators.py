"""Seeded random straight instances for property testing and benchmarks."""
from __future__ import annotations

import numpy as np

from .quiver_core import Arrow, CoefficientForest, CoefficientTree, ForestArrow, Instance, Quiver


def random_straight_instance(
    rng: np.random.Generator,
    *,
    max_basis: int = 12,
    n_vertices: tuple[int, int] = (2, 4),
    n_arrows: tuple[int, int] = (1, 4),
    n_strings: tuple[int, int] = (2, 4),
    max_length: int = 3,
    acyclic: bool = False,
) -> Instance:
    """A random direct sum of equioriented strings with a nonempty Grassmannian.

    Strings are random walks in a random quiver; e is the dimension vector of
    a random successor-closed subset, so at least one fixed point exists.
    Loops and oriented cycles are allowed unless ``acyclic`` is set, in which
    case every arrow points from a smaller to a larger vertex.
    """
    k = int(rng.integers(n_vertices[0], n_vertices[1] + 1))
    verts = tuple(str(t) for t in range(1, k + 1))
    arrows = []
    for n in range(int(rng.integers(n_arrows[0], n_arrows[1] + 1))):
        if acyclic:
            s, t = sorted(rng.choice(k, size=2, replace=False))
        else:
            s, t = rng.integers(0, k, size=2)
        arrows.append(Arrow(f"a{n + 1}", verts[s], verts[t]))
    q = Quiver(verts, tuple(arrows))
    outgoing = {v: [a for a in arrows if a.source == v] for v in verts}

    comps = []
    budget = max_basis
    for j in range(int(rng.integers(n_strings[0], n_strings[1] + 1))):
        if budget <= 0:
            break
        v = verts[int(rng.integers(0, k))]
        length = int(rng.integers(0, min(max_length, budget - 1) + 1))
        walk = [v]
        labels = []
        for _ in range(length):
            if not outgoing[walk[-1]]:
                break
            a = outgoing[walk[-1]][int(rng.integers(0, len(outgoing[walk[-1]])))]
            labels.append(a.id)
            walk.append(a.target)
        ids = [f"s{j + 1}_{t}" for t in range(len(walk))]
        comps.append(
            CoefficientTree(
                tuple(zip(ids, walk)),
                tuple(ForestArrow(ids[t], ids[t + 1], labels[t]) for t in range(len(labels))),
            )
        )
        budget -= len(walk)
    f = CoefficientForest(tuple(comps))

    # e from a random union of string suffixes
    e = {v: 0 for v in verts}
    for comp in comps:
        cut = int(rng.integers(0, len(comp.vertices) + 1))
        for _, v in comp.vertices[cut:]:
            e[v] += 1
    return Instance(q, f, e)
