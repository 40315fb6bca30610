import numpy as np
import pytest

from conftest import N_RANDOM, random_instances
from gkmquiver.fixed_cells import enumerate_fixed_points
from gkmquiver.fixtures import get_fixture
from gkmquiver.oracles import BudgetExceeded, count_points_fq
from gkmquiver.quiver_core import (
    Arrow,
    CoefficientForest,
    CoefficientTree,
    ForestArrow,
    Quiver,
    iso_type,
)
from gkmquiver.reduction import (
    GKM_STRAIGHT,
    NO_GKM,
    POINT_OR_EMPTY,
    UNKNOWN_TREE,
    InfeasibleDimension,
    classify_gkm,
    collapse_identity_arrows,
    flexible_reduce,
    is_flexible,
    normalize,
)


def inflexible_example():
    q = Quiver(("1", "2"), (Arrow("a", "1", "2"),))
    f = CoefficientForest(
        (
            CoefficientTree((("x1", "1"), ("x2", "2")), (ForestArrow("x1", "x2", "a"),)),
            CoefficientTree((("z2", "2"),), ()),
            CoefficientTree((("w2", "2"),), ()),
        )
    )
    return q, f, {"1": 1, "2": 2}


def test_inflexible_vertex_reduces_to_projective_line():
    q, f, e = inflexible_example()
    assert is_flexible(q, f, e) == {"1": False, "2": True}
    red = flexible_reduce(q, f, e)
    inst = red.instance
    assert inst.quiver.vertices == ("2",)
    assert sorted(inst.forest.basis) == ["w2", "z2"]
    assert inst.e == {"2": 1}
    assert [s.kind for s in red.trace] == ["inflexible"]
    assert red.trace[0].detail["selected"] == ("x1", "x2")
    assert len(enumerate_fixed_points(inst.quiver, inst.forest, inst.e)) == 2


def test_excluded_vectors_are_deleted():
    q, f, _ = inflexible_example()
    red = flexible_reduce(q, f, {"1": 0, "2": 1})
    # x1 never selected, so it is dropped; x2 stays free
    assert "x1" not in red.instance.forest.basis
    assert sorted(red.instance.forest.basis) == ["w2", "x2", "z2"]


def test_out_of_range_dimension():
    q, f, _ = inflexible_example()
    with pytest.raises(InfeasibleDimension):
        flexible_reduce(q, f, {"1": 2, "2": 0})


def test_identity_collapse_relabels_arrows():
    q = Quiver(("1", "2", "3"), (Arrow("a", "1", "2"), Arrow("b", "2", "3")))
    f = CoefficientForest(
        (
            CoefficientTree((("x1", "1"), ("x2", "2"), ("x3", "3")), (ForestArrow("x1", "x2", "a"), ForestArrow("x2", "x3", "b"))),
            CoefficientTree((("y1", "1"), ("y2", "2")), (ForestArrow("y1", "y2", "a"),)),
        )
    )
    red = collapse_identity_arrows(q, f, {"1": 1, "2": 1, "3": 1})
    inst = red.instance
    assert inst.quiver.vertices == ("1", "3")
    assert [a.id for a in inst.quiver.arrows] == ["b.a"]
    assert sorted(inst.forest.basis) == ["x1", "x3", "y1"]
    assert len(enumerate_fixed_points(inst.quiver, inst.forest, inst.e)) == len(
        enumerate_fixed_points(q, f, {"1": 1, "2": 1, "3": 1})
    )


def test_no_collapse_when_dimensions_differ():
    q = Quiver(("1", "2"), (Arrow("a", "1", "2"),))
    f = get_fixture("a2_p1").forest
    assert collapse_identity_arrows(q, f, {"1": 1, "2": 2}).trace == []


def _signature(inst):
    pts = enumerate_fixed_points(inst.quiver, inst.forest, inst.e)
    return len(pts), iso_type(inst.forest), tuple(sorted(inst.e.values()))


def test_flexible_reduction_is_confluent():
    rng = np.random.default_rng(7)
    tried = 0
    for inst in random_instances()[: N_RANDOM // 2]:
        base = flexible_reduce(inst.quiver, inst.forest, inst.e)
        if len(base.trace) < 2:
            continue
        for _ in range(3):
            order = list(inst.quiver.vertices)
            rng.shuffle(order)
            other = flexible_reduce(inst.quiver, inst.forest, inst.e, order=order)
            assert _signature(other.instance) == _signature(base.instance)
            assert set(other.instance.quiver.vertices) == set(base.instance.quiver.vertices)
        tried += 1
    assert tried >= 5


def test_reductions_preserve_fixed_point_count():
    for inst in random_instances()[: N_RANDOM // 2]:
        n = len(enumerate_fixed_points(inst.quiver, inst.forest, inst.e))
        red = normalize(inst.quiver, inst.forest, inst.e)
        r = red.instance
        assert len(enumerate_fixed_points(r.quiver, r.forest, r.e)) == n


def test_reductions_preserve_fq_counts():
    checked = 0
    for inst in random_instances()[:60]:
        red = normalize(inst.quiver, inst.forest, inst.e)
        if not red.trace:
            continue
        r = red.instance
        try:
            before = count_points_fq(inst.quiver, inst.forest, inst.e, 2, budget=10**5).count
        except BudgetExceeded:
            continue
        assert count_points_fq(r.quiver, r.forest, r.e, 2).count == before
        checked += 1
    assert checked >= 5


@pytest.mark.parametrize(
    "name,tag",
    [
        ("fl_4", GKM_STRAIGHT),
        ("a2_p1", GKM_STRAIGHT),
        ("x3124", GKM_STRAIGHT),
        ("branched_tree", UNKNOWN_TREE),
        ("no_gkm_sink", NO_GKM),
        ("no_gkm_source", NO_GKM),
        ("point", POINT_OR_EMPTY),
    ],
)
def test_classify_fixtures(name, tag):
    inst = get_fixture(name)
    v = classify_gkm(inst.quiver, inst.forest, inst.e, inst.vertex_order)
    assert v.tag == tag
    assert (v.witness is not None) == (tag == NO_GKM)


def test_witness_shapes():
    sink = get_fixture("no_gkm_sink")
    w = classify_gkm(sink.quiver, sink.forest, sink.e).witness
    assert w["kind"] == "two-sink" and len(w["arms"]) == 2
    assert w["center"].startswith("y")
    src = get_fixture("no_gkm_source")
    w = classify_gkm(src.quiver, src.forest, src.e).witness
    assert w["kind"] == "two-source" and w["center"].startswith("y")


def test_x3124_reduces_through_inflexible_vertex():
    inst = get_fixture("x3124")
    v = classify_gkm(inst.quiver, inst.forest, inst.e, inst.vertex_order)
    assert "3" not in v.reduced.quiver.vertices
    assert any(s.kind == "inflexible" and s.vertex == "3" for s in v.trace)
