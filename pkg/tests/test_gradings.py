import pytest

from gkmquiver.fixtures import a2_p1, fl_n, x3124
from gkmquiver.gradings import (
    Character,
    Cocharacter,
    ConstructibleGrading,
    GradingError,
    attractive_aligned,
    check_alignment,
    distinct_weight_cocharacter,
    expand_cocharacter,
    expand_grading,
    grading_alignment,
    ideal_fiber_order,
    is_constructible,
    pairing,
    sa1_conflicts,
)


def test_character_render():
    ch = Character((-1, 1), (2,))
    assert ch.render(["a"]) == "+e2 -e1 +2d[a]"
    assert Character((0, 0), ()).is_zero()
    assert (ch - ch).is_zero()


def test_pairing():
    chi = Cocharacter((0, 10), (1,), ("a",))
    assert pairing(chi, Character((-1, 1), (0,))) == 10
    assert pairing(chi, Character((0, 0), (-2,))) == -2


def test_expand_and_constructible_round_trip():
    f = fl_n(4).forest
    g = ConstructibleGrading({"a1": 3, "a2": -1}, (0, 7, 2, 9))
    wt = expand_grading(g, f)
    res = is_constructible(wt, f)
    assert res.ok
    assert res.edge_weights == {"a1": 3, "a2": -1}
    wt[f.basis[1]] += 1
    assert not is_constructible(wt, f).ok


def test_expand_grading_needs_one_weight_per_component():
    f = a2_p1().forest
    with pytest.raises(GradingError):
        expand_grading(ConstructibleGrading({}, (0,)), f)


def test_ideal_order_a2():
    inst = a2_p1()
    order = ideal_fiber_order(inst.quiver, inst.forest)
    assert order["1"] == ("x_1", "y_1")


def test_attractive_aligned_fl4_passes_checks():
    inst = fl_n(4)
    align, chi = attractive_aligned(inst.quiver, inst.forest, inst.vertex_order)
    rep = check_alignment(inst.quiver, inst.forest, align, chi)
    assert rep.ok and not rep.sa1
    assert align.realized_ideal_order
    wt = expand_cocharacter(chi, inst.forest)
    for bs in align.fiber_order.values():
        assert all(wt[a] < wt[b] for a, b in zip(bs, bs[1:]))


def test_killed_vectors_sit_above_mapped_ones():
    inst = fl_n(4)
    align, _ = attractive_aligned(inst.quiver, inst.forest)
    f = inst.forest
    for a in inst.quiver.arrows:
        bs = align.fiber_order[a.source]
        mapped = [(b, a.id) in f.successor for b in bs]
        assert mapped == sorted(mapped, reverse=True)
    assert sa1_conflicts(inst.quiver, f, align.fiber_order) == ()


def test_trees_need_permission():
    inst = x3124()
    with pytest.raises(GradingError):
        attractive_aligned(inst.quiver, inst.forest)
    align, chi = attractive_aligned(inst.quiver, inst.forest, allow_trees=True)
    assert check_alignment(inst.quiver, inst.forest, align, chi).ok


def test_distinct_weight_cocharacter_is_injective_on_fibers():
    inst = fl_n(4)
    chi = distinct_weight_cocharacter(inst.quiver, inst.forest)
    wt = expand_cocharacter(chi, inst.forest)
    for bs in inst.forest.fibers.values():
        assert len({wt[b] for b in bs}) == len(bs)
    with pytest.raises(GradingError):
        distinct_weight_cocharacter(x3124().quiver, x3124().forest)


def test_grading_alignment_rejects_ties():
    inst = a2_p1()
    with pytest.raises(GradingError):
        grading_alignment(inst.quiver, inst.forest, Cocharacter((0, 0), (1,), ("a",)))
    align = grading_alignment(inst.quiver, inst.forest, Cocharacter((5, 0), (1,), ("a",)))
    assert align.fiber_order["1"] == ("y_1", "x_1")


def test_check_alignment_flags_bad_grading():
    inst = a2_p1()
    align, _ = attractive_aligned(inst.quiver, inst.forest)
    rep = check_alignment(inst.quiver, inst.forest, align, Cocharacter((5, 0), (1,), ("a",)))
    assert rep.ag1 and not rep.ok
