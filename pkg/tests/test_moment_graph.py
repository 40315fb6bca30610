import pytest

from conftest import prepared
from gkmquiver.fixed_cells import enumerate_fixed_points, initial_parameters
from gkmquiver.gradings import pairing
from gkmquiver.moment_graph import (
    InvalidMutation,
    apply_mutation,
    enumerate_mutations,
    hall_strata,
    inverse_mutation,
    is_palais_smale,
    mutation_from_triple,
    partial_order,
    tangent_dimension,
)
from gkmquiver.quiver_core import InstanceError


def test_a2_graph():
    inst, align, chi, g = prepared("a2_p1")
    assert len(g.vertices) == 2 and len(g.edges) == 1
    e = g.edges[0]
    assert (e.source, e.target) == (0, 1)
    assert e.character.render(chi.arrow_ids) == "+e2 -e1"
    assert pairing(chi, e.character) > 0


def test_mutation_round_trip_fl4():
    inst, align, chi, g = prepared("fl_4")
    for u in g.vertices:
        for m in enumerate_mutations(inst.forest, align, u):
            t = apply_mutation(m)
            back = inverse_mutation(m)
            assert back.base == t
            assert apply_mutation(back) == u
            assert back.fundamental != m.fundamental


def test_mutation_from_triple():
    inst, align, _, g = prepared("a2_p1")
    low = g.vertices[0]
    m = mutation_from_triple(inst.forest, align, low, "1", 1, 2)
    assert m.fundamental and m.target == g.vertices[1]
    with pytest.raises((InvalidMutation, InstanceError)):
        mutation_from_triple(inst.forest, align, low, "1", 2, 1)


def test_out_degree_is_cell_dimension_fl4():
    inst, align, _, g = prepared("fl_4")
    for n, u in enumerate(g.vertices):
        assert g.out_degree(n) == initial_parameters(inst.forest, align, u).dimension
        assert tangent_dimension(inst.forest, align, u) == 6


def test_partial_order_is_reflexive_and_antisymmetric():
    _, _, _, g = prepared("fl_4")
    r = partial_order(g)
    assert r.diagonal().all()
    assert not (r & r.T & ~__import__("numpy").eye(len(g.vertices), dtype=bool)).any()


def test_topological_order_puts_targets_first():
    _, _, _, g = prepared("fl_4")
    pos = {x: n for n, x in enumerate(g.topological_order())}
    assert all(pos[e.target] < pos[e.source] for e in g.edges)


def test_palais_smale():
    for name in ("fl_3", "fl_4", "a2_p1", "x3124"):
        assert is_palais_smale(prepared(name)[3])


def test_fl4_is_one_hall_stratum():
    inst = prepared("fl_4")[0]
    strata = hall_strata(inst.quiver, inst.forest, inst.e)
    assert [len(s) for s in strata] == [24]


def test_a2_hall_strata():
    inst = prepared("a2_p1")[0]
    assert [len(s) for s in hall_strata(inst.quiver, inst.forest, inst.e)] == [2]


def test_tree_graph_is_flagged_experimental():
    inst, align, _, g = prepared("x3124")
    assert g.experimental
    assert g.unmatched == []
    assert len(g.vertices) == len(enumerate_fixed_points(inst.quiver, inst.forest, inst.e)) == 4
