"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed."""
import itertools

from conftest import N_RANDOM, STRAIGHT_FIXTURES, criterion, prepared, random_prepared
from gkmquiver.cohomology import Poly, check_kt_class, kt_basis
from gkmquiver.fixed_cells import evaluate_polynomial, permutation_of_fixed_point, poincare_polynomial
from gkmquiver.fixtures import get_fixture
from gkmquiver.moment_graph import is_palais_smale, partial_order, tangent_dimension
from gkmquiver.oracles import bruhat_leq, bruhat_lower_interval, count_points_fq, hom_dim_triples
from gkmquiver.reduction import NO_GKM, classify_gkm
from properties import property_failures


def test_criterion_1_fl4_fixed_points_are_s4():
    with criterion(1, "Fl_4 has 24 fixed points in bijection with S_4"):
        inst, align, _, g = prepared("fl_4")
        assert len(g.vertices) == 24
        perms = [permutation_of_fixed_point(inst.quiver, inst.forest, align, u, inst.e) for u in g.vertices]
        assert sorted(perms) == sorted(itertools.permutations(range(1, 5)))


def test_criterion_2_fl4_poincare_and_point_counts():
    with criterion(2, "Fl_4 Poincare [1,3,5,6,5,3,1]; F_2 count 315, F_3 count 2080 = P(3)"):
        inst, align, _, _ = prepared("fl_4")
        coeffs = poincare_polynomial(inst.quiver, inst.forest, align, inst.e)
        assert coeffs == [1, 3, 5, 6, 5, 3, 1]
        assert count_points_fq(inst.quiver, inst.forest, inst.e, 2).count == 315
        n3 = count_points_fq(inst.quiver, inst.forest, inst.e, 3).count
        assert n3 == evaluate_polynomial(coeffs, 3) == 2080


def test_criterion_3_fl4_moment_graph():
    with criterion(3, "Fl_4: 72 edges, degree 6, tangent = hom triples = 6, order = Bruhat order"):
        inst, align, _, g = prepared("fl_4")
        assert len(g.edges) == 72
        assert all(g.degree(x) == 6 for x in range(24))
        for u in g.vertices:
            assert tangent_dimension(inst.forest, align, u) == 6
            assert hom_dim_triples(inst.forest, u) == 6
        w = [permutation_of_fixed_point(inst.quiver, inst.forest, align, u) for u in g.vertices]
        r = partial_order(g)
        for x in range(24):
            for y in range(24):
                assert r[x, y] == bruhat_leq(w[y], w[x]), (w[x], w[y])


def test_criterion_4_non_straight_witnesses():
    with criterion(4, "no_gkm_sink and no_gkm_source give NO_GKM with a two-sink / two-source witness"):
        for name, kind in (("no_gkm_sink", "two-sink"), ("no_gkm_source", "two-source")):
            inst = get_fixture(name)
            v = classify_gkm(inst.quiver, inst.forest, inst.e, inst.vertex_order)
            assert v.tag == NO_GKM
            assert v.witness["kind"] == kind
            assert len(v.witness["arms"]) == 2 and len(set(v.witness["arrows"])) == 2


def test_criterion_5_projective_line():
    with criterion(5, "A_2/P^1: 2 points, 1 edge e2-e1, P=[1,1], p+1 points, KT basis {(1,1),(alpha,0)}"):
        inst, align, chi, g = prepared("a2_p1")
        assert len(g.vertices) == 2 and len(g.edges) == 1
        edge = g.edges[0]
        assert edge.character.render(chi.arrow_ids) == "+e2 -e1"
        assert poincare_polynomial(inst.quiver, inst.forest, align, inst.e) == [1, 1]
        for p in (2, 3):
            assert count_points_fq(inst.quiver, inst.forest, inst.e, p).count == p + 1
        basis = kt_basis(g)
        nv = len(chi.gamma) + len(chi.nu)
        alpha = Poly.from_character(edge.character)
        one, zero = Poly.constant(nv), Poly(nv)
        top, bottom = edge.source, edge.target
        got = {c.base: (c.at(top), c.at(bottom)) for c in basis.classes}
        assert got == {bottom: (one, one), top: (alpha, zero)}
        assert basis.unique
        assert all(check_kt_class(g, c) == [] for c in basis.classes)


def test_criterion_6_x3124_tree_mode():
    with criterion(6, "X3124: 4 points, P=[1,2,1], 9 F_2-points, Palais-Smale, unique KT basis, |[e,3124]| points"):
        inst, align, _, g = prepared("x3124")
        assert g.experimental
        assert len(g.vertices) == 4
        assert poincare_polynomial(inst.quiver, inst.forest, align, inst.e) == [1, 2, 1]
        assert count_points_fq(inst.quiver, inst.forest, inst.e, 2).count == 9
        assert is_palais_smale(g)
        assert kt_basis(g).unique
        assert len(g.vertices) == len(bruhat_lower_interval((3, 1, 2, 4)))


def test_criterion_7_property_suite():
    with criterion(7, f"property suite over straight fixtures and {N_RANDOM} random straight instances"):
        failures = []
        cases = [(name, prepared(name)) for name in STRAIGHT_FIXTURES]
        cases += [(f"random[{k}]", random_prepared(k)) for k in range(N_RANDOM)]
        for name, (inst, align, chi, g) in cases:
            assert len(inst.forest.basis) <= 12 or not name.startswith("random")
            failures += [f"{name}: {msg}" for msg in property_failures(inst, align, chi, g)]
        assert not failures, "\n".join(failures[:20])
