"""The per-instance property checks shared by the acceptance and property tests."""
from gkmquiver.cohomology import InfeasibleSystem, kt_basis, verify_gkm_section
from gkmquiver.fixed_cells import enumerate_fixed_points, initial_parameters, poincare_polynomial
from gkmquiver.gradings import (
    ConstructibleGrading,
    InternalInvariantError,
    check_alignment,
    expand_cocharacter,
    expand_grading,
    is_constructible,
    pairing,
)
from gkmquiver.moment_graph import hall_strata, tangent_dimension
from gkmquiver.oracles import brute_force_fixed_points


def property_failures(inst, align, chi, g):
    q, f, e = inst.quiver, inst.forest, inst.e
    bad = []
    cells = [initial_parameters(f, align, u) for u in g.vertices]
    for x, c in enumerate(cells):
        if not g.out_degree(x) == len(c.initial_params) == c.dimension:
            bad.append(f"out-degree {g.out_degree(x)} vs cell dimension {c.dimension} at u{x}")
    coeffs = poincare_polynomial(q, f, align, e)
    if len(g.edges) != sum(k * c for k, c in enumerate(coeffs)):
        bad.append("edge count differs from P'(1)")
    if enumerate_fixed_points(q, f, e) != brute_force_fixed_points(q, f, e):
        bad.append("fixed points differ from brute force")
    if any(pairing(chi, ed.character) <= 0 for ed in g.edges):
        bad.append("non-positive pairing on an edge")
    try:
        classes = kt_basis(g).classes
    except (InfeasibleSystem, InternalInvariantError) as exc:
        bad.append(f"KT basis: {type(exc).__name__}: {exc} (SA1 conflicts: {len(align.sa1_conflicts)})")
        classes = []
    for cls in classes:
        if not verify_gkm_section(g, cls.components).ok:
            bad.append(f"KT class of u{cls.base} fails the congruences")
    for stratum in hall_strata(q, f, e):
        if len({tangent_dimension(f, align, u) for u in stratum}) > 1:
            bad.append("tangent dimension varies on a Hall stratum")
    rep = check_alignment(q, f, align, chi)
    if rep.ag1 or rep.ag2:
        bad.append(f"AG1/AG2 violated: {rep.ag1} {rep.ag2}")
    wt = expand_cocharacter(chi, f)
    cons = is_constructible(wt, f)
    if not cons.ok:
        bad.append("expanded grading is not constructible")
    elif expand_grading(ConstructibleGrading(cons.edge_weights, chi.gamma), f) != wt:
        bad.append("is_constructible does not round-trip expand_grading")
    return bad
