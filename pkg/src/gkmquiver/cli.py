"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 NO_GKM verdict,
3 UNKNOWN_TREE verdict, 4 precondition failure, 5 internal invariant breach.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .cohomology import (
    InfeasibleSystem,
    KTClass,
    Poly,
    check_kt_class,
    kt_basis,
    variable_names,
)
from .fixed_cells import (
    enumerate_fixed_points,
    evaluate_polynomial,
    initial_parameters,
    permutation_of_fixed_point,
    poincare_polynomial,
)
from .fixtures import fixture_names, get_fixture
from .gradings import (
    Cocharacter,
    GradingError,
    InternalInvariantError,
    attractive_aligned,
    check_alignment,
    expand_cocharacter,
    grading_alignment,
    is_constructible,
    support_arrows,
)
from .moment_graph import (
    GenericityViolation,
    build_moment_graph,
    hall_strata,
    is_palais_smale,
    partial_order,
    tangent_dimension,
)
from .oracles import BudgetExceeded, OracleSizeError, brute_force_fixed_points, count_points_fq, hom_dim_triples
from .quiver_core import InstanceError, dump_instance, is_straight, load_instance, validate_instance
from .reduction import NO_GKM, UNKNOWN_TREE, InfeasibleDimension, classify_gkm

EXIT_OK, EXIT_USAGE, EXIT_NO_GKM, EXIT_UNKNOWN_TREE, EXIT_PRECONDITION, EXIT_INTERNAL = range(6)


class Precondition(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(spec: str):
    path = Path(spec)
    if path.exists():
        return load_instance(path)
    try:
        inst = get_fixture(spec)
    except InstanceError:
        raise InstanceError(f"{spec}: no such file, and not a fixture ({', '.join(fixture_names())})") from None
    rep = validate_instance(inst)
    if not rep.ok:
        raise InternalInvariantError(f"fixture {spec} is invalid:\n{rep}")
    return inst


def _prepared(inst, experimental: bool):
    tree_mode = not is_straight(inst.forest)
    if tree_mode and not experimental:
        raise Precondition("forest is not straight; rerun with --experimental for the tree-mode construction")
    align, chi = attractive_aligned(inst.quiver, inst.forest, inst.vertex_order, allow_trees=tree_mode)
    return align, chi, tree_mode


def _permutation(inst, align, u):
    try:
        return permutation_of_fixed_point(inst.quiver, inst.forest, align, u, inst.e)
    except InstanceError:
        return None


def _point_label(inst, align, u):
    w = _permutation(inst, align, u)
    if w is not None:
        return "".join(map(str, w))
    return u.label(inst.forest, align, inst.vertex_order)


def _header(out, tree_mode):
    if tree_mode:
        out.append("experimental: true")


# -- commands ------------------------------------------------------------------


def cmd_classify(args, out):
    inst = _load(args.instance)
    v = classify_gkm(inst.quiver, inst.forest, inst.e, inst.vertex_order)
    out.append(f"verdict: {v.tag}")
    if v.witness:
        out.append(f"witness: {v.witness['kind']} {v.witness['shape']} over arrows {', '.join(v.witness['arrows'])}")
    for step in v.trace:
        detail = ", ".join(f"{k}={_fmt(val)}" for k, val in step.detail.items())
        out.append(f"reduced: {step.kind} vertex {step.vertex} ({detail})")
    r = v.reduced
    out.append("reduced dimension vector: " + " ".join(f"{k}={r.e[k]}" for k in r.quiver.vertices))
    return {NO_GKM: EXIT_NO_GKM, UNKNOWN_TREE: EXIT_UNKNOWN_TREE}.get(v.tag, EXIT_OK)


def _fmt(val):
    if isinstance(val, (tuple, list)):
        return "[" + " ".join(map(str, val)) + "]"
    if isinstance(val, dict):
        return "{" + " ".join(f"{k}->{x}" for k, x in val.items()) + "}"
    return str(val)


def _user_cocharacter(inst, path):
    """Read a grading file: either {"gamma": [...], "nu": {arrow: w}} or {"weights": {basis: w}}."""
    doc = json.loads(Path(path).read_text())
    f = inst.forest
    arrows = support_arrows(inst.quiver, f)
    if "weights" in doc:
        wt = {str(k): int(v) for k, v in doc["weights"].items()}
        missing = [b for b in f.basis if b not in wt]
        if missing:
            raise InstanceError(f"{path}: weights missing for {', '.join(missing)}")
        cons = is_constructible(wt, f)
        if not cons.ok:
            raise Precondition(
                "grading is not constructible: "
                + "; ".join(f"arrow {a} has differences {list(d)}" for a, d in sorted(cons.violations.items()))
            )
        gamma = tuple(wt[b] for b in f.sources)
        nu = tuple(cons.edge_weights.get(a, 0) for a in arrows)
    else:
        gamma = tuple(int(x) for x in doc["gamma"])
        raw = doc.get("nu", [])
        if isinstance(raw, dict):
            nu = tuple(int(raw[a]) for a in arrows)
        else:
            nu = tuple(int(x) for x in raw)
        if len(nu) != len(arrows):
            raise InstanceError(f"{path}: nu needs one entry per arrow ({', '.join(arrows)})")
        if len(gamma) != len(f.components):
            raise InstanceError(f"{path}: gamma needs one entry per component")
    return Cocharacter(gamma, nu, arrows)


def cmd_grading(args, out):
    inst = _load(args.instance)
    if args.check:
        chi = _user_cocharacter(inst, args.check)
        align = grading_alignment(inst.quiver, inst.forest, chi)
    else:
        align, chi, tree_mode = _prepared(inst, args.experimental)
        _header(out, tree_mode)
    out.append("gamma: " + " ".join(map(str, chi.gamma)))
    out.append("nu: " + " ".join(f"{a}={x}" for a, x in zip(chi.arrow_ids, chi.nu)))
    for v in inst.vertex_order:
        out.append(f"fiber {v}: " + " ".join(align.fiber_order.get(v, ())))
    wt = expand_cocharacter(chi, inst.forest)
    out.append("weights: " + " ".join(f"{b}={wt[b]}" for b in inst.forest.basis))
    out.append("sa1 conflicts: " + (" ".join(f"{a}:{lo}<{hi}" for a, lo, hi in align.sa1_conflicts) or "none"))
    rep = check_alignment(inst.quiver, inst.forest, align, chi)
    out.append(f"AG1: {'ok' if not rep.ag1 else rep.ag1}")
    out.append(f"AG2: {'ok' if not rep.ag2 else rep.ag2}")
    out.append(f"SA2: {'ok' if not rep.sa2 else rep.sa2}")
    if not rep.ok:
        return EXIT_PRECONDITION if args.check else EXIT_INTERNAL
    return EXIT_OK


def cmd_fixed_points(args, out):
    inst = _load(args.instance)
    align, chi, tree_mode = _prepared(inst, args.experimental)
    _header(out, tree_mode)
    out.append("id\tdim\tpermutation\tfibers")
    for n, u in enumerate(enumerate_fixed_points(inst.quiver, inst.forest, inst.e)):
        w = _permutation(inst, align, u)
        dim = initial_parameters(inst.forest, align, u).dimension
        out.append(f"u{n}\t{dim}\t{''.join(map(str, w)) if w else '-'}\t{u.label(inst.forest, align, inst.vertex_order)}")
    return EXIT_OK


def cmd_poincare(args, out):
    inst = _load(args.instance)
    align, chi, tree_mode = _prepared(inst, args.experimental)
    _header(out, tree_mode)
    coeffs = poincare_polynomial(inst.quiver, inst.forest, align, inst.e)
    if args.at is not None:
        out.append(str(evaluate_polynomial(coeffs, args.at)))
    else:
        out.append(" ".join(map(str, coeffs)))
    return EXIT_OK


def _graph(args):
    inst = _load(args.instance)
    align, chi, tree_mode = _prepared(inst, args.experimental)
    g = build_moment_graph(inst.quiver, inst.forest, align, chi, inst.e, experimental=tree_mode)
    return inst, align, chi, g, tree_mode


def _graph_data(inst, align, chi, g):
    return {
        "experimental": g.experimental,
        "palais_smale": is_palais_smale(g),
        "vertices": [
            {"id": f"u{n}", "label": _point_label(inst, align, u), "out_degree": g.out_degree(n)}
            for n, u in enumerate(g.vertices)
        ],
        "edges": [
            {
                "source": f"u{e.source}",
                "target": f"u{e.target}",
                "vertex": e.mutation.vertex,
                "k": e.mutation.k,
                "l": e.mutation.ell,
                "character": e.character.render(chi.arrow_ids),
            }
            for e in g.edges
        ],
        "unmatched": [f"u{n}" for n in g.unmatched],
    }


def _dot(data) -> str:
    lines = ["digraph moment_graph {"]
    for v in data["vertices"]:
        lines.append(f'  {v["id"]} [label="{v["label"]}"];')
    for e in data["edges"]:
        lines.append(f'  {e["source"]} -> {e["target"]} [label="{e["character"]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_moment_graph(args, out):
    inst, align, chi, g, tree_mode = _graph(args)
    data = _graph_data(inst, align, chi, g)
    if args.dot:
        Path(args.dot).write_text(_dot(data))
    if args.data:
        Path(args.data).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    _header(out, tree_mode)
    out.append(f"vertices: {len(g.vertices)}")
    out.append(f"edges: {len(g.edges)}")
    out.append(f"palais-smale: {str(data['palais_smale']).lower()}")
    if not (args.dot or args.data):
        for e in data["edges"]:
            out.append(f"{e['source']} -> {e['target']}\t{e['character']}")
    return EXIT_OK


def _basis_document(inst, align, chi, g, basis):
    names = variable_names(len(chi.gamma), chi.arrow_ids)
    return {
        "variables": names,
        "vertices": [_point_label(inst, align, u) for u in g.vertices],
        "unique": basis.unique,
        "classes": [
            {
                "base": f"u{c.base}",
                "degree": c.degree,
                "unique": c.unique,
                "components": {
                    f"u{y}": {"text": p.render(names), "terms": p.to_document()}
                    for y, p in sorted(c.components.items())
                },
            }
            for c in basis.classes
        ],
    }


def cmd_kt_basis(args, out):
    inst, align, chi, g, tree_mode = _graph(args)
    _header(out, tree_mode)
    nv = len(chi.gamma) + len(chi.nu)
    if args.verify:
        doc = json.loads(Path(args.verify).read_text())
        labels = [_point_label(inst, align, u) for u in g.vertices]
        if doc.get("vertices") != labels:
            raise Precondition("stored basis was computed for a different fixed-point list")
        reach = partial_order(g)
        failures = 0
        for c in doc["classes"]:
            cls = KTClass(
                int(c["base"][1:]),
                int(c["degree"]),
                {int(k[1:]): Poly.from_document(nv, v["terms"]) for k, v in c["components"].items()},
                bool(c["unique"]),
                nv,
            )
            problems = check_kt_class(g, cls, reach)
            failures += bool(problems)
            out.append(f"{c['base']}: {'ok' if not problems else '; '.join(problems)}")
        out.append(f"verified: {len(doc['classes']) - failures}/{len(doc['classes'])}")
        if len(doc["classes"]) != len(g.vertices):
            raise Precondition("stored basis does not have one class per fixed point")
        return EXIT_PRECONDITION if failures else EXIT_OK
    try:
        basis = kt_basis(g)
    except InfeasibleSystem as exc:
        if not align.sa1_conflicts:
            raise
        raise Precondition(
            f"no KT class exists for this moment graph ({exc}); "
            f"the fiber orders violate SA1 at {len(align.sa1_conflicts)} place(s)"
        ) from None
    doc = _basis_document(inst, align, chi, g, basis)
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    out.append(f"classes: {len(basis.classes)}")
    out.append(f"unique: {str(basis.unique).lower()}")
    if not args.out:
        for c in doc["classes"]:
            for y, comp in c["components"].items():
                out.append(f"{c['base']}\t{y}\t{comp['text']}")
    return EXIT_OK


def cmd_tangent(args, out):
    inst = _load(args.instance)
    align, chi, tree_mode = _prepared(inst, args.experimental)
    _header(out, tree_mode)
    out.append("id\ttangent\tlabel")
    for n, u in enumerate(enumerate_fixed_points(inst.quiver, inst.forest, inst.e)):
        out.append(f"u{n}\t{tangent_dimension(inst.forest, align, u)}\t{_point_label(inst, align, u)}")
    return EXIT_OK


def cmd_hall_strata(args, out):
    inst = _load(args.instance)
    align, chi, tree_mode = _prepared(inst, args.experimental)
    _header(out, tree_mode)
    points = enumerate_fixed_points(inst.quiver, inst.forest, inst.e)
    index = {u: n for n, u in enumerate(points)}
    for k, stratum in enumerate(hall_strata(inst.quiver, inst.forest, inst.e)):
        dims = sorted({tangent_dimension(inst.forest, align, u) for u in stratum})
        ids = " ".join(f"u{index[u]}" for u in stratum)
        out.append(f"stratum {k}\ttangent {','.join(map(str, dims))}\t{ids}")
    return EXIT_OK


def cmd_oracle(args, out):
    inst = _load(args.instance)
    if args.which == "count-points":
        res = count_points_fq(inst.quiver, inst.forest, inst.e, args.p, budget=args.budget)
        out.append("p\tcount\tenumerated")
        out.append(f"{res.q}\t{res.count}\t{res.enumerated}")
    elif args.which == "hom-dim":
        out.append("id\thom\tfixed point")
        for n, u in enumerate(enumerate_fixed_points(inst.quiver, inst.forest, inst.e)):
            out.append(f"u{n}\t{hom_dim_triples(inst.forest, u)}\t{' '.join(sorted(u.selected))}")
    else:
        out.append("id\tfixed point")
        for n, u in enumerate(brute_force_fixed_points(inst.quiver, inst.forest, inst.e)):
            out.append(f"u{n}\t{' '.join(sorted(u.selected))}")
    return EXIT_OK


def cmd_fixture(args, out):
    inst = get_fixture(args.name)
    text = dump_instance(inst)
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.append(text.rstrip("\n"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gkmquiver", description="GKM structures on quiver Grassmannians of string and tree modules")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def instance_cmd(name, fn, help_text, experimental=True):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("instance", help="instance document (JSON) or fixture name")
        if experimental:
            sp.add_argument("--experimental", action="store_true", help="allow non-straight (tree) forests")
        sp.set_defaults(func=fn)
        return sp

    instance_cmd("classify", cmd_classify, "reduce and classify the GKM status", experimental=False)
    sp = instance_cmd("grading", cmd_grading, "attractive aligned grading")
    sp.add_argument("--check", metavar="FILE", help="verify a user grading (JSON: gamma/nu or weights) instead")
    instance_cmd("fixed-points", cmd_fixed_points, "list torus fixed points and cell dimensions")
    sp = instance_cmd("poincare", cmd_poincare, "Poincare polynomial coefficients")
    sp.add_argument("--at", type=int, help="evaluate at this integer")
    sp = instance_cmd("moment-graph", cmd_moment_graph, "character-labelled moment graph")
    sp.add_argument("--dot", help="write Graphviz DOT here")
    sp.add_argument("--data", help="write JSON data here")
    sp = instance_cmd("kt-basis", cmd_kt_basis, "Knutson-Tao basis")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--out", help="write the basis as JSON here")
    g.add_argument("--verify", help="re-check a stored basis")
    instance_cmd("tangent", cmd_tangent, "tangent space dimensions at fixed points")
    instance_cmd("hall-strata", cmd_hall_strata, "fixed points grouped by Hall stratum")

    sp = sub.add_parser("oracle", help="brute-force oracles")
    sp.add_argument("which", choices=["count-points", "hom-dim", "fixed-points"])
    sp.add_argument("instance", help="instance document (JSON) or fixture name")
    sp.add_argument("--p", type=int, default=2, help="prime for count-points")
    sp.add_argument("--budget", type=int, default=10**7, help="candidate tuple budget for count-points")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("fixture", help="emit a fixture instance document")
    sp.add_argument("name", help=", ".join(fixture_names()))
    sp.add_argument("--out", help="write to this path instead of stdout")
    sp.set_defaults(func=cmd_fixture)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors, --help, --version
        return int(exc.code or 0)
    out: list[str] = []
    code = EXIT_OK
    try:
        code = args.func(args, out)
    except (InternalInvariantError, GenericityViolation, InfeasibleSystem) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        code = EXIT_INTERNAL
    except (Precondition, GradingError, BudgetExceeded, OracleSizeError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        code = EXIT_PRECONDITION
    except InstanceError as exc:
        # dimension vectors out of range are a precondition, everything else a parse problem
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_PRECONDITION if isinstance(exc, InfeasibleDimension) else EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    if out:
        sys.stdout.write("\n".join(out) + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
