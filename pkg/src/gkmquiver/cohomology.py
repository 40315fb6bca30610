"""Exact polynomials, GKM congruences and Knutson-Tao classes.

Polynomials live in Q[e_1..e_d, d_1..d_c]; no floating point is used.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from .gradings import Character, InternalInvariantError
from .moment_graph import MomentGraph, partial_order

Monomial = tuple[int, ...]


class InfeasibleSystem(RuntimeError):
    pass


class Poly:
    """Sparse polynomial with Fraction coefficients in a fixed number of variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Monomial, Fraction | int] | None = None):
        self.nvars = nvars
        self.terms: dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            if len(m) != nvars:
                raise ValueError("monomial length does not match the number of variables")
            if c:
                self.terms[tuple(m)] = Fraction(c)

    @classmethod
    def constant(cls, nvars: int, c=1) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def linear(cls, coeffs: Sequence[int | Fraction]) -> "Poly":
        n = len(coeffs)
        return cls(n, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs) if c})

    @classmethod
    def from_character(cls, ch: Character) -> "Poly":
        return cls.linear(ch.vector)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {sum(m) for m in self.terms}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        ds = self.degrees()
        if not ds:
            return True
        return len(ds) == 1 and (degree is None or ds == {degree})

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(self.nvars, out)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        return Poly(self.nvars, {m: c * x for m, x in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(self.nvars, out)

    def render(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (-sum(m), tuple(-x for x in m))):
            c = self.terms[m]
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, m) if k)
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __repr__(self):
        return f"Poly({self.render([f'x{n + 1}' for n in range(self.nvars)])})"

    def to_document(self) -> list:
        return [[list(m), str(c)] for m, c in sorted(self.terms.items())]

    @classmethod
    def from_document(cls, nvars: int, doc: Iterable) -> "Poly":
        return cls(nvars, {tuple(int(x) for x in m): Fraction(c) for m, c in doc})


def poly_add(p: Poly, q: Poly) -> Poly:
    return p + q


def poly_mul(p: Poly, q: Poly) -> Poly:
    return p * q


def _pivot_variable(alpha: Poly) -> tuple[int, Fraction]:
    if alpha.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if not alpha.is_homogeneous(1):
        raise ValueError("divisor must be a homogeneous linear form")
    v = max(m.index(1) for m in alpha.terms)
    return v, alpha.terms[tuple(int(i == v) for i in range(alpha.nvars))]


def linear_divide(p: Poly, alpha: Poly) -> Poly | None:
    """q with p = alpha * q, or None if alpha does not divide p."""
    v, lead = _pivot_variable(alpha)
    rest = {m: c for m, c in alpha.terms.items() if m[v] == 0}
    work = dict(p.terms)
    quot: dict[Monomial, Fraction] = {}
    while True:
        cands = [m for m in work if m[v] > 0]
        if not cands:
            break
        m = max(cands, key=lambda m: (m[v], m))
        c = work.pop(m) / lead
        qm = tuple(x - (i == v) for i, x in enumerate(m))
        quot[qm] = quot.get(qm, 0) + c
        for r, rc in rest.items():
            t = tuple(a + b for a, b in zip(qm, r))
            work[t] = work.get(t, 0) - c * rc
            if not work[t]:
                del work[t]
    if work:
        return None
    return Poly(p.nvars, quot)


def restrict_to_hyperplane(p: Poly, alpha: Poly) -> Poly:
    """p modulo alpha, written without alpha's pivot variable."""
    v, lead = _pivot_variable(alpha)
    sub = Poly(p.nvars, {m: -c / lead for m, c in alpha.terms.items() if m[v] == 0})
    powers = [Poly.constant(p.nvars)]
    out = Poly(p.nvars)
    for m, c in p.terms.items():
        k = m[v]
        while len(powers) <= k:
            powers.append(powers[-1] * sub)
        base = tuple(0 if i == v else x for i, x in enumerate(m))
        out = out + Poly(p.nvars, {base: c}) * powers[k]
    return out


# -- sections ------------------------------------------------------------------


def variable_names(d: int, arrow_ids: Sequence[str]) -> list[str]:
    return [f"e{n + 1}" for n in range(d)] + [f"d[{a}]" for a in arrow_ids]


@dataclass
class SectionCheck:
    ok: bool
    violations: list[int] = field(default_factory=list)  # edge indices

    def __bool__(self):
        return self.ok


def verify_gkm_section(g: MomentGraph, s: Mapping[int, Poly]) -> SectionCheck:
    """Check f_x - f_y divisible by the label on every edge x -> y.

    ``s`` maps vertex indices to polynomials; missing vertices count as zero.
    """
    nv = len(g.chi.gamma) + len(g.chi.nu)
    zero = Poly(nv)
    bad = []
    for n, e in enumerate(g.edges):
        diff = s.get(e.source, zero) - s.get(e.target, zero)
        if linear_divide(diff, Poly.from_character(e.character)) is None:
            bad.append(n)
    return SectionCheck(not bad, bad)


# -- Knutson-Tao classes -------------------------------------------------------


@dataclass
class KTClass:
    base: int
    degree: int
    components: dict[int, Poly]
    unique: bool
    nvars: int
    method: str = "greedy"

    def at(self, y: int) -> Poly:
        p = self.components.get(y)
        return p if p is not None else Poly(self.nvars)


def _proportional(a: Poly, b: Poly) -> bool:
    if set(a.terms) != set(b.terms):
        return False
    ratios = {b.terms[m] / a.terms[m] for m in a.terms}
    return len(ratios) == 1


def _crt_step(targets: list[tuple[Poly, Poly]], degree: int, nv: int) -> tuple[Poly, bool]:
    """Homogeneous p of the given degree with p = t mod alpha for each (alpha, t).

    Proportional labels are merged after a consistency check; the remaining
    pairwise independent labels are handled by Chinese remaindering, the free
    part (a multiple of their product) is set to zero.
    """
    classes: list[tuple[Poly, Poly]] = []
    for alpha, t in targets:
        for beta, t0 in classes:
            if _proportional(alpha, beta):
                if linear_divide(t - t0, beta) is None:
                    raise InfeasibleSystem("incompatible values along proportional labels")
                break
        else:
            classes.append((alpha, t))
    p = classes[0][1]
    prod = classes[0][0]
    for alpha, t in classes[1:]:
        h = restrict_to_hyperplane(t - p, alpha)
        for beta, _ in classes:
            if beta is alpha:
                break
            rb = restrict_to_hyperplane(beta, alpha)
            h = linear_divide(h, rb)
            if h is None:
                raise InfeasibleSystem("congruences have no common solution")
        p = p + prod * h
        prod = prod * alpha
    if not p.is_homogeneous(degree) and not p.is_zero():
        raise InfeasibleSystem("no homogeneous solution of the required degree")
    return p, len(classes) > degree


def _monomials(nv: int, degree: int, variables: Sequence[int]) -> list[Monomial]:
    out = []
    for combo in combinations_with_replacement(variables, degree):
        m = [0] * nv
        for i in combo:
            m[i] += 1
        out.append(tuple(m))
    # graded lex, largest first
    return sorted(set(out), reverse=True)


def _rref_solve(rows: list[dict[int, Fraction]], rhs: list[Fraction], ncols: int) -> tuple[list[Fraction], bool]:
    """Solve exactly; free variables are zero.  Returns (solution, unique)."""
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    pivots: list[tuple[int, int]] = []
    r = 0
    for col in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i].get(col)), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        rhs[r], rhs[pr] = rhs[pr], rhs[r]
        inv = 1 / rows[r][col]
        rows[r] = {k: v * inv for k, v in rows[r].items()}
        rhs[r] *= inv
        for i in range(len(rows)):
            if i != r and rows[i].get(col):
                fac = rows[i][col]
                for k, v in rows[r].items():
                    nvv = rows[i].get(k, 0) - fac * v
                    if nvv:
                        rows[i][k] = nvv
                    else:
                        rows[i].pop(k, None)
                rhs[i] -= fac * rhs[r]
        pivots.append((r, col))
        r += 1
    if any(rhs[i] != 0 for i in range(r, len(rows))):
        raise InfeasibleSystem("global congruence system is inconsistent")
    sol = [Fraction(0)] * ncols
    for i, col in pivots:
        sol[col] = rhs[i]
    return sol, len(pivots) == ncols


def _global_solve(g: MomentGraph, x: int, support: list[int], px: Poly, degree: int, nv: int) -> tuple[dict[int, Poly], bool]:
    """Solve all congruences at once in the variables occurring in edge labels."""
    used = sorted({i for e in g.edges for i, c in enumerate(e.character.vector) if c})
    monos = _monomials(nv, degree, used)
    unknown = [y for y in support if y != x]
    col = {(y, m): n for n, (y, m) in enumerate((y, m) for y in unknown for m in monos)}
    sup = set(support)
    rows, rhs = [], []
    for e in g.edges:
        if e.source not in sup or e.source == x:
            continue
        alpha = Poly.from_character(e.character)
        # (p_source - p_target) restricted to alpha = 0 must vanish
        expr: dict[Monomial, dict[int, Fraction]] = {}
        const: dict[Monomial, Fraction] = {}
        for m in monos:
            for mm, c in restrict_to_hyperplane(Poly(nv, {m: 1}), alpha).terms.items():
                expr.setdefault(mm, {})
                expr[mm][col[(e.source, m)]] = expr[mm].get(col[(e.source, m)], 0) + c
                if e.target in sup and e.target != x:
                    k = col[(e.target, m)]
                    expr[mm][k] = expr[mm].get(k, 0) - c
        if e.target == x:
            for mm, c in restrict_to_hyperplane(px, alpha).terms.items():
                const[mm] = const.get(mm, 0) + c
        for mm in sorted(set(expr) | set(const)):
            row = {k: v for k, v in expr.get(mm, {}).items() if v}
            rows.append(row)
            rhs.append(const.get(mm, Fraction(0)))
    sol, unique = _rref_solve(rows, rhs, len(col))
    comps = {x: px}
    for y in unknown:
        p = Poly(nv, {m: sol[col[(y, m)]] for m in monos})
        comps[y] = p
    return comps, unique


def kt_class(g: MomentGraph, x: int, *, order=None) -> KTClass:
    """Knutson-Tao class of vertex x, verified before it is returned.

    Vertices above x are visited in a linear extension of the partial order;
    each value is fixed by Chinese remaindering against the already known
    values at the ends of its outgoing edges.  If that greedy pass gets stuck
    the whole system is solved at once.
    """
    nv = len(g.chi.gamma) + len(g.chi.nu)
    reach = order if order is not None else partial_order(g)
    support = [y for y in g.topological_order() if reach[y, x]]
    px = Poly.constant(nv)
    for k in g.out_edges[x]:
        px = px * Poly.from_character(g.edges[k].character)
    degree = g.out_degree(x)
    comps: dict[int, Poly] = {x: px}
    unique = True
    method = "greedy"
    zero = Poly(nv)
    try:
        for y in support:
            if y == x:
                continue
            targets = [
                (Poly.from_character(g.edges[k].character), comps.get(g.edges[k].target, zero))
                for k in g.out_edges[y]
            ]
            comps[y], u = _crt_step(targets, degree, nv)
            unique &= u
    except InfeasibleSystem:
        comps, unique = _global_solve(g, x, support, px, degree, nv)
        method = "global"
    comps = {y: p for y, p in comps.items() if not p.is_zero()}
    cls = KTClass(x, degree, comps, unique, nv, method)
    problems = check_kt_class(g, cls, reach)
    if problems:
        raise InternalInvariantError(f"KT class of vertex {x} fails: {'; '.join(problems)}")
    return cls


def check_kt_class(g: MomentGraph, cls: KTClass, reach=None) -> list[str]:
    """Literal (KT1)-(KT3) and edge-congruence checks; returns the problems found."""
    reach = reach if reach is not None else partial_order(g)
    nv = len(g.chi.gamma) + len(g.chi.nu)
    x = cls.base
    problems = []
    px = Poly.constant(nv)
    for k in g.out_edges[x]:
        px = px * Poly.from_character(g.edges[k].character)
    if cls.components.get(x, Poly(nv)) != px:
        problems.append("KT1: value at the base is not the product of outgoing labels")
    if cls.degree != g.out_degree(x) or any(not p.is_homogeneous(cls.degree) for p in cls.components.values()):
        problems.append("KT2: components are not homogeneous of degree out-degree(x)")
    if any(not reach[y, x] for y in cls.components):
        problems.append("KT3: nonzero component outside {y >= x}")
    chk = verify_gkm_section(g, cls.components)
    if not chk.ok:
        problems.append(f"congruence fails on edges {chk.violations}")
    return problems


@dataclass
class KTBasis:
    classes: list[KTClass]
    unique: bool


def kt_basis(g: MomentGraph) -> KTBasis:
    reach = partial_order(g)
    classes = [kt_class(g, x, order=reach) for x in range(len(g.vertices))]
    for cls in classes:
        x = cls.base
        if cls.components.get(x) is None:
            raise InternalInvariantError(f"KT class of {x} vanishes at its base")
        if any(not reach[y, x] for y in cls.components):
            raise InternalInvariantError(f"KT class of {x} is not upper triangular")
    return KTBasis(classes, all(c.unique for c in classes))
