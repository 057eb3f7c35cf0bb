"""Entire convexes, paves and regular pavings of V^s, their secondary cones, and toric chart monoids."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product as iproduct
from math import ceil, factorial, floor, gcd
from typing import Iterable, Mapping, Sequence

import sympy
from sympy.solvers.simplex import InfeasibleLPError, linprog

from .combinatorics import as_size_vector, enumerate_Vs


class InvalidFamily(ValueError):
    pass


class TooLarge(ValueError):
    pass


class TooFewBlocks(ValueError):
    pass


# ---------------------------------------------------------------- exact linear algebra helpers


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    x = sympy.nsimplify(x) if not isinstance(x, sympy.Rational) else x
    return Fraction(int(x.p), int(x.q))


def _matrix(rows) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else x
                          for x in r] for r in rows])


def _rank(rows) -> int:
    if not rows:
        return 0
    return _matrix(rows).rank()


def _nullspace(rows, ncols: int) -> list[list[Fraction]]:
    """Rational basis of {x : rows x = 0}."""
    if not rows:
        return [[Fraction(int(i == k)) for i in range(ncols)] for k in range(ncols)]
    return [[_frac(x) for x in v] for v in _matrix(rows).nullspace()]


def _primitive(v: Sequence[Fraction]) -> tuple:
    """Scale to a primitive integer vector, keeping the sign."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints) if g else tuple(ints)


def _affine_rank(pts: Sequence[Sequence]) -> int:
    if not pts:
        return -1
    p0 = pts[0]
    return _rank([[a - b for a, b in zip(p, p0)] for p in pts[1:]])


def _span_coords(pts: Sequence[Sequence]) -> list[int]:
    """A coordinate subset on which projection keeps the affine rank."""
    d = _affine_rank(pts)
    p0 = pts[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in pts[1:]]
    chosen: list[int] = []
    for c in range(len(p0)):
        trial = chosen + [c]
        if _rank([[row[k] for k in trial] for row in diffs]) == len(trial):
            chosen = trial
        if len(chosen) == d:
            break
    return chosen


def _affine_coeffs(basis: Sequence[Sequence], p: Sequence) -> list[Fraction] | None:
    """Coefficients c with p = sum c_q basis_q and sum c_q = 1, or None."""
    k = len(basis)
    rows = [[Fraction(b[i]) for b in basis] + [Fraction(p[i])] for i in range(len(p))]
    rows.append([Fraction(1)] * k + [Fraction(1)])
    M = _matrix(rows)
    A, rhs = M[:, :k], M[:, k]
    try:
        sol, params = A.gauss_jordan_solve(rhs)
    except ValueError:
        return None
    if params.shape[0]:
        raise ValueError("basis is not affinely independent")
    return [_frac(x) for x in sol]


# ---------------------------------------------------------------- point labels and bases


def point_label(v: Sequence[int]) -> str:
    """t_{ij} as 'ij' (block indices, 1-based); a doubled block t as 'tt'."""
    idx = []
    for t, x in enumerate(v, start=1):
        idx += [t] * x
    return "".join(map(str, idx))


def label_to_point(label: str, N: int) -> tuple:
    v = [0] * N
    for ch in label:
        v[int(ch) - 1] += 1
    return tuple(v)


def _priority(v: Sequence[int]) -> tuple:
    idx = []
    for t, x in enumerate(v, start=1):
        idx += [t] * x
    i, j = idx
    if i == j:
        return (j, 2, i)
    return (j, 0 if i == j - 1 else 1, i)


def priority_order(points: Iterable) -> list[tuple]:
    """Scan order used to pick affine bases: by larger index, adjacent pairs first, doubled last."""
    return sorted(points, key=_priority)


def greedy_affine_basis(points: Iterable) -> list[tuple]:
    return list(_greedy_basis(frozenset(tuple(p) for p in points)))


@lru_cache(maxsize=None)
def _greedy_basis(points: frozenset) -> tuple:
    basis: list[tuple] = []
    for p in priority_order(points):
        if _affine_rank(basis + [p]) == len(basis):
            basis.append(p)
    return tuple(basis)


# ---------------------------------------------------------------- polytopes


def _facets(pts: list[tuple]) -> list[tuple]:
    """Facets of a full-dimensional point configuration: (normal, offset, point subset) with n.x >= c."""
    d = len(pts[0])
    out = {}
    for sub in combinations(range(len(pts)), d):
        base = pts[sub[0]]
        rows = [[Fraction(a - b) for a, b in zip(pts[k], base)] for k in sub[1:]]
        ns = _nullspace(rows, d) if rows else _nullspace([], d)
        if len(ns) != 1:
            continue
        n = ns[0]
        c = sum(a * b for a, b in zip(n, base))
        vals = [sum(a * b for a, b in zip(n, p)) - c for p in pts]
        if all(v >= 0 for v in vals):
            pass
        elif all(v <= 0 for v in vals):
            n = [-a for a in n]
            c = -c
        else:
            continue
        on = frozenset(k for k, p in enumerate(pts) if sum(a * b for a, b in zip(n, p)) == c)
        out[on] = (tuple(n), c, on)
    return list(out.values())


def _triangulate(pts: list[tuple]) -> list[tuple]:
    """Triangulation by coning from the first point over the facets that miss it; indices into pts."""
    d = _affine_rank(pts)
    if d == 0:
        return [(0,)]
    cs = _span_coords(pts)
    proj = [tuple(p[k] for k in cs) for p in pts]
    out = []
    for _, _, on in _facets(proj):
        if 0 in on:
            continue
        idx = sorted(on)
        for simp in _triangulate([pts[k] for k in idx]):
            out.append((0,) + tuple(idx[k] for k in simp))
    return out


def lattice_volume(pts: Sequence[Sequence], coords: Sequence[int], dim: int) -> Fraction:
    """Euclidean volume of the hull in the given coordinate projection; zero below dimension dim."""
    pts = [tuple(p) for p in pts]
    if not pts or _affine_rank(pts) < dim:
        return Fraction(0)
    if dim == 0:
        return Fraction(1)
    proj = [tuple(Fraction(p[k]) for k in coords) for p in pts]
    vol = Fraction(0)
    for simp in _triangulate(proj):
        base = proj[simp[0]]
        rows = [[a - b for a, b in zip(proj[k], base)] for k in simp[1:]]
        vol += abs(_frac(_matrix(rows).det()))
    return vol / factorial(dim)


# ---------------------------------------------------------------- entire convexes


def _subsets(N: int) -> list[frozenset]:
    return [frozenset(c) for r in range(N + 1) for c in combinations(range(1, N + 1), r)]


def check_family(N: int, d: Mapping) -> list[str]:
    """Violations of d_empty = 0, d_full = 2 and d_I + d_J <= d_{I|J} + d_{I&J}."""
    full = frozenset(range(1, N + 1))
    dd = {frozenset(k): v for k, v in d.items()}
    problems = []
    if dd.get(frozenset(), 0) != 0:
        problems.append("d of the empty set must be 0")
    if dd.get(full, 2) != 2:
        problems.append("d of the full set must be 2")
    get = lambda I: dd.get(I, 0 if I != full else 2)
    subs = _subsets(N)
    for I, J in combinations(subs, 2):
        if get(I) + get(J) > get(I | J) + get(I & J):
            problems.append(f"d{sorted(I)} + d{sorted(J)} > d{sorted(I | J)} + d{sorted(I & J)}")
    return problems


def tight_family(N: int, points: Iterable) -> dict:
    pts = list(points)
    out = {}
    for I in _subsets(N):
        out[I] = min(sum(p[i - 1] for i in I) for p in pts) if pts else 0
    return out


@dataclass(frozen=True)
class EntireConvex:
    s: tuple
    points: frozenset
    d_family: tuple = field(default=(), compare=False, hash=False)
    hull_dim: int = field(default=-1, compare=False, hash=False)

    @property
    def labels(self) -> list[str]:
        return sorted(point_label(p) for p in self.points)

    @property
    def key(self) -> str:
        return ".".join(self.labels)

    def __str__(self):
        return "{" + ",".join(self.labels) + "}"


def make_convex(s, points: Iterable) -> EntireConvex:
    s = as_size_vector(s)
    pts = frozenset(tuple(p) for p in points)
    fam = tight_family(s.N, pts)
    return EntireConvex(s.entries, pts, tuple(sorted((tuple(sorted(k)), v) for k, v in fam.items())),
                        _affine_rank(sorted(pts)))


def entire_convex_from_d(s, d_family: Mapping) -> EntireConvex:
    s = as_size_vector(s)
    problems = check_family(s.N, d_family)
    if problems:
        raise InvalidFamily("; ".join(problems))
    dd = {frozenset(k): v for k, v in d_family.items()}
    pts = [p for p in enumerate_Vs(s) if all(sum(p[i - 1] for i in I) >= v for I, v in dd.items())]
    fam = tuple(sorted((tuple(sorted(k)), v) for k, v in dd.items()))
    return EntireConvex(s.entries, frozenset(pts), fam, _affine_rank(pts))


def vs_dim(s) -> int:
    return _affine_rank(enumerate_Vs(s))


def _vs_coords(s) -> list[int]:
    return _span_coords(enumerate_Vs(s))


@lru_cache(maxsize=None)
def _paves(entries: tuple) -> tuple:
    s = as_size_vector(entries)
    N = s.N
    V = enumerate_Vs(s)
    full = frozenset(range(1, N + 1))
    free = [I for I in _subsets(N) if I and I != full]
    # satisfy supermodularity incrementally: a pair is checked once all four sets are assigned
    order = {I: k for k, I in enumerate(free)}
    fixed = {frozenset(): 0, full: 2}

    def known(I, d):
        return fixed[I] if I in fixed else d.get(I)

    found = {}

    def rec(k, d):
        if k == len(free):
            pts = frozenset(p for p in V if all(sum(p[i - 1] for i in I) >= v for I, v in d.items()))
            if pts and pts not in found:
                found[pts] = dict(d)
            return
        I = free[k]
        for val in (0, 1, 2):
            d[I] = val
            ok = True
            for J in free[:k]:
                a, b = known(I | J, d), known(I & J, d)
                if a is None or b is None:
                    continue
                if val + d[J] > a + b:
                    ok = False
                    break
            if ok:
                # pairs whose union or intersection is I and whose members are both assigned
                for J1, J2 in combinations(free[: k + 1], 2):
                    if I not in (J1 | J2, J1 & J2) or I in (J1, J2):
                        continue
                    a, b = known(J1 | J2, d), known(J1 & J2, d)
                    if a is None or b is None:
                        continue
                    if d[J1] + d[J2] > a + b:
                        ok = False
                        break
            if ok:
                rec(k + 1, d)
            del d[I]

    rec(0, {})
    dim = vs_dim(s)
    out = []
    for pts, d in found.items():
        if _affine_rank(sorted(pts)) == dim:
            fam = dict(d)
            fam.update(fixed)
            out.append(EntireConvex(s.entries, pts, tuple(sorted((tuple(sorted(k)), v) for k, v in fam.items())), dim))
    return tuple(sorted(out, key=lambda c: c.key))


def enumerate_paves(s) -> list[EntireConvex]:
    """Distinct point sets of entire convexes of maximal dimension, sorted by point-set encoding."""
    s = as_size_vector(s)
    if s.N > 4:
        raise TooLarge(f"pave enumeration is limited to N <= 4, got N={s.N}")
    return list(_paves(s.entries))


# ---------------------------------------------------------------- pavings


@dataclass(frozen=True)
class Paving:
    s: tuple
    cells: tuple

    @property
    def key(self) -> str:
        return "|".join(sorted(c.key for c in self.cells))

    def __str__(self):
        return "{" + ", ".join(str(c) for c in sorted(self.cells, key=lambda c: c.key)) + "}"

    def __eq__(self, other):
        return isinstance(other, Paving) and self.s == other.s and {c.points for c in self.cells} == {c.points for c in other.cells}

    def __hash__(self):
        return hash((self.s, frozenset(c.points for c in self.cells)))


def make_paving(s, cells: Iterable) -> Paving:
    s = as_size_vector(s)
    cs = [c if isinstance(c, EntireConvex) else make_convex(s, c) for c in cells]
    return Paving(s.entries, tuple(sorted(cs, key=lambda c: c.key)))


def trivial_paving(s) -> Paving:
    return make_paving(s, [enumerate_Vs(s)])


@dataclass
class PavingCertificate:
    ok: bool
    reason: str
    heights: dict | None = None
    margin: Fraction | None = None


def _facet_system(s, cell: EntireConvex):
    cs = _vs_coords(s)
    proj = sorted(tuple(p[k] for k in cs) for p in cell.points)
    return [(n, c) for n, c, _ in _facets(proj)]


def _lp_max(nvars: int, objective, le_rows, eq_rows=()):
    """Exact max of objective.x over free x with A x <= b and A_eq x = b_eq.

    Rows are (coefficients, rhs). Returns (value, x) or None if infeasible.
    sympy's symbolic lpmax front end sometimes returns points violating Eq or
    paired rows, so this goes through matrix-form linprog with every free
    variable split into two nonnegative columns, then checks the answer.
    """
    def split(coefs):
        out = []
        for a in coefs:
            out += [a, -a]
        return out

    M = sympy.Matrix
    A = M([split(r) for r, _ in le_rows]) if le_rows else None
    b = M([q for _, q in le_rows]) if le_rows else None
    A_eq = M([split(r) for r, _ in eq_rows]) if eq_rows else None
    b_eq = M([q for _, q in eq_rows]) if eq_rows else None
    try:
        val, x = linprog(M([split([-a for a in objective])]), A, b, A_eq, b_eq)
    except InfeasibleLPError:
        return None
    x = [_frac(v) for v in x]
    x = [x[2 * j] - x[2 * j + 1] for j in range(nvars)]
    dot = lambda r: sum((Fraction(a) * v for a, v in zip(r, x)), Fraction(0))
    if any(dot(r) > q for r, q in le_rows) or any(dot(r) != q for r, q in eq_rows):
        raise ArithmeticError("LP solution violates its own constraints")
    return dot(objective), x


def interiors_meet(s, a: EntireConvex, b: EntireConvex) -> bool:
    """True iff the relative interiors of the two full-dimensional hulls intersect."""
    s = as_size_vector(s)
    dim = vs_dim(s)
    if dim == 0:
        return True
    # unknowns x_0..x_{dim-1}, t: maximize t with n.x >= c + t on every facet, t <= 1
    rows = [([0] * dim + [1], 1)]
    for n, c in _facet_system(s, a) + _facet_system(s, b):
        rows.append(([-x for x in n] + [1], -c))
    res = _lp_max(dim + 1, [0] * dim + [1], rows)
    return res is not None and res[0] > 0


def _regularity(s, cells: Sequence[EntireConvex]):
    """Maximize the strict slack of a height function convex across the cells."""
    s = as_size_vector(s)
    V = enumerate_Vs(s)
    N = s.N
    nv = len(V)
    # unknowns: heights v, then one affine function per cell, then eps
    n = nv + len(cells) * (N + 1) + 1
    eq, le = [], [([0] * (n - 1) + [1], 1)]
    for k, cell in enumerate(cells):
        base = nv + k * (N + 1)
        for i, p in enumerate(V):
            r = [0] * n
            r[base] = 1
            for m in range(N):
                r[base + 1 + m] = p[m]
            r[i] = -1
            if p in cell.points:
                eq.append((r, 0))
            else:
                r[-1] = 1
                le.append((r, 0))
    res = _lp_max(n, [0] * (n - 1) + [1], le, eq)
    if res is None:
        return Fraction(-1), None
    val, x = res
    return val, {point_label(p): x[i] for i, p in enumerate(V)}


def is_paving(s, cells: Iterable) -> PavingCertificate:
    s = as_size_vector(s)
    cells = [c if isinstance(c, EntireConvex) else make_convex(s, c) for c in cells]
    V = enumerate_Vs(s)
    dim = vs_dim(s)
    cs = _vs_coords(s)
    if not cells:
        return PavingCertificate(False, "no cells")
    for c in cells:
        if not c.points <= frozenset(V):
            return PavingCertificate(False, f"cell {c} leaves V^s")
        if _affine_rank(sorted(c.points)) != dim:
            return PavingCertificate(False, f"cell {c} is not of maximal dimension")
    if len({c.points for c in cells}) != len(cells):
        return PavingCertificate(False, "repeated cell")
    total = lattice_volume(V, cs, dim)
    got = sum((lattice_volume(sorted(c.points), cs, dim) for c in cells), Fraction(0))
    if got != total:
        return PavingCertificate(False, f"volume {got} of cells differs from hull volume {total}")
    for a, b in combinations(cells, 2):
        if interiors_meet(s, a, b):
            return PavingCertificate(False, f"interiors of {a} and {b} overlap")
    margin, heights = _regularity(s, cells)
    if margin <= 0:
        return PavingCertificate(False, "no strictly convex height function", margin=margin)
    return PavingCertificate(True, "regular paving", heights, margin)


@lru_cache(maxsize=None)
def _pavings(entries: tuple) -> tuple:
    s = as_size_vector(entries)
    paves = list(_paves(entries))
    V = enumerate_Vs(s)
    dim = vs_dim(s)
    cs = _vs_coords(s)
    total = lattice_volume(V, cs, dim)
    vols = [lattice_volume(sorted(p.points), cs, dim) for p in paves]
    meet = {}

    def overlap(i, j):
        if (i, j) not in meet:
            meet[(i, j)] = interiors_meet(s, paves[i], paves[j])
        return meet[(i, j)]

    out = []

    def rec(start, chosen, vol):
        if vol == total:
            cells = [paves[i] for i in chosen]
            if _regularity(s, cells)[0] > 0:
                out.append(make_paving(s, cells))
            return
        for i in range(start, len(paves)):
            if vol + vols[i] > total:
                continue
            if any(overlap(j, i) for j in chosen):
                continue
            rec(i + 1, chosen + [i], vol + vols[i])

    rec(0, [], Fraction(0))
    return tuple(sorted(out, key=lambda p: p.key))


def enumerate_pavings(s) -> list[Paving]:
    s = as_size_vector(s)
    if s.N > 4:
        raise TooLarge(f"paving enumeration is limited to N <= 4, got N={s.N}")
    return list(_pavings(s.entries))


# Conventional names for the (1,1,1,2) case: paves by the pair types they
# drop or the doubled block, pavings by their cells.
_PAVE_NAMES_1112 = {
    "S12": "12.13.14.23.24",
    "S13": "12.13.14.23.34",
    "S23": "12.13.23.24.34",
    "S24": "12.14.23.24.34",
    "S34": "13.14.23.24.34",
    "S14": "12.13.14.24.34",
    "S4": "14.24.34.44",
    "S144": "12.13.14.24.34.44",
    "S244": "12.14.23.24.34.44",
    "S344": "13.14.23.24.34.44",
    "S1234": "12.13.14.23.24.34",
    "S12344": "12.13.14.23.24.34.44",
}
_PAVING_NAMES_1112 = {
    "S12": ("S12", "S344"),
    "S13": ("S13", "S244"),
    "S23": ("S23", "S144"),
    "S4": ("S4", "S1234"),
    "S1244": ("S12", "S34", "S4"),
    "S1344": ("S13", "S24", "S4"),
    "S2344": ("S23", "S14", "S4"),
    "trivial": ("S12344",),
}


def pave_names(s) -> dict:
    """Pave key -> conventional name (only (1,1,1,2) has names)."""
    if as_size_vector(s).entries != (1, 1, 1, 2):
        return {}
    return {v: k for k, v in _PAVE_NAMES_1112.items()}


def paving_names(s) -> dict:
    """Paving key -> conventional name; the trivial paving is always 'trivial'."""
    s = as_size_vector(s)
    out = {trivial_paving(s).key: "trivial"}
    if s.entries == (1, 1, 1, 2):
        for name, cells in _PAVING_NAMES_1112.items():
            out["|".join(sorted(_PAVE_NAMES_1112[c] for c in cells))] = name
    return out


def paving_by_id(s, ident: str) -> Paving:
    """Resolve a paving by conventional name or by its key; KeyError if unknown."""
    names = {v: k for k, v in paving_names(s).items()}
    key = names.get(ident, ident)
    for P in enumerate_pavings(s):
        if P.key == key:
            return P
    raise KeyError(ident)


# ---------------------------------------------------------------- cones


def affine_space_C0(s) -> list[tuple]:
    """Basis of the restrictions of affine functions to V^s, as value vectors in V^s order."""
    V = enumerate_Vs(s)
    N = as_size_vector(s).N
    cols = [[Fraction(1)] * len(V)] + [[Fraction(p[i]) for p in V] for i in range(N)]
    basis: list[list[Fraction]] = []
    for c in cols:
        if _rank(basis + [c]) > len(basis):
            basis.append(c)
    return [tuple(b) for b in basis]


def canonical_mod_affine(s, v: Sequence[Fraction]) -> tuple:
    """Representative of v modulo affine functions vanishing on the greedy affine basis."""
    V = enumerate_Vs(s)
    B = greedy_affine_basis(V)
    pos = {p: k for k, p in enumerate(V)}
    out = []
    for p in V:
        c = _affine_coeffs(B, p)
        out.append(Fraction(v[pos[p]]) - sum(ck * Fraction(v[pos[q]]) for ck, q in zip(c, B)))
    return tuple(out)


@dataclass
class Cone:
    s: tuple
    points: tuple
    lineality_basis: list
    ray_generators: list
    equalities: list
    inequalities: list

    def ray_labels(self) -> list[dict]:
        return [{point_label(p): x for p, x in zip(self.points, r)} for r in self.ray_generators]


def _cell_relations(s, cell: EntireConvex):
    """For each point j: the row e_j - sum c_jq e_q expressing v(j) - l_cell(j)."""
    V = enumerate_Vs(s)
    pos = {p: k for k, p in enumerate(V)}
    B = greedy_affine_basis(cell.points)
    rows = {}
    for p in V:
        if p in B:
            continue
        c = _affine_coeffs(B, p)
        row = [Fraction(0)] * len(V)
        row[pos[p]] += 1
        for ck, q in zip(c, B):
            row[pos[q]] -= ck
        rows[p] = row
    return rows


def cone_of_paving(s, P: Paving) -> Cone:
    s = as_size_vector(s)
    V = enumerate_Vs(s)
    eqs, ineqs = [], []
    for cell in P.cells:
        for p, row in _cell_relations(s, cell).items():
            (eqs if p in cell.points else ineqs).append(row)
    L = _nullspace(eqs, len(V))
    k = len(L)
    G = [[sum(r[i] * L[b][i] for i in range(len(V))) for b in range(k)] for r in ineqs]
    G = [g for g in G if any(x != 0 for x in g)]
    lin_y = _nullspace(G, k) if G else [[Fraction(int(i == b)) for i in range(k)] for b in range(k)]
    to_v = lambda y: [sum(y[b] * L[b][i] for b in range(k)) for i in range(len(V))]
    lineality = [tuple(to_v(y)) for y in lin_y]
    rays = []
    if G:
        rg = _rank(G)
        seen = set()
        for sub in combinations(range(len(G)), rg - 1):
            ns = _nullspace([G[i] for i in sub], k) if sub else _nullspace([], k)
            if len(ns) != len(lin_y) + 1:
                continue
            cand = next((y for y in ns if any(sum(g[i] * y[i] for i in range(k)) != 0 for g in G)), None)
            if cand is None:
                continue
            vals = [sum(g[i] * cand[i] for i in range(k)) for g in G]
            if all(x >= 0 for x in vals):
                y = cand
            elif all(x <= 0 for x in vals):
                y = [-x for x in cand]
            else:
                continue
            r = _primitive(canonical_mod_affine(s, to_v(y)))
            if r not in seen:
                seen.add(r)
                rays.append(r)
    rays.sort()
    return Cone(s.entries, tuple(V), lineality, rays, eqs, ineqs)


# ---------------------------------------------------------------- lattices and Hilbert bases


def _col_hermite(H: list[list[int]], k: int):
    """Unimodular U (k x k, as columns) with H U = [H' | 0]; returns (U columns, rank)."""
    U = [[int(i == j) for i in range(k)] for j in range(k)]  # U[j] is column j
    Hc = [[H[r][j] for r in range(len(H))] for j in range(k)]  # columns of H
    piv = 0
    for r in range(len(H)):
        if piv >= k:
            break
        while True:
            nz = [j for j in range(piv, k) if Hc[j][r] != 0]
            if not nz:
                break
            j0 = min(nz, key=lambda j: abs(Hc[j][r]))
            Hc[piv], Hc[j0] = Hc[j0], Hc[piv]
            U[piv], U[j0] = U[j0], U[piv]
            done = True
            for j in range(piv + 1, k):
                if Hc[j][r]:
                    q = Hc[j][r] // Hc[piv][r]
                    Hc[j] = [a - q * b for a, b in zip(Hc[j], Hc[piv])]
                    U[j] = [a - q * b for a, b in zip(U[j], U[piv])]
                    if Hc[j][r]:
                        done = False
            if done:
                piv += 1
                break
    return U, piv


def integer_kernel(H: list[list[int]], k: int) -> list[tuple]:
    U, r = _col_hermite(H, k)
    return [tuple(U[j]) for j in range(r, k)]


def _echelon_from_last(vecs: list[tuple]) -> list[tuple]:
    """Integer echelon form of a lattice basis with pivots at the last nonzero coordinate."""
    rows = [list(v) for v in vecs]
    if not rows:
        return []
    k = len(rows[0])
    out = []
    for c in reversed(range(k)):
        while True:
            nz = [r for r in rows if r[c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda r: abs(r[c]))
            rest = [r for r in nz if r is not p]
            if not rest:
                rows.remove(p)
                if p[c] < 0:
                    p = [-x for x in p]
                out.append(p)
                break
            for r in rest:
                q = r[c] // p[c]
                for i in range(k):
                    r[i] -= q * p[i]
    # reduce entries at other pivots into [0, pivot)
    pivots = [max(i for i in range(k) if v[i] != 0) for v in out]
    for a in range(len(out)):
        for b in range(a + 1, len(out)):
            c = pivots[b]
            q = out[a][c] // out[b][c]
            if q:
                out[a] = [x - q * y for x, y in zip(out[a], out[b])]
    return [tuple(v) for v in out]


def _reduce_mod(g: Sequence[int], ech: list[tuple]) -> tuple:
    g = list(g)
    k = len(g)
    for v in ech:  # pivots in decreasing position
        c = max(i for i in range(k) if v[i] != 0)
        q = g[c] // v[c]
        g = [x - q * y for x, y in zip(g, v)]
    return tuple(g)


def perp_lattice_Mprime(s) -> list[tuple]:
    return list(_perp_lattice(as_size_vector(s).entries))


@lru_cache(maxsize=None)
def _perp_lattice(s: tuple) -> tuple:
    """Z-basis of the exponent vectors orthogonal to every affine function on V^s.

    Vectors are indexed by V^s order; the basis vector attached to a non-basis point p
    is e_p minus its affine expression in the greedy basis whenever that is integral.
    """
    V = enumerate_Vs(s)
    N = as_size_vector(s).N
    B = greedy_affine_basis(V)
    pos = {p: k for k, p in enumerate(V)}
    out = []
    integral = True
    for p in priority_order(V):
        if p in B:
            continue
        c = _affine_coeffs(B, p)
        if any(x.denominator != 1 for x in c):
            integral = False
            break
        m = [0] * len(V)
        m[pos[p]] = 1
        for ck, q in zip(c, B):
            m[pos[q]] -= int(ck)
        out.append(tuple(m))
    if integral:
        return tuple(out)
    E = [[1] * len(V)] + [[p[i] for p in V] for i in range(N)]
    return tuple(integer_kernel(E, len(V)))


def pair(m: Sequence, v: Sequence) -> Fraction:
    return sum(Fraction(a) * Fraction(b) for a, b in zip(m, v))


def _rays_of(H: list[list[int]], d: int) -> list[tuple]:
    """Primitive extreme rays of the pointed full-dimensional cone {z : H z >= 0}."""
    rays = set()
    for sub in combinations(range(len(H)), d - 1):
        ns = _nullspace([[Fraction(x) for x in H[i]] for i in sub], d) if sub else _nullspace([], d)
        if len(ns) != 1:
            continue
        r = ns[0]
        vals = [sum(h[i] * r[i] for i in range(d)) for h in H]
        if all(x >= 0 for x in vals):
            rays.add(_primitive(r))
        elif all(x <= 0 for x in vals):
            rays.add(_primitive([-x for x in r]))
    return sorted(rays)


def hilbert_basis_pointed(H: list[list[int]], d: int) -> list[tuple]:
    """Minimal generators of {z in Z^d : H z >= 0}, assumed pointed."""
    if d == 0:
        return []
    rays = _rays_of(H, d)
    T = [sum(sum(h[i] * r[i] for i in range(d)) for r in rays) for h in H]
    rows = []
    for h, t in zip(H, T):
        rows += [([-x for x in h], 0), (list(h), t)]
    ranges = []
    for i in range(d):
        e = [int(j == i) for j in range(d)]
        lo = -_lp_max(d, [-x for x in e], rows)[0]
        hi = _lp_max(d, e, rows)[0]
        ranges.append(range(floor(lo), ceil(hi) + 1))
    cand = []
    for z in iproduct(*ranges):
        if not any(z):
            continue
        hz = [sum(h[i] * z[i] for i in range(d)) for h in H]
        if all(0 <= a <= t for a, t in zip(hz, T)):
            cand.append((tuple(hz), z))
    cset = {z for _, z in cand}
    hval = {z: hz for hz, z in cand}
    out = []
    for hz, z in cand:
        reducible = False
        for a in cset:
            if a == z:
                continue
            ha = hval[a]
            if all(x <= y for x, y in zip(ha, hz)):
                b = tuple(x - y for x, y in zip(z, a))
                if any(b):
                    reducible = True
                    break
        if not reducible:
            out.append(z)
    return sorted(out)


def dual_chart_generators(s, P: Paving) -> list[tuple]:
    """Minimal generators of the monoid of M' exponents nonnegative on the cone of P.

    Lineality generators come in +- pairs; pointed generators are lifted so that they
    vanish at the pivot coordinates of the lineality lattice.
    """
    s = as_size_vector(s)
    cone = cone_of_paving(s, P)
    K = perp_lattice_Mprime(s)
    k = len(K)
    if k == 0:
        return []
    extra = [l for l in cone.lineality_basis]
    H = []
    for r in cone.ray_generators:
        H.append([int(pair(m, r)) if pair(m, r).denominator == 1 else pair(m, r) for m in K])
    for l in extra:
        row = [pair(m, l) for m in K]
        if any(x != 0 for x in row):
            H.append(row)
            H.append([-x for x in row])
    # clear denominators row by row
    Hi = []
    for row in H:
        Hi.append(list(_primitive(row)) if any(Fraction(x) != 0 for x in row) else [0] * k)
    U, r = _col_hermite(Hi, k)
    ker = [tuple(U[j]) for j in range(r, k)]
    ech = _echelon_from_last(ker)
    Hp = [[sum(h[i] * U[j][i] for i in range(k)) for j in range(r)] for h in Hi]
    gens_y = []
    for z in hilbert_basis_pointed(Hp, r):
        y = [sum(z[j] * U[j][i] for j in range(r)) for i in range(k)]
        gens_y.append(_reduce_mod(y, ech))
    for v in ech:
        gens_y.append(tuple(v))
        gens_y.append(tuple(-x for x in v))
    out = set()
    for y in gens_y:
        m = tuple(sum(y[b] * K[b][i] for b in range(k)) for i in range(len(K[0])))
        out.add(m)
    return sorted(out)


def exponent_to_str(s, m: Sequence[int]) -> str:
    """'ab.cd/ef.gh' form: positive exponents over negative exponents."""
    V = enumerate_Vs(s)
    num, den = [], []
    for p, e in zip(V, m):
        (num if e > 0 else den).extend([point_label(p)] * abs(e))
    return ".".join(sorted(num)) + "/" + ".".join(sorted(den))


def str_to_exponent(s, text: str) -> tuple:
    V = enumerate_Vs(s)
    N = as_size_vector(s).N
    pos = {p: k for k, p in enumerate(V)}
    num, _, den = text.partition("/")
    m = [0] * len(V)
    for part, sign in ((num, 1), (den, -1)):
        for lab in filter(None, part.split(".")):
            m[pos[label_to_point(lab, N)]] += sign
    return tuple(m)


# ---------------------------------------------------------------- faces


def face_convex(s, J: Iterable[int]):
    """(s', face points in V^s, map from V^{s'} points to V^s points) for the face x_j = 0, j in J."""
    s = as_size_vector(s)
    J = sorted(set(J))
    keep = [t for t in range(1, s.N + 1) if t not in J]
    if len(keep) < 2:
        raise TooFewBlocks(f"the face keeps {len(keep)} block(s); need at least 2")
    s2 = as_size_vector(tuple(s[t - 1] for t in keep))

    def embed(q):
        v = [0] * s.N
        for x, t in zip(q, keep):
            v[t - 1] = x
        return tuple(v)

    face = [p for p in enumerate_Vs(s) if all(p[j - 1] == 0 for j in J)]
    emb = {q: embed(q) for q in enumerate_Vs(s2)}
    return s2, face, emb


def restrict_paving(s, P: Paving, J: Iterable[int]) -> Paving:
    """Cells meeting the face in full dimension, as convexes of the face size vector."""
    s2, face, emb = face_convex(s, J)
    back = {v: q for q, v in emb.items()}
    fset = set(face)
    dim = vs_dim(s2)
    cells = {}
    for c in P.cells:
        pts = frozenset(back[p] for p in c.points if p in fset)
        if pts and _affine_rank(sorted(pts)) == dim:
            cells[pts] = make_convex(s2, pts)
    return make_paving(s2, cells.values())
