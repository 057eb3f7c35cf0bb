"""Chart index sets, parametrizations Gamma^tau and Sigma^lambda, and the N = 4 chart catalog."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import combinations, product as iproduct
from typing import Mapping, Sequence

from .combinatorics import as_size_vector, blocks, pairs_meeting_block, tau_of
from .exact_algebra import (
    IntPoly,
    MissingVariable,
    RatFunc,
    as_ratfunc,
    divide_exact,
    irreducible_factors,
    parse_poly,
    parse_ratfunc,
    var,
)
from .grassmannian import Indeterminate, Matrix2xN, ProjectivePoint, map_Ft, numeric_minors


class WrongVariableSet(ValueError):
    def __init__(self, missing, extra):
        self.missing = sorted(missing)
        self.extra = sorted(extra)
        super().__init__(f"missing {self.missing}, unexpected {self.extra}")


class UnsupportedShape(ValueError):
    pass


class CatalogError(ValueError):
    pass


# ---------------------------------------------------------------- index sets


@dataclass(frozen=True, order=True)
class STriple:
    j: int
    t: int
    p: int

    def __str__(self):
        return f"({self.j},{self.t},{self.p})"


def striple(s, j: int) -> STriple:
    s = as_size_vector(s)
    t = tau_of(s, j)
    return STriple(j, t, j - sum(s.entries[: t - 1]))


@dataclass(frozen=True, order=True)
class ChartIndex:
    j1: STriple
    j2: STriple
    plus: tuple
    minus: tuple

    @property
    def klass(self) -> str:
        return "I" if self.j1.t != self.j2.t else "II"

    @property
    def columns(self) -> tuple:
        """(j1, j2, plus columns, minus columns) as plain integers."""
        return (self.j1.j, self.j2.j, tuple(x.j for x in self.plus), tuple(x.j for x in self.minus))

    def __str__(self):
        j1, j2, pl, mi = self.columns
        return f"({j1},{j2},({','.join(map(str, pl))}),({','.join(map(str, mi))}))"


def chart_index(s, j1: int, j2: int, plus: Sequence[int] = (), minus: Sequence[int] = ()) -> ChartIndex:
    """Build and validate an index from plain column numbers."""
    s = as_size_vector(s)
    tr = [striple(s, j) for j in (j1, j2)]
    pl = tuple(striple(s, j) for j in plus)
    mi = tuple(striple(s, j) for j in minus)
    idx = ChartIndex(tr[0], tr[1], pl, mi)
    if idx not in enumerate_J_indices(s):
        raise ValueError(f"{idx} is not an index for s={s.entries}")
    return idx


@lru_cache(maxsize=None)
def _j_indices(entries: tuple) -> frozenset:
    s = as_size_vector(entries)
    N = s.N
    bl = blocks(s)
    out = set()

    def fill(rest_blocks):
        # every remaining block goes to plus or minus with a chosen column
        for signs in iproduct((0, 1), repeat=len(rest_blocks)):
            cols = [bl[t - 1] for t in rest_blocks]
            for choice in iproduct(*cols):
                pl = tuple(striple(s, j) for j, sg in zip(choice, signs) if sg == 0)
                mi = tuple(striple(s, j) for j, sg in zip(choice, signs) if sg == 1)
                yield pl, mi

    for t1, t2 in combinations(range(1, N + 1), 2):
        rest = [t for t in range(1, N + 1) if t not in (t1, t2)]
        for j1 in bl[t1 - 1]:
            for j2 in bl[t2 - 1]:
                for pl, mi in fill(rest):
                    out.add(ChartIndex(striple(s, j1), striple(s, j2), pl, mi))
    for t in range(1, N + 1):
        rest = [u for u in range(1, N + 1) if u != t]
        for j1, j2 in combinations(bl[t - 1], 2):
            for pl, mi in fill(rest):
                out.add(ChartIndex(striple(s, j1), striple(s, j2), pl, mi))
    return frozenset(out)


def enumerate_J_indices(s) -> frozenset:
    """All Class I and Class II indices."""
    return _j_indices(as_size_vector(s).entries)


# ---------------------------------------------------------------- Gamma^tau


def _is_max_torus(s) -> bool:
    return all(x == 1 for x in as_size_vector(s))


def gamma_tau_variables(s, tau: ChartIndex) -> list[str]:
    """Parameter names of Gamma^tau, in the order A, (Y, Z, U, V | W), H^alpha, Xi^beta."""
    s = as_size_vector(s)
    names = [f"a_{x.j}" for x in tau.plus + tau.minus]
    if _is_max_torus(s):
        names += [f"eta_{x.j}" for x in tau.plus] + [f"xi_{x.j}" for x in tau.minus]
        return names
    if tau.klass == "I":
        k1 = [k for k in range(1, s[tau.j1.t - 1] + 1) if k != tau.j1.p]
        k2 = [k for k in range(1, s[tau.j2.t - 1] + 1) if k != tau.j2.p]
        names += [f"y_{k}" for k in k1] + [f"z_{k}" for k in k2]
        names += [f"u_{k}" for k in k1] + [f"v_{k}" for k in k2]
    else:
        kk = [k for k in range(1, s[tau.j1.t - 1] + 1) if k not in (tau.j1.p, tau.j2.p)]
        names += [f"w_1{k}" for k in kk] + [f"w_2{k}" for k in kk]
    for a, x in enumerate(tau.plus, start=1):
        st = s[x.t - 1]
        names += [f"eta{a}_1{k}" for k in range(1, st + 1) if k != x.p]
        names += [f"eta{a}_2{k}" for k in range(1, st + 1)]
    for b, x in enumerate(tau.minus, start=1):
        st = s[x.t - 1]
        names += [f"xi{b}_1{k}" for k in range(1, st + 1)]
        names += [f"xi{b}_2{k}" for k in range(1, st + 1) if k != x.p]
    return names


def gamma_tau(s, tau: ChartIndex, params: Mapping | None = None) -> Matrix2xN:
    """The U_{j1 j2} matrix of Gamma^tau; params None means the generic symbolic matrix."""
    s = as_size_vector(s)
    names = gamma_tau_variables(s, tau)
    if params is None:
        params = {n: var(n) for n in names}
    missing = set(names) - set(params)
    extra = set(params) - set(names)
    if missing or extra:
        raise WrongVariableSet(missing, extra)
    P = {k: as_ratfunc(v) for k, v in params.items()}
    n = s.n
    rows = [[RatFunc(0)] * n, [RatFunc(0)] * n]
    rows[0][tau.j1.j - 1], rows[1][tau.j1.j - 1] = RatFunc(1), RatFunc(0)
    rows[0][tau.j2.j - 1], rows[1][tau.j2.j - 1] = RatFunc(0), RatFunc(1)

    def block_cols(x: STriple):
        start = x.j - x.p
        return [(start + k, k) for k in range(1, s[x.t - 1] + 1)]

    if _is_max_torus(s):
        for x in tau.plus:
            a = P[f"a_{x.j}"]
            rows[0][x.j - 1], rows[1][x.j - 1] = a, a * P[f"eta_{x.j}"]
        for x in tau.minus:
            a = P[f"a_{x.j}"]
            rows[0][x.j - 1], rows[1][x.j - 1] = a * P[f"xi_{x.j}"], a
        return Matrix2xN(rows)

    if tau.klass == "I":
        for i, k in block_cols(tau.j1):
            if i != tau.j1.j:
                rows[0][i - 1], rows[1][i - 1] = P[f"y_{k}"], P[f"u_{k}"]
        for i, k in block_cols(tau.j2):
            if i != tau.j2.j:
                rows[0][i - 1], rows[1][i - 1] = P[f"v_{k}"], P[f"z_{k}"]
    else:
        for i, k in block_cols(tau.j1):
            if i not in (tau.j1.j, tau.j2.j):
                rows[0][i - 1], rows[1][i - 1] = P[f"w_1{k}"], P[f"w_2{k}"]
    for al, x in enumerate(tau.plus, start=1):
        a = P[f"a_{x.j}"]
        for i, k in block_cols(x):
            rows[0][i - 1] = a if i == x.j else a * P[f"eta{al}_1{k}"]
            rows[1][i - 1] = a * P[f"eta{al}_2{k}"]
    for be, x in enumerate(tau.minus, start=1):
        a = P[f"a_{x.j}"]
        for i, k in block_cols(x):
            rows[0][i - 1] = a * P[f"xi{be}_1{k}"]
            rows[1][i - 1] = a if i == x.j else a * P[f"xi{be}_2{k}"]
    return Matrix2xN(rows)


def sigma_lambda_max(lam: Sequence[int], params: Mapping) -> dict:
    """Substitute eta_j by a product of the first lam(j-2) epsilon^+ parameters.

    params carries a_3..a_N and epsP_1..epsP_{N-2}; the result is a parameter
    assignment for gamma_tau at tau = (1, 2, (3..N), ()).
    """
    lam = tuple(lam)
    k = len(lam)
    if sorted(lam) != list(range(1, k + 1)):
        raise ValueError(f"{lam} is not a permutation of 1..{k}")
    out = {}
    for j in range(3, k + 3):
        out[f"a_{j}"] = params[f"a_{j}"]
        val = 1
        for g in range(1, lam[j - 3] + 1):
            val = val * params[f"epsP_{g}"]
        out[f"eta_{j}"] = val
    return out


# ---------------------------------------------------------------- extension check


def _std_extension(l: int, m: int, t: int, i: int, verbatim: bool):
    """Extended F_t coordinate at the pair {t, i} for tau = (1, 2, (3..l+2), (l+3..N)).

    Returns a function of (a, eta, xi) dicts keyed by standard positions.
    """
    N = l + m + 2
    plus = set(range(3, l + 3))
    if t == 1:
        if i == 2:
            return lambda a, e, x: 1
        return (lambda a, e, x: a[i] * e[i]) if i in plus else (lambda a, e, x: a[i])
    if t == 2:
        if i == 1:
            return lambda a, e, x: 1
        return (lambda a, e, x: -a[i]) if i in plus else (lambda a, e, x: -a[i] * x[i])
    if t in plus:
        if i == 1:
            return lambda a, e, x: -e[t]
        if i == 2:
            return lambda a, e, x: 1
        if i in plus:
            if i < t:
                return lambda a, e, x: -a[i] * (e[t] - e[i])
            return lambda a, e, x: -a[i] * (e[i] - e[t])
        return lambda a, e, x: -a[i] * (1 - e[t] * x[i])
    if i == 1:
        return lambda a, e, x: 1
    if i == 2:
        return lambda a, e, x: -x[t]
    if i in plus:
        return lambda a, e, x: a[i] * (1 - e[i] * x[t])
    if i < t:
        if verbatim and l == 0 and i == t - 1:
            # the printed entry a_{t-1}(xi_{t-1} - xi_{t-1})
            return lambda a, e, x: a[i] * (x[i] - x[i])
        return lambda a, e, x: a[i] * (x[i] - x[t])
    return lambda a, e, x: a[i] * (x[t] - x[i])


def extended_Ft(tau: ChartIndex, t_col: int, assign: Mapping, verbatim: bool = False) -> ProjectivePoint:
    """The closed-form extension of F_t o e o Gamma^tau on the all-ones size vector."""
    j1, j2, pl, mi = tau.columns
    l, m = len(pl), len(mi)
    N = l + m + 2
    # standard position -> actual column
    pi = {1: j1, 2: j2}
    pi.update({3 + k: c for k, c in enumerate(pl)})
    pi.update({3 + l + k: c for k, c in enumerate(mi)})
    inv = {c: k for k, c in pi.items()}
    a, e, x = {}, {}, {}
    for k, c in pi.items():
        if k >= 3:
            a[k] = Fraction(assign[f"a_{c}"])
            if k < 3 + l:
                e[k] = Fraction(assign[f"eta_{c}"])
            else:
                x[k] = Fraction(assign[f"xi_{c}"])
    ts = inv[t_col]
    s = as_size_vector((1,) * N)
    labels = tuple(pairs_meeting_block(s, t_col))
    coords = []
    for p in labels:
        other = p[1] if p[0] == t_col else p[0]
        i = inv[other]
        val = Fraction(_std_extension(l, m, ts, i, verbatim)(a, e, x))
        # minors of the standard matrix are indexed by (min, max) of standard positions
        lo, hi = sorted((ts, i))
        if (pi[lo] < pi[hi]) is False:
            val = -val
        coords.append(val)
    return ProjectivePoint(labels, tuple(coords))


@dataclass
class ExtensionReport:
    ok: bool
    checked: int = 0
    vacuous: int = 0
    failures: list = field(default_factory=list)


def lemma_em_extension_check(s, tau: ChartIndex, t, assign: Mapping, verbatim: bool = False) -> ExtensionReport:
    """Compare the closed-form extension with the directly computed F_t at one point.

    t may be a single block index or None for every block.
    """
    s = as_size_vector(s)
    if not _is_max_torus(s):
        raise ValueError("the extension formulas are stated for the all-ones size vector")
    theta = gamma_tau(s, tau, {k: as_ratfunc(Fraction(v)) for k, v in assign.items()
                               if k in set(gamma_tau_variables(s, tau))})
    vals = [[c.evaluate({}) for c in row] for row in theta.rows]
    mins = numeric_minors(vals)
    rep = ExtensionReport(ok=True)
    ts = range(1, s.N + 1) if t is None else [t]
    for tc in ts:
        try:
            ext = extended_Ft(tau, tc, assign, verbatim)
        except Indeterminate:
            rep.ok = False
            rep.failures.append({"t": tc, "reason": "extension vanishes identically"})
            continue
        rep.checked += 1
        try:
            direct = map_Ft(s, tc, mins)
        except Indeterminate:
            rep.vacuous += 1
            continue
        if direct != ext:
            rep.ok = False
            rep.failures.append({"t": tc, "direct": [str(c) for c in direct.coords],
                                 "extension": [str(c) for c in ext.coords]})
    return rep


def sample_extension_point(s, tau: ChartIndex, rng) -> dict:
    """Random Gamma^tau parameters on the all-ones size vector.

    The a's are nonzero; eta and xi come from a small pool so that zeros and
    coincidences (the loci where the direct map is indeterminate) show up often.
    """
    pool = [Fraction(k) for k in (-2, -1, 0, 0, 1, 2)] + [Fraction(1, 2), Fraction(-3, 2)]
    out = {}
    for name in gamma_tau_variables(s, tau):
        if name.startswith("a_"):
            out[name] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
        else:
            out[name] = rng.choice(pool)
    return out


# ---------------------------------------------------------------- chart catalog


@dataclass
class ChartSpec:
    name: str
    family: str
    sizes: tuple
    variables: tuple
    inverted: tuple
    theta: Matrix2xN
    pivots: tuple

    @property
    def n(self) -> int:
        return self.theta.n

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "shape": list(self.sizes),
            "variables": list(self.variables),
            "inverted": [str(p) for p in self.inverted],
            "theta": [[str(x) for x in row] for row in self.theta.rows],
        }

    def __str__(self):
        return f"{self.name} s={self.sizes}"


@lru_cache(maxsize=None)
def _load(name: str) -> dict:
    text = resources.files("grasscut").joinpath("data").joinpath(name).read_text(encoding="utf-8")
    return json.loads(text)


def catalog_data() -> dict:
    return _load("charts.json")


def _size_env(sizes: Sequence[int]) -> dict:
    return {f"s{k}": v for k, v in enumerate(sizes, start=1)}


def eval_index_expr(expr: str, sizes: Sequence[int]) -> int:
    """Evaluate a column expression such as '2+s1+s2' for concrete sizes."""
    env = _size_env(sizes)
    total = 0
    for part in str(expr).replace(" ", "").split("+"):
        total += env[part] if part in env else int(part)
    return total


def family_of(sizes: Sequence[int]) -> str:
    sizes = tuple(sizes)
    if len(sizes) != 4:
        raise UnsupportedShape(f"the catalog covers N = 4 only, got {sizes}")
    for fam, fd in catalog_data()["families"].items():
        ok = True
        for pat, x, lo in zip(fd["shape"], sizes, fd["min_sizes"]):
            if pat == "1" and x != 1:
                ok = False
            if pat != "1" and x < lo:
                ok = False
        if ok:
            return fam
    raise UnsupportedShape(
        f"{sizes} is not one of (1,1,1,s4), (1,1,s3,s4), (1,s2,s3,s4), (s1,s2,s3,s4) "
        "with the free entries >= 2; permute blocks first"
    )


def minimal_sizes(family: str) -> tuple:
    return tuple(catalog_data()["families"][family]["min_sizes"])


def _expand_variables(items: Sequence[str], sizes: Sequence[int], groups: Mapping) -> list[str]:
    out = []
    for it in items:
        if it.startswith("$"):
            out += _expand_variables(groups[it[1:]], sizes, groups)
        elif "@" in it:
            name, rest = it.split("@")
            blk, start = (int(x) for x in rest.split(":"))
            out += [name.replace("{p}", str(p)) for p in range(start, sizes[blk - 1] + 1)]
        else:
            out.append(it)
    return out


def _block_columns(tmpl: Mapping, size: int) -> list[tuple]:
    cols = [tuple(tmpl["first"])]
    if size >= 2:
        if "second" not in tmpl:
            raise CatalogError("a singleton block template was given size >= 2")
        cols.append(tuple(tmpl["second"]))
    for p in range(3, size + 1):
        cols.append(tuple(e.replace("{p}", str(p)) for e in tmpl["rest"]))
    return cols


@lru_cache(maxsize=4096)
def _parse_cached(text: str) -> RatFunc:
    return parse_ratfunc(text)


def _build_chart(rec: Mapping, sizes: tuple, data: Mapping) -> ChartSpec:
    fam = rec["family"]
    cols = []
    for blk, size in zip(rec["blocks"], sizes):
        cols += _block_columns(data["blocks"][blk], size)
    theta = Matrix2xN([[_parse_cached(c[0]) for c in cols], [_parse_cached(c[1]) for c in cols]])
    variables = tuple(_expand_variables(rec["variables"], sizes, data["variable_groups"]))
    inverted = tuple(parse_poly(x) for x in rec["inverted"])
    piv = tuple(eval_index_expr(x, sizes) for x in data["families"][fam]["pivots"])
    return ChartSpec(rec["name"], fam, sizes, variables, inverted, theta, piv)


def split_by_inverted(p: IntPoly, inverted: Sequence[IntPoly]):
    """Divide out inverted elements and monomial content; return (remainder, factors used)."""
    used = []
    mc = p.monomial_content()
    if mc:
        p = divide_exact(p, IntPoly({mc: 1}))
        used.append(("monomial", mc))
    changed = True
    while changed and not p.is_constant():
        changed = False
        for q in inverted:
            if q.is_constant():
                continue
            r = divide_exact(p, q)
            if r is not None:
                p = r
                used.append(("inverted", str(q)))
                changed = True
                break
    return p, used


@lru_cache(maxsize=None)
def _unit_factors(inverted: tuple) -> frozenset:
    out = set()
    for q in inverted:
        out.update(irreducible_factors(q))
    return frozenset(out)


def is_unit_poly(p: IntPoly, inverted: Sequence[IntPoly], allow_monomials: bool = True) -> bool:
    """True iff every irreducible factor of p divides some inverted element.

    With allow_monomials, bare variables count as units too.
    """
    if p.is_zero():
        return False
    units = _unit_factors(tuple(inverted))
    for f in irreducible_factors(p):
        if f in units:
            continue
        if allow_monomials and len(f.terms) == 1:
            continue
        return False
    return True


def validate_chart(c: ChartSpec) -> list[str]:
    """Data checks run at load: pivots, variable set, denominators."""
    problems = []
    j1, j2 = c.pivots
    if not (c.theta.column(j1) == (RatFunc(1), RatFunc(0)) and c.theta.column(j2) == (RatFunc(0), RatFunc(1))):
        problems.append(f"columns {j1},{j2} are not the standard pivot columns")
    used = set()
    for row in c.theta.rows:
        for x in row:
            used |= set(x.variables)
    for q in c.inverted:
        used |= set(q.variables)
    declared = set(c.variables)
    if len(declared) != len(c.variables):
        problems.append("duplicate variable names")
    if used - declared:
        problems.append(f"undeclared variables {sorted(used - declared)}")
    if declared - used:
        problems.append(f"unused variables {sorted(declared - used)}")
    for row in c.theta.rows:
        for x in row:
            if not x.is_poly() and not is_unit_poly(x.den, c.inverted, allow_monomials=False):
                problems.append(f"denominator {x.den} is not a product of inverted elements")
    return problems


@lru_cache(maxsize=64)
def _catalog(sizes: tuple) -> tuple:
    fam = family_of(sizes)
    data = catalog_data()
    out = []
    for rec in data["charts"]:
        if rec["family"] != fam:
            continue
        c = _build_chart(rec, sizes, data)
        problems = validate_chart(c)
        if problems:
            raise CatalogError(f"{c.name}: " + "; ".join(problems))
        out.append(c)
    return tuple(out)


def chart_catalog(shape=None, sizes: Sequence[int] | None = None) -> list[ChartSpec]:
    """Every chart for a shape family ('X', 'Y', 'Z', 'W') or a concrete size vector."""
    if sizes is None and shape is not None and not isinstance(shape, str):
        sizes, shape = shape, None
    if sizes is None:
        if shape not in catalog_data()["families"]:
            raise UnsupportedShape(f"unknown family {shape!r}")
        sizes = minimal_sizes(shape)
    sizes = tuple(int(x) for x in sizes)
    fam = family_of(sizes)
    if shape is not None and shape != fam:
        raise UnsupportedShape(f"sizes {sizes} belong to family {fam}, not {shape}")
    return list(_catalog(sizes))


def get_chart(name: str, sizes: Sequence[int] | None = None) -> ChartSpec:
    fam = name.split("_")[0]
    if sizes is None:
        sizes = minimal_sizes(fam)
    for c in chart_catalog(fam, sizes):
        if c.name == name:
            return c
    raise KeyError(f"no chart named {name}")


def all_chart_names() -> list[str]:
    return [rec["name"] for rec in catalog_data()["charts"]]


def chart_domain_check(c: ChartSpec, assign: Mapping) -> bool:
    missing = [v for v in c.variables if v not in assign]
    if missing:
        raise MissingVariable(missing[0])
    return all(q.evaluate(assign) != 0 for q in c.inverted)


def vanishing_inverted(c: ChartSpec, assign: Mapping) -> list[str]:
    return [str(q) for q in c.inverted if q.evaluate(assign) == 0]


def chart_theta_values(c: ChartSpec, assign: Mapping) -> list[list[Fraction]]:
    return [[x.evaluate(assign) for x in row] for row in c.theta.rows]


def permute_chart(c: ChartSpec, block_perm: Sequence[int], column_perms: Mapping[int, Sequence[int]] | None = None) -> ChartSpec:
    """Reorder blocks (new block k is old block block_perm[k-1]) and columns within blocks."""
    column_perms = column_perms or {}
    old_blocks = blocks(c.sizes)
    order = []
    for b in block_perm:
        cols = list(old_blocks[b - 1])
        perm = column_perms.get(b)
        if perm is not None:
            cols = [cols[k - 1] for k in perm]
        order += cols
    if sorted(order) != list(range(1, c.n + 1)):
        raise ValueError("not a permutation of the columns")
    newpos = {old: k for k, old in enumerate(order, start=1)}
    sizes = tuple(c.sizes[b - 1] for b in block_perm)
    piv = tuple(sorted(newpos[j] for j in c.pivots))
    tag = "".join(map(str, block_perm))
    return ChartSpec(f"{c.name}^{tag}", c.family, sizes, c.variables, c.inverted,
                     c.theta.permute_columns(order), piv)
