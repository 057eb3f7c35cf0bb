"""Splittings, twisted Plücker relations and the torus-equivariant chart embeddings f_i."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import sympy

from .charts import (
    ChartSpec,
    _load,
    chart_domain_check,
    eval_index_expr,
    family_of,
    get_chart,
    is_unit_poly,
    minimal_sizes,
    split_by_inverted,
    vanishing_inverted,
)
from .combinatorics import all_pairs, as_size_vector, enumerate_Vs, pair_type
from .exact_algebra import RatFunc, cancel, parse_ratfunc
from .grassmannian import check_plucker_relations, plucker_minor, plucker_relation_residues
from .polyhedral import (
    _matrix,
    exponent_to_str,
    greedy_affine_basis,
    label_to_point,
    perp_lattice_Mprime,
    point_label,
    priority_order,
    str_to_exponent,
)


class ZeroLambda(ValueError):
    pass


class OffDomain(ValueError):
    pass


class ZeroRepresentative(ValueError):
    pass


class OffTorus(ValueError):
    pass


class NoCommonSample(RuntimeError):
    pass


# ---------------------------------------------------------------- splittings


@dataclass
class Splitting:
    """b: V^s -> Laurent monomials in lambda_1..lambda_r, stored as exponent rows."""

    s: tuple
    exps: dict  # point -> tuple of r ints
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def rank(self) -> int:
        return len(next(iter(self.exps.values())))

    def value(self, lam: Sequence) -> dict:
        lam = [Fraction(x) for x in lam]
        if any(x == 0 for x in lam):
            raise ZeroLambda("every lambda must be nonzero")
        out = {}
        for p, e in self.exps.items():
            v = Fraction(1)
            for x, k in zip(lam, e):
                v *= x ** k
            out[p] = v
        return out

    def section_matrix(self) -> list[list[int]]:
        """Entry (i, j): exponent of lambda_i in chi^{K_j}(b(lambda)), K the M' basis."""
        V = enumerate_Vs(self.s)
        K = perp_lattice_Mprime(self.s)
        return [[sum(K[j][a] * self.exps[p][i] for a, p in enumerate(V)) for j in range(len(K))]
                for i in range(self.rank)]

    def is_section(self) -> bool:
        M = self.section_matrix()
        if not M:
            return True
        return len(M) == len(M[0]) and abs(_matrix(M).det()) == 1

    def dual_characters(self) -> list[tuple]:
        """m_i in M' with chi^{m_i}(b(lambda)) = lambda_i."""
        if "dual" not in self._memo:
            self._memo["dual"] = self._dual_characters()
        return list(self._memo["dual"])

    def _dual_characters(self) -> list[tuple]:
        V = enumerate_Vs(self.s)
        K = perp_lattice_Mprime(self.s)
        M = _matrix(self.section_matrix())
        if M.shape[0] != M.shape[1] or abs(M.det()) != 1:
            raise ValueError("b is not a section of the quotient torus")
        inv = M.inv()
        out = []
        for i in range(self.rank):
            a = [int(inv[j, i]) for j in range(len(K))]
            out.append(tuple(sum(a[j] * K[j][k] for j in range(len(K))) for k in range(len(V))))
        return out


def splitting_n4_standard(s=(1, 1, 1, 2)) -> Splitting:
    """x12, x13, x23, x34 -> 1; x14 -> l2^-1; x24 -> l1^-1 l2^-1; x44 -> l3 l2^-1."""
    s = as_size_vector(s)
    if s.N != 4 or s.entries[:3] != (1, 1, 1) or s[3] < 2:
        raise ValueError("the standard splitting is defined for (1,1,1,s4) with s4 >= 2")
    table = {"12": (0, 0, 0), "13": (0, 0, 0), "23": (0, 0, 0), "34": (0, 0, 0),
             "14": (0, -1, 0), "24": (-1, -1, 0), "44": (0, -1, 1)}
    return Splitting(s.entries, {label_to_point(k, 4): v for k, v in table.items()})


def splitting_general(s) -> Splitting:
    """Greedy affine basis points go to 1; the k-th remaining point goes to lambda_k."""
    s = as_size_vector(s)
    V = enumerate_Vs(s)
    B = set(greedy_affine_basis(V))
    rest = [p for p in priority_order(V) if p not in B]
    exps = {}
    for p in V:
        exps[p] = tuple(int(p == q) for q in rest)
    sp = Splitting(s.entries, exps)
    sp.dual_characters()  # raises unless b is a section
    return sp


def default_splitting(s) -> Splitting:
    return _default_splitting(as_size_vector(s).entries)


@lru_cache(maxsize=None)
def _default_splitting(s: tuple) -> Splitting:
    s = as_size_vector(s)
    if s.N == 4 and s.entries[:3] == (1, 1, 1) and s[3] >= 2:
        return splitting_n4_standard(s)
    return splitting_general(s)


def _by_point(s, m: Mapping) -> dict:
    N = as_size_vector(s).N
    return {(label_to_point(k, N) if isinstance(k, str) else tuple(k)): v for k, v in m.items()}


def twist_relations_check(s, b: Splitting, lam: Sequence, z: Mapping) -> bool:
    """Scale z_(i,j) by b(lambda) at its type and test every 3-term Plücker relation."""
    scale = b.value(lam)
    w = {p: Fraction(x) * scale[pair_type(s, p)] for p, x in z.items()}
    return check_plucker_relations(w)


# ---------------------------------------------------------------- embedding specs


@dataclass
class EmbeddingSpec:
    chart: ChartSpec
    reps: dict  # point -> pair
    target: str
    generators: list  # exponent vectors in V^s order
    generator_names: list
    displayed: dict | None = None
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def s(self) -> tuple:
        return self.chart.sizes

    def g(self) -> dict:
        if "g" not in self._memo:
            self._memo["g"] = _g_table(self)
        return dict(self._memo["g"])

    def with_reps(self, overrides: Mapping) -> "EmbeddingSpec":
        reps = dict(self.reps)
        reps.update(_by_point(self.s, overrides))
        return EmbeddingSpec(self.chart, reps, self.target, self.generators, self.generator_names, self.displayed)


def _g_table(E: EmbeddingSpec) -> dict:
    return {v: plucker_minor(E.chart.theta, p) for v, p in E.reps.items()}


def embedding_data() -> dict:
    return _load("embeddings.json")


def load_embedding(name: str, sizes: Sequence[int] | None = None) -> EmbeddingSpec:
    data = embedding_data()
    fam = name.split("_")[0]
    if sizes is None:
        sizes = minimal_sizes(fam)
    sizes = tuple(sizes)
    if family_of(sizes) != fam:
        raise ValueError(f"{name} does not live on sizes {sizes}")
    chart = get_chart(name, sizes)
    rec = data["charts"][name]
    famd = data["families"][fam]
    reps_raw = dict(famd["default_reps"])
    reps_raw.update(rec.get("reps", {}))
    reps = {}
    for lab, (a, b) in reps_raw.items():
        reps[label_to_point(lab, 4)] = (eval_index_expr(a, sizes), eval_index_expr(b, sizes))
    gens = famd["targets"][rec["target"]]
    return EmbeddingSpec(chart, reps, rec["target"], [str_to_exponent(sizes, g) for g in gens], list(gens),
                         data["displayed"].get(name))


def validate_reps(E: EmbeddingSpec) -> list[str]:
    problems = []
    V = set(enumerate_Vs(E.s))
    if set(E.reps) != V:
        problems.append("representatives do not cover V^s exactly")
    for v, p in E.reps.items():
        if pair_type(E.s, p) != v:
            problems.append(f"pair {p} has type {point_label(pair_type(E.s, p))}, not {point_label(v)}")
    return problems


@dataclass
class OmegaPoint:
    a_coords: dict
    z_coords: dict


def _eval(x: RatFunc, params: Mapping) -> Fraction:
    return x.evaluate(params)


def embedding_image(E: EmbeddingSpec, params: Mapping, xvals: Mapping) -> OmegaPoint:
    if not chart_domain_check(E.chart, params):
        raise OffDomain("vanishing inverted element: " + ", ".join(vanishing_inverted(E.chart, params)))
    x = {k: Fraction(v) for k, v in _by_point(E.s, xvals).items()}
    g = {v: _eval(q, params) for v, q in E.g().items()}
    zero = [point_label(v) for v, val in g.items() if val == 0]
    if zero:
        raise ZeroRepresentative(f"g vanishes at types {zero}")
    if any(x[v] == 0 for v in g):
        raise ZeroRepresentative("x values must be nonzero")
    z = {}
    for p in all_pairs(E.chart.n):
        v = pair_type(E.s, p)
        z[p] = plucker_minor(E.chart.theta, p).evaluate(params) / g[v] * x[v]
    V = enumerate_Vs(E.s)
    a = {}
    for name, m in zip(E.generator_names, E.generators):
        val = Fraction(1)
        for v, e in zip(V, m):
            val *= (g[v] / x[v]) ** e
        a[name] = val
    return OmegaPoint(a, z)


def lambda_of_image(s, b: Splitting, pt: OmegaPoint, E: EmbeddingSpec, params: Mapping, xvals: Mapping) -> tuple:
    """lambda_i = chi^{m_i} evaluated at the per-type scalars g_v / x_v."""
    x = {k: Fraction(v) for k, v in _by_point(s, xvals).items()}
    g = {v: _eval(q, params) for v, q in E.g().items()}
    if any(val == 0 for val in list(g.values()) + list(x.values())):
        raise OffTorus("a type scalar vanishes")
    V = enumerate_Vs(s)
    out = []
    for m in b.dual_characters():
        val = Fraction(1)
        for v, e in zip(V, m):
            val *= (g[v] / x[v]) ** e
        out.append(val)
    return tuple(out)


# ---------------------------------------------------------------- verification


def _sample_rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        q = Fraction(rng.randint(-20, 20), rng.randint(1, 20))
        if q != 0 or not nonzero:
            return q


def sample_point(E: EmbeddingSpec, rng: random.Random, attempts: int = 200):
    """In-domain params with every g_v nonzero, plus nonzero x values."""
    for _ in range(attempts):
        params = {v: _sample_rational(rng) for v in E.chart.variables}
        if not chart_domain_check(E.chart, params):
            continue
        if any(_eval(q, params) == 0 for q in E.g().values()):
            continue
        xvals = {v: _sample_rational(rng, nonzero=True) for v in enumerate_Vs(E.s)}
        return params, xvals
    raise NoCommonSample(f"no admissible sample for {E.chart.name}")


def _instantiate(template: str, env: Mapping[str, int]) -> str:
    out = template
    for k, v in env.items():
        out = out.replace("{" + k + "}", str(v))
    return out


def displayed_formula_checks(E: EmbeddingSpec) -> list[dict]:
    """Compare each displayed closed form with the computed one; one record per formula instance."""
    if not E.displayed:
        return []
    V = enumerate_Vs(E.s)
    g = E.g()
    out = []
    for name, expr in E.displayed.get("generators", {}).items():
        m = str_to_exponent(E.s, name)
        val = RatFunc(1)
        for v, e in zip(V, m):
            val = val * g[v] ** e
        want = parse_ratfunc(expr)
        out.append({"kind": "generator", "what": name, "displayed": expr, "computed": str(cancel(val)), "ok": val == want})
    n = E.chart.n
    for rec in E.displayed.get("ratios", []):
        a, b = rec["pair"]
        lo = rec.get("min", 1)
        if a.isdigit() and b.isdigit():
            insts = [((int(a), int(b)), {})]
        elif a.isdigit():
            insts = [((int(a), i), {"i3": i - 3}) for i in range(max(lo, int(a) + 1), n + 1)]
        else:
            insts = [((i1, i2), {"i13": i1 - 3, "i23": i2 - 3})
                     for i1 in range(lo, n + 1) for i2 in range(i1 + 1, n + 1)]
        for p, env in insts:
            if p[1] > n:
                continue
            expr = _instantiate(rec["value"], env)
            v = pair_type(E.s, p)
            val = plucker_minor(E.chart.theta, p) / g[v]
            want = parse_ratfunc(expr)
            out.append({"kind": "ratio", "what": f"z{p}", "displayed": expr, "computed": str(cancel(val)), "ok": val == want})
    return out


def unit_checks(E: EmbeddingSpec, strict: bool = False) -> list[dict]:
    out = []
    for v, q in sorted(E.g().items()):
        ok = q.den.is_constant() or is_unit_poly(q.den, E.chart.inverted, allow_monomials=not strict)
        ok = ok and is_unit_poly(q.num, E.chart.inverted, allow_monomials=not strict)
        out.append({"type": point_label(v), "pair": list(E.reps[v]), "g": str(q), "ok": ok})
    return out


def generator_regularity(E: EmbeddingSpec) -> list[dict]:
    """Whether each target generator's chart part is regular on the chart."""
    V = enumerate_Vs(E.s)
    g = E.g()
    out = []
    for name, m in zip(E.generator_names, E.generators):
        val = RatFunc(1)
        for v, e in zip(V, m):
            val = val * g[v] ** e
        val = cancel(val)
        ok = val.den.is_constant() or is_unit_poly(val.den, E.chart.inverted, allow_monomials=False)
        out.append({"generator": name, "value": str(val), "ok": ok})
    return out


def ratio_regularity(E: EmbeddingSpec) -> list[dict]:
    """Whether every z-ratio P_(i,j) / g_type is regular on the chart."""
    g = E.g()
    out = []
    for p in all_pairs(E.chart.n):
        val = cancel(plucker_minor(E.chart.theta, p) / g[pair_type(E.s, p)])
        ok = val.den.is_constant() or is_unit_poly(val.den, E.chart.inverted, allow_monomials=False)
        if not ok:
            out.append({"pair": list(p), "value": str(val), "ok": False})
    return out


def regularity_report(E: EmbeddingSpec) -> dict:
    gens = [r for r in generator_regularity(E) if not r["ok"]]
    ratios = ratio_regularity(E)
    return {"ok": not gens and not ratios, "generators": gens, "ratios": ratios}


def verify_embedding(E: EmbeddingSpec, trials: int = 50, seed: int = 0, b: Splitting | None = None) -> dict:
    name = E.chart.name
    failures = []
    clauses = {}

    units = unit_checks(E)
    bad_units = [u for u in units if not u["ok"]]
    clauses["units"] = "FAIL" if bad_units else "PASS"
    failures += [{"clause": "units", **u} for u in bad_units]

    forms = displayed_formula_checks(E)
    if not forms:
        clauses["formulas"] = "SKIP"
    else:
        bad = [f for f in forms if not f["ok"]]
        clauses["formulas"] = "FAIL" if bad else "PASS"
        failures += [{"clause": "formulas", **f} for f in bad]

    b = b or default_splitting(E.s)
    twist_ok, minor_ok = True, True
    reps_ok = not validate_reps(E)
    for t in range(trials):
        rng = random.Random(f"{seed}:{name}:{t}")
        params, xvals = sample_point(E, rng)
        pt = embedding_image(E, params, xvals)
        lam = lambda_of_image(E.s, b, pt, E, params, xvals)
        if not twist_relations_check(E.s, b, lam, pt.z_coords):
            if twist_ok:
                failures.append({"clause": "twist", "trial": t})
            twist_ok = False
        g = {v: _eval(q, params) for v, q in E.g().items()}
        x = {k: Fraction(v) for k, v in xvals.items()}
        good = reps_ok and all(pt.z_coords[p] == x[v] for v, p in E.reps.items())
        good = good and all(
            pt.z_coords[p] * g[pair_type(E.s, p)] / x[pair_type(E.s, p)] == plucker_minor(E.chart.theta, p).evaluate(params)
            for p in pt.z_coords
        )
        if not good:
            if minor_ok:
                failures.append({"clause": "scaled_minor", "trial": t})
            minor_ok = False
    clauses["twist"] = "PASS" if twist_ok else "FAIL"
    clauses["scaled_minor"] = "PASS" if minor_ok else "FAIL"
    return {
        "chart": name,
        "target": E.target,
        "shape": list(E.s),
        "clauses": clauses,
        "trials": trials,
        "seed": seed,
        "ok": all(v != "FAIL" for v in clauses.values()),
        "regular": regularity_report(E)["ok"],
        "failures": failures,
    }


# ---------------------------------------------------------------- overlaps and faces


def _solve_params(c: ChartSpec, values: Sequence[Sequence[Fraction]]):
    """Rational parameters reproducing a numeric matrix on chart c, or None."""
    syms = {v: sympy.Symbol(v) for v in c.variables}
    eqs = []
    for row, vrow in zip(c.theta.rows, values):
        for x, want in zip(row, vrow):
            num = sympy.sympify(str(x.num).replace("^", "**"), locals=syms)
            den = sympy.sympify(str(x.den).replace("^", "**"), locals=syms)
            eqs.append(sympy.expand(num - sympy.Rational(want.numerator, want.denominator) * den))
    eqs = [e for e in eqs if e != 0]
    if not eqs:
        return {v: Fraction(0) for v in c.variables}
    try:
        sols = sympy.solve(eqs, list(syms.values()), dict=True)
    except NotImplementedError:
        return None
    for sol in sols:
        if len(sol) < len(syms):
            free = [s for s in syms.values() if s not in sol]
            sol = {k: v.subs({f: 0 for f in free}) for k, v in sol.items()}
            sol.update({f: sympy.Integer(0) for f in free})
        if all(val.is_Rational for val in sol.values()):
            out = {str(k): Fraction(int(v.p), int(v.q)) for k, v in sol.items()}
            if chart_domain_check(c, out) and all(
                a == b for row, vrow in zip(c.theta.rows, values) for a, b in zip((x.evaluate(out) for x in row), vrow)
            ):
                return out
    return None


def overlap_ratio_check(E1: EmbeddingSpec, E2: EmbeddingSpec, trials: int = 10, seed: int = 0,
                        attempts: int = 200) -> bool:
    """Points of the first chart that also lie on the second give identical Plücker ratios."""
    c1, c2 = E1.chart, E2.chart
    if c1.sizes != c2.sizes:
        raise ValueError("charts live on different size vectors")
    found = 0
    for t in range(attempts):
        rng = random.Random(f"{seed}:{c1.name}:{c2.name}:{t}")
        params1 = {v: _sample_rational(rng) for v in c1.variables}
        if not chart_domain_check(c1, params1):
            continue
        M = [[x.evaluate(params1) for x in row] for row in c1.theta.rows]
        params2 = _solve_params(c2, M)
        if params2 is None:
            continue
        P1 = {p: plucker_minor(c1.theta, p).evaluate(params1) for p in all_pairs(c1.n)}
        P2 = {p: plucker_minor(c2.theta, p).evaluate(params2) for p in all_pairs(c2.n)}
        nz = [p for p in P1 if P1[p] != 0]
        if not nz:
            continue
        ref = nz[0]
        if P2[ref] == 0:
            return False
        for p in P1:
            if P1[p] * P2[ref] != P2[p] * P1[ref]:
                return False
        found += 1
        if found >= trials:
            return True
    if found == 0:
        raise NoCommonSample(f"no common point of {c1.name} and {c2.name} in {attempts} attempts")
    return True


def face_restrict_point(s, quadruple: Sequence[int], z: Mapping) -> dict:
    """Keep the coordinates whose type is supported on the given blocks."""
    keep = set(quadruple)
    out = {}
    for p, val in z.items():
        v = pair_type(s, p)
        if all(x == 0 or t in keep for t, x in enumerate(v, start=1)):
            out[p] = val
    return out
