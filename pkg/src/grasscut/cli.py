"""grasscut command line: enumerate, fan, verify, chart-eval.

Exit codes: 0 success, 1 a verification FAIL, 2 bad arguments,
3 enumeration too large, 4 unknown paving id, 5 chart point off its domain.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .combinatorics import (
    InvalidSizeVector,
    SizeVector,
    enumerate_Vs,
    essential_weights,
    monomials_Gw,
    monomials_Gw_bruteforce,
    parse_size_vector,
    size_vector_sweep,
    torus_weight,
)
from .exact_algebra import MissingVariable, RatFunc
from .grassmannian import Indeterminate, check_plucker_relations, map_Fw, map_Ks_partial, numeric_minors, plucker_minors

EXIT_OK, EXIT_FAIL, EXIT_ARGS, EXIT_TOO_LARGE, EXIT_UNKNOWN_PAVING, EXIT_OFF_DOMAIN = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    size_vector: SizeVector | None
    seed: int = 0
    trials: int = 50
    output_path: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("--trials must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("--seed must be a 64-bit unsigned integer")

    def need_s(self) -> SizeVector:
        if self.size_vector is None:
            raise UsageError("--s is required")
        return self.size_vector


# ---------------------------------------------------------------- JSON encoding


def rational(x) -> dict:
    x = Fraction(x)
    return {"n": str(x.numerator), "d": str(x.denominator)}


def parse_rational(obj) -> Fraction:
    if isinstance(obj, dict):
        return Fraction(int(obj["n"]), int(obj["d"]))
    if isinstance(obj, bool) or isinstance(obj, float):
        raise ValueError(f"not an exact rational: {obj!r}")
    return Fraction(obj)


def _pair(p) -> str:
    return f"{p[0]},{p[1]}"


def _monomial(m) -> list:
    return [list(p) for p in m]


def _jsonable(x):
    if isinstance(x, Fraction):
        return rational(x)
    if isinstance(x, RatFunc):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if set(obj) == {"n", "d"}:
            return obj["n"] if obj["d"] == "1" else f"{obj['n']}/{obj['d']}"
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and not (isinstance(v, dict) and set(v) == {"n", "d"}) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_text(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        if _flat(obj):
            return "[" + ", ".join(_text(v) for v in obj) + "]"
        return "\n".join(f"{pad}- " + _text(v, indent + 1).lstrip() for v in obj)
    return str(obj)


def _flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) or (isinstance(x, dict) and set(x) == {"n", "d"}) or
                   (isinstance(x, list) and _flat(x)) for x in v)
    return False


def emit(cfg: RunConfig, payload: dict, report: bool = False) -> None:
    payload = _jsonable(payload)
    body = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if cfg.output_path:
        Path(cfg.output_path).write_text(body, encoding="utf-8")
        if report:
            # the file has the full report, stdout only the verdict lines
            for line in payload.get("summary", []):
                print(line)
            return
    if cfg.format == "json":
        sys.stdout.write(body)
    else:
        sys.stdout.write(_text(payload) + "\n")


# ---------------------------------------------------------------- enumerate


def cmd_enumerate(cfg: RunConfig, what: str, w: str | None = None) -> int:
    from .charts import enumerate_J_indices
    from .polyhedral import enumerate_paves, enumerate_pavings, pave_names, paving_names, point_label

    s = cfg.need_s()
    out = {"s": list(s), "what": what}
    if what == "vs":
        recs = [list(v) for v in enumerate_Vs(s)]
    elif what == "cs":
        recs = [list(w) for w in essential_weights(s)]
    elif what == "gw":
        if w is None:
            raise UsageError("gw needs --w")
        wv = tuple(_int_list(w))
        if len(wv) != s.N:
            raise UsageError(f"--w has {len(wv)} entries, expected {s.N}")
        out["w"] = list(wv)
        recs = [_monomial(m) for m in monomials_Gw(s, wv)]
    elif what == "paves":
        names = pave_names(s)
        recs = []
        for c in enumerate_paves(s):
            r = {"key": c.key, "points": c.labels}
            if c.key in names:
                r["name"] = names[c.key]
            recs.append(r)
    elif what == "pavings":
        names = paving_names(s)
        recs = []
        for P in enumerate_pavings(s):
            r = {"key": P.key, "cells": [c.labels for c in P.cells]}
            if P.key in names:
                r["name"] = names[P.key]
            recs.append(r)
    elif what == "jindices":
        recs = [{"j1": t.j1.j, "j2": t.j2.j, "plus": [x.j for x in t.plus], "minus": [x.j for x in t.minus],
                 "class": t.klass} for t in sorted(enumerate_J_indices(s), key=lambda t: t.columns)]
    else:
        raise UsageError(f"unknown set {what!r}")
    out["count"] = len(recs)
    out["records"] = recs
    if what in ("vs", "paves", "pavings"):
        out["points"] = [point_label(v) for v in enumerate_Vs(s)]
    emit(cfg, out)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise UsageError(f"bad integer list {text!r}") from e


# ---------------------------------------------------------------- fan


def _cone_record(s, P, names) -> dict:
    from .polyhedral import cone_of_paving, dual_chart_generators, exponent_to_str

    cone = cone_of_paving(s, P)
    gens = dual_chart_generators(s, P)
    rec = {"paving": P.key}
    if P.key in names:
        rec["name"] = names[P.key]
    rec["rays"] = [list(r) for r in cone.ray_generators]
    rec["lineality"] = [list(r) for r in cone.lineality_basis]
    rec["generators"] = [list(g) for g in gens]
    rec["generator_names"] = [exponent_to_str(s, g) for g in gens]
    return rec


def cmd_fan(cfg: RunConfig, paving: str | None, all_: bool) -> int:
    from .polyhedral import enumerate_pavings, paving_by_id, paving_names, point_label

    s = cfg.need_s()
    if s.N > 4:
        raise _too_large(s)
    if not all_ and paving is None:
        raise UsageError("fan needs --paving ID or --all")
    names = paving_names(s)
    if all_:
        pavs = enumerate_pavings(s)
    else:
        try:
            pavs = [paving_by_id(s, paving)]
        except KeyError:
            print(f"unknown paving id {paving!r}; known: {', '.join(sorted(names.values()))} or a paving key",
                  file=sys.stderr)
            return EXIT_UNKNOWN_PAVING
    out = {"s": list(s), "points": [point_label(v) for v in enumerate_Vs(s)],
           "cones": [_cone_record(s, P, names) for P in pavs]}
    emit(cfg, out)
    return EXIT_OK


def _too_large(s):
    from .polyhedral import TooLarge
    return TooLarge(f"N={s.N} exceeds the supported N <= 4")


# ---------------------------------------------------------------- verify


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GRASSCUT_THREADS", "1")))
    except ValueError:
        raise UsageError("GRASSCUT_THREADS must be an integer")


def _map(fn, items: list) -> list:
    """Ordered map, fanned out to processes when GRASSCUT_THREADS > 1."""
    k = _threads()
    if k == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))


def _chart_job(arg) -> dict:
    from .charts import get_chart, validate_chart

    name, sizes = arg
    c = get_chart(name, sizes)
    problems = validate_chart(c)
    plucker = check_plucker_relations(plucker_minors(c.theta))
    return {"chart": name, "ok": not problems and plucker, "plucker": plucker, "problems": problems}


def _embedding_job(arg) -> dict:
    from .lafforgue import load_embedding, verify_embedding

    name, sizes, trials, seed = arg
    r = verify_embedding(load_embedding(name, sizes), trials=trials, seed=seed)
    return {k: r[k] for k in ("chart", "target", "clauses", "ok", "regular", "failures")}


def _catalog_names(s: SizeVector) -> list[str]:
    from .charts import chart_catalog, family_of

    try:
        family_of(s.entries)
    except Exception as e:
        raise UsageError(str(e)) from e
    return [c.name for c in chart_catalog(sizes=s.entries)]


def suite_charts(cfg: RunConfig) -> list[dict]:
    s = cfg.need_s()
    return _map(_chart_job, [(n, s.entries) for n in _catalog_names(s)])


def suite_embeddings(cfg: RunConfig) -> list[dict]:
    s = cfg.need_s()
    return _map(_embedding_job, [(n, s.entries, cfg.trials, cfg.seed) for n in _catalog_names(s)])


def suite_lemma_em(cfg: RunConfig) -> list[dict]:
    from .charts import enumerate_J_indices, lemma_em_extension_check, sample_extension_point

    s = cfg.need_s()
    if any(x != 1 for x in s):
        raise UsageError("lemma-em runs on all-ones size vectors")
    out = []
    taus = sorted((t for t in enumerate_J_indices(s) if t.columns[:2] == (1, 2)), key=lambda t: t.columns)
    for tau in taus:
        fails, checked = [], 0
        for k in range(cfg.trials):
            rng = random.Random(f"{cfg.seed}:{tau.columns}:{k}")
            assign = sample_extension_point(s, tau, rng)
            rep = lemma_em_extension_check(s, tau, None, assign)
            checked += rep.checked
            if not rep.ok:
                fails.append({"sample": k, "failures": rep.failures})
        _, _, pl, mi = tau.columns
        out.append({"tau": {"plus": list(pl), "minus": list(mi)}, "ok": not fails, "checked": checked,
                    "failures": fails})
    return out


def suite_cross_ratio(cfg: RunConfig) -> list[dict]:
    s = cfg.need_s()
    if s.entries != (1, 1, 1, 1):
        raise UsageError("cross-ratio runs on s=1,1,1,1")
    rng = random.Random(cfg.seed)
    bad = []
    done = redraws = 0
    while done < cfg.trials:
        m = [[Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(4)] for _ in range(2)]
        z = numeric_minors(m)
        if all(v == 0 for v in z.values()):
            continue
        try:
            c = map_Fw(s, (1, 1, 1, 1), z).canonical()
        except Indeterminate:
            redraws += 1
            continue
        done += 1
        if c[0] - c[1] + c[2] != 0:
            bad.append({"matrix": m, "coords": list(c)})
    return [{"relation": "c0 - c1 + c2", "samples": done, "base_locus_redraws": redraws,
             "ok": not bad, "failures": bad}]


def suite_oracle(cfg: RunConfig, sweep: bool = False) -> list[dict]:
    svs = size_vector_sweep() if sweep else [cfg.need_s()]
    out = []
    for s in svs:
        bad = []
        ws = essential_weights(s)
        for w in ws:
            fast, brute = monomials_Gw(s, w), monomials_Gw_bruteforce(s, w)
            if sorted(fast) != sorted(brute):
                bad.append({"w": list(w), "reason": "oracle mismatch"})
            elif any(torus_weight(s, m) != tuple(w) for m in fast):
                bad.append({"w": list(w), "reason": "torus weight"})
        out.append({"s": list(s), "weights": len(ws), "ok": not bad, "failures": bad})
    return out


SUITES = {
    "charts": suite_charts,
    "embeddings": suite_embeddings,
    "lemma-em": suite_lemma_em,
    "cross-ratio": suite_cross_ratio,
    "oracle": suite_oracle,
}


def _label(rec: dict) -> str:
    for k in ("chart", "s", "tau", "relation"):
        if k in rec:
            return f"{k}={json.dumps(rec[k], separators=(',', ':'))}"
    return ""


def cmd_verify(cfg: RunConfig, suite: str, sweep: bool = False) -> int:
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}")
    recs = suite_oracle(cfg, sweep) if suite == "oracle" else SUITES[suite](cfg)
    ok = all(r["ok"] for r in recs)
    summary = [f"{'PASS' if r['ok'] else 'FAIL'} {suite} {_label(r)}" for r in recs]
    summary.append(f"{'PASS' if ok else 'FAIL'} {suite}")
    out = {"suite": suite, "s": list(cfg.size_vector) if cfg.size_vector else None,
           "seed": cfg.seed, "trials": cfg.trials, "ok": ok, "summary": summary, "results": recs}
    emit(cfg, out, report=True)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- chart-eval


def cmd_chart_eval(cfg: RunConfig, name: str, params_path: str) -> int:
    from .charts import UnsupportedShape, chart_theta_values, get_chart, minimal_sizes, vanishing_inverted

    try:
        raw = json.loads(Path(params_path).read_text(encoding="utf-8"))
        assign = {k: parse_rational(v) for k, v in raw.items()}
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise UsageError(f"cannot read params file: {e}") from e
    try:
        sizes = cfg.size_vector.entries if cfg.size_vector else None
        c = get_chart(name, sizes)
    except (KeyError, UnsupportedShape) as e:
        raise UsageError(f"chart {name!r}: {e}") from e
    missing = [v for v in c.variables if v not in assign]
    extra = sorted(set(assign) - set(c.variables))
    if missing or extra:
        raise UsageError(f"params for {name}: missing {missing}, unexpected {extra}")
    zero = vanishing_inverted(c, assign)
    if zero:
        print(f"off-domain: inverted element {zero[0]} vanishes", file=sys.stderr)
        return EXIT_OFF_DOMAIN
    vals = chart_theta_values(c, assign)
    mins = numeric_minors(vals)
    s = SizeVector(tuple(c.sizes))
    image = []
    for w, img in map_Ks_partial(s, mins):
        if img is None:
            image.append({"w": list(w), "indeterminate": True})
        else:
            image.append({"w": list(w), "monomials": [_monomial(m) for m in img.labels],
                          "coords": list(img.canonical())})
    out = {"chart": name, "s": list(c.sizes), "matrix": vals,
           "minors": {_pair(p): mins[p] for p in sorted(mins)}, "image": image}
    emit(cfg, out)
    return EXIT_OK


# ---------------------------------------------------------------- entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--s", dest="s", help="size vector, comma separated positive integers")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=50)
    common.add_argument("--out", help="write the JSON result here")
    common.add_argument("--format", choices=["json", "text"], default="json")

    p = _Parser(prog="grasscut", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", parents=[common], help="list V^s, C^s, G^s_w, paves, pavings or chart indices")
    e.add_argument("what", choices=["vs", "cs", "gw", "paves", "pavings", "jindices"])
    e.add_argument("--w", help="weight for gw, comma separated")

    f = sub.add_parser("fan", parents=[common], help="cones and chart generators of pavings")
    f.add_argument("--paving", help="paving name (S1244, trivial, ...) or key")
    f.add_argument("--all", action="store_true", dest="all_")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--sweep", action="store_true", help="oracle: every size vector with N <= 5, n <= 8")

    c = sub.add_parser("chart-eval", parents=[common], help="evaluate a catalog chart at a point")
    c.add_argument("chart")
    c.add_argument("--params", required=True, help="JSON file mapping variable names to rationals")
    return p


def main(argv=None) -> int:
    from .polyhedral import TooLarge

    try:
        a = build_parser().parse_args(argv)
        s = None
        if a.s is not None:
            try:
                s = parse_size_vector(a.s)
            except (InvalidSizeVector, ValueError) as e:
                raise UsageError(f"bad --s: {e}") from e
        cfg = RunConfig(s, a.seed, a.trials, a.out, a.format)
        if a.cmd == "enumerate":
            return cmd_enumerate(cfg, a.what, a.w)
        if a.cmd == "fan":
            return cmd_fan(cfg, a.paving, a.all_)
        if a.cmd == "verify":
            return cmd_verify(cfg, a.suite, a.sweep)
        return cmd_chart_eval(cfg, a.chart, a.params)
    except UsageError as e:
        print(f"grasscut: {e}", file=sys.stderr)
        return EXIT_ARGS
    except TooLarge as e:
        print(f"grasscut: {e}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except MissingVariable as e:
        print(f"grasscut: missing variable {e}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
