"""Plücker minors of 2 x n matrices, projective points and the maps F_w, F_t, K."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .combinatorics import (
    all_pairs,
    as_size_vector,
    essential_weights,
    monomials_Gw,
    pairs_meeting_block,
)
from .exact_algebra import RatFunc, as_ratfunc


class RankDeficient(ValueError):
    pass


class Indeterminate(ValueError):
    def __init__(self, msg, where=None):
        super().__init__(msg)
        self.where = where


def _is_zero(x) -> bool:
    if isinstance(x, RatFunc):
        return x.is_zero()
    return x == 0


class Matrix2xN:
    """A 2 x n matrix with RatFunc entries; rows and columns are 1-based in accessors."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        if len(rows) != 2 or len(rows[0]) != len(rows[1]):
            raise ValueError("need two rows of equal length")
        self.rows = (tuple(as_ratfunc(x) for x in rows[0]), tuple(as_ratfunc(x) for x in rows[1]))

    @property
    def n(self) -> int:
        return len(self.rows[0])

    def entry(self, r: int, c: int) -> RatFunc:
        return self.rows[r - 1][c - 1]

    def column(self, c: int) -> tuple:
        return (self.rows[0][c - 1], self.rows[1][c - 1])

    def subs(self, mapping) -> "Matrix2xN":
        return Matrix2xN([[x.subs(mapping) for x in row] for row in self.rows])

    def evaluate(self, assign) -> "Matrix2xN":
        return Matrix2xN([[x.evaluate(assign) for x in row] for row in self.rows])

    def values(self, assign) -> list[list[Fraction]]:
        return [[x.evaluate(assign) for x in row] for row in self.rows]

    def permute_columns(self, perm: Sequence[int]) -> "Matrix2xN":
        """New matrix whose column k is old column perm[k-1]."""
        return Matrix2xN([[row[p - 1] for p in perm] for row in self.rows])

    def __eq__(self, other):
        if not isinstance(other, Matrix2xN) or other.n != self.n:
            return NotImplemented
        return all(a == b for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2))

    def __str__(self):
        return "\n".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.rows)


def minor_of(a1, a2, b1, b2):
    """det [[a1, b1], [a2, b2]] for columns (a1, a2) and (b1, b2)."""
    return a1 * b2 - b1 * a2


def plucker_minor(theta: Matrix2xN, p: Sequence[int]):
    i1, i2 = p
    if not 1 <= i1 < i2 <= theta.n:
        raise ValueError(f"bad pair {p}")
    a1, a2 = theta.column(i1)
    b1, b2 = theta.column(i2)
    return minor_of(a1, a2, b1, b2)


def plucker_minors(theta: Matrix2xN) -> dict:
    return {p: plucker_minor(theta, p) for p in all_pairs(theta.n)}


def numeric_minors(values: Sequence[Sequence[Fraction]]) -> dict:
    r1, r2 = values
    n = len(r1)
    return {(i, j): r1[i - 1] * r2[j - 1] - r1[j - 1] * r2[i - 1] for i, j in all_pairs(n)}


@dataclass(frozen=True)
class ProjectivePoint:
    """Coordinates up to a common nonzero scalar, labelled by an ordered index set."""

    labels: tuple
    coords: tuple = field(compare=False)

    def __post_init__(self):
        if len(self.labels) != len(self.coords):
            raise ValueError("labels and coordinates differ in length")
        if all(_is_zero(c) for c in self.coords):
            raise Indeterminate("all coordinates vanish")

    @classmethod
    def from_map(cls, labels: Sequence, values: Mapping) -> "ProjectivePoint":
        return cls(tuple(labels), tuple(values[l] for l in labels))

    def as_dict(self) -> dict:
        return dict(zip(self.labels, self.coords))

    def canonical(self) -> tuple:
        first = next(c for c in self.coords if not _is_zero(c))
        return tuple(c / first for c in self.coords)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if self.labels != other.labels:
            return False
        return projectively_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.labels)


def projectively_equal(a: Sequence, b: Sequence) -> bool:
    """Rank-one test a_i b_j == a_j b_i against a pivot; both sides nonzero."""
    if len(a) != len(b):
        return False
    k = next((i for i, x in enumerate(a) if not _is_zero(x)), None)
    if k is None or _is_zero(b[k]):
        return False
    return all(_is_zero(x * b[k] - a[k] * y) for x, y in zip(a, b))


def plucker_vector(theta) -> ProjectivePoint:
    """All 2 x 2 minors of a numeric matrix (Matrix2xN with constant entries or nested lists)."""
    if isinstance(theta, Matrix2xN):
        vals = [[x.evaluate({}) for x in row] for row in theta.rows]
    else:
        vals = [[Fraction(x) for x in row] for row in theta]
    mins = numeric_minors(vals)
    labels = tuple(sorted(mins))
    if all(mins[p] == 0 for p in labels):
        raise RankDeficient("every minor vanishes")
    return ProjectivePoint(labels, tuple(mins[p] for p in labels))


def plucker_relation_residues(z: Mapping) -> dict:
    """Residual of z12 z34 - z13 z24 + z14 z23 for every 4-subset, keyed by the subset."""
    n = max(max(p) for p in z)
    out = {}
    for i1, i2, i3, i4 in combinations(range(1, n + 1), 4):
        out[(i1, i2, i3, i4)] = (
            z[(i1, i2)] * z[(i3, i4)] - z[(i1, i3)] * z[(i2, i4)] + z[(i1, i4)] * z[(i2, i3)]
        )
    return out


def check_plucker_relations(pt) -> bool:
    z = pt.as_dict() if isinstance(pt, ProjectivePoint) else dict(pt)
    return all(_is_zero(r) for r in plucker_relation_residues(z).values())


def _coords(pt) -> dict:
    return pt.as_dict() if isinstance(pt, ProjectivePoint) else dict(pt)


def _mono_value(z: Mapping, m: Sequence):
    val = 1
    for p in m:
        val = val * z[tuple(p)]
    return val


def map_Fw(s, w, pt) -> ProjectivePoint:
    s = as_size_vector(s)
    z = _coords(pt)
    monos = monomials_Gw(s, w)
    if not monos:
        raise Indeterminate(f"G_w is empty for w={tuple(w)}", where=tuple(w))
    vals = tuple(_mono_value(z, m) for m in monos)
    if all(_is_zero(v) for v in vals):
        raise Indeterminate(f"every monomial of G_w vanishes for w={tuple(w)}", where=tuple(w))
    return ProjectivePoint(tuple(monos), vals)


def map_Ft(s, t: int, pt) -> ProjectivePoint:
    s = as_size_vector(s)
    z = _coords(pt)
    labels = tuple(pairs_meeting_block(s, t))
    vals = tuple(z[p] for p in labels)
    if all(_is_zero(v) for v in vals):
        raise Indeterminate(f"every coordinate meeting block {t} vanishes", where=t)
    return ProjectivePoint(labels, vals)


def map_Ks(s, pt) -> list[tuple]:
    """(w, F_w image) for every essential weight w, images in canonical form."""
    out = []
    for w in essential_weights(s):
        img = map_Fw(s, w, pt)
        out.append((w, img))
    return out


def map_Ks_partial(s, pt) -> list[tuple]:
    """Like map_Ks but records indeterminate factors as None instead of raising."""
    out = []
    for w in essential_weights(s):
        try:
            out.append((w, map_Fw(s, w, pt)))
        except Indeterminate:
            out.append((w, None))
    return out


def chart_matrix_U(j1: int, j2: int, values: Mapping, n: int | None = None) -> Matrix2xN:
    """Matrix with standard columns at j1, j2 and the given entries elsewhere."""
    if n is None:
        n = max([j1, j2] + [c for _, c in values])
    rows = [[0] * n, [0] * n]
    rows[0][j1 - 1], rows[1][j1 - 1] = 1, 0
    rows[0][j2 - 1], rows[1][j2 - 1] = 0, 1
    for (r, c), x in values.items():
        if c in (j1, j2):
            raise ValueError(f"column {c} is a pivot column")
        rows[r - 1][c - 1] = x
    return Matrix2xN(rows)
