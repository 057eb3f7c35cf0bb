"""Block structure, pair types, monomial generator sets and torus weights."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Sequence


class OutOfRange(ValueError):
    pass


class NotInVs(ValueError):
    pass


class InvalidSizeVector(ValueError):
    pass


@dataclass(frozen=True)
class SizeVector:
    entries: tuple

    def __post_init__(self):
        ent = tuple(int(x) for x in self.entries)
        object.__setattr__(self, "entries", ent)
        if len(ent) < 2 or any(x < 1 for x in ent):
            raise InvalidSizeVector(f"size vector needs N >= 2 positive entries, got {ent}")

    @property
    def N(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return sum(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        return ",".join(map(str, self.entries))


def as_size_vector(s) -> SizeVector:
    return s if isinstance(s, SizeVector) else SizeVector(tuple(s))


def parse_size_vector(text: str) -> SizeVector:
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError:
        raise InvalidSizeVector(f"cannot parse size vector {text!r}") from None
    return SizeVector(tuple(parts))


def blocks(s) -> list[tuple]:
    s = as_size_vector(s)
    out, start = [], 1
    for st in s:
        out.append(tuple(range(start, start + st)))
        start += st
    return out


def tau_of(s, i: int) -> int:
    s = as_size_vector(s)
    if not 1 <= i <= s.n:
        raise OutOfRange(f"column {i} outside 1..{s.n}")
    acc = 0
    for t, st in enumerate(s, start=1):
        acc += st
        if i <= acc:
            return t
    raise AssertionError


def all_pairs(n: int) -> list[tuple]:
    return list(combinations(range(1, n + 1), 2))


@lru_cache(maxsize=None)
def _vs(entries: tuple) -> tuple:
    N = len(entries)
    pts = []
    for i in range(N):
        if entries[i] >= 2:
            pts.append(tuple(2 if k == i else 0 for k in range(N)))
        for j in range(i + 1, N):
            pts.append(tuple(1 if k in (i, j) else 0 for k in range(N)))
    return tuple(sorted(pts, reverse=True))


def enumerate_Vs(s) -> list[tuple]:
    """Points of V^s, sorted lexicographically from the largest."""
    return list(_vs(as_size_vector(s).entries))


def pair_type(s, p: Sequence[int]) -> tuple:
    s = as_size_vector(s)
    i1, i2 = p
    if not 1 <= i1 < i2 <= s.n:
        raise OutOfRange(f"bad pair {p} for n={s.n}")
    v = [0] * s.N
    v[tau_of(s, i1) - 1] += 1
    v[tau_of(s, i2) - 1] += 1
    return tuple(v)


def pairs_of_type(s, v: Sequence[int]) -> list[tuple]:
    s = as_size_vector(s)
    v = tuple(v)
    if v not in _vs(s.entries):
        raise NotInVs(f"{v} is not in V^s for s={s.entries}")
    return [p for p in all_pairs(s.n) if pair_type(s, p) == v]


def pairs_meeting_block(s, t: int) -> list[tuple]:
    s = as_size_vector(s)
    if not 1 <= t <= s.N:
        raise OutOfRange(f"block {t} outside 1..{s.N}")
    return [p for p in all_pairs(s.n) if tau_of(s, p[0]) == t or tau_of(s, p[1]) == t]


def _decompositions(vs: list, w: tuple, start: int) -> Iterable[tuple]:
    """Multisets of V^s points (nondecreasing index) summing to w."""
    if all(x == 0 for x in w):
        yield ()
        return
    for k in range(start, len(vs)):
        v = vs[k]
        rest = tuple(a - b for a, b in zip(w, v))
        if min(rest) < 0:
            continue
        for tail in _decompositions(vs, rest, k):
            yield (v,) + tail


def _weight_ok(w) -> bool:
    return all(x >= 0 for x in w) and sum(w) % 2 == 0


def type_decompositions(s, w) -> list[tuple]:
    s = as_size_vector(s)
    w = tuple(w)
    if len(w) != s.N or not _weight_ok(w):
        return []
    return list(_decompositions(list(_vs(s.entries)), w, 0))


def height(s, w) -> int:
    w = tuple(w)
    for _ in type_decompositions(s, w):
        return sum(w) // 2
    return 0


def canonical_monomial(factors: Iterable) -> tuple:
    return tuple(sorted(tuple(p) for p in factors))


def monomials_Gw(s, w) -> list[tuple]:
    """All monomials of G^s_w as sorted tuples of pairs, in lex order."""
    s = as_size_vector(s)
    out = set()
    by_type = {v: pairs_of_type(s, v) for v in _vs(s.entries)}
    for dec in type_decompositions(s, w):
        counts = Counter(dec)
        partial = [()]
        for v, k in counts.items():
            choices = list(combinations_with_replacement(by_type[v], k))
            partial = [a + c for a in partial for c in choices]
        for m in partial:
            out.add(canonical_monomial(m))
    return sorted(out)


def monomials_Gw_bruteforce(s, w) -> list[tuple]:
    """Independent oracle: every multiset of pairs of the right size, filtered by type sum."""
    s = as_size_vector(s)
    w = tuple(w)
    if len(w) != s.N or not _weight_ok(w):
        return []
    k = sum(w) // 2
    out = []
    for m in combinations_with_replacement(all_pairs(s.n), k):
        tot = [0] * s.N
        for i1, i2 in m:
            tot[tau_of(s, i1) - 1] += 1
            tot[tau_of(s, i2) - 1] += 1
        if tuple(tot) == w:
            out.append(canonical_monomial(m))
    return sorted(set(out))


def essential_weights(s) -> list[tuple]:
    """C^s: two ones, a single two on a block of size >= 2, or four ones."""
    s = as_size_vector(s)
    N = s.N
    out = []
    for i, j in combinations(range(N), 2):
        out.append(tuple(1 if k in (i, j) else 0 for k in range(N)))
    for i in range(N):
        if s[i] >= 2:
            out.append(tuple(2 if k == i else 0 for k in range(N)))
    if N >= 4:
        for q in combinations(range(N), 4):
            out.append(tuple(1 if k in q else 0 for k in range(N)))
    return sorted(set(out), reverse=True)


def torus_weight(s, m: Iterable) -> tuple:
    s = as_size_vector(s)
    tot = [0] * s.N
    for p in m:
        tot = [a + b for a, b in zip(tot, pair_type(s, p))]
    return tuple(tot)


def size_vector_sweep(max_N: int = 5, max_n: int = 8) -> list[SizeVector]:
    """Every size vector with 2 <= N <= max_N and n <= max_n."""
    out = []

    def rec(prefix):
        if len(prefix) >= 2:
            out.append(SizeVector(tuple(prefix)))
        if len(prefix) == max_N:
            return
        for x in range(1, max_n - sum(prefix) + 1):
            rec(prefix + [x])

    rec([])
    return out
