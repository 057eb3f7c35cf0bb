"""Exact rationals, sparse integer polynomials and their fractions.

Rationals are :class:`fractions.Fraction`. Polynomials carry their own
variable names, so polynomials built in different places combine by name.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Union

BigRational = Fraction

Monomial = tuple  # tuple of (name, exponent) pairs sorted by name


class MissingVariable(KeyError):
    pass


class ParseError(ValueError):
    pass


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for name, e in b:
        out[name] = out.get(name, 0) + e
    return tuple(sorted(out.items()))


def _mono_div(a: Monomial, b: Monomial):
    """a / b as a monomial, or None if b does not divide a."""
    da = dict(a)
    for name, e in b:
        got = da.get(name, 0)
        if got < e:
            return None
        if got == e:
            del da[name]
        else:
            da[name] = got - e
    return tuple(sorted(da.items()))


def _mono_deg(m: Monomial) -> int:
    return sum(e for _, e in m)


def _grlex_key(m: Monomial, names: list[str]):
    d = dict(m)
    return (_mono_deg(m), tuple(d.get(n, 0) for n in names))


class IntPoly:
    """Sparse multivariate polynomial with integer coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[tuple(m)] = int(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def const(cls, c: int) -> "IntPoly":
        return cls({(): c})

    @classmethod
    def var(cls, name: str) -> "IntPoly":
        return cls({((name, 1),): 1})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def variables(self) -> list[str]:
        return sorted({n for m in self._terms for n, _ in m})

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_value(self) -> int:
        return self._terms.get((), 0)

    def sorted_terms(self, names: list[str] | None = None) -> list:
        """Terms in descending graded lexicographic order."""
        names = names if names is not None else self.variables
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0], names), reverse=True)

    def leading_term(self, names: list[str] | None = None):
        names = names if names is not None else self.variables
        return max(self._terms.items(), key=lambda t: _grlex_key(t[0], names))

    def degree(self) -> int:
        return max((_mono_deg(m) for m in self._terms), default=-1)

    def content(self) -> int:
        g = 0
        for c in self._terms.values():
            g = gcd(g, c)
        return g

    def monomial_content(self) -> Monomial:
        """Largest monomial dividing every term."""
        it = iter(self._terms)
        first = next(it, None)
        if first is None:
            return ()
        common = dict(first)
        for m in it:
            d = dict(m)
            for n in list(common):
                e = min(common[n], d.get(n, 0))
                if e:
                    common[n] = e
                else:
                    del common[n]
            if not common:
                break
        return tuple(sorted(common.items()))

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        if isinstance(other, IntPoly):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return IntPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return IntPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = IntPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def evaluate(self, assign: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self._terms.items():
            val = Fraction(c)
            for name, e in m:
                try:
                    x = assign[name]
                except KeyError:
                    raise MissingVariable(name) from None
                val *= Fraction(x) ** e
            total += val
        return total

    def subs(self, mapping: Mapping[str, "RatFunc"]) -> "RatFunc":
        """Substitute rational functions for some variables."""
        total = RatFunc(IntPoly())
        for m, c in self._terms.items():
            term = RatFunc(IntPoly.const(c))
            keep = []
            for name, e in m:
                if name in mapping:
                    term = term * (as_ratfunc(mapping[name]) ** e)
                else:
                    keep.append((name, e))
            if keep:
                term = term * RatFunc(IntPoly({tuple(keep): 1}))
            total = total + term
        return total

    def __repr__(self):
        return f"IntPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


def _as_poly(x):
    if isinstance(x, IntPoly):
        return x
    if isinstance(x, int):
        return IntPoly.const(x)
    return None


def poly_arith(p: IntPoly, q: IntPoly, op: str) -> IntPoly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def poly_eval(p: IntPoly, assign: Mapping[str, Fraction]) -> Fraction:
    return p.evaluate(assign)


def divide_exact(p: IntPoly, q: IntPoly):
    """Return h with p == q*h, or None when q does not divide p."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return IntPoly()
    names = sorted(set(p.variables) | set(q.variables))
    qm, qc = q.leading_term(names)
    rem = p
    quot: dict = {}
    while not rem.is_zero():
        rm, rc = rem.leading_term(names)
        if rc % qc:
            return None
        m = _mono_div(rm, qm)
        if m is None:
            return None
        c = rc // qc
        quot[m] = quot.get(m, 0) + c
        rem = rem - q * IntPoly({m: c})
    return IntPoly(quot)


class RatFunc:
    """Formal fraction num/den of integer polynomials."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _as_poly(num) if not isinstance(num, IntPoly) else num
        if den is None:
            den = IntPoly.const(1)
        elif not isinstance(den, IntPoly):
            den = _as_poly(den)
        if num is None or den is None:
            raise TypeError("RatFunc needs IntPoly or int parts")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        num, den = _reduce(num, den)
        self.num = num
        self.den = den

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den == IntPoly.const(1)

    @property
    def variables(self) -> list[str]:
        return sorted(set(self.num.variables) | set(self.den.variables))

    def __eq__(self, other):
        other = _maybe_ratfunc(other)
        if other is None:
            return NotImplemented
        return ratfunc_eq(self, other)

    def __hash__(self):
        raise TypeError("RatFunc is not hashable; compare with ratfunc_eq")

    def __add__(self, other):
        other = _maybe_ratfunc(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = _maybe_ratfunc(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _maybe_ratfunc(other)
        if other is None:
            return NotImplemented
        if self.den == other.num and not other.num.is_zero():
            return RatFunc(self.num, other.den)
        if other.den == self.num and not self.num.is_zero():
            return RatFunc(other.num, self.den)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        other = _maybe_ratfunc(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _maybe_ratfunc(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return RatFunc(self.den ** (-k), self.num ** (-k))
        return RatFunc(self.num ** k, self.den ** k)

    def evaluate(self, assign: Mapping[str, Fraction]) -> Fraction:
        d = self.den.evaluate(assign)
        if d == 0:
            raise ZeroDivisionError(f"denominator {self.den} vanishes")
        return self.num.evaluate(assign) / d

    def subs(self, mapping: Mapping[str, "RatFunc"]) -> "RatFunc":
        return self.num.subs(mapping) / self.den.subs(mapping)

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if self.is_poly():
            return str(self.num)
        return f"({self.num})/({self.den})"


def _reduce(num: IntPoly, den: IntPoly):
    """Cancel integer and monomial content, and make den's leading coefficient positive."""
    if num.is_zero():
        return num, IntPoly.const(1)
    g = gcd(num.content(), den.content())
    names = sorted(set(num.variables) | set(den.variables))
    sign = -1 if den.leading_term(names)[1] < 0 else 1
    mc_n, mc_d = num.monomial_content(), den.monomial_content()
    common = dict(mc_n)
    dd = dict(mc_d)
    common = {n: min(e, dd[n]) for n, e in common.items() if n in dd}
    mono = tuple(sorted(common.items()))
    if g == 1 and sign == 1 and not mono:
        return num, den
    k = g * sign

    def scale(p: IntPoly) -> IntPoly:
        return IntPoly({_mono_div(m, mono): c // k for m, c in p._terms.items()})

    return scale(num), scale(den)


def _maybe_ratfunc(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, IntPoly):
        return RatFunc(x)
    if isinstance(x, int):
        return RatFunc(IntPoly.const(x))
    if isinstance(x, Fraction):
        return RatFunc(IntPoly.const(x.numerator), IntPoly.const(x.denominator))
    return None


def as_ratfunc(x) -> RatFunc:
    r = _maybe_ratfunc(x)
    if r is None:
        raise TypeError(f"cannot convert {type(x).__name__} to RatFunc")
    return r


def ratfunc_eq(f: RatFunc, g: RatFunc) -> bool:
    f, g = as_ratfunc(f), as_ratfunc(g)
    return (f.num * g.den - g.num * f.den).is_zero()


def var(name: str) -> RatFunc:
    return RatFunc(IntPoly.var(name))


def const(c: Union[int, Fraction]) -> RatFunc:
    return as_ratfunc(Fraction(c) if not isinstance(c, int) else c)


# parsing: integers, variables, + - * / ^ and parentheses

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S))")
_ALIASES = {"−": "-", "·": "*", "⋅": "*", "**": "^"}


def _tokenize(text: str) -> list:
    for a, b in _ALIASES.items():
        text = text.replace(a, b)
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        num, name, sym = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("var", name))
        elif sym in "+-*/^()":
            out.append(("sym", sym))
        else:
            raise ParseError(f"unexpected character {sym!r} in {text!r}")
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, sym=None):
        tok = self.peek()
        if tok[0] is None or (sym is not None and tok != ("sym", sym)):
            raise ParseError(f"expected {sym or 'token'} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> RatFunc:
        if not self.toks:
            raise ParseError("empty expression")
        r = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input in {self.text!r}")
        return r

    def expr(self) -> RatFunc:
        r = self.term()
        while self.peek() in (("sym", "+"), ("sym", "-")):
            op = self.take()[1]
            rhs = self.term()
            r = r + rhs if op == "+" else r - rhs
        return r

    def term(self) -> RatFunc:
        r = self.unary()
        while True:
            tok = self.peek()
            if tok in (("sym", "*"), ("sym", "/")):
                self.take()
                rhs = self.unary()
                r = r * rhs if tok[1] == "*" else r / rhs
            elif tok[0] in ("num", "var") or tok == ("sym", "("):
                r = r * self.unary()  # juxtaposition
            else:
                return r

    def unary(self) -> RatFunc:
        if self.peek() == ("sym", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("sym", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> RatFunc:
        base = self.atom()
        if self.peek() == ("sym", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ParseError(f"exponent must be a nonnegative integer in {self.text!r}")
            return base ** val
        return base

    def atom(self) -> RatFunc:
        kind, val = self.take()
        if kind == "num":
            return RatFunc(IntPoly.const(val))
        if kind == "var":
            return var(val)
        if val == "(":
            r = self.expr()
            self.take(")")
            return r
        raise ParseError(f"unexpected {val!r} in {self.text!r}")


def parse_ratfunc(text: str) -> RatFunc:
    return _Parser(str(text)).parse()


def parse_poly(text: str) -> IntPoly:
    r = parse_ratfunc(text)
    if not r.den.is_constant() or r.den.constant_value() != 1:
        q = divide_exact(r.num, r.den)
        if q is None:
            raise ParseError(f"{text!r} is not a polynomial")
        return q
    return r.num


def product(items: Iterable) -> RatFunc:
    out = RatFunc(IntPoly.const(1))
    for x in items:
        out = out * x
    return out


# Full gcd cancellation and factoring are delegated to sympy. The hand-rolled
# arithmetic above only strips integer and monomial content.

def to_sympy(p: IntPoly):
    import sympy
    return sympy.Add(*[c * sympy.Mul(*[sympy.Symbol(n) ** e for n, e in m])
                       for m, c in p._terms.items()])


def from_sympy(expr) -> IntPoly:
    import sympy
    expr = sympy.expand(expr)
    if expr == 0:
        return IntPoly()
    gens = sorted(expr.free_symbols, key=lambda s: s.name)
    if not gens:
        return IntPoly.const(int(expr))
    P = sympy.Poly(expr, *gens)
    terms = {}
    for exps, c in P.terms():
        if c != int(c):
            raise ValueError(f"non-integer coefficient {c}")
        terms[tuple((g.name, e) for g, e in zip(gens, exps) if e)] = int(c)
    return IntPoly(terms)


def cancel(f: RatFunc) -> RatFunc:
    """Lowest terms: divide numerator and denominator by their polynomial gcd."""
    import sympy
    f = as_ratfunc(f)
    if f.den.is_constant() or f.num.is_zero():
        return f
    g = from_sympy(sympy.gcd(to_sympy(f.num), to_sympy(f.den)))
    if g.is_constant():
        return f
    return RatFunc(divide_exact(f.num, g), divide_exact(f.den, g))


def irreducible_factors(p: IntPoly) -> list:
    """Non-constant irreducible factors of p over the integers, normalised to positive leading coefficient."""
    import sympy
    if p.is_constant():
        return []
    _, facs = sympy.factor_list(to_sympy(p))
    out = []
    for f, _ in facs:
        q = from_sympy(f)
        names = sorted(q.variables)
        if q.leading_term(names)[1] < 0:
            q = -q
        out.append(q)
    return out
