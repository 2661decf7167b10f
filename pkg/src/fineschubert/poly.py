"""Exact sparse polynomials over Q with tagged variables, term orders,
spreads, multihomogenization and symbolic determinants."""
from __future__ import annotations

import json
import random
import re
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Mapping, NamedTuple, Sequence


class Var(NamedTuple):
    kind: str  # 'a', 'b', 'z' or 'x'
    i: int
    j: int = 0

    def __str__(self) -> str:
        if self.kind == "x":
            return f"x[{self.i}]"
        return f"{self.kind}[{self.i},{self.j}]"

    @property
    def cell(self) -> tuple[int, int]:
        return (self.i, self.j)


_VAR_RE = re.compile(r"^\s*([abz])\[(\d+),(\d+)\]\s*$|^\s*x\[(\d+)\]\s*$")


def parse_var(text: str) -> Var:
    m = _VAR_RE.match(text)
    if not m:
        raise ValueError(f"bad variable name {text!r}")
    if m.group(1):
        return Var(m.group(1), int(m.group(2)), int(m.group(3)))
    return Var("x", int(m.group(4)))


def a(i: int, j: int) -> Var:
    return Var("a", i, j)


def b(i: int, j: int) -> Var:
    return Var("b", i, j)


def z(i: int, j: int) -> Var:
    return Var("z", i, j)


def x(i: int) -> Var:
    return Var("x", i)


Monomial = tuple  # tuple[tuple[Var, int], ...], sorted by Var, exponents > 0
ONE: Monomial = ()


def mono(*factors: Var | tuple[Var, int]) -> Monomial:
    exps: dict[Var, int] = {}
    for f in factors:
        v, e = (f, 1) if isinstance(f, Var) else f
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in exps.items() if e))


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    exps = dict(m1)
    for v, e in m2:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def mono_divides(m1: Monomial, m2: Monomial) -> bool:
    d = dict(m2)
    return all(d.get(v, 0) >= e for v, e in m1)


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_str(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(str(v) if e == 1 else f"{v}^{e}" for v, e in m)


def _canon_key(m: Monomial):
    return (mono_degree(m), m)


class Polynomial:
    """Immutable sparse polynomial ``{Monomial: Fraction}``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = c if isinstance(c, Fraction) else Fraction(c)
                if c:
                    clean[m] = c
        self.terms: dict[Monomial, Fraction] = clean
        self._hash = None

    # construction
    @classmethod
    def var(cls, v: Var) -> "Polynomial":
        return cls({((v, 1),): 1})

    @classmethod
    def const(cls, c) -> "Polynomial":
        return cls({ONE: c})

    @classmethod
    def monomial(cls, m: Monomial, c=1) -> "Polynomial":
        return cls({m: c})

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, Var):
            return Polynomial.var(other)
        return Polynomial.const(other)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, (Polynomial, Var)):
            c = Fraction(other)
            return Polynomial({m: c * v for m, v in self.terms.items()})
        other = self._coerce(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.const(1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c) -> "Polynomial":
        return self * Fraction(c)

    # comparison
    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            other = self._coerce(other)
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=_canon_key, reverse=True):
            c = self.terms[m]
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono_str(m))
            elif c == -1:
                parts.append("-" + mono_str(m))
            else:
                parts.append(f"{c}*{mono_str(m)}")
        return " + ".join(parts).replace("+ -", "- ")

    # inspection
    def variables(self) -> frozenset:
        return frozenset(v for m in self.terms for v, _ in m)

    def spread(self) -> frozenset:
        return frozenset(v.cell for v in self.variables() if v.kind != "x")

    def is_squarefree(self) -> bool:
        return all(e == 1 for m in self.terms for _, e in m)

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=-1)

    def degree_in(self, v: Var) -> int:
        return max((dict(m).get(v, 0) for m in self.terms), default=0)

    def split(self, v: Var) -> tuple["Polynomial", "Polynomial"]:
        """(g, r) with self = v*g + r, both free of v; needs degree <= 1 in v."""
        if self.degree_in(v) > 1:
            raise ValueError(f"{v} occurs with exponent > 1")
        g, r = {}, {}
        for m, c in self.terms.items():
            d = dict(m)
            if v in d:
                del d[v]
                g[tuple(sorted(d.items()))] = c
            else:
                r[m] = c
        return Polynomial(g), Polynomial(r)

    def substitute(self, values: Mapping[Var, object]) -> "Polynomial":
        out = Polynomial()
        for m, c in self.terms.items():
            term = Polynomial.const(c)
            rest = []
            for v, e in m:
                if v in values:
                    val = values[v]
                    val = val if isinstance(val, Polynomial) else Polynomial.const(val)
                    term = term * (val ** e)
                else:
                    rest.append((v, e))
            out = out + term * Polynomial.monomial(tuple(rest))
        return out

    def leading_canonical(self) -> tuple[Monomial, Fraction]:
        m = max(self.terms, key=_canon_key)
        return m, self.terms[m]

    def normalized(self) -> "Polynomial":
        """Primitive form: integer coefficients with gcd 1, positive canonical lead."""
        if not self.terms:
            return self
        den = reduce(lambda acc, c: acc * c.denominator // gcd(acc, c.denominator),
                     self.terms.values(), 1)
        nums = [int(c * den) for c in self.terms.values()]
        g = reduce(gcd, nums)
        _, lead = self.leading_canonical()
        sign = 1 if lead > 0 else -1
        return Polynomial({m: Fraction(int(c * den) // g * sign) for m, c in self.terms.items()})

    # serialization
    def to_json(self) -> dict:
        terms = []
        for m in sorted(self.terms, key=_canon_key, reverse=True):
            terms.append({"c": str(self.terms[m]), "m": {str(v): e for v, e in m}})
        return {"terms": terms}

    @classmethod
    def from_json(cls, obj) -> "Polynomial":
        if isinstance(obj, str):
            obj = json.loads(obj)
        out = {}
        for t in obj["terms"]:
            m = mono(*[(parse_var(k), int(e)) for k, e in t["m"].items()])
            out[m] = out.get(m, 0) + Fraction(t["c"])
        return cls(out)


def var_poly(v: Var) -> Polynomial:
    return Polynomial.var(v)


def spread(f: Polynomial) -> frozenset:
    return f.spread()


def is_squarefree(f: Polynomial) -> bool:
    return f.is_squarefree()


# ------------------------------------------------------------------ homogenize

def _partner(v: Var) -> Var:
    return Var("b", v.i, v.j)


def multihomogenize(f: Polynomial) -> Polynomial:
    """Pad each term with b[i,j] so every a[i,j] reaches its top degree in f."""
    if any(v.kind != "a" for v in f.variables()):
        raise ValueError("multihomogenize expects a polynomial in a-variables")
    top = {v: f.degree_in(v) for v in f.variables()}
    out = {}
    for m, c in f.terms.items():
        d = dict(m)
        pad = [(_partner(v), top[v] - d.get(v, 0)) for v in top if top[v] > d.get(v, 0)]
        out[mono_mul(m, mono(*pad))] = c
    return Polynomial(out)


def dehomogenize(f: Polynomial) -> Polynomial:
    return f.substitute({v: 1 for v in f.variables() if v.kind == "b"})


def cell_degree(m: Monomial) -> tuple:
    """Z^{n^2} degree: a[i,j] and b[i,j] both count towards cell (i,j)."""
    acc: dict[tuple[int, int], int] = {}
    for v, e in m:
        acc[v.cell] = acc.get(v.cell, 0) + e
    return tuple(sorted(acc.items()))


def is_multihomogeneous(f: Polynomial) -> bool:
    return len({cell_degree(m) for m in f.terms}) <= 1


# ------------------------------------------------------------------ determinants

def determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Laplace expansion along rows with memoization on the used columns."""
    k = len(matrix)
    if any(len(r) != k for r in matrix):
        raise ValueError("matrix must be square")
    memo: dict[tuple[int, int], Polynomial] = {}

    def minor(r: int, used: int) -> Polynomial:
        if r == k:
            return Polynomial.const(1)
        key = (r, used)
        if key in memo:
            return memo[key]
        acc = Polynomial()
        sign = 1
        for col in range(k):
            if used >> col & 1:
                continue
            entry = matrix[r][col]
            if entry:
                sub = minor(r + 1, used | (1 << col))
                if sub:
                    acc = acc + (entry * sub if sign > 0 else -(entry * sub))
            sign = -sign
        memo[key] = acc
        return acc

    return minor(0, 0)


def symbolic_minor(rows: Sequence[int], cols: Sequence[int],
                   zero_cells: Iterable[tuple[int, int]] = ()) -> Polynomial:
    if len(rows) != len(cols):
        raise ValueError("minor must be square")
    zero = set(map(tuple, zero_cells))
    mat = [[Polynomial() if (r, c) in zero else Polynomial.var(a(r, c)) for c in cols]
           for r in rows]
    return determinant(mat)


def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial:
    """f / g, raising ArithmeticError unless g divides f exactly."""
    if not g:
        raise ZeroDivisionError("division by zero polynomial")
    order = TermOrder.lex(sorted(f.variables() | g.variables()))
    lc_g, lm_g = order.leading_term(g)
    q: dict[Monomial, Fraction] = {}
    rem = dict(f.terms)
    while rem:
        m = max(rem, key=order.key)
        dm = dict(m)
        for v, e in lm_g:
            if dm.get(v, 0) < e:
                raise ArithmeticError(f"{g} does not divide {f}")
            dm[v] -= e
        t = tuple(sorted((v, e) for v, e in dm.items() if e))
        c = rem[m] / lc_g
        q[t] = c
        for gm, gc in g.terms.items():
            mm = mono_mul(gm, t)
            val = rem.get(mm, 0) - c * gc
            if val:
                rem[mm] = val
            else:
                rem.pop(mm, None)
    return Polynomial(q)


# ------------------------------------------------------------------ term orders

class TermOrder:
    """Lex over a ranking (highest first), or a weight order with lex tiebreak."""

    def __init__(self, ranking: Sequence[Var], weights: Mapping[Var, int] | None = None,
                 label: str | None = None):
        self.ranking = tuple(ranking)
        if len(set(self.ranking)) != len(self.ranking):
            raise ValueError("ranking repeats a variable")
        self.index = {v: k for k, v in enumerate(self.ranking)}
        self.weights = None
        if weights is not None:
            missing = [v for v in self.ranking if v not in weights]
            if missing:
                raise ValueError(f"no weight for {missing[0]}")
            if any(weights[v] < 0 for v in self.ranking):
                raise ValueError("weights must be nonnegative")
            self.weights = tuple(int(weights[v]) for v in self.ranking)
        self.label = label

    @property
    def kind(self) -> str:
        return "lex" if self.weights is None else "weight"

    def exponent_vector(self, m: Monomial) -> tuple[int, ...]:
        vec = [0] * len(self.ranking)
        for v, e in m:
            try:
                vec[self.index[v]] = e
            except KeyError:
                raise ValueError(f"unranked variable {v}") from None
        return tuple(vec)

    def vector_key(self, vec: tuple[int, ...]):
        if self.weights is None:
            return vec
        return (sum(w * e for w, e in zip(self.weights, vec)), vec)

    def key(self, m: Monomial):
        return self.vector_key(self.exponent_vector(m))

    def compare(self, m1: Monomial, m2: Monomial) -> int:
        k1, k2 = self.key(m1), self.key(m2)
        return (k1 > k2) - (k1 < k2)

    def leading_term(self, f: Polynomial) -> tuple[Fraction, Monomial]:
        if not f:
            raise ValueError("zero polynomial has no leading term")
        m = max(f.terms, key=self.key)
        return f.terms[m], m

    def leading_monomial(self, f: Polynomial) -> Monomial:
        return self.leading_term(f)[1]

    def extended(self) -> "TermOrder":
        """Order on a- and b-variables comparing the a-part first.

        a^S b^T < a^S' b^T' whenever a^S < a^S'; the b-part only breaks ties.
        """
        avars = [v for v in self.ranking if v.kind == "a"]
        bvars = [Var("b", v.i, v.j) for v in avars]
        if self.weights is None:
            return TermOrder(avars + bvars, label=None)
        w = {v: wt for v, wt in zip(self.ranking, self.weights)}
        w.update({v: 0 for v in bvars})
        # zero weight on b keeps the weight comparison on the a-part; the lex
        # tiebreak sees all a-exponents before any b-exponent
        return TermOrder(avars + bvars, w)

    def spec(self) -> str:
        if self.label:
            return self.label
        if self.weights is None:
            return "lex:" + ">".join(map(str, self.ranking))
        ws = ",".join(f"{v}={w}" for v, w in zip(self.ranking, self.weights))
        return "weight:" + ws + ";lex:" + ">".join(map(str, self.ranking))

    def __repr__(self) -> str:
        return f"TermOrder({self.spec()[:60]})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, TermOrder) and self.ranking == other.ranking
                and self.weights == other.weights)

    def __hash__(self) -> int:
        return hash((self.ranking, self.weights))

    # constructors
    @classmethod
    def lex(cls, ranking: Sequence[Var]) -> "TermOrder":
        return cls(ranking)

    @classmethod
    def graded_lex(cls, ranking: Sequence[Var]) -> "TermOrder":
        return cls(ranking, {v: 1 for v in ranking}, label="grlex:" + ">".join(map(str, ranking)))

    @classmethod
    def random_lex(cls, variables: Iterable[Var], rng: random.Random) -> "TermOrder":
        vs = sorted(variables)
        rng.shuffle(vs)
        return cls(vs)

    @classmethod
    def random_weight(cls, variables: Iterable[Var], seed: int, max_weight: int = 1000) -> "TermOrder":
        rng = random.Random(f"weight:{seed}")
        vs = sorted(variables)
        weights = {v: rng.randint(1, max_weight) for v in vs}
        tie = list(vs)
        rng.shuffle(tie)
        return cls(tie, weights, label=f"weight:seed={seed}")


def parse_order(text: str, variables: Iterable[Var] = ()) -> TermOrder:
    """Parse an order spec; ``weight:seed=N`` and ``grlex`` need the variable set."""
    text = text.strip()
    if text.startswith("lex:"):
        return TermOrder([parse_var(t) for t in text[4:].split(">")])
    if text.startswith("grlex"):
        if text.startswith("grlex:"):
            return TermOrder.graded_lex([parse_var(t) for t in text[6:].split(">")])
        return TermOrder.graded_lex(sorted(variables))
    if text.startswith("weight:seed="):
        return TermOrder.random_weight(variables, int(text[len("weight:seed="):]))
    if text.startswith("weight:"):
        wpart, _, lpart = text[7:].partition(";lex:")
        weights = {}
        for item in wpart.split(","):
            k, _, val = item.partition("=")
            weights[parse_var(k)] = int(val)
        ranking = [parse_var(t) for t in lpart.split(">")] if lpart else sorted(weights)
        return TermOrder(ranking, weights)
    raise ValueError(f"unknown order spec {text!r}")
