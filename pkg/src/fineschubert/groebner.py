"""Buchberger's algorithm, initial ideals, monomial-ideal tools and lifted
complexes of homogenized initial terms.

Inside the engine a monomial is a single Python int: exponents are packed in
16-bit fields with the highest-ranked variable most significant, and for a
weight order the weighted degree sits above the packed block.  Comparing the
ints is then exactly the term order, products are sums, and divisibility is a
guard-bit subtraction.
"""
from __future__ import annotations

import hashlib
import heapq
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain, permutations, product
from math import gcd
from typing import Hashable, Iterable, Sequence

from .hypergraph import GuardExceeded, minimal_transversals
from .poly import (Monomial, Polynomial, TermOrder, Var, mono_divides, multihomogenize,
                   parse_order)

_B = 16


class _Packer:
    def __init__(self, order: TermOrder):
        self.order = order
        n = len(order.ranking)
        self.n = n
        self.shift = n * _B
        self.packmask = (1 << self.shift) - 1
        self.guard = sum(1 << (k * _B + _B - 1) for k in range(n))
        self.low = sum(1 << (k * _B) for k in range(n))
        self.offsets = [(n - 1 - r) * _B for r in range(n)]
        self.weights = order.weights

    def pack_vec(self, vec: Sequence[int]) -> int:
        packed = 0
        for off, e in zip(self.offsets, vec):
            if e:
                packed |= e << off
        if self.weights is None:
            return packed
        return (sum(w * e for w, e in zip(self.weights, vec)) << self.shift) | packed

    def unpack(self, m: int) -> list[int]:
        p = m & self.packmask
        fmask = (1 << _B) - 1
        return [(p >> off) & fmask for off in self.offsets]

    def from_mono(self, m: Monomial) -> int:
        return self.pack_vec(self.order.exponent_vector(m))

    def to_mono(self, m: int) -> Monomial:
        vec = self.unpack(m)
        return tuple(sorted((v, e) for v, e in zip(self.order.ranking, vec) if e))

    def divides(self, a: int, b: int) -> bool:
        g = self.guard
        return ((b & self.packmask | g) - (a & self.packmask)) & g == g

    def support(self, m: int) -> int:
        return ((m & self.packmask | self.guard) - self.low) & self.guard

    def lcm(self, a: int, b: int) -> int:
        return self.pack_vec([max(x, y) for x, y in zip(self.unpack(a), self.unpack(b))])

    def degree(self, m: int) -> int:
        return sum(self.unpack(m))


def _content_normalize(p: dict[int, int]) -> dict[int, int]:
    if not p:
        return p
    g = 0
    for c in p.values():
        g = gcd(g, c)
        if g == 1:
            break
    lead = p[max(p)]
    if lead < 0:
        g = -g
    if g == 1:
        return p
    return {m: c // g for m, c in p.items()}


class _Engine:
    def __init__(self, order: TermOrder):
        self.pk = _Packer(order)

    def convert(self, f: Polynomial) -> dict[int, int]:
        f = f.normalized()
        return {self.pk.from_mono(m): int(c) for m, c in f.terms.items()}

    def back(self, p: dict[int, int], scale: int = 1) -> Polynomial:
        return Polynomial({self.pk.to_mono(m): Fraction(c, scale) for m, c in p.items()})

    def reduce(self, p: dict[int, int], basis: list[tuple[int, int, dict[int, int]]],
               full: bool = True) -> tuple[dict[int, int], Fraction]:
        """Normal form of p, up to the returned positive rational scale."""
        p = dict(p)
        rem: dict[int, int] = {}
        scale = Fraction(1)
        divides = self.pk.divides
        while p:
            m = max(p)
            c = p[m]
            for lm, lc, g in basis:
                if divides(lm, m):
                    q = m - lm
                    d = gcd(c, lc)
                    mp, mg = lc // d, c // d
                    if mp < 0:
                        mp, mg = -mp, -mg
                    if mp != 1:
                        p = {k: v * mp for k, v in p.items()}
                        rem = {k: v * mp for k, v in rem.items()}
                        scale *= mp
                    for gm, gc in g.items():
                        t = gm + q
                        v = p.get(t, 0) - mg * gc
                        if v:
                            p[t] = v
                        else:
                            p.pop(t, None)
                    if mp != 1 and p:
                        # strip the joint content before it compounds
                        cont = 0
                        for v in chain(p.values(), rem.values()):
                            cont = gcd(cont, v)
                            if cont == 1:
                                break
                        if cont > 1:
                            p = {k: v // cont for k, v in p.items()}
                            rem = {k: v // cont for k, v in rem.items()}
                            scale /= cont
                    break
            else:
                if not full:
                    rem.update(p)
                    break
                rem[m] = c
                del p[m]
        return rem, scale


@dataclass
class GroebnerBasis:
    gens: tuple
    order: TermOrder
    reduced: bool = True
    stats: dict = field(default_factory=dict)

    def leading_monomials(self) -> list[Monomial]:
        return [self.order.leading_monomial(g) for g in self.gens]

    def reduce(self, f: Polynomial) -> Polynomial:
        eng = _Engine(self.order)
        basis = []
        for g in self.gens:
            gi = eng.convert(g)
            lm = max(gi)
            basis.append((lm, gi[lm], gi))
        if not f:
            return f
        f_norm = f.normalized()
        ratio = next(iter(f.terms.values())) / f_norm.terms[next(iter(f.terms))]
        rem, scale = eng.reduce(eng.convert(f), basis)
        return eng.back(rem, scale) * ratio

    def contains(self, f: Polynomial) -> bool:
        return not self.reduce(f)

    def digest(self) -> str:
        data = sorted(json.dumps(g.normalized().to_json(), sort_keys=True) for g in self.gens)
        return hashlib.sha256("\n".join(data).encode()).hexdigest()[:16]


def _update(pk: _Packer, lms: list[int], G: list[int], pairs: dict, h: int):
    """Gebauer-Moeller installation of a new basis element h."""
    lmh = lms[h]
    lcm_h = {g: pk.lcm(lmh, lms[g]) for g in G}
    supp_h = pk.support(lmh)
    C = list(G)
    D: list[int] = []
    while C:
        g1 = C.pop(0)
        l1 = lcm_h[g1]
        coprime = not (supp_h & pk.support(lms[g1]))
        if coprime or not any(pk.divides(lcm_h[g2], l1) for g2 in C + D):
            D.append(g1)
    E = [g for g in D if supp_h & pk.support(lms[g])]
    for key in list(pairs):
        g1, g2 = key
        l12 = pairs[key]
        if pk.divides(lmh, l12) and pk.lcm(lms[g1], lmh) != l12 and pk.lcm(lms[g2], lmh) != l12:
            del pairs[key]
    for g in E:
        pairs[(g, h)] = lcm_h[g]
    newG = [g for g in G if not pk.divides(lmh, lms[g])]
    newG.append(h)
    return newG


def _interreduce(eng: _Engine, ps: list[dict[int, int]]) -> list[dict[int, int]]:
    """Reduce each input by its predecessors until nothing changes."""
    while True:
        out: list[dict[int, int]] = []
        for p in ps:
            rem, _ = eng.reduce(p, [(max(q), q[max(q)], q) for q in out])
            if rem:
                out.append(_content_normalize(rem))
        if out == ps:
            return out
        ps = out


def buchberger(gens: Iterable[Polynomial], order: TermOrder,
               max_spairs: int | None = None) -> GroebnerBasis:
    """Reduced Groebner basis (elements primitive over Z, positive leading coefficient)."""
    eng = _Engine(order)
    pk = eng.pk
    polys: list[dict[int, int]] = []
    lms: list[int] = []
    G: list[int] = []
    pairs: dict[tuple[int, int], int] = {}
    heap: list = []
    sugar: list[int] = []
    processed = 0

    def basis():
        return [(lms[g], polys[g][lms[g]], polys[g]) for g in G]

    def install(p: dict[int, int], sug: int):
        nonlocal G
        p = _content_normalize(p)
        polys.append(p)
        lms.append(max(p))
        sugar.append(sug)
        h = len(polys) - 1
        before = set(pairs)
        G = _update(pk, lms, G, pairs, h)
        # keep tails reduced against the newcomer; leading terms are unchanged
        newcomer = [(lms[h], p[lms[h]], p)]
        for g in G[:-1]:
            lm = lms[g]
            tail = {m: c for m, c in polys[g].items() if m != lm}
            if not any(pk.divides(lms[h], m) for m in tail):
                continue
            rem, scale = eng.reduce(tail, newcomer)
            q = {lm: polys[g][lm] * scale.numerator}
            for m, c in rem.items():
                q[m] = c * scale.denominator
            polys[g] = _content_normalize(q)
        for key in set(pairs) - before:
            lcm = pairs[key]
            dl = pk.degree(lcm)
            s = max(sugar[k] + dl - pk.degree(lms[k]) for k in key)
            heapq.heappush(heap, (lcm, s, key))

    for p in _interreduce(eng, [eng.convert(f) for f in gens if f]):
        install(p, max(pk.degree(m) for m in p))
    while heap:
        lcm, sug, key = heapq.heappop(heap)
        if pairs.get(key) != lcm:
            continue
        del pairs[key]
        processed += 1
        if max_spairs is not None and processed > max_spairs:
            raise GuardExceeded(f"more than {max_spairs} S-pairs")
        i, j = key
        pi, pj = polys[i], polys[j]
        ci, cj = pi[lms[i]], pj[lms[j]]
        qi, qj = lcm - lms[i], lcm - lms[j]
        d = gcd(ci, cj)
        s: dict[int, int] = {}
        for m, c in pi.items():
            s[m + qi] = c * (cj // d)
        for m, c in pj.items():
            t = m + qj
            v = s.get(t, 0) - c * (ci // d)
            if v:
                s[t] = v
            else:
                s.pop(t, None)
        rem, _ = eng.reduce(s, basis())
        if rem:
            install(rem, sug)
    # interreduce the minimal basis
    final = []
    current = basis()
    for idx, g in enumerate(G):
        others = [bb for k, bb in enumerate(current) if k != idx]
        lm = lms[g]
        head = {lm: polys[g][lm]}
        tail = {m: c for m, c in polys[g].items() if m != lm}
        rem, scale = eng.reduce(tail, others)
        p = {m: c * scale.numerator for m, c in head.items()}
        for m, c in rem.items():
            p[m] = p.get(m, 0) + c * scale.denominator
        final.append(_content_normalize(p))
    final.sort(key=max, reverse=True)
    out = tuple(eng.back(p) for p in final)
    return GroebnerBasis(out, order, True, {"spairs": processed, "size": len(out)})


# ------------------------------------------------------------------ monomial ideals

def _minimalize(monos: Iterable[Monomial]) -> tuple:
    ms = sorted(set(monos), key=lambda m: (sum(e for _, e in m), m))
    keep: list[Monomial] = []
    for m in ms:
        if not any(mono_divides(k, m) for k in keep):
            keep.append(m)
    return tuple(sorted(keep))


@dataclass(frozen=True)
class MonomialIdeal:
    min_gens: tuple

    def __init__(self, gens: Iterable[Monomial]):
        object.__setattr__(self, "min_gens", _minimalize(gens))

    def contains(self, m: Monomial) -> bool:
        return any(mono_divides(g, m) for g in self.min_gens)

    def is_squarefree(self) -> bool:
        return all(e == 1 for g in self.min_gens for _, e in g)

    def variables(self) -> frozenset:
        return frozenset(v for g in self.min_gens for v, _ in g)


def initial_ideal(gb: GroebnerBasis) -> MonomialIdeal:
    return MonomialIdeal(gb.leading_monomials())


def monomial_minimal_primes(M: MonomialIdeal) -> list[frozenset]:
    """Minimal primes as variable sets (minimal covers of the generator supports)."""
    if any(not g for g in M.min_gens):
        return []  # unit ideal
    return minimal_transversals([{v for v, _ in g} for g in M.min_gens])


def stanley_reisner_facets(M: MonomialIdeal, ground: Iterable[Var]) -> list[frozenset]:
    ground = frozenset(ground)
    return [ground - p for p in monomial_minimal_primes(M)]


def subspace_multiplicity_report(M: MonomialIdeal, S: Iterable[Var]) -> dict:
    S = frozenset(S)
    local = []
    for g in M.min_gens:
        part = tuple((v, e) for v, e in g if v in S)
        if not part:
            return {"multiplicity": 0, "reason": "prime does not contain the ideal"}
        local.append(part)
    local = _minimalize(local)
    caps = {}
    for g in local:
        if len(g) == 1:
            v, e = g[0]
            caps[v] = min(e, caps.get(v, e))
    if set(caps) != S:
        return {"multiplicity": 0, "reason": "non-artinian localization",
                "missing_powers": sorted(map(str, S - set(caps)))}
    svars = sorted(S)
    gens = [tuple((svars.index(v), e) for v, e in g) for g in local]
    count = 0
    for vec in product(*(range(caps[v]) for v in svars)):
        if not any(all(vec[k] >= e for k, e in g) for g in gens):
            count += 1
    return {"multiplicity": count, "reason": "ok"}


def subspace_multiplicity(M: MonomialIdeal, S: Iterable[Var]) -> int:
    return subspace_multiplicity_report(M, S)["multiplicity"]


# ------------------------------------------------------------------ universal GB sampling

@dataclass
class OrderSampling:
    count: int = 50
    seed: int = 0
    extra: tuple = ()
    exhaustive_lex_max_vars: int = 7

    def orders(self, variables: Iterable[Var]) -> list[TermOrder]:
        vs = sorted(variables)
        out = [parse_order(s, vs) for s in self.extra]
        if len(vs) <= self.exhaustive_lex_max_vars:
            out.extend(TermOrder.lex(p) for p in permutations(vs))
            return out
        rng = random.Random(f"lex:{self.seed}")
        n_weight = self.count // 2
        for k in range(self.count - n_weight):
            out.append(TermOrder.random_lex(vs, rng))
        for k in range(n_weight):
            out.append(TermOrder.random_weight(vs, self.seed * 100003 + k))
        return out


def _active_variables(polys: Iterable[Polynomial]) -> frozenset:
    out = set()
    for f in polys:
        out |= f.variables()
    return frozenset(out)


def ugb_sample_check(gens: Sequence[Polynomial], ideal_gens: Sequence[Polynomial],
                     sampling: OrderSampling | None = None,
                     max_spairs: int | None = None) -> dict:
    """Check in(gens) = in(ideal) for sampled term orders.

    Each order runs Buchberger on gens + ideal_gens.  Membership of gens in the
    ideal is verified first, so this computes the reduced basis of the ideal
    itself; seeding with gens only changes the running time.
    """
    sampling = sampling or OrderSampling()
    gens = [g for g in gens if g]
    ideal_gens = [g for g in ideal_gens if g]
    variables = _active_variables(list(gens) + list(ideal_gens))
    ref_order = TermOrder.graded_lex(sorted(variables))
    ref = buchberger(ideal_gens, ref_order, max_spairs)
    outside = [str(g) for g in gens if not ref.contains(g)]
    report = {"orders": [], "passed": not outside, "gens_outside_ideal": outside,
              "n_gens": len(gens), "variables": len(variables)}
    if outside:
        return report
    for order in sampling.orders(variables):
        gb = buchberger(list(gens) + list(ideal_gens), order, max_spairs)
        lead = [order.leading_monomial(g) for g in gens]
        missing = [m for m in initial_ideal(gb).min_gens
                   if not any(mono_divides(l, m) for l in lead)]
        ok = not missing
        report["orders"].append({
            "order": order.spec(), "pass": ok, "gb_hash": gb.digest(),
            "gb_size": len(gb.gens),
            "missing": [" ".join(f"{v}^{e}" for v, e in m) for m in missing[:5]],
        })
        report["passed"] &= ok
    report["failures"] = sum(not r["pass"] for r in report["orders"])
    return report


# ------------------------------------------------------------------ lifted complexes

@dataclass
class LiftedComplex:
    """Nonface lifts on the doubled ground set; (e, True) is the barred copy of e."""

    ground: tuple
    lifts: list

    def doubled(self) -> list:
        return [(e, False) for e in self.ground] + [(e, True) for e in self.ground]

    def base_nonfaces(self) -> list[frozenset]:
        return [frozenset(e for e, _ in L) for L in self.lifts]

    def facets(self) -> list[frozenset]:
        everything = frozenset(self.doubled())
        return [everything - t for t in minimal_transversals(self.lifts, self.doubled())]

    def is_face(self, F: Iterable) -> bool:
        F = frozenset(F)
        return not any(L <= F for L in self.lifts)


def lift_complex(gens: Sequence[Polynomial], order: TermOrder,
                 ground: Iterable[Hashable] | None = None) -> LiftedComplex:
    """Lifts from initial terms of homogenized gens under the a-then-b extension."""
    ext = order.extended()
    lifts = []
    cells = set()
    for f in gens:
        fh = multihomogenize(f)
        _, lm = ext.leading_term(fh)
        if any(e > 1 for _, e in lm):
            raise ValueError(f"initial term of {fh} is not squarefree")
        L = frozenset((v.cell, v.kind == "b") for v, _ in lm)
        if len({c for c, _ in L}) != len(L):
            raise ValueError(f"initial term of {fh} uses both copies of a cell")
        lifts.append(L)
        cells |= f.spread()
    ground = tuple(sorted(ground if ground is not None else cells))
    return LiftedComplex(ground, lifts)


def check_full_lift(lc: LiftedComplex, base_facets: Iterable[Iterable]) -> dict:
    base = [frozenset(F) for F in base_facets]
    full = True
    witness = {}
    for F in base:
        rest = [e for e in lc.ground if e not in F]
        core = [(e, False) for e in F] + [(e, True) for e in F]
        found = None
        for choice in product((False, True), repeat=len(rest)):
            cand = core + [(e, c) for e, c in zip(rest, choice)]
            if lc.is_face(cand):
                found = frozenset(cand)
                break
        if found is None:
            full = False
        witness[F] = found
    report = {"full": full, "base_facets": len(base)}
    if not full:
        return report
    tilde = lc.facets()
    base_set = set(base)
    extending: dict[frozenset, list] = {F: [] for F in base}
    stray = []
    for T in tilde:
        meets = all((e, False) in T or (e, True) in T for e in lc.ground)
        core = frozenset(e for e in lc.ground if (e, False) in T and (e, True) in T)
        if meets and core in base_set:
            extending[core].append(T)
        else:
            stray.append(T)
    report["tilde_facets"] = len(tilde)
    report["bijection"] = not stray and all(len(v) == 1 for v in extending.values())
    return report


def lifted_multidegree(lc: LiftedComplex) -> dict[frozenset, int]:
    """Sum over facets T of the lifted complex of prod z_e over e not doubled in T."""
    out: dict[frozenset, int] = {}
    for T in lc.facets():
        S = frozenset(e for e in lc.ground if not ((e, False) in T and (e, True) in T))
        out[S] = out.get(S, 0) + 1
    return out
