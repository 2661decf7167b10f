"""Fine Schubert polynomials: the 0/1 formula, a Jacobian support oracle, the
Groebner multiplicity path, spread complexes, certificates and the
coefficient inequalities for the diagram operators.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable

from .groebner import buchberger, initial_ideal, subspace_multiplicity_report
from .hypergraph import GuardExceeded, minimal_transversals
from .ideals import build_Rw, fulton_generators
from .perm import (Permutation, as_perm, avoids_P, collapse_column, column, cotransition_admissible,
                   cotransition_set, delete_position, delete_solid_column,
                   delete_special_column, dominant_part, grid, interesting_part,
                   is_solid_column, is_special_column, rothe_diagram, transition_target,
                   transpose, witness_pattern, components)
from .poly import Polynomial, TermOrder, a

Cell = tuple[int, int]
MERSENNE_61 = (1 << 61) - 1


# ------------------------------------------------------------------ fine polynomials

@dataclass(frozen=True)
class FinePolynomial:
    n: int
    degree: int
    terms: tuple  # sorted ((frozenset cells, coeff), ...)

    @classmethod
    def from_dict(cls, n: int, degree: int, terms: dict) -> "FinePolynomial":
        for S, c in terms.items():
            if len(S) != degree or c < 1:
                raise ValueError("terms must be size-degree sets with positive coefficients")
        items = sorted(((frozenset(S), int(c)) for S, c in terms.items()),
                       key=lambda t: sorted(t[0]))
        return cls(n, degree, tuple(items))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def support(self) -> frozenset:
        return frozenset(S for S, _ in self.terms)

    def coefficient(self, S: Iterable[Cell]) -> int:
        return self.as_dict().get(frozenset(S), 0)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero_one(self) -> bool:
        return all(c == 1 for _, c in self.terms)

    def transpose(self) -> "FinePolynomial":
        return FinePolynomial.from_dict(self.n, self.degree,
                                        {transpose(S): c for S, c in self.terms})

    def to_polynomial(self) -> Polynomial:
        from .poly import mono, z
        return Polynomial({mono(*[z(i, j) for i, j in S]): c for S, c in self.terms})

    def to_json(self) -> dict:
        return {"n": self.n, "degree": self.degree,
                "terms": [{"cells": sorted(map(list, S)), "coeff": c} for S, c in self.terms]}

    @classmethod
    def from_json(cls, obj) -> "FinePolynomial":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls.from_dict(obj["n"], obj["degree"],
                             {frozenset(map(tuple, t["cells"])): t["coeff"] for t in obj["terms"]})


class NotPAvoiding(ValueError):
    pass


@lru_cache(maxsize=512)
def rw_spreads(w: Permutation) -> tuple:
    return tuple(build_Rw(w).spreads())


def fine_schubert_01(w) -> FinePolynomial:
    """Sum of z^S over |S| = l(w) hitting every spread of R_w (P-avoiding w only)."""
    w = as_perm(w)
    if not avoids_P(w):
        raise NotPAvoiding(f"{w} contains {witness_pattern(w)}")
    cells = sorted(interesting_part(w))
    ell = w.length
    pos = {c: k for k, c in enumerate(cells)}
    edges = [sum(1 << pos[c] for c in s) for s in rw_spreads(w)]
    closing = [[] for _ in cells]  # edges whose last cell is index k
    for e in edges:
        closing[e.bit_length() - 1].append(e)
    found: list[int] = []

    def dfs(k: int, chosen: int, count: int):
        if count == ell:
            if all(e & chosen for e in edges):
                found.append(chosen)
            return
        if len(cells) - k < ell - count:
            return
        dfs(k + 1, chosen | 1 << k, count + 1)
        # leaving cell k out kills every unhit edge whose last cell is k
        if all(e & chosen for e in closing[k]):
            dfs(k + 1, chosen, count)

    dfs(0, 0, 0)
    terms = {frozenset(cells[k] for k in range(len(cells)) if m >> k & 1): 1 for m in found}
    return FinePolynomial.from_dict(w.n, ell, terms)


# ------------------------------------------------------------------ Jacobian oracle

@dataclass(frozen=True)
class OracleConfig:
    prime: int = MERSENNE_61
    trials: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.prime <= 1 << 60:
            raise ValueError("oracle prime must exceed 2^60")
        if self.trials < 1:
            raise ValueError("trials must be positive")


class _Echelon:
    """Incremental row echelon form over GF(p)."""

    __slots__ = ("p", "rows")

    def __init__(self, p: int, rows: dict | None = None):
        self.p = p
        self.rows = dict(rows) if rows else {}

    def copy(self) -> "_Echelon":
        return _Echelon(self.p, self.rows)

    def reduce(self, vec: dict) -> dict:
        p = self.p
        v = dict(vec)
        while v:
            piv = min(v)
            row = self.rows.get(piv)
            if row is None:
                return v
            c = v[piv]
            for k, x in row.items():
                t = (v.get(k, 0) - c * x) % p
                if t:
                    v[k] = t
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: dict) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        piv = min(v)
        inv = pow(v[piv], -1, self.p)
        self.rows[piv] = {k: x * inv % self.p for k, x in v.items()}
        return True


class JacobianPoint:
    """Differential of (L, R) -> L p_w R at a random point; one sparse row per matrix cell.

    L is unit lower-triangular and R upper-triangular, so the parameter count
    is n^2 and the image is dense in X_w.
    """

    def __init__(self, w: Permutation, cfg: OracleConfig, trial: int):
        self.w, self.p, self.trial = w, cfg.prime, trial
        self.seed_label = f"{cfg.seed}:{trial}"
        rng = random.Random(self.seed_label)
        n, p = w.n, cfg.prime
        L = [[0] * (n + 1) for _ in range(n + 1)]
        R = [[0] * (n + 1) for _ in range(n + 1)]
        for i in range(1, n + 1):
            L[i][i] = 1
            for b in range(1, i):
                L[i][b] = rng.randrange(p)
            for j in range(i, n + 1):
                R[i][j] = rng.randrange(1, p) if j == i else rng.randrange(p)
        self._L, self._R = L, R
        self._cache: dict[Cell, dict] = {}
        idx = {}
        for i in range(1, n + 1):
            for b in range(1, i):
                idx[("L", i, b)] = len(idx)
        for a_ in range(1, n + 1):
            for j in range(a_, n + 1):
                idx[("R", a_, j)] = len(idx)
        self._idx = idx

    def row(self, cell: Cell) -> dict:
        got = self._cache.get(cell)
        if got is not None:
            return got
        i, j = cell
        w, L, R, idx = self.w, self._L, self._R, self._idx
        winv = w.inverse
        vec = {}
        for b in range(1, i):  # d/dL[i,b] = (P R)[b,j] = R[w(b), j]
            x = R[w(b)][j]
            if x:
                vec[idx[("L", i, b)]] = x
        for a_ in range(1, j + 1):  # d/dR[a,j] = (L P)[i,a] = L[i, w^-1(a)]
            x = L[i][winv(a_)]
            if x:
                vec[idx[("R", a_, j)]] = x
        self._cache[cell] = vec
        return vec

    def rank(self, cells: Iterable[Cell]) -> int:
        ech = _Echelon(self.p)
        return sum(ech.add(self.row(c)) for c in cells)


@lru_cache(maxsize=256)
def _points(w: Permutation, cfg: OracleConfig) -> tuple:
    return tuple(JacobianPoint(w, cfg, t) for t in range(cfg.trials))


def failure_bound(w: Permutation, cfg: OracleConfig) -> float:
    """Schwartz-Zippel bound on a false 'not dominant' verdict across all trials."""
    return (w.n * w.n / cfg.prime) ** cfg.trials


def completable_report(w, U: Iterable[Cell], cfg: OracleConfig = OracleConfig()) -> dict:
    w = as_perm(w)
    U = sorted(set(map(tuple, U)))
    transcript = []
    ok = False
    for pt in _points(w, cfg):
        r = pt.rank(U)
        transcript.append({"seed": pt.seed_label, "rank": r, "target": len(U)})
        if r == len(U):
            ok = True
            break
    return {"completable": ok, "transcript": transcript,
            "false_negative_bound": 0.0 if ok else failure_bound(w, cfg)}


def completable_check(w, U: Iterable[Cell], cfg: OracleConfig = OracleConfig()) -> bool:
    return completable_report(w, U, cfg)["completable"]


def support_oracle(w, S: Iterable[Cell], cfg: OracleConfig = OracleConfig()) -> bool:
    w = as_perm(w)
    S = frozenset(map(tuple, S))
    if len(S) != w.length:
        raise ValueError(f"|S| = {len(S)} but l(w) = {w.length}")
    return completable_check(w, grid(w.n) - S, cfg)


def oracle_independent_sets(w, cells: Iterable[Cell], cfg: OracleConfig = OracleConfig(),
                            limit: int | None = None) -> set:
    """All subsets of cells that are completable, as frozensets.

    One DFS per sample point, keeping only independent extensions; the union
    over points is returned, so a set counts as completable as soon as any
    point certifies it.
    """
    w = as_perm(w)
    cells = sorted(set(cells))
    out: set = set()

    for pt in _points(w, cfg):
        def dfs(k: int, chosen: tuple, ech: _Echelon):
            out.add(frozenset(chosen))
            if limit is not None and len(out) > limit:
                raise GuardExceeded(f"more than {limit} subsets")
            for t in range(k, len(cells)):
                e2 = ech.copy()
                if e2.add(pt.row(cells[t])):
                    dfs(t + 1, chosen + (cells[t],), e2)

        dfs(0, (), _Echelon(cfg.prime))
    return out


def oracle_support(w, cfg: OracleConfig = OracleConfig(), limit: int | None = None) -> frozenset:
    """supp F_w from the oracle: complements of the spanning completable subsets of Phi(w)."""
    w = as_perm(w)
    phi = interesting_part(w)
    target = len(phi) - w.length
    indep = oracle_independent_sets(w, phi, cfg, limit)
    return frozenset(frozenset(phi - U) for U in indep if len(U) == target)


def fine_support(w, cfg: OracleConfig = OracleConfig(), method: str = "auto") -> frozenset:
    w = as_perm(w)
    if method == "formula" or (method == "auto" and avoids_P(w)):
        return fine_schubert_01(w).support()
    return oracle_support(w, cfg)


def rw_avoiding_check(w, U: Iterable[Cell]) -> bool:
    U = frozenset(map(tuple, U))
    return not any(s <= U for s in rw_spreads(as_perm(w)))


# ------------------------------------------------------------------ spread complexes

@dataclass
class SpreadComplex:
    n: int
    nonface_generators: list
    _facets: list | None = field(default=None, repr=False)

    @property
    def ground(self) -> frozenset:
        return grid(self.n)

    def facets(self, limit: int | None = None) -> list:
        if self._facets is None:
            g = self.ground
            self._facets = [g - T for T in minimal_transversals(self.nonface_generators, g, limit)]
        return self._facets

    def is_face(self, F: Iterable[Cell]) -> bool:
        F = frozenset(F)
        return not any(s <= F for s in self.nonface_generators)

    def is_pure(self, dim: int) -> bool:
        return all(len(F) == dim + 1 for F in self.facets())


def spread_complex(relations, n: int | None = None) -> SpreadComplex:
    polys = relations.polys() if hasattr(relations, "polys") else list(relations)
    spreads = [f.spread() for f in polys]
    if n is None:
        n = relations.w.n if hasattr(relations, "w") else max(
            (max(max(c) for c in s) for s in spreads if s), default=1)
    return SpreadComplex(n, spreads)


def ugb_certificate(w, cfg: OracleConfig = OracleConfig(), limit: int | None = None) -> dict:
    """Check the universal Groebner basis criterion for R_w with oracle transcripts."""
    w = as_perm(w)
    rels = build_Rw(w)
    n, ell = w.n, w.length
    report = {"w": str(w), "n": n, "length": ell, "relations": len(rels),
              "prime": cfg.prime, "trials": cfg.trials, "seed": cfg.seed,
              "avoids_P": avoids_P(w), "failures": []}
    nonsq = [r.id for r in rels if not r.poly.is_squarefree()]
    if nonsq:
        report["failures"].append({"reason": "relation not squarefree", "ids": nonsq})
    cx = spread_complex(rels, n)
    facets = cx.facets(limit)
    dim = n * n - ell - 1
    report["dimension"] = dim
    report["pure"] = cx.is_pure(dim)
    if not report["pure"]:
        bad = [F for F in facets if len(F) != dim + 1]
        report["failures"].append({"reason": "complex not pure",
                                   "facet": sorted(map(list, bad[0])), "size": len(bad[0])})
    report["facets"] = []
    for F in facets:
        rep = completable_report(w, F, cfg)
        report["facets"].append({"complement": sorted(map(list, grid(n) - F)),
                                 "completable": rep["completable"],
                                 "transcript": rep["transcript"]})
        if not rep["completable"]:
            report["failures"].append({"reason": "facet not completable",
                                       "complement": sorted(map(list, grid(n) - F))})
    report["n_facets"] = len(facets)
    report["passed"] = not report["failures"]
    if report["passed"]:
        report["claims"] = ["R_w is a universal Groebner basis of I_w",
                            "every coefficient of the fine Schubert polynomial is 0 or 1",
                            "supp = complements of the listed facets"]
    return report


# ------------------------------------------------------------------ Groebner path

def coefficient_via_groebner(gens: list, S: Iterable[Cell], max_spairs: int | None = None) -> dict:
    S = sorted(set(map(tuple, S)))
    svars = [a(i, j) for i, j in S]
    active = set()
    for g in gens:
        active |= g.variables()
    rest = sorted(active - set(svars))
    order = TermOrder.lex(svars + rest)
    gb = buchberger(gens, order, max_spairs)
    M = initial_ideal(gb)
    rep = subspace_multiplicity_report(M, svars)
    rep.update({"order": order.spec(), "gb_size": len(gb.gens), "spairs": gb.stats["spairs"]})
    return rep


def fine_coeff_groebner(w, S: Iterable[Cell], max_spairs: int | None = None) -> int:
    """Coefficient of z^S via the multiplicity of (a_S) in an S-first lex initial ideal."""
    w = as_perm(w)
    S = frozenset(map(tuple, S))
    if len(S) != w.length:
        raise ValueError(f"|S| = {len(S)} but l(w) = {w.length}")
    gens = fulton_generators(w).polys()
    if not gens:
        return 1 if not S else 0
    return coefficient_via_groebner(gens, S, max_spairs)["multiplicity"]


def determinantal_generators(p: int, q: int, r: int) -> list:
    """All (r+1)-minors of the generic p x q matrix."""
    from .poly import symbolic_minor
    return [symbolic_minor(R, C) for R in combinations(range(1, p + 1), r + 1)
            for C in combinations(range(1, q + 1), r + 1)]


# ------------------------------------------------------------------ operator inequalities

def _support_fn(cfg: OracleConfig, method: str) -> Callable:
    cache: dict = {}

    def supp(v: Permutation) -> frozenset:
        if v not in cache:
            cache[v] = fine_support(v, cfg, method)
        return cache[v]

    return supp


def _embed_minor(S: Iterable[Cell], k: int, wk: int) -> frozenset:
    return frozenset((i + (i >= k), j + (j >= wk)) for i, j in S)


def _iota(S: Iterable[Cell], c: int) -> frozenset:
    return frozenset((i, j + (j >= c)) for i, j in S)


def _contiguous(cells: frozenset) -> bool:
    rows = sorted(i for i, _ in cells)
    return bool(rows) and rows[-1] - rows[0] + 1 == len(rows)


def check_inequalities(w, operator: str, cfg: OracleConfig = OracleConfig(), *,
                       k: int | None = None, c: int | None = None, cell: Cell | None = None,
                       method: str = "auto") -> dict:
    """Check a coefficient relation between F_w and a smaller fine Schubert polynomial.

    Every record is (S, lhs, rhs) at support level: lhs = [S in supp F_w],
    rhs = the value implied by the smaller permutation(s).  A violation is a
    record where the relation fails.
    """
    w = as_perm(w)
    supp = _support_fn(cfg, method)
    if operator in ("special_row", "solid_row"):
        rep = check_inequalities(w.inverse, operator.replace("row", "col"), cfg, c=c if c else k,
                                 method=method)
        rep["operator"] = operator
        rep["transposed"] = True
        return rep
    zero_one = True
    records: list[dict] = []
    report: dict = {"w": str(w), "operator": operator}
    sw = supp(w)

    if operator == "pattern":
        ks = [k] if k else range(1, w.n + 1)
        for kk in ks:
            v = delete_position(w, kk)
            M = frozenset(x for x in rothe_diagram(w) if x[0] == kk or x[1] == w(kk))
            for T in supp(v):
                S = M | _embed_minor(T, kk, w(kk))
                records.append({"k": kk, "S": S, "lhs": S in sw, "rhs": True, "ok": S in sw})
    elif operator == "cotransition":
        ks = [k] if k else [kk for kk in range(1, w.n + 1) if cotransition_admissible(w, kk)]
        if not ks:
            raise ValueError("cotransition is not admissible at any position")
        for kk in ks:
            if not cotransition_admissible(w, kk):
                raise ValueError(f"cotransition is not admissible at {kk}")
            x = (kk, w(kk))
            tally: dict = {}
            for wp in cotransition_set(w, kk):
                for T in supp(wp):
                    if x in T:
                        tally[T - {x}] = tally.get(T - {x}, 0) + 1
            for S, cnt in tally.items():
                both01 = avoids_P(w) and all(avoids_P(wp) for wp in cotransition_set(w, kk))
                ok = S in sw and (not both01 or cnt <= 1)
                records.append({"k": kk, "S": S, "lhs": S in sw, "rhs": cnt, "ok": ok})
    elif operator == "transition":
        wp, rc = transition_target(w, cell)
        report["target"] = str(wp)
        report["cell"] = list(rc)
        swp = supp(wp)
        for S in sw:
            if rc in S:
                records.append({"S": S, "lhs": True, "rhs": (S - {rc}) in swp,
                                "ok": (S - {rc}) in swp})
        for T in swp:
            S = T | {rc}
            if rc not in T and S not in sw:
                records.append({"S": S, "lhs": False, "rhs": True, "ok": False})
    elif operator == "special_col":
        if c is None or not is_special_column(w, c):
            raise ValueError(f"column {c} is not special for {w}")
        wp = delete_special_column(w, c)
        report["target"] = str(wp)
        swp = supp(wp)
        D, dom, phi = rothe_diagram(w), dominant_part(w), interesting_part(w)
        Dc = column(D, c)
        nondom = Dc - dom
        connected = _contiguous(nondom)
        report["nondominant_connected"] = connected
        for T in swp:
            S = _iota(T, c) | Dc
            records.append({"case": "equal_column", "S": S, "lhs": S in sw, "rhs": True,
                            "ok": S in sw, "hypothesis": True})
        column_free = sorted(column(phi, c) - D)
        for T in swp:
            base = _iota(T, c)
            for drop in sorted(nondom):
                for add in column_free:
                    S = base | (Dc - {drop}) | {add}
                    if not S <= phi:
                        continue
                    records.append({"case": "one_off", "S": S, "lhs": S in sw, "rhs": True,
                                    "ok": S in sw or not connected, "hypothesis": connected})
    elif operator == "solid_col":
        if c is None or not is_solid_column(w, c):
            raise ValueError(f"column {c} is not solid for {w}")
        try:
            wp = delete_solid_column(w, c)
        except ValueError as exc:
            report.update({"applicable": False, "reason": str(exc), "records": [],
                           "violations": 0, "checked": 0})
            return report
        report["target"] = str(wp)
        if wp.length != w.length - 1:
            report.update({"applicable": False,
                           "reason": f"degree mismatch: l(w')={wp.length}, l(w)={w.length}",
                           "records": [], "violations": 0, "checked": 0})
            return report
        phi_c = sorted(column(interesting_part(w), c))
        for T in supp(wp):
            for x in phi_c:
                S = _iota(T, c) | {x}
                records.append({"S": S, "lhs": S in sw, "rhs": True, "ok": S in sw})
    else:
        raise ValueError(f"unknown operator {operator!r}")

    report["applicable"] = True
    report["checked"] = len(records)
    report["violations"] = sum(not r["ok"] for r in records)
    report["records"] = [dict(r, S=sorted(map(list, r["S"]))) for r in records]
    return report


def deletion_coefficients(w, c: int, S: Iterable[Cell], cfg: OracleConfig = OracleConfig(),
                          method: str = "auto") -> dict:
    """Both sides of the special-column comparison for one S."""
    w = as_perm(w)
    S = frozenset(map(tuple, S))
    wp = delete_special_column(w, c)
    T = collapse_column(S, c)
    left = S in fine_support(w, cfg, method)
    right = T in fine_support(wp, cfg, method)
    return {"w": str(w), "target": str(wp), "lhs": int(left), "rhs": int(right),
            "T": sorted(map(list, T))}


def schubert_bound_check(w, cfg: OracleConfig = OracleConfig()) -> dict:
    from .schubert import schubert_poly
    from .poly import mono, x as xvar

    w = as_perm(w)
    sch = schubert_poly(w)
    sup = fine_support(w, cfg)
    formula = avoids_P(w)
    bad = []
    for S in sup:
        m = mono(*[xvar(i) for i, _ in S])
        coeff = sch.terms.get(m, 0)
        # the formula gives coefficient 1; the oracle only certifies positivity
        if coeff < 1:
            bad.append(sorted(map(list, S)))
    return {"w": str(w), "supports": len(sup), "violations": bad, "passed": not bad,
            "method": "formula" if formula else "oracle"}


def basis_exchange_violations(support: Iterable[frozenset]) -> list:
    fam = set(support)
    out = []
    for A in fam:
        for B in fam:
            for x in A - B:
                if not any((A - {x}) | {y} in fam for y in B - A):
                    out.append((sorted(A), sorted(B), x))
    return out
