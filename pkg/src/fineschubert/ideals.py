"""Fulton and CDG generators of matrix Schubert ideals and the merge closure R_w."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable

from .groebner import GroebnerBasis, buchberger
from .perm import (Permutation, as_perm, dominant_part, essential_set, rank_function)
from .poly import Polynomial, TermOrder, Var, a, symbolic_minor

Cell = tuple[int, int]


@dataclass(frozen=True)
class TaggedRelation:
    poly: Polynomial
    provenance: dict
    id: int = -1

    @property
    def spread(self) -> frozenset:
        return self.poly.spread()

    def to_json(self) -> dict:
        return {"id": self.id, "poly": self.poly.to_json(), "spread": sorted(map(list, self.spread)),
                "provenance": self.provenance}


@dataclass
class RelationSet:
    w: Permutation
    relations: list = field(default_factory=list)
    _index: dict = field(default_factory=dict, repr=False)

    def add(self, poly: Polynomial, provenance: dict) -> TaggedRelation | None:
        """Insert the primitive form of poly unless already present."""
        p = poly.normalized()
        if not p or p in self._index:
            return None
        rel = TaggedRelation(p, provenance, len(self.relations))
        self.relations.append(rel)
        self._index[p] = rel
        return rel

    def find(self, poly: Polynomial) -> TaggedRelation | None:
        return self._index.get(poly.normalized())

    def __contains__(self, poly: Polynomial) -> bool:
        return self.find(poly) is not None

    def __len__(self) -> int:
        return len(self.relations)

    def __iter__(self):
        return iter(self.relations)

    def polys(self) -> list[Polynomial]:
        return [r.poly for r in self.relations]

    def spreads(self) -> list[frozenset]:
        return [r.spread for r in self.relations]

    def to_json(self) -> dict:
        return {"w": str(self.w), "relations": [r.to_json() for r in self.relations]}

    @classmethod
    def from_json(cls, obj: dict) -> "RelationSet":
        rs = cls(Permutation.parse(obj["w"]))
        for item in obj["relations"]:
            rel = rs.add(Polynomial.from_json(item["poly"]), item["provenance"])
            if rel is None or rel.id != item["id"]:
                raise ValueError("relation list is not in canonical insertion order")
        return rs


# ------------------------------------------------------------------ generators

def fulton_generators(w) -> RelationSet:
    w = as_perm(w)
    out = RelationSet(w)
    for p, q in sorted(essential_set(w)):
        k = rank_function(w, p, q) + 1
        for rows in combinations(range(1, p + 1), k):
            for cols in combinations(range(1, q + 1), k):
                out.add(symbolic_minor(rows, cols),
                        {"kind": "fulton", "rows": list(rows), "cols": list(cols),
                         "ess_cell": [p, q]})
    return out


def pattern_factors(support: Iterable[Cell], rows: list[int], cols: list[int]) -> bool | None:
    """Does the determinant of a generic matrix with this zero pattern factor?

    Returns None when the determinant vanishes.  Otherwise the determinant is
    the product of the determinants of the fully indecomposable blocks of the
    pattern, each of which is irreducible, so it factors iff there are at least
    two blocks.  Blocks are the strong components of the row digraph induced
    by a perfect matching.
    """
    k = len(rows)
    ri = {r: t for t, r in enumerate(rows)}
    ci = {c: t for t, c in enumerate(cols)}
    adj = [[] for _ in range(k)]
    for r, c in support:
        adj[ri[r]].append(ci[c])
    match_col = [-1] * k

    def augment(u: int, seen: list[bool]) -> bool:
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_col[v] < 0 or augment(match_col[v], seen):
                    match_col[v] = u
                    return True
        return False

    for u in range(k):
        if not augment(u, [False] * k):
            return None
    # row u -> row matched to column v, for each edge (u, v)
    succ = [[match_col[v] for v in adj[u]] for u in range(k)]
    return _count_scc(succ) > 1


def _count_scc(succ: list[list[int]]) -> int:
    index, low, on, stack = {}, {}, set(), []
    count = 0
    counter = 0

    def visit(v: int):
        nonlocal count, counter
        index[v] = low[v] = counter
        counter += 1
        stack.append(v)
        on.add(v)
        for u in succ[v]:
            if u not in index:
                visit(u)
                low[v] = min(low[v], low[u])
            elif u in on:
                low[v] = min(low[v], index[u])
        if low[v] == index[v]:
            count += 1
            while True:
                u = stack.pop()
                on.discard(u)
                if u == v:
                    break

    for v in range(len(succ)):
        if v not in index:
            visit(v)
    return count


def cdg_generators(w) -> RelationSet:
    w = as_perm(w)
    dom = dominant_part(w)
    fulton = fulton_generators(w)
    out = RelationSet(w)
    for rel in fulton:
        prov = rel.provenance
        rows, cols = prov["rows"], prov["cols"]
        if len(rows) == 1:
            out.add(rel.poly, {"kind": "cdg", "from": prov})
            continue
        support = [(r, c) for r in rows for c in cols if (r, c) not in dom]
        factors = pattern_factors(support, rows, cols)
        if factors is None or factors:
            continue
        out.add(symbolic_minor(rows, cols, dom), {"kind": "cdg", "from": prov})
    return out


# ------------------------------------------------------------------ merge

def merge(f1, f2, at: Cell) -> Polynomial:
    """f1*g2 - f2*g1 where f_i = a[at]*g_i + r_i, returned in primitive form."""
    p1 = f1.poly if isinstance(f1, TaggedRelation) else f1
    p2 = f2.poly if isinstance(f2, TaggedRelation) else f2
    v = a(*at)
    if v not in p1.variables() or v not in p2.variables():
        raise ValueError(f"merge variable {v} is absent from an operand")
    g1, _ = p1.split(v)
    g2, _ = p2.split(v)
    return (p1 * g2 - p2 * g1).normalized()


class _Shape:
    __slots__ = ("cells", "rows", "cols")

    def __init__(self, spread: frozenset, n: int):
        self.cells = sum(1 << ((i - 1) * n + (j - 1)) for i, j in spread)
        self.rows = sum(1 << (i - 1) for i in {i for i, _ in spread})
        self.cols = sum(1 << (j - 1) for j in {j for _, j in spread})


def merge_site(s1: _Shape, s2: _Shape, n: int) -> Cell | None:
    """The merge cell if the two spreads satisfy all three intersection conditions."""
    common = s1.cells & s2.cells
    if not common or common & (common - 1):
        return None
    k = common.bit_length() - 1
    alpha, beta = k // n + 1, k % n + 1
    if s1.rows & s2.rows != 1 << (alpha - 1) or s1.cols & s2.cols != 1 << (beta - 1):
        return None
    return alpha, beta


def build_Rw(w, max_relations: int | None = None) -> RelationSet:
    """Close CDG(w) under admissible merges with a CDG partner."""
    from .hypergraph import GuardExceeded

    w = as_perm(w)
    n = w.n
    cdg = cdg_generators(w)
    out = RelationSet(w)
    for rel in cdg:
        out.add(rel.poly, dict(rel.provenance, id=rel.id))
    partners = [(rel, _Shape(rel.spread, n)) for rel in out]
    shapes = {rel.id: s for rel, s in partners}
    frontier = list(out)
    while frontier:
        fresh = []
        for f1 in frontier:
            s1 = shapes[f1.id]
            for f2, s2 in partners:
                site = merge_site(s1, s2, n)
                if site is None:
                    continue
                g = merge(f1, f2, site)
                if not g:
                    continue
                new = out.add(g, {"kind": "merge", "left": f1.id, "right": f2.id,
                                  "at": list(site)})
                if new is not None:
                    shapes[new.id] = _Shape(new.spread, n)
                    fresh.append(new)
                    if max_relations is not None and len(out) > max_relations:
                        raise GuardExceeded(f"more than {max_relations} relations")
        frontier = fresh
    return out


def cycle_relations(p: int, q: int) -> RelationSet:
    """Binomials of all cycles of K_{p,q} for the generic p x q matrix (rank <= 1 ideal)."""
    out = RelationSet(Permutation.identity(1))
    for k in range(2, min(p, q) + 1):
        for rows in combinations(range(1, p + 1), k):
            for cols in combinations(range(1, q + 1), k):
                first = rows[0]
                for rest in permutations(rows[1:]):
                    order = (first,) + rest
                    for colperm in permutations(cols):
                        left = Polynomial.const(1)
                        right = Polynomial.const(1)
                        for l in range(k):
                            left = left * Polynomial.var(a(order[l], colperm[l]))
                            right = right * Polynomial.var(a(order[(l + 1) % k], colperm[l]))
                        out.add(left - right, {"kind": "cycle", "rows": list(order),
                                               "cols": list(colperm)})
    return out


# ------------------------------------------------------------------ membership

@lru_cache(maxsize=256)
def fulton_groebner(w: Permutation) -> GroebnerBasis:
    gens = fulton_generators(w).polys()
    variables = sorted({a(i, j) for i in range(1, w.n + 1) for j in range(1, w.n + 1)})
    return buchberger(gens, TermOrder.graded_lex(variables))


def ideal_membership(f: Polynomial, w) -> bool:
    w = as_perm(w)
    if not f:
        return True
    gb = fulton_groebner(w)
    if not gb.gens:
        return False
    return gb.contains(f)


def row_set(cells: Iterable[Cell]) -> frozenset:
    return frozenset(i for i, _ in cells)


def col_set(cells: Iterable[Cell]) -> frozenset:
    return frozenset(j for _, j in cells)
