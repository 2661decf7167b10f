"""Permutations, Rothe diagrams, rank data and the diagram operators.

Everything is 1-indexed.  Cell sets are plain ``frozenset``s of ``(row, col)``
pairs; :func:`cells_to_json` / :func:`cells_from_json` give the wire format.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator

Cell = tuple[int, int]
Cells = frozenset  # frozenset[Cell]

PATTERNS_P = (
    "12543", "13254", "13524", "14253", "13542", "15243", "21543",
    "125634", "215634", "315624", "251634", "315642", "261534",
)


@dataclass(frozen=True)
class Permutation:
    word: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(v) for v in self.word)
        if sorted(w) != list(range(1, len(w) + 1)):
            raise ValueError(f"not a permutation of [{len(w)}]: {w}")
        object.__setattr__(self, "word", w)

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        text = text.strip()
        if not text:
            return cls(())
        if "," in text or " " in text:
            parts = [p for p in text.replace(",", " ").split() if p]
        else:
            parts = list(text)
        try:
            return cls(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise ValueError(f"malformed permutation {text!r}: {exc}") from None

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def longest(cls, n: int) -> "Permutation":
        return cls(tuple(range(n, 0, -1)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        w = list(range(1, n + 1))
        w[i - 1], w[j - 1] = w[j - 1], w[i - 1]
        return cls(tuple(w))

    @property
    def n(self) -> int:
        return len(self.word)

    def __call__(self, i: int) -> int:
        return self.word[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (u*v)(i) = u(v(i))
        if self.n != other.n:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.word[v - 1] for v in other.word))

    @cached_property
    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.word, 1):
            inv[v - 1] = i
        return Permutation(tuple(inv))

    @cached_property
    def length(self) -> int:
        w = self.word
        return sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])

    def swap_positions(self, i: int, j: int) -> "Permutation":
        """w * t_{i,j}"""
        w = list(self.word)
        w[i - 1], w[j - 1] = w[j - 1], w[i - 1]
        return Permutation(tuple(w))

    def swap_values(self, a: int, b: int) -> "Permutation":
        """t_{a,b} * w"""
        return Permutation(tuple(b if v == a else a if v == b else v for v in self.word))

    def embed(self, m: int) -> "Permutation":
        return Permutation(self.word + tuple(range(self.n + 1, m + 1)))

    def __str__(self) -> str:
        if self.n >= 10:
            return ",".join(map(str, self.word))
        return "".join(map(str, self.word))

    def __repr__(self) -> str:
        return f"Permutation({self})"


def all_permutations(n: int) -> Iterator[Permutation]:
    from itertools import permutations
    for p in permutations(range(1, n + 1)):
        yield Permutation(p)


def as_perm(w) -> Permutation:
    if isinstance(w, Permutation):
        return w
    if isinstance(w, str):
        return Permutation.parse(w)
    return Permutation(tuple(w))


# ---------------------------------------------------------------- cell sets

def cells_to_json(cells: Iterable[Cell], n: int) -> dict:
    return {"n": n, "cells": [list(c) for c in sorted(cells)]}


def cells_from_json(obj, n: int | None = None) -> frozenset:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if isinstance(obj, dict):
        n = obj.get("n", n)
        obj = obj["cells"]
    out = frozenset((int(i), int(j)) for i, j in obj)
    if n is not None:
        bad = [c for c in out if not (1 <= c[0] <= n and 1 <= c[1] <= n)]
        if bad:
            raise ValueError(f"cells out of range for n={n}: {sorted(bad)}")
    return out


def transpose(cells: Iterable[Cell]) -> frozenset:
    return frozenset((j, i) for i, j in cells)


def grid(n: int) -> frozenset:
    return frozenset((i, j) for i in range(1, n + 1) for j in range(1, n + 1))


def components(cells: Iterable[Cell]) -> list[frozenset]:
    """Connected components under edge adjacency, sorted by their first cell."""
    todo = set(cells)
    out = []
    while todo:
        start = min(todo)
        todo.discard(start)
        comp, stack = {start}, [start]
        while stack:
            i, j = stack.pop()
            for nb in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                if nb in todo:
                    todo.discard(nb)
                    comp.add(nb)
                    stack.append(nb)
        out.append(frozenset(comp))
    out.sort(key=min)
    return out


def column(cells: Iterable[Cell], c: int) -> frozenset:
    return frozenset(x for x in cells if x[1] == c)


def row(cells: Iterable[Cell], r: int) -> frozenset:
    return frozenset(x for x in cells if x[0] == r)


# ---------------------------------------------------------------- diagrams

@lru_cache(maxsize=None)
def rothe_diagram(w: Permutation) -> frozenset:
    inv = w.inverse
    n = w.n
    return frozenset(
        (i, j)
        for i in range(1, n + 1)
        for j in range(1, w(i))
        if inv(j) > i
    )


@lru_cache(maxsize=None)
def _rank_table(w: Permutation) -> tuple[tuple[int, ...], ...]:
    n = w.n
    tab = [[0] * (n + 1) for _ in range(n + 1)]
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            tab[p][q] = tab[p - 1][q] + tab[p][q - 1] - tab[p - 1][q - 1] + (w(p) == q)
    return tuple(tuple(r) for r in tab)


def rank_function(w: Permutation, p: int, q: int) -> int:
    if not (1 <= p <= w.n and 1 <= q <= w.n):
        raise ValueError(f"({p},{q}) outside [{w.n}]x[{w.n}]")
    return _rank_table(w)[p][q]


@lru_cache(maxsize=None)
def essential_set(w: Permutation) -> frozenset:
    n, inv = w.n, w.inverse
    out = set()
    for i, j in rothe_diagram(w):
        below = w(i + 1) if i < n else 0
        right = inv(j + 1) if j < n else 0
        if below <= j and right <= i:
            out.add((i, j))
    return frozenset(out)


@lru_cache(maxsize=None)
def dominant_part(w: Permutation) -> frozenset:
    return frozenset(c for c in rothe_diagram(w) if _rank_table(w)[c[0]][c[1]] == 0)


@lru_cache(maxsize=None)
def interesting_part(w: Permutation) -> frozenset:
    out = set()
    for p, q in essential_set(w):
        out.update((i, j) for i in range(1, p + 1) for j in range(1, q + 1))
    return frozenset(out)


@dataclass(frozen=True)
class DiagramRegion:
    cells: frozenset
    rank: int


def regions(w: Permutation) -> list[DiagramRegion]:
    out = []
    for comp in components(rothe_diagram(w)):
        i, j = min(comp)
        out.append(DiagramRegion(comp, rank_function(w, i, j)))
    return out


def region_of(w: Permutation, cell: Cell) -> frozenset:
    for comp in components(rothe_diagram(w)):
        if cell in comp:
            return comp
    raise ValueError(f"{cell} not in D({w})")


# ---------------------------------------------------------------- patterns

def pattern_occurrence(w: Permutation, v: Permutation) -> tuple[int, ...] | None:
    """Positions of the first occurrence of the pattern v in w, or None."""
    k, word, pat = v.n, w.word, v.word
    if k > w.n:
        return None
    chosen: list[int] = []

    def extend(start: int) -> bool:
        m = len(chosen)
        if m == k:
            return True
        for pos in range(start, len(word) - (k - m) + 1):
            val = word[pos]
            if all((word[chosen[t]] < val) == (pat[t] < pat[m]) for t in range(m)):
                chosen.append(pos)
                if extend(pos + 1):
                    return True
                chosen.pop()
        return False

    return tuple(p + 1 for p in chosen) if extend(0) else None


def contains_pattern(w: Permutation, v: Permutation) -> bool:
    return pattern_occurrence(w, v) is not None


_P_PERMS = tuple(Permutation.parse(p) for p in PATTERNS_P)


def witness_pattern(w: Permutation) -> Permutation | None:
    for v in _P_PERMS:
        if contains_pattern(w, v):
            return v
    return None


@lru_cache(maxsize=None)
def avoids_P(w: Permutation) -> bool:
    return witness_pattern(w) is None


def diagram_violations(w: Permutation, literal: bool = False) -> list[dict]:
    """Cells at which the diagram-side characterization of P-avoidance fails.

    For a northwest corner (p, q) of a non-dominant region the block condition
    is imposed when the rectangle [p-1]x[q-1] holds at least two dots.  With
    ``literal=True`` it is imposed only in the two local situations
    w(p-1) != q-1, or w(p-1) = q-1 and w(p-2) = q-2; that narrower test misses
    permutations such as 213654.
    """
    D = rothe_diagram(w)
    dom = dominant_part(w)
    n = w.n
    bad = []
    # outer corners of the dominant part
    for p in range(1, n + 1):
        q0 = w(p)
        if p > 1 and (p - 1, q0) not in dom:
            continue
        if q0 > 1 and (p, q0 - 1) not in dom:
            continue
        seed = (p + 1, q0 + 1)
        if seed not in D:
            continue
        quadrant = frozenset(c for c in D if c[0] > p and c[1] > q0)
        attached = next(comp for comp in components(quadrant) if seed in comp)
        stray = sorted(c for c in quadrant - attached if c[0] != p + 1 and c[1] != q0 + 1)
        if stray:
            bad.append({"kind": "outer_corner", "corner": (p, q0), "cells": stray})
    # northwest corners of the other regions
    padded = (None,) + w.word  # w(0) is undefined and matches nothing
    for p, q in sorted(D - dom):
        if (p - 1, q) in D or (p, q - 1) in D:
            continue
        if literal:
            above = padded[p - 1]
            above2 = padded[p - 2] if p >= 2 else None
            if above == q - 1 and above2 != q - 2:
                continue
        elif _rank_table(w)[p - 1][q - 1] < 2:
            continue
        block = [c for c in D if c[0] >= p and c[1] >= q]
        if not (all(c[0] == p for c in block) or all(c[1] == q for c in block)):
            bad.append({"kind": "nw_corner", "corner": (p, q), "cells": sorted(block)})
    return bad


def avoids_P_via_diagram(w: Permutation, literal: bool = False) -> bool:
    return not diagram_violations(w, literal)


# ---------------------------------------------------------------- operators

def flatten(values: Iterable[int]) -> tuple[int, ...]:
    vals = list(values)
    ranks = {v: r for r, v in enumerate(sorted(vals), 1)}
    return tuple(ranks[v] for v in vals)


def delete_position(w: Permutation, k: int) -> Permutation:
    if not 1 <= k <= w.n:
        raise ValueError(f"position {k} out of range for n={w.n}")
    return Permutation(flatten(v for i, v in enumerate(w.word, 1) if i != k))


def is_cover(w: Permutation, i: int, j: int) -> bool:
    """Whether w*t_{i,j} covers w in Bruhat order."""
    if i > j:
        i, j = j, i
    lo, hi = w(i), w(j)
    if lo > hi:
        return False
    return not any(lo < w(m) < hi for m in range(i + 1, j))


def cotransition_admissible(w: Permutation, k: int) -> bool:
    return not any(is_cover(w, a, k) for a in range(1, k))


def cotransition_set(w: Permutation, k: int) -> frozenset:
    if not 1 <= k <= w.n:
        raise ValueError(f"position {k} out of range for n={w.n}")
    if not cotransition_admissible(w, k):
        raise ValueError(f"cotransition at {k} is not admissible for {w}")
    return frozenset(w.swap_positions(k, b) for b in range(k + 1, w.n + 1) if is_cover(w, k, b))


def transition_cells(w: Permutation) -> list[Cell]:
    """Essential cells with no other diagram cell weakly southeast of them."""
    D = rothe_diagram(w)
    return sorted(
        (r, c) for r, c in essential_set(w)
        if all(x < r or y < c for x, y in D if (x, y) != (r, c))
    )


def transition_target(w: Permutation, cell: Cell | None = None) -> tuple[Permutation, Cell]:
    ok = transition_cells(w)
    if cell is None:
        if not ok:
            raise ValueError(f"{w} has no transition cell")
        cell = max(ok)
    elif tuple(cell) not in ok:
        raise ValueError(f"{cell} is not a transition cell of {w}")
    r, c = cell
    return w.swap_positions(r, w.inverse(c)), (r, c)


def _col_max_row(D: frozenset, c: int) -> int:
    return max(i for i, j in D if j == c)


def is_special_column(w: Permutation, c: int) -> bool:
    if not 1 <= c <= w.n:
        return False
    D = rothe_diagram(w)
    col = column(D, c)
    if not col - dominant_part(w):
        return False
    r = max(i for i, _ in col)
    return not any(i > r and j >= c for i, j in D)


def delete_special_column(w: Permutation, c: int) -> Permutation:
    if not is_special_column(w, c):
        raise ValueError(f"column {c} is not special for {w}")
    D = rothe_diagram(w)
    r = _col_max_row(D, c)
    while (r, c + 1) in D:
        c += 1
    out: list[int] = []
    for i, v in enumerate(w.word, 1):
        if v < c:
            out.append(v)
        elif i <= r and v > c:
            out.append(v - 1)
        else:
            used = set(out)
            out.append(min(x for x in range(c + 1, w.n + 1) if x not in used))
    return Permutation(tuple(out))


@lru_cache(maxsize=None)
def is_solid_column(w: Permutation, c: int) -> bool:
    if not 1 <= c < w.n:
        return False
    D, dom = rothe_diagram(w), dominant_part(w)
    if not column(D, c) <= dom:
        return False
    if is_solid_column(w, c + 1):
        return True
    return is_special_column(w, c + 1) and len(column(D, c + 1) - dom) == 1


def solid_run(w: Permutation, c: int) -> int:
    """Smallest k >= 1 with column c+k not solid."""
    k = 1
    while is_solid_column(w, c + k):
        k += 1
    return k


def delete_solid_column(w: Permutation, c: int) -> Permutation:
    """Delete a solid column by the recursive reduction to a special column.

    Raises ValueError when the reduction lands on a permutation for which c
    is not special (this happens, e.g., whenever c = 1 and w^-1(1) > w^-1(2)).
    """
    if not is_solid_column(w, c):
        raise ValueError(f"column {c} is not solid for {w}")
    k = solid_run(w, c)
    inv = w.inverse
    if inv(c) < inv(c + 1):
        if k == 1:
            return delete_special_column(w, c + 1)
        return delete_solid_column(w, c + 1)
    chain = [c] + [c + l for l in range(1, k) if inv(c + l) > inv(c)]
    assert all(inv(a) < inv(b) for a, b in zip(chain, chain[1:]))
    chain.append(c + k)
    wt = w
    for a, b in reversed(list(zip(chain, chain[1:]))):
        wt = wt.swap_values(a, b)
    if not is_special_column(wt, c):
        raise ValueError(f"solid reduction of {w} at column {c} gives {wt}, where {c} is not special")
    return delete_special_column(wt, c)


def solid_surgery(w: Permutation, c: int) -> frozenset:
    """Diagram the solid deletion is described as producing."""
    D = rothe_diagram(w)
    k = solid_run(w, c)
    extra = column(D, c + k) - dominant_part(w)
    return collapse_column(D - extra, c)


def is_special_row(w: Permutation, r: int) -> bool:
    return is_special_column(w.inverse, r)


def delete_special_row(w: Permutation, r: int) -> Permutation:
    return delete_special_column(w.inverse, r).inverse


def is_solid_row(w: Permutation, r: int) -> bool:
    return is_solid_column(w.inverse, r)


def delete_solid_row(w: Permutation, r: int) -> Permutation:
    return delete_solid_column(w.inverse, r).inverse


def collapse_column(cells: Iterable[Cell], c: int) -> frozenset:
    """Preimage under the column insertion map: drop column c, shift later columns left."""
    return frozenset((i, j if j < c else j - 1) for i, j in cells if j != c)


def collapse_row(cells: Iterable[Cell], r: int) -> frozenset:
    return transpose(collapse_column(transpose(cells), r))


def insert_column(cells: Iterable[Cell], c: int) -> frozenset:
    return frozenset((i, j if j < c else j + 1) for i, j in cells)
