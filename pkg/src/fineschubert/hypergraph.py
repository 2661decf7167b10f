"""Minimal transversal (hitting set) enumeration.

Edges and answers are frozensets over an arbitrary hashable ground set.  The
search is the candidate/critical-edge scheme of Murakami and Uno: every
minimal transversal is produced exactly once, without a global duplicate check.
"""
from __future__ import annotations

from typing import Hashable, Iterable, Iterator


class GuardExceeded(RuntimeError):
    """A resource guard tripped; the computation was abandoned, not truncated."""


def minimal_transversals(edges: Iterable[Iterable[Hashable]],
                         ground: Iterable[Hashable] | None = None,
                         limit: int | None = None) -> list[frozenset]:
    edge_sets = [frozenset(e) for e in edges]
    if any(not e for e in edge_sets):
        return []  # an empty edge cannot be hit
    elems = sorted(set().union(*edge_sets) if edge_sets else set(), key=repr)
    if ground is not None:
        extra = set(elems) - set(ground)
        if extra:
            raise ValueError(f"edge elements outside ground set: {sorted(extra, key=repr)[:3]}")
    # keep only inclusion-minimal edges
    edge_sets = sorted(set(edge_sets), key=len)
    minimal: list[frozenset] = []
    for e in edge_sets:
        if not any(f <= e for f in minimal):
            minimal.append(e)
    pos = {v: k for k, v in enumerate(elems)}
    masks = [sum(1 << pos[v] for v in e) for e in minimal]
    out = [frozenset(elems[k] for k in _bits(t)) for t in _mmcs(masks, len(elems), limit)]
    out.sort(key=lambda s: sorted(map(repr, s)))
    return out


def _bits(mask: int) -> Iterator[int]:
    k = 0
    while mask:
        if mask & 1:
            yield k
        mask >>= 1
        k += 1


def _mmcs(masks: list[int], nelem: int, limit: int | None) -> list[int]:
    m = len(masks)
    if m == 0:
        return [0]
    contains = [[] for _ in range(nelem)]  # element -> indices of edges containing it
    for idx, em in enumerate(masks):
        for k in _bits(em):
            contains[k].append(idx)
    results: list[int] = []

    def rec(S: list[int], cand: int, crit: dict[int, set[int]], uncov: set[int]) -> None:
        if not uncov:
            results.append(sum(1 << k for k in S))
            if limit is not None and len(results) > limit:
                raise GuardExceeded(f"more than {limit} minimal transversals")
            return
        # edge with fewest candidate elements
        best = min(uncov, key=lambda e: (bin(masks[e] & cand).count("1"), e))
        C = masks[best] & cand
        cand &= ~C
        for k in _bits(C):
            hit = set(contains[k])
            new_crit = {}
            ok = True
            for f in S:
                nc = crit[f] - hit
                if not nc:
                    ok = False
                    break
                new_crit[f] = nc
            if ok:
                new_crit[k] = uncov & hit
                rec(S + [k], cand, new_crit, uncov - hit)
            cand |= 1 << k

    rec([], (1 << nelem) - 1, {}, set(range(m)))
    return results


def is_transversal(S: Iterable, edges: Iterable[Iterable]) -> bool:
    s = set(S)
    return all(s & set(e) for e in edges)


def brute_force_minimal_transversals(edges, ground) -> list[frozenset]:
    """Exhaustive oracle over all subsets of a small ground set."""
    from itertools import combinations
    ground = sorted(ground, key=repr)
    edge_sets = [set(e) for e in edges]
    found: list[frozenset] = []
    for r in range(len(ground) + 1):
        for combo in combinations(ground, r):
            s = frozenset(combo)
            if any(f <= s for f in found):
                continue
            if all(s & e for e in edge_sets):
                found.append(s)
    found.sort(key=lambda s: sorted(map(repr, s)))
    return found
