"""Schubert polynomials by divided differences, and reduced pipe dreams."""
from __future__ import annotations

from functools import lru_cache

from .perm import Permutation, as_perm
from .poly import Polynomial, Var, exact_divide, mono, x

Cell = tuple[int, int]


def swap_variables(f: Polynomial, i: int) -> Polynomial:
    """s_i acting on x-variables: exchange x[i] and x[i+1]."""
    xi, xj = x(i), x(i + 1)
    swap = {xi: xj, xj: xi}
    out = {}
    for m, c in f.terms.items():
        nm = tuple(sorted((swap.get(v, v), e) for v, e in m))
        out[nm] = out.get(nm, 0) + c
    return Polynomial(out)


def divided_difference(f: Polynomial, i: int) -> Polynomial:
    num = f - swap_variables(f, i)
    if not num:
        return Polynomial()
    return exact_divide(num, Polynomial.var(x(i)) - Polynomial.var(x(i + 1)))


def _top(n: int) -> Polynomial:
    return Polynomial.monomial(mono(*[(x(i), n - i) for i in range(1, n)]))


@lru_cache(maxsize=None)
def schubert_poly(w) -> Polynomial:
    """S_w, reached from S_{w0} by climbing at the first ascent of w."""
    w = as_perm(w)
    n = w.n
    for i in range(1, n):
        if w(i) < w(i + 1):
            return divided_difference(schubert_poly(w.swap_positions(i, i + 1)), i)
    return _top(n)


def is_zero_one(w) -> bool:
    return all(c in (0, 1) for c in schubert_poly(as_perm(w)).terms.values())


def zero_one_pair(w) -> bool:
    w = as_perm(w)
    return is_zero_one(w) and is_zero_one(w.inverse)


# ------------------------------------------------------------------ pipe dreams

def pipe_dream_word(crosses, n: int) -> list[int]:
    """Simple reflections of the crosses, each row right to left, rows top to bottom."""
    word = []
    for i in range(1, n + 1):
        for j in sorted((j for r, j in crosses if r == i), reverse=True):
            word.append(i + j - 1)
    return word


def word_product(word, n: int) -> Permutation:
    """s_{a1} s_{a2} ... with (uv)(i) = u(v(i))."""
    perm = list(range(1, n + 1))
    for a_ in reversed(word):
        # left-multiplying by s_a swaps the values a and a+1
        perm = [a_ + 1 if v == a_ else a_ if v == a_ + 1 else v for v in perm]
    return Permutation(tuple(perm))


def pipe_dream_permutation(crosses, n: int) -> Permutation:
    return word_product(pipe_dream_word(crosses, n), n)


def is_reduced_pipe_dream(crosses, w) -> bool:
    w = as_perm(w)
    crosses = frozenset(crosses)
    if any(i + j > w.n for i, j in crosses) or len(crosses) != w.length:
        return False
    return pipe_dream_permutation(crosses, w.n) == w


def bottom_pipe_dream(w) -> frozenset:
    w = as_perm(w)
    n = w.n
    out = set()
    for i in range(1, n + 1):
        code = sum(1 for j in range(i + 1, n + 1) if w(j) < w(i))
        out.update((i, j) for j in range(1, code + 1))
    return frozenset(out)


def _ladder_moves(P: frozenset, n: int):
    for (i, j) in P:
        if (i, j + 1) in P:
            continue
        r = i - 1
        while r >= 1 and (r, j) in P and (r, j + 1) in P:
            r -= 1
        if r >= 1 and (r, j) not in P and (r, j + 1) not in P and r + j + 1 <= n:
            yield (P - {(i, j)}) | {(r, j + 1)}


def pipe_dreams(w) -> list[frozenset]:
    """All reduced pipe dreams of w, closed under ladder moves from the bottom one."""
    w = as_perm(w)
    start = bottom_pipe_dream(w)
    seen = {start}
    stack = [start]
    while stack:
        P = stack.pop()
        for Q in _ladder_moves(P, w.n):
            if Q not in seen:
                seen.add(Q)
                stack.append(Q)
    return sorted(seen, key=lambda P: sorted(P))


def pipe_dream_polynomial(w) -> Polynomial:
    out: dict = {}
    for P in pipe_dreams(w):
        m = mono(*[x(i) for i, _ in P])
        out[m] = out.get(m, 0) + 1
    return Polynomial(out)
