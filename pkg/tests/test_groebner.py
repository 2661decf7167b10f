import random
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from fineschubert.groebner import (
    LiftedComplex, MonomialIdeal, OrderSampling, buchberger, check_full_lift, initial_ideal,
    lift_complex, lifted_multidegree, monomial_minimal_primes, stanley_reisner_facets,
    subspace_multiplicity, subspace_multiplicity_report, ugb_sample_check)
from fineschubert.hypergraph import GuardExceeded, is_transversal, minimal_transversals
from fineschubert.ideals import build_Rw, cycle_relations, fulton_generators
from fineschubert.fine import determinantal_generators, fine_schubert_01, spread_complex
from fineschubert.perm import Permutation, grid
from fineschubert.poly import Polynomial, TermOrder, a, mono, multihomogenize, symbolic_minor

from oracles import minimal_transversals_brute, spanning_trees, sym, to_sympy


def var(v):
    return Polynomial.var(v)


# ------------------------------------------------------------------ hypergraph

@settings(max_examples=150)
@given(st.lists(st.frozensets(st.integers(0, 7), min_size=1, max_size=4), max_size=7))
def test_transversals_match_bruteforce(edges):
    got = set(minimal_transversals(edges, range(8)))
    assert got == minimal_transversals_brute(edges, range(8))
    assert all(is_transversal(T, edges) for T in got)


def test_transversal_guard():
    edges = [{2 * i, 2 * i + 1} for i in range(8)]  # 256 minimal transversals
    with pytest.raises(GuardExceeded):
        minimal_transversals(edges, limit=10)


# ------------------------------------------------------------------ Buchberger

def monic_set(gb, ranking):
    gens = [sym(v) for v in ranking]
    return {sympy.Poly(to_sympy(g), *gens).monic().as_expr() for g in gb.gens}


def test_single_generator():
    g = buchberger([var(a(1, 1))], TermOrder.lex([a(1, 1)]))
    assert list(g.gens) == [var(a(1, 1))]


def test_maximal_minors_are_groebner():
    gens = [symbolic_minor([1, 2], c) for c in combinations([1, 2, 3], 2)]
    ranking = sorted({v for f in gens for v in f.variables()})
    gb = buchberger(gens, TermOrder.lex(ranking))
    assert {f.normalized() for f in gb.gens} == {f.normalized() for f in gens}


@pytest.mark.parametrize("seed", range(12))
def test_buchberger_matches_sympy(seed):
    # homogeneous quadrics keep instances small; dense inhomogeneous lex input can run for minutes
    rng = random.Random(seed)
    vs = [a(1, 1), a(1, 2), a(2, 1), a(2, 2)]
    quad = [mono(u, v) for k, u in enumerate(vs) for v in vs[k:]]
    polys = [Polynomial({m: rng.randint(-3, 3) or 1 for m in rng.sample(quad, 3)})
             for _ in range(3)]
    ranking = vs[:]
    rng.shuffle(ranking)
    for order in (TermOrder.lex(ranking), TermOrder.graded_lex(ranking)):
        gb = buchberger(polys, order, max_spairs=500)
        kind = "lex" if order.weights is None else "grlex"
        gens = [sym(v) for v in ranking]
        ref = sympy.groebner([to_sympy(f) for f in polys], *gens, order=kind)
        assert monic_set(gb, ranking) == {sympy.Poly(g, *gens).monic().as_expr() for g in ref.exprs}


def lex_only_set():
    a1, a2 = var(a(1, 1)), var(a(1, 2))
    return [a1 ** 2 * a2 ** 2 - a1 ** 3 - a2 ** 3, a1 * a2, a1 ** 4, a2 ** 4]


def test_lex_but_not_grlex():
    gens = lex_only_set()
    inp = {f.normalized() for f in gens}
    for ranking in ([a(1, 1), a(1, 2)], [a(1, 2), a(1, 1)]):
        gb = buchberger(gens, TermOrder.lex(ranking))
        assert initial_ideal(gb).min_gens == MonomialIdeal(
            [TermOrder.lex(ranking).leading_monomial(f) for f in gens]).min_gens
    gr = TermOrder.graded_lex([a(1, 1), a(1, 2)])
    gbg = buchberger(gens, gr)
    assert initial_ideal(gbg).min_gens != MonomialIdeal(
        [gr.leading_monomial(f) for f in gens]).min_gens
    rep = ugb_sample_check(gens, gens, OrderSampling(count=0, extra=(gr.spec(),)))
    assert not rep["passed"]
    assert any(not o["pass"] and o["order"].startswith("grlex") for o in rep["orders"])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_normal_form_is_path_independent(seed):
    rng = random.Random(seed)
    gens = fulton_generators(Permutation.parse("2143")).polys()
    ranking = sorted({v for f in gens for v in f.variables()})
    rng.shuffle(ranking)
    order = TermOrder.lex(ranking)
    gb = buchberger(gens, order)
    # two different elements of the same coset
    f = Polynomial({mono(*rng.sample(ranking, 2)): 1, mono(rng.choice(ranking)): 2})
    h = Polynomial({mono(rng.choice(ranking)): rng.randint(1, 5)})
    g = f + h * gens[rng.randrange(len(gens))]
    assert gb.reduce(f) == gb.reduce(g)
    # idempotence
    again = buchberger(gb.gens, order)
    assert initial_ideal(again).min_gens == initial_ideal(gb).min_gens


def test_spair_guard():
    gens = determinantal_generators(4, 4, 2)
    with pytest.raises(GuardExceeded):
        buchberger(gens, TermOrder.graded_lex(sorted({v for f in gens for v in f.variables()})),
                   max_spairs=3)


# ------------------------------------------------------------------ monomial ideals

def test_initial_ideal_trivial():
    f = var(a(1, 1)) * var(a(1, 2)) - 1
    gb = buchberger([f], TermOrder.lex([a(1, 1), a(1, 2)]))
    assert initial_ideal(gb).min_gens == (mono(a(1, 1), a(1, 2)),)


def test_minimal_primes_examples():
    M = MonomialIdeal([mono(a(1, 1), a(1, 2))])
    assert sorted(monomial_minimal_primes(M)) == sorted([frozenset({a(1, 1)}), frozenset({a(1, 2)})])
    # nonfaces of the complex with facets 14, 15, 25, 35
    X = {i: a(1, i) for i in range(1, 6)}
    nonfaces = [(4, 5), (3, 4), (2, 3), (1, 2), (1, 3), (2, 4)]
    M = MonomialIdeal([mono(X[i], X[j]) for i, j in nonfaces])
    facets = {frozenset(k for k, v in X.items() if v in F)
              for F in stanley_reisner_facets(M, X.values())}
    assert facets == {frozenset(s) for s in ({1, 4}, {1, 5}, {2, 5}, {3, 5})}


@settings(max_examples=60)
@given(st.lists(st.frozensets(st.integers(1, 10), min_size=1, max_size=4), min_size=1, max_size=6))
def test_stanley_reisner_matches_subset_scan(edges):
    X = [a(1, i) for i in range(1, 11)]
    M = MonomialIdeal([mono(*[X[i - 1] for i in e]) for e in edges])
    got = set(stanley_reisner_facets(M, X))
    faces = [frozenset(X[i - 1] for i in range(1, 11) if mask >> (i - 1) & 1)
             for mask in range(1 << 10)]
    faces = [F for F in faces if not any(m and all(v in F for v, _ in m) for m in M.min_gens)]
    maximal = {F for F in faces if not any(F < G for G in faces)}
    assert got == maximal


def test_subspace_multiplicity_examples():
    a1 = a(1, 1)
    assert subspace_multiplicity(MonomialIdeal([mono(a1)]), [a1]) == 1
    assert subspace_multiplicity(MonomialIdeal([mono((a1, 2))]), [a1]) == 2
    rep = subspace_multiplicity_report(MonomialIdeal([mono(a1)]), [a(1, 2)])
    assert rep["multiplicity"] == 0 and rep["reason"]


def test_subspace_multiplicity_2143():
    gens = fulton_generators(Permutation.parse("2143")).polys()
    S = [a(1, 1), a(2, 2)]
    rest = sorted({v for f in gens for v in f.variables()} - set(S))
    gb = buchberger(gens, TermOrder.lex(S + rest))
    assert subspace_multiplicity(initial_ideal(gb), S) == 1


# ------------------------------------------------------------------ initial complexes

def test_2143_antidiagonal_initial_ideal_matches_pipe_dreams():
    from fineschubert.schubert import pipe_dreams

    w = Permutation.parse("2143")
    gens = fulton_generators(w).polys()
    ranking = sorted({v for f in gens for v in f.variables()}, key=lambda v: (v.i, -v.j))
    gb = buchberger(gens, TermOrder.lex(ranking))
    M = initial_ideal(gb)
    assert M.is_squarefree()
    primes = {frozenset(v.cell for v in p) for p in monomial_minimal_primes(M)}
    assert primes == set(pipe_dreams(w))


def test_rank_one_2x3_lift_spanning_trees():
    gens = determinantal_generators(2, 3, 1)
    ranking = sorted({v for f in gens for v in f.variables()})
    hom = [multihomogenize(f) for f in gens]
    ext = TermOrder.lex(ranking).extended()
    gb = buchberger(hom, ext)
    M = initial_ideal(gb)
    assert M.is_squarefree()
    lc = lift_complex(gens, TermOrder.lex(ranking), grid(3) & {(i, j) for i in (1, 2) for j in (1, 2, 3)})
    base = spread_complex(gens, 3)
    cells = {(i, j) for i in (1, 2) for j in (1, 2, 3)}
    facets = [F & cells for F in base.facets()]
    trees = spanning_trees(2, 3)
    assert {F for F in facets} == trees
    assert len(trees) == 12
    rep = check_full_lift(lc, facets)
    assert rep["full"] and rep["bijection"]


def test_worked_lift_example():
    bar = lambda e: (e, True)
    pl = lambda e: (e, False)
    lifts = [{bar(4), bar(5)}, {bar(3), bar(4)}, {bar(2), bar(3)}, {bar(1), pl(2)},
             {bar(1), bar(3)}, {pl(2), bar(4)}]
    lc = LiftedComplex(tuple(range(1, 6)), [frozenset(L) for L in lifts])
    expected = [
        {pl(1), bar(1), bar(2), pl(3), pl(4), bar(4), pl(5)},
        {pl(1), bar(1), bar(2), pl(3), pl(4), pl(5), bar(5)},
        {pl(1), pl(2), bar(2), pl(3), pl(4), pl(5), bar(5)},
        {pl(1), pl(2), pl(3), bar(3), pl(4), pl(5), bar(5)},
    ]
    assert set(lc.facets()) == {frozenset(F) for F in expected}
    rep = check_full_lift(lc, [{1, 4}, {1, 5}, {2, 5}, {3, 5}])
    assert rep["full"] and rep["bijection"]


def test_trivial_lift():
    lc = LiftedComplex((1, 2), [])
    assert lc.facets() == [frozenset(lc.doubled())]
    rep = check_full_lift(lc, [{1, 2}])
    assert rep["full"] and rep["bijection"]


def test_2143_lifts_under_random_orders():
    w = Permutation.parse("2143")
    rels = build_Rw(w).polys()
    cx = spread_complex(rels, 3)
    base = cx.facets()
    ranking0 = sorted({v for f in rels for v in f.variables()})
    rng = random.Random(11)
    degrees = set()
    for _ in range(10):
        ranking = ranking0[:]
        rng.shuffle(ranking)
        lc = lift_complex(rels, TermOrder.lex(ranking), grid(3))
        rep = check_full_lift(lc, base)
        assert rep["full"] and rep["bijection"]
        degrees.add(tuple(sorted((tuple(sorted(S)), c) for S, c in lifted_multidegree(lc).items())))
    # the multidegree does not depend on the order, and it is the fine polynomial
    assert len(degrees) == 1
    F = fine_schubert_01(w)
    assert dict(next(iter(degrees))) == {tuple(sorted(S)): c for S, c in F.as_dict().items()}


# ------------------------------------------------------------------ sampled UGB checks

def test_ugb_sample_rank_one():
    rels = cycle_relations(3, 3).polys()
    rep = ugb_sample_check(rels, determinantal_generators(3, 3, 1), OrderSampling(count=20))
    assert rep["passed"] and len(rep["orders"]) == 20


def test_ugb_sample_detects_outsider():
    gens = [var(a(1, 1)) + var(a(1, 2))]
    rep = ugb_sample_check(gens + [var(a(2, 2))], gens, OrderSampling(count=2))
    assert rep["gens_outside_ideal"]
    assert not rep["passed"]


def test_order_sampling_exhaustive_for_few_variables():
    vs = [a(1, i) for i in range(1, 5)]
    assert len(OrderSampling(count=50).orders(vs)) == 24
    many = [a(1, i) for i in range(1, 10)]
    orders = OrderSampling(count=50, seed=3).orders(many)
    assert len(orders) == 50
    assert orders == OrderSampling(count=50, seed=3).orders(many)
