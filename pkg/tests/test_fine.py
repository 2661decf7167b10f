import json
import random
from itertools import combinations

import pytest

from fineschubert.fine import (
    FinePolynomial, NotPAvoiding, OracleConfig, basis_exchange_violations, check_inequalities,
    completable_check, completable_report, deletion_coefficients, failure_bound,
    fine_coeff_groebner, fine_schubert_01, oracle_support, rw_avoiding_check,
    schubert_bound_check, spread_complex, support_oracle, ugb_certificate)
from fineschubert.groebner import buchberger
from fineschubert.ideals import build_Rw, cycle_relations, fulton_generators
from fineschubert.perm import (
    Permutation, all_permutations, avoids_P, grid, interesting_part)
from fineschubert.poly import TermOrder
from fineschubert.schubert import pipe_dreams

from oracles import hitting_support, jacobian_rank_Q, spanning_trees
from test_poly import F21543

P = Permutation.parse
CFG = OracleConfig()


def box(rows, cols):
    return {(i, j) for i in rows for j in cols}


def expected_426153():
    """Support of F_426153 assembled from the four A/B/C selection rules."""
    forced = frozenset({(1, 1), (1, 2), (1, 3), (2, 1), (3, 1)})
    A, B, C = box((1, 2, 3), (4, 5)), box((2, 3), (2, 3)), box((4, 5), (1, 2, 3))
    out = set()
    for x in A:
        for y in B:
            for z in C:
                out.add(forced | {x, y, z})
    for pair in combinations(sorted(B), 2):
        if pair[0][0] != pair[1][0]:
            for x in A:
                out.add(forced | {x, *pair})
        if pair[0][1] != pair[1][1]:
            for z in C:
                out.add(forced | {z, *pair})
    for triple in combinations(sorted(B), 3):
        out.add(forced | set(triple))
    return out


# ------------------------------------------------------------------ the 0/1 formula

def test_formula_2143():
    F = fine_schubert_01("2143")
    assert len(F) == 8 and F.degree == 2 and F.is_zero_one()
    others = box((1, 2, 3), (1, 2, 3)) - {(1, 1)}
    assert F.support() == {frozenset({(1, 1), c}) for c in others}


def test_formula_identity():
    F = fine_schubert_01(Permutation.identity(4))
    assert F.as_dict() == {frozenset(): 1}


def test_formula_426153():
    F = fine_schubert_01("426153")
    assert F.is_zero_one()
    assert F.support() == expected_426153()


def test_formula_rejects_pattern():
    with pytest.raises(NotPAvoiding):
        fine_schubert_01("21543")


def test_formula_equals_brute_force_hitting_sets():
    for w in all_permutations(4):
        F = fine_schubert_01(w)
        brute = hitting_support(build_Rw(w).spreads(), interesting_part(w), w.length)
        assert F.support() == brute


def test_fine_polynomial_json():
    F = fine_schubert_01("2143")
    text = json.dumps(F.to_json())
    assert FinePolynomial.from_json(text) == F
    assert F.to_json()["terms"][0] == {"cells": [[1, 1], [1, 2]], "coeff": 1}
    with pytest.raises(ValueError):
        FinePolynomial.from_dict(3, 2, {frozenset({(1, 1)}): 1})


@pytest.mark.parametrize("n", [4, 5])
def test_transpose_symmetry(n):
    for w in all_permutations(n):
        if avoids_P(w):
            assert fine_schubert_01(w).transpose() == fine_schubert_01(w.inverse)


# ------------------------------------------------------------------ the Jacobian oracle

def test_support_oracle_examples():
    assert support_oracle("2143", {(1, 1), (2, 2)})
    assert not support_oracle("2143", {(1, 2), (1, 3)})
    with pytest.raises(ValueError):
        support_oracle("2143", {(1, 1)})
    with pytest.raises(ValueError):
        OracleConfig(prime=101)


def test_completable_examples():
    assert completable_check("2143", set())
    # a complement of a support set has the dimension of the variety, 14 here
    assert completable_check("2143", grid(4) - {(1, 1), (2, 3)})
    assert not completable_check("2143", grid(4) - {(1, 2), (2, 3)})
    # 15 cells exceed the dimension, so dropping (1,1) alone is not enough
    assert not completable_check("2143", grid(4) - {(1, 1)})
    assert not completable_check("2143", grid(4))
    rep = completable_report("2143", grid(4), CFG)
    assert rep["false_negative_bound"] == failure_bound(P("2143"), CFG) < 1e-40


def test_21543_relation_is_avoiding_but_not_completable():
    spr = {c for _, cells in F21543 for c in cells}
    assert rw_avoiding_check("21543", spr)
    assert not completable_check("21543", spr, OracleConfig(trials=5))


def test_rw_avoiding_examples():
    assert rw_avoiding_check("426153", set())
    for r in build_Rw("426153"):
        assert not rw_avoiding_check("426153", r.spread)


def test_oracle_matches_rational_rank():
    sup = {frozenset(S) for S in combinations(sorted(interesting_part(P("2143"))), 2)
           if jacobian_rank_Q((2, 1, 4, 3), grid(4) - set(S)) == 14}
    assert sup == fine_schubert_01("2143").support()
    rng = random.Random(2)
    ws = [w for w in all_permutations(5) if avoids_P(w) and 2 <= w.length <= 5]
    for w in rng.sample(ws, 4):
        phi = sorted(interesting_part(w))
        for _ in range(4):
            S = frozenset(rng.sample(phi, w.length))
            full = jacobian_rank_Q(w.word, grid(5) - S, seed=1) == 25 - w.length
            assert support_oracle(w, S) == full


@pytest.mark.parametrize("n", [4])
def test_oracle_formula_agree_exhaustive(n):
    for w in all_permutations(n):
        F = fine_schubert_01(w).support()
        for S in combinations(sorted(interesting_part(w)), w.length):
            assert support_oracle(w, S) == (frozenset(S) in F), (str(w), S)


def test_oracle_formula_agree_sampled_S5():
    rng = random.Random(9)
    ws = [w for w in all_permutations(5) if avoids_P(w)]
    for w in rng.sample(ws, 15):
        F = fine_schubert_01(w).support()
        phi = sorted(interesting_part(w))
        if w.length > len(phi):
            continue
        for _ in range(60):
            S = frozenset(rng.sample(phi, w.length))
            assert support_oracle(w, S) == (S in F)
        assert oracle_support(w) == F


# ------------------------------------------------------------------ the Groebner path

def test_groebner_coefficient_examples():
    assert fine_coeff_groebner("2143", {(1, 1), (3, 3)}) == 1
    assert fine_coeff_groebner("2143", {(1, 2), (2, 1)}) == 0
    assert fine_coeff_groebner(Permutation.identity(3), set()) == 1


def test_groebner_matches_formula_on_S4():
    rng = random.Random(4)
    for w in all_permutations(4):
        F = fine_schubert_01(w).support()
        for S in F:
            assert fine_coeff_groebner(w, S) == 1
        phi = sorted(interesting_part(w))
        if w.length > len(phi):
            continue
        for _ in range(50):
            S = frozenset(rng.sample(phi, w.length))
            if S not in F:
                assert fine_coeff_groebner(w, S) == 0, (str(w), S)


# ------------------------------------------------------------------ complexes and certificates

def test_spread_complex_examples():
    empty = spread_complex([], 3)
    assert empty.facets() == [grid(3)] and empty.is_pure(8)
    cx = spread_complex(build_Rw("2143"))
    assert cx.is_pure(16 - 2 - 1)
    assert {grid(4) - F for F in cx.facets()} == fine_schubert_01("2143").support()


def test_rank_one_facets_are_spanning_trees():
    cx = spread_complex(cycle_relations(3, 3), 3)
    facets = {frozenset(F) for F in cx.facets()}
    assert len(facets) == 81
    assert facets == spanning_trees(3, 3)


def test_certificates():
    rep = ugb_certificate("2143")
    assert rep["passed"] and rep["n_facets"] == 8
    assert ugb_certificate("426153")["passed"]
    bad = ugb_certificate("21543")
    assert not bad["passed"] and bad["failures"]


def test_certificates_S4():
    for w in all_permutations(4):
        assert ugb_certificate(w)["passed"], str(w)


def test_basis_exchange_S4():
    for w in all_permutations(4):
        assert basis_exchange_violations(fine_schubert_01(w).support()) == []
    assert basis_exchange_violations([frozenset({1, 2}), frozenset({3, 4})])


def test_pipe_dreams_lie_in_support():
    for w in all_permutations(4):
        for D in pipe_dreams(w):
            assert support_oracle(w, D), (str(w), sorted(D))


def test_avoiding_equals_completable_S4():
    for w in all_permutations(4):
        phi = sorted(interesting_part(w))
        for k in range(len(phi) + 1):
            for U in combinations(phi, k):
                assert rw_avoiding_check(w, U) == completable_check(w, U), (str(w), U)


def test_duality_with_groebner_spreads():
    """U avoids every ideal spread iff some l(w)-subset of its complement is a support set."""
    w = P("2143")
    phi = sorted(interesting_part(w))
    gens = fulton_generators(w).polys()
    vs = sorted({v for g in gens for v in g.variables()})
    spreads = {g.spread() for g in gens}
    rng = random.Random(0)
    for t in range(15):
        gb = buchberger(gens, TermOrder.random_lex(vs, rng) if t % 2 else
                        TermOrder.random_weight(vs, t))
        spreads |= {g.spread() for g in gb.gens}
    F = fine_schubert_01(w).support()
    for k in range(len(phi) + 1):
        for U in combinations(phi, k):
            U = frozenset(U)
            avoids = not any(s <= U for s in spreads)
            rest = sorted(set(phi) - U)
            hit = any(frozenset(S) in F for S in combinations(rest, w.length))
            assert avoids == hit, sorted(U)


# ------------------------------------------------------------------ operators

def test_special_column_counterexample():
    S = {(1, 1), (2, 1), (3, 3), (4, 3), (5, 3)}
    rep = deletion_coefficients("145263", 3, S, CFG, method="oracle")
    assert rep["target"] == "134256"
    assert (rep["lhs"], rep["rhs"]) == (0, 1)
    assert fine_coeff_groebner("145263", S) == 0
    assert fine_coeff_groebner("134256", {(1, 1), (2, 1)}) == 1
    full = check_inequalities("145263", "special_col", CFG, c=3, method="oracle")
    assert full["nondominant_connected"] is False
    assert full["violations"] == 0
    flagged = [r for r in full["records"] if not r["hypothesis"] and not r["lhs"]]
    assert sorted(map(list, S)) in [r["S"] for r in flagged]


def test_transition_equality_2143():
    rep = check_inequalities("2143", "transition", CFG, cell=(3, 3))
    assert rep["target"] == "2134" and rep["violations"] == 0 and rep["checked"] == 1
    assert fine_schubert_01("2134").support() == {frozenset({(1, 1)})}


def test_cotransition_2143():
    rep = check_inequalities("2143", "cotransition", CFG, k=1)
    assert rep["violations"] == 0 and rep["checked"] > 0
    with pytest.raises(ValueError):
        check_inequalities("2143", "cotransition", CFG, k=3)


@pytest.mark.parametrize("op", ["pattern", "cotransition", "transition"])
def test_operators_S4(op):
    for w in all_permutations(4):
        if w.length == 0:
            continue
        try:
            rep = check_inequalities(w, op, CFG)
        except ValueError:
            continue
        assert rep["violations"] == 0, (str(w), op)


def test_column_operators_S5_avoiding():
    for w in all_permutations(5):
        if not avoids_P(w):
            continue
        for c in range(1, 6):
            for op in ("special_col", "solid_col", "special_row", "solid_row"):
                try:
                    rep = check_inequalities(w, op, CFG, c=c)
                except ValueError:
                    continue
                assert rep["violations"] == 0, (str(w), op, c)


def test_schubert_bound():
    assert schubert_bound_check("2143")["passed"]
    assert schubert_bound_check(Permutation.identity(3))["supports"] == 1
    for w in all_permutations(4):
        assert schubert_bound_check(w)["passed"]
