import pytest
import sympy

from fineschubert.perm import (
    Permutation, all_permutations, avoids_P, cotransition_admissible, cotransition_set)
from fineschubert.poly import Polynomial, mono, x
from fineschubert.schubert import (
    bottom_pipe_dream, divided_difference, is_reduced_pipe_dream, is_zero_one,
    pipe_dream_polynomial, pipe_dreams, schubert_poly, zero_one_pair)

from oracles import pipe_dreams_brute, schubert_sympy, to_sympy

P = Permutation.parse


def test_base_cases():
    assert schubert_poly(Permutation.identity(4)) == Polynomial.const(1)
    assert schubert_poly(P("321")) == Polynomial.monomial(mono((x(1), 2), x(2)))
    assert schubert_poly(P("2143")) == Polynomial.var(x(1)) * \
        (Polynomial.var(x(1)) + Polynomial.var(x(2)) + Polynomial.var(x(3)))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_matches_last_ascent_route(n):
    for w in all_permutations(n):
        assert sympy.expand(to_sympy(schubert_poly(w)) - schubert_sympy(w.word)) == 0, str(w)


def test_divided_difference_recursion_S5():
    for w in all_permutations(5):
        for i in range(1, 5):
            if w(i) > w(i + 1):
                v = w.swap_positions(i, i + 1)
                assert divided_difference(schubert_poly(w), i) == schubert_poly(v)


def test_pipe_dream_examples():
    assert pipe_dreams(Permutation.identity(3)) == [frozenset()]
    assert pipe_dreams(P("21")) == [frozenset({(1, 1)})]
    assert bottom_pipe_dream(P("2143")) == {(1, 1), (3, 1)}
    assert is_reduced_pipe_dream({(1, 1), (3, 1)}, "2143")
    assert not is_reduced_pipe_dream({(1, 1), (3, 2)}, "2143")


@pytest.mark.parametrize("n", [3, 4, 5])
def test_pipe_dreams_match_bruteforce(n):
    for w in all_permutations(n):
        assert set(pipe_dreams(w)) == set(pipe_dreams_brute(w.word)), str(w)


@pytest.mark.parametrize("n", [4, 5])
def test_pipe_dream_polynomial(n):
    for w in all_permutations(n):
        assert pipe_dream_polynomial(w) == schubert_poly(w)


def test_zero_one_examples():
    assert is_zero_one(Permutation.identity(3))
    assert not zero_one_pair(P("21543"))
    assert not is_zero_one(P("13254"))


@pytest.mark.parametrize("n", [4, 5])
def test_zero_one_pair_equals_avoidance(n):
    for w in all_permutations(n):
        assert zero_one_pair(w) == avoids_P(w), str(w)


def test_monk_cotransition_identity():
    """x_k S_w = sum of S_v over the cotransition set, with w embedded one size up."""
    checked = 0
    for w4 in all_permutations(4):
        w = Permutation(w4.word + (5,))
        for k in range(1, 5):
            if not cotransition_admissible(w, k):
                continue
            rhs = Polynomial()
            for v in cotransition_set(w, k):
                rhs = rhs + schubert_poly(v)
            assert Polynomial.var(x(k)) * schubert_poly(w) == rhs, (str(w), k)
            checked += 1
    assert checked > 30
