from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hispin.clifford import (
    Blade,
    DimensionError,
    Multivector,
    clifford_conjugate,
    geometric_product,
    parse_multivector,
    reflect_vector,
    reverse,
    scalar_part,
    to_text,
    vector_components,
)

from oracles import mv_from_package, mv_product, word_product


def e(m, *idx):
    return Multivector.basis(m, *idx)


@st.composite
def multivectors(draw, m=4, max_terms=4):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        mask = draw(st.integers(0, (1 << m) - 1))
        terms[mask] = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
    return Multivector(m, terms)


# -- worked examples ---------------------------------------------------------------

def test_generator_squares_to_minus_one():
    assert e(3, 1) * e(3, 1) == Multivector.scalar(3, -1)


def test_distinct_generators_anticommute():
    assert (e(3, 1) * e(3, 2) + e(3, 2) * e(3, 1)).is_zero()


def test_bivector_squares_to_minus_one():
    b = e(3, 1, 2)
    assert b * b == Multivector.scalar(3, -1)


def test_reverse_examples():
    assert reverse(e(3, 1, 2)) == -e(3, 1, 2)
    assert reverse(e(3, 1)) == e(3, 1)


def test_conjugate_examples():
    assert clifford_conjugate(e(3, 1)) == -e(3, 1)
    assert clifford_conjugate(Multivector.scalar(3)) == Multivector.scalar(3)
    b = e(3, 1, 3)
    assert scalar_part(clifford_conjugate(b) * b) == 1


def test_scalar_part_examples():
    assert scalar_part(e(3, 1, 2)) == 0
    assert scalar_part(Multivector.scalar(3, 3) + e(3, 1)) == 3
    assert scalar_part(e(3, 1) * e(3, 1)) == -1


def test_reflection_examples():
    assert reflect_vector(e(3, 1), e(3, 1)) == -e(3, 1)
    assert reflect_vector(e(3, 1), e(3, 2)) == e(3, 2)
    x = Multivector.vector([1, 1, 0])
    u = Multivector.vector([1, 0, 0])
    assert vector_components(reflect_vector(x, u)) == (0, -2, 0)


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionError):
        geometric_product(e(2, 1), e(3, 1))


def test_blade_validation():
    with pytest.raises(ValueError):
        Blade(3, (2, 1))
    with pytest.raises(ValueError):
        Blade(3, (4,))


def test_reflection_rejects_non_vectors():
    with pytest.raises(ValueError):
        reflect_vector(e(3, 1, 2), e(3, 1))


# -- oracle comparisons ---------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_all_blade_products_match_sorting_oracle(m):
    blades = [c for r in range(m + 1) for c in itertools.combinations(range(1, m + 1), r)]
    for a in blades:
        for b in blades:
            sign, idx = word_product(a, b)
            got = Multivector(m, {Blade(m, a).mask: 1}) * Multivector(m, {Blade(m, b).mask: 1})
            assert got == Multivector(m, {Blade(m, idx).mask: sign})


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_anticommutation_exhaustive(m):
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            lhs = e(m, i) * e(m, j) + e(m, j) * e(m, i)
            assert lhs == Multivector.scalar(m, -2 if i == j else 0)


@pytest.mark.parametrize("m", [3, 4, 5])
def test_associativity_randomized(m):
    rng = random.Random(f"assoc-{m}")

    def rand():
        return Multivector(m, {rng.randrange(1 << m): rng.randint(-3, 3) for _ in range(3)})

    for _ in range(200):
        a, b, c = rand(), rand(), rand()
        assert (a * b) * c == a * (b * c)


@settings(max_examples=60, deadline=None)
@given(multivectors(), multivectors())
def test_product_matches_oracle(a, b):
    assert mv_from_package(a * b) == mv_product(mv_from_package(a), mv_from_package(b))


@settings(max_examples=60, deadline=None)
@given(multivectors(), multivectors())
def test_reverse_is_antiautomorphism(a, b):
    assert reverse(a * b) == reverse(b) * reverse(a)


@settings(max_examples=60, deadline=None)
@given(multivectors(), multivectors())
def test_conjugate_is_antiautomorphism(a, b):
    assert clifford_conjugate(a * b) == clifford_conjugate(b) * clifford_conjugate(a)


@settings(max_examples=60, deadline=None)
@given(multivectors(), multivectors(), multivectors())
def test_distributivity(a, b, c):
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=3, max_size=3), st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_reflection_formula(xs, us):
    x, u = Multivector.vector(xs), Multivector.vector(us)
    dot = sum(a * b for a, b in zip(xs, us))
    norm = sum(a * a for a in xs)
    expected = tuple(norm * b - 2 * dot * a for a, b in zip(xs, us))
    assert vector_components(reflect_vector(x, u)) == expected


@settings(max_examples=60, deadline=None)
@given(multivectors())
def test_text_round_trip(a):
    assert parse_multivector(to_text(a), a.m) == a


def test_float_coefficients_are_kept():
    a = Multivector(2, {0: 0.5, 1: 1.5})
    assert scalar_part(a * a) == pytest.approx(0.25 - 2.25)
