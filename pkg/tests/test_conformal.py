from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from hispin.conformal import (
    J3,
    J4,
    apply_to_fundamental_solution,
    conjugated_translation,
    dilate,
    fundamental_solution,
    pullback_inversion,
    translate,
)
from hispin.operators import C3, C4, D3, D4, apply
from hispin.params import SpaceParams
from hispin.spaces import SpaceError, harmonic_basis, monogenic_basis, reproducing_kernel
from hispin.weighted import WeightedFunction as W, WeightError

from oracles import Sym


@st.composite
def polys(draw, m=3, k=1, max_terms=3, blades=True):
    f = W.zero(m)
    for _ in range(draw(st.integers(1, max_terms))):
        xs = draw(st.lists(st.integers(0, 2), min_size=m, max_size=m))
        us = [0] * m
        for _ in range(k):
            us[draw(st.integers(0, m - 1))] += 1
        blade = draw(st.integers(0, (1 << m) - 1)) if blades else 0
        f = f + W.monomial(m, x=xs, u=us, blade=blade, c=draw(st.integers(-3, 3)))
    return f


def sympy_pullback(S: Sym, f: dict) -> dict:
    """Substitute x -> x/|x|^2 and u -> x u x/|x|^2 using the Clifford sandwich."""
    xv = S.vec(S.x)
    uv = S.vec(S.u)
    xux = S.left(S.left(xv, uv), xv)
    r2 = sum(s**2 for s in S.x)
    sub = {S.x[i]: S.x[i] / r2 for i in range(S.m)}
    sub.update({S.u[i]: xux.get((i + 1,), 0) / r2 for i in range(S.m)})
    return {k: c.subs(sub, simultaneous=True) for k, c in f.items()}


# -- worked examples ---------------------------------------------------------------

def test_pullback_examples():
    m = 2
    u1, x1 = W.var(m, "u", 1), W.var(m, "x", 1)
    udotx = W.monomial(m, x=(1,), u=(1,)) + W.monomial(m, x=(0, 1), u=(0, 1))
    assert pullback_inversion(u1) == u1 - (udotx * x1 * W.r_power(m, -2)).scale(2)
    assert pullback_inversion(W.constant(m)) == W.constant(m)
    assert pullback_inversion(x1) == x1 * W.r_power(m, -2)


def test_J3_squared_example():
    f = W.monomial(3, x=(1,), u=(1,), blade=0b010)
    assert (J3(J3(f)) + f).is_zero()


def test_J4_of_one():
    assert J4(W.constant(5)) == W.r_power(5, -1)


def test_translate_example():
    assert translate(W.var(3, "x", 1), (1, 0, 0)) == W.var(3, "x", 1) + 1


def test_dilate_examples():
    f = W.monomial(3, x=(2,), t=-2)
    assert (dilate(f, 2) - f).is_zero()
    g = W.monomial(3, x=(1, 1), u=(1,))
    assert dilate(g, Fraction(1, 3)) == g.scale(Fraction(1, 9))


def test_translate_rejects_weights():
    with pytest.raises(WeightError):
        translate(W.r_power(3, -1), (1, 0, 0))


def test_dilate_rejects_nonpositive():
    with pytest.raises(ValueError):
        dilate(W.constant(3), 0)


def test_fundamental_solution_examples():
    m = 4
    p = SpaceParams(m, 0)
    assert fundamental_solution(p, "D3", W.constant(m)) == W.vector(m, "x") * W.r_power(m, 2 - m)
    assert fundamental_solution(p, "D4", W.constant(m)) == W.r_power(m, 4 - m)


def test_fundamental_solution_rejects_wrong_space():
    p = SpaceParams(3, 1)
    with pytest.raises(SpaceError):
        fundamental_solution(p, "D3", W.var(3, "u", 1))
    with pytest.raises(SpaceError):
        fundamental_solution(p, "D4", W.var(3, "x", 1))


# -- oracle and property checks -----------------------------------------------

@settings(max_examples=15, deadline=None)
@given(polys(max_terms=2))
def test_pullback_matches_clifford_sandwich(f):
    S = Sym(3)
    got = S.from_wf(pullback_inversion(f))
    ref = sympy_pullback(S, S.from_wf(f))
    assert S.is_zero(S.add(got, S.scale(-1, ref)))


@settings(max_examples=20, deadline=None)
@given(polys())
def test_inversions_square_to_plus_minus_one(f):
    assert (J3(J3(f)) + f).is_zero()
    assert (J4(J4(f)) - f).is_zero()


@settings(max_examples=20, deadline=None)
@given(polys(max_terms=2), st.lists(st.integers(-2, 2), min_size=3, max_size=3))
def test_translation_matches_sympy(f, a):
    S = Sym(3)
    ref = {k: c.subs({S.x[i]: S.x[i] + a[i] for i in range(3)}, simultaneous=True) for k, c in S.from_wf(f).items()}
    got = S.from_wf(translate(f, a))
    assert S.is_zero(S.add(got, S.scale(-1, ref)))


@settings(max_examples=20, deadline=None)
@given(polys(max_terms=2), st.integers(1, 4), st.integers(-3, 1))
def test_dilation_matches_sympy(f, lam, t):
    S = Sym(3)
    f = f.mul_r(t)
    lam = sp.Integer(lam)
    ref = {k: sp.powsimp(c.subs({s: lam * s for s in S.x}, simultaneous=True), force=True)
           for k, c in S.from_wf(f).items()}
    got = S.from_wf(dilate(f, int(lam)))
    assert S.is_zero(S.add(got, S.scale(-1, ref)))


@pytest.mark.parametrize("m,k", [(3, 1), (3, 2), (5, 1)])
def test_conjugated_translations_are_special_conformal_generators(m, k):
    p = SpaceParams(m, k)
    for j in range(1, m + 1):
        c3, c4 = C3(p, j), C4(p, j)
        t3, t4 = conjugated_translation("J3", j), conjugated_translation("J4", j)
        for b in monogenic_basis(p):
            f = W.monomial(m, x=(1, 1)) * b
            assert (apply(c3, f) - t3(f)).is_zero()
        for h in harmonic_basis(p):
            f = W.monomial(m, x=(0, 1, 1)) * h
            assert (apply(c4, f) - t4(f)).is_zero()


@pytest.mark.parametrize("m,k", [(3, 0), (3, 1), (5, 1)])
def test_fundamental_solutions_annihilated(m, k):
    p = SpaceParams(m, k)
    for f in monogenic_basis(p):
        _, image = apply_to_fundamental_solution(p, "D3", f)
        assert image.is_zero()
    for f in harmonic_basis(p):
        _, image = apply_to_fundamental_solution(p, "D4", f)
        assert image.is_zero()


def test_kernel_fundamental_solution_in_both_slots():
    p = SpaceParams(3, 1)
    z = reproducing_kernel(p, "H_k")
    sol = J4(z)
    assert apply(D4(p), sol).is_zero()


def test_inversion_conjugates_D3_to_weighted_D3():
    p = SpaceParams(3, 1)
    d3 = D3(p)
    r6 = W.r_power(3, 6)
    for b in monogenic_basis(p):
        f = W.monomial(3, x=(2, 1)) * b
        assert (J3(apply(d3, J3(f))) - r6 * apply(d3, f)).is_zero()
