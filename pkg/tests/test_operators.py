from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from hispin.operators import (
    C3,
    C4,
    D2,
    D3,
    D4,
    DeltaU,
    DeltaX,
    Du,
    Dx,
    EulerX,
    Pk,
    Rk,
    Tk2,
    Tk2Star,
    TkStar,
    apply,
    build,
    commutator,
    d_u,
    d_x,
    render,
    render_definition,
    rotation,
    x_,
)
from hispin.params import ParameterError, SpaceParams
from hispin.spaces import harmonic_basis, monogenic_basis
from hispin.weighted import WeightedFunction as W

from oracles import D3_reference, Sym


def x(m, i):
    return W.var(m, "x", i)


@st.composite
def polys(draw, m=3, k=1, max_terms=3):
    f = W.zero(m)
    for _ in range(draw(st.integers(1, max_terms))):
        xs = draw(st.lists(st.integers(0, 2), min_size=m, max_size=m))
        us = [0] * m
        for _ in range(k):
            us[draw(st.integers(0, m - 1))] += 1
        f = f + W.monomial(m, x=xs, u=us, blade=draw(st.integers(0, (1 << m) - 1)), c=draw(st.integers(-3, 3)))
    return f


# -- worked examples ---------------------------------------------------------------

def test_dirac_of_coordinate():
    assert apply(Dx(3), x(3, 1)) == W.blade(3, 1)


def test_euler_example():
    f = W.monomial(3, x=(2, 1))
    assert apply(EulerX(3), f) == f.scale(3)


def test_canonical_commutation():
    f = W.monomial(3, x=(1, 2), u=(1,), blade=0b011)
    assert apply(commutator(d_x(1), x_(1)), f) == f


def test_R0_is_dirac():
    p = SpaceParams(3, 0)
    f = W.monomial(3, x=(2, 1, 1), blade=0b101)
    assert apply(Rk(p), f) == apply(Dx(3), f)


def test_Tk2Star_kills_u_constants():
    p = SpaceParams(3, 0)
    assert apply(Tk2Star(p), W.monomial(3, x=(1, 1))).is_zero()


def test_D2_at_k0_is_laplacian():
    p = SpaceParams(3, 0)
    f = W.monomial(3, x=(2, 2, 1), blade=0b110)
    assert apply(D2(p), f) == apply(DeltaX(3), f)


def test_D3_at_k0_is_dirac_cubed():
    p = SpaceParams(3, 0)
    f = W.monomial(3, x=(2, 1, 1), blade=0b001)
    assert apply(D3(p), f) == apply(Dx(3) ** 3, f)


@pytest.mark.parametrize("m", [3, 5, 7])
def test_D4_at_k0_is_bilaplacian_multiple(m):
    p = SpaceParams(m, 0)
    c = Fraction(m * (m - 6), (m - 2) * (m - 4))
    f = W.monomial(m, x=(2, 2, 1))
    lap = DeltaX(m)
    assert apply(D4(p), f) == apply(lap @ lap, f).scale(c)


def test_C3_and_C4_on_constant():
    m = 3
    p = SpaceParams(m, 0)
    one = W.constant(m)
    for j in range(1, m + 1):
        expected = W.vector(m, "x") * W.blade(m, j) + x(m, j).scale(m - 2)
        assert apply(C3(p, j), one) == expected
        assert apply(C4(p, j), one) == x(m, j).scale(-(m - 4))


def test_C3_raises_x_degree_by_one():
    p = SpaceParams(3, 1)
    f = W.monomial(3, x=(1, 1), u=(1,))
    assert apply(C3(p, 2), f).degrees("x") <= {2, 3}


def test_D3_guard_names_constant():
    with pytest.raises(ParameterError, match="m\\+6k-10"):
        D3(SpaceParams(4, 1))


def test_D4_guard():
    with pytest.raises(ParameterError, match="m\\+2k-4"):
        D4(SpaceParams(4, 0))


def test_render_D3():
    text = render_definition(D3(SpaceParams(3, 1)))
    assert text.startswith("D3 = Dx^3 + 4/(m+2k) <u,Dx><Du,Dx>Dx")
    assert "m+6k-10" in text


def test_render_rotation():
    assert render(rotation(1, 2).op) == "Lx(1,2) + Lu(1,2) - 1/2 e12"


def test_build_unknown_tag():
    with pytest.raises(KeyError):
        build("nope", SpaceParams(3, 1))


# -- properties ---------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(polys())
def test_dirac_squares_to_minus_laplacian(f):
    assert (apply(Dx(3) @ Dx(3), f) + apply(DeltaX(3), f)).is_zero()


@settings(max_examples=30, deadline=None)
@given(polys(), polys())
def test_application_is_linear(f, g):
    op = D3(SpaceParams(3, 1))
    assert apply(op, f + g.scale(2)) == apply(op, f) + apply(op, g).scale(2)


@settings(max_examples=10, deadline=None)
@given(polys(k=2, max_terms=2))
def test_D3_matches_reference_transcription(f):
    S = Sym(3)
    got = S.from_wf(apply(D3(SpaceParams(3, 2)), f))
    ref = D3_reference(S, 2, S.from_wf(f))
    assert S.is_zero(S.add(got, S.scale(-1, ref)))


def test_D3_matches_reference_on_monogenic_input():
    S = Sym(4)
    p = SpaceParams(4, 2)
    f = W.monomial(4, x=(2, 0, 1)) * monogenic_basis(p).elements[0]
    got = S.from_wf(apply(D3(p), f))
    assert S.is_zero(S.add(got, S.scale(-1, D3_reference(S, 2, S.from_wf(f)))))


@pytest.mark.parametrize("m,k", [(3, 1), (3, 2), (4, 2), (5, 1)])
def test_value_space_preservation(m, k):
    p = SpaceParams(m, k)
    d3, d4, rk = D3(p), D4(p), Rk(p)
    for b in monogenic_basis(p):
        for xm in (W.monomial(m, x=(3,)), W.monomial(m, x=(1, 1, 1)), W.monomial(m, x=(0, 2, 1))):
            f = xm * b
            assert apply(Du(m), apply(d3, f)).is_zero()
            assert apply(Du(m), apply(rk, f)).is_zero()
            assert apply(Pk(p), apply(TkStar(p), f)).is_zero()
    for h in harmonic_basis(p):
        f = W.monomial(m, x=(2, 1, 1)) * h
        assert apply(DeltaU(m), apply(d4, f)).is_zero()
        assert apply(DeltaU(m), apply(D2(p), f)).is_zero()


def test_Tk2_maps_lower_harmonics_to_harmonics():
    p = SpaceParams(3, 2)
    for h in harmonic_basis(SpaceParams(3, 1)):
        f = W.monomial(3, x=(1, 1)) * h
        assert apply(DeltaU(3), apply(Tk2(p), f)).is_zero()


def test_D4_forms_agree():
    p = SpaceParams(3, 1)
    for h in harmonic_basis(p):
        f = W.monomial(3, x=(2, 1, 1)) * h
        assert apply(D4(p, "defining"), f) == apply(D4(p, "twistor"), f)


def test_D2_forms_agree_on_monogenics():
    p = SpaceParams(3, 1)
    for b in monogenic_basis(p):
        f = W.monomial(3, x=(1, 1)) * b
        assert apply(D2(p, "twistor"), f) == apply(D2(p, "factored"), f)


def test_du_derivative_primitive():
    f = W.monomial(3, u=(2, 1))
    assert apply(d_u(1), f) == W.monomial(3, u=(1, 1), c=2)


def test_rotation_generator_needs_spin_term_reference():
    S = Sym(3)
    p = SpaceParams(3, 1)
    f = S.from_wf(W.monomial(3, x=(2, 1, 0)) * monogenic_basis(p).elements[0] * W.blade(3, 1)
                  + W.monomial(3, x=(0, 1, 2)) * monogenic_basis(p).elements[1])

    def orbital(g):
        parts = [S.scale(S.x[0], S.diff(g, S.x[1])), S.scale(-S.x[1], S.diff(g, S.x[0])),
                 S.scale(S.u[0], S.diff(g, S.u[1])), S.scale(-S.u[1], S.diff(g, S.u[0]))]
        return S.add(*parts)

    def full(g):
        return S.add(orbital(g), S.left({(1, 2): -sp.Rational(1, 2)}, g))

    def bracket(L, g):
        return S.add(D3_reference(S, 1, L(g)), S.scale(-1, L(D3_reference(S, 1, g))))

    assert S.is_zero(bracket(full, f))
    assert not S.is_zero(bracket(orbital, f))


@pytest.mark.parametrize("spin", [True, False])
def test_adjacent_rotations_generate_the_rest(spin):
    # [L12, L23] = L13, the bracket relation behind checking adjacent planes only
    fs = [W.monomial(4, x=(1, 0, 2), u=(0, 1)), W.monomial(4, x=(0, 1, 1, 1), u=(1,), blade=0b0110)]
    for a, b, c in [(1, 2, 3), (2, 3, 4)]:
        lhs = commutator(rotation(a, b, spin), rotation(b, c, spin))
        for f in fs:
            assert apply(lhs, f) == apply(rotation(a, c, spin), f)
