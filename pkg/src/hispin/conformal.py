"""Finite conformal actions on weighted functions.

The inversion pulls back along x -> x/|x|^2 together with the reflection
u -> x u x / |x|^2.  For vectors x u x = |x|^2 u - 2<u,x> x, so the Clifford
sandwich reduces to the polynomial substitution

    x_i -> x_i r^-2,   u_j -> u_j - 2 <u,x> x_j r^-2,   r^t -> r^-t.

J3 multiplies the pullback on the left by x r^(2-m); J4 multiplies it by
r^(4-m).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from ._numbers import rational, to_fraction
from .operators import D3, D4, apply
from .params import SpaceParams
from .spaces import SpaceError, _check_u_homogeneous, is_harmonic, is_monogenic
from .weighted import WeightError, WeightedFunction, left_mult_vector, substitute

ACTIONS = ("translate", "dilate", "J3", "J4")


@lru_cache(maxsize=None)
def _inversion_images(m: int) -> dict:
    images = {}
    rinv2 = WeightedFunction.r_power(m, -2)
    udotx = WeightedFunction.zero(m)
    for i in range(1, m + 1):
        udotx = udotx + WeightedFunction.var(m, "u", i) * WeightedFunction.var(m, "x", i)
    for i in range(1, m + 1):
        xi = WeightedFunction.var(m, "x", i)
        images[("x", i)] = xi * rinv2
        images[("u", i)] = WeightedFunction.var(m, "u", i) - (udotx * xi * rinv2).scale(2)
    return images


_BLOCK_CACHES: dict = {}


def pullback_inversion(f: WeightedFunction) -> WeightedFunction:
    """f(x/|x|^2, x u x/|x|^2); weights transform as r^t -> r^-t."""
    m = f.m
    cache = _BLOCK_CACHES.setdefault(m, {})
    if len(cache) > 20000:
        cache.clear()
    return substitute(f, _inversion_images(m), lambda t: WeightedFunction.r_power(m, -t), cache)


def J3(f: WeightedFunction) -> WeightedFunction:
    """Monogenic inversion x |x|^(2-m) f(x/|x|^2, x u x/|x|^2)."""
    return left_mult_vector("x", pullback_inversion(f)).mul_r(2 - f.m)


def J4(f: WeightedFunction) -> WeightedFunction:
    """Harmonic inversion |x|^(4-m) f(x/|x|^2, x u x/|x|^2)."""
    return pullback_inversion(f).mul_r(4 - f.m)


def translate(f: WeightedFunction, a: Sequence) -> WeightedFunction:
    """f(x + a, u); weights are centred at the origin and cannot be translated."""
    m = f.m
    if len(a) != m:
        raise ValueError(f"translation vector needs {m} components")
    if not f.is_weight_free():
        raise WeightError("cannot translate a function carrying powers of |x|")
    images = {}
    for i, ai in enumerate(a, start=1):
        ai = rational(ai)
        if ai:
            images[("x", i)] = WeightedFunction.var(m, "x", i) + ai
    return substitute(f, images)


def dilate(f: WeightedFunction, lam) -> WeightedFunction:
    """f(lam x, u) for a positive rational lam; r^t -> lam^t r^t."""
    lam = to_fraction(rational(lam))
    if lam <= 0:
        raise ValueError("dilation factor must be positive")
    m = f.m
    images = {("x", i): WeightedFunction.var(m, "x", i).scale(rational(lam)) for i in range(1, m + 1)}
    return substitute(f, images, lambda t: WeightedFunction.r_power(m, t).scale(rational(lam**t)))


def conjugated_translation(which: str, j: int):
    """f -> J d/dx_j J f for J = J3 or J4, computed through the pullback."""
    from .weighted import diff_x

    inv = {"J3": J3, "J4": J4}[which]
    return lambda f: inv(diff_x(inv(f), j))


FUNDSOL_KINDS = ("D3", "D4")


def fundamental_solution(p: SpaceParams, which: str, f: WeightedFunction) -> WeightedFunction:
    """J3 f (for D3, f in M_k) or J4 f (for D4, f in H_k).

    With f = Z_k(., v) this is the fundamental solution up to its constant;
    with f a basis element it is the object whose annihilation is checked.
    """
    if which not in FUNDSOL_KINDS:
        raise ValueError(f"which must be one of {FUNDSOL_KINDS}")
    if f.depends_on("x") or not f.is_weight_free():
        raise SpaceError("fundamental solutions take an x-independent polynomial in u")
    _check_u_homogeneous(f, p.k)
    if which == "D3":
        if not is_monogenic(f):
            raise SpaceError("D3 fundamental solution needs an M_k element")
        return J3(f)
    if not is_harmonic(f):
        raise SpaceError("D4 fundamental solution needs an H_k element")
    return J4(f)


def apply_to_fundamental_solution(p: SpaceParams, which: str, f: WeightedFunction):
    sol = fundamental_solution(p, which, f)
    op = D3(p) if which == "D3" else D4(p)
    return sol, apply(op, sol)
