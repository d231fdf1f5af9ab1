"""Right-hand sides of the commutator lemmas, transcribed term by term.

Kept apart from the operator builders so a transcription slip is confined to
one place.  Every term carries its own label in the shared text notation;
``LEMMAS`` lists, for each identity, the operator X in [X, C] and the terms
of the claimed value of the commutator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .operators import (
    C3,
    C4,
    D2,
    DeltaX,
    DudotDx,
    Dx,
    NormU2,
    Op,
    Scaled,
    Sum,
    U,
    UdotDx,
    d_u,
    d_x,
    e_,
    u_,
    x_,
)
from .params import SpaceParams


@dataclass(frozen=True)
class Lemma:
    name: str
    anchor: str
    family: str  # "D3" (acts on M_k) or "D4" (acts on H_k)
    guards: tuple[str, ...]
    lhs: Callable[[SpaceParams], Op]
    rhs_terms: Callable[[SpaceParams, int], list[tuple[str, Op]]]

    def left(self, p: SpaceParams) -> Op:
        return self.lhs(p)

    def right(self, p: SpaceParams, j: int) -> Op:
        return Sum([Scaled(1, op, label) for label, op in self.rhs_terms(p, j)])

    def conformal_generator(self, p: SpaceParams, j: int) -> Op:
        return C3(p, j) if self.family == "D3" else C4(p, j)


def _q(n, d=1):
    return Fraction(n, d)


# -- third order pieces --------------------------------------------------------

def _pieces3(m):
    return Dx(m), UdotDx(m), DudotDx(m), U(), NormU2(m)


def _lemma1_lhs(p):
    dx = Dx(p.m)
    return dx @ dx @ dx


def _lemma1_rhs(p, j):
    dx, ud, dd, u, nu = _pieces3(p.m)
    return [
        ("4 <u,Dx>Dx d/du_j", 4 * (ud @ dx @ d_u(j))),
        ("-2 u d/du_j Dx^2", -2 * (u @ d_u(j) @ dx @ dx)),
        ("-4 u_j Dx<Du,Dx>", -4 * (u_(j) @ dx @ dd)),
        ("6 x_j Dx^3", 6 * (x_(j) @ dx @ dx @ dx)),
    ]


def _lemma2_lhs(p):
    dx, ud, dd, u, nu = _pieces3(p.m)
    return ud @ dd @ dx


def _lemma2_rhs(p, j):
    dx, ud, dd, u, nu = _pieces3(p.m)
    a0, a1 = p.value("m+2k"), p.value("m+2k-2")
    return [
        ("-(m+2k) <u,Dx>Dx d/du_j", -a0 * (ud @ dx @ d_u(j))),
        ("-e_j u<Du,Dx>Dx", -(e_(j) @ u @ dd @ dx)),
        ("(m+2k-2) u_j<Du,Dx>Dx", a1 * (u_(j) @ dd @ dx)),
        ("-2 u<u,Dx><Du,Dx>d/du_j", -2 * (u @ ud @ dd @ d_u(j))),
        ("-2 |u|^2<Du,Dx>Dx d/du_j", -2 * (nu @ dd @ dx @ d_u(j))),
        ("6 x_j<u,Dx><Du,Dx>Dx", 6 * (x_(j) @ ud @ dd @ dx)),
    ]


def _lemma3_lhs(p):
    dx, ud, dd, u, nu = _pieces3(p.m)
    return nu @ dd @ dd @ dx


def _lemma3_rhs(p, j):
    dx, ud, dd, u, nu = _pieces3(p.m)
    return [
        ("2 |u|^2<Du,Dx>^2 e_j", 2 * (nu @ dd @ dd @ e_(j))),
        ("-(2m+4k-4) |u|^2<Du,Dx>Dx d/du_j", -(2 * p.m + 4 * p.k - 4) * (nu @ dd @ dx @ d_u(j))),
        ("-2 u|u|^2<Du,Dx>^2 d/du_j", -2 * (u @ nu @ dd @ dd @ d_u(j))),
        ("6 x_j|u|^2<Du,Dx>^2Dx", 6 * (x_(j) @ nu @ dd @ dd @ dx)),
    ]


def _lemma4_lhs(p):
    dx, ud, dd, u, nu = _pieces3(p.m)
    return u @ dd @ dx @ dx


def _lemma4_rhs(p, j):
    dx, ud, dd, u, nu = _pieces3(p.m)
    a0 = p.value("m+2k")
    return [
        ("-2 e_j u<Du,Dx>Dx", -2 * (e_(j) @ u @ dd @ dx)),
        ("-4 u_j<Du,Dx>Dx", -4 * (u_(j) @ dd @ dx)),
        ("-(m+2k) uDx^2 d/du_j", -a0 * (u @ dx @ dx @ d_u(j))),
        ("4 u<u,Dx><Du,Dx>d/du_j", 4 * (u @ ud @ dd @ d_u(j))),
        ("-4 u_j u<Du,Dx>^2", -4 * (u_(j) @ u @ dd @ dd)),
        ("6 x_j u<Du,Dx>Dx^2", 6 * (x_(j) @ u @ dd @ dx @ dx)),
    ]


def _lemma5_lhs(p):
    dx, ud, dd, u, nu = _pieces3(p.m)
    return u @ ud @ dd @ dd


def _lemma5_rhs(p, j):
    dx, ud, dd, u, nu = _pieces3(p.m)
    a1 = p.value("m+2k-2")
    return [
        ("-e_j |u|^2<Du,Dx>^2", -(e_(j) @ nu @ dd @ dd)),
        ("-(2m+4k-4) u<u,Dx><Du,Dx>d/du_j", -(2 * p.m + 4 * p.k - 4) * (u @ ud @ dd @ d_u(j))),
        ("-2 u|u|^2<Du,Dx>^2 d/du_j", -2 * (u @ nu @ dd @ dd @ d_u(j))),
        ("(m+2k-2) u_j u<Du,Dx>^2", a1 * (u_(j) @ u @ dd @ dd)),
        ("6 x_j u<u,Dx><Du,Dx>^2", 6 * (x_(j) @ u @ ud @ dd @ dd)),
    ]


def _lemma6_lhs(p):
    dx, ud, dd, u, nu = _pieces3(p.m)
    return u @ u @ u @ dd @ dd @ dd


def _lemma6_rhs(p, j):
    dx, ud, dd, u, nu = _pieces3(p.m)
    c = p.value("m+6k-10")
    return [
        ("-(m+6k-10) u^3<Du,Dx>^2 d/du_j", -c * (u @ u @ u @ dd @ dd @ d_u(j))),
        ("6 x_j u^3<Du,Dx>^3", 6 * (x_(j) @ u @ u @ u @ dd @ dd @ dd)),
    ]


# -- fourth order pieces -----------------------------------------------------------

def _pieces4(p):
    m = p.m
    return D2(p), DeltaX(m), UdotDx(m), DudotDx(m), NormU2(m)


def _lemmaA_lhs(p):
    d2 = D2(p)
    return d2 @ d2


def _lemmaA_rhs(p, j):
    d2, lap, ud, dd, nu = _pieces4(p)
    a, b = p.value("m+2k-2"), p.value("m+2k-4")
    a2, a2b, a2b2 = a * a, a * a * b, a * a * b * b
    return [
        ("-8 x_j D2^2", -8 * (x_(j) @ d2 @ d2)),
        ("32/(m+2k-2)^2 <u,Dx>DeltaX d/du_j", _q(32, a2) * (ud @ lap @ d_u(j))),
        ("-32/(m+2k-2)^2 u_j<Du,Dx>DeltaX", _q(-32, a2) * (u_(j) @ dd @ lap)),
        ("-128/((m+2k-2)^2(m+2k-4)) <u,Dx>^2<Du,Dx>d/du_j", _q(-128, a2b) * (ud @ ud @ dd @ d_u(j))),
        ("128/((m+2k-2)^2(m+2k-4)^2) |u|^2<Du,Dx>DeltaX d/du_j", _q(128, a2b2) * (nu @ dd @ lap @ d_u(j))),
        ("-128/((m+2k-2)^2(m+2k-4)^2) |u|^2<Du,Dx>^2 d/dx_j", _q(-128, a2b2) * (nu @ dd @ dd @ d_x(j))),
        ("128/((m+2k-2)^2(m+2k-4)) u_j<u,Dx><Du,Dx>^2", _q(128, a2b) * (u_(j) @ ud @ dd @ dd)),
        ("128/((m+2k-2)^2(m+2k-4)^2) |u|^2<u,Dx><Du,Dx>^2 d/du_j", _q(128, a2b2) * (nu @ ud @ dd @ dd @ d_u(j))),
        ("-128/((m+2k-2)^2(m+2k-4)^2) u_j|u|^2<Du,Dx>^3", _q(-128, a2b2) * (u_(j) @ nu @ dd @ dd @ dd)),
    ]


def _lemmaB_lhs(p):
    return D2(p) @ DeltaX(p.m)


def _lemmaB_rhs(p, j):
    d2, lap, ud, dd, nu = _pieces4(p)
    a, b = p.value("m+2k-2"), p.value("m+2k-4")
    lin = 4 * p.m + 8 * p.k - 16
    return [
        ("-8 x_j D2 DeltaX", -8 * (x_(j) @ d2 @ lap)),
        ("(4m+8k-16)/(m+2k-2) <u,Dx>DeltaX d/du_j", _q(lin, a) * (ud @ lap @ d_u(j))),
        ("-16/(m+2k-2) <u,Dx>^2<Du,Dx>d/du_j", _q(-16, a) * (ud @ ud @ dd @ d_u(j))),
        ("16/((m+2k-2)(m+2k-4)) |u|^2<Du,Dx>DeltaX d/du_j", _q(16, a * b) * (nu @ dd @ lap @ d_u(j))),
        ("16/((m+2k-2)(m+2k-4)) |u|^2<u,Dx><Du,Dx>^2 d/du_j", _q(16, a * b) * (nu @ ud @ dd @ dd @ d_u(j))),
        ("-(4m+8k-16)/(m+2k-2) u_j<Du,Dx>DeltaX", _q(-lin, a) * (u_(j) @ dd @ lap)),
        ("16/(m+2k-2) u_j<u,Dx><Du,Dx>^2", _q(16, a) * (u_(j) @ ud @ dd @ dd)),
        ("-16/((m+2k-2)(m+2k-4)) |u|^2<Du,Dx>^2 d/dx_j", _q(-16, a * b) * (nu @ dd @ dd @ d_x(j))),
        ("-16/((m+2k-2)(m+2k-4)) u_j|u|^2<Du,Dx>^3", _q(-16, a * b) * (u_(j) @ nu @ dd @ dd @ dd)),
    ]


_G3: tuple[str, ...] = ()  # constants appear only as multipliers
_G4 = ("m+2k-2", "m+2k-4")

LEMMAS = (
    Lemma("lemma3_Dx3", "[Dx^3, C3] = 4<u,Dx>Dx d_uj - 2u d_uj Dx^2 - 4u_j Dx<Du,Dx> + 6x_j Dx^3",
          "D3", _G3, _lemma1_lhs, _lemma1_rhs),
    Lemma("lemma3_uDx_DuDx_Dx", "[<u,Dx><Du,Dx>Dx, C3] = -(m+2k)<u,Dx>Dx d_uj - e_j u<Du,Dx>Dx + ... + 6x_j<u,Dx><Du,Dx>Dx",
          "D3", _G3, _lemma2_lhs, _lemma2_rhs),
    Lemma("lemma3_u2_DuDx2_Dx", "[|u|^2<Du,Dx>^2Dx, C3] = 2|u|^2<Du,Dx>^2 e_j - (2m+4k-4)|u|^2<Du,Dx>Dx d_uj - ... + 6x_j|u|^2<Du,Dx>^2Dx",
          "D3", _G3, _lemma3_lhs, _lemma3_rhs),
    Lemma("lemma3_u_DuDx_Dx2", "[u<Du,Dx>Dx^2, C3] = -2e_j u<Du,Dx>Dx - 4u_j<Du,Dx>Dx - ... + 6x_j u<Du,Dx>Dx^2",
          "D3", _G3, _lemma4_lhs, _lemma4_rhs),
    Lemma("lemma3_u_uDx_DuDx2", "[u<u,Dx><Du,Dx>^2, C3] = -e_j|u|^2<Du,Dx>^2 - (2m+4k-4)u<u,Dx><Du,Dx>d_uj - ... + 6x_j u<u,Dx><Du,Dx>^2",
          "D3", _G3, _lemma5_lhs, _lemma5_rhs),
    Lemma("lemma3_u3_DuDx3", "[u^3<Du,Dx>^3, C3] = -(m+6k-10)u^3<Du,Dx>^2 d_uj + 6x_j u^3<Du,Dx>^3",
          "D3", _G3, _lemma6_lhs, _lemma6_rhs),
    Lemma("lemma4_D2sq", "[D2^2, C4] = -8x_j D2^2 + 32<u,Dx>DeltaX d_uj/(m+2k-2)^2 - ...",
          "D4", _G4, _lemmaA_lhs, _lemmaA_rhs),
    Lemma("lemma4_D2_DeltaX", "[D2 DeltaX, C4] = -8x_j D2 DeltaX + (4m+8k-16)/(m+2k-2) <u,Dx>DeltaX d_uj - ...",
          "D4", _G4, _lemmaB_lhs, _lemmaB_rhs),
)


def lemma(name: str) -> Lemma:
    for item in LEMMAS:
        if item.name == name:
            return item
    raise KeyError(name)
