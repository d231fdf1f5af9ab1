"""Bases of P_k, H_k and M_k in the variable u, projections and reproducing kernels.

M_k is handled over the full Clifford algebra: every Cl_m-valued monogenic
polynomial is a right Cl_m-combination of P_k h with h a scalar harmonic, so a
basis of scalar harmonics determines everything.  Spans over the reals are
recovered by multiplying basis elements on the right by blades.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

from . import linalg
from .operators import DeltaU, Du, P1, Pk, apply
from .params import SpaceParams
from .weighted import (
    BITS,
    WeightedFunction,
    block_degree,
    fischer_pair,
    pack,
)

SPACE_TAGS = ("P_k", "H_k", "M_k", "uM_{k-1}", "u^2H_{k-2}")


class SpaceError(ValueError):
    """Input does not lie in the space an operation requires."""


def compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    """All exponent vectors of length ``parts`` summing to ``total`` (lex descending)."""
    if parts == 1:
        return [(total,)]
    out = []
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return out


def u_monomial(m: int, exps) -> int:
    return pack([0] * m + list(exps) + [0] * m)


def harmonic_dimension(m: int, k: int) -> int:
    """C(m+k-1, k) - C(m+k-3, k-2)."""
    return comb(m + k - 1, k) - (comb(m + k - 3, k - 2) if k >= 2 else 0)


def monogenic_dimension(m: int, k: int) -> int:
    """Real dimension of Cl_m-valued k-homogeneous monogenics: 2^m C(m+k-2, k)."""
    return (1 << m) * comb(m + k - 2, k)


def gram_matrix(elements) -> list[list]:
    return [[fischer_pair(a, b) for b in elements] for a in elements]


@dataclass
class SpaceBasis:
    """Explicit basis of one of the polynomial spaces in u."""

    tag: str
    params: SpaceParams
    elements: list[WeightedFunction]
    gram: list[list] = field(default=None, repr=False)

    def __post_init__(self):
        if self.tag not in SPACE_TAGS:
            raise ValueError(f"unknown space {self.tag}")
        if self.gram is None:
            self.gram = gram_matrix(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def u_degree(f: WeightedFunction) -> int | None:
    """Homogeneous degree in u, or None if f is zero or inhomogeneous in u."""
    degrees = f.degrees("u")
    return degrees.pop() if len(degrees) == 1 else None


def _check_u_homogeneous(f: WeightedFunction, k: int):
    degrees = f.degrees("u")
    if degrees and degrees != {k}:
        raise SpaceError(f"expected homogeneous degree {k} in u, got degrees {sorted(degrees)}")


def _vector_to_poly(m: int, monos: list[int], vec) -> WeightedFunction:
    return WeightedFunction(m, {(mono, 0, 0): c for mono, c in zip(monos, vec) if c})


@lru_cache(maxsize=None)
def monomial_basis(p: SpaceParams) -> SpaceBasis:
    m = p.m
    monos = [u_monomial(m, e) for e in compositions(p.k, m)]
    return SpaceBasis("P_k", p, [WeightedFunction._raw(m, {(mono, 0, 0): 1}) for mono in monos])


@lru_cache(maxsize=None)
def harmonic_basis(p: SpaceParams) -> SpaceBasis:
    """Nullspace of the Laplacian in u, as integer combinations of monomials."""
    m, k = p.m, p.k
    cols = compositions(k, m)
    col_monos = [u_monomial(m, e) for e in cols]
    if k < 2:
        return SpaceBasis("H_k", p, [_vector_to_poly(m, col_monos, [int(i == j) for i in range(len(cols))]) for j in range(len(cols))])
    rows = compositions(k - 2, m)
    row_index = {e: i for i, e in enumerate(rows)}
    matrix = [[0] * len(cols) for _ in rows]
    for j, e in enumerate(cols):
        for i in range(m):
            if e[i] >= 2:
                target = e[:i] + (e[i] - 2,) + e[i + 1:]
                matrix[row_index[target]][j] += e[i] * (e[i] - 1)
    null = linalg.nullspace(matrix, len(cols))
    return SpaceBasis("H_k", p, [_vector_to_poly(m, col_monos, vec) for vec in null])


def _real_vectors(elements):
    keys = sorted({key for f in elements for key in f._terms})
    return [[f._terms.get(key, 0) for key in keys] for f in elements]


def module_rank_vectors(elements) -> list[WeightedFunction]:
    """All right blade multiples g e_A; their real span is the right Cl_m-span."""
    return [g.right_blade(mask) for g in elements for mask in range(1 << (elements[0].m if elements else 0))]


def real_rank(elements) -> int:
    """Dimension over the reals of the span of Clifford-valued functions."""
    elements = [f for f in elements if len(f)]
    if not elements:
        return 0
    return linalg.rank(_real_vectors(elements))


def _integral(f: WeightedFunction) -> WeightedFunction:
    lcm = 1
    for c in f._terms.values():
        d = int(getattr(c, "denominator", 1))
        lcm = lcm * d // gcd(lcm, d)
    return f.scale(lcm) if lcm != 1 else f


def module_rank(elements) -> int:
    """Rank of the right Cl_m-span, i.e. real dimension divided by 2^m."""
    if not elements:
        return 0
    return real_rank(module_rank_vectors(elements)) >> elements[0].m


@lru_cache(maxsize=None)
def monogenic_basis(p: SpaceParams) -> SpaceBasis:
    """Right Cl_m-module generators of M_k, chosen among P_k of the harmonic basis.

    A candidate is kept only if its blade multiples enlarge the real span, so
    the result has C(m+k-2, k) elements and x^a p e_A runs over all of M_k.
    """
    m = p.m
    if p.k == 0:
        # constants are monogenic; no projection needed (its denominator is m-2)
        return SpaceBasis("M_k", p, [WeightedFunction.constant(m, 1)])
    cands = [_integral(project_Pk(h, p)) for h in harmonic_basis(p)]
    keys = sorted({(mono, b) for g in cands for (mono, _, _) in g._terms for b in range(1 << m)})
    index = {key: i for i, key in enumerate(keys)}
    ech = linalg.Echelon()
    chosen: list[WeightedFunction] = []
    for g in cands:
        grew = False
        for mask in range(1 << m):
            row = [0] * len(keys)
            for (mono, _, b), c in g.right_blade(mask)._terms.items():
                row[index[(mono, b)]] = c
            grew |= ech.add(row)
        if grew:
            chosen.append(g)
    return SpaceBasis("M_k", p, chosen)


@lru_cache(maxsize=None)
def shifted_monogenic_basis(p: SpaceParams) -> SpaceBasis:
    """u M_{k-1}: left multiplication by u of the degree k-1 monogenic basis."""
    if p.k == 0:
        return SpaceBasis("uM_{k-1}", p, [])
    lower = monogenic_basis(SpaceParams(p.m, p.k - 1))
    return SpaceBasis("uM_{k-1}", p, [f.left_mult_vector("u") for f in lower])


@lru_cache(maxsize=None)
def shifted_harmonic_basis(p: SpaceParams) -> SpaceBasis:
    """u^2 H_{k-2} = -|u|^2 H_{k-2}."""
    if p.k < 2:
        return SpaceBasis("u^2H_{k-2}", p, [])
    lower = harmonic_basis(SpaceParams(p.m, p.k - 2))
    return SpaceBasis("u^2H_{k-2}", p, [f.left_mult_vector("u").left_mult_vector("u") for f in lower])


def project_Pk(f: WeightedFunction, p: SpaceParams) -> WeightedFunction:
    """Almansi-Fischer projection H_k -> M_k, (1 + u Du / (m+2k-2)) f."""
    _check_u_homogeneous(f, p.k)
    return apply(Pk(p), f)


def project_P1(f: WeightedFunction, p: SpaceParams, check: bool = True) -> WeightedFunction:
    """Harmonic projection ker(DeltaU^2) -> H_k, (1 + u^2 DeltaU / (2(m+2k-4))) f."""
    _check_u_homogeneous(f, p.k)
    op = P1(p)
    if check:
        lap = DeltaU(p.m)
        if not apply(lap, apply(lap, f)).is_zero():
            raise SpaceError("input is not annihilated by DeltaU^2")
    return apply(op, f)


def almansi_fischer_split(h: WeightedFunction, p: SpaceParams):
    """h = p_k + u p_{k-1} with p_k = P_k h and p_{k-1} = -Du h / (m+2k-2)."""
    _check_u_homogeneous(h, p.k)
    if not apply(DeltaU(p.m), h).is_zero():
        raise SpaceError("Almansi-Fischer split needs a harmonic input")
    pk = project_Pk(h, p)
    lower = apply(Du(p.m), h).scale(-Fraction(1, p.value("m+2k-2")))
    return pk, lower


def u_to_v(f: WeightedFunction) -> WeightedFunction:
    """Rename u_i -> v_i in a polynomial in u only."""
    m = f.m
    if f.depends_on("v") or f.depends_on("x") or not f.is_weight_free():
        raise SpaceError("u_to_v expects a polynomial in u only")
    return WeightedFunction._raw(m, {(mono << (BITS * m), t, b): c for (mono, t, b), c in f._terms.items()})


KERNEL_SPACES = ("H_k", "M_k")


@lru_cache(maxsize=None)
def reproducing_kernel(p: SpaceParams, space: str = "H_k") -> WeightedFunction:
    """Z_k(u, v) with [conj(Z)(d/du) q](u=0) = q(v) for every q in the space.

    Built from the scalar harmonic basis h_a with Gram matrix G:
    Z^H = sum_ab h_a(u) G^-1_ab h_b(v), and for M_k each slot is projected,
    Z^M = sum_ab (P_k h_a)(u) G^-1_ab conj((P_k h_b)(v)).
    """
    if space not in KERNEL_SPACES:
        raise ValueError(f"kernel space must be one of {KERNEL_SPACES}")
    basis = harmonic_basis(p).elements
    ginv = linalg.inverse(harmonic_basis(p).gram)
    if space == "H_k":
        left = basis
        right = [u_to_v(h) for h in basis]
    else:
        proj = [project_Pk(h, p) for h in basis]
        left = proj
        right = [u_to_v(q).conjugate() for q in proj]
    out = WeightedFunction.zero(p.m)
    for a, fa in enumerate(left):
        row = WeightedFunction.zero(p.m)
        for b, gb in enumerate(right):
            if ginv[a][b]:
                row = row + gb.scale(ginv[a][b])
        out = out + fa * row
    return out


def value_space_basis(p: SpaceParams, space: str) -> list[WeightedFunction]:
    """Spanning elements (up to right blade factors) of the u-value space."""
    if space in ("P", "P_k"):
        return monomial_basis(p).elements
    if space in ("H", "H_k"):
        return harmonic_basis(p).elements
    if space in ("M", "M_k"):
        return monogenic_basis(p).elements
    raise ValueError(f"unknown value space {space!r}")


def is_monogenic(f: WeightedFunction) -> bool:
    return apply(Du(f.m), f).is_zero()


def is_harmonic(f: WeightedFunction) -> bool:
    return apply(DeltaU(f.m), f).is_zero()


def u_only(f: WeightedFunction) -> bool:
    return f.is_weight_free() and all(
        block_degree(mono, "x", f.m) == 0 and block_degree(mono, "v", f.m) == 0 for (mono, _, _) in f._terms
    )

