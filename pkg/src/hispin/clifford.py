"""Exact arithmetic in the real Clifford algebra Cl_m with e_i e_j + e_j e_i = -2 delta_ij.

Blades are stored as bitmasks: bit ``i - 1`` set means e_i is a factor.  The
canonical blade e_A lists its indices in increasing order, so a product of two
blades is the XOR of their masks up to a sign that counts the transpositions
needed to sort the concatenated index list plus one factor of -1 for every
repeated generator (e_i^2 = -1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from ._numbers import fmt, rational

MAX_DIMENSION = 10


class DimensionError(ValueError):
    """Operands live in Clifford algebras of different dimension."""


def _popcount(n: int) -> int:
    return bin(n).count("1")


def blade_grade(mask: int) -> int:
    return _popcount(mask)


def blade_indices(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def blade_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << (i - 1)
    return mask


def blade_sign(a: int, b: int) -> int:
    """Sign of e_a * e_b relative to the canonical blade e_{a xor b}."""
    swaps = 0
    s = a >> 1
    while s:
        swaps += _popcount(s & b)
        s >>= 1
    swaps += _popcount(a & b)  # e_i e_i = -1
    return -1 if swaps & 1 else 1


@lru_cache(maxsize=None)
def sign_table(m: int) -> tuple[tuple[int, ...], ...]:
    """``sign_table(m)[a][b]`` is the sign of e_a e_b for blades of Cl_m."""
    n = 1 << m
    return tuple(tuple(blade_sign(a, b) for b in range(n)) for a in range(n))


def reverse_sign(mask: int) -> int:
    r = _popcount(mask)
    return -1 if (r * (r - 1) // 2) & 1 else 1


def conjugate_sign(mask: int) -> int:
    r = _popcount(mask)
    return -1 if (r * (r + 1) // 2) & 1 else 1


def involution_sign(mask: int) -> int:
    return -1 if _popcount(mask) & 1 else 1


def blade_token(mask: int) -> str:
    return "e[" + ",".join(str(i) for i in blade_indices(mask)) + "]"


@dataclass(frozen=True)
class Blade:
    """A basis blade e_{j_1} ... e_{j_r} with strictly increasing indices."""

    m: int
    indices: tuple[int, ...] = ()

    def __post_init__(self):
        if not 1 <= self.m <= MAX_DIMENSION:
            raise ValueError(f"dimension must be in 1..{MAX_DIMENSION}, got {self.m}")
        idx = tuple(self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"blade indices must be strictly increasing: {idx}")
        if idx and not (1 <= idx[0] and idx[-1] <= self.m):
            raise ValueError(f"blade indices must lie in 1..{self.m}: {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def mask(self) -> int:
        return blade_mask(self.indices)

    @property
    def grade(self) -> int:
        return len(self.indices)

    def to_multivector(self) -> "Multivector":
        return Multivector(self.m, {self.mask: 1})


class Multivector:
    """Element of Cl_m stored as a sparse map blade mask -> coefficient.

    Instances are immutable; zero coefficients are never stored.
    """

    __slots__ = ("m", "_terms")

    def __init__(self, m: int, terms: Mapping[int, object] | None = None):
        if not 1 <= m <= MAX_DIMENSION:
            raise ValueError(f"dimension must be in 1..{MAX_DIMENSION}, got {m}")
        top = 1 << m
        clean = {}
        for mask, c in (terms or {}).items():
            if not 0 <= mask < top:
                raise ValueError(f"blade {blade_indices(mask)} outside Cl_{m}")
            if not isinstance(c, float):
                c = rational(c)
            if c != 0:
                clean[mask] = c
        self.m = m
        self._terms = clean

    # construction helpers
    @classmethod
    def scalar(cls, m: int, c=1) -> "Multivector":
        return cls(m, {0: c})

    @classmethod
    def basis(cls, m: int, *indices: int) -> "Multivector":
        """Product e_{i1} e_{i2} ... in the given (not necessarily sorted) order."""
        out = cls.scalar(m)
        for i in indices:
            out = out * Blade(m, (i,)).to_multivector()
        return out

    @classmethod
    def vector(cls, components: Iterable[object]) -> "Multivector":
        comps = list(components)
        return cls(len(comps), {1 << i: c for i, c in enumerate(comps)})

    @property
    def terms(self) -> dict[int, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, indices: Iterable[int] = ()) -> object:
        return self._terms.get(blade_mask(indices), 0)

    def _check(self, other: "Multivector"):
        if other.m != self.m:
            raise DimensionError(f"Cl_{self.m} vs Cl_{other.m}")

    def _lift(self, other) -> "Multivector":
        if isinstance(other, Multivector):
            self._check(other)
            return other
        return Multivector.scalar(self.m, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return Multivector(self.m, out)

    __radd__ = __add__

    def __neg__(self):
        return Multivector(self.m, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Multivector):
            return Multivector(self.m, {k: c * other for k, c in self._terms.items()})
        return geometric_product(self, other)

    def __rmul__(self, other):
        return Multivector(self.m, {k: other * c for k, c in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, Multivector):
            return self.m == other.m and self._terms == other._terms
        if isinstance(other, (int, float)) or hasattr(other, "denominator"):
            return self._terms == ({0: other} if other != 0 else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.m, frozenset(self._terms.items())))

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def grade(self, r: int) -> "Multivector":
        return Multivector(self.m, {k: c for k, c in self._terms.items() if _popcount(k) == r})

    def reverse(self) -> "Multivector":
        return reverse(self)

    def conjugate(self) -> "Multivector":
        return clifford_conjugate(self)

    def scalar_part(self):
        return scalar_part(self)

    def __repr__(self):
        return f"Multivector({self.m}, {to_text(self)!r})"

    def __str__(self):
        return to_text(self)


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    if a.m != b.m:
        raise DimensionError(f"Cl_{a.m} vs Cl_{b.m}")
    table = sign_table(a.m)
    out: dict[int, object] = {}
    for ka, ca in a._terms.items():
        row = table[ka]
        for kb, cb in b._terms.items():
            k = ka ^ kb
            out[k] = out.get(k, 0) + row[kb] * ca * cb
    return Multivector(a.m, out)


def reverse(a: Multivector) -> Multivector:
    return Multivector(a.m, {k: reverse_sign(k) * c for k, c in a._terms.items()})


def clifford_conjugate(a: Multivector) -> Multivector:
    return Multivector(a.m, {k: conjugate_sign(k) * c for k, c in a._terms.items()})


def grade_involution(a: Multivector) -> Multivector:
    return Multivector(a.m, {k: involution_sign(k) * c for k, c in a._terms.items()})


def scalar_part(a: Multivector):
    return a._terms.get(0, 0)


def vector_components(a: Multivector) -> tuple:
    """Components of a grade-1 multivector; raises if other grades are present."""
    if any(_popcount(k) != 1 for k in a._terms):
        raise ValueError(f"not a vector: {a}")
    return tuple(a._terms.get(1 << i, 0) for i in range(a.m))


def reflect_vector(x: Multivector, u: Multivector) -> Multivector:
    """The Clifford sandwich x u x, equal to |x|^2 u - 2<u,x> x for vectors."""
    vector_components(x)
    vector_components(u)
    out = x * u * x
    vector_components(out)
    return out


# plain-text format: "3 + 1/2 e[1,2] - 1 e[3]"
_TERM_RE = re.compile(
    r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*(?:\*?\s*e\[([0-9,\s]*)\])?\s*"
)


def to_text(a: Multivector) -> str:
    if not a._terms:
        return "0"
    parts = []
    for k in sorted(a._terms, key=lambda k: (_popcount(k), blade_indices(k))):
        c = a._terms[k]
        neg = c < 0
        body = fmt(-c if neg else c)
        if k:
            body += " " + blade_token(k)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def parse_multivector(text: str, m: int) -> Multivector:
    text = text.strip()
    if text == "0":
        return Multivector(m)
    pos = 0
    out = Multivector(m)
    first = True
    while pos < len(text):
        match = _TERM_RE.match(text, pos)
        if not match or match.end() == pos:
            raise ValueError(f"cannot parse multivector near {text[pos:]!r}")
        sign, coef, idx = match.groups()
        if sign is None and not first:
            raise ValueError(f"missing operator before {text[pos:]!r}")
        if coef is None and idx is None:
            raise ValueError(f"empty term in {text!r}")
        c = rational(coef) if coef else 1
        if sign == "-":
            c = -c
        indices = tuple(int(s) for s in idx.split(",") if s.strip()) if idx else ()
        out = out + Multivector(m, {Blade(m, indices).mask: c})
        pos = match.end()
        first = False
    return out
