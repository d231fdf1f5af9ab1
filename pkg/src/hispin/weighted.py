"""Clifford-valued polynomials in x, u, v extended by integer powers of r = |x|.

A :class:`WeightedFunction` is a finite sum of terms ``c * x^a u^b v^g * e_A * r^t``.
Terms live in a dict keyed by ``(monomial, t, blade)`` where the monomial packs
all 3m exponents into one int (8 bits per variable, x block first, then u, then
v) so that monomial multiplication is integer addition.

Arithmetic keeps terms merged but does not trade powers of r against powers of
sum(x_i^2); :meth:`WeightedFunction.canonical` does that, and equality and
:meth:`is_zero` are decided on the canonical form.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache
from typing import Iterable, Mapping

from ._numbers import fmt, rational, scalar_like
from .clifford import (
    Blade,
    DimensionError,
    Multivector,
    blade_indices,
    blade_token,
    conjugate_sign,
    sign_table,
)

BITS = 8
FIELD = (1 << BITS) - 1
VARS = ("x", "u", "v")


class WeightError(ValueError):
    """An operation that needs a weight-free input received r^t factors."""


@lru_cache(maxsize=None)
def _layout(m: int):
    guard = 0
    for idx in range(3 * m):
        guard |= 1 << (BITS * idx + BITS - 1)
    return guard


def shift(var: str, i: int, m: int) -> int:
    if not 1 <= i <= m:
        raise IndexError(f"axis {i} outside 1..{m}")
    return BITS * (VARS.index(var) * m + i - 1)


def unit(var: str, i: int, m: int) -> int:
    return 1 << shift(var, i, m)


def exponents(mono: int, m: int) -> tuple[int, ...]:
    return tuple((mono >> (BITS * idx)) & FIELD for idx in range(3 * m))


def pack(exps: Iterable[int]) -> int:
    mono = 0
    for idx, e in enumerate(exps):
        if not 0 <= e < (1 << (BITS - 1)):
            raise OverflowError(f"exponent {e} out of range")
        mono |= e << (BITS * idx)
    return mono


def block_degree(mono: int, var: str, m: int) -> int:
    base = VARS.index(var) * m
    return sum((mono >> (BITS * (base + j))) & FIELD for j in range(m))


@lru_cache(maxsize=None)
def norm_sq_power(m: int, n: int) -> tuple[tuple[int, int], ...]:
    """(sum_i x_i^2)^n as ((monomial, integer coefficient), ...)."""
    poly = {0: 1}
    sq = [2 * unit("x", i, m) for i in range(1, m + 1)]
    for _ in range(n):
        nxt: dict[int, int] = {}
        for mono, c in poly.items():
            for s in sq:
                nxt[mono + s] = nxt.get(mono + s, 0) + c
        poly = nxt
    return tuple(sorted(poly.items()))


def _clean(terms: dict) -> dict:
    return {k: c for k, c in terms.items() if c != 0}


class WeightedFunction:
    """Immutable sum of Clifford-coefficient monomials times powers of |x|."""

    __slots__ = ("m", "_terms")

    def __init__(self, m: int, terms: Mapping | None = None):
        if m < 1:
            raise ValueError("dimension must be positive")
        guard = _layout(m)
        clean = {}
        top = 1 << m
        for key, c in (terms or {}).items():
            mono, t, blade = key
            if mono < 0 or mono & guard or mono >> (BITS * 3 * m):
                raise OverflowError(f"bad monomial {mono}")
            if not 0 <= blade < top:
                raise ValueError(f"blade {blade} outside Cl_{m}")
            if not isinstance(c, float):
                c = rational(c)
            if c != 0:
                clean[(mono, int(t), blade)] = clean.get((mono, int(t), blade), 0) + c
        self.m = m
        self._terms = _clean(clean)

    @classmethod
    def _raw(cls, m: int, terms: dict) -> "WeightedFunction":
        obj = object.__new__(cls)
        obj.m = m
        obj._terms = terms
        return obj

    # -- construction -------------------------------------------------
    @classmethod
    def zero(cls, m: int) -> "WeightedFunction":
        return cls._raw(m, {})

    @classmethod
    def constant(cls, m: int, c=1) -> "WeightedFunction":
        if isinstance(c, Multivector):
            if c.m != m:
                raise DimensionError(f"Cl_{c.m} constant in dimension {m}")
            return cls._raw(m, {(0, 0, k): v for k, v in c.items()})
        return cls(m, {(0, 0, 0): c})

    @classmethod
    def var(cls, m: int, var: str, i: int) -> "WeightedFunction":
        return cls._raw(m, {(unit(var, i, m), 0, 0): 1})

    @classmethod
    def blade(cls, m: int, *indices: int) -> "WeightedFunction":
        return cls._raw(m, {(0, 0, Blade(m, tuple(indices)).mask): 1})

    @classmethod
    def r_power(cls, m: int, t: int) -> "WeightedFunction":
        return cls._raw(m, {(0, t, 0): 1})

    @classmethod
    def monomial(cls, m: int, x=(), u=(), v=(), blade: int = 0, t: int = 0, c=1):
        exps = list(x) + [0] * (m - len(x)) + list(u) + [0] * (m - len(u)) + list(v)
        exps += [0] * (3 * m - len(exps))
        return cls(m, {(pack(exps), t, blade): c})

    @classmethod
    def vector(cls, m: int, var: str) -> "WeightedFunction":
        """sum_i var_i e_i."""
        return cls._raw(m, {(unit(var, i, m), 0, 1 << (i - 1)): 1 for i in range(1, m + 1)})

    @classmethod
    def norm_sq(cls, m: int, var: str = "x") -> "WeightedFunction":
        return cls._raw(m, {(2 * unit(var, i, m), 0, 0): 1 for i in range(1, m + 1)})

    # -- inspection -----------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def weights(self) -> set[int]:
        return {t for (_, t, _) in self._terms}

    def is_weight_free(self) -> bool:
        return all(t == 0 for (_, t, _) in self._terms)

    def depends_on(self, var: str) -> bool:
        return any(block_degree(mono, var, self.m) for (mono, _, _) in self._terms)

    def degrees(self, var: str) -> set[int]:
        return {block_degree(mono, var, self.m) for (mono, _, _) in self._terms}

    def sample_coefficient(self):
        for c in self._terms.values():
            return c
        return 0

    # -- ring structure ---------------------------------------------------
    def _check(self, other: "WeightedFunction"):
        if other.m != self.m:
            raise DimensionError(f"dimension {self.m} vs {other.m}")

    def _lift(self, other) -> "WeightedFunction":
        if isinstance(other, WeightedFunction):
            self._check(other)
            return other
        if isinstance(other, Multivector):
            return WeightedFunction.constant(self.m, other)
        return WeightedFunction.constant(self.m, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return WeightedFunction._raw(self.m, _clean(out))

    def __radd__(self, other):
        return self._lift(other) + self

    def __neg__(self):
        return WeightedFunction._raw(self.m, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) - c
        return WeightedFunction._raw(self.m, _clean(out))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "WeightedFunction":
        if c == 0:
            return WeightedFunction.zero(self.m)
        return WeightedFunction._raw(self.m, {k: c * v for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (WeightedFunction, Multivector)):
            return mul(self, self._lift(other))
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, Multivector):
            return mul(self._lift(other), self)
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are only available for r")
        out = WeightedFunction.constant(self.m, 1)
        for _ in range(n):
            out = mul(out, self)
        return out

    def __eq__(self, other):
        if isinstance(other, (WeightedFunction, Multivector, int)) or hasattr(other, "denominator"):
            return (self - self._lift(other)).is_zero()
        return NotImplemented

    __hash__ = None  # equality is semantic (canonical form), not structural

    def __bool__(self):
        return not self.is_zero()

    # -- calculus -------------------------------------------------------
    def diff(self, var: str, i: int) -> "WeightedFunction":
        return diff_x(self, i) if var == "x" else diff_var(self, var, i)

    def mul_var(self, var: str, i: int, power: int = 1) -> "WeightedFunction":
        step = power * unit(var, i, self.m)
        guard = _layout(self.m)
        out = {}
        for (mono, t, b), c in self._terms.items():
            nm = mono + step
            if nm & guard:
                raise OverflowError("exponent overflow")
            out[(nm, t, b)] = c
        return WeightedFunction._raw(self.m, out)

    def mul_r(self, t: int) -> "WeightedFunction":
        """Multiply by r^t."""
        return WeightedFunction._raw(self.m, {(mono, s + t, b): c for (mono, s, b), c in self._terms.items()})

    def left_blade(self, mask: int, c=1) -> "WeightedFunction":
        row = sign_table(self.m)[mask]
        return WeightedFunction._raw(
            self.m, {(mono, t, b ^ mask): (c * v if row[b] > 0 else -(c * v)) for (mono, t, b), v in self._terms.items()}
        )

    def right_blade(self, mask: int) -> "WeightedFunction":
        table = sign_table(self.m)
        return WeightedFunction._raw(
            self.m, {(mono, t, b ^ mask): (v if table[b][mask] > 0 else -v) for (mono, t, b), v in self._terms.items()}
        )

    def left_mult_vector(self, var: str) -> "WeightedFunction":
        return left_mult_vector(var, self)

    def conjugate(self) -> "WeightedFunction":
        """Clifford conjugation of the coefficients (variables are scalars)."""
        return WeightedFunction._raw(self.m, {k: conjugate_sign(k[2]) * c for k, c in self._terms.items()})

    def blade_part(self, mask: int = 0) -> "WeightedFunction":
        return WeightedFunction._raw(self.m, {k: c for k, c in self._terms.items() if k[2] == mask})

    # -- normal form ------------------------------------------------------
    def canonical(self) -> "WeightedFunction":
        return WeightedFunction._raw(self.m, canonical_terms(self.m, self._terms))

    def is_zero(self, tol: float = 0.0) -> bool:
        terms = self._terms
        if tol:
            terms = {k: c for k, c in terms.items() if abs(c) > tol}
        if not terms:
            return True
        weights = {t for (_, t, _) in terms}
        if len(weights) == 1:
            return False
        for parity in (0, 1):
            group = {k: c for k, c in terms.items() if k[1] & 1 == parity}
            if not group:
                continue
            tmin = min(t for (_, t, _) in group)
            rebased = _rebase(self.m, group, tmin)
            if tol:
                rebased = {k: c for k, c in rebased.items() if abs(c) > tol}
            if rebased:
                return False
        return True

    def __repr__(self):
        return f"WeightedFunction({self.m}, {to_text(self)!r})"

    def __str__(self):
        return to_text(self)


def mul(f: WeightedFunction, g: WeightedFunction) -> WeightedFunction:
    """Product f*g; the order of Clifford factors is preserved."""
    if f.m != g.m:
        raise DimensionError(f"dimension {f.m} vs {g.m}")
    table = sign_table(f.m)
    guard = _layout(f.m)
    out: dict = {}
    gitems = list(g._terms.items())
    for (ma, ta, ba), ca in f._terms.items():
        row = table[ba]
        for (mb, tb, bb), cb in gitems:
            mono = ma + mb
            if mono & guard:
                raise OverflowError("exponent overflow in product")
            key = (mono, ta + tb, ba ^ bb)
            c = ca * cb
            out[key] = out.get(key, 0) + (c if row[bb] > 0 else -c)
    return WeightedFunction._raw(f.m, _clean(out))


def add(f: WeightedFunction, g: WeightedFunction) -> WeightedFunction:
    return f + g


def diff_x(f: WeightedFunction, i: int) -> WeightedFunction:
    """d/dx_i with d(r^t)/dx_i = t x_i r^(t-2)."""
    s = shift("x", i, f.m)
    one = 1 << s
    out: dict = {}
    for (mono, t, b), c in f._terms.items():
        e = (mono >> s) & FIELD
        if e:
            key = (mono - one, t, b)
            out[key] = out.get(key, 0) + e * c
        if t:
            key = (mono + one, t - 2, b)
            out[key] = out.get(key, 0) + t * c
    return WeightedFunction._raw(f.m, _clean(out))


def diff_var(f: WeightedFunction, var: str, i: int) -> WeightedFunction:
    """Partial derivative in u_i or v_i; weights are x-only and untouched."""
    if var == "x":
        return diff_x(f, i)
    s = shift(var, i, f.m)
    one = 1 << s
    out: dict = {}
    for (mono, t, b), c in f._terms.items():
        e = (mono >> s) & FIELD
        if e:
            out[(mono - one, t, b)] = e * c  # distinct source keys map to distinct targets
    return WeightedFunction._raw(f.m, out)


def diff_u(f: WeightedFunction, i: int) -> WeightedFunction:
    return diff_var(f, "u", i)


def left_mult_vector(var: str, f: WeightedFunction) -> WeightedFunction:
    """sum_i var_i e_i * f (left Clifford multiplication)."""
    m = f.m
    table = sign_table(m)
    guard = _layout(m)
    out: dict = {}
    for i in range(1, m + 1):
        step = unit(var, i, m)
        e = 1 << (i - 1)
        row = table[e]
        for (mono, t, b), c in f._terms.items():
            nm = mono + step
            if nm & guard:
                raise OverflowError("exponent overflow")
            key = (nm, t, b ^ e)
            out[key] = out.get(key, 0) + (c if row[b] > 0 else -c)
    return WeightedFunction._raw(m, _clean(out))


def _rebase(m: int, group: Mapping, tmin: int) -> dict:
    """Rewrite every c*p*r^t as c*p*(sum x^2)^((t-tmin)/2), dropping the weight.

    Horner in |x|^2 over the weight levels, highest first.
    """
    levels: dict[int, list] = {}
    for (mono, t, b), c in group.items():
        levels.setdefault((t - tmin) // 2, []).append((mono, b, c))
    sq = [2 * unit("x", i, m) for i in range(1, m + 1)]
    out: dict = {}
    for n in range(max(levels), -1, -1):
        if out:
            nxt: dict = {}
            for (mono, b), c in out.items():
                for step in sq:
                    key = (mono + step, b)
                    nxt[key] = nxt.get(key, 0) + c
            out = nxt
        for mono, b, c in levels.get(n, ()):
            key = (mono, b)
            out[key] = out.get(key, 0) + c
    return _clean(out)


def _divide_norm_sq(m: int, poly: dict) -> tuple[dict, dict]:
    """Quotient and remainder of poly by sum x_i^2, with x_1^2 as leading term."""
    s1 = shift("x", 1, m)
    two1 = 2 << s1
    others = [2 * unit("x", i, m) for i in range(2, m + 1)]
    rem = dict(poly)
    quo: dict = {}
    while True:
        levels = [(mono >> s1) & FIELD for (mono, _) in rem]
        emax = max(levels, default=0)
        if emax < 2:
            break
        top = [(k, c) for k, c in rem.items() if (k[0] >> s1) & FIELD == emax]
        for (mono, b), c in top:
            qm = mono - two1
            quo[(qm, b)] = quo.get((qm, b), 0) + c
            del rem[(mono, b)]
            for step in others:
                key = (qm + step, b)
                val = rem.get(key, 0) - c
                if val == 0:
                    rem.pop(key, None)
                else:
                    rem[key] = val
    return _clean(quo), rem


def canonical_terms(m: int, terms: Mapping) -> dict:
    """Unique representative: even part is a polynomial when possible, otherwise
    r^t * P with P not divisible by |x|^2; the odd part is always r^t * P with P
    not divisible by |x|^2."""
    out: dict = {}
    for parity in (0, 1):
        group = {k: c for k, c in terms.items() if k[1] & 1 == parity}
        if not group:
            continue
        tmin = min(t for (_, t, _) in group)
        if parity == 0 and tmin >= 0:
            poly = _rebase(m, group, 0)
            tmin = 0
        else:
            poly = _rebase(m, group, tmin)
            while poly and (parity == 1 or tmin < 0):
                quo, rem = _divide_norm_sq(m, poly)
                if rem:
                    break
                poly, tmin = quo, tmin + 2
        for (mono, b), c in poly.items():
            out[(mono, tmin, b)] = c
    return out


def is_zero(f: WeightedFunction) -> bool:
    return f.is_zero()


# -- Fischer pairing ----------------------------------------------------------

def _u_only_check(f: WeightedFunction, allow_v: bool = False):
    for (mono, t, _) in f._terms:
        if t:
            raise WeightError("Fischer pairing needs weight-free polynomials")
        if block_degree(mono, "x", f.m) or (not allow_v and block_degree(mono, "v", f.m)):
            raise ValueError("Fischer pairing is defined on polynomials in u only")


def fischer_product(p: WeightedFunction, q: WeightedFunction) -> WeightedFunction:
    """Clifford-valued pairing [conj(p)(d/du) q] at u = 0.

    ``p`` may carry passive v-dependence (a kernel slot); the result is then a
    polynomial in v.  ``q`` must be a polynomial in u only.
    """
    if p.m != q.m:
        raise DimensionError(f"dimension {p.m} vs {q.m}")
    _u_only_check(p, allow_v=True)
    _u_only_check(q)
    m = p.m
    table = sign_table(m)
    ubase = VARS.index("u") * m
    umask = 0
    for j in range(m):
        umask |= FIELD << (BITS * (ubase + j))
    by_u: dict[int, list] = {}
    for (mono, _, b), c in q._terms.items():
        by_u.setdefault(mono, []).append((b, c))
    out: dict = {}
    for (mono, _, a), c in p._terms.items():
        umono = mono & umask
        partners = by_u.get(umono)
        if not partners:
            continue
        weight = 1
        for j in range(m):
            weight *= math.factorial((umono >> (BITS * (ubase + j))) & FIELD)
        ca = conjugate_sign(a) * c * weight
        vmono = mono - umono
        row = table[a]
        for b, d in partners:
            key = (vmono, 0, a ^ b)
            val = ca * d
            out[key] = out.get(key, 0) + (val if row[b] > 0 else -val)
    return WeightedFunction._raw(m, _clean(out))


def fischer_pair(p: WeightedFunction, q: WeightedFunction):
    """Real Fischer inner product: scalar part of the Clifford-valued pairing."""
    _u_only_check(p)
    _u_only_check(q)
    res = fischer_product(p, q)
    return res._terms.get((0, 0, 0), 0)


# -- substitution -------------------------------------------------------------

def substitute(f: WeightedFunction, images: Mapping[tuple[str, int], WeightedFunction], weight_image=None,
               cache: dict | None = None):
    """Replace variables by scalar-valued weighted functions.

    ``images`` maps (var, i) to the replacement; unmapped variables are kept.
    ``weight_image(t)`` gives the image of r^t; it is required when ``f`` has
    weighted terms.  ``cache`` may carry images of monomials in one variable
    block across calls that use the same ``images``.
    """
    m = f.m
    for img in images.values():
        if any(b for (_, _, b) in img._terms):
            raise ValueError("substitution images must be scalar-valued")
    mapped = []
    keep_mask = 0
    for vi, var in enumerate(VARS):
        for i in range(1, m + 1):
            s = BITS * (vi * m + i - 1)
            if (var, i) in images:
                mapped.append((s, images[(var, i)]))
            else:
                keep_mask |= FIELD << s
    block_cache = {} if cache is None else cache
    blocks = []
    for vi in range(len(VARS)):
        bmask = 0
        for i in range(m):
            bmask |= FIELD << (BITS * (vi * m + i))
        entries = [(s, img) for s, img in mapped if (FIELD << s) & bmask]
        if entries:
            blocks.append((bmask, entries))

    def block_image(sub, entries):
        if sub not in block_cache:
            image = None
            for s, img in entries:
                for _ in range((sub >> s) & FIELD):
                    image = img if image is None else mul(image, img)
            block_cache[sub] = image
        return block_cache[sub]

    # terms sharing the substituted part of the monomial and the weight share one image
    groups: dict = {}
    for (mono, t, b), c in f._terms.items():
        group = groups.setdefault((mono & ~keep_mask, t), {})
        group[(mono & keep_mask, 0, b)] = c
    acc: dict = {}
    for (mono, t), group in groups.items():
        image = None
        for bmask, entries in blocks:
            sub = mono & bmask
            if sub:
                part = block_image(sub, entries)
                image = part if image is None else mul(image, part)
        if t:
            if weight_image is None:
                raise WeightError("weighted input needs an image for r")
            w = weight_image(t)
            image = w if image is None else mul(image, w)
        piece = WeightedFunction._raw(m, group)
        if image is not None:
            piece = mul(image, piece)
        for k, v in piece._terms.items():
            acc[k] = acc.get(k, 0) + v
    return WeightedFunction._raw(m, _clean(acc))


# -- text format ----------------------------------------------------------------

def _term_text(m: int, key, c) -> tuple[bool, str]:
    mono, t, b = key
    neg = c < 0
    parts = [fmt(-c if neg else c)]
    exps = exponents(mono, m)
    for vi, var in enumerate(VARS):
        for i in range(m):
            e = exps[vi * m + i]
            if e == 1:
                parts.append(f"{var}{i + 1}")
            elif e:
                parts.append(f"{var}{i + 1}^{e}")
    if b:
        parts.append(blade_token(b))
    if t:
        parts.append(f"|x|^{t}")
    return neg, " ".join(parts)


def sort_key(m: int, key):
    mono, t, b = key
    return (t, exponents(mono, m), len(blade_indices(b)), blade_indices(b))


def to_text(f: WeightedFunction) -> str:
    terms = canonical_terms(f.m, f._terms)
    if not terms:
        return "0"
    chunks = []
    for key in sorted(terms, key=lambda k: sort_key(f.m, k)):
        neg, body = _term_text(f.m, key, terms[key])
        if not chunks:
            chunks.append(("-" if neg else "") + body)
        else:
            chunks.append((" - " if neg else " + ") + body)
    return "".join(chunks)


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<op>[+-])(?=\s)|"
    r"(?P<coef>-?\d+(?:/\d+)?(?:\.\d*)?(?:e[+-]?\d+)?)(?![\d\]])|"
    r"(?P<var>[xuv])(?P<idx>\d+)(?:\^(?P<exp>\d+))?|"
    r"e\[(?P<blade>[0-9,\s]*)\]|"
    r"\|x\|\^(?P<weight>-?\d+)|"
    r"(?P<star>\*)"
    r")"
)


def parse(text: str, m: int) -> WeightedFunction:
    """Inverse of :func:`to_text` (also accepts '*' between factors)."""
    text = text.strip()
    if text == "0":
        return WeightedFunction.zero(m)
    terms: list[list] = []
    sign = 1
    current: list | None = None
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match or match.end() == pos:
            raise ValueError(f"cannot parse near {text[pos:]!r}")
        pos = match.end()
        g = match.groupdict()
        if g["op"]:
            if current is None and terms == [] and g["op"] == "-":
                sign = -1
                continue
            if current is None:
                raise ValueError(f"dangling operator in {text!r}")
            terms.append(current)
            current = None
            sign = -1 if g["op"] == "-" else 1
            continue
        if g["star"]:
            continue
        if current is None:
            current = [sign, 1, [0] * (3 * m), 0, 0, False]
        if g["coef"] is not None:
            if current[5] or current[1] != 1 or any(current[2]) or current[3] or current[4]:
                raise ValueError(f"misplaced coefficient in {text!r}")
            lit = g["coef"]
            current[1] = float(lit) if ("." in lit or "e" in lit) else rational(lit)
            current[5] = True
        elif g["var"]:
            i = int(g["idx"])
            if not 1 <= i <= m:
                raise ValueError(f"index {i} outside 1..{m}")
            current[2][VARS.index(g["var"]) * m + i - 1] += int(g["exp"] or 1)
        elif g["blade"] is not None:
            idx = tuple(int(s) for s in g["blade"].split(",") if s.strip())
            current[3] = Blade(m, idx).mask
        else:
            current[4] += int(g["weight"])
    if current is None:
        raise ValueError(f"trailing operator in {text!r}")
    terms.append(current)
    acc: dict = {}
    for sgn, c, exps, b, t, _ in terms:
        key = (pack(exps), t, b)
        acc[key] = acc.get(key, 0) + (sgn * c)
    return WeightedFunction(m, acc)


def coerce_scalar(c, f: WeightedFunction):
    return scalar_like(c, f.sample_coefficient())
