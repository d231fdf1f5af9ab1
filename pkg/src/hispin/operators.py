"""Differential operators as expression trees over a handful of primitives.

Primitives act on :class:`~hispin.weighted.WeightedFunction` from the left:
partial derivatives in x and u, multiplication by a coordinate, left Clifford
multiplication by the vector variable x or u or by a basis blade.  Trees are
built from sums, rational multiples and compositions; ``A @ B`` means "apply
B, then A".  No algebraic simplification is ever attempted: two operators are
compared by applying both to a finite family of test functions.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from ._numbers import fmt, rational, scalar_like
from .clifford import Blade, blade_indices
from .params import SpaceParams
from .weighted import WeightedFunction, diff_var, diff_x, left_mult_vector


class Op:
    __slots__ = ("_hash",)

    def __add__(self, other: "Op") -> "Op":
        return Sum(_terms(self) + _terms(other))

    def __sub__(self, other: "Op") -> "Op":
        return self + (-other)

    def __neg__(self) -> "Op":
        return Scaled(-1, self)

    def __rmul__(self, c) -> "Op":
        return Scaled(c, self)

    def __mul__(self, c) -> "Op":
        if isinstance(c, Op):
            return NotImplemented
        return Scaled(c, self)

    def __matmul__(self, other: "Op") -> "Op":
        return Compose(_factors(self) + _factors(other))

    def __pow__(self, n: int) -> "Op":
        if n < 1:
            raise ValueError("operator powers start at 1")
        return Compose(_factors(self) * n)

    def __call__(self, f: WeightedFunction) -> WeightedFunction:
        return apply(self, f)

    def __hash__(self):
        return self._hash

    def x_order(self) -> int:
        raise NotImplementedError

    def __repr__(self):
        return render(self)


def _terms(op: Op) -> tuple:
    return op.terms if isinstance(op, Sum) else (op,)


def _factors(op: Op) -> tuple:
    return op.factors if isinstance(op, Compose) else (op,)


class Prim(Op):
    """kind in {dx, du, mx, mu, vx, vu, blade, id}; arg is an axis or blade mask."""

    __slots__ = ("kind", "arg")
    KINDS = ("dx", "du", "mx", "mu", "vx", "vu", "blade", "id")

    def __init__(self, kind: str, arg: int = 0):
        if kind not in self.KINDS:
            raise ValueError(f"unknown primitive {kind}")
        self.kind = kind
        self.arg = arg
        self._hash = hash(("prim", kind, arg))

    def __eq__(self, other):
        return isinstance(other, Prim) and self.kind == other.kind and self.arg == other.arg

    __hash__ = Op.__hash__

    def x_order(self) -> int:
        return 1 if self.kind == "dx" else 0


class Scaled(Op):
    __slots__ = ("c", "op", "label")

    def __init__(self, c, op: Op, label: str | None = None):
        self.c = rational(c) if not isinstance(c, float) else c
        self.op = op
        self.label = label
        self._hash = hash(("scaled", self.c, op))

    def __eq__(self, other):
        return isinstance(other, Scaled) and self.c == other.c and self.op == other.op

    __hash__ = Op.__hash__

    def x_order(self) -> int:
        return self.op.x_order()


class Sum(Op):
    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = tuple(terms)
        self._hash = hash(("sum", self.terms))

    def __eq__(self, other):
        return isinstance(other, Sum) and self.terms == other.terms

    __hash__ = Op.__hash__

    def x_order(self) -> int:
        return max((t.x_order() for t in self.terms), default=0)


class Compose(Op):
    __slots__ = ("factors",)

    def __init__(self, factors):
        self.factors = tuple(factors)
        self._hash = hash(("compose", self.factors))

    def __eq__(self, other):
        return isinstance(other, Compose) and self.factors == other.factors

    __hash__ = Op.__hash__

    def x_order(self) -> int:
        return sum(f.x_order() for f in self.factors)


class Named(Op):
    """A labelled subtree; renders as its label."""

    __slots__ = ("label", "op")

    def __init__(self, label: str, op: Op):
        self.label = label
        self.op = op
        self._hash = hash(("named", label, op))

    def __eq__(self, other):
        return isinstance(other, Named) and self.label == other.label and self.op == other.op

    __hash__ = Op.__hash__

    def x_order(self) -> int:
        return self.op.x_order()


ZERO = Sum(())
IDENTITY = Prim("id")


# -- application ----------------------------------------------------------------

def apply(op: Op, f: WeightedFunction) -> WeightedFunction:
    """Apply ``op`` to ``f`` exactly.

    Results are memoised per (subtree, input object) for the duration of the
    call, so factors shared between terms (D_x f in several terms of D3, say)
    are evaluated once.
    """
    return _apply(op, f, {})


def _apply(op: Op, f: WeightedFunction, memo: dict) -> WeightedFunction:
    key = (op, id(f))
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(op, Prim):
        res = _apply_prim(op, f)
    elif isinstance(op, Compose):
        res = f
        for factor in reversed(op.factors):
            res = _apply(factor, res, memo)
    elif isinstance(op, Sum):
        acc: dict = {}
        for term in op.terms:
            for k, c in _apply(term, f, memo)._terms.items():
                acc[k] = acc.get(k, 0) + c
        res = WeightedFunction._raw(f.m, {k: c for k, c in acc.items() if c != 0})
    elif isinstance(op, Scaled):
        inner = _apply(op.op, f, memo)
        res = inner.scale(scalar_like(op.c, inner.sample_coefficient()))
    elif isinstance(op, Named):
        res = _apply(op.op, f, memo)
    else:
        raise TypeError(f"not an operator: {op!r}")
    memo[key] = (f, res)  # holding f keeps id(f) from being reused
    return res


def _apply_prim(op: Prim, f: WeightedFunction) -> WeightedFunction:
    kind, arg = op.kind, op.arg
    if kind == "dx":
        return diff_x(f, arg)
    if kind == "du":
        return diff_var(f, "u", arg)
    if kind == "mx":
        return f.mul_var("x", arg)
    if kind == "mu":
        return f.mul_var("u", arg)
    if kind == "vx":
        return left_mult_vector("x", f)
    if kind == "vu":
        return left_mult_vector("u", f)
    if kind == "blade":
        return f.left_blade(arg)
    return f


def commutator(a: Op, b: Op) -> Op:
    """[A, B] = AB - BA, unsimplified."""
    return Named(f"[{render(a)}, {render(b)}]", a @ b - b @ a)


# -- rendering ------------------------------------------------------------------

_PRIM_TEXT = {
    "dx": "d/dx{}",
    "du": "d/du{}",
    "mx": "x{}",
    "mu": "u{}",
    "vx": "x",
    "vu": "u",
    "id": "1",
}


def render(op: Op, top: bool = True) -> str:
    """Text rendering in the usual notation, e.g. ``Dx^3 + 4/(m+2k) <u,Dx><Du,Dx>Dx``."""
    if isinstance(op, Named):
        return op.label
    if isinstance(op, Prim):
        if op.kind == "blade":
            return "e" + "".join(str(i) for i in blade_indices(op.arg))
        return _PRIM_TEXT[op.kind].format(op.arg)
    if isinstance(op, Scaled):
        coef = op.label if op.label is not None else fmt(op.c)
        inner = render(op.op, top=False)
        if op.label is None and op.c == -1:
            return f"-{inner}"
        return f"{coef} {inner}"
    if isinstance(op, Compose):
        parts = []
        factors = list(op.factors)
        i = 0
        while i < len(factors):
            j = i
            while j + 1 < len(factors) and factors[j + 1] == factors[i]:
                j += 1
            text = render(factors[i], top=False)
            if isinstance(factors[i], (Sum, Scaled)):
                text = f"({text})"
            parts.append(text if j == i else f"{text}^{j - i + 1}")
            i = j + 1
        return "".join(parts)
    if isinstance(op, Sum):
        if not op.terms:
            return "0"
        out = ""
        for n, term in enumerate(op.terms):
            text = render(term, top=False)
            if n == 0:
                out = text
            elif text.startswith("-"):
                out += " - " + text[1:]
            else:
                out += " + " + text
        return out
    raise TypeError(op)


def render_definition(op: Op) -> str:
    if isinstance(op, Named):
        return f"{op.label} = {render(op.op)}"
    return render(op)


# -- primitive and classical operators -----------------------------------------

def d_x(i: int) -> Op:
    return Prim("dx", i)


def d_u(i: int) -> Op:
    return Prim("du", i)


def x_(i: int) -> Op:
    return Prim("mx", i)


def u_(i: int) -> Op:
    return Prim("mu", i)


def e_(*indices: int) -> Op:
    return Prim("blade", Blade(max(indices, default=1), tuple(indices)).mask)


X_VEC = Prim("vx")
U_VEC = Prim("vu")


def _named_sum(label: str, terms) -> Op:
    return Named(label, Sum(terms))


@lru_cache(maxsize=None)
def Dx(m: int) -> Op:
    return _named_sum("Dx", [e_(i) @ d_x(i) for i in range(1, m + 1)])


@lru_cache(maxsize=None)
def Du(m: int) -> Op:
    return _named_sum("Du", [e_(i) @ d_u(i) for i in range(1, m + 1)])


@lru_cache(maxsize=None)
def DeltaX(m: int) -> Op:
    return _named_sum("DeltaX", [d_x(i) @ d_x(i) for i in range(1, m + 1)])


@lru_cache(maxsize=None)
def DeltaU(m: int) -> Op:
    return _named_sum("DeltaU", [d_u(i) @ d_u(i) for i in range(1, m + 1)])


@lru_cache(maxsize=None)
def UdotDx(m: int) -> Op:
    return _named_sum("<u,Dx>", [u_(i) @ d_x(i) for i in range(1, m + 1)])


@lru_cache(maxsize=None)
def DudotDx(m: int) -> Op:
    return _named_sum("<Du,Dx>", [d_u(i) @ d_x(i) for i in range(1, m + 1)])


@lru_cache(maxsize=None)
def XdotDu(m: int) -> Op:
    return _named_sum("<x,Du>", [x_(i) @ d_u(i) for i in range(1, m + 1)])


@lru_cache(maxsize=None)
def UdotX(m: int) -> Op:
    return _named_sum("<u,x>", [u_(i) @ x_(i) for i in range(1, m + 1)])


@lru_cache(maxsize=None)
def EulerX(m: int) -> Op:
    return _named_sum("Ex", [x_(i) @ d_x(i) for i in range(1, m + 1)])


@lru_cache(maxsize=None)
def EulerU(m: int) -> Op:
    return _named_sum("Eu", [u_(i) @ d_u(i) for i in range(1, m + 1)])


@lru_cache(maxsize=None)
def NormU2(m: int) -> Op:
    return _named_sum("|u|^2", [u_(i) @ u_(i) for i in range(1, m + 1)])


@lru_cache(maxsize=None)
def NormX2(m: int) -> Op:
    return _named_sum("|x|^2", [x_(i) @ x_(i) for i in range(1, m + 1)])


def U() -> Op:
    return Named("u", U_VEC)


def X() -> Op:
    return Named("x", X_VEC)


def Lx(i: int, j: int) -> Op:
    return Named(f"Lx({i},{j})", x_(i) @ d_x(j) - x_(j) @ d_x(i))


def Lu(i: int, j: int) -> Op:
    return Named(f"Lu({i},{j})", u_(i) @ d_u(j) - u_(j) @ d_u(i))


def rotation(i: int, j: int, spin: bool = True) -> Op:
    """Infinitesimal rotation in the (i, j) plane acting on x, u and the values.

    Clifford values rotate too, which contributes the left term -e_ie_j/2;
    ``spin=False`` gives the bare orbital part Lx + Lu.
    """
    orbital = Lx(i, j) + Lu(i, j)
    if not spin:
        return Named(f"Lxu({i},{j})", orbital)
    return Named(f"L({i},{j})", orbital + Scaled(Fraction(-1, 2), e_(i, j)))


def _c(value: Fraction, label: str, op: Op) -> Op:
    return Scaled(value, op, label)


# -- projections and the first/second order higher spin operators --------------

@lru_cache(maxsize=None)
def Pk(p: SpaceParams) -> Op:
    """Almansi-Fischer projection 1 + u Du / (m+2k-2) onto M_k."""
    p.require("m+2k-2")
    m = p.m
    return Named("P_k", IDENTITY + _c(Fraction(1, p.value("m+2k-2")), "1/(m+2k-2)", U() @ Du(m)))


@lru_cache(maxsize=None)
def P1(p: SpaceParams) -> Op:
    """Harmonic projection 1 + u^2 DeltaU / (2(m+2k-4)) on ker DeltaU^2."""
    p.require("m+2k-4")
    m = p.m
    return Named(
        "P_1",
        IDENTITY + _c(Fraction(1, 2 * p.value("m+2k-4")), "1/(2(m+2k-4))", U() @ U() @ DeltaU(m)),
    )


@lru_cache(maxsize=None)
def Rk(p: SpaceParams) -> Op:
    return Named("R_k", Pk(p) @ Dx(p.m))


@lru_cache(maxsize=None)
def Tk(p: SpaceParams) -> Op:
    return Named("T_k", Pk(p) @ Dx(p.m))


@lru_cache(maxsize=None)
def TkStar(p: SpaceParams) -> Op:
    p.require("m+2k-2")
    m = p.m
    return Named("T_k*", _c(Fraction(1, p.value("m+2k-2")), "1/(m+2k-2)", U() @ Du(m) @ Dx(m)))


@lru_cache(maxsize=None)
def Tk2(p: SpaceParams) -> Op:
    p.require("m+2k-4")
    m = p.m
    return Named(
        "T_k,2",
        UdotDx(m) - _c(Fraction(1, p.value("m+2k-4")), "1/(m+2k-4)", NormU2(m) @ DudotDx(m)),
    )


@lru_cache(maxsize=None)
def Tk2Star(p: SpaceParams) -> Op:
    return Named("T_k,2*", DudotDx(p.m))


D2_FORMS = ("twistor", "P1", "P1_trailing_Dx", "factored")


@lru_cache(maxsize=None)
def D2(p: SpaceParams, form: str = "twistor") -> Op:
    """Higher spin Laplace operator.

    ``twistor``: DeltaX - 4 T_k,2 T_k,2* / (m+2k-2) (the reference form).
    ``P1``: P_1 (DeltaX - 4/(m+2k-2) <u,Dx><Du,Dx>).
    ``P1_trailing_Dx``: the same with a trailing Dx on the second term, as
    sometimes printed; it is third order and is only kept for comparison.
    ``factored``: -R_k^2 + 4 u<Du,Dx> R_k / ((m+2k-2)(m+2k-4)), valid on
    M_k-valued inputs.
    """
    p.require("m+2k-2", "m+2k-4")
    m = p.m
    a = p.value("m+2k-2")
    b = p.value("m+2k-4")
    if form == "twistor":
        body = DeltaX(m) - _c(Fraction(4, a), "4/(m+2k-2)", Tk2(p) @ Tk2Star(p))
    elif form == "P1":
        body = P1(p) @ (DeltaX(m) - _c(Fraction(4, a), "4/(m+2k-2)", UdotDx(m) @ DudotDx(m)))
    elif form == "P1_trailing_Dx":
        body = P1(p) @ (DeltaX(m) - _c(Fraction(4, a), "4/(m+2k-2)", UdotDx(m) @ DudotDx(m) @ Dx(m)))
    elif form == "factored":
        body = -(Rk(p) @ Rk(p)) + _c(
            Fraction(4, a * b), "4/((m+2k-2)(m+2k-4))", U() @ DudotDx(m) @ Rk(p)
        )
    else:
        raise ValueError(f"unknown D2 form {form!r}; expected one of {D2_FORMS}")
    return Named("D2" if form == "twistor" else f"D2[{form}]", body)


@lru_cache(maxsize=None)
def D3(p: SpaceParams) -> Op:
    """Third order fermionic operator on M_k-valued functions."""
    p.require("m+2k", "m+2k-2", "m+6k-10")
    m = p.m
    a0 = p.value("m+2k")
    a1 = p.value("m+2k-2")
    c = p.value("m+6k-10")
    dx, ud, dd, u = Dx(m), UdotDx(m), DudotDx(m), U()
    body = Sum(
        [
            dx @ dx @ dx,
            _c(Fraction(4, a0), "4/(m+2k)", ud @ dd @ dx),
            _c(Fraction(-4, a0 * a1), "-4/((m+2k)(m+2k-2))", NormU2(m) @ dd @ dd @ dx),
            _c(Fraction(-2, a0), "-2/(m+2k)", u @ dd @ dx @ dx),
            _c(Fraction(-8, a0 * a1), "-8/((m+2k)(m+2k-2))", u @ ud @ dd @ dd),
            _c(
                Fraction(-8, a0 * a1 * c),
                "-8/((m+2k)(m+2k-2)(m+6k-10))",
                u @ u @ u @ dd @ dd @ dd,
            ),
        ]
    )
    return Named("D3", body)


@lru_cache(maxsize=None)
def D3_factored(p: SpaceParams) -> Op:
    """R_k^3 + 4 T_k T_k* R_k / ((m+2k)(m+2k-4))."""
    p.require("m+2k", "m+2k-2", "m+2k-4")
    r = Rk(p)
    return Named(
        "D3[factored]",
        r @ r @ r
        + _c(Fraction(4, p.value("m+2k") * p.value("m+2k-4")), "4/((m+2k)(m+2k-4))", Tk(p) @ TkStar(p) @ r),
    )


D4_FORMS = ("defining", "twistor")


@lru_cache(maxsize=None)
def D4(p: SpaceParams, form: str = "defining") -> Op:
    """Fourth order bosonic operator on H_k-valued functions."""
    p.require("m+2k-2", "m+2k-4")
    m = p.m
    a = p.value("m+2k-2")
    b = p.value("m+2k-4")
    d2 = D2(p)
    if form == "defining":
        body = d2 @ d2 - _c(Fraction(8, a * b), "8/((m+2k-2)(m+2k-4))", d2 @ DeltaX(m))
    elif form == "twistor":
        body = _c(
            Fraction((m + 2 * p.k) * (m + 2 * p.k - 6), a * b),
            "(m+2k)(m+2k-6)/((m+2k-2)(m+2k-4))",
            d2 @ d2,
        ) - _c(Fraction(32, a * a * b), "32/((m+2k-2)^2(m+2k-4))", d2 @ Tk2(p) @ Tk2Star(p))
    else:
        raise ValueError(f"unknown D4 form {form!r}; expected one of {D4_FORMS}")
    return Named("D4" if form == "defining" else f"D4[{form}]", body)


@lru_cache(maxsize=None)
def C3(p: SpaceParams, j: int) -> Op:
    """x e_j - 2<u,x> d/du_j + 2 u_j <x,Du> - |x|^2 d/dx_j + x_j (2 Ex + m - 2)."""
    m = p.m
    body = Sum(
        [
            X() @ e_(j),
            Scaled(-2, UdotX(m) @ d_u(j)),
            Scaled(2, u_(j) @ XdotDu(m)),
            -(NormX2(m) @ d_x(j)),
            Scaled(2, x_(j) @ EulerX(m)),
            Scaled(m - 2, x_(j), "(m-2)"),
        ]
    )
    return Named(f"C3({j})", body)


@lru_cache(maxsize=None)
def C4(p: SpaceParams, j: int) -> Op:
    """2<u,x> d/du_j - 2 u_j <x,Du> + |x|^2 d/dx_j - x_j (2 Ex + m - 4)."""
    m = p.m
    body = Sum(
        [
            Scaled(2, UdotX(m) @ d_u(j)),
            Scaled(-2, u_(j) @ XdotDu(m)),
            NormX2(m) @ d_x(j),
            Scaled(-2, x_(j) @ EulerX(m)),
            Scaled(-(m - 4), x_(j), "-(m-4)"),
        ]
    )
    return Named(f"C4({j})", body)


def build(tag: str, p: SpaceParams, **kw) -> Op:
    """Look up a named operator by tag (used by the CLI)."""
    m = p.m
    i = kw.get("i", 1)
    j = kw.get("j", 2 if m >= 2 else 1)
    n = kw.get("n", 1)
    table = {
        "Dx": lambda: Dx(m),
        "Dx^n": lambda: Named(f"Dx^{n}", Dx(m) ** n),
        "DeltaX": lambda: DeltaX(m),
        "UdotDx": lambda: UdotDx(m),
        "DudotDx": lambda: DudotDx(m),
        "EulerX": lambda: EulerX(m),
        "L": lambda: rotation(i, j),
        "Lx(i,j)+Lu(i,j)": lambda: rotation(i, j, spin=False),
        "Pk": lambda: Pk(p),
        "P1": lambda: P1(p),
        "Rk": lambda: Rk(p),
        "Tk": lambda: Tk(p),
        "TkStar": lambda: TkStar(p),
        "Tk2": lambda: Tk2(p),
        "Tk2Star": lambda: Tk2Star(p),
        "D2": lambda: D2(p, kw.get("form", "twistor")),
        "D2_P1form": lambda: D2(p, "P1"),
        "D3": lambda: D3(p),
        "D3_factored": lambda: D3_factored(p),
        "D4": lambda: D4(p, kw.get("form", "defining")),
        "C3": lambda: C3(p, j),
        "C4": lambda: C4(p, j),
    }
    if tag not in table:
        raise KeyError(f"unknown operator {tag!r}; known: {', '.join(sorted(table))}")
    return table[tag]()


OPERATOR_TAGS = (
    "Dx", "Dx^n", "DeltaX", "UdotDx", "DudotDx", "EulerX", "L", "Pk", "P1", "Rk", "Tk",
    "TkStar", "Tk2", "Tk2Star", "D2", "D2_P1form", "D3", "D3_factored", "D4", "C3", "C4",
)
