"""Exact linear algebra over the rationals.

Rank and nullspace use fraction-free Gauss-Jordan elimination on integer rows
(each row is scaled to clear denominators, and rows are divided by their
content after every elimination step so entries stay small).
"""

from __future__ import annotations

import math
from typing import Sequence

from gmpy2 import mpq

from ._numbers import rational


def _integer_row(row: Sequence) -> list[int]:
    qs = [mpq(c) for c in row]
    lcm = 1
    for q in qs:
        lcm = lcm * int(q.denominator) // math.gcd(lcm, int(q.denominator))
    return [int(q * lcm) for q in qs]


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for c in row:
        g = math.gcd(g, c)
        if g == 1:
            return row
    if g > 1:
        return [c // g for c in row]
    return row


def row_reduce(matrix: Sequence[Sequence]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free reduced echelon form.

    Returns integer rows (pivot entries positive, not necessarily 1; every
    pivot column is zero outside its pivot row) and the pivot column list.
    """
    rows = [_primitive(_integer_row(r)) for r in matrix]
    rows = [r for r in rows if any(r)]
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        if r == len(rows):
            break
        sel = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        piv_row = rows[r]
        if piv_row[col] < 0:
            piv_row = rows[r] = [-c for c in piv_row]
        p = piv_row[col]
        for i in range(len(rows)):
            if i == r:
                continue
            a = rows[i][col]
            if a:
                rows[i] = _primitive([p * x - a * y for x, y in zip(rows[i], piv_row)])
        pivots.append(col)
        r += 1
    return [row for row in rows[:r]], pivots


class Echelon:
    """Incremental forward elimination, for growing a linearly independent set."""

    def __init__(self):
        self.rows: dict[int, list[int]] = {}

    def __len__(self):
        return len(self.rows)

    def add(self, row: Sequence) -> bool:
        """Insert ``row``; return False if it was already in the span."""
        row = _primitive(_integer_row(row))
        while True:
            lead = next((i for i, c in enumerate(row) if c), None)
            if lead is None:
                return False
            piv = self.rows.get(lead)
            if piv is None:
                self.rows[lead] = row
                return True
            p, a = piv[lead], row[lead]
            row = _primitive([p * x - a * y for x, y in zip(row, piv)])


def rank(matrix: Sequence[Sequence]) -> int:
    if not matrix:
        return 0
    return len(row_reduce(matrix)[1])


def nullspace(matrix: Sequence[Sequence], ncols: int | None = None) -> list[list[int]]:
    """Integer basis of {v : matrix v = 0}, one vector per free column."""
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    rows, pivots = row_reduce(matrix) if matrix else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        scale = 1
        for row, pc in zip(rows, pivots):
            if row[f]:
                scale = scale * row[pc] // math.gcd(scale, row[pc])
        vec = [0] * ncols
        vec[f] = scale
        for row, pc in zip(rows, pivots):
            if row[f]:
                vec[pc] = -row[f] * scale // row[pc]
        basis.append(_primitive(vec))
    return basis


def inverse(matrix: Sequence[Sequence]) -> list[list]:
    """Exact inverse by Gauss-Jordan over mpq; raises on singular input."""
    n = len(matrix)
    aug = [[mpq(c) for c in row] + [mpq(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        sel = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if sel is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[sel] = aug[sel], aug[col]
        p = aug[col][col]
        aug[col] = [c / p for c in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                a = aug[i][col]
                aug[i] = [x - a * y for x, y in zip(aug[i], aug[col])]
    return [[rational(c) for c in row[n:]] for row in aug]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    return [[sum((x * y for x, y in zip(row, col)), 0) for col in zip(*b)] for row in a]
