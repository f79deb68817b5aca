"""Exact linear algebra over the rationals.

Everything here works on sequences of ``Fraction`` (or ``int``) and never
touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Vector = tuple


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass ints, Fractions or 'p/q' strings")
    return Fraction(value)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def row_echelon(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [[to_fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(row_echelon(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    red, pivots = row_echelon(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(tuple(v))
    return basis


def primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector (same direction)."""
    den = lcm(*(to_fraction(x).denominator for x in v)) if v else 1
    ints = [int(to_fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)


def affine_rank(points: Sequence[Sequence]) -> int:
    if not points:
        return -1
    p0 = points[0]
    return rank([sub(p, p0) for p in points[1:]]) if len(points) > 1 else 0


def affine_pivots(points: Sequence[Sequence]) -> list[int]:
    """Coordinate axes onto which the affine hull projects isomorphically."""
    if len(points) < 2:
        return []
    p0 = points[0]
    return row_echelon([sub(p, p0) for p in points[1:]])[1]


def integerize(points: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Multiply all coordinates by a common denominator (an affine bijection)."""
    den = 1
    for p in points:
        for x in p:
            den = lcm(den, to_fraction(x).denominator)
    return [tuple(int(to_fraction(x) * den) for x in p) for p in points]


def hyperplane_through(points: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], int]:
    """Primitive integer (normal, offset) of the hyperplane through ``dim`` points of R^dim.

    Raises ValueError when the points are affinely dependent.
    """
    dim = len(points[0])
    p0 = points[0]
    diffs = [sub(p, p0) for p in points[1:]]
    ns = nullspace(diffs, dim)
    if len(ns) != 1:
        raise ValueError("points do not span a hyperplane")
    a = primitive(ns[0])
    return a, dot(a, p0)
