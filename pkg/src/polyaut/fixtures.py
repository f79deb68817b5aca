"""Built-in polytopes (exact vertex coordinates) for demos and tests."""
from __future__ import annotations

from itertools import product

from .errors import ValidationError
from .lattice import FaceLattice
from .realize import GeometricPolytope


def _simplex(k: int):
    """Origin and the unit vectors of R^k."""
    pts = [tuple([0] * k)]
    for i in range(k):
        pts.append(tuple(1 if j == i else 0 for j in range(k)))
    return pts


POINTS = {
    "triangle": [(0, 0), (1, 0), (0, 1)],
    "square": [(0, 0), (1, 0), (1, 1), (0, 1)],
    "pentagon": [(2, 0), (1, 2), (-1, 2), (-2, 0), (0, -2)],
    "tetrahedron": _simplex(3),
    "cube": [p for p in product((-1, 1), repeat=3)],
    "octahedron": [tuple(s if j == i else 0 for j in range(3)) for i in range(3) for s in (1, -1)],
    "4-simplex": _simplex(4),
    "prism": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (0, 1, 1)],
    "square-pyramid": [(0, 0, 0), (2, 0, 0), (2, 2, 0), (0, 2, 0), (1, 1, 1)],
}

# the names the CLI advertises; the rest are test conveniences
REALIZE_BUILTINS = ("triangle", "tetrahedron", "cube", "octahedron", "4-simplex")


def names() -> list[str]:
    return sorted(POINTS)


def points(name: str):
    try:
        return list(POINTS[name])
    except KeyError:
        raise ValidationError(f"unknown built-in {name!r}; choose from {', '.join(names())}") from None


def geometric(name: str) -> GeometricPolytope:
    return GeometricPolytope.from_points(points(name))


def lattice(name: str) -> FaceLattice:
    return geometric(name).lattice
