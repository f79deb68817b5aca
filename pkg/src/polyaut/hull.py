"""Exact rational convex hulls and orbit polytopes.

Points are tuples of ``Fraction``.  The hull is computed in the affine hull of
the input, using a coordinate projection (pivot axes) that is an affine
isomorphism onto R^d, and after scaling to integers.  No tolerances anywhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Sequence

from . import _exact as ex
from .errors import IntegrityError, ParseError, ResourceError, ValidationError
from .lattice import FaceLattice
from .permgroup import PermGroup

MAX_DIM = 7
MAX_POINTS = 60

RationalPoint = tuple  # tuple[Fraction, ...]


def rational_point(coords) -> RationalPoint:
    return tuple(ex.to_fraction(c) for c in coords)


def initial_vertex(n: int) -> RationalPoint:
    """Point with coordinates proportional to 1, 1/2, 1/4, ..., 2^-n.

    Coordinates are strictly decreasing and positive, so the point lies in the
    open cone over the base chamber and its stabiliser in S_{n+1} is trivial.
    """
    if n < 1:
        raise ValidationError("initial_vertex needs n >= 1")
    w = [Fraction(1, 2 ** j) for j in range(n + 1)]
    s = sum(w)
    return tuple(x / s for x in w)


def act(perm, point: RationalPoint) -> RationalPoint:
    """Coordinate action: coordinate perm(j) of the image is coordinate j of ``point``."""
    out = [None] * len(point)
    for j, x in enumerate(point):
        out[perm(j)] = x
    return tuple(out)


def orbit(group: PermGroup, v: RationalPoint) -> list[RationalPoint]:
    if group.degree != len(v):
        raise ValidationError(f"group degree {group.degree} != point length {len(v)}")
    if len(set(v)) != len(v):
        raise ValidationError("initial point has repeated coordinates; its orbit could collapse")
    pts = [act(g, v) for g in group.elements]
    assert len(set(pts)) == len(pts)
    return pts


def dimension(points: Sequence[RationalPoint]) -> int:
    if not points:
        raise ValidationError("dimension of an empty point set")
    return ex.affine_rank([rational_point(p) for p in points])


# -- facet enumeration ---------------------------------------------------

@dataclass(frozen=True)
class Facet:
    vertices: frozenset[int]
    normal: tuple[int, ...]   # in projected integer coordinates
    offset: int               # normal . x <= offset on the polytope


def _project(points: Sequence[RationalPoint]) -> tuple[int, list[tuple[int, ...]]]:
    d = ex.affine_rank(points)
    axes = ex.affine_pivots(points)
    proj = [tuple(p[a] for a in axes) for p in points]
    return d, ex.integerize(proj) if proj and proj[0] else [() for _ in points]


def _side(normal, offset, p) -> int:
    v = ex.dot(normal, p) - offset
    return (v > 0) - (v < 0)


def _orient(normal, offset, ref_num, ref_den):
    """Flip so that a reference interior point (given as num/den) is strictly below."""
    val = ex.dot(normal, ref_num) - offset * ref_den
    if val > 0:
        return tuple(-a for a in normal), -offset
    if val == 0:
        return None  # passes through the interior, cannot be a facet
    return normal, offset


def _independent_subset(pts: Sequence[tuple[int, ...]], idx: Sequence[int], k: int) -> list[int]:
    """Greedily pick k+1 affinely independent indices from ``idx``."""
    chosen = [idx[0]]
    for i in idx[1:]:
        trial = chosen + [i]
        if ex.affine_rank([pts[j] for j in trial]) == len(trial) - 1:
            chosen = trial
            if len(chosen) == k + 1:
                break
    return chosen


def _facets_full(pts: list[tuple[int, ...]], d: int) -> list[Facet]:
    """Gift-wrapping over full-dimensional integer points in R^d (d >= 1)."""
    n = len(pts)
    ref_num = tuple(sum(p[a] for p in pts) for a in range(d))
    ref_den = n
    if d == 1:
        xs = [p[0] for p in pts]
        lo, hi = min(xs), max(xs)
        return [Facet(frozenset(i for i in range(n) if xs[i] == lo), (-1,), -lo),
                Facet(frozenset(i for i in range(n) if xs[i] == hi), (1,), hi)]

    def make(idx_subset):
        a, b = ex.hyperplane_through([pts[i] for i in idx_subset])
        return _orient(a, b, ref_num, ref_den)

    def contact(a, b):
        return frozenset(i for i in range(n) if ex.dot(a, pts[i]) == b)

    first = _initial_facet(pts, d, make)
    facets = {first.vertices: first}
    queue = [first]
    done_ridges: set[frozenset[int]] = set()
    while queue:
        f = queue.pop()
        members = sorted(f.vertices)
        sub = [pts[i] for i in members]
        _, sub_proj = _project(sub)
        for ridge_local in _facets_full(sub_proj, d - 1):
            ridge = frozenset(members[i] for i in ridge_local.vertices)
            if ridge in done_ridges:
                continue
            done_ridges.add(ridge)
            base = _independent_subset(pts, sorted(ridge), d - 2)
            apex_ref = next(i for i in members if i not in ridge)
            best = None
            for q in range(n):
                if q in f.vertices:
                    continue
                if best is None:
                    best = q
                    a, b = ex.hyperplane_through([pts[i] for i in base + [q]])
                    if _side(a, b, pts[apex_ref]) > 0:
                        a, b = tuple(-x for x in a), -b
                    continue
                if _side(a, b, pts[q]) > 0:
                    best = q
                    a, b = ex.hyperplane_through([pts[i] for i in base + [q]])
                    if _side(a, b, pts[apex_ref]) > 0:
                        a, b = tuple(-x for x in a), -b
            if any(_side(a, b, p) > 0 for p in pts):
                raise IntegrityError("gift-wrapping step produced a non-supporting hyperplane")
            vs = contact(a, b)
            if vs not in facets:
                nf = Facet(vs, a, b)
                facets[vs] = nf
                queue.append(nf)
    return sorted(facets.values(), key=lambda f: sorted(f.vertices))


def _initial_facet(pts, d, make) -> Facet:
    n = len(pts)
    p0 = min(range(n), key=lambda i: pts[i])  # lexicographic minimum is a vertex
    others = [i for i in range(n) if i != p0]
    for combo in combinations(others, d - 1):
        idx = [p0, *combo]
        if ex.affine_rank([pts[i] for i in idx]) != d - 1:
            continue
        made = make(idx)
        if made is None:
            continue
        a, b = made
        if all(ex.dot(a, p) <= b for p in pts):
            return Facet(frozenset(i for i in range(n) if ex.dot(a, pts[i]) == b), a, b)
    raise IntegrityError("no facet through the lexicographic minimum")


def brute_force_facets(points: Sequence[RationalPoint]) -> list[frozenset[int]]:
    """Oracle: every affinely spanning d-subset whose hyperplane supports the set."""
    d, pts = _project([rational_point(p) for p in points])
    n = len(pts)
    if d == 0:
        return []
    if d == 1:
        return sorted(f.vertices for f in _facets_full(pts, 1))
    out = set()
    for combo in combinations(range(n), d):
        if ex.affine_rank([pts[i] for i in combo]) != d - 1:
            continue
        a, b = ex.hyperplane_through([pts[i] for i in combo])
        sides = {_side(a, b, p) for p in pts}
        if not (1 in sides and -1 in sides):
            out.add(frozenset(i for i in range(n) if _side(a, b, pts[i]) == 0))
    return sorted(out, key=sorted)


# -- lattice --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrbitPolytope:
    """Convex hull of a point list, with its face lattice.

    ``vertex_to_group[face id]`` is the index of the input point (for orbit
    polytopes: of the group element) behind each rank-0 face.
    """
    points: tuple[RationalPoint, ...]
    dim: int
    lattice: FaceLattice
    facets: tuple[Facet, ...]
    vertex_to_group: dict[int, int]
    axes: tuple[int, ...] = ()
    scaled: tuple[tuple[int, ...], ...] = field(default=(), repr=False)

    @cached_property
    def point_to_vertex(self) -> dict[int, int]:
        return {p: v for v, p in self.vertex_to_group.items()}

    def face_points(self, face: int) -> frozenset[int]:
        return frozenset(self.vertex_to_group[v] for v in self.lattice.atoms[face])

    def face_id(self, point_indices) -> int | None:
        key = frozenset(self.point_to_vertex[i] for i in point_indices)
        for r in range(self.dim + 1):
            f = self.lattice.atom_index.get((r, key))
            if f is not None:
                return f
        return None


def hull_lattice(points: Sequence[RationalPoint], *, max_dim: int = MAX_DIM,
                 max_points: int = MAX_POINTS, check_oracle: bool = False) -> OrbitPolytope:
    pts_q = [rational_point(p) for p in points]
    if len(pts_q) < 2:
        raise ValidationError("hull needs at least two points")
    if len(set(pts_q)) != len(pts_q):
        raise ValidationError("hull input contains repeated points")
    if len(pts_q) > max_points:
        raise ResourceError(f"hull: {len(pts_q)} points exceeds the cap of {max_points}")
    d = ex.affine_rank(pts_q)
    if d > max_dim:
        raise ResourceError(f"hull: dimension {d} exceeds the cap of {max_dim}")
    axes = tuple(ex.affine_pivots(pts_q))
    proj = ex.integerize([tuple(p[a] for a in axes) for p in pts_q])
    facets = _facets_full(proj, d)
    if check_oracle:
        oracle = brute_force_facets(pts_q)
        if {f.vertices for f in facets} != set(oracle):
            raise IntegrityError("gift-wrapping and brute-force facet sets disagree")
    n = len(pts_q)
    on_facet = set().union(*(f.vertices for f in facets))
    if len(on_facet) != n:
        raise IntegrityError(f"points {sorted(set(range(n)) - on_facet)} are interior to the hull")
    cells = _face_sets([f.vertices for f in facets], proj, n)
    for i in range(n):
        if frozenset((i,)) not in cells:
            raise IntegrityError(f"point {i} is not a vertex of the hull")
    lat = FaceLattice.from_vertex_sets(d, cells)
    # rank-0 faces are ordered by their single point index
    vmap = {lat.faces_of_rank(0)[i]: i for i in range(n)}
    return OrbitPolytope(tuple(pts_q), d, lat, tuple(facets), vmap, axes, tuple(proj))


def _face_sets(facets: list[frozenset[int]], pts, n) -> dict[frozenset[int], int]:
    full = frozenset(range(n))
    seen = {full}
    frontier = [full]
    while frontier:
        nxt = []
        for g in frontier:
            for f in facets:
                h = g & f
                if h and h != g and h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    seen.discard(full)
    return {s: ex.affine_rank([pts[i] for i in sorted(s)]) for s in seen}


def orbit_polytope(group: PermGroup, v: RationalPoint | None = None, **caps) -> OrbitPolytope:
    if v is None:
        v = initial_vertex(group.degree - 1)
    return hull_lattice(orbit(group, v), **caps)


# -- points JSON ------------------------------------------------------------

def points_to_json(points: Sequence[RationalPoint]) -> dict:
    return {"dim_ambient": len(points[0]) if points else 0,
            "points": [[str(Fraction(x)) for x in p] for p in points]}


def points_from_json(data: dict | str) -> list[RationalPoint]:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"points file is not JSON: {exc}") from exc
    try:
        dim = int(data["dim_ambient"])
        pts = [rational_point(p) for p in data["points"]]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"malformed points JSON: {exc!r}") from exc
    for p in pts:
        if len(p) != dim:
            raise ParseError(f"point of length {len(p)} in a {dim}-dimensional file")
    return pts
