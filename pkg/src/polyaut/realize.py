"""Convex realization of the barycentric subdivision by pulling face barycenters.

Starting from R (centroid at the origin), faces of R are processed rank by
rank from k-1 down to 1.  The barycenter b_F of each j-face is pushed out
along the ray o -> b_F to a point b*_F lying just beyond the current facets
through F and beneath all the others, then the hull is rebuilt.  After the
last step every facet is a simplex spanned by the points of one flag.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import _exact as ex
from .errors import IntegrityError, RetryExhausted, ValidationError
from .hull import RationalPoint, hull_lattice, points_to_json, rational_point
from .lattice import FaceLattice, order_complex_lattice

DEFAULT_Q_MAX = 2 ** 16


@dataclass(frozen=True)
class Hyperplane:
    normal: tuple[Fraction, ...]
    offset: Fraction
    vertices: frozenset[int]   # point indices on it

    def value(self, p) -> Fraction:
        return ex.dot(self.normal, p) - self.offset


@dataclass(frozen=True, eq=False)
class GeometricPolytope:
    """Full-dimensional polytope with exact vertices; interior is where every ``value`` < 0."""
    vertices: tuple[RationalPoint, ...]
    lattice: FaceLattice
    facets: tuple[Hyperplane, ...]
    point_of_vertex: dict[int, int]   # rank-0 face id -> index into vertices

    @property
    def dim(self) -> int:
        return self.lattice.rank

    def vertex_of_point(self, i: int) -> int:
        return {p: v for v, p in self.point_of_vertex.items()}[i]

    def face_points(self, face: int) -> frozenset[int]:
        return frozenset(self.point_of_vertex[v] for v in self.lattice.atoms[face])

    def face_id(self, point_set) -> int | None:
        inv = {p: v for v, p in self.point_of_vertex.items()}
        key = frozenset(inv[i] for i in point_set)
        for r in range(self.dim):
            f = self.lattice.atom_index.get((r, key))
            if f is not None:
                return f
        return None

    @classmethod
    def from_points(cls, points: Sequence, *, max_points: int = 60) -> "GeometricPolytope":
        pts = [rational_point(p) for p in points]
        if len(pts) < 2:
            raise ValidationError("need at least two points")
        d = ex.affine_rank(pts)
        if d < len(pts[0]):
            axes = ex.affine_pivots(pts)
            pts = [tuple(p[a] for a in axes) for p in pts]
        hl = hull_lattice(pts, max_points=max_points)
        centre = centroid(pts)
        facets = []
        for f in hl.facets:
            idx = sorted(f.vertices)
            a, b = ex.hyperplane_through([pts[i] for i in idx])
            a = tuple(Fraction(x) for x in a)
            b = Fraction(b)
            if ex.dot(a, centre) - b > 0:
                a, b = tuple(-x for x in a), -b
            facets.append(Hyperplane(a, b, f.vertices))
        return cls(tuple(pts), hl.lattice, tuple(facets), dict(hl.vertex_to_group))

    def check(self) -> None:
        """Every facet's points are on it, every other point strictly beneath."""
        for h in self.facets:
            for i, p in enumerate(self.vertices):
                s = h.value(p)
                if (i in h.vertices and s != 0) or (i not in h.vertices and s >= 0):
                    raise IntegrityError(f"point {i} on the wrong side of a facet")


def centroid(points: Sequence[RationalPoint]) -> RationalPoint:
    n = len(points)
    return tuple(sum(p[a] for p in points) / n for a in range(len(points[0])))


def translate(points: Sequence[RationalPoint], by: RationalPoint) -> list[RationalPoint]:
    return [tuple(x - y for x, y in zip(p, by)) for p in points]


@dataclass
class PullStep:
    j: int
    t: dict[int, Fraction] = field(default_factory=dict)           # face of R -> ray parameter
    points: dict[int, RationalPoint] = field(default_factory=dict)  # face of R -> b*_F
    h_sets: dict[int, tuple[int, int]] = field(default_factory=dict)  # face -> (|H_F|, |H_F^-|)
    q: int = 0

    def to_json(self) -> dict:
        return {"j": self.j, "q": self.q,
                "faces": [{"face": f, "t": str(self.t[f]),
                           "h_f": self.h_sets[f][0], "h_f_minus": self.h_sets[f][1]}
                          for f in sorted(self.t)]}


def hyperplane_sets(current: GeometricPolytope, face_pts: frozenset[int]):
    """(H_F, H_F^-): facets of ``current`` containing F, and those meeting F in a nonempty proper part.

    ``face_pts`` are indices into ``current.vertices`` (the vertices of F).
    """
    if current.face_id(face_pts) is None:
        raise ValidationError(f"points {sorted(face_pts)} do not span a face of the current polytope")
    h_f, h_minus = [], []
    for h in current.facets:
        common = face_pts & h.vertices
        if common == face_pts:
            h_f.append(h)
        elif common:
            h_minus.append(h)
    return h_f, h_minus


def _ray_interval(current: GeometricPolytope, b: RationalPoint, h_f) -> tuple[Fraction, Fraction | None]:
    """Open interval of t with t*b beyond every H in H_F and beneath every other facet."""
    lo = Fraction(1)
    for h in h_f:
        # t*b above h: t*(a.b) > beta, with a.b = beta > 0
        if h.offset <= 0 or ex.dot(h.normal, b) != h.offset:
            raise IntegrityError("origin is not interior or barycenter is off its facet")
    hi = None
    ids = {id(h) for h in h_f}
    for h in current.facets:
        if id(h) in ids:
            continue
        ab = ex.dot(h.normal, b)
        if ab > 0:
            bound = h.offset / ab
            hi = bound if hi is None or bound < hi else hi
    if hi is not None and hi <= lo:
        raise IntegrityError("empty feasibility interval on the ray")
    return lo, hi


def segment_meets_interior(current: GeometricPolytope, p, r) -> bool:
    lo, hi = Fraction(0), Fraction(1)
    d = [y - x for x, y in zip(p, r)]
    for h in current.facets:
        c0 = h.value(p)
        c1 = ex.dot(h.normal, d)
        if c1 == 0:
            if c0 >= 0:
                return False
        elif c1 > 0:
            hi = min(hi, -c0 / c1)
        else:
            lo = max(lo, -c0 / c1)
        if lo >= hi:
            return False
    return lo < hi


@dataclass
class Realization:
    source: GeometricPolytope
    result: GeometricPolytope
    provenance: dict[int, int]   # point index of result -> face id of source lattice
    steps: list[PullStep]
    certificate: dict

    def counts(self) -> dict:
        return {"vertices": len(self.result.vertices),
                "facets": len(self.result.facets),
                "f_vector": list(self.result.lattice.f_vector())}


def pull_realize(p: GeometricPolytope, q_max: int = DEFAULT_Q_MAX) -> Realization:
    k = p.dim
    if not 2 <= k <= 4:
        raise ValidationError(f"pulling is supported for dimensions 2..4, got {k}")
    o = centroid(p.vertices)
    base = GeometricPolytope.from_points(translate(p.vertices, o))
    src = base.lattice
    # points of the running polytope, and which face of R each one stands for
    points = list(base.vertices)
    prov = {base.point_of_vertex[v]: v for v in src.faces_of_rank(0)}
    current = base
    steps = []
    for j in range(k - 1, 0, -1):
        step = _pull_rank(current, base, j, q_max)
        steps.append(step)
        faces = sorted(step.points)
        for f in faces:
            prov[len(points)] = f
            points.append(step.points[f])
        current = step_result = GeometricPolytope.from_points(points, max_points=max(60, len(points)))
        _postconditions(step_result, base, j, prov, len(points) - len(faces))
    cert = equivalence_certificate(current, src, prov)
    if not cert["isomorphic"]:
        raise IntegrityError(f"pulled polytope is not the barycentric subdivision: {cert['witness']}")
    return Realization(base, current, prov, steps, cert)


def _pull_rank(current: GeometricPolytope, base: GeometricPolytope, j: int, q_max: int) -> PullStep:
    src = base.lattice
    faces = list(src.faces_of_rank(j))
    info = {}
    for f in faces:
        fp = base.face_points(f)   # base point indices persist as the first indices of current
        b = centroid([base.vertices[i] for i in sorted(fp)])
        h_f, h_minus = hyperplane_sets(current, fp)
        lo, hi = _ray_interval(current, b, h_f)
        info[f] = (b, lo, hi, len(h_f), len(h_minus))
    q = 2
    while q <= q_max:
        step = PullStep(j, q=q)
        for f in faces:
            b, lo, hi, nf, nm = info[f]
            t = lo + (hi - lo) / q if hi is not None else lo + Fraction(1, q)
            step.t[f] = t
            step.points[f] = tuple(t * x for x in b)
            step.h_sets[f] = (nf, nm)
        bad = _first_bad_pair(current, step.points)
        if bad is None:
            return step
        q *= 2
    raise RetryExhausted(f"rank {j}: segment between pulled points of faces {bad} misses the interior "
                         f"for every q up to {q_max}")


def _first_bad_pair(current: GeometricPolytope, pts: Mapping[int, RationalPoint]):
    keys = sorted(pts)
    for x in range(len(keys)):
        for y in range(x + 1, len(keys)):
            if not segment_meets_interior(current, pts[keys[x]], pts[keys[y]]):
                return keys[x], keys[y]
    return None


def _postconditions(res: GeometricPolytope, base: GeometricPolytope, j: int,
                    prov: Mapping[int, int], first_new: int) -> None:
    n = len(prov)
    if len(res.point_of_vertex) != n:
        raise IntegrityError(f"after rank {j}: not every point is a vertex")
    for h in res.facets:
        new = [i for i in h.vertices if i >= first_new]
        if len(new) != 1:
            raise IntegrityError(f"after rank {j}: a facet holds {len(new)} new points")
    # the (j-1)-skeleton of R survives
    src = base.lattice
    for r in range(j):
        for f in src.faces_of_rank(r):
            if res.face_id(base.face_points(f)) is None:
                raise IntegrityError(f"after rank {j}: face {f} of R was lost")


def equivalence_check(a: FaceLattice, b: FaceLattice, vertex_map: Mapping[int, int]):
    """Extend a vertex bijection to faces and test that covers are preserved both ways.

    Returns (True, face map) or (False, witness dict).
    """
    if a.rank != b.rank or a.f_vector() != b.f_vector():
        return False, {"reason": "f-vectors differ", "a": list(a.f_vector()), "b": list(b.f_vector())}
    va, vb = set(a.faces_of_rank(0)), set(b.faces_of_rank(0))
    if set(vertex_map) != va or set(vertex_map.values()) != vb:
        return False, {"reason": "vertex map is not a bijection between vertex sets"}
    fmap = {a.least: b.least, a.greatest: b.greatest}
    for f in range(len(a.faces)):
        r = a.ranks[f]
        if r < 0 or r == a.rank:
            continue
        key = (r, frozenset(vertex_map[v] for v in a.atoms[f]))
        g = b.atom_index.get(key)
        if g is None:
            return False, {"reason": "face has no image", "face": f}
        fmap[f] = g
    if len(set(fmap.values())) != len(a.faces):
        return False, {"reason": "face map not injective"}
    for f in range(len(a.faces)):
        img = sorted(fmap[c] for c in a.down[f])
        if img != sorted(b.down[fmap[f]]):
            return False, {"reason": "cover mismatch", "pair": [f, fmap[f]]}
    return True, fmap


def equivalence_certificate(res: GeometricPolytope, src: FaceLattice,
                            prov: Mapping[int, int]) -> dict:
    target = order_complex_lattice(src)
    by_label = {next(iter(target.labels[v])): v for v in target.faces_of_rank(0)}
    vmap = {v: by_label[prov[pt]] for v, pt in res.point_of_vertex.items()}
    ok, out = equivalence_check(res.lattice, target, vmap)
    if ok:
        return {"isomorphic": True, "map": [[f, out[f]] for f in sorted(out)]}
    return {"isomorphic": False, "witness": out}


# -- output -------------------------------------------------------------------------

def decimal_string(x: Fraction, precision: int) -> str:
    scaled = round(Fraction(x) * 10 ** precision)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(precision + 1, "0")
    if precision == 0:
        return sign + digits
    return f"{sign}{digits[:-precision]}.{digits[-precision:]}"


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def to_off(g: GeometricPolytope, precision: int = 8) -> str:
    """OFF text for a 3-polytope whose facets are triangles, outward oriented."""
    if g.dim != 3:
        raise ValidationError("OFF output needs a 3-polytope")
    lines = ["OFF", f"{len(g.vertices)} {len(g.facets)} 0"]
    lines += [" ".join(decimal_string(x, precision) for x in p) for p in g.vertices]
    for h in sorted(g.facets, key=lambda h: sorted(h.vertices)):
        vs = sorted(h.vertices)
        if len(vs) != 3:
            raise ValidationError("OFF writer expects triangular facets")
        a, b, c = (g.vertices[i] for i in vs)
        n = _cross(ex.sub(b, a), ex.sub(c, a))
        if ex.dot(n, h.normal) < 0:
            vs = [vs[0], vs[2], vs[1]]
        lines.append("3 " + " ".join(map(str, vs)))
    return "\n".join(lines) + "\n"


def sidecar_json(r: Realization) -> dict:
    g = r.result
    out = points_to_json(list(g.vertices))
    out["source_face"] = [r.provenance[i] for i in range(len(g.vertices))]
    out["facets"] = [sorted(h.vertices) for h in sorted(g.facets, key=lambda h: sorted(h.vertices))]
    out["steps"] = [s.to_json() for s in r.steps]
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
