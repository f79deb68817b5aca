"""Combinatorial Schlegel diagrams and the gluing operator.

A diagram (and any polytopal complex here) is a dict ``cells`` mapping a
frozenset of integer vertex labels to the cell dimension.  Cells are
determined by their vertex sets, which holds for every polytopal complex
built in this package.  No coordinates are ever computed: "affine images" of
diagrams are relabelings that send the outer simplex onto a target simplex.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Mapping

from .errors import IntegrityError, ValidationError
from .lattice import FaceLattice, pseudomanifold_defects

Cells = dict  # dict[frozenset[int], int]


@dataclass(frozen=True, eq=False)
class SchlegelComplex:
    dim: int
    cells: Mapping[frozenset, int]
    outer: tuple[int, ...]                  # ordered outer-simplex vertices u_0..u_{dim}
    central: frozenset | None = None
    marks: Mapping[int, str] = field(default_factory=dict)

    @property
    def outer_cell(self) -> frozenset:
        return frozenset(self.outer)

    @property
    def vertices(self) -> list[int]:
        return sorted(next(iter(c)) for c, r in self.cells.items() if r == 0)

    @property
    def interior_vertices(self) -> list[int]:
        out = set(self.outer)
        return [v for v in self.vertices if v not in out]

    @property
    def tiles(self) -> list[frozenset]:
        return sorted((c for c, r in self.cells.items() if r == self.dim), key=sorted)

    def valency(self, v: int) -> int:
        return valencies(self.cells)[v]

    def defects(self) -> list:
        return pseudomanifold_defects(self.cells, self.dim, boundary=self.outer_cell)

    def adjacent_tiles(self, tile: frozenset) -> list[frozenset]:
        return [t for t in self.tiles if t != tile and frozenset(t & tile) in self.cells
                and self.cells[frozenset(t & tile)] == self.dim - 1]


def valencies(cells: Mapping[frozenset, int]) -> dict[int, int]:
    val: dict[int, int] = defaultdict(int)
    for c, r in cells.items():
        if r == 0:
            val[next(iter(c))] += 0
        elif r == 1:
            for v in c:
                val[v] += 1
    return dict(val)


def simplex_faces(vertices) -> Cells:
    vs = sorted(vertices)
    return {frozenset(s): k - 1 for k in range(1, len(vs) + 1) for s in combinations(vs, k)}


# -- cross-polytope ------------------------------------------------------------

def crosspolytope_faces(d: int) -> Cells:
    """Proper faces of the d-crosspolytope; +i is label i, -i is label d+i."""
    out: Cells = {}
    for k in range(1, d + 1):
        for axes in combinations(range(d), k):
            for signs in product((0, 1), repeat=k):
                out[frozenset(a + s * d for a, s in zip(axes, signs))] = k - 1
    return out


def crosspolytope_diagram(d: int) -> SchlegelComplex:
    if d < 3:
        raise ValidationError(f"crosspolytope diagrams need d >= 3, got {d}")
    faces = crosspolytope_faces(d)
    outer = tuple(range(d))
    cells = {c: r for c, r in faces.items() if c != frozenset(outer)}
    central = frozenset(range(d, 2 * d))
    marks = {i: f"u{i}" for i in range(d)}
    marks.update({d + i: "crosspoly" for i in range(d)})
    sc = SchlegelComplex(d - 1, cells, outer, central, marks)
    _check_crosspolytope(sc)
    return sc


def f_tile(d: int, i: int) -> frozenset:
    """The tile of the crosspolytope diagram with a single plus sign at axis i."""
    return frozenset([i] + [d + j for j in range(d) if j != i])


def _check_crosspolytope(sc: SchlegelComplex) -> None:
    d = sc.dim + 1
    z, outer = sc.central, sc.outer_cell
    if z & outer:
        raise IntegrityError("central tile meets the outer simplex")
    nbrs = [t for t in sc.tiles if len(t & z) == d - 1]
    if sorted(nbrs, key=sorted) != sorted((f_tile(d, i) for i in range(d)), key=sorted):
        raise IntegrityError("tiles adjacent to Z are not the F_{u_i}")
    for i in range(d):
        if f_tile(d, i) & outer != {i}:
            raise IntegrityError(f"F_u{i} does not meet D exactly in u{i}")


# -- simple polytopes and pyramids ---------------------------------------------

def polygon_faces(m: int, start: int = 0) -> Cells:
    vs = list(range(start, start + m))
    out: Cells = {frozenset((v,)): 0 for v in vs}
    for i in range(m):
        out[frozenset((vs[i], vs[(i + 1) % m]))] = 1
    out[frozenset(vs)] = 2
    return out


def truncate_vertex(faces: Cells, w: int, next_label: int) -> tuple[Cells, int]:
    """Vertex truncation of a simple polytope given by all nonempty faces (incl. itself).

    New vertex for the edge {w, f} gets a fresh label; returns (faces, next label).
    """
    edges_at_w = sorted((c for c, r in faces.items() if r == 1 and w in c), key=sorted)
    new_label = {}
    for e in edges_at_w:
        new_label[e] = next_label
        next_label += 1
    out: Cells = {}
    for g, r in faces.items():
        if w not in g:
            out[g] = r
            continue
        if r == 0:
            continue
        cut = frozenset(new_label[e] for e in edges_at_w if e <= g)
        out[(g - {w}) | cut] = r
        out[cut] = r - 1
    return out, next_label


def admissible_pyramid_sizes(d: int, upto: int) -> list[int]:
    if d == 3:
        return list(range(3, upto + 1))
    return list(range(d, upto + 1, d - 2))


def is_admissible(m: int, d: int) -> bool:
    if d < 3 or m < d:
        return False
    return d == 3 or (m - d) % (d - 2) == 0


def next_admissible(m: int, d: int) -> int:
    """Least admissible base size >= m."""
    m = max(m, d)
    if d == 3:
        return m
    r = (m - d) % (d - 2)
    return m if r == 0 else m + (d - 2 - r)


def simple_base(m: int, d: int) -> tuple[Cells, frozenset]:
    """Simple (d-1)-polytope with m vertices plus one of its simplex facets.

    d = 3: the m-gon.  d >= 4: the (d-1)-simplex with vertices truncated one at a
    time, always away from a fixed simplex facet.  Labels start at 1.
    """
    if not is_admissible(m, d):
        lo = max([x for x in admissible_pyramid_sizes(d, m) if x < m], default=None)
        hi = next_admissible(m + 1, d)
        raise ValidationError(
            f"no pyramid base with {m} vertices in rank {d}; nearest admissible: "
            f"{[x for x in (lo, hi) if x is not None]}")
    if d == 3:
        return polygon_faces(m, start=1), frozenset((1, 2))
    e = d - 1
    faces = simplex_faces(range(1, e + 2))
    keep = frozenset(range(2, e + 2))
    nxt = e + 2
    while sum(1 for r in faces.values() if r == 0) < m:
        w = min(next(iter(c)) for c, r in faces.items() if r == 0 and not c <= keep)
        faces, nxt = truncate_vertex(faces, w, nxt)
    assert keep in faces and faces[keep] == e - 1
    return faces, keep


def pyramid_faces(base: Cells, apex: int = 0) -> Cells:
    e = max(base.values())
    out: Cells = dict(base)
    out[frozenset((apex,))] = 0
    for g, r in base.items():
        if r < e:
            out[g | {apex}] = r + 1
    whole = next(g for g, r in base.items() if r == e)
    out[whole | {apex}] = e + 1
    return out


def pyramid_diagram(m: int, d: int) -> SchlegelComplex:
    if d < 3:
        raise ValidationError("pyramid diagrams need d >= 3")
    base, simplex_facet = simple_base(m, d)
    faces = pyramid_faces(base, apex=0)
    outer = (0, *sorted(simplex_facet))
    cells = {c: r for c, r in faces.items() if r < d and c != frozenset(outer)}
    marks = {v: "pyramid" for c, r in cells.items() if r == 0 for v in c}
    marks[0] = "apex"
    return _dense(SchlegelComplex(d - 1, cells, outer, None, marks))


# -- cyclic polytopes -------------------------------------------------------------

def gale_facets(v: int, d: int) -> list[tuple[int, ...]]:
    """Facets of the cyclic polytope C(v, d) by Gale's evenness criterion.

    Generated block by block: a maximal run of chosen indices that touches
    neither 0 nor v-1 must have even length.
    """
    out: list[tuple[int, ...]] = []
    chosen: list[int] = []

    def rec(pos, run, from_start):
        if len(chosen) == d:
            if run % 2 == 0 or from_start or pos == v:
                out.append(tuple(chosen))
            return
        if pos == v or v - pos < d - len(chosen):
            return
        chosen.append(pos)
        rec(pos + 1, run + 1, from_start if run else pos == 0)
        chosen.pop()
        if run % 2 == 0 or from_start:
            rec(pos + 1, 0, False)

    rec(0, 0, False)
    return out


def gale_facets_brute(v: int, d: int) -> list[tuple[int, ...]]:
    """Direct test of the evenness condition on every d-subset (oracle)."""
    out = []
    for s in combinations(range(v), d):
        ss = set(s)
        gaps = [x for x in range(v) if x not in ss]
        if all(sum(1 for x in s if i < x < j) % 2 == 0 for i, j in combinations(gaps, 2)):
            out.append(s)
    return out


def cyclic_polytope_faces(v: int, d: int) -> Cells:
    if d < 2 or v < d + 1:
        raise ValidationError(f"cyclic polytope C({v},{d}) needs v >= d+1")
    out: Cells = {}
    for f in gale_facets(v, d):
        for k in range(1, d + 1):
            for s in combinations(f, k):
                out[frozenset(s)] = k - 1
    return out


def simplicial_polytope(v_count: int, d: int) -> FaceLattice:
    if d < 3:
        raise ValidationError("simplicial_polytope is for d >= 3")
    return FaceLattice.from_vertex_sets(d, cyclic_polytope_faces(v_count, d))


# -- Schlegel diagram of a lattice -------------------------------------------------

def schlegel_from_faces(faces: Cells, outer_facet: frozenset, d: int) -> SchlegelComplex:
    outer_facet = frozenset(outer_facet)
    if faces.get(outer_facet) != d - 1:
        raise ValidationError("outer cell is not a facet")
    sub = {c for c in faces if c <= outer_facet}
    if len(outer_facet) != d or len(sub) != 2 ** d - 1:
        raise ValidationError(f"outer facet {sorted(outer_facet)} is not a simplex")
    cells = {c: r for c, r in faces.items() if c != outer_facet and r < d}
    return SchlegelComplex(d - 1, cells, tuple(sorted(outer_facet)))


def schlegel_of(lat: FaceLattice, outer_facet: int) -> SchlegelComplex:
    if lat.ranks[outer_facet] != lat.rank - 1:
        raise ValidationError(f"face {outer_facet} is not a facet")
    atoms = lat.atoms
    faces = {}
    for f in range(len(lat.faces)):
        r = lat.ranks[f]
        if 0 <= r < lat.rank:
            if atoms[f] in faces:
                raise ValidationError("lattice faces are not determined by their vertex sets")
            faces[atoms[f]] = r
    return schlegel_from_faces(faces, atoms[outer_facet], lat.rank)


def lex_least_facet(faces: Cells, d: int) -> frozenset:
    return min((c for c, r in faces.items() if r == d - 1 and len(c) == d), key=sorted)


# -- gluing --------------------------------------------------------------------------

def glue_cells(host: Cells, target: frozenset, insert: SchlegelComplex,
               vertex_map: Mapping[int, int], next_label: int,
               inplace: bool = False) -> tuple[Cells, dict[int, int]]:
    """Replace the simplex ``target`` of ``host`` by ``insert``.

    ``vertex_map`` sends the insert's outer vertices onto the target's vertices;
    interior vertices get fresh labels ``next_label, next_label+1, ...`` in
    sorted order.  Returns the new cell dict (``host`` itself when ``inplace``)
    and the full label map.
    """
    target = frozenset(target)
    dim = insert.dim
    if host.get(target) != dim:
        raise ValidationError(f"target {sorted(target)} is not a {dim}-cell of the host")
    if len(target) != dim + 1 or any(frozenset(s) not in host
                                     for k in range(1, dim + 1)
                                     for s in combinations(sorted(target), k)):
        raise ValidationError(f"target {sorted(target)} is not a simplex of the host")
    if set(vertex_map) != set(insert.outer) or set(vertex_map.values()) != set(target) \
            or len(set(vertex_map.values())) != len(vertex_map):
        raise ValidationError("vertex map is not a bijection from the outer simplex onto the target")
    outer = insert.outer_cell
    expected = simplex_faces(outer)
    del expected[outer]
    boundary = {c: r for c, r in insert.cells.items() if c <= outer}
    if boundary != expected:
        raise ValidationError("insert boundary does not match the outer simplex")
    label = dict(vertex_map)
    for v in insert.interior_vertices:
        label[v] = next_label
        next_label += 1
    out = host if inplace else dict(host)
    del out[target]
    for c, r in insert.cells.items():
        out[frozenset(label[v] for v in c)] = r
    return out, label


def glue(host, target, insert: SchlegelComplex, vertex_map: Mapping[int, int]):
    """Glue into a SchlegelComplex (returns a new one) or a plain cell dict.

    Returns ``(new_host, label_map)``.
    """
    if isinstance(host, SchlegelComplex):
        nxt = max(host.vertices) + 1
        cells, label = glue_cells(dict(host.cells), target, insert, vertex_map, nxt)
        marks = dict(host.marks)
        for v in insert.interior_vertices:
            marks[label[v]] = insert.marks.get(v, "interior")
        central = host.central if host.central != frozenset(target) else None
        return SchlegelComplex(host.dim, cells, host.outer, central, marks), label
    cells = host.to_cells() if hasattr(host, "to_cells") else dict(host)
    nxt = max(next(iter(c)) for c, r in cells.items() if r == 0) + 1
    return glue_cells(cells, target, insert, vertex_map, nxt)


def _dense(sc: SchlegelComplex) -> SchlegelComplex:
    """Relabel so outer vertices are 0..dim and interior vertices follow in order."""
    order = list(sc.outer) + sc.interior_vertices
    new = {v: i for i, v in enumerate(order)}
    cells = {frozenset(new[v] for v in c): r for c, r in sc.cells.items()}
    central = frozenset(new[v] for v in sc.central) if sc.central else None
    marks = {new[v]: m for v, m in sc.marks.items() if v in new}
    return SchlegelComplex(sc.dim, cells, tuple(range(len(sc.outer))), central, marks)


# -- the decorated simplex R^L ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class DecoratedSimplex:
    """R^L: crosspolytope diagram, pyramids in every F_{u_i}, L in the central tile.

    Outer vertices are 0..d-1 (u_i = i).  ``kind[v]`` is one of
    ``outer``, ``crosspoly`` (vertices of the central simplex),
    ``pyramid`` (pyramid interior) or ``L`` (interior of the L diagram).
    """
    d: int
    diagram: SchlegelComplex
    kind: dict[int, str]
    l_vertices: int
    m_by_type: tuple[int, ...]
    l_outer_valency: dict[int, int]   # crosspoly vertex -> valency inside L
    l_interior_valency: dict[int, int]


def decorated_simplex(d: int, m_by_type, l_faces: Cells) -> DecoratedSimplex:
    m_by_type = tuple(m_by_type)
    base = crosspolytope_diagram(d)
    kind = {i: "outer" for i in range(d)}
    kind.update({d + i: "crosspoly" for i in range(d)})
    cur = base
    for i in range(d):
        pyr = pyramid_diagram(m_by_type[i], d)
        tile = f_tile(d, i)
        others = sorted(tile - {i})
        vmap = {pyr.outer[0]: i}
        vmap.update(zip(pyr.outer[1:], others))
        cur, label = glue(cur, tile, pyr, vmap)
        for v in pyr.interior_vertices:
            kind[label[v]] = "pyramid"
    l_outer = lex_least_facet(l_faces, d)
    l_diag = schlegel_from_faces(l_faces, l_outer, d)
    z = sorted(base.central)
    lmap = dict(zip(l_diag.outer, z))
    cur, label = glue(cur, base.central, l_diag, lmap)
    lval = valencies(l_faces)
    outer_val = {label[v]: lval[v] for v in l_diag.outer}
    inner_val = {label[v]: lval[v] for v in l_diag.interior_vertices}
    for v in l_diag.interior_vertices:
        kind[label[v]] = "L"
    n_l = sum(1 for r in l_faces.values() if r == 0)
    cur = SchlegelComplex(cur.dim, cur.cells, cur.outer, None, {v: kind[v] for v in kind})
    defects = cur.defects()
    if defects:
        raise IntegrityError(f"decorated simplex is not a pseudomanifold: {defects[:3]}")
    return DecoratedSimplex(d, cur, kind, n_l, m_by_type, outer_val, inner_val)


def predicted_valencies(ds: DecoratedSimplex) -> dict[int, int]:
    """Closed-form valency of every vertex of R^L, as seen inside the diagram.

    Outer vertex u_i: m_i + d - 1.  Central-simplex vertex: val_L + 2(d-1)
    (d-1 crosspolytope neighbours outside Z, d-1 inside Z counted by val_L,
    one extra edge from each of the d-1 pyramids it belongs to).  Pyramid
    interior: d.  L interior: val_L.
    """
    d = ds.d
    out = {}
    for v, k in ds.kind.items():
        if k == "outer":
            out[v] = ds.m_by_type[v] + d - 1
        elif k == "crosspoly":
            out[v] = ds.l_outer_valency[v] + 2 * (d - 1)
        elif k == "pyramid":
            out[v] = d
        else:
            out[v] = ds.l_interior_valency[v]
    return out
