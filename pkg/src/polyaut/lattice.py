"""Ranked face lattices, flags, axiom checks and barycentric subdivisions.

Face ids are dense integers assigned rank-major (least face first, greatest
face last).  ``covers`` of a face lists the faces it covers, i.e. the faces one
rank below it.
"""
from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import StructuralError, ValidationError

DEFAULT_MAX_FLAGS = 5000


@dataclass(frozen=True)
class Face:
    id: int
    rank: int
    covers: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class FaceLattice:
    rank: int
    faces: tuple[Face, ...]
    # Vertex sets the faces were built from, when known (provenance only).
    labels: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for i, f in enumerate(self.faces):
            if f.id != i:
                raise StructuralError(f"face at position {i} has id {f.id}; ids must be dense")
            for c in f.covers:
                if not isinstance(c, int) or c < 0 or c >= len(self.faces):
                    raise StructuralError(f"face {f.id} covers unknown face {c!r}")

    def __len__(self):
        return len(self.faces)

    @cached_property
    def ranks(self) -> tuple[int, ...]:
        return tuple(f.rank for f in self.faces)

    @cached_property
    def down(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(f.covers)) for f in self.faces)

    @cached_property
    def up(self) -> tuple[tuple[int, ...], ...]:
        up = [[] for _ in self.faces]
        for f in self.faces:
            for c in f.covers:
                up[c].append(f.id)
        return tuple(tuple(sorted(u)) for u in up)

    @cached_property
    def by_rank(self) -> dict[int, tuple[int, ...]]:
        out = defaultdict(list)
        for f in self.faces:
            out[f.rank].append(f.id)
        return {r: tuple(v) for r, v in sorted(out.items())}

    def faces_of_rank(self, r: int) -> tuple[int, ...]:
        return self.by_rank.get(r, ())

    @property
    def least(self) -> int:
        return self.faces_of_rank(-1)[0]

    @property
    def greatest(self) -> int:
        return self.faces_of_rank(self.rank)[0]

    @cached_property
    def atoms(self) -> tuple[frozenset[int], ...]:
        """For each face, the set of rank-0 face ids below or equal to it."""
        out: list[frozenset[int] | None] = [None] * len(self.faces)
        for f in sorted(self.faces, key=lambda f: f.rank):
            if f.rank < 0:
                out[f.id] = frozenset()
            elif f.rank == 0:
                out[f.id] = frozenset((f.id,))
            else:
                acc: set[int] = set()
                for c in f.covers:
                    acc |= out[c]
                out[f.id] = frozenset(acc)
        return tuple(out)

    @cached_property
    def atom_index(self) -> dict[tuple[int, frozenset], int]:
        """(rank, vertex set) -> face id; only meaningful for atomic lattices."""
        return {(self.ranks[i], a): i for i, a in enumerate(self.atoms)}

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self.faces_of_rank(r)) for r in range(self.rank))

    def valency(self, vertex: int) -> int:
        return len(self.up[vertex]) if self.rank > 1 else 0

    def below(self, face: int) -> frozenset[int]:
        """All faces <= face."""
        seen = {face}
        stack = [face]
        while stack:
            for c in self.down[stack.pop()]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return frozenset(seen)

    # -- construction -------------------------------------------------

    @classmethod
    def from_vertex_sets(cls, rank: int, cells: Mapping[frozenset, int]) -> "FaceLattice":
        """Build a lattice from proper faces given as vertex sets with their ranks.

        Vertices are the rank-0 cells (singletons).  Least and greatest faces are
        added.  Ids are rank-major, ordered within a rank by sorted vertex tuple.
        """
        keyed = defaultdict(list)
        for vs, r in cells.items():
            if r < 0 or r >= rank:
                raise StructuralError(f"cell {sorted(vs)} has rank {r} outside 0..{rank - 1}")
            keyed[r].append(tuple(sorted(vs)))
        order: list[tuple[int, tuple]] = [(-1, ())]
        for r in range(rank):
            order.extend((r, vs) for vs in sorted(keyed.get(r, [])))
        order.append((rank, ("*",)))
        ids = {key: i for i, key in enumerate(order)}
        by_vertex: dict[int, dict] = defaultdict(lambda: defaultdict(list))
        for r, vs in order[1:-1]:
            for v in vs:
                by_vertex[r][v].append(vs)
        covers: list[list[int]] = [[] for _ in order]
        for r, vs in order[1:-1]:
            me = ids[(r, vs)]
            if r == 0:
                covers[me].append(0)
                continue
            # facets of this cell: rank r-1 cells contained in it
            cand = set()
            for v in vs:
                cand.update(by_vertex[r - 1].get(v, ()))
            sset = set(vs)
            for c in cand:
                if set(c) <= sset:
                    covers[me].append(ids[(r - 1, c)])
        top = len(order) - 1
        if rank == 0:
            covers[top] = [0]
        else:
            covers[top] = [ids[(rank - 1, vs)] for vs in sorted(keyed.get(rank - 1, []))]
        faces = tuple(Face(i, order[i][0], tuple(sorted(covers[i]))) for i in range(len(order)))
        labels = tuple(frozenset(vs) if r < rank else None for r, vs in order)
        return cls(rank, faces, labels)

    @classmethod
    def from_facets(cls, rank: int, facets: Iterable[Iterable[int]]) -> "FaceLattice":
        """Lattice of a polytope all of whose faces are intersections of facets."""
        facets = [frozenset(f) for f in facets]
        cells = closure_under_intersection(facets)
        return cls.from_vertex_sets(rank, _rank_by_chain(cells, rank))

    # -- (de)serialisation ------------------------------------------

    def to_json(self) -> dict:
        return {"rank": self.rank,
                "faces": [{"id": f.id, "rank": f.rank, "covers": list(f.covers)}
                          for f in self.faces]}

    @classmethod
    def from_json(cls, data: dict | str) -> "FaceLattice":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise StructuralError(f"lattice file is not JSON: {exc}") from exc
        try:
            rank = int(data["rank"])
            raw = sorted(data["faces"], key=lambda f: f["id"])
            faces = tuple(Face(int(f["id"]), int(f["rank"]), tuple(int(c) for c in f["covers"]))
                          for f in raw)
        except (KeyError, TypeError, ValueError) as exc:
            raise StructuralError(f"malformed lattice JSON: {exc!r}") from exc
        return cls(rank, faces)

    def relabel_dense(self) -> "FaceLattice":
        """Re-sort ids rank-major (id order inside each rank preserved)."""
        order = sorted(range(len(self.faces)), key=lambda i: (self.ranks[i], i))
        new = {old: new for new, old in enumerate(order)}
        faces = tuple(Face(new[i], self.ranks[i], tuple(sorted(new[c] for c in self.faces[i].covers)))
                      for i in order)
        return FaceLattice(self.rank, faces)


def closure_under_intersection(sets: Sequence[frozenset]) -> set[frozenset]:
    out = set(sets)
    frontier = list(out)
    while frontier:
        nxt = []
        for a in frontier:
            for b in sets:
                c = a & b
                if c and c not in out:
                    out.add(c)
                    nxt.append(c)
        frontier = nxt
    return out


def _rank_by_chain(cells: set[frozenset], rank: int) -> dict[frozenset, int]:
    """Rank of each set = length of the longest chain of sets strictly below it."""
    srt = sorted(cells, key=len)
    height: dict[frozenset, int] = {}
    for c in srt:
        h = 0
        for d in srt:
            if len(d) >= len(c):
                break
            if d < c:
                h = max(h, height[d] + 1)
        height[c] = h
    top = max(height.values()) if height else -1
    if top > rank - 1:
        raise StructuralError("intersection closure is deeper than the stated rank")
    for c in cells:
        if len(c) == 1 and height[c] != 0:
            raise StructuralError("singleton that is not minimal")
    return height


# -- validation ---------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    witness: object = None

    def to_json(self) -> dict:
        out = {"name": self.name, "pass": bool(self.passed)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class ValidationReport:
    checks: list[Check]
    flag_count: int | None = None
    exhaustive: bool = True

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"ok": self.ok, "flag_count": self.flag_count, "exhaustive": self.exhaustive,
                "checks": [c.to_json() for c in self.checks]}


def _check_structure(lat: FaceLattice) -> None:
    for f in lat.faces:
        if f.rank < -1 or f.rank > lat.rank:
            raise StructuralError(f"face {f.id} has rank {f.rank} outside -1..{lat.rank}")


def diamonds(lat: FaceLattice) -> dict[tuple[int, int], list[int]]:
    """(lower, upper) with rank gap 2 -> intermediate faces."""
    out: dict[tuple[int, int], list[int]] = defaultdict(list)
    for g in range(len(lat.faces)):
        for h in lat.down[g]:
            for f in lat.down[h]:
                out[(f, g)].append(h)
    return out


def validate(lat: FaceLattice, max_flags: int = DEFAULT_MAX_FLAGS) -> ValidationReport:
    _check_structure(lat)
    checks: list[Check] = []
    d = lat.rank

    least = lat.faces_of_rank(-1)
    greatest = lat.faces_of_rank(d)
    witness = None
    if len(least) != 1 or len(greatest) != 1:
        witness = {"least": list(least), "greatest": list(greatest)}
    else:
        for f in lat.faces:
            if f.id != least[0] and not f.covers:
                witness = {"covers_nothing": f.id}
                break
            if f.id != greatest[0] and not lat.up[f.id]:
                witness = {"covered_by_nothing": f.id}
                break
    checks.append(Check("bounded", witness is None, witness))

    witness = None
    for f in lat.faces:
        for c in f.covers:
            if lat.ranks[c] != f.rank - 1:
                witness = [c, f.id]
                break
        if witness:
            break
    checks.append(Check("graded", witness is None, witness))

    structural_ok = all(c.passed for c in checks)
    checks.append(Check("flag_length", structural_ok,
                        None if structural_ok else "needs bounded+graded"))

    dia = diamonds(lat)
    witness = None
    for (f, g), mids in sorted(dia.items()):
        if len(mids) != 2:
            witness = {"lower": f, "upper": g, "between": sorted(mids)}
            break
    checks.append(Check("diamond", witness is None, witness))

    if not all(c.passed for c in checks):
        checks.append(Check("flag_connected", False, "prerequisite failed"))
        checks.append(Check("strongly_flag_connected", False, "prerequisite failed"))
        return ValidationReport(checks)

    graph = FlagGraph.build(lat, dia)
    n = len(graph.flags)
    comp = graph.component_size(0) if n else 0
    checks.append(Check("flag_connected", comp == n,
                        None if comp == n else {"reached": comp, "flags": n}))

    exhaustive = n <= max_flags
    witness = None
    for lo, hi in _sections(lat, exhaustive):
        if not _section_connected(lat, lo, hi):
            witness = {"lower": lo, "upper": hi}
            break
    checks.append(Check("strongly_flag_connected", witness is None, witness))
    return ValidationReport(checks, n, exhaustive)


def assert_valid(lat: FaceLattice, max_flags: int = DEFAULT_MAX_FLAGS) -> ValidationReport:
    rep = validate(lat, max_flags)
    if not rep.ok:
        bad = rep.failures()[0]
        raise ValidationError(f"lattice fails {bad.name}: {bad.witness}")
    return rep


def _sections(lat: FaceLattice, exhaustive: bool):
    """Pairs (lower, upper) whose section has rank >= 2.

    The whole lattice is checked separately.  Exhaustive mode lists every
    comparable pair; otherwise a fixed schedule: every face over the least face,
    every co-face under the greatest face, and every 7th intermediate pair.
    """
    d = lat.rank
    lo0, hi0 = lat.least, lat.greatest
    if exhaustive:
        for g in range(len(lat.faces)):
            rg = lat.ranks[g]
            for f in lat.below(g):
                if rg - lat.ranks[f] >= 3 and (f, g) != (lo0, hi0):
                    yield f, g
        return
    for g in range(len(lat.faces)):
        if 3 <= lat.ranks[g] + 1 and g != hi0:
            yield lo0, g
    for f in range(len(lat.faces)):
        if d - lat.ranks[f] >= 3 and f != lo0:
            yield f, hi0
    k = 0
    for g in range(len(lat.faces)):
        if lat.ranks[g] >= d or lat.ranks[g] < 2:
            continue
        for f in lat.below(g):
            if lat.ranks[f] >= 0 and lat.ranks[g] - lat.ranks[f] >= 3:
                if k % 7 == 0:
                    yield f, g
                k += 1


def _section_connected(lat: FaceLattice, lo: int, hi: int) -> bool:
    inside = None if hi == lat.greatest else lat.below(hi)
    chains = []

    def walk(face, acc):
        if face == hi:
            chains.append(tuple(acc))
            return
        for u in lat.up[face]:
            if inside is None or u in inside:
                if u == hi:
                    walk(u, acc)
                else:
                    walk(u, acc + [u])

    walk(lo, [])
    if not chains:
        return False
    index = {c: i for i, c in enumerate(chains)}
    seen = {0}
    queue = deque([0])
    while queue:
        c = chains[queue.popleft()]
        for i in range(len(c)):
            below = lo if i == 0 else c[i - 1]
            above = hi if i == len(c) - 1 else c[i + 1]
            for alt in set(lat.up[below]) & set(lat.down[above]):
                if alt != c[i]:
                    j = index.get(c[:i] + (alt,) + c[i + 1:])
                    if j is not None and j not in seen:
                        seen.add(j)
                        queue.append(j)
    return len(seen) == len(chains)


# -- flags ---------------------------------------------------------------

@dataclass
class FlagGraph:
    """Flags (one face id per rank 0..d-1) and their i-adjacency table."""
    lattice: FaceLattice
    flags: list[tuple[int, ...]]
    index: dict[tuple[int, ...], int]
    adjacent: list[tuple[int, ...]]

    @classmethod
    def build(cls, lat: FaceLattice, dia: dict | None = None) -> "FlagGraph":
        d = lat.rank
        flags: list[tuple[int, ...]] = []
        if d == 0:
            flags = [()]
        else:
            stack = [(v,) for v in reversed(lat.faces_of_rank(0))]
            while stack:
                chain = stack.pop()
                if len(chain) == d:
                    flags.append(chain)
                    continue
                for u in reversed(lat.up[chain[-1]]):
                    stack.append(chain + (u,))
        index = {f: i for i, f in enumerate(flags)}
        if dia is None:
            dia = diamonds(lat)
        least, greatest = lat.least, lat.greatest
        adjacent = []
        for f in flags:
            row = []
            for i in range(d):
                lo = least if i == 0 else f[i - 1]
                hi = greatest if i == d - 1 else f[i + 1]
                mids = dia[(lo, hi)]
                other = mids[0] if mids[1] == f[i] else mids[1]
                row.append(index[f[:i] + (other,) + f[i + 1:]])
            adjacent.append(tuple(row))
        return cls(lat, flags, index, adjacent)

    def component_size(self, start: int) -> int:
        seen = bytearray(len(self.flags))
        seen[start] = 1
        stack = [start]
        count = 1
        while stack:
            for j in self.adjacent[stack.pop()]:
                if not seen[j]:
                    seen[j] = 1
                    count += 1
                    stack.append(j)
        return count


def flags(lat: FaceLattice) -> list[tuple[int, ...]]:
    return FlagGraph.build(lat).flags


def flag_graph(lat: FaceLattice) -> FlagGraph:
    return FlagGraph.build(lat)


# -- barycentric subdivision --------------------------------------------

@dataclass(frozen=True, eq=False)
class LabelledComplex:
    """Order complex of the boundary of a lattice.

    Vertex ``x`` has ``types[x]`` = rank of ``origin[x]`` in the source lattice.
    ``cells`` holds every simplex (a chain) as a frozenset of vertex ids.
    """
    dim: int
    types: tuple[int, ...]
    origin: tuple[int, ...]
    cells: tuple[frozenset[int], ...]
    chambers: tuple[int, ...]
    source: FaceLattice | None = field(default=None, repr=False)

    @cached_property
    def cell_index(self) -> dict[frozenset[int], int]:
        return {c: i for i, c in enumerate(self.cells)}

    @cached_property
    def vertex_of_face(self) -> dict[int, int]:
        return {f: x for x, f in enumerate(self.origin)}

    @property
    def n_vertices(self) -> int:
        return len(self.types)

    def cell_dim(self, cell: int) -> int:
        return len(self.cells[cell]) - 1

    def chamber_sets(self) -> list[frozenset[int]]:
        return [self.cells[c] for c in self.chambers]

    def chamber_vertex_of_type(self, chamber: int, t: int) -> int:
        for x in self.cells[chamber]:
            if self.types[x] == t:
                return x
        raise KeyError(t)

    @cached_property
    def _edges(self) -> dict[int, set[int]]:
        nb = defaultdict(set)
        for c in self.cells:
            if len(c) == 2:
                a, b = tuple(c)
                nb[a].add(b)
                nb[b].add(a)
        return nb

    def _check_vertex(self, x: int):
        if not 0 <= x < self.n_vertices:
            raise KeyError(f"unknown vertex id {x}")

    def valency(self, x: int) -> int:
        self._check_vertex(x)
        return len(self._edges[x])

    def facet_cells(self, cell: int) -> list[int]:
        c = self.cells[cell]
        if len(c) == 1:
            return []
        return [self.cell_index[c - {x}] for x in sorted(c)]

    def to_cells(self) -> dict[frozenset[int], int]:
        return {c: len(c) - 1 for c in self.cells}

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "vertices": [{"id": x, "type": t, "origin": o}
                         for x, (t, o) in enumerate(zip(self.types, self.origin))],
            "cells": [{"id": i, "dim": len(c) - 1, "vertices": sorted(c)}
                      for i, c in enumerate(self.cells)],
            "chambers": list(self.chambers),
        }


@dataclass(frozen=True)
class SubComplex:
    cells: tuple[frozenset[int], ...]

    @property
    def chambers(self) -> tuple[frozenset[int], ...]:
        top = max((len(c) for c in self.cells), default=0)
        return tuple(c for c in self.cells if len(c) == top)

    def of_dim(self, k: int) -> tuple[frozenset[int], ...]:
        return tuple(c for c in self.cells if len(c) == k + 1)


def barycentric_subdivision(lat: FaceLattice) -> LabelledComplex:
    if lat.rank < 1:
        raise ValidationError("barycentric subdivision needs rank >= 1")
    proper = [f for f in range(len(lat.faces)) if 0 <= lat.ranks[f] < lat.rank]
    vid = {f: i for i, f in enumerate(proper)}
    types = tuple(lat.ranks[f] for f in proper)
    # chains ending at each face, built bottom-up over strict lower sets
    ending: dict[int, list[tuple[int, ...]]] = {}
    for f in sorted(proper, key=lambda f: (lat.ranks[f], f)):
        out = [(vid[f],)]
        for g in sorted(lat.below(f)):
            if g != f and g in vid:
                out.extend(c + (vid[f],) for c in ending[g])
        ending[f] = out
    all_chains = [c for f in proper for c in ending[f]]
    all_chains.sort(key=lambda c: (len(c), c))
    cells = tuple(frozenset(c) for c in all_chains)
    top = lat.rank
    index = {c: i for i, c in enumerate(cells)}
    chambers = tuple(index[frozenset(vid[x] for x in fl)] for fl in flags(lat))
    assert all(len(cells[c]) == top for c in chambers)
    return LabelledComplex(lat.rank - 1, types, tuple(proper), cells, chambers, lat)


def vertex_star(cx: LabelledComplex, x: int) -> SubComplex:
    cx._check_vertex(x)
    tops = [c for c in cx.cells if x in c]
    out: set[frozenset[int]] = set()
    for c in tops:
        members = sorted(c)
        for k in range(1, len(members) + 1):
            out.update(frozenset(s) for s in combinations(members, k))
    return SubComplex(tuple(sorted(out, key=lambda c: (len(c), sorted(c)))))


def vertex_link(cx: LabelledComplex, x: int) -> SubComplex:
    star = vertex_star(cx, x)
    return SubComplex(tuple(c for c in star.cells if x not in c))


def chamber_count_through(cx: LabelledComplex, x: int) -> int:
    cx._check_vertex(x)
    return sum(1 for c in cx.chambers if x in cx.cells[c])


def order_complex_lattice(lat: FaceLattice) -> FaceLattice:
    """Face lattice of the barycentric subdivision of the boundary, as a polytope of the same rank.

    Vertex ids of the result are labelled by source face ids (via ``labels``).
    """
    cx = barycentric_subdivision(lat)
    cells = {frozenset(cx.origin[x] for x in c): len(c) - 1 for c in cx.cells}
    return FaceLattice.from_vertex_sets(lat.rank, cells)


def pseudomanifold_defects(cells: Mapping[frozenset, int], dim: int,
                           boundary: frozenset | None = None) -> list:
    """Ridges not in exactly two top cells (one, if inside ``boundary``)."""
    count: dict[frozenset, int] = defaultdict(int)
    ridges = [c for c, r in cells.items() if r == dim - 1]
    tops = [c for c, r in cells.items() if r == dim]
    ridge_set = set(ridges)
    by_vertex = defaultdict(list)
    for r in ridges:
        by_vertex[min(r)].append(r)
    for t in tops:
        for v in t:
            for r in by_vertex.get(v, ()):
                if r <= t:
                    count[r] += 1
    bad = []
    for r in ridge_set:
        want = 1 if boundary is not None and r <= boundary else 2
        if count[r] != want:
            bad.append((sorted(r), count[r]))
    return sorted(bad)
