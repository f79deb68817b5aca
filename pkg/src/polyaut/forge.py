"""Assembly of a polytope whose automorphism group is a given permutation group.

Branches: trivial group -> point, C2 -> segment, C_k (k >= 3) -> a chiral
"wheel" polyhedron, dihedral -> polygon, everything else (or any non-cyclic
group with ``force_general``) -> the orbit-polytope pipeline:

    orbit polytope Q -> barycentric subdivision C(Q) -> valency plan
    -> decorate every chamber with a copy of R^{L_C} transported by the group
    -> adjoin improper faces -> certify.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import __version__
from .autgroup import FacePerm, VerificationResult, verify_construction
from .diagrams import (Cells, DecoratedSimplex, cyclic_polytope_faces, decorated_simplex,
                       glue_cells, lex_least_facet, next_admissible, valencies)
from .errors import CertificationError, IntegrityError, ResourceError
from .hull import OrbitPolytope, orbit_polytope
from .lattice import (Face, FaceLattice, FlagGraph, LabelledComplex, barycentric_subdivision,
                      chamber_count_through, pseudomanifold_defects, validate)
from .permgroup import GroupClass, PermGroup, classify


@dataclass
class ValencyPlan:
    d: int
    m: int
    m_by_type: tuple[int, ...]
    intervals: tuple[tuple[int, int], ...]     # M_i = (a_i, b_i), indexed by type
    s_stats: dict[int, dict[str, int]]

    def chain(self) -> list[int]:
        """m, a_{d-1}, b_{d-1}, ..., a_0, b_0."""
        out = [self.m]
        for j in range(self.d - 1, -1, -1):
            out.extend(self.intervals[j])
        return out

    def chain_holds(self) -> bool:
        c = self.chain()
        for j in range(self.d):
            lo_prev = c[2 * j]          # m or b_{j+1}
            a, b = c[2 * j + 1], c[2 * j + 2]
            if not (lo_prev < a <= b):
                return False
        return True

    def to_json(self) -> dict:
        return {"d": self.d, "m": self.m, "m_by_type": list(self.m_by_type),
                "intervals": {str(i): list(ab) for i, ab in enumerate(self.intervals)},
                "chain": self.chain(), "chain_holds": self.chain_holds(),
                "s_stats": {str(k): v for k, v in sorted(self.s_stats.items())}}


@dataclass
class DecoratedComplex:
    d: int
    cells: Cells
    provenance: list[tuple]                  # per vertex label
    n_cq_vertices: int
    chamber_vertices: list[tuple[int, ...]]  # per chamber: its C(Q) vertices by type
    chamber_template: list[int]              # per chamber: index into templates
    templates: list[DecoratedSimplex]
    labels: dict[tuple[int, int], int]       # (chamber, template vertex) -> label
    base_vertex: int                         # C(Q) vertex id of the initial vertex


@dataclass
class ConstructionReport:
    branch: str
    d: int
    group_order: int
    group_class: str
    counts: dict = field(default_factory=dict)
    plan: ValencyPlan | None = None
    valency_evidence: dict | None = None
    verification: VerificationResult | None = None
    notes: list[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"branch": self.branch, "d": self.d, "group_order": self.group_order,
                "group_class": self.group_class, "counts": self.counts,
                "plan": self.plan.to_json() if self.plan else None,
                "valency_evidence": self.valency_evidence,
                "verification": self.verification.to_json() if self.verification else None,
                "notes": self.notes, "config": self.config, "version": __version__}


@dataclass
class Construction:
    lattice: FaceLattice
    report: ConstructionReport
    embedding: list[FacePerm] | None = None
    orbit: OrbitPolytope | None = None
    cq: LabelledComplex | None = None
    decorated: DecoratedComplex | None = None


# -- small branches ---------------------------------------------------------------

def point() -> FaceLattice:
    return FaceLattice(0, (Face(0, -1, ()), Face(1, 0, (0,))))


def segment() -> FaceLattice:
    return FaceLattice(1, (Face(0, -1, ()), Face(1, 0, (0,)), Face(2, 0, (0,)), Face(3, 1, (1, 2))))


def polygon(k: int) -> FaceLattice:
    """The k-gon; k = 2 gives the digon (two vertices joined by two edges)."""
    if k < 2:
        raise ValueError("polygon needs k >= 2")
    faces = [Face(0, -1, ())]
    faces += [Face(1 + i, 0, (0,)) for i in range(k)]
    faces += [Face(1 + k + i, 1, tuple(sorted((1 + i, 1 + (i + 1) % k)))) for i in range(k)]
    faces.append(Face(1 + 2 * k, 2, tuple(range(1 + k, 1 + 2 * k))))
    return FaceLattice(2, tuple(faces))


def wheel_polyhedron(k: int) -> FaceLattice:
    """Polyhedron with a rotation of order k and no orientation-reversing symmetry.

    Inner k-gon a_0..a_{k-1}, outer k-gon b_0..b_{k-1}; sector i holds a
    degree-3 vertex c_i joined to a_{i+1}, b_i, b_{i+1}, which splits the band
    into a quadrilateral (a_i a_{i+1} c_i b_i) and two triangles.  Attaching c_i
    to the forward inner vertex is what kills the reflections.
    """
    if k < 3:
        raise ValueError("wheel polyhedron needs k >= 3")
    a = lambda i: i % k
    b = lambda i: k + i % k
    c = lambda i: 2 * k + i % k
    polys = [[a(i) for i in range(k)], [b(i) for i in range(k)]]
    for i in range(k):
        polys.append([a(i), a(i + 1), c(i), b(i)])
        polys.append([a(i + 1), b(i + 1), c(i)])
        polys.append([c(i), b(i + 1), b(i)])
    cells: Cells = {frozenset((v,)): 0 for v in range(3 * k)}
    for p in polys:
        cells[frozenset(p)] = 2
        for x, y in zip(p, p[1:] + p[:1]):
            cells[frozenset((x, y))] = 1
    return FaceLattice.from_vertex_sets(3, cells)


# -- valency plan -----------------------------------------------------------------

def interior_bound(d: int, l_faces: Cells) -> int:
    """Largest valency a non-C(Q) vertex of R^{L} can reach, in closed form."""
    lval = valencies(l_faces)
    outer = lex_least_facet(l_faces, d)
    best = d  # pyramid interior
    for x, v in lval.items():
        best = max(best, v + 2 * (d - 1) if x in outer else v)
    return best


def plan_valencies(cq: LabelledComplex, star_assignments: Sequence[Cells]) -> ValencyPlan:
    """m from the chosen L-polytopes, then m_{d-1}, ..., m_0 so that the intervals separate."""
    d = cq.dim + 1
    m = max(interior_bound(d, lf) for lf in star_assignments)
    s = {x: chamber_count_through(cq, x) for x in range(cq.n_vertices)}
    val = {x: cq.valency(x) for x in range(cq.n_vertices)}
    stats: dict[int, dict[str, int]] = {}
    m_by_type = [0] * d
    intervals: list[tuple[int, int]] = [(0, 0)] * d
    bound = m
    for j in range(d - 1, -1, -1):
        xs = [x for x in range(cq.n_vertices) if cq.types[x] == j]
        stats[j] = {"s_min": min(s[x] for x in xs), "s_max": max(s[x] for x in xs),
                    "val_min": min(val[x] for x in xs), "val_max": max(val[x] for x in xs),
                    "count": len(xs)}
        need = max((bound - val[x]) // s[x] + 1 for x in xs)
        mj = next_admissible(max(need, d), d)
        a = min(val[x] + s[x] * mj for x in xs)
        b = max(val[x] + s[x] * mj for x in xs)
        if a <= bound:
            raise IntegrityError(f"could not separate type {j}: a={a} <= {bound}")
        m_by_type[j] = mj
        intervals[j] = (a, b)
        bound = b
    plan = ValencyPlan(d, m, tuple(m_by_type), tuple(intervals), stats)
    assert plan.chain_holds()
    return plan


# -- decoration ---------------------------------------------------------------------

def face_action(orbit: OrbitPolytope, group: PermGroup) -> list[list[int]]:
    """For each group element, the permutation it induces on the faces of Q."""
    lat = orbit.lattice
    atoms = lat.atoms
    idx = lat.atom_index
    v2g, g2v = orbit.vertex_to_group, orbit.point_to_vertex
    out = []
    for gi in range(group.order):
        vmap = {v: g2v[group.multiply(gi, v2g[v])] for v in v2g}
        perm = []
        for f in range(len(lat.faces)):
            r = lat.ranks[f]
            if r < 0 or r == lat.rank:
                perm.append(f)
                continue
            perm.append(idx[(r, frozenset(vmap[v] for v in atoms[f]))])
        out.append(perm)
    return out


def base_star(cq: LabelledComplex, base_vertex: int) -> list[int]:
    """Chamber positions (indices into cq.chambers) containing the base vertex, sorted."""
    return [i for i, c in enumerate(cq.chambers) if base_vertex in cq.cells[c]]


def star_assignments(d: int, n_chambers: int) -> list[Cells]:
    """Cyclic polytopes with d+2, d+3, ... vertices, one per base-star chamber."""
    return [cyclic_polytope_faces(d + 2 + i, d) for i in range(n_chambers)]


def decorate(cq: LabelledComplex, group: PermGroup, orbit: OrbitPolytope,
             plan: ValencyPlan, l_assignments: Sequence[Cells] | None = None,
             max_cells: int | None = None) -> DecoratedComplex:
    d = cq.dim + 1
    lat = orbit.lattice
    v_face = orbit.point_to_vertex[0]  # identity element's point
    base_vertex = cq.vertex_of_face[v_face]
    star = base_star(cq, base_vertex)
    if l_assignments is None:
        l_assignments = star_assignments(d, len(star))
    templates = [decorated_simplex(d, plan.m_by_type, lf) for lf in l_assignments]
    if max_cells is not None:
        # each chamber trades its own faces (one per nonempty vertex subset) for a template
        per_orbit = sum(len(t.diagram.cells) - (2 ** d - 1) for t in templates)
        predicted = len(cq.cells) + group.order * per_orbit
        if predicted > max_cells:
            raise ResourceError(f"decorated complex would have about {predicted} faces "
                                f"(cap {max_cells})")
    star_pos = {cq.chambers[p]: k for k, p in enumerate(star)}
    action = face_action(orbit, group)
    inv_index = [group.index[g.inverse()] for g in group.elements]

    cells: Cells = cq.to_cells()
    provenance: list[tuple] = [("cq", cq.types[x], cq.origin[x]) for x in range(cq.n_vertices)]
    next_label = cq.n_vertices
    chamber_vertices, chamber_template = [], []
    labels: dict[tuple[int, int], int] = {}
    decorated = set()
    for pos, cell_id in enumerate(cq.chambers):
        chamber = cq.cells[cell_id]
        xs = tuple(cq.chamber_vertex_of_type(cell_id, t) for t in range(d))
        w = cq.origin[xs[0]]
        g = orbit.vertex_to_group[w]
        ginv = action[inv_index[g]]
        pulled = [cq.vertex_of_face[ginv[cq.origin[x]]] for x in xs]
        if any(cq.types[p] != t for t, p in enumerate(pulled)):
            raise IntegrityError(f"transport of chamber {pos} is not type-preserving")
        base_cell = cq.cell_index[frozenset(pulled)]
        k = star_pos.get(base_cell)
        if k is None:
            raise IntegrityError(f"chamber {pos} does not pull back into the base star")
        if pos in decorated:
            raise IntegrityError(f"chamber {pos} decorated twice")
        decorated.add(pos)
        tpl = templates[k]
        vmap = {i: xs[i] for i in range(d)}
        cells, label = glue_cells(cells, chamber, tpl.diagram, vmap, next_label, inplace=True)
        for tv in tpl.diagram.interior_vertices:
            lab = label[tv]
            assert lab == len(provenance)
            provenance.append(("chamber", pos, tv, tpl.kind[tv]))
            labels[(pos, tv)] = lab
        next_label += len(tpl.diagram.interior_vertices)
        chamber_vertices.append(xs)
        chamber_template.append(k)
    if len(decorated) != len(cq.chambers):
        raise IntegrityError("not every chamber was decorated")
    return DecoratedComplex(d, cells, provenance, cq.n_vertices, chamber_vertices,
                            chamber_template, templates, labels, base_vertex)


def complete_polytope(dc: DecoratedComplex) -> FaceLattice:
    defects = pseudomanifold_defects(dc.cells, dc.d - 1)
    if defects:
        raise IntegrityError(f"decorated complex has ridges not in exactly two tiles: {defects[:3]}")
    lat = FaceLattice.from_vertex_sets(dc.d, dc.cells)
    rep = validate(lat)
    if not rep.ok:
        bad = rep.failures()[0]
        raise IntegrityError(f"assembled lattice fails {bad.name}: {bad.witness}")
    return lat


def vertex_embedding(dc: DecoratedComplex, cq: LabelledComplex, orbit: OrbitPolytope,
                     group: PermGroup) -> list[list[int]]:
    """For each group element, the induced permutation of the vertex labels of P."""
    action = face_action(orbit, group)
    chamber_pos = {c: i for i, c in enumerate(cq.chambers)}
    out = []
    for gi in range(group.order):
        fa = action[gi]
        cqmap = [cq.vertex_of_face[fa[cq.origin[x]]] for x in range(cq.n_vertices)]
        vm = list(cqmap)
        for lab in range(dc.n_cq_vertices, len(dc.provenance)):
            _, pos, tv, _ = dc.provenance[lab]
            image = frozenset(cqmap[x] for x in dc.chamber_vertices[pos])
            ipos = chamber_pos[cq.cell_index[image]]
            vm.append(dc.labels[(ipos, tv)])
        out.append(vm)
    return out


def face_embedding(lat: FaceLattice, vertex_maps: Sequence[Sequence[int]]) -> list[FacePerm]:
    """Lift vertex-label permutations to face permutations (labels are rank-0 ids minus 1)."""
    atoms, idx, ranks = lat.atoms, lat.atom_index, lat.ranks
    out = []
    for vm in vertex_maps:
        perm = []
        for f in range(len(lat.faces)):
            r = ranks[f]
            if r < 0 or r == lat.rank:
                perm.append(f)
                continue
            key = (r, frozenset(vm[v - 1] + 1 for v in atoms[f]))
            if key not in idx:
                raise IntegrityError(f"group element does not map face {f} onto a face")
            perm.append(idx[key])
        out.append(tuple(perm))
    return out


def valency_evidence(lat: FaceLattice, dc: DecoratedComplex, cq: LabelledComplex,
                     plan: ValencyPlan) -> dict:
    """Brute-force edge count on the assembled polytope vs the closed-form predictions."""
    measured = [lat.valency(v) for v in lat.faces_of_rank(0)]
    mismatches = []
    per_type = {}
    for x in range(cq.n_vertices):
        t = cq.types[x]
        pred = cq.valency(x) + chamber_count_through(cq, x) * plan.m_by_type[t]
        if measured[x] != pred:
            mismatches.append({"vertex": x, "predicted": pred, "measured": measured[x]})
        lo, hi = per_type.get(t, (measured[x], measured[x]))
        per_type[t] = (min(lo, measured[x]), max(hi, measured[x]))
    others = measured[dc.n_cq_vertices:]
    max_other = max(others) if others else 0
    in_interval = all(plan.intervals[t][0] <= per_type[t][0] and per_type[t][1] <= plan.intervals[t][1]
                      for t in per_type)
    return {"exact_match": not mismatches, "mismatches": mismatches[:10],
            "measured_intervals": {str(t): list(v) for t, v in sorted(per_type.items())},
            "max_other_valency": max_other, "others_within_m": max_other <= plan.m,
            "within_intervals": in_interval}


# -- entry point --------------------------------------------------------------------

def construct(group: PermGroup, *, force_general: bool = False, certify: bool = True,
              jobs: int = 1, max_faces: int = 200_000, config: dict | None = None) -> Construction:
    gc = classify(group)
    report = ConstructionReport("", 0, group.order, str(gc), config=dict(config or {}))
    report.config.setdefault("force_general", force_general)
    embedding = None
    orbit = cq = dc = None
    use_general = gc.tag == "general" or (force_general and gc.tag == "dihedral")
    if force_general and gc.tag in ("trivial", "cyclic"):
        report.notes.append("force_general ignored for cyclic groups")

    if gc.tag == "trivial":
        report.branch, lat = "point", point()
    elif gc.tag == "cyclic" and gc.k == 2:
        report.branch, lat = "segment", segment()
    elif gc.tag == "cyclic":
        report.branch, lat = "wheel", wheel_polyhedron(gc.k)
    elif not use_general:
        report.branch, lat = "polygon", polygon(gc.k)
    else:
        orbit = orbit_polytope(group)
        if orbit.dim <= 2:
            if gc.tag != "dihedral":
                raise IntegrityError(f"orbit polytope of a non-dihedral group has dimension {orbit.dim}")
            report.notes.append("orbit polytope is planar; using the polygon branch")
            report.branch, lat = "polygon", polygon(gc.k)
            orbit = None
        else:
            report.branch = "general"
            cq = barycentric_subdivision(orbit.lattice)
            star = base_star(cq, cq.vertex_of_face[orbit.point_to_vertex[0]])
            assignments = star_assignments(cq.dim + 1, len(star))
            plan = plan_valencies(cq, assignments)
            report.plan = plan
            dc = decorate(cq, group, orbit, plan, assignments, max_cells=max_faces)
            lat = complete_polytope(dc)
            embedding = face_embedding(lat, vertex_embedding(dc, cq, orbit, group))
            report.valency_evidence = valency_evidence(lat, dc, cq, plan)
            report.counts["orbit_polytope_f_vector"] = list(orbit.lattice.f_vector())
            report.counts["chambers"] = len(cq.chambers)
            report.counts["base_star_chambers"] = len(star)
            report.counts["l_vertex_counts"] = [t.l_vertices for t in dc.templates]

    report.d = lat.rank
    report.counts["f_vector"] = list(lat.f_vector())
    report.counts["faces"] = len(lat.faces)
    report.counts["flags"] = len(FlagGraph.build(lat).flags)
    construction = Construction(lat, report, embedding, orbit, cq, dc)
    if certify:
        report.verification = verify_construction(lat, group, embedding,
                                                  None if embedding is not None else gc, jobs=jobs)
    return construction


def require_certified(c: Construction) -> Construction:
    v = c.report.verification
    if v is None or not v.certified:
        failing = [ch.name for ch in (v.checks if v else []) if not ch.passed]
        raise CertificationError(f"construction not certified: {failing}")
    return c
