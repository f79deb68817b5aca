import pytest

from polyaut.autgroup import automorphisms, compose, perm_order
from polyaut.errors import ResourceError
from polyaut.forge import (ValencyPlan, construct, face_embedding, polygon, require_certified,
                           vertex_embedding, wheel_polyhedron)
from polyaut.lattice import validate
from polyaut.permgroup import cyclic_group, dihedral_group, from_cycles


def test_v4_plan_statistics(v4_run):
    c, _ = v4_run
    plan = c.report.plan
    for t in range(3):
        st = plan.s_stats[t]
        assert (st["s_min"], st["s_max"]) == {0: (6, 6), 1: (4, 4), 2: (6, 6)}[t]
    assert plan.chain_holds()


def test_v4_decoration_bookkeeping(v4_run):
    c, _ = v4_run
    dc, cq = c.decorated, c.cq
    assert len(cq.chambers) == 24
    assert c.report.counts["base_star_chambers"] == 6
    assert c.report.counts["l_vertex_counts"] == [5, 6, 7, 8, 9, 10]
    # every chamber decorated once, six per vertex of Q (one group orbit per template)
    assert len(dc.chamber_template) == 24
    assert sorted(dc.chamber_template.count(k) for k in range(6)) == [4] * 6
    per_vertex = {}
    for xs in dc.chamber_vertices:
        per_vertex[xs[0]] = per_vertex.get(xs[0], 0) + 1
    assert sorted(per_vertex.values()) == [6, 6, 6, 6]


def test_v4_face_count_matches_prediction(v4_run):
    c, _ = v4_run
    d = 3
    per_orbit = sum(len(t.diagram.cells) - (2 ** d - 1) for t in c.decorated.templates)
    assert len(c.decorated.cells) == len(c.cq.cells) + 4 * per_orbit


def test_v4_valencies_are_separated(v4_run):
    ev = v4_run[0].report.valency_evidence
    assert ev["exact_match"] and ev["within_intervals"] and ev["others_within_m"]


def test_v4_sphere(v4_run):
    lat = v4_run[0].lattice
    v, e, f = lat.f_vector()
    assert v - e + f == 2
    assert all(len(lat.up[x]) == 2 for x in lat.faces_of_rank(1))


def test_decoration_commutes_with_group(v4_run):
    c, _ = v4_run
    cells = set(c.decorated.cells)
    group = from_cycles(4, "(1 2)(3 4)", "(1 3)(2 4)")
    for vm in vertex_embedding(c.decorated, c.cq, c.orbit, group):
        assert {frozenset(vm[v] for v in cell) for cell in cells} == cells


def test_embedding_is_a_homomorphism(a4_run):
    c, _ = a4_run
    group = from_cycles(4, "(1 2 3)", "(2 3 4)")
    emb = c.embedding
    for i in range(group.order):
        for j in range(group.order):
            assert tuple(emb[group.multiply(i, j)]) == compose(emb[i], emb[j])


def test_a4_report_json(a4_run):
    js = a4_run[0].report.to_json()
    assert {"branch", "d", "group_order", "counts", "plan", "verification", "config"} <= set(js)
    assert js["verification"]["aut_order"] == 12
    assert js["plan"]["chain_holds"]
    assert js["counts"]["orbit_polytope_f_vector"] == [12, 30, 20]


@pytest.mark.parametrize("k", range(3, 10))
def test_wheels_have_exactly_k_symmetries(k):
    lat = wheel_polyhedron(k)
    assert validate(lat).ok
    assert lat.f_vector() == (3 * k, 6 * k, 3 * k + 2)
    aut = automorphisms(lat)
    assert aut.order == k
    assert any(perm_order(p) == k for p in aut.elements)


def test_wheel_four_has_no_sector_fixing_involution():
    lat = wheel_polyhedron(4)
    aut = automorphisms(lat)
    # sector quadrilaterals are the 4-gons through a sector vertex c_i (labels 8..11)
    sector_vertices = {lat.faces_of_rank(0)[x] for x in range(8, 12)}
    quads = [f for f in lat.faces_of_rank(2) if len(lat.atoms[f]) == 4 and
             lat.atoms[f] & sector_vertices]
    assert len(quads) == 4
    for p in aut.elements:
        if perm_order(p) == 2:
            assert all(p[q] != q for q in quads)


def test_small_branch_errors():
    with pytest.raises(ValueError):
        polygon(1)
    with pytest.raises(ValueError):
        wheel_polyhedron(2)


def test_digon_default_for_v4():
    c = construct(from_cycles(4, "(1 2)(3 4)", "(1 3)(2 4)"))
    assert c.report.branch == "polygon"
    assert c.lattice.f_vector() == (2, 2)
    assert c.report.verification.aut_order == 4 and c.report.verification.certified


def test_planar_orbit_falls_back_to_polygon():
    c = construct(from_cycles(3, "(1 2 3)", "(1 2)"), force_general=True)
    assert c.report.branch == "polygon"
    assert c.report.notes
    assert c.report.verification.certified


def test_force_general_ignored_for_cyclic():
    c = construct(cyclic_group(4), force_general=True)
    assert c.report.branch == "wheel" and c.report.notes


def test_face_cap_is_enforced_before_decorating():
    with pytest.raises(ResourceError):
        construct(from_cycles(4, "(1 2)(3 4)", "(1 3)(2 4)"), force_general=True, max_faces=500)


def test_plan_chain_check_detects_overlap():
    good = ValencyPlan(3, 10, (3, 3, 3), ((30, 31), (20, 22), (11, 15)), {})
    assert good.chain() == [10, 11, 15, 20, 22, 30, 31]
    assert good.chain_holds()
    bad = ValencyPlan(3, 10, (3, 3, 3), ((30, 31), (15, 22), (11, 15)), {})
    assert not bad.chain_holds()


def test_require_certified_passes_through():
    c = construct(dihedral_group(4))
    assert require_certified(c) is c


def test_face_embedding_identity(v4_run):
    c, _ = v4_run
    n = len(c.decorated.provenance)
    ident = face_embedding(c.lattice, [list(range(n))])[0]
    assert ident == tuple(range(len(c.lattice.faces)))
