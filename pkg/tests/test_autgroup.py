import pytest
from hypothesis import given, settings, strategies as st

from polyaut import fixtures
from polyaut.autgroup import (automorphisms, brute_force_automorphisms, compose, fixes_a_flag,
                              is_automorphism, verify_construction)
from polyaut.errors import ResourceError, ValidationError
from polyaut.forge import polygon, wheel_polyhedron
from polyaut.lattice import Face, FaceLattice, flag_graph, flags, order_complex_lattice
from polyaut.permgroup import classify, cyclic_group, dihedral_group

SMALL = ["triangle", "square", "pentagon", "tetrahedron", "cube", "octahedron", "prism",
         "square-pyramid", "4-simplex"]


@pytest.mark.parametrize("name, order", [("cube", 48), ("tetrahedron", 24), ("octahedron", 48),
                                         ("prism", 12), ("square", 8), ("square-pyramid", 8),
                                         ("4-simplex", 120)])
def test_known_orders(name, order):
    assert automorphisms(fixtures.lattice(name)).order == order


@pytest.mark.parametrize("name", SMALL)
def test_engine_matches_brute_force(name):
    lat = fixtures.lattice(name)
    assert automorphisms(lat).elements == brute_force_automorphisms(lat).elements


def test_brute_force_cap():
    with pytest.raises(ResourceError):
        brute_force_automorphisms(polygon(30))


def test_invalid_lattice_is_refused():
    lat = fixtures.lattice("cube")
    # drop one cover from a square: breaks the diamond condition
    sq = lat.faces_of_rank(2)[0]
    faces = list(lat.faces)
    faces[sq] = Face(sq, 2, faces[sq].covers[1:])
    with pytest.raises(ValidationError):
        automorphisms(FaceLattice(3, tuple(faces)))


def test_filter_never_prunes():
    for lat in (wheel_polyhedron(6), order_complex_lattice(fixtures.lattice("cube")),
                fixtures.lattice("prism")):
        assert automorphisms(lat, use_filter=False).elements == automorphisms(lat).elements


def test_parallel_search_agrees():
    lat = order_complex_lattice(fixtures.lattice("octahedron"))
    assert automorphisms(lat, jobs=2).elements == automorphisms(lat, jobs=1).elements


def test_group_structure_of_cube():
    lat = fixtures.lattice("cube")
    aut = automorphisms(lat)
    elems = set(aut.elements)
    for a in aut.elements[::5]:
        for b in aut.elements[::7]:
            assert compose(a, b) in elems
    graph = flag_graph(lat)
    ident = aut.identity()
    for p in aut.elements:
        assert is_automorphism(lat, p)
        if p != ident:
            assert not fixes_a_flag(lat, p, graph)
    # each automorphism sends the base flag somewhere different
    images = {tuple(p[f] for f in aut.base_flag) for p in aut.elements}
    assert len(images) == aut.order


@given(st.integers(2, 12))
@settings(max_examples=11)
def test_order_divides_flag_count(k):
    lat = polygon(k)
    assert len(flags(lat)) % automorphisms(lat).order == 0
    assert automorphisms(lat).order == 2 * k


def test_bsd_lattice_contains_induced_automorphisms():
    cube = fixtures.lattice("cube")
    bsd = order_complex_lattice(cube)
    by_label = {next(iter(bsd.labels[v])): v for v in bsd.faces_of_rank(0)}
    for p in automorphisms(cube).elements[:12]:
        vmap = {by_label[f]: by_label[p[f]] for f in by_label}
        perm = []
        for f in range(len(bsd.faces)):
            r = bsd.ranks[f]
            if r < 0 or r == bsd.rank:
                perm.append(f)
            else:
                perm.append(bsd.atom_index[(r, frozenset(vmap[v] for v in bsd.atoms[f]))])
        assert is_automorphism(bsd, perm)


def test_verification_of_polygon_and_wheel():
    res = verify_construction(polygon(5), dihedral_group(5), None, classify(dihedral_group(5)))
    assert res.certified and res.aut_order == 10
    res = verify_construction(wheel_polyhedron(5), cyclic_group(5), None, classify(cyclic_group(5)))
    assert res.certified
    assert any(c.name == "isomorphism_witness" and c.witness["kind"] == "cyclic" for c in res.checks)


def test_verification_failure_names_the_check():
    res = verify_construction(polygon(4), cyclic_group(4), None, classify(cyclic_group(4)))
    assert not res.certified
    bad = [c for c in res.checks if not c.passed]
    assert bad[0].name == "aut_order_equals_group_order"
    assert bad[0].witness == {"aut_order": 8, "group_order": 4}
    js = res.to_json()
    assert js["certified"] is False and js["aut_order"] == 8


def test_bad_embedding_is_caught():
    lat = polygon(4)
    ident = tuple(range(len(lat.faces)))
    res = verify_construction(lat, cyclic_group(2), [ident, ident])
    names = {c.name: c.passed for c in res.checks}
    assert not names["embedding_injective"]
