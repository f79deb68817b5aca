from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from polyaut import fixtures
from polyaut.errors import ValidationError
from polyaut.forge import polygon
from polyaut.realize import (GeometricPolytope, centroid, decimal_string, equivalence_check,
                             hyperplane_sets, pull_realize, segment_meets_interior, sidecar_json,
                             to_off, translate)


def centred(name):
    g = fixtures.geometric(name)
    return GeometricPolytope.from_points(translate(g.vertices, centroid(g.vertices)))


def test_geometric_polytope_invariants():
    for name in fixtures.names():
        g = fixtures.geometric(name)
        g.check()
        assert len(g.facets) == g.lattice.f_vector()[-1]


def test_hyperplane_sets_cube_square():
    g = centred("cube")
    sq = g.lattice.faces_of_rank(2)[0]
    h_f, h_minus = hyperplane_sets(g, g.face_points(sq))
    assert len(h_f) == 1 and len(h_minus) == 4


def test_hyperplane_sets_tetrahedron_triangle():
    g = centred("tetrahedron")
    tri = g.lattice.faces_of_rank(2)[0]
    h_f, h_minus = hyperplane_sets(g, g.face_points(tri))
    assert len(h_f) == 1 and len(h_minus) == 3


def test_hyperplane_sets_after_first_cube_step():
    r = pull_realize(fixtures.geometric("cube"))
    step = r.steps[1]
    assert step.j == 1
    # an edge lies in one new triangle per adjacent square; each endpoint sits in
    # six triangles, four of which do not contain the whole edge
    assert set(step.h_sets.values()) == {(2, 8)}
    assert set(r.steps[0].h_sets.values()) == {(1, 4)}


def test_hyperplane_sets_rejects_non_face():
    g = centred("cube")
    with pytest.raises(ValidationError):
        hyperplane_sets(g, frozenset((0, 7)))  # opposite corners


@pytest.mark.parametrize("name, verts, facets", [("triangle", 6, 6), ("square", 8, 8),
                                                 ("tetrahedron", 14, 24), ("prism", 20, 36),
                                                 ("square-pyramid", 18, 32)])
def test_realize_counts(name, verts, facets):
    r = pull_realize(fixtures.geometric(name))
    assert r.certificate["isomorphic"]
    assert len(r.result.vertices) == verts and len(r.result.facets) == facets


def test_cube_facets_each_hold_one_cube_vertex():
    r = pull_realize(fixtures.geometric("cube"))
    src = r.source.lattice
    for h in r.result.facets:
        ranks = sorted(src.ranks[r.provenance[i]] for i in h.vertices)
        assert ranks == [0, 1, 2]


def test_parameters_are_strictly_inside_the_ray_interval():
    r = pull_realize(fixtures.geometric("octahedron"))
    for step in r.steps:
        assert all(t > 1 for t in step.t.values())
        assert step.q >= 2


def test_segment_interior_test():
    g = centred("square")
    a, b = (Fraction(-2), Fraction(0)), (Fraction(2), Fraction(0))
    assert segment_meets_interior(g, a, b)
    c, d = (Fraction(-2), Fraction(1, 2)), (Fraction(2), Fraction(1, 2))
    assert not segment_meets_interior(g, c, d)  # runs along the top edge


def test_equivalence_check_identity_and_mismatch():
    lat = fixtures.lattice("cube")
    ident = {v: v for v in lat.faces_of_rank(0)}
    ok, fmap = equivalence_check(lat, lat, ident)
    assert ok and all(fmap[f] == f for f in fmap)
    ok, witness = equivalence_check(polygon(4), polygon(5), {})
    assert not ok and witness["reason"] == "f-vectors differ"


def test_equivalence_check_rejects_non_isomorphic_map():
    lat = polygon(5)
    vs = lat.faces_of_rank(0)
    swapped = dict(zip(vs, vs))
    swapped[vs[0]], swapped[vs[2]] = vs[2], vs[0]
    ok, witness = equivalence_check(lat, lat, swapped)
    assert not ok


def test_dimension_cap():
    with pytest.raises(ValidationError):
        pull_realize(GeometricPolytope.from_points([(0,), (1,)]))


def test_off_output():
    r = pull_realize(fixtures.geometric("tetrahedron"))
    text = to_off(r.result, precision=4)
    lines = text.splitlines()
    assert lines[0] == "OFF" and lines[1] == "14 24 0"
    assert all(line.startswith("3 ") for line in lines[16:])
    side = sidecar_json(r)
    assert len(side["points"]) == 14 and len(side["facets"]) == 24


def test_off_orientation_is_outward():
    from polyaut import _exact as ex
    from polyaut.realize import _cross
    r = pull_realize(fixtures.geometric("cube"))
    g = r.result
    lines = to_off(g).splitlines()[2 + len(g.vertices):]
    for line in lines:
        i, j, k = map(int, line.split()[1:])
        a, b, c = g.vertices[i], g.vertices[j], g.vertices[k]
        n = _cross(ex.sub(b, a), ex.sub(c, a))
        # outward: the origin (interior) is on the negative side
        assert ex.dot(n, a) > 0


@given(st.fractions(min_value=-1000, max_value=1000, max_denominator=10 ** 6), st.integers(0, 8))
def test_decimal_string_rounds(x, p):
    s = decimal_string(x, p)
    assert abs(Fraction(s) - x) <= Fraction(1, 2 * 10 ** p)
    if p:
        assert len(s.split(".")[1]) == p
