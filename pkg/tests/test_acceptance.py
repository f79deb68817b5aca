"""Acceptance suite: one test per criterion, each checked exactly.

``pytest tests/test_acceptance.py`` (or running this file directly) ends
with one PASS/FAIL line per criterion.
"""
import filecmp
import time

import pytest

from polyaut import fixtures
from polyaut.autgroup import automorphisms, brute_force_automorphisms
from polyaut.cli import main
from polyaut.diagrams import (crosspolytope_diagram, cyclic_polytope_faces, decorated_simplex,
                              f_tile, next_admissible, valencies)
from polyaut.forge import construct, polygon, wheel_polyhedron
from polyaut.lattice import FaceLattice, flags, pseudomanifold_defects, validate
from polyaut.permgroup import cyclic_group, dihedral_group
from polyaut.realize import pull_realize

try:
    from conftest import a4, timed_construction, v4
except ImportError:  # running as a script from elsewhere
    from tests.conftest import a4, timed_construction, v4


def _check_sub(report, name):
    return next(c for c in report.verification.checks if c.name == name).passed


@pytest.mark.criterion(1, "V4 forced-general certifies aut_order 4 in < 5 min")
def test_general_branch_v4():
    c, secs = timed_construction("v4", v4, force_general=True, jobs=1)
    r = c.report
    assert r.branch == "general"
    assert secs < 300
    assert r.verification.aut_order == 4
    assert r.verification.certified
    for name in ("embedding_automorphisms", "embedding_injective", "aut_order_equals_group_order"):
        assert _check_sub(r, name), name


@pytest.mark.criterion(2, "A4 certifies aut_order 12 in < 30 min; valency chain and exact counts")
def test_general_branch_a4():
    c, secs = timed_construction("a4", a4, jobs=2)
    r = c.report
    assert r.branch == "general" and secs < 1800
    assert r.verification.certified and r.verification.aut_order == 12
    plan = r.plan
    chain = plan.chain()
    # m < a2 <= b2 < a1 <= b1 < a0 <= b0
    assert len(chain) == 7
    for i in range(0, 6, 2):
        assert chain[i] < chain[i + 1] <= chain[i + 2]
    # independent brute-force edge count on the assembled lattice
    lat, cq = c.lattice, c.cq
    edges = {}
    for e in lat.faces_of_rank(1):
        for v in lat.down[e]:
            edges[v] = edges.get(v, 0) + 1
    vertices = lat.faces_of_rank(0)
    for x in range(cq.n_vertices):
        t = cq.types[x]
        s = sum(1 for ch in cq.chambers if x in cq.cells[ch])
        predicted = cq.valency(x) + s * plan.m_by_type[t]
        assert edges[vertices[x]] == predicted
        a, b = plan.intervals[t]
        assert a <= predicted <= b
    assert all(edges[v] <= plan.m for v in vertices[cq.n_vertices:])


@pytest.mark.criterion(3, "branch coverage: point, segment, C5/C7 wheels, D5 polygon, each < 1 min")
def test_branch_coverage():
    cases = [(cyclic_group(1), "point", 1), (cyclic_group(2), "segment", 2),
             (cyclic_group(5), "wheel", 5), (cyclic_group(7), "wheel", 7),
             (dihedral_group(5), "polygon", 10)]
    for g, branch, order in cases:
        t0 = time.perf_counter()
        c = construct(g)
        assert time.perf_counter() - t0 < 60
        assert c.report.branch == branch
        assert c.report.verification.certified and c.report.verification.aut_order == order
    d5 = construct(dihedral_group(5))
    witness = next(ch for ch in d5.report.verification.checks if ch.name == "isomorphism_witness")
    assert witness.passed and witness.witness["kind"] == "dihedral"
    assert len(construct(cyclic_group(1)).lattice.faces) == 2


@pytest.mark.criterion(4, "Schlegel diagram properties for d = 3, 4, 5")
def test_schlegel_properties():
    for d in (3, 4, 5):
        sc = crosspolytope_diagram(d)
        assert len(sc.tiles) == 2 ** d - 1
        z, outer = sc.central, sc.outer_cell
        assert not (z & outer)
        adjacent = sc.adjacent_tiles(z)
        assert len(adjacent) == d
        assert all(len(t & outer) == 1 for t in adjacent)
        assert sorted(adjacent, key=sorted) == sorted((f_tile(d, i) for i in range(d)), key=sorted)
        m = [next_admissible(d + 1 + 2 * i, d) for i in range(d)]
        ds = decorated_simplex(d, m, cyclic_polytope_faces(d + 2, d))
        val = valencies(ds.diagram.cells)
        assert [val[i] for i in range(d)] == [m[i] + d - 1 for i in range(d)]


def _euler_and_ridges(lat: FaceLattice):
    v, e, f = lat.f_vector()
    assert v - e + f == 2
    for edge in lat.faces_of_rank(1):
        assert len(lat.up[edge]) == 2


@pytest.mark.criterion(5, "axiom suite on every emitted lattice; Euler and ridge counts for rank 3")
def test_axiom_suite(v4_run, a4_run):
    emitted = [v4_run[0].lattice, a4_run[0].lattice]
    emitted += [wheel_polyhedron(k) for k in (3, 4, 5, 7)]
    emitted += [polygon(k) for k in range(2, 9)]
    emitted += [fixtures.lattice(n) for n in fixtures.names()]
    for lat in emitted:
        rep = validate(lat, max_flags=10 ** 6)
        assert rep.ok, rep.failures()
        assert rep.exhaustive
        if lat.rank == 3:
            _euler_and_ridges(lat)
    for c in (v4_run[0], a4_run[0]):
        assert not pseudomanifold_defects(c.decorated.cells, 2)


@pytest.mark.criterion(6, "flag-walk engine equals brute force; cube 48, tetrahedron 24, k-gons 2k")
def test_engine_oracle():
    small = [fixtures.lattice(n) for n in fixtures.names()]
    small += [polygon(k) for k in range(2, 9)] + [wheel_polyhedron(3)]
    small = [lat for lat in small if len(lat.faces) <= 40]
    assert len(small) >= 10
    for lat in small:
        assert automorphisms(lat).elements == brute_force_automorphisms(lat).elements
    assert automorphisms(fixtures.lattice("cube")).order == 48
    assert automorphisms(fixtures.lattice("tetrahedron")).order == 24
    for k in range(3, 9):
        assert automorphisms(polygon(k)).order == 2 * k


REALIZE_EXPECTED = {"triangle": (6, 6), "tetrahedron": (24, 14), "cube": (48, 26),
                    "octahedron": (48, 26), "4-simplex": (120, 30)}


@pytest.mark.criterion(7, "pulling realizes the barycentric subdivision of five built-ins")
def test_realize_builtins():
    for name, (facets, verts) in REALIZE_EXPECTED.items():
        t0 = time.perf_counter()
        r = pull_realize(fixtures.geometric(name))
        assert time.perf_counter() - t0 < 120
        assert r.certificate["isomorphic"] is True
        assert len(r.result.facets) == facets
        assert len(r.result.vertices) == verts
        src = fixtures.lattice(name)
        assert facets == len(flags(src))
        assert verts == sum(1 for x in src.ranks if 0 <= x < src.rank)


@pytest.mark.criterion(8, "identical invocations give byte-identical outputs")
def test_determinism(tmp_path):
    runs = [
        ["construct", "builtin:V4", "--force-general", "--jobs", "2"],
        ["construct", "builtin:C5"],
        ["aut", "builtin:cube", "--elements"],
        ["bsd", "builtin:octahedron"],
        ["realize", "builtin:cube", "--precision", "6"],
        ["validate", "builtin:4-simplex"],
    ]
    for i, argv in enumerate(runs):
        produced = []
        for rep in range(2):
            out = tmp_path / f"run{i}.out"
            report = tmp_path / f"run{i}.report"
            extra = ["--out", str(out)]
            if argv[0] in ("construct", "realize"):
                extra += ["--report", str(report)]
            assert main(argv + extra) == 0
            files = [p for p in (out, report, tmp_path / f"run{i}.out.json") if p.exists()]
            snap = []
            for p in files:
                keep = p.with_suffix(p.suffix + f".{rep}")
                keep.write_bytes(p.read_bytes())
                p.unlink()
                snap.append(keep)
            produced.append(snap)
        a, b = produced
        assert len(a) == len(b) and a
        for x, y in zip(a, b):
            assert filecmp.cmp(x, y, shallow=False), (argv, x.name)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
