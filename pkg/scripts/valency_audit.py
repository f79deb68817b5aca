"""Independent audit of the valency plan for a general-branch construction.

Rebuilds the polytope, then counts edges at every vertex straight from the
face lattice (ignoring the closed-form predictions) and checks that each
subdivision vertex of type i lands in its interval M_i, that every other
vertex stays at or below m, and that the intervals are disjoint and ordered.

    python scripts/valency_audit.py A4
    python scripts/valency_audit.py V4
"""
import sys
from collections import Counter

from polyaut.forge import construct
from polyaut.permgroup import from_cycles

GROUPS = {
    "V4": (from_cycles(4, "(1 2)(3 4)", "(1 3)(2 4)"), True),
    "A4": (from_cycles(4, "(1 2 3)", "(2 3 4)"), False),
    "S4": (from_cycles(4, "(1 2 3 4)", "(1 2)"), False),
}


def main(name):
    group, force = GROUPS[name]
    c = construct(group, force_general=force, certify=False)
    lat, cq, plan = c.lattice, c.cq, c.report.plan
    degree = Counter()
    for e in lat.faces_of_rank(1):
        for v in lat.down[e]:
            degree[v] += 1
    verts = lat.faces_of_rank(0)
    ok = True
    print(f"{name}: m = {plan.m}, m_i = {list(plan.m_by_type)}")
    for t in range(plan.d - 1, -1, -1):
        got = sorted({degree[verts[x]] for x in range(cq.n_vertices) if cq.types[x] == t})
        a, b = plan.intervals[t]
        inside = all(a <= g <= b for g in got)
        ok &= inside
        print(f"  type {t}: measured {got}  interval [{a}, {b}]  {'ok' if inside else 'OUT'}")
    others = max(degree[v] for v in verts[cq.n_vertices:])
    ok &= others <= plan.m
    print(f"  other vertices: max valency {others} (m = {plan.m})  {'ok' if others <= plan.m else 'OUT'}")
    ok &= plan.chain_holds()
    print(f"  chain {plan.chain()}  {'holds' if plan.chain_holds() else 'BROKEN'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1] if len(sys.argv) > 1 else "A4"))
