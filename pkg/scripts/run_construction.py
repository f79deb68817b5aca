"""Build and certify polytopes for a handful of small groups and print a summary table.

    python scripts/run_construction.py            # V4 (forced general), A4, C3..C7, D3..D6
    python scripts/run_construction.py --with-s4  # also S4 (about 15 s)
    python scripts/run_construction.py --json out.json
"""
import argparse
import json
import time

from polyaut.forge import construct
from polyaut.permgroup import cyclic_group, dihedral_group, from_cycles


def cases(with_s4):
    yield "V4 (forced general)", from_cycles(4, "(1 2)(3 4)", "(1 3)(2 4)"), True
    yield "A4", from_cycles(4, "(1 2 3)", "(2 3 4)"), False
    if with_s4:
        yield "S4", from_cycles(4, "(1 2 3 4)", "(1 2)"), False
    for k in range(3, 8):
        yield f"C{k}", cyclic_group(k), False
    for k in range(3, 7):
        yield f"D{k}", dihedral_group(k), False


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--with-s4", action="store_true")
    ap.add_argument("--jobs", type=int, default=2)
    ap.add_argument("--json", help="write all reports here")
    args = ap.parse_args()

    rows, reports = [], {}
    for name, group, force in cases(args.with_s4):
        t0 = time.perf_counter()
        c = construct(group, force_general=force, jobs=args.jobs)
        secs = time.perf_counter() - t0
        v = c.report.verification
        rows.append((name, group.order, c.report.branch, c.lattice.f_vector(), v.aut_order,
                     v.certified, secs))
        reports[name] = c.report.to_json()

    print(f"{'group':22} {'|G|':>4} {'branch':8} {'f-vector':24} {'|Aut|':>5} {'ok':>3} {'sec':>6}")
    for name, n, branch, fv, aut, ok, secs in rows:
        print(f"{name:22} {n:4d} {branch:8} {str(fv):24} {aut:5d} {'yes' if ok else 'NO':>3} {secs:6.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(reports, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
