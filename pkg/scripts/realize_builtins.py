"""Pull-realize every built-in polytope and report counts, q values and timings.

    python scripts/realize_builtins.py [--off-dir DIR]
"""
import argparse
import time
from pathlib import Path

from polyaut import fixtures
from polyaut.lattice import flags
from polyaut.realize import pull_realize, to_off


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--off-dir", help="write an OFF file per 3-polytope here")
    args = ap.parse_args()
    print(f"{'polytope':15} {'verts':>5} {'facets':>6} {'flags':>5} {'iso':>4} {'q per step':12} {'sec':>5}")
    for name in fixtures.names():
        src = fixtures.geometric(name)
        t0 = time.perf_counter()
        r = pull_realize(src)
        secs = time.perf_counter() - t0
        qs = ",".join(str(s.q) for s in r.steps)
        print(f"{name:15} {len(r.result.vertices):5d} {len(r.result.facets):6d} "
              f"{len(flags(src.lattice)):5d} {str(r.certificate['isomorphic']):>4} {qs:12} {secs:5.1f}")
        if args.off_dir and r.result.dim == 3:
            Path(args.off_dir).mkdir(parents=True, exist_ok=True)
            (Path(args.off_dir) / f"{name}.off").write_text(to_off(r.result))


if __name__ == "__main__":
    main()
