"""Command-line entry point: ``polyaut {construct,aut,bsd,realize,validate}``.

Inputs may be file paths or ``builtin:<name>``.  Every report echoes the run
configuration, and nothing time- or RNG-dependent is written, so identical
invocations give byte-identical files.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, fixtures
from .autgroup import automorphisms, aut_to_json
from .errors import PolyautError, ValidationError
from .forge import construct
from .hull import points_from_json
from .lattice import DEFAULT_MAX_FLAGS, FaceLattice, barycentric_subdivision, validate
from .permgroup import PermGroup, cyclic_group, dihedral_group, from_cycles, load_group
from .realize import DEFAULT_Q_MAX, GeometricPolytope, dumps, pull_realize, sidecar_json, to_off

BUILTIN = "builtin:"

NAMED_GROUPS = {
    "V4": (4, "(1 2)(3 4)", "(1 3)(2 4)"),
    "A4": (4, "(1 2 3)", "(2 3 4)"),
    "S4": (4, "(1 2 3 4)", "(1 2)"),
}


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    outputs: dict[str, str | None] = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    version: str = __version__


def _resolve(path: str | None) -> str | None:
    if path is None or path.startswith(BUILTIN):
        return path
    return str(Path(path).resolve())


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def load_group_arg(source: str) -> PermGroup:
    if source.startswith(BUILTIN):
        name = source[len(BUILTIN):]
        if name in NAMED_GROUPS:
            deg, *gens = NAMED_GROUPS[name]
            return from_cycles(deg, *gens)
        m = re.fullmatch(r"([CD])(\d+)", name)
        if m:
            k = int(m.group(2))
            if m.group(1) == "C" and k >= 1:
                return cyclic_group(k)
            if m.group(1) == "D" and k >= 3:
                return dihedral_group(k)
        raise ValidationError(f"unknown built-in group {name!r} (V4, A4, S4, C<k>, D<k>)")
    return load_group(_read(source))


def load_lattice_arg(source: str) -> FaceLattice:
    if source.startswith(BUILTIN):
        return fixtures.lattice(source[len(BUILTIN):])
    return FaceLattice.from_json(_read(source))


def load_points_arg(source: str) -> GeometricPolytope:
    if source.startswith(BUILTIN):
        return fixtures.geometric(source[len(BUILTIN):])
    return GeometricPolytope.from_points(points_from_json(_read(source)))


# -- commands -------------------------------------------------------------------

def cmd_construct(args, cfg: RunConfig) -> int:
    group = load_group_arg(args.group)
    c = construct(group, force_general=args.force_general, jobs=args.jobs,
                  max_faces=args.max_faces, config=asdict(cfg))
    report = c.report.to_json()
    if args.out:
        _write(args.out, json.dumps(c.lattice.to_json(), sort_keys=True) + "\n")
    _write(args.report, dumps(report))
    ok = c.report.verification is not None and c.report.verification.certified
    if not ok:
        print("certification failed", file=sys.stderr)
    return 0 if ok else 3


def cmd_aut(args, cfg: RunConfig) -> int:
    lat = load_lattice_arg(args.lattice)
    aut = automorphisms(lat, jobs=args.jobs, max_flags=args.max_flags)
    out = aut_to_json(aut, with_elements=args.elements)
    out["config"] = asdict(cfg)
    _write(args.out, dumps(out))
    return 0


def cmd_bsd(args, cfg: RunConfig) -> int:
    lat = load_lattice_arg(args.lattice)
    rep = validate(lat)
    if not rep.ok:
        bad = rep.failures()[0]
        raise ValidationError(f"lattice fails {bad.name}: {bad.witness}")
    cx = barycentric_subdivision(lat)
    out = cx.to_json()
    out["counts"] = {"vertices": cx.n_vertices, "chambers": len(cx.chambers)}
    out["config"] = asdict(cfg)
    _write(args.out, dumps(out))
    return 0


def cmd_realize(args, cfg: RunConfig) -> int:
    g = load_points_arg(args.points)
    r = pull_realize(g, q_max=args.q_max)
    if args.out:
        if r.result.dim == 3:
            _write(args.out, to_off(r.result, args.precision))
        sidecar = args.out + ".json" if r.result.dim == 3 else args.out
        side = sidecar_json(r)
        side["config"] = asdict(cfg)
        _write(sidecar, dumps(side))
    cert = dict(r.certificate)
    cert["counts"] = r.counts()
    cert["config"] = asdict(cfg)
    _write(args.report, dumps(cert))
    return 0 if cert["isomorphic"] else 3


def cmd_validate(args, cfg: RunConfig) -> int:
    lat = load_lattice_arg(args.lattice)
    rep = validate(lat, max_flags=args.max_flags)
    out = rep.to_json()
    out["config"] = asdict(cfg)
    _write(args.out, dumps(out))
    return 0 if rep.ok else 2


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyaut", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, jobs=False):
        sp.add_argument("--out", help="output file (stdout if omitted)")
        if jobs:
            sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                            help="worker processes for the automorphism search")

    c = sub.add_parser("construct", help="build and certify a polytope for a permutation group")
    c.add_argument("group", help="group JSON file or builtin:V4|A4|S4|C<k>|D<k>")
    common(c, jobs=True)
    c.add_argument("--report", help="report JSON (stdout if omitted)")
    c.add_argument("--force-general", action="store_true",
                   help="use the orbit-polytope pipeline for dihedral groups too")
    c.add_argument("--max-faces", type=int, default=200_000)
    c.set_defaults(func=cmd_construct)

    a = sub.add_parser("aut", help="automorphism group of a face lattice")
    a.add_argument("lattice")
    common(a, jobs=True)
    a.add_argument("--elements", action="store_true", help="list the face permutations")
    a.add_argument("--max-flags", type=int, default=None)
    a.set_defaults(func=cmd_aut)

    b = sub.add_parser("bsd", help="barycentric subdivision of a face lattice")
    b.add_argument("lattice")
    common(b)
    b.set_defaults(func=cmd_bsd)

    r = sub.add_parser("realize", help="convex realization of the barycentric subdivision")
    r.add_argument("points", help="points JSON or builtin:" + "|".join(fixtures.REALIZE_BUILTINS))
    common(r)
    r.add_argument("--report", help="certificate JSON (stdout if omitted)")
    r.add_argument("--q-max", type=int, default=DEFAULT_Q_MAX)
    r.add_argument("--precision", type=int, default=8, help="decimal places in the OFF file")
    r.set_defaults(func=cmd_realize)

    v = sub.add_parser("validate", help="check the abstract polytope axioms")
    v.add_argument("lattice")
    common(v)
    v.add_argument("--max-flags", type=int, default=DEFAULT_MAX_FLAGS)
    v.set_defaults(func=cmd_validate)
    return p


def _config(args) -> RunConfig:
    skip = {"func", "command", "group", "lattice", "points", "out", "report"}
    inputs = [_resolve(getattr(args, k)) for k in ("group", "lattice", "points") if hasattr(args, k)]
    outputs = {k: _resolve(getattr(args, k)) for k in ("out", "report") if hasattr(args, k)}
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return RunConfig(args.command, inputs, outputs, flags)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _config(args)
    for k in ("out", "report"):
        if getattr(args, k, None):
            setattr(args, k, _resolve(getattr(args, k)))
    try:
        return args.func(args, cfg)
    except PolyautError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
