"""Automorphism groups of face lattices.

The production engine uses the fact that an automorphism of a polytope is
determined by the image of a single flag: fix a base flag, and for every
candidate image walk the flag graph, sending i-adjacent flags to i-adjacent
flags.  A cheap colour refinement of the Hasse diagram prunes candidates; it
is automorphism-invariant, so it never discards a true automorphism.
"""
from __future__ import annotations

import os
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ResourceError, ValidationError
from .lattice import Check, FaceLattice, FlagGraph, assert_valid
from .permgroup import GroupClass, PermGroup

BRUTE_FORCE_MAX_FACES = 40

FacePerm = tuple  # tuple[int, ...], image of each face id


@dataclass
class AutGroup:
    order: int
    elements: tuple[FacePerm, ...]
    base_flag: tuple[int, ...]
    candidates_tried: int = 0

    def identity(self) -> FacePerm:
        return tuple(range(len(self.elements[0])))

    def __contains__(self, perm) -> bool:
        return tuple(perm) in set(self.elements)

    def element_order(self, perm: FacePerm) -> int:
        return perm_order(perm)


def compose(a: FacePerm, b: FacePerm) -> FacePerm:
    """a after b."""
    return tuple(a[x] for x in b)


def inverse(a: FacePerm) -> FacePerm:
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def perm_order(a: FacePerm) -> int:
    ident = tuple(range(len(a)))
    p, k = a, 1
    while p != ident:
        p, k = compose(a, p), k + 1
    return k


def is_automorphism(lat: FaceLattice, perm: Sequence[int]) -> bool:
    n = len(lat.faces)
    if len(perm) != n or sorted(perm) != list(range(n)):
        return False
    ranks, down = lat.ranks, lat.down
    for f in range(n):
        g = perm[f]
        if ranks[g] != ranks[f]:
            return False
        if sorted(perm[c] for c in down[f]) != list(down[g]):
            return False
    return True


def refine_colours(lat: FaceLattice, rounds: int = 2) -> list[int]:
    """Automorphism-invariant face colours (rank, cover counts, refined by neighbours)."""
    col = [hash((lat.ranks[f], len(lat.down[f]), len(lat.up[f]))) for f in range(len(lat.faces))]
    for _ in range(rounds):
        col = [hash((col[f],
                     tuple(sorted(col[c] for c in lat.down[f])),
                     tuple(sorted(col[u] for u in lat.up[f])))) for f in range(len(lat.faces))]
    # compress to small ints, deterministically
    table = {c: i for i, c in enumerate(sorted(set(col)))}
    return [table[c] for c in col]


def _extend(graph: FlagGraph, colours: Sequence[int], base: int, cand: int) -> FacePerm | None:
    lat = graph.lattice
    flags, adj = graph.flags, graph.adjacent
    nflags = len(flags)
    nfaces = len(lat.faces)
    d = lat.rank
    img = [-1] * nflags
    used = bytearray(nflags)
    face_img = [-1] * nfaces
    face_img[lat.least] = lat.least
    face_img[lat.greatest] = lat.greatest
    img[base] = cand
    used[cand] = 1
    queue = deque([base])
    while queue:
        x = queue.popleft()
        y = img[x]
        fx, fy = flags[x], flags[y]
        for r in range(d):
            a, t = fx[r], fy[r]
            cur = face_img[a]
            if cur == -1:
                if colours[a] != colours[t]:
                    return None
                face_img[a] = t
            elif cur != t:
                return None
        ax, ay = adj[x], adj[y]
        for i in range(d):
            p, q = ax[i], ay[i]
            ip = img[p]
            if ip == -1:
                if used[q]:
                    return None
                img[p] = q
                used[q] = 1
                queue.append(p)
            elif ip != q:
                return None
    if -1 in face_img or len(set(face_img)) != nfaces:
        return None
    perm = tuple(face_img)
    return perm if is_automorphism(lat, perm) else None


# Worker state for the process pool (fork start method shares it copy-on-write).
_WORK: dict = {}


def _work_chunk(cands):
    g, col, base = _WORK["graph"], _WORK["colours"], _WORK["base"]
    return [p for p in (_extend(g, col, base, c) for c in cands) if p is not None]


def automorphisms(lat: FaceLattice, *, use_filter: bool = True, jobs: int = 1,
                  validate_first: bool = True, max_flags: int | None = None) -> AutGroup:
    if validate_first:
        assert_valid(lat)
    graph = FlagGraph.build(lat)
    if max_flags is not None and len(graph.flags) > max_flags:
        raise ResourceError(f"{len(graph.flags)} flags exceeds the cap of {max_flags}")
    if use_filter:
        colours = refine_colours(lat)
    else:
        colours = list(lat.ranks)
    sigs = [tuple(colours[f] for f in fl) for fl in graph.flags]
    freq = Counter(sigs)
    base = min(range(len(sigs)), key=lambda i: (freq[sigs[i]], i))
    cands = [j for j, s in enumerate(sigs) if s == sigs[base]]
    if jobs > 1 and len(cands) > 4 * jobs and hasattr(os, "fork"):
        import multiprocessing as mp
        _WORK.update(graph=graph, colours=colours, base=base)
        chunks = [cands[i::jobs] for i in range(jobs)]
        try:
            with ProcessPoolExecutor(jobs, mp_context=mp.get_context("fork")) as pool:
                found = [p for part in pool.map(_work_chunk, chunks) for p in part]
        finally:
            _WORK.clear()
    else:
        found = [p for p in (_extend(graph, colours, base, c) for c in cands) if p is not None]
    elements = tuple(sorted(found))
    return AutGroup(len(elements), elements, graph.flags[base], len(cands))


def brute_force_automorphisms(lat: FaceLattice, max_faces: int = BRUTE_FORCE_MAX_FACES) -> AutGroup:
    """Backtracking over rank-preserving face bijections that respect covers."""
    n = len(lat.faces)
    if n > max_faces:
        raise ResourceError(f"brute force limited to {max_faces} faces, lattice has {n}")
    assert_valid(lat)
    order = sorted(range(n), key=lambda f: (lat.ranks[f], f))
    ranks, down, up = lat.ranks, lat.down, lat.up
    by_rank = lat.by_rank
    img = [-1] * n
    used = [False] * n
    found: list[FacePerm] = []

    def ok(f, g):
        if len(down[f]) != len(down[g]) or len(up[f]) != len(up[g]):
            return False
        dg = set(down[g])
        for c in down[f]:
            if img[c] == -1 or img[c] not in dg:
                return False
        return True

    def rec(k):
        if k == n:
            found.append(tuple(img))
            return
        f = order[k]
        for g in by_rank[ranks[f]]:
            if not used[g] and ok(f, g):
                img[f], used[g] = g, True
                rec(k + 1)
                img[f], used[g] = -1, False

    rec(0)
    elements = tuple(sorted(found))
    return AutGroup(len(elements), elements, ())


def fixes_a_flag(lat: FaceLattice, perm: FacePerm, graph: FlagGraph | None = None) -> bool:
    graph = graph or FlagGraph.build(lat)
    return any(all(perm[f] == f for f in fl) for fl in graph.flags)


# -- certification --------------------------------------------------------------

@dataclass
class VerificationResult:
    aut_order: int
    certified: bool
    checks: list[Check] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"aut_order": self.aut_order, "certified": self.certified,
                "checks": [c.to_json() for c in self.checks]}


def verify_construction(lat: FaceLattice, group: PermGroup,
                        embedding: Sequence[FacePerm] | None = None,
                        group_class: GroupClass | None = None, *, jobs: int = 1,
                        aut: AutGroup | None = None) -> VerificationResult:
    """Certify Aut(lat) = group.

    With an embedding (face permutation per group element, in element order):
    every image is an automorphism, the embedding is an injective homomorphism,
    and |Aut| = |group|.  Without one: |Aut| = |group| plus an abstract
    isomorphism witness for the cyclic and dihedral cases.
    """
    aut = aut or automorphisms(lat, jobs=jobs)
    checks: list[Check] = []
    n = group.order
    if embedding is not None:
        bad = next((i for i, p in enumerate(embedding) if not is_automorphism(lat, p)), None)
        checks.append(Check("embedding_automorphisms", bad is None and len(embedding) == n,
                            None if bad is None else {"element": str(group.elements[bad])}))
        distinct = len(set(map(tuple, embedding)))
        checks.append(Check("embedding_injective", distinct == n,
                            None if distinct == n else {"distinct_images": distinct}))
        hom_bad = None
        for gi, g in enumerate(group.generators):
            gidx = group.index[g]
            for hidx in range(n):
                prod = group.multiply(gidx, hidx)
                if tuple(embedding[prod]) != compose(embedding[gidx], embedding[hidx]):
                    hom_bad = {"generator": gi, "element": hidx}
                    break
            if hom_bad:
                break
        checks.append(Check("embedding_homomorphism", hom_bad is None, hom_bad))
        missing = [i for i, p in enumerate(embedding) if tuple(p) not in aut]
        checks.append(Check("embedding_in_aut", not missing,
                            None if not missing else {"elements": missing[:5]}))
    checks.append(Check("aut_order_equals_group_order", aut.order == n,
                        None if aut.order == n else {"aut_order": aut.order, "group_order": n}))
    if embedding is None and group_class is not None:
        checks.append(_abstract_witness(aut, group_class))
    certified = all(c.passed for c in checks)
    return VerificationResult(aut.order, certified, checks)


def _abstract_witness(aut: AutGroup, gc: GroupClass) -> Check:
    if gc.tag in ("trivial",):
        return Check("isomorphism_witness", aut.order == 1, {"kind": "trivial"})
    if gc.tag == "cyclic":
        k = gc.k
        for p in aut.elements:
            if perm_order(p) == k:
                return Check("isomorphism_witness", aut.order == k,
                             {"kind": "cyclic", "generator_order": k})
        return Check("isomorphism_witness", False, {"kind": "cyclic", "reason": "no element of order k"})
    if gc.tag == "dihedral":
        k = gc.k
        orders = {p: perm_order(p) for p in aut.elements}
        for r in aut.elements:
            if orders[r] != k:
                continue
            powers = {r}
            q = r
            for _ in range(k):
                q = compose(r, q)
                powers.add(q)
            r_inv = inverse(r)
            for s in aut.elements:
                if orders[s] == 2 and s not in powers and compose(s, compose(r, s)) == r_inv:
                    return Check("isomorphism_witness", aut.order == 2 * k,
                                 {"kind": "dihedral", "k": k})
        return Check("isomorphism_witness", False, {"kind": "dihedral", "reason": "no (r, s) pair"})
    return Check("isomorphism_witness", False, {"reason": "no abstract test for general groups"})


def aut_to_json(aut: AutGroup, with_elements: bool = False) -> dict:
    out = {"aut_order": aut.order, "base_flag": list(aut.base_flag)}
    if with_elements:
        out["elements"] = [list(p) for p in aut.elements]
    return out
