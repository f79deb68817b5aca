"""Finite groups as permutation groups on {0, ..., degree-1}.

Cycle notation on input and output is 1-based, as in GAP or Sage; internally
every permutation is a 0-based image tuple.
"""
from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from math import factorial
from typing import Iterable, Sequence

from .errors import ParseError, ResourceError, ValidationError

DEFAULT_ELEMENT_CAP = 10080


@dataclass(frozen=True, order=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        object.__setattr__(self, "images", images)
        if sorted(images) != list(range(len(images))):
            raise ValidationError(f"not a bijection on 0..{len(images) - 1}: {images}")

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(degree)))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (self * other)(i) = self(other(i)): apply ``other`` first.
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def order(self) -> int:
        p, k = self, 1
        while not p.is_identity():
            p, k = p * self, k + 1
        return k

    def fixed_points(self) -> list[int]:
        return [i for i, j in enumerate(self.images) if i == j]

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cyc, i = [], start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                i = self.images[i]
            out.append(tuple(cyc))
        return out

    def to_cycle_string(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(str(i + 1) for i in c) + ")" for c in cycles)

    def __str__(self):
        return self.to_cycle_string()


_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def parse_permutation(text: str, degree: int) -> Permutation:
    """Parse disjoint 1-based cycles such as ``"(1 2)(3 4)"``."""
    images = list(range(degree))
    seen: set[int] = set()
    current: list[int] | None = None
    pos = 0
    text = text.strip()
    if not text:
        raise ParseError("empty permutation string")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or not m.group(1):
            break
        tok, start = m.group(1), m.start(1)
        pos = m.end()
        if tok == "(":
            if current is not None:
                raise ParseError(f"nested '(' at position {start} in {text!r}")
            current = []
        elif tok == ")":
            if current is None:
                raise ParseError(f"unbalanced ')' at position {start} in {text!r}")
            for a, b in zip(current, current[1:] + current[:1]):
                images[a] = b
            current = None
        else:
            if current is None:
                raise ParseError(f"point {tok!r} outside a cycle at position {start} in {text!r}")
            if not tok.isdigit():
                raise ParseError(f"bad token {tok!r} at position {start} in {text!r}")
            point = int(tok)
            if point < 1 or point > degree:
                raise ParseError(
                    f"point {tok!r} at position {start} outside 1..{degree} in {text!r}")
            if point - 1 in seen:
                raise ParseError(f"repeated point {tok!r} at position {start} in {text!r}")
            seen.add(point - 1)
            current.append(point - 1)
    if current is not None:
        raise ParseError(f"unterminated cycle in {text!r}")
    return Permutation(tuple(images))


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: tuple[Permutation, ...]
    cap: int = field(default=DEFAULT_ELEMENT_CAP, compare=False)

    def __post_init__(self):
        if self.degree < 1:
            raise ValidationError("degree must be positive")
        for g in self.generators:
            if g.degree != self.degree:
                raise ValidationError(f"generator {g} has degree {g.degree}, expected {self.degree}")

    @cached_property
    def elements(self) -> tuple[Permutation, ...]:
        """Breadth-first closure; the identity comes first."""
        ident = Permutation.identity(self.degree)
        out = [ident]
        seen = {ident}
        queue = deque([ident])
        while queue:
            x = queue.popleft()
            for g in self.generators:
                y = g * x
                if y not in seen:
                    if len(out) >= self.cap:
                        raise ResourceError(
                            f"group closure exceeds the element cap ({self.cap})")
                    seen.add(y)
                    out.append(y)
                    queue.append(y)
        return tuple(out)

    @cached_property
    def index(self) -> dict[Permutation, int]:
        return {g: i for i, g in enumerate(self.elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    def multiply(self, i: int, j: int) -> int:
        return self.index[self.elements[i] * self.elements[j]]

    def __len__(self):
        return self.order

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, p):
        return p in self.index


def closure(generators: Sequence[Permutation], cap: int = DEFAULT_ELEMENT_CAP,
            degree: int | None = None) -> PermGroup:
    gens = tuple(generators)
    if degree is None:
        if not gens:
            raise ValidationError("need at least one generator or an explicit degree")
        degree = gens[0].degree
    if not gens:
        gens = (Permutation.identity(degree),)
    group = PermGroup(degree, gens, cap)
    group.elements  # materialize now so cap violations surface here
    assert factorial(degree) % group.order == 0
    return group


@dataclass(frozen=True)
class GroupClass:
    tag: str  # trivial | cyclic | dihedral | general
    k: int | None = None
    witness: tuple = ()

    def __str__(self):
        return self.tag if self.k is None else f"{self.tag}({self.k})"


def _dihedral_pair(elements: Sequence[Permutation], k: int):
    orders = {g: g.order() for g in elements}
    for r in elements:
        if orders[r] != k:
            continue
        powers = {r}
        p = r
        for _ in range(k):
            p = p * r
            powers.add(p)
        r_inv = r.inverse()
        for s in elements:
            if orders[s] == 2 and s not in powers and s * r * s == r_inv:
                return r, s
    return None


def classify(group: PermGroup) -> GroupClass:
    n = group.order
    if n == 1:
        return GroupClass("trivial", 1, (group.elements[0],))
    for g in group.elements:
        if g.order() == n:
            return GroupClass("cyclic", n, (g,))
    if n % 2 == 0 and n >= 4:
        pair = _dihedral_pair(group.elements, n // 2)
        if pair is not None:
            return GroupClass("dihedral", n // 2, pair)
    return GroupClass("general")


def regular_embedding(table: Sequence[Sequence[int]]) -> PermGroup:
    """Left-regular permutation representation of a group given by its Cayley table."""
    g = len(table)
    if g == 0:
        raise ValidationError("empty multiplication table")
    for i, row in enumerate(table):
        if len(row) != g:
            raise ValidationError(f"row {i} has length {len(row)}, expected {g}")
        if sorted(row) != list(range(g)):
            raise ValidationError(f"row {i} is not a permutation of 0..{g - 1} (not a Latin square)")
    for j in range(g):
        col = [table[i][j] for i in range(g)]
        if sorted(col) != list(range(g)):
            raise ValidationError(f"column {j} is not a permutation (not a Latin square)")
    for i in range(g):
        if table[0][i] != i or table[i][0] != i:
            raise ValidationError(f"index 0 is not an identity: cell ({0},{i}) or ({i},{0})")
    for a in range(g):
        for b in range(g):
            ab = table[a][b]
            for c in range(g):
                if table[ab][c] != table[a][table[b][c]]:
                    raise ValidationError(f"not associative at (a, b, c) = ({a}, {b}, {c})")
    gens = [Permutation(tuple(table[a][h] for h in range(g))) for a in range(g)]
    group = closure(gens[1:] or gens, degree=g)
    assert group.order == g
    return group


def load_group(data: dict | str, cap: int = DEFAULT_ELEMENT_CAP) -> PermGroup:
    """Group JSON: ``{"degree": n, "generators": [...]}`` or ``{"table": [[...]]}``."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"group file is not JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("group JSON must be an object")
    has_gens, has_table = "generators" in data, "table" in data
    if has_gens == has_table:
        raise ValidationError('exactly one of "generators" / "table" must be present')
    if has_table:
        return regular_embedding(data["table"])
    degree = data.get("degree")
    if not isinstance(degree, int) or degree < 1:
        raise ValidationError('"degree" must be a positive integer')
    gens = [parse_permutation(s, degree) for s in data["generators"]]
    return closure(gens, cap=cap, degree=degree)


def group_to_json(group: PermGroup) -> dict:
    return {"degree": group.degree,
            "generators": [g.to_cycle_string() for g in group.generators]}


def cyclic_group(k: int) -> PermGroup:
    if k == 1:
        return closure([], degree=1)
    return closure([Permutation(tuple(list(range(1, k)) + [0]))])


def dihedral_group(k: int) -> PermGroup:
    """D_k acting on the k vertices of a k-gon (k >= 3)."""
    r = Permutation(tuple((i + 1) % k for i in range(k)))
    s = Permutation(tuple((-i) % k for i in range(k)))
    return closure([r, s])


def from_cycles(degree: int, *cycle_strings: str, cap: int = DEFAULT_ELEMENT_CAP) -> PermGroup:
    return closure([parse_permutation(s, degree) for s in cycle_strings], cap=cap, degree=degree)


def is_closed(group: PermGroup, elements: Iterable[Permutation] | None = None) -> bool:
    elems = list(elements) if elements is not None else list(group.elements)
    s = set(elems)
    return all(a * b in s for a in elems for b in elems) and all(a.inverse() in s for a in elems)
