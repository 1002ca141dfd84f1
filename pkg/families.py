# families.py
# Adversarial instance families used by the lower-bound harness.
#
# Dynamic families are lists of event sequences whose external ids are "1".."n"
# in insertion order, so members built from the same prefix share it event for
# event. Static families (Fab, Gab) are lists of forests.

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Union

from errors import InvalidParams
from forest import EventSequence, GraphEvent, RootedForest, TopologicalEvent

logger = logging.getLogger(__name__)

DYNAMIC_KINDS = ("Fn", "FnC", "In", "A2", "Deltak")
STATIC_KINDS = ("Fab", "Gab")
COUNTING_KINDS = ("Warmup", "Thm6", "Thm7", "Thm8")
ALL_KINDS = DYNAMIC_KINDS + STATIC_KINDS + COUNTING_KINDS


@dataclass(frozen=True)
class FamilySpec:
    """A family kind and its parameters.

    For Fn, FnC and In a missing k (and j) means the whole family over every
    admissible value; for Fab and Gab both a and b are required.
    """

    kind: str
    n: int
    k: Optional[int] = None
    j: Optional[int] = None
    a: Optional[int] = None
    b: Optional[int] = None
    x: Optional[int] = None

    def validate(self) -> None:
        if self.kind not in ALL_KINDS:
            raise InvalidParams(f"unknown family {self.kind!r}; expected one of {', '.join(ALL_KINDS)}")
        if self.n < 1:
            raise InvalidParams(f"n must be >= 1, got {self.n}")
        if self.kind in ("Fn", "FnC"):
            if self.n < 2:
                raise InvalidParams(f"{self.kind} needs n >= 2")
            if self.k is not None and not 1 < self.k <= self.n:
                raise InvalidParams(f"{self.kind} needs 1 < k <= n, got k={self.k}")
        elif self.kind == "In":
            if self.n < 3:
                raise InvalidParams("In needs n >= 3")
            if (self.j is None) != (self.k is None):
                raise InvalidParams("In takes both j and k, or neither")
            if self.j is not None and not (self.j >= 1 and self.k >= 1 and self.j + self.k <= self.n - 1):
                raise InvalidParams(f"In needs j, k >= 1 and j + k < n, got j={self.j} k={self.k}")
        elif self.kind in ("A2", "Deltak"):
            if self.n < 2:
                raise InvalidParams(f"{self.kind} needs n >= 2")
            if self.kind == "Deltak" and (self.k is None or self.k < 1):
                raise InvalidParams("Deltak needs a degree bound k >= 1")
        elif self.kind in STATIC_KINDS:
            if self.a is None or self.b is None or self.a < 1 or self.b < 1:
                raise InvalidParams(f"{self.kind} needs a, b >= 1")
            if self.n % (self.a * self.b):
                raise InvalidParams(f"{self.kind} needs ab | n, got a={self.a} b={self.b} n={self.n}")
            if self.kind == "Fab" and self.a * (1 + self.b) > self.n:
                raise InvalidParams(f"Fab({self.n},{self.a},{self.b}) would exceed 2n nodes")

    def params_text(self) -> str:
        params = [f"{name}={value}" for name, value in (("k", self.k), ("j", self.j), ("a", self.a), ("b", self.b), ("x", self.x)) if value is not None]
        return ",".join(params) or "all"


Member = Union[EventSequence, RootedForest]


def generate(spec: FamilySpec) -> list[Member]:
    """Build every member of the family described by `spec`."""
    spec.validate()
    if spec.kind in COUNTING_KINDS:
        raise InvalidParams(f"{spec.kind} is an arithmetic family: evaluate it with counting_oracle")
    if spec.kind == "Fn":
        ks = [spec.k] if spec.k is not None else range(2, spec.n + 1)
        members: list[Member] = [fn_sequence(spec.n, k) for k in ks]
    elif spec.kind == "FnC":
        ks = [spec.k] if spec.k is not None else range(2, spec.n + 1)
        members = [fnc_sequence(spec.n, k) for k in ks]
    elif spec.kind == "In":
        pairs = [(spec.j, spec.k)] if spec.j is not None else in_parameters(spec.n)
        members = [in_sequence(spec.n, j, k) for j, k in pairs]
    elif spec.kind == "A2":
        members = [star_sequence(spec.n, s) for s in star_subsets(spec.n)]
    elif spec.kind == "Deltak":
        members = [star_sequence(spec.n, s) for s in star_subsets(spec.n, spec.k)]
    elif spec.kind == "Fab":
        members = [fab_forest(spec.n, spec.a, spec.b)]
    else:
        members = [gab_forest(spec.n, spec.a, spec.b)]
    logger.info("family %s n=%d params=%s: %d member(s)", spec.kind, spec.n, spec.params_text(), len(members))
    return members


# --- Dynamic families ---

def _path(length: int) -> list[TopologicalEvent]:
    events = [TopologicalEvent.root("1")]
    events.extend(TopologicalEvent.insert(str(i), str(i - 1)) for i in range(2, length + 1))
    return events


def fn_sequence(n: int, k: int) -> EventSequence:
    """Path 1..k, then leaves k+1..n attached to node k-1."""
    events = _path(k)
    events.extend(TopologicalEvent.insert(str(i), str(k - 1)) for i in range(k + 1, n + 1))
    return EventSequence.of(events)


def fnc_sequence(n: int, k: int) -> EventSequence:
    """Roots 1..k, then leaves k+1..n under root k-1."""
    events = [TopologicalEvent.root(str(i)) for i in range(1, k + 1)]
    events.extend(TopologicalEvent.insert(str(i), str(k - 1)) for i in range(k + 1, n + 1))
    return EventSequence.of(events)


def in_parameters(n: int) -> list[tuple[int, int]]:
    return [(j, k) for j in range(1, n - 1) for k in range(1, n - j)]


def in_sequence(n: int, j: int, k: int) -> EventSequence:
    """Roots 1..j, a k-node path hanging from root j, and n-j-k leaves on the
    path's second-to-last node (root j itself when k = 1)."""
    events = [TopologicalEvent.root(str(i)) for i in range(1, j + 1)]
    events.extend(TopologicalEvent.insert(str(i), str(i - 1)) for i in range(j + 1, j + k + 1))
    anchor = str(j + k - 1)
    events.extend(TopologicalEvent.insert(str(i), anchor) for i in range(j + k + 1, n + 1))
    return EventSequence.of(events)


def star_subsets(n: int, max_size: Optional[int] = None) -> list[tuple[int, ...]]:
    """Nonempty subsets of path positions 1..n-1, by size then lexicographically."""
    top = n - 1 if max_size is None else min(max_size, n - 1)
    return [s for size in range(1, top + 1) for s in combinations(range(1, n), size)]


def star_sequence(n: int, subset: tuple[int, ...]) -> EventSequence:
    """Path of n-1 graph nodes, then node n joined to exactly the positions in `subset`."""
    events = [GraphEvent("1")]
    events.extend(GraphEvent(str(i), (str(i - 1),)) for i in range(2, n))
    events.append(GraphEvent(str(n), tuple(str(i) for i in subset)))
    return EventSequence.of(events)


# --- Static families ---

def fab_forest(n: int, a: int, b: int) -> RootedForest:
    """a trees, each a root with b children that each hold n/(ab) leaves."""
    FamilySpec("Fab", n, a=a, b=b).validate()
    size = n // (a * b)
    parents: list[Optional[int]] = []
    names: list[str] = []
    for c in range(1, a + 1):
        root = len(parents)
        parents.append(None)
        names.append(f"r{c}")
        for g in range(1, b + 1):
            group = len(parents)
            parents.append(root)
            names.append(f"g{c}.{g}")
            for i in range(1, size + 1):
                parents.append(group)
                names.append(f"l{c}.{g}.{i}")
    return RootedForest.from_parents(parents, names)


def gab_forest(n: int, a: int, b: int) -> RootedForest:
    """a trees, each a root with b paths of n/(ab) nodes hanging from it."""
    FamilySpec("Gab", n, a=a, b=b).validate()
    length = n // (a * b)
    parents: list[Optional[int]] = []
    names: list[str] = []
    for c in range(1, a + 1):
        root = len(parents)
        parents.append(None)
        names.append(f"r{c}")
        for p in range(1, b + 1):
            above = root
            for i in range(1, length + 1):
                parents.append(above)
                above = len(parents) - 1
                names.append(f"p{c}.{p}.{i}")
    return RootedForest.from_parents(parents, names)


def designated_nodes(spec: FamilySpec, forest: RootedForest) -> list[int]:
    """The n nodes the abstract family talks about: Fab leaves, Gab path nodes."""
    if spec.kind == "Fab":
        return [v for v in forest.nodes if forest.depth[v] == 2]
    return [v for v in forest.nodes if not forest.is_root(v)]


def divisor_grid(n: int, kind: str) -> list[FamilySpec]:
    """Every (a, b) with ab | n that yields a valid member of the static family."""
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    grid = []
    for a in divisors:
        for b in divisors:
            if (n // a) % b:
                continue
            spec = FamilySpec(kind, n, a=a, b=b)
            if kind == "Fab" and a * (1 + b) > n:
                continue
            grid.append(spec)
    return grid
