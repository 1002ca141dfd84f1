# forest.py
# Modello di foresta radicata, flussi di eventi topologici e oracolo di verità.
# Ogni schema di etichettatura del progetto viene confrontato con `oracle`, che
# risponde a ciascuna query percorrendo direttamente la foresta; `query_table`
# precalcola le stesse risposte per tutte le coppie di nodi di una foresta.

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, partial
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from errors import CrossTree, InvalidEvent, InvalidParams, MalformedInput, UnsupportedQuery

logger = logging.getLogger(__name__)

NodeId = int

# Probability that a random insertion starts a new tree.
NEW_ROOT_PROBABILITY = 1 / 8


class QueryKind(Enum):
    ADJACENCY = "Adjacency"
    SIBLING = "Sibling"
    CONNECTIVITY = "Connectivity"
    ANCESTRY = "Ancestry"
    NCA = "NCA"
    DISTANCE = "Distance"
    ROUTING = "Routing"

    @classmethod
    def parse(cls, name: str) -> "QueryKind":
        for kind in cls:
            if kind.value.lower() == name.strip().lower():
                return kind
        raise MalformedInput(f"unknown query kind {name!r}")

    @classmethod
    def parse_csv(cls, text: str) -> frozenset["QueryKind"]:
        return frozenset(cls.parse(part) for part in text.split(",") if part.strip())


# Queries only defined for two nodes of the same tree.
WITHIN_TREE_QUERIES = frozenset({QueryKind.NCA, QueryKind.DISTANCE, QueryKind.ROUTING})


class EventKind(Enum):
    INSERT_ROOT = "root"
    INSERT_CHILD = "insert"
    REMOVE_LEAF = "remove"


@dataclass(frozen=True, slots=True)
class TopologicalEvent:
    kind: EventKind
    external_id: str
    parent_external_id: Optional[str] = None

    @classmethod
    def root(cls, external_id: str) -> "TopologicalEvent":
        return cls(EventKind.INSERT_ROOT, external_id)

    @classmethod
    def insert(cls, external_id: str, parent_external_id: str) -> "TopologicalEvent":
        return cls(EventKind.INSERT_CHILD, external_id, parent_external_id)

    @classmethod
    def remove(cls, external_id: str) -> "TopologicalEvent":
        return cls(EventKind.REMOVE_LEAF, external_id)

    def to_line(self) -> str:
        if self.kind is EventKind.INSERT_CHILD:
            return f"insert {self.external_id} {self.parent_external_id}"
        return f"{self.kind.value} {self.external_id}"


@dataclass(frozen=True, slots=True)
class GraphEvent:
    """Insertion of a graph node together with its edges to earlier nodes."""

    external_id: str
    neighbors: tuple[str, ...] = ()

    def to_line(self) -> str:
        return " ".join(("vertex", self.external_id) + self.neighbors)


Event = Union[TopologicalEvent, GraphEvent]


@dataclass(frozen=True)
class EventSequence:
    events: tuple[Event, ...]
    max_n: int

    @classmethod
    def of(cls, events: Iterable[Event]) -> "EventSequence":
        events = tuple(events)
        remove = EventKind.REMOVE_LEAF
        alive = peak = 0
        for event in events:
            if isinstance(event, TopologicalEvent) and event.kind is remove:
                alive -= 1
            else:
                alive += 1
            peak = max(peak, alive)
        return cls(events, peak)

    @property
    def insertions(self) -> int:
        return sum(
            1 for e in self.events
            if not (isinstance(e, TopologicalEvent) and e.kind is EventKind.REMOVE_LEAF)
        )

    def __len__(self) -> int:
        return len(self.events)


# --- Modello della foresta ---

@dataclass(frozen=True)
class RootedForest:
    """Immutable rooted forest over internal ids.

    Internal ids are assigned in insertion order and never reused, so after
    removals they are not necessarily contiguous. `children` lists follow
    insertion order and `roots` lists trees by the insertion of their root.
    """

    parent: Mapping[NodeId, Optional[NodeId]]
    children: Mapping[NodeId, tuple[NodeId, ...]]
    roots: tuple[NodeId, ...]
    names: Mapping[NodeId, str] = field(default_factory=dict)

    @classmethod
    def from_parents(cls, parents: Sequence[Optional[int]], names: Sequence[str] | None = None) -> "RootedForest":
        """Build a forest whose node i has parent parents[i] (None for a root).

        Parents must precede their children, i.e. the list is an insertion order.
        """
        parent: dict[int, Optional[int]] = {}
        children: dict[int, list[int]] = {}
        roots: list[int] = []
        for node, p in enumerate(parents):
            if p is not None and p not in parent:
                raise InvalidEvent(f"node {node} refers to parent {p} before it exists")
            parent[node] = p
            children[node] = []
            if p is None:
                roots.append(node)
            else:
                children[p].append(node)
        labels = {i: (names[i] if names else str(i)) for i in parent}
        return cls(parent, {k: tuple(v) for k, v in children.items()}, tuple(roots), labels)

    @property
    def n(self) -> int:
        return len(self.parent)

    @cached_property
    def nodes(self) -> tuple[NodeId, ...]:
        return tuple(sorted(self.parent))

    @cached_property
    def depth(self) -> dict[NodeId, int]:
        depth: dict[NodeId, int] = {}
        for node in self.preorder:
            p = self.parent[node]
            depth[node] = 0 if p is None else depth[p] + 1
        return depth

    @cached_property
    def root_of(self) -> dict[NodeId, NodeId]:
        root_of: dict[NodeId, NodeId] = {}
        for node in self.preorder:
            p = self.parent[node]
            root_of[node] = node if p is None else root_of[p]
        return root_of

    @cached_property
    def preorder(self) -> tuple[NodeId, ...]:
        order: list[NodeId] = []
        for root in self.roots:
            stack = [root]
            while stack:
                node = stack.pop()
                order.append(node)
                stack.extend(reversed(self.children[node]))
        return tuple(order)

    @cached_property
    def ancestors(self) -> dict[NodeId, frozenset[NodeId]]:
        """Node -> the nodes on its root path, itself included."""
        ancestors: dict[NodeId, frozenset[NodeId]] = {}
        for node in self.preorder:
            p = self.parent[node]
            ancestors[node] = frozenset((node,)) if p is None else ancestors[p] | {node}
        return ancestors

    @cached_property
    def trees(self) -> dict[NodeId, tuple[NodeId, ...]]:
        """Root -> nodes of its tree in insertion (internal id) order."""
        members: dict[NodeId, list[NodeId]] = {root: [] for root in self.roots}
        for node in self.nodes:
            members[self.root_of[node]].append(node)
        return {root: tuple(nodes) for root, nodes in members.items()}

    def is_root(self, node: NodeId) -> bool:
        return self.parent[node] is None

    def is_leaf(self, node: NodeId) -> bool:
        return not self.children[node]

    def port(self, node: NodeId, child: NodeId) -> int:
        """Designer port of `child` at `node`: children count from 1."""
        return self.children[node].index(child) + 1

    def subtree_forest(self, root: NodeId) -> "RootedForest":
        """The tree rooted at `root` as a forest of its own, ids kept."""
        members = self.trees[root]
        return RootedForest(
            {v: self.parent[v] for v in members},
            {v: self.children[v] for v in members},
            (root,),
            {v: self.names.get(v, str(v)) for v in members},
        )

    def name(self, node: NodeId) -> str:
        return self.names.get(node, str(node))


class ForestBuilder:
    """Mutable forest state driven by topological events.

    `build_from_events` and the dynamic encoders share it, so the two always
    agree on what counts as a valid event.
    """

    def __init__(self):
        self.parent: dict[NodeId, Optional[NodeId]] = {}
        self.children: dict[NodeId, list[NodeId]] = {}
        self.roots: list[NodeId] = []
        self.id_map: dict[str, NodeId] = {}
        self.retired: set[str] = set()
        self.next_id = 0

    def _fresh(self, external_id: str) -> NodeId:
        if external_id in self.id_map or external_id in self.retired:
            raise InvalidEvent(f"node {external_id!r} was already inserted")
        node = self.next_id
        self.next_id += 1
        self.id_map[external_id] = node
        self.children[node] = []
        return node

    def lookup(self, external_id: str) -> NodeId:
        if external_id not in self.id_map:
            raise InvalidEvent(f"unknown or removed node {external_id!r}")
        return self.id_map[external_id]

    def apply(self, event: TopologicalEvent) -> Optional[NodeId]:
        """Apply one event; return the new internal id (None for removals)."""
        if event.kind is EventKind.INSERT_ROOT:
            node = self._fresh(event.external_id)
            self.parent[node] = None
            self.roots.append(node)
            return node
        if event.kind is EventKind.INSERT_CHILD:
            if event.parent_external_id is None:
                raise InvalidEvent(f"insert of {event.external_id!r} has no parent")
            p = self.lookup(event.parent_external_id)
            node = self._fresh(event.external_id)
            self.parent[node] = p
            self.children[p].append(node)
            return node
        node = self.lookup(event.external_id)
        if self.parent[node] is None:
            raise InvalidEvent(f"cannot remove root {event.external_id!r}: the root may never be deleted")
        if self.children[node]:
            raise InvalidEvent(f"cannot remove {event.external_id!r}: not a leaf")
        self.children[self.parent[node]].remove(node)
        del self.parent[node]
        del self.children[node]
        del self.id_map[event.external_id]
        self.retired.add(event.external_id)
        return None

    def freeze(self) -> RootedForest:
        names = {node: ext for ext, node in self.id_map.items()}
        return RootedForest(
            dict(self.parent),
            {k: tuple(v) for k, v in self.children.items()},
            tuple(self.roots),
            names,
        )


def build_from_events(seq: EventSequence | Iterable[TopologicalEvent]) -> tuple[RootedForest, dict[str, NodeId]]:
    """Replay a topological event sequence.

    Returns:
        The final forest and the external -> internal id map of the living nodes.
    """
    events = seq.events if isinstance(seq, EventSequence) else seq
    builder = ForestBuilder()
    for event in events:
        if not isinstance(event, TopologicalEvent):
            raise InvalidEvent(f"graph event {event!r} in a forest sequence")
        builder.apply(event)
    return builder.freeze(), dict(builder.id_map)


# --- Oracolo di verità ---

def _nca(forest: RootedForest, u: NodeId, v: NodeId) -> NodeId:
    if forest.root_of[u] != forest.root_of[v]:
        raise CrossTree(f"nodes {forest.name(u)} and {forest.name(v)} lie in different trees")
    depth = forest.depth
    while depth[u] > depth[v]:
        u = forest.parent[u]
    while depth[v] > depth[u]:
        v = forest.parent[v]
    while u != v:
        u, v = forest.parent[u], forest.parent[v]
    return u


def is_ancestor(forest: RootedForest, u: NodeId, v: NodeId) -> bool:
    """True when u lies on the path from v's root to v (u = v included)."""
    while v is not None:
        if v == u:
            return True
        v = forest.parent[v]
    return False


def oracle(forest: RootedForest, q: QueryKind, u: NodeId, v: NodeId):
    """Exact answer of query q on (u, v) by walking the forest.

    Ancestry(u, v) asks whether u is an ancestor of v (reflexive). Routing(u, v)
    is the port at u on the path to v: 0 toward the parent, children numbered
    from 1; it is None when u = v. NCA returns a node id.
    """
    if u not in forest.parent or v not in forest.parent:
        raise InvalidEvent(f"query on a node that is not in the forest: {u}, {v}")
    if q is QueryKind.ADJACENCY:
        return forest.parent[u] == v or forest.parent[v] == u
    if q is QueryKind.SIBLING:
        if u == v:
            return True
        pu = forest.parent[u]
        return pu is not None and pu == forest.parent[v]
    if q is QueryKind.CONNECTIVITY:
        return forest.root_of[u] == forest.root_of[v]
    if q is QueryKind.ANCESTRY:
        return forest.root_of[u] == forest.root_of[v] and is_ancestor(forest, u, v)
    if q is QueryKind.NCA:
        return _nca(forest, u, v)
    if q is QueryKind.DISTANCE:
        w = _nca(forest, u, v)
        return forest.depth[u] + forest.depth[v] - 2 * forest.depth[w]
    if q is QueryKind.ROUTING:
        w = _nca(forest, u, v)
        if u == v:
            return None
        if w != u:
            return 0
        # u is a proper ancestor of v: step down toward v.
        step = v
        while forest.parent[step] != u:
            step = forest.parent[step]
        return forest.port(u, step)
    raise UnsupportedQuery(f"unknown query {q}")


def query_table(forest: RootedForest, q: QueryKind) -> Callable[[NodeId, NodeId], object]:
    """Pair answers of q from maps computed once per forest.

    Same answers as `oracle`, without its checks, for loops over every pair of
    a forest. Within-tree queries keep walking the forest through `oracle`.
    """
    parent, root_of = forest.parent, forest.root_of
    if q is QueryKind.ADJACENCY:
        return lambda u, v: parent[u] == v or parent[v] == u
    if q is QueryKind.SIBLING:
        return lambda u, v: u == v or (parent[u] is not None and parent[u] == parent[v])
    if q is QueryKind.CONNECTIVITY:
        return lambda u, v: root_of[u] == root_of[v]
    if q is QueryKind.ANCESTRY:
        ancestors = forest.ancestors
        return lambda u, v: u in ancestors[v]
    return partial(oracle, forest, q)


# --- Flussi casuali ---

def random_forest(n: int, seed: int, removal_rate: float = 0.0) -> EventSequence:
    """Deterministic random event sequence with n insertions.

    Each new node becomes a root with probability 1/8, otherwise it attaches to
    a uniformly chosen living node. With `removal_rate` > 0, a removal of a
    random non-root leaf is interleaved before an insertion with that probability.
    """
    if n < 1:
        raise InvalidParams(f"random_forest needs n >= 1, got {n}")
    rng = random.Random(seed)
    root, insert = EventKind.INSERT_ROOT, EventKind.INSERT_CHILD
    events: list[TopologicalEvent] = [TopologicalEvent.root("v0")]
    alive = ["v0"]
    parent_of = {"v0": None}
    child_count = {"v0": 0}
    for i in range(1, n):
        if removal_rate and rng.random() < removal_rate:
            leaves = [x for x in alive if parent_of[x] is not None and child_count[x] == 0]
            if leaves:
                gone = rng.choice(leaves)
                events.append(TopologicalEvent.remove(gone))
                alive.remove(gone)
                child_count[parent_of[gone]] -= 1
        name = f"v{i}"
        if rng.random() < NEW_ROOT_PROBABILITY:
            events.append(TopologicalEvent(root, name))
            parent_of[name] = None
        else:
            p = rng.choice(alive)
            events.append(TopologicalEvent(insert, name, p))
            parent_of[name] = p
            child_count[p] += 1
        child_count[name] = 0
        alive.append(name)
    return EventSequence.of(events)


def random_bounded_degree_graph(n: int, k: int, seed: int) -> EventSequence:
    """n graph insertions, each joined to up to k earlier nodes that still have spare degree."""
    rng = random.Random(seed)
    degree: dict[str, int] = {}
    events: list[GraphEvent] = []
    for i in range(n):
        name = f"v{i}"
        spare = [x for x in degree if degree[x] < k]
        neighbors = rng.sample(spare, rng.randint(0, min(k, len(spare))))
        for x in neighbors:
            degree[x] += 1
        degree[name] = len(neighbors)
        events.append(GraphEvent(name, tuple(neighbors)))
    return EventSequence.of(events)


def graph_adjacency(seq: EventSequence) -> dict[str, set[str]]:
    """Neighbor sets of a graph event stream."""
    adjacent: dict[str, set[str]] = {}
    for event in seq.events:
        adjacent[event.external_id] = set(event.neighbors)
        for x in event.neighbors:
            adjacent[x].add(event.external_id)
    return adjacent


# --- Formati di testo ---

def format_forest(forest: RootedForest) -> str:
    lines = [f"forest n={forest.n}"]
    for node in forest.nodes:
        p = forest.parent[node]
        lines.append(f"{forest.name(node)} {'-' if p is None else forest.name(p)}")
    return "\n".join(lines) + "\n"


def parse_forest(text: str) -> RootedForest:
    """Parse the forest text format; parents must appear before their children."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("forest"):
        raise MalformedInput("forest file must start with 'forest n=<N>'")
    try:
        declared = int(lines[0].split("n=", 1)[1])
    except (IndexError, ValueError) as e:
        raise MalformedInput(f"bad forest header {lines[0]!r}") from e
    index: dict[str, int] = {}
    parents: list[Optional[int]] = []
    names: list[str] = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise MalformedInput(f"forest line needs 2 tokens: {line!r}")
        ext, p = parts
        if ext in index:
            raise MalformedInput(f"duplicate node {ext!r}")
        if p != "-" and p not in index:
            raise MalformedInput(f"parent {p!r} of {ext!r} not defined earlier")
        index[ext] = len(names)
        names.append(ext)
        parents.append(None if p == "-" else index[p])
    if declared != len(names):
        raise MalformedInput(f"header says n={declared} but {len(names)} node(s) follow")
    return RootedForest.from_parents(parents, names)


def format_events(seq: EventSequence) -> str:
    return "events\n" + "".join(event.to_line() + "\n" for event in seq.events)


def parse_events(text: str) -> EventSequence:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != "events":
        raise MalformedInput("event file must start with 'events'")
    events: list[Event] = []
    for line in lines[1:]:
        parts = line.split()
        kind = parts[0]
        if kind == "root" and len(parts) == 2:
            events.append(TopologicalEvent.root(parts[1]))
        elif kind == "insert" and len(parts) == 3:
            events.append(TopologicalEvent.insert(parts[1], parts[2]))
        elif kind == "remove" and len(parts) == 2:
            events.append(TopologicalEvent.remove(parts[1]))
        elif kind == "vertex" and len(parts) >= 2:
            events.append(GraphEvent(parts[1], tuple(parts[2:])))
        else:
            raise MalformedInput(f"bad event line {line!r}")
    return EventSequence.of(events)
