# dynamic_schemes.py
# Online encoders: labels are assigned once, when a node is inserted, and never
# change afterwards. Field widths grow with the number of insertions t so far
# (w = max(1, ⌈log₂ t⌉)) and every field of one label has the same width, which
# lets the decoder recover w as bit_len / field_count.
#
# The second half holds naive reference labelings for NCA, routing and distance
# plus the adapters that answer ancestry through them.

from __future__ import annotations

import logging
import re
from typing import Callable, Iterable, Iterator, Optional

from bitlabel import EMPTY, Label, LabelReader, concat, field_width, pack_fields, put_uint, split_fields
from errors import ComponentMerge, CrossTree, DegreeExceeded, InvalidEvent, InvalidParams, UnsupportedQuery
from forest import (
    Event,
    EventKind,
    EventSequence,
    ForestBuilder,
    GraphEvent,
    NodeId,
    QueryKind,
    RootedForest,
    TopologicalEvent,
)
from static_schemes import pair_decode

logger = logging.getLogger(__name__)


class DynamicEncoder:
    """Base class: replays events through a ForestBuilder and freezes one label per insertion."""

    name = "dyn"
    field_count = 2
    queries: frozenset[QueryKind] = frozenset()

    def __init__(self):
        self.builder = ForestBuilder()
        self.labels: dict[NodeId, Label] = {}
        self.inserted = 0

    @property
    def width(self) -> int:
        return max(1, (self.inserted - 1).bit_length())

    def apply(self, event: Event) -> Optional[Label]:
        """Apply one event; return the label of the inserted node (None for removals)."""
        if isinstance(event, GraphEvent):
            event = self._as_tree_event(event)
        node = self.builder.apply(event)
        if node is None:
            self._on_remove(event)
            return None
        self.inserted += 1
        # Ids stay below the insertion count, so every field fits the current width.
        width = self.width
        packed = 0
        for value in self._fields(node):
            packed = (packed << width) | value
        label = Label(width * self.field_count, packed)
        self.labels[node] = label
        return label

    def _as_tree_event(self, event: GraphEvent) -> TopologicalEvent:
        raise InvalidEvent(f"{self.name} labels forests; got graph event for {event.external_id!r}")

    def _on_remove(self, event: TopologicalEvent) -> None:
        pass

    def _fields(self, node: NodeId) -> tuple[int, ...]:
        raise NotImplementedError

    def label_of(self, external_id: str) -> Label:
        return self.labels[self.builder.lookup(external_id)]

    def live_labels(self) -> dict[str, Label]:
        return {ext: self.labels[node] for ext, node in self.builder.id_map.items()}

    def decode(self, q: QueryKind, l1: Label, l2: Label):
        if q not in self.queries:
            raise UnsupportedQuery(f"{self.name} does not answer {q.value}")
        return self._decode(q, self.parse(l1), self.parse(l2))

    def parse(self, label: Label) -> tuple[int, ...]:
        return split_fields(label, self.field_count)

    def decode_fields(self, q: QueryKind, f1: tuple[int, ...], f2: tuple[int, ...]):
        """Answer q from labels already split by `parse`; q must be in `queries`."""
        return self._decode(q, f1, f2)

    def _decode(self, q: QueryKind, f1: tuple[int, ...], f2: tuple[int, ...]):
        raise NotImplementedError


class PairEncoder(DynamicEncoder):
    """(id, parent id); a root stores its own id twice. Adjacency and sibling."""

    name = "dyn-adj-sib"
    queries = frozenset({QueryKind.ADJACENCY, QueryKind.SIBLING})

    def _fields(self, node):
        p = self.builder.parent[node]
        return node, node if p is None else p

    def _decode(self, q, f1, f2):
        return pair_decode(q, f1[0], f1[1], f2[0], f2[1])


class ConnectivityEncoder(DynamicEncoder):
    """(id, component id), the component id being the internal id of its first node.

    Graph events are accepted as long as every edge of the new node goes into a
    single existing component; the node is then hung under its first neighbor.
    """

    name = "dyn-conn"
    queries = frozenset({QueryKind.CONNECTIVITY})

    def __init__(self):
        super().__init__()
        self.component: dict[NodeId, int] = {}

    def _as_tree_event(self, event: GraphEvent) -> TopologicalEvent:
        if not event.neighbors:
            return TopologicalEvent.root(event.external_id)
        components = {self.component[self.builder.lookup(ext)] for ext in event.neighbors}
        if len(components) > 1:
            raise ComponentMerge(f"{event.external_id!r} would join components {sorted(components)}")
        return TopologicalEvent.insert(event.external_id, event.neighbors[0])

    def _fields(self, node):
        p = self.builder.parent[node]
        self.component[node] = node if p is None else self.component[p]
        return node, self.component[node]

    def _decode(self, q, f1, f2):
        return f1[1] == f2[1]


class TripleEncoder(ConnectivityEncoder):
    """(id, parent id, component id): adjacency, sibling and connectivity."""

    name = "dyn-triple"
    field_count = 3
    queries = frozenset({QueryKind.ADJACENCY, QueryKind.SIBLING, QueryKind.CONNECTIVITY})

    def _fields(self, node):
        _, component = super()._fields(node)
        p = self.builder.parent[node]
        return node, node if p is None else p, component

    def _decode(self, q, f1, f2):
        if q is QueryKind.CONNECTIVITY:
            return f1[2] == f2[2]
        return pair_decode(q, f1[0], f1[1], f2[0], f2[1])


class BoundedDegreeEncoder(DynamicEncoder):
    """Adjacency for graphs of degree at most k: own id plus the ids of the
    neighbors present at insertion, unused slots holding the own id."""

    queries = frozenset({QueryKind.ADJACENCY})

    def __init__(self, k: int):
        if k < 1:
            raise InvalidParams(f"degree bound must be >= 1, got {k}")
        super().__init__()
        self.k = k
        self.name = f"dyn-deg{k}"
        self.field_count = k + 1
        self.ids: dict[str, NodeId] = {}
        self.retired: set[str] = set()
        self.degree: dict[NodeId, int] = {}
        self.adjacent: dict[NodeId, set[NodeId]] = {}

    def apply(self, event: Event) -> Optional[Label]:
        if isinstance(event, TopologicalEvent):
            if event.kind is EventKind.REMOVE_LEAF:
                self._remove(event.external_id)
                return None
            neighbors = () if event.kind is EventKind.INSERT_ROOT else (event.parent_external_id,)
            event = GraphEvent(event.external_id, neighbors)
        return self._insert(event)

    def _lookup(self, external_id: str) -> NodeId:
        if external_id not in self.ids:
            raise InvalidEvent(f"unknown or removed node {external_id!r}")
        return self.ids[external_id]

    def _insert(self, event: GraphEvent) -> Label:
        if event.external_id in self.ids or event.external_id in self.retired:
            raise InvalidEvent(f"node {event.external_id!r} was already inserted")
        neighbors = sorted({self._lookup(ext) for ext in event.neighbors})
        if len(neighbors) > self.k:
            raise DegreeExceeded(f"{event.external_id!r} arrives with {len(neighbors)} edges, bound is {self.k}")
        full = [self._name(v) for v in neighbors if self.degree[v] >= self.k]
        if full:
            raise DegreeExceeded(f"node(s) {full} already have degree {self.k}")
        node = self.inserted
        self.inserted += 1
        self.ids[event.external_id] = node
        self.degree[node] = len(neighbors)
        self.adjacent[node] = set(neighbors)
        for v in neighbors:
            self.degree[v] += 1
            self.adjacent[v].add(node)
        slots = neighbors + [node] * (self.k - len(neighbors))
        label = pack_fields([node, *slots], self.width)
        self.labels[node] = label
        return label

    def _remove(self, external_id: str) -> None:
        node = self._lookup(external_id)
        for v in self.adjacent.pop(node):
            self.degree[v] -= 1
            self.adjacent[v].discard(node)
        del self.degree[node]
        del self.ids[external_id]
        self.retired.add(external_id)

    def _name(self, node: NodeId) -> str:
        return next(ext for ext, v in self.ids.items() if v == node)

    def label_of(self, external_id: str) -> Label:
        return self.labels[self._lookup(external_id)]

    def live_labels(self) -> dict[str, Label]:
        return {ext: self.labels[node] for ext, node in self.ids.items()}

    def _decode(self, q, f1, f2):
        if f1[0] == f2[0]:
            return False
        return f1[0] in f2[1:] or f2[0] in f1[1:]


DYNAMIC_SCHEMES: dict[str, Callable[[], DynamicEncoder]] = {
    PairEncoder.name: PairEncoder,
    ConnectivityEncoder.name: ConnectivityEncoder,
    TripleEncoder.name: TripleEncoder,
}

_DEGREE_NAME = re.compile(r"dyn-deg(\d+)$")


def get_dynamic_encoder(name: str) -> DynamicEncoder:
    """Fresh encoder for a CLI scheme name (`dyn-adj-sib`, `dyn-conn`, `dyn-triple`, `dyn-deg<k>`)."""
    if name in DYNAMIC_SCHEMES:
        return DYNAMIC_SCHEMES[name]()
    match = _DEGREE_NAME.match(name)
    if match:
        return BoundedDegreeEncoder(int(match.group(1)))
    raise InvalidParams(f"unknown dynamic scheme {name!r}")


def is_dynamic(name: str) -> bool:
    return name in DYNAMIC_SCHEMES or bool(_DEGREE_NAME.match(name))


def run_stream(encoder: DynamicEncoder, events: EventSequence | Iterable[Event]) -> Iterator[tuple[str, Label]]:
    """Feed events one by one, yielding (external id, label) for each insertion."""
    for event in events.events if isinstance(events, EventSequence) else events:
        label = encoder.apply(event)
        if label is not None:
            yield event.external_id, label


# --- Reference labelings and the ancestry reductions ---

def _root_paths(forest: RootedForest) -> dict[NodeId, list[NodeId]]:
    paths: dict[NodeId, list[NodeId]] = {}
    for node in forest.preorder:
        p = forest.parent[node]
        paths[node] = [node] if p is None else paths[p] + [node]
    return paths


def _contiguous_ids(forest: RootedForest) -> dict[NodeId, int]:
    return {node: i for i, node in enumerate(forest.nodes)}


def _common_prefix(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    length = 0
    for x, y in zip(a, b):
        if x != y:
            break
        length += 1
    return length


def nca_reference(forest: RootedForest) -> tuple[dict[NodeId, Label], Callable[[Label, Label], Label]]:
    """Labels listing the ids on the root path; the decoder returns the NCA's label."""
    w = field_width(forest.n)
    ids = _contiguous_ids(forest)
    labels = {node: pack_fields((ids[v] for v in path), w) for node, path in _root_paths(forest).items()}

    def decoder(l1: Label, l2: Label) -> Label:
        p1, p2 = split_fields(l1, l1.bit_len // w), split_fields(l2, l2.bit_len // w)
        common = _common_prefix(p1, p2)
        if common == 0:
            raise CrossTree("NCA asked across two trees")
        return pack_fields(p1[:common], w)

    return labels, decoder


def distance_reference(forest: RootedForest) -> tuple[dict[NodeId, Label], Callable[[Label, Label], int]]:
    """Same root-path labels; the decoder returns the tree distance."""
    w = field_width(forest.n)
    labels, _ = nca_reference(forest)

    def decoder(l1: Label, l2: Label) -> int:
        p1, p2 = split_fields(l1, l1.bit_len // w), split_fields(l2, l2.bit_len // w)
        common = _common_prefix(p1, p2)
        if common == 0:
            raise CrossTree("distance asked across two trees")
        return len(p1) + len(p2) - 2 * common

    return labels, decoder


def routing_reference(forest: RootedForest) -> tuple[dict[NodeId, Label], Callable[[Label, Label], Optional[int]]]:
    """[tree index, child ports from the root]; port 0 leads toward the root."""
    w = field_width(forest.n + 1)
    tree_index = {root: i for i, root in enumerate(forest.roots)}
    labels: dict[NodeId, Label] = {}
    ports: dict[NodeId, tuple[int, ...]] = {}
    for node in forest.preorder:
        p = forest.parent[node]
        if p is None:
            ports[node] = (tree_index[node],)
        else:
            ports[node] = ports[p] + (forest.port(p, node),)
        labels[node] = pack_fields(ports[node], w)

    def decoder(l1: Label, l2: Label) -> Optional[int]:
        p1, p2 = split_fields(l1, l1.bit_len // w), split_fields(l2, l2.bit_len // w)
        if p1[0] != p2[0]:
            raise CrossTree("routing asked across two trees")
        if p1 == p2:
            return None
        if len(p1) < len(p2) and p2[:len(p1)] == p1:
            return p2[len(p1)]
        return 0

    return labels, decoder


def depth_labels(forest: RootedForest, inner: dict[NodeId, Label]) -> dict[NodeId, Label]:
    """Prefix every inner label with the node's depth."""
    w = field_width(forest.n)
    return {node: concat(put_uint(EMPTY, forest.depth[node], w), label) for node, label in inner.items()}


def split_depth(label: Label, n: int) -> tuple[int, Label]:
    reader = LabelReader(label)
    depth = reader.read(field_width(n))
    return depth, reader.read_label(reader.remaining)


def ancestry_from_nca(nca_decoder: Callable[[Label, Label], Label], l_u: Label, l_v: Label) -> bool:
    """u is an ancestor of v exactly when NCA(u, v) = u."""
    return nca_decoder(l_u, l_v) == l_u


def ancestry_from_routing(routing_decoder: Callable[[Label, Label], Optional[int]], l_u: Label, l_v: Label) -> bool:
    """Proper ancestry: u routes down toward v and v routes up (port 0) toward u."""
    down = routing_decoder(l_u, l_v)
    if down is None or down == 0:
        return False
    return routing_decoder(l_v, l_u) == 0


def ancestry_from_distance_depth(
    dist_decoder: Callable[[Label, Label], int], l_u: Label, l_v: Label, n: int
) -> bool:
    """Labels are (depth, distance label); u is an ancestor iff dist(u, v) = depth(v) - depth(u)."""
    depth_u, inner_u = split_depth(l_u, n)
    depth_v, inner_v = split_depth(l_v, n)
    return depth_u <= depth_v and dist_decoder(inner_u, inner_v) == depth_v - depth_u


REDUCTIONS = ("anc-via-nca", "anc-via-routing", "anc-via-distance")


def reduction_ancestry(name: str, forest: RootedForest) -> Callable[[NodeId, NodeId], bool]:
    """Ancestry answered from reference labels through one of the reductions."""
    if name == "anc-via-nca":
        labels, nca = nca_reference(forest)
        return lambda u, v: ancestry_from_nca(nca, labels[u], labels[v])
    if name == "anc-via-routing":
        labels, routing = routing_reference(forest)
        return lambda u, v: ancestry_from_routing(routing, labels[u], labels[v])
    if name == "anc-via-distance":
        inner, distance = distance_reference(forest)
        labels = depth_labels(forest, inner)
        return lambda u, v: ancestry_from_distance_depth(distance, labels[u], labels[v], forest.n)
    raise InvalidParams(f"unknown reduction {name!r}")
