# static_schemes.py
# Schemi di etichettatura statici per foreste radicate e wrapper di connettività.
#
# Ogni schema è un SchemeDescriptor: un encoder che assegna un'etichetta a ogni
# nodo della foresta, un parser che scompone l'etichetta nei campi letti dal
# decoder, un decoder che risponde a una query a partire da due etichette e la
# funzione di dimensione S(n) rispettata esattamente da ogni etichetta emessa.
# I decoder conoscono n (viaggia nell'intestazione del file di etichette), ed è
# questo che permette ai layout ordinati di fare a meno dei prefissi di lunghezza.

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import config
from bitlabel import (
    EMPTY,
    Label,
    LabelReader,
    ceil_log2,
    concat,
    field_width,
    loglog,
    minimal_binary,
    pack_fields,
    pad_to,
    put_uint,
    split_fields,
)
from errors import CrossTree, InvalidParams, MalformedInput, SizeFunctionViolation, UnsupportedQuery, WidthMismatch
from forest import WITHIN_TREE_QUERIES, NodeId, QueryKind, RootedForest

logger = logging.getLogger(__name__)

Encoder = Callable[[RootedForest, int], dict[NodeId, Label]]
# A parser turns one label into the fields its decoder reads; decoders compare
# two parsed labels, so a label is split once however many pairs it meets.
Parser = Callable[[Label, int], object]
Decoder = Callable[[QueryKind, object, object, int], object]

# Slack c in the wrapper condition S(a) - S(b) >= log a - log b - c.
WRAPPER_SLACK = 2


def whole_label(label: Label, n: int) -> Label:
    return label


@dataclass(frozen=True)
class SchemeDescriptor:
    """A named encoder/decoder pair with its exact size function."""

    name: str
    queries: frozenset[QueryKind]
    unique: bool
    size_fn: Callable[[int], int]
    encoder: Encoder
    decoder: Decoder
    parser: Parser = whole_label

    def encode(self, forest: RootedForest, n: int | None = None) -> dict[NodeId, Label]:
        """Label every node of `forest`; `n` is the global size parameter (defaults to forest.n)."""
        n = forest.n if n is None else n
        if n < forest.n:
            raise InvalidParams(f"size parameter {n} smaller than the forest ({forest.n} nodes)")
        labels = self.encoder(forest, n)
        width = self.size_fn(n)
        assert all(label.bit_len == width for label in labels.values()), f"{self.name}: width drift"
        return labels

    def decode(self, q: QueryKind, l1: Label, l2: Label, n: int):
        if q not in self.queries:
            raise UnsupportedQuery(f"{self.name} does not answer {q.value}")
        expected = self.size_fn(n)
        if l1.bit_len != l2.bit_len or l1.bit_len != expected:
            raise WidthMismatch(f"{self.name} expects {expected}-bit labels, got {l1.bit_len} and {l2.bit_len}")
        return self.decoder(q, self.parser(l1, n), self.parser(l2, n), n)

    def parse(self, label: Label, n: int):
        return self.parser(label, n)

    def decode_fields(self, q: QueryKind, f1, f2, n: int):
        """Answer q from two labels already run through `parse`; q must be in `queries`."""
        return self.decoder(q, f1, f2, n)


def decode(scheme: SchemeDescriptor, q: QueryKind, l1: Label, l2: Label, n: int):
    return scheme.decode(q, l1, l2, n)


# --- Schema a coppie di Kannan: adiacenza e fratellanza ---

def kannan_size(n: int) -> int:
    return 2 * field_width(n)


def kannan_ids(forest: RootedForest) -> dict[NodeId, int]:
    """Number nodes tree by tree, each tree in insertion order, from 0."""
    ids: dict[NodeId, int] = {}
    for root in forest.roots:
        for node in forest.trees[root]:
            ids[node] = len(ids)
    return ids


def kannan_encode(forest: RootedForest, n: int | None = None) -> dict[NodeId, Label]:
    """Label v as (Id(v), Id(parent(v))); a root stores its own id twice."""
    w = field_width(forest.n if n is None else n)
    ids = kannan_ids(forest)
    labels = {}
    for node in forest.nodes:
        p = forest.parent[node]
        labels[node] = pack_fields((ids[node], ids[node] if p is None else ids[p]), w)
    return labels


def pair_decode(q: QueryKind, id1: int, p1: int, id2: int, p2: int) -> bool:
    """Decoding rules shared by the static and dynamic (id, parent) labels."""
    if q is QueryKind.ADJACENCY:
        # Exactly one direction, so a root (id = parent) is not adjacent to itself.
        return (p1 == id2) != (p2 == id1)
    if q is QueryKind.SIBLING:
        return p1 == p2 and (id1 == p1) == (id2 == p2)
    raise UnsupportedQuery(f"pair labels do not answer {q.value}")


def split_pair(label: Label, n: int | None = None) -> tuple[int, int]:
    return split_fields(label, 2)


def kannan_decode_fields(q: QueryKind, f1: tuple[int, int], f2: tuple[int, int], n: int | None = None) -> bool:
    return pair_decode(q, f1[0], f1[1], f2[0], f2[1])


def kannan_decode(q: QueryKind, l1: Label, l2: Label, n: int | None = None) -> bool:
    if l1.bit_len != l2.bit_len:
        raise WidthMismatch(f"labels of {l1.bit_len} and {l2.bit_len} bits")
    return kannan_decode_fields(q, split_pair(l1), split_pair(l2))


# --- Schema a intervalli DFS: ascendenza ---

def interval_size(n: int) -> int:
    return 2 * ceil_log2(2 * n)


def dfs_intervals(forest: RootedForest) -> dict[NodeId, tuple[int, int]]:
    """(pre, post) from a single clock over all trees, so intervals nest exactly."""
    clock = 0
    intervals: dict[NodeId, tuple[int, int]] = {}
    pre: dict[NodeId, int] = {}
    for root in forest.roots:
        stack = [(root, False)]
        while stack:
            node, done = stack.pop()
            if done:
                intervals[node] = (pre[node], clock)
                clock += 1
                continue
            pre[node] = clock
            clock += 1
            stack.append((node, True))
            stack.extend((child, False) for child in reversed(forest.children[node]))
    return intervals


def interval_ancestry_encode(forest: RootedForest, n: int | None = None) -> dict[NodeId, Label]:
    w = ceil_log2(2 * (forest.n if n is None else n))
    return {node: pack_fields(interval, w) for node, interval in dfs_intervals(forest).items()}


def interval_ancestry_decode(q: QueryKind, f1: tuple[int, int], f2: tuple[int, int], n: int | None = None) -> bool:
    """Ancestry from two (pre, post) pairs: the first interval contains the second."""
    return f1[0] <= f2[0] and f2[1] <= f1[1]


# --- Codici di rango ordinati per dimensione ---

def sep_width(n: int) -> int:
    """Bits needed to store |C| - 1 for any rank 1..n."""
    return max(1, ceil_log2(max(1, n).bit_length()))


def put_rank(label: Label, rank: int, n: int) -> Label:
    """Append sep (holding |C| - 1) and C = minimal_binary(rank) without its leading 1."""
    bits, width = minimal_binary(rank)
    label = put_uint(label, width - 1, sep_width(n))
    return put_uint(label, rank - (1 << (width - 1)), width - 1)


def read_rank(reader: LabelReader, n: int) -> int:
    extra = reader.read(sep_width(n))
    rank = (1 << extra) | reader.read(extra)
    if rank > n:
        raise MalformedInput(f"rank {rank} is larger than n = {n}")
    return rank


def sorted_size(n: int) -> int:
    return ceil_log2(n) + sep_width(n)


def _ranked_group_labels(groups: list[tuple[NodeId, ...]], n: int) -> dict[NodeId, Label]:
    """Unique labels [sep][C = rank][index in group] padded to sorted_size(n).

    Groups must already be sorted by decreasing size; the i-th group then has at
    most n / i members, which is what makes the fixed total fit.
    """
    total = sorted_size(n)
    labels: dict[NodeId, Label] = {}
    for rank, members in enumerate(groups, start=1):
        assert len(members) * rank <= n, "group larger than n / rank"
        prefix = put_rank(EMPTY, rank, n)
        index_width = ceil_log2(len(members))
        for index, node in enumerate(members):
            labels[node] = pad_to(put_uint(prefix, index, index_width), total)
    return labels


def trees_by_size(forest: RootedForest) -> list[NodeId]:
    """Roots ordered by decreasing tree size, ties by earlier root insertion."""
    return sorted(forest.roots, key=lambda root: (-len(forest.trees[root]), root))


def sorted_connectivity_encode(forest: RootedForest, n: int | None = None) -> dict[NodeId, Label]:
    n = forest.n if n is None else n
    return _ranked_group_labels([forest.trees[root] for root in trees_by_size(forest)], n)


def rank_of(label: Label, n: int) -> int:
    return read_rank(LabelReader(label), n)


def same_group(q: QueryKind, g1, g2, n: int) -> bool:
    """Connectivity and sibling answers of the sorted schemes: equal group codes."""
    return g1 == g2


def sibling_groups(forest: RootedForest) -> list[tuple[NodeId, ...]]:
    """Children sets per parent plus one singleton group per root, largest first.

    Ties go to the group whose anchor (parent, or the root itself) was inserted
    first; a root's singleton group precedes its children group.
    """
    keyed = [((root, 0), (root,)) for root in forest.roots]
    keyed.extend(((node, 1), forest.children[node]) for node in forest.nodes if forest.children[node])
    keyed.sort(key=lambda item: (-len(item[1]), item[0]))
    return [members for _, members in keyed]


def sorted_sibling_encode(forest: RootedForest, unique: bool = True, n: int | None = None) -> dict[NodeId, Label]:
    n = forest.n if n is None else n
    groups = sibling_groups(forest)
    if unique:
        return _ranked_group_labels(groups, n)
    width = ceil_log2(n)
    return {node: put_uint(EMPTY, rank, width) for rank, members in enumerate(groups) for node in members}


# --- Wrapper di connettività ---

def check_size_function(inner: SchemeDescriptor, limit: int | None = None) -> None:
    """Check that S is non-decreasing and S(a) - S(b) >= ⌈log a⌉ - ⌈log b⌉ - c for a >= b.

    One pass suffices: with g(x) = S(x) - ⌈log x⌉ the condition reads
    g(a) >= max_{b <= a} g(b) - c.
    """
    limit = config.SIZE_CHECK_LIMIT if limit is None else limit
    previous = None
    best_g = None
    for x in range(1, limit + 1):
        s = inner.size_fn(x)
        if previous is not None and s < previous:
            raise SizeFunctionViolation(f"{inner.name}: S({x}) = {s} < S({x - 1}) = {previous}")
        g = s - ceil_log2(x)
        if best_g is not None and g < best_g - WRAPPER_SLACK:
            raise SizeFunctionViolation(f"{inner.name}: S drops more than {WRAPPER_SLACK} below log n at n = {x}")
        best_g = g if best_g is None else max(best_g, g)
        previous = s


def wrapped_size(inner: SchemeDescriptor, n: int) -> int:
    return inner.size_fn(n) + loglog(n) + 1


def wrap_with_connectivity(inner: SchemeDescriptor) -> SchemeDescriptor:
    """Make an inner within-tree scheme answer connectivity as well.

    Trees are ranked by decreasing size. The i-th tree is labeled by the inner
    encoder alone, with size parameter ⌊n/i⌋, and every label becomes
    [sep][C = i][inner label] padded to S(n) + loglog n + 1 bits.
    """
    if QueryKind.CONNECTIVITY in inner.queries:
        raise InvalidParams(f"{inner.name} already answers connectivity")
    _registered_check(inner.name)

    def size_fn(n: int) -> int:
        return wrapped_size(inner, n)

    def encoder(forest: RootedForest, n: int) -> dict[NodeId, Label]:
        total = size_fn(n)
        labels: dict[NodeId, Label] = {}
        for rank, root in enumerate(trees_by_size(forest), start=1):
            size = len(forest.trees[root])
            assert size * rank <= n, "tree larger than n / rank"
            budget = n // rank
            prefix = put_rank(EMPTY, rank, n)
            for node, inner_label in inner.encode(forest.subtree_forest(root), budget).items():
                labels[node] = pad_to(concat(prefix, inner_label), total)
        logger.debug("%s: %d node(s) in %d tree(s), %d bits each", inner.name, forest.n, len(forest.roots), total)
        return labels

    def parser(label: Label, n: int) -> tuple[int, object]:
        """(rank, parsed inner label); the inner label is read at budget n // rank."""
        reader = LabelReader(label)
        rank = read_rank(reader, n)
        budget = n // rank
        return rank, inner.parse(reader.read_label(inner.size_fn(budget)), budget)

    def decoder(q: QueryKind, f1: tuple[int, object], f2: tuple[int, object], n: int):
        if q is QueryKind.CONNECTIVITY:
            return f1[0] == f2[0]
        if f1[0] != f2[0]:
            if q in WITHIN_TREE_QUERIES:
                raise CrossTree(f"{q.value} asked across two trees")
            return False
        return inner.decode_fields(q, f1[1], f2[1], n // f1[0])

    return SchemeDescriptor(
        name=f"wrap:{inner.name}",
        queries=inner.queries | {QueryKind.CONNECTIVITY},
        unique=inner.unique,
        size_fn=size_fn,
        encoder=encoder,
        decoder=decoder,
        parser=parser,
    )


# --- Registro (nomi degli schemi nella CLI) ---

KANNAN = SchemeDescriptor(
    "adj-sib-kannan",
    frozenset({QueryKind.ADJACENCY, QueryKind.SIBLING}),
    True,
    kannan_size,
    kannan_encode,
    kannan_decode_fields,
    split_pair,
)
INTERVAL_ANCESTRY = SchemeDescriptor(
    "anc-interval",
    frozenset({QueryKind.ANCESTRY}),
    True,
    interval_size,
    interval_ancestry_encode,
    interval_ancestry_decode,
    split_pair,
)
SORTED_CONNECTIVITY = SchemeDescriptor(
    "conn-sorted",
    frozenset({QueryKind.CONNECTIVITY}),
    True,
    sorted_size,
    sorted_connectivity_encode,
    same_group,
    rank_of,
)
SORTED_SIBLING = SchemeDescriptor(
    "sib-sorted",
    frozenset({QueryKind.SIBLING}),
    True,
    sorted_size,
    lambda forest, n: sorted_sibling_encode(forest, unique=True, n=n),
    same_group,
    rank_of,
)
SORTED_SIBLING_NONUNIQUE = SchemeDescriptor(
    "sib-sorted-nonunique",
    frozenset({QueryKind.SIBLING}),
    False,
    ceil_log2,
    lambda forest, n: sorted_sibling_encode(forest, unique=False, n=n),
    same_group,
)

BASE_SCHEMES: dict[str, SchemeDescriptor] = {
    s.name: s for s in (KANNAN, INTERVAL_ANCESTRY, SORTED_CONNECTIVITY, SORTED_SIBLING, SORTED_SIBLING_NONUNIQUE)
}


@lru_cache(maxsize=None)
def _registered_check(name: str) -> None:
    check_size_function(BASE_SCHEMES[name])


@lru_cache(maxsize=None)
def get_scheme(name: str) -> SchemeDescriptor:
    """Look up a static scheme by its CLI name, e.g. `wrap:adj-sib-kannan`."""
    if name.startswith("wrap:"):
        return wrap_with_connectivity(get_scheme(name[len("wrap:"):]))
    if name not in BASE_SCHEMES:
        raise InvalidParams(f"unknown static scheme {name!r}")
    return BASE_SCHEMES[name]


def static_scheme_names() -> list[str]:
    names = list(BASE_SCHEMES)
    names.extend(f"wrap:{name}" for name, s in BASE_SCHEMES.items() if QueryKind.CONNECTIVITY not in s.queries)
    return names
