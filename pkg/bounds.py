# bounds.py
# Strumenti per i limiti inferiori. Certifica le etichette forzate a essere
# distinte sulle famiglie dinamiche, conta le etichette emesse, calcola il limite
# sulla dimensione attesa con input uniforme e verifica le intersezioni tra
# insiemi di etichette sulle famiglie statiche. Include anche l'oracolo di
# conteggio esatto per le costruzioni di connettività, fratellanza e ascendenza.
# Tutta l'aritmetica è intera o Fraction: qui non si usa mai la virgola mobile.

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Optional

import config
from bitlabel import Label, ceil_log2
from dynamic_schemes import get_dynamic_encoder, is_dynamic, run_stream
from errors import BoundViolation, InvalidParams, UnsupportedQuery
from families import (
    FamilySpec,
    designated_nodes,
    fab_forest,
    fn_sequence,
    fnc_sequence,
    gab_forest,
    generate,
    in_parameters,
    in_sequence,
    star_sequence,
    star_subsets,
)
from forest import EventKind, EventSequence, GraphEvent, QueryKind, build_from_events, random_forest
from static_schemes import SchemeDescriptor, get_scheme

logger = logging.getLogger(__name__)

CERTIFIABLE_QUERIES = frozenset({QueryKind.ADJACENCY, QueryKind.SIBLING, QueryKind.CONNECTIVITY})


@dataclass(frozen=True)
class BoundCertificate:
    family: FamilySpec
    queries: tuple[str, ...]
    certified_count: int
    theory_value: Fraction
    theory_expr: str
    witness_stats: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()
    missing_pairs: tuple = ()

    @property
    def implied_bits(self) -> int:
        return ceil_log2(self.certified_count) if self.certified_count else 0


# --- Certificazione delle etichette distinte ---

@dataclass
class _Vertex:
    """One insertion, shared by every member whose prefix contains it."""

    position: int
    home: int
    parent: Optional[int]
    earlier: tuple[int, ...]
    root: Optional[int]


class _PrefixTrie:
    """Event-prefix trie over a family; each insertion node is a canonical vertex."""

    def __init__(self, members: list[EventSequence]):
        self.index: dict[tuple[int, object], int] = {}
        self.depth = [0]
        self.children: list[list[int]] = [[]]
        self.vertices: dict[int, _Vertex] = {}
        self.member_nodes: list[list[int]] = []
        self.member_children: list[dict[int, list[int]]] = []
        for s, seq in enumerate(members):
            self._add(s, seq)

    def _node(self, parent: int, event) -> int:
        key = (parent, event)
        if key not in self.index:
            self.index[key] = len(self.depth)
            self.depth.append(self.depth[parent] + 1)
            self.children.append([])
            self.children[parent].append(self.index[key])
        return self.index[key]

    def _add(self, s: int, seq: EventSequence) -> None:
        current = 0
        by_name: dict[str, int] = {}
        kids: dict[int, list[int]] = defaultdict(list)
        path: list[int] = []
        for position, event in enumerate(seq.events):
            current = self._node(current, event)
            path.append(current)
            if isinstance(event, GraphEvent):
                earlier = tuple(sorted(by_name[ext] for ext in event.neighbors))
                parent, root = None, None
            elif event.kind is EventKind.REMOVE_LEAF:
                raise InvalidParams("certification needs insert-only families")
            else:
                parent = None if event.parent_external_id is None else by_name[event.parent_external_id]
                earlier = () if parent is None else (parent,)
                root = current if parent is None else self.vertices[parent].root
                if parent is not None:
                    kids[parent].append(current)
            by_name[event.external_id] = current
            if current not in self.vertices:
                self.vertices[current] = _Vertex(position, s, parent, earlier, root)
        self.member_nodes.append(path)
        self.member_children.append(kids)

    def signature(self, vertex: int, t: int, queries: Iterable[QueryKind]) -> tuple:
        """Answers of every query between `vertex` and the nodes at positions < t."""
        v = self.vertices[vertex]
        pos = self.vertices
        parts = []
        for q in queries:
            if q is QueryKind.ADJACENCY:
                parts.append(tuple(u for u in v.earlier if pos[u].position < t))
            elif q is QueryKind.SIBLING:
                if v.parent is None:
                    parts.append(())
                else:
                    kids = self.member_children[v.home][v.parent]
                    parts.append(tuple(u for u in kids if pos[u].position < t))
            elif q is QueryKind.CONNECTIVITY:
                if v.root is None:
                    raise UnsupportedQuery("connectivity certification is defined for forest families")
                parts.append(v.root if pos[v.root].position < t else None)
        return tuple(parts)


def _family_members(spec: FamilySpec) -> tuple[list[EventSequence], list[set[int]]]:
    """Members plus, for each, the event positions whose nodes enter the candidate set."""
    n = spec.n
    if spec.kind in ("Fn", "FnC"):
        build = fn_sequence if spec.kind == "Fn" else fnc_sequence
        ks = [spec.k] if spec.k is not None else list(range(2, n + 1))
        longest = max(ks)
        members = [build(n, k) for k in ks]
        positions = [set(range(n)) if k == longest else set(range(k, n)) for k in ks]
        return members, positions
    if spec.kind == "In":
        pairs = [(spec.j, spec.k)] if spec.j is not None else in_parameters(n)
        return [in_sequence(n, j, k) for j, k in pairs], [set(range(j + k, n)) for j, k in pairs]
    if spec.kind in ("A2", "Deltak"):
        if n > config.A2_MAX_N:
            raise InvalidParams(f"{spec.kind} certification is capped at n <= {config.A2_MAX_N}")
        subsets = star_subsets(n, spec.k if spec.kind == "Deltak" else None)
        return [star_sequence(n, s) for s in subsets], [{n - 1}] * len(subsets)
    raise InvalidParams(f"{spec.kind} is not a dynamic family")


def _theory(spec: FamilySpec) -> tuple[Fraction, str, tuple[str, ...]]:
    n = spec.n
    if spec.kind in ("Fn", "FnC"):
        if spec.k is not None:
            return Fraction(n), "n", ()
        literal = n + sum(range(2, n))
        note = f"literal proof sum n+sum_{{i=2}}^{{n-1}} i = {literal}; certified count follows the per-step n-k bound"
        return Fraction(n + (n - 2) * (n - 1) // 2), "n+(n-2)(n-1)/2", (note,)
    if spec.kind == "In":
        if spec.j is not None:
            return Fraction(n - spec.j - spec.k), "n-j-k", ()
        return Fraction(comb(n, 3)), "n(n-1)(n-2)/6", ()
    if spec.kind == "A2":
        return Fraction(2 ** (n - 1) - 1), "2^(n-1)-1", ()
    return Fraction(sum(comb(n - 1, i) for i in range(1, spec.k + 1))), "sum_{i=1..k} C(n-1,i)", ()


def certify_forced_distinct(spec: FamilySpec, queries: Iterable[QueryKind]) -> BoundCertificate:
    """Certify how many pairwise-distinct labels any correct deterministic scheme needs.

    Members are merged into an event-prefix trie, so a node inserted inside a
    shared prefix is one vertex. Two candidates on one root-to-leaf path live in
    the same member and need distinct labels because labels are unique. Two
    candidates in different branches below prefix length t need a witness: a
    node z at a position < t with f(x, z) != f(y, z) for some query f. The
    signature of a candidate at t lists those answers, so two candidates lack a
    witness exactly when their signatures are equal.

    Pairs without a witness are recorded in `missing_pairs` and candidates are
    dropped greedily until the remaining set is fully verified.
    """
    spec.validate()
    queries = tuple(sorted(set(queries), key=lambda q: q.value))
    unsupported = set(queries) - CERTIFIABLE_QUERIES
    if not queries or unsupported:
        raise UnsupportedQuery(f"certification supports {sorted(q.value for q in CERTIFIABLE_QUERIES)}")
    # 1. Costruzione del trie: i prefissi condivisi diventano un solo vertice.
    members, positions = _family_members(spec)
    trie = _PrefixTrie(members)

    # 2. Candidati: i nodi inseriti nelle posizioni richieste da ogni membro.
    candidates: set[int] = set()
    for s, wanted in enumerate(positions):
        candidates.update(trie.member_nodes[s][p] for p in wanted)

    # 3. Testimoni: confronto delle firme tra rami diversi sotto ogni nodo.
    below: dict[int, list[int]] = {}
    cross_pairs = 0
    missing: list[tuple[int, int]] = []
    # Reverse creation order visits children before parents.
    for node in range(len(trie.depth) - 1, -1, -1):
        branches = [below[c] for c in trie.children[node]]
        own = [node] if node in candidates else []
        if len(branches) > 1:
            t = trie.depth[node]
            groups: dict[tuple, list[list[int]]] = defaultdict(lambda: [[] for _ in branches])
            for b, members_below in enumerate(branches):
                for vertex in members_below:
                    groups[trie.signature(vertex, t, queries)][b].append(vertex)
            sizes = [len(b) for b in branches]
            cross_pairs += (sum(sizes) ** 2 - sum(x * x for x in sizes)) // 2
            for per_branch in groups.values():
                occupied = [vs for vs in per_branch if vs]
                for i in range(len(occupied)):
                    for j in range(i + 1, len(occupied)):
                        missing.extend((x, y) for x in occupied[i] for y in occupied[j])
        merged = own
        for b in branches:
            merged.extend(b)
        below[node] = merged
        for c in trie.children[node]:
            del below[c]

    # 4. Scarto delle coppie senza testimone.
    kept = _drop_unwitnessed(candidates, missing)
    total_pairs = len(candidates) * (len(candidates) - 1) // 2
    stats = {
        "members": len(members),
        "candidates": len(candidates),
        "cross_branch_pairs": cross_pairs,
        "same_member_pairs": total_pairs - cross_pairs,
        "missing": len(missing),
    }
    if missing:
        logger.warning("%s n=%d: %d candidate pair(s) without a witness", spec.kind, spec.n, len(missing))
    logger.info("certified %s n=%d: %s", spec.kind, spec.n, stats)
    value, expr, notes = _theory(spec)
    names = {v: _vertex_name(trie, members, v) for pair in missing for v in pair}
    return BoundCertificate(
        family=spec,
        queries=tuple(q.value for q in queries),
        certified_count=len(kept),
        theory_value=value,
        theory_expr=expr,
        witness_stats=stats,
        notes=notes,
        missing_pairs=tuple((names[x], names[y]) for x, y in missing),
    )


def _vertex_name(trie: _PrefixTrie, members: list[EventSequence], vertex: int) -> str:
    v = trie.vertices[vertex]
    return f"member{v.home}:{members[v.home].events[v.position].external_id}"


def _drop_unwitnessed(candidates: set[int], missing: list[tuple[int, int]]) -> set[int]:
    kept = set(candidates)
    conflicts: dict[int, set[int]] = defaultdict(set)
    for x, y in missing:
        conflicts[x].add(y)
        conflicts[y].add(x)
    while any(conflicts.values()):
        worst = max(conflicts, key=lambda v: (len(conflicts[v]), -v))
        for other in conflicts.pop(worst):
            conflicts[other].discard(worst)
        kept.discard(worst)
    return kept


# --- Etichette emesse ---

def count_distinct_emitted(encoder_name: str, spec: FamilySpec) -> int:
    """Distinct labels a dynamic encoder emits over every member of a family."""
    seen: set[Label] = set()
    for seq in generate(spec):
        seen.update(label for _, label in run_stream(get_dynamic_encoder(encoder_name), seq))
    return len(seen)


# --- Dimensione massima attesa ---

def yao_family(n: int) -> list[EventSequence]:
    members = [fn_sequence(n, k) for k in range(2, n) if 2 * k < n]
    if not members:
        raise InvalidParams(f"no k with 1 < k < n/2 for n={n}")
    return members


def yao_bound(n: int) -> Fraction:
    """(1/|F|) * sum_{i=1..|F|} (log n + log i - 1) with ceiling logarithms."""
    size = len(yao_family(n))
    return Fraction(sum(ceil_log2(n) + ceil_log2(i) - 1 for i in range(1, size + 1)), size)


def yao_expected_max(encoder_name: str, n: int) -> Fraction:
    """Average, over the uniform family {Fn(k) : 1 < k < n/2}, of the largest label emitted."""
    family = yao_family(n)
    total = 0
    for seq in family:
        total += max(label.bit_len for _, label in run_stream(get_dynamic_encoder(encoder_name), seq))
    return Fraction(total, len(family))


# --- Intersezioni sulle famiglie statiche ---

@dataclass(frozen=True)
class IntersectionReport:
    kind: str
    n: int
    scheme: str
    forests: int
    pairs_checked: int
    violations: tuple = ()


def intersection_bound(n: int, first: tuple[int, int], second: tuple[int, int]) -> Fraction:
    """min(a,c) * min(b,d) * n / (ab) for forests (a,b) and (c,d) with ab >= cd."""
    (a, b), (c, d) = first, second
    return Fraction(min(a, c) * min(b, d) * n, a * b)


def lemma3_intersection_check(
    scheme: SchemeDescriptor,
    n: int,
    params: Iterable[tuple[int, int]],
    kind: str = "Fab",
    strict: bool = True,
) -> IntersectionReport:
    """Encode each static family member on its own and bound every pairwise label overlap.

    Only the n designated nodes count (Fab leaves, Gab path nodes). Every forest
    is encoded with size parameter 2n, the most nodes any member has.
    """
    if not scheme.unique:
        raise InvalidParams(f"{scheme.name} does not assign unique labels")
    needed = {QueryKind.CONNECTIVITY, QueryKind.SIBLING if kind == "Fab" else QueryKind.ANCESTRY}
    if not needed <= scheme.queries:
        raise UnsupportedQuery(f"{scheme.name} must answer {sorted(q.value for q in needed)} for {kind}")
    build = fab_forest if kind == "Fab" else gab_forest
    label_sets: dict[tuple[int, int], set[Label]] = {}
    for a, b in params:
        spec = FamilySpec(kind, n, a=a, b=b)
        forest = build(n, a, b)
        assert n <= forest.n <= 2 * n, "member outside n..2n nodes"
        labels = scheme.encode(forest, 2 * n)
        label_sets[(a, b)] = {labels[v] for v in designated_nodes(spec, forest)}
    violations = []
    checked = 0
    for first, e1 in label_sets.items():
        for second, e2 in label_sets.items():
            if first[0] * first[1] < second[0] * second[1]:
                continue
            checked += 1
            overlap = len(e1 & e2)
            bound = intersection_bound(n, first, second)
            if overlap > bound:
                violations.append((first, second, overlap, bound))
    logger.info("%s on %s n=%d: %d pair(s), %d violation(s)", scheme.name, kind, n, checked, len(violations))
    if violations and strict:
        raise BoundViolation(violations)
    return IntersectionReport(kind, n, scheme.name, len(label_sets), checked, tuple(violations))


# --- Oracolo di conteggio ---

@dataclass(frozen=True)
class CountingStep:
    a: int
    b: int
    direct: Fraction
    closed: Fraction


@dataclass(frozen=True)
class CountingReport:
    theorem: str
    n: int
    x: Optional[int]
    steps: tuple[CountingStep, ...]

    @property
    def total(self) -> Fraction:
        return sum((s.direct for s in self.steps), Fraction(0))

    def to_certificate(self) -> BoundCertificate:
        closed_total = sum((s.closed for s in self.steps), Fraction(0))
        per_forest = "n/2" if self.theorem in ("Warmup", "Thm6") else "n(1-(3x+1)/(x-1)^2)"
        expr = f"{len(self.steps)}*{per_forest}"
        spec = FamilySpec(self.theorem, self.n, x=self.x)
        count = -(-self.total.numerator // self.total.denominator)
        return BoundCertificate(spec, (), count, closed_total, expr, {"forests": len(self.steps)})


def _exponent(n: int, base: int) -> Optional[int]:
    power, m = 1, 0
    while power < n:
        power *= base
        m += 1
    return m if power == n else None


def _ordering(theorem: str, m: int, x: int) -> list[tuple[int, int]]:
    if theorem == "Warmup":
        return [(3 ** j, 1) for j in range(m + 1)]
    if theorem == "Thm6":
        return [(3 ** j, 3 ** (m - j)) for j in range(m + 1)]
    exponents = [(a, b) for total in range(m + 1) for b in range(total + 1) for a in [total - b]]
    return [(x ** a, x ** b) for a, b in exponents]


def lemma4_new_labels(n: int, forests: list[tuple[int, int]], i: int) -> Fraction:
    """n - sum_{j<i} min(a_j,a_i) * min(b_j,b_i) * n / (a_i b_i)."""
    a_i, b_i = forests[i]
    overlap = sum(Fraction(min(a, a_i) * min(b, b_i) * n, a_i * b_i) for a, b in forests[:i])
    return n - overlap


def counting_oracle(theorem: str, n: int, x: Optional[int] = None) -> CountingReport:
    """Minimum number of new labels each forest of a construction forces, summed.

    Warmup and Thm6 use forests with 3^j components (one sibling group each, or
    n/3^j of them); each step must beat n/2 strictly. Thm7 and Thm8 use
    (x^a, x^b) ordered by a + b and then b; each step must reach
    n - n(3x+1)/(x-1)^2.
    """
    if theorem in ("Warmup", "Thm6"):
        base = 3
    elif theorem in ("Thm7", "Thm8"):
        if x is None or x < 2:
            raise InvalidParams(f"{theorem} needs x >= 2")
        base = x
    else:
        raise InvalidParams(f"unknown counting construction {theorem!r}")
    m = _exponent(n, base)
    if m is None:
        raise InvalidParams(f"{theorem} needs n to be a power of {base}, got {n}")
    forests = _ordering(theorem, m, base)
    if theorem in ("Warmup", "Thm6"):
        closed = Fraction(n, 2)
    else:
        closed = n - Fraction(n * (3 * x + 1), (x - 1) ** 2)
    steps = []
    failures = []
    for i, (a, b) in enumerate(forests):
        direct = lemma4_new_labels(n, forests, i)
        ok = direct > closed if theorem in ("Warmup", "Thm6") else direct >= closed
        if not ok:
            failures.append(((a, b), direct, closed))
        steps.append(CountingStep(a, b, direct, closed))
    if failures:
        raise BoundViolation(failures)
    logger.info("%s n=%d: %d forest(s), total %s", theorem, n, len(steps), sum(s.direct for s in steps))
    return CountingReport(theorem, n, x if theorem in ("Thm7", "Thm8") else None, tuple(steps))


# --- Dimensioni misurate ---

TABLE_SIZES = (1 << 4, 1 << 8, 1 << 12, 1 << 16)


def measured_sizes(scheme_names: Iterable[str], sizes: Iterable[int], seed: int) -> list[dict]:
    """Largest label each scheme emits on a seeded random forest of every size."""
    rows = []
    for n in sizes:
        seq = random_forest(n, seed)
        forest = None
        for name in scheme_names:
            if is_dynamic(name):
                measured = max(label.bit_len for _, label in run_stream(get_dynamic_encoder(name), seq))
                formula = None
            else:
                if forest is None:
                    forest, _ = build_from_events(seq)
                scheme = get_scheme(name)
                measured = max(label.bit_len for label in scheme.encode(forest).values())
                formula = scheme.size_fn(n)
            rows.append({"scheme": name, "n": n, "measured_bits": measured, "size_function": formula})
    return rows
