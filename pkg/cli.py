# cli.py
# Interfaccia a riga di comando del progetto: genera famiglie di istanze,
# etichetta foreste con uno schema statico, esegue gli encoder dinamici su un
# flusso di eventi, risponde a query a partire da due etichette, confronta gli
# schemi con l'oracolo e stampa i certificati dei limiti inferiori.
#
# Ogni comando è deterministico: la casualità passa sempre da --seed.

import argparse
import logging
import os
import sys
from typing import Iterable, Optional

# Aggiunge la directory del progetto al path per importare i moduli locali.
script_directory = os.path.dirname(os.path.abspath(__file__))
sys.path.append(script_directory)

import config
from bitlabel import Label, format_label_file, format_label_header, format_label_line, parse_label_file
from bounds import (
    TABLE_SIZES,
    certify_forced_distinct,
    count_distinct_emitted,
    counting_oracle,
    lemma3_intersection_check,
    measured_sizes,
    yao_bound,
    yao_expected_max,
)
from dynamic_schemes import (
    DYNAMIC_SCHEMES,
    REDUCTIONS,
    BoundedDegreeEncoder,
    get_dynamic_encoder,
    is_dynamic,
    reduction_ancestry,
    run_stream,
)
from errors import (
    BoundViolation,
    CrossTree,
    InvalidEvent,
    InvalidParams,
    LabelCodecError,
    LabelingError,
    MalformedInput,
    UnsupportedQuery,
    VerificationFailed,
    WidthMismatch,
    WitnessMissing,
)
from families import COUNTING_KINDS, DYNAMIC_KINDS, STATIC_KINDS, FamilySpec, divisor_grid, generate
from forest import (
    WITHIN_TREE_QUERIES,
    EventSequence,
    QueryKind,
    RootedForest,
    build_from_events,
    format_events,
    format_forest,
    graph_adjacency,
    parse_events,
    parse_forest,
    query_table,
    random_bounded_degree_graph,
    random_forest,
)
from static_schemes import get_scheme, static_scheme_names
from writer import writer_excel, writer_text

logger = logging.getLogger(__name__)

# Errori dovuti all'input dell'utente: uscita con codice 2.
INPUT_ERRORS = (MalformedInput, InvalidParams, InvalidEvent, LabelCodecError, UnsupportedQuery, WidthMismatch, OSError)

DEFAULT_QUERIES = {
    "Fn": "Adjacency",
    "FnC": "Connectivity",
    "In": "Adjacency,Connectivity",
    "A2": "Adjacency",
    "Deltak": "Adjacency",
}
DEFAULT_STATIC_SCHEME = {"Fab": "wrap:sib-sorted", "Gab": "wrap:anc-interval"}


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _answer_text(value) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    if value is None:
        return "none"
    if isinstance(value, Label):
        return f"{value.bit_len} {value.to_hex()}"
    return str(value)


def _spec_from_args(args) -> FamilySpec:
    if args.family is None:
        raise InvalidParams("--family is required")
    if args.n is None:
        raise InvalidParams("--n is required")
    return FamilySpec(args.family, args.n, k=args.k, j=args.j, a=args.a, b=args.b, x=args.x)


def _load_forest(path: str) -> RootedForest:
    text = _read(path)
    if text.lstrip().startswith("events"):
        forest, _ = build_from_events(parse_events(text))
        return forest
    return parse_forest(text)


# --- gen-family ---

def cmd_gen_family(args) -> int:
    if args.family == "Random":
        if args.n is None or args.seed is None:
            raise InvalidParams("Random needs --n and --seed")
        if args.n < 1:
            raise InvalidParams(f"Random needs --n >= 1, got {args.n}")
        if args.k is not None:
            members = [random_bounded_degree_graph(args.n, args.k, args.seed)]
        else:
            members = [random_forest(args.n, args.seed, args.removal_rate)]
    else:
        members = generate(_spec_from_args(args))
    texts = [format_events(m) if isinstance(m, EventSequence) else format_forest(m) for m in members]
    if args.output and len(texts) > 1:
        stem, ext = os.path.splitext(args.output)
        for i, text in enumerate(texts, 1):
            _emit(text, f"{stem}-{i}{ext}")
        print(f"{len(texts)} member(s) written to {stem}-*{ext}")
    else:
        _emit("\n".join(texts), args.output)
    return 0


# --- label / stream ---

def cmd_label(args) -> int:
    if args.scheme is None or args.input is None:
        raise InvalidParams("label needs --scheme and --input")
    scheme = get_scheme(args.scheme)
    forest = _load_forest(args.input)
    n = forest.n if args.n is None else args.n
    labels = scheme.encode(forest, n)
    items = [(forest.name(v), labels[v]) for v in forest.nodes]
    _emit(format_label_file(scheme.name, n, items), args.output)
    return 0


def cmd_stream(args) -> int:
    if args.scheme is None or args.input is None:
        raise InvalidParams("stream needs --scheme and --input")
    encoder = get_dynamic_encoder(args.scheme)
    seq = parse_events(_read(args.input))
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        print(format_label_header(encoder.name, seq.insertions), file=out, flush=True)
        for external_id, label in run_stream(encoder, seq):
            print(format_label_line(external_id, label), file=out, flush=True)
    finally:
        if args.output:
            out.close()
    return 0


# --- query ---

def cmd_query(args) -> int:
    if args.input is None or args.queries is None:
        raise InvalidParams("query needs --input and --queries")
    scheme_name, n, labels = parse_label_file(_read(args.input))
    if args.scheme is not None and args.scheme != scheme_name:
        raise InvalidParams(f"label file was written by {scheme_name}, not {args.scheme}")
    for node in (args.u, args.v):
        if node not in labels:
            raise MalformedInput(f"node {node!r} not in {args.input}")
    l1, l2 = labels[args.u], labels[args.v]
    if is_dynamic(scheme_name):
        encoder = get_dynamic_encoder(scheme_name)
        decode = lambda q: encoder.decode(q, l1, l2)
    else:
        scheme = get_scheme(scheme_name)
        decode = lambda q: scheme.decode(q, l1, l2, n)
    for q in sorted(QueryKind.parse_csv(args.queries), key=lambda q: q.value):
        try:
            answer = _answer_text(decode(q))
        except CrossTree:
            answer = "cross-tree"
        print(f"{q.value}({args.u},{args.v})={answer}")
    return 0


# --- verify ---

def _outcome(fn, *args):
    try:
        return fn(*args)
    except CrossTree:
        return CrossTree


def _count_mismatches(name: str, q: QueryKind, keys: list, fields: dict, decode, expected) -> int:
    """Compare decode(q, fields[a], fields[b]) with expected(a, b) over every ordered pair.

    Labels arrive already parsed, so each one is split once per forest.
    """
    mismatches = 0
    guarded = q in WITHIN_TREE_QUERIES
    for a in keys:
        fa = fields[a]
        for b in keys:
            if guarded:
                got, want = _outcome(decode, q, fa, fields[b]), _outcome(expected, a, b)
            else:
                got, want = decode(q, fa, fields[b]), expected(a, b)
            if got != want:
                mismatches += 1
                logger.debug("%s %s(%s,%s): expected %s, got %s", name, q.value, a, b, want, got)
    return mismatches


def _verify_static(name: str, seq: EventSequence, queries: frozenset) -> tuple[int, int]:
    scheme = get_scheme(name)
    forest, _ = build_from_events(seq)
    n = forest.n
    fields = {node: scheme.parse(label, n) for node, label in scheme.encode(forest).items()}
    nodes = list(forest.nodes)
    decode = lambda q, f1, f2: scheme.decode_fields(q, f1, f2, n)
    pairs = mismatches = 0
    for q in scheme.queries & queries:
        mismatches += _count_mismatches(name, q, nodes, fields, decode, query_table(forest, q))
        pairs += len(nodes) ** 2
    return pairs, mismatches


def _verify_dynamic(name: str, seq: EventSequence, queries: frozenset) -> tuple[int, int]:
    encoder = get_dynamic_encoder(name)
    emitted = dict(run_stream(encoder, seq))
    live = encoder.live_labels()
    # Persistence: every living node still carries the label it got at insertion.
    mismatches = sum(1 for ext, label in live.items() if emitted[ext] != label)
    pairs = len(live)
    fields = {ext: encoder.parse(label) for ext, label in live.items()}
    keys = list(live)
    if isinstance(encoder, BoundedDegreeEncoder):
        adjacent = graph_adjacency(seq)
        expected = lambda a, b: b in adjacent[a]
        mismatches += _count_mismatches(name, QueryKind.ADJACENCY, keys, fields, encoder.decode_fields, expected)
        return pairs + len(keys) ** 2, mismatches
    forest, id_map = build_from_events(seq)
    for q in encoder.queries & queries:
        table = query_table(forest, q)
        expected = lambda a, b: table(id_map[a], id_map[b])
        mismatches += _count_mismatches(name, q, keys, fields, encoder.decode_fields, expected)
        pairs += len(keys) ** 2
    return pairs, mismatches


def _verify_reduction(name: str, seq: EventSequence) -> tuple[int, int]:
    forest, _ = build_from_events(seq)
    ancestry = reduction_ancestry(name, forest)
    expected = query_table(forest, QueryKind.ANCESTRY)
    root_of = forest.root_of
    pairs = mismatches = 0
    for u in forest.nodes:
        for v in forest.nodes:
            if root_of[u] != root_of[v] or (u == v and name == "anc-via-routing"):
                continue
            pairs += 1
            if ancestry(u, v) != expected(u, v):
                mismatches += 1
    return pairs, mismatches


def verify_scheme(name: str, n: int, trials: int, seed: int, queries: frozenset, removal_rate: float = 0.0) -> tuple[int, int]:
    """Run `trials` seeded random instances of size n; return (pairs checked, mismatches)."""
    total_pairs = total_mismatches = 0
    for trial in range(trials):
        trial_seed = seed * 1_000_003 + trial
        if name in REDUCTIONS:
            result = _verify_reduction(name, random_forest(n, trial_seed))
        elif is_dynamic(name):
            encoder = get_dynamic_encoder(name)
            if isinstance(encoder, BoundedDegreeEncoder):
                seq = random_bounded_degree_graph(n, encoder.k, trial_seed)
            else:
                seq = random_forest(n, trial_seed, removal_rate)
            result = _verify_dynamic(name, seq, queries)
        else:
            result = _verify_static(name, random_forest(n, trial_seed, removal_rate), queries)
        total_pairs += result[0]
        total_mismatches += result[1]
    return total_pairs, total_mismatches


def cmd_verify(args) -> int:
    if args.scheme is None or args.n is None or args.seed is None:
        raise InvalidParams("verify needs --scheme, --n and --seed")
    if args.n < 1:
        raise InvalidParams(f"verify needs --n >= 1, got {args.n}")
    trials = config.DEFAULT_TRIALS if args.trials is None else args.trials
    queries = QueryKind.parse_csv(args.queries) if args.queries else frozenset(QueryKind)
    sizes = range(1, args.n + 1) if args.sweep else [args.n]
    failed = 0
    for n in sizes:
        pairs, mismatches = verify_scheme(args.scheme, n, trials, args.seed, queries, args.removal_rate)
        print(f"scheme={args.scheme} n={n} trials={trials} pairs={pairs} mismatches={mismatches}")
        failed += mismatches
    if failed:
        raise VerificationFailed(f"{failed} mismatch(es) against the oracle")
    return 0


# --- bounds ---

def cmd_bounds(args) -> int:
    certs, counting, intersections, yao, sizes = [], [], [], [], []
    text: list[str] = []
    violations = []

    if args.family in DYNAMIC_KINDS:
        spec = _spec_from_args(args)
        queries = QueryKind.parse_csv(args.queries or DEFAULT_QUERIES[args.family])
        cert = certify_forced_distinct(spec, queries)
        certs.append(cert)
        text.append(writer_text.certificate_lines([cert]))
        if args.scheme:
            emitted = count_distinct_emitted(args.scheme, spec)
            text.append(f"emitted scheme={args.scheme} distinct={emitted} certified={cert.certified_count}\n")
            if emitted < cert.certified_count:
                violations.append((args.scheme, emitted, cert.certified_count))
    elif args.family in STATIC_KINDS:
        if args.n is None:
            raise InvalidParams("--n is required")
        scheme = get_scheme(args.scheme or DEFAULT_STATIC_SCHEME[args.family])
        grid = [(s.a, s.b) for s in divisor_grid(args.n, args.family)]
        report = lemma3_intersection_check(scheme, args.n, grid, args.family, strict=False)
        intersections.append(report)
        violations.extend(report.violations)
        text.append(writer_text.intersection_line(report) + "\n")
    elif args.family in COUNTING_KINDS:
        if args.n is None:
            raise InvalidParams("--n is required")
        report = counting_oracle(args.family, args.n, args.x)
        counting.append(report)
        certs.append(report.to_certificate())
        text.append(writer_text.counting_lines(report))
        text.append(writer_text.certificate_lines([report.to_certificate()]))
    elif args.family is not None:
        raise InvalidParams(f"unknown family {args.family!r}")

    if args.yao:
        if args.n is None:
            raise InvalidParams("--yao needs --n")
        name = args.scheme if args.scheme and is_dynamic(args.scheme) else "dyn-adj-sib"
        expected, bound = yao_expected_max(name, args.n), yao_bound(args.n)
        yao.append((name, args.n, expected, bound))
        text.append(writer_text.yao_line(name, args.n, expected, bound) + "\n")
        if expected < bound:
            violations.append((name, args.n, expected, bound))

    if args.table:
        names = static_scheme_names() + list(DYNAMIC_SCHEMES)
        sizes = measured_sizes(names, [args.n] if args.n else TABLE_SIZES, args.seed or 0)
        text.append(writer_text.size_table(sizes))

    if not (certs or intersections or yao or sizes):
        raise InvalidParams("bounds needs --family, --yao or --table")

    if args.json:
        sys.stdout.write(writer_text.json_document(certs, counting, intersections, yao, sizes))
    else:
        sys.stdout.write("".join(text))
    if args.xlsx:
        path = writer_excel.salva_report_excel(args.xlsx, certs, sizes)
        logger.info("Excel report: %s", path)

    if violations:
        raise BoundViolation(violations)
    missing = [pair for cert in certs for pair in cert.missing_pairs]
    if missing:
        raise WitnessMissing(missing)
    return 0


# --- Parser ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cli.py", description="Schemi di etichettatura per foreste: generazione, verifica e limiti inferiori.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scheme", type=str, help="Nome dello schema (es. adj-sib-kannan, wrap:anc-interval, dyn-triple).")
        p.add_argument("--input", type=str, help="File di input (foresta, eventi o etichette).")
        p.add_argument("--output", type=str, help="File di output (default: stdout).")
        p.add_argument("--n", type=int)
        for name in ("k", "j", "a", "b", "x"):
            p.add_argument(f"--{name}", type=int)
        p.add_argument("--family", type=str, choices=list(DYNAMIC_KINDS + STATIC_KINDS + COUNTING_KINDS) + ["Random"])
        p.add_argument("--queries", type=str, help="Query separate da virgola, es. Adjacency,Sibling.")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--removal-rate", type=float, default=0.0, help="Probabilità di rimuovere una foglia prima di ogni inserimento.")
        p.add_argument("--json", action="store_true")
        return p

    common(sub.add_parser("gen-family", help="Scrive i membri di una famiglia come file di eventi o di foresta."))
    common(sub.add_parser("label", help="Etichetta una foresta con uno schema statico."))
    common(sub.add_parser("stream", help="Esegue un encoder dinamico su un file di eventi."))
    query = common(sub.add_parser("query", help="Risponde a una query date due etichette."))
    query.add_argument("u")
    query.add_argument("v")
    verify = common(sub.add_parser("verify", help="Confronta uno schema con l'oracolo su foreste casuali."))
    verify.add_argument("--sweep", action="store_true", help="Verifica tutte le dimensioni da 1 a --n.")
    bounds = common(sub.add_parser("bounds", help="Stampa certificati e tabelle dei limiti inferiori."))
    bounds.add_argument("--table", action="store_true", help="Tabella delle dimensioni massime misurate.")
    bounds.add_argument("--yao", action="store_true", help="Valore atteso della dimensione massima sulla famiglia uniforme.")
    bounds.add_argument("--xlsx", type=str, help="Salva anche un report Excel.")
    return parser


COMMANDS = {
    "gen-family": cmd_gen_family,
    "label": cmd_label,
    "stream": cmd_stream,
    "query": cmd_query,
    "verify": cmd_verify,
    "bounds": cmd_bounds,
}


def run(argv: Optional[Iterable[str]] = None) -> int:
    """Esegue un comando e restituisce il codice di uscita (0, 1 o 2)."""
    args = build_parser().parse_args(None if argv is None else list(argv))
    try:
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as e:
        print(f"ERRORE: {e}", file=sys.stderr)
        return 2
    except LabelingError as e:
        print(f"ERRORE: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    logging.basicConfig(level=config.LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run())
