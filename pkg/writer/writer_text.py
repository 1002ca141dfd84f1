# writer/writer_text.py
# Text and JSON rendering of bound certificates, counting reports and the
# measured label-size table. Everything here is a pure function returning a
# string: the CLI decides where it goes, so outputs stay byte-identical.

import json
from fractions import Fraction


def format_fraction(value: Fraction) -> str:
    """Exact rational as 'p' or 'p/q'."""
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def certificate_line(cert) -> str:
    family = cert.family
    return (
        f"family={family.kind} n={family.n} params={family.params_text()} "
        f"certified={cert.certified_count} implied_bits={cert.implied_bits} "
        f"theory={cert.theory_expr}={format_fraction(cert.theory_value)}"
    )


def certificate_lines(certs) -> str:
    lines = []
    for cert in certs:
        lines.append(certificate_line(cert))
        lines.extend(f"# note: {note}" for note in cert.notes)
    return "\n".join(lines) + "\n" if lines else ""


def certificate_record(cert) -> dict:
    family = cert.family
    return {
        "family": family.kind,
        "n": family.n,
        "params": family.params_text(),
        "queries": list(cert.queries),
        "certified": cert.certified_count,
        "implied_bits": cert.implied_bits,
        "theory": {"expr": cert.theory_expr, "value": format_fraction(cert.theory_value)},
        "witness_stats": cert.witness_stats,
        "notes": list(cert.notes),
        "missing_pairs": [list(pair) for pair in cert.missing_pairs],
    }


def counting_lines(report) -> str:
    """One line per forest of the construction, then the total."""
    lines = [
        f"{report.theorem} a={step.a} b={step.b} new_labels>={format_fraction(step.direct)} closed_form={format_fraction(step.closed)}"
        for step in report.steps
    ]
    lines.append(f"{report.theorem} n={report.n} forests={len(report.steps)} total>={format_fraction(report.total)}")
    return "\n".join(lines) + "\n"


def intersection_line(report) -> str:
    return (
        f"intersections family={report.kind} n={report.n} scheme={report.scheme} "
        f"forests={report.forests} pairs={report.pairs_checked} violations={len(report.violations)}"
    )


def yao_line(encoder_name: str, n: int, expected: Fraction, bound: Fraction) -> str:
    return f"yao scheme={encoder_name} n={n} expected_max={format_fraction(expected)} bound={format_fraction(bound)}"


def size_table(rows) -> str:
    """Fixed-width table: one row per scheme, one column per n."""
    sizes = sorted({row["n"] for row in rows})
    schemes = list(dict.fromkeys(row["scheme"] for row in rows))
    measured = {(row["scheme"], row["n"]): row["measured_bits"] for row in rows}
    width = max([len("scheme")] + [len(s) for s in schemes])
    header = "scheme".ljust(width) + "".join(f" {('n=' + str(n)).rjust(9)}" for n in sizes)
    lines = [header, "-" * len(header)]
    for scheme in schemes:
        cells = "".join(f" {str(measured.get((scheme, n), '-')).rjust(9)}" for n in sizes)
        lines.append(scheme.ljust(width) + cells)
    return "\n".join(lines) + "\n"


def json_document(certs=(), counting=(), intersections=(), yao=(), sizes=()) -> str:
    document = {
        "certificates": [certificate_record(c) for c in certs],
        "counting": [
            {
                "theorem": r.theorem,
                "n": r.n,
                "x": r.x,
                "total": format_fraction(r.total),
                "steps": [
                    {"a": s.a, "b": s.b, "new_labels": format_fraction(s.direct), "closed_form": format_fraction(s.closed)}
                    for s in r.steps
                ],
            }
            for r in counting
        ],
        "intersections": [
            {"family": r.kind, "n": r.n, "scheme": r.scheme, "pairs": r.pairs_checked, "violations": len(r.violations)}
            for r in intersections
        ],
        "yao": [
            {"scheme": name, "n": n, "expected_max": format_fraction(e), "bound": format_fraction(b)}
            for name, n, e, b in yao
        ],
        "sizes": list(sizes),
    }
    return json.dumps(document, indent=2, sort_keys=True) + "\n"
