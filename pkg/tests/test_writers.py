import json
from fractions import Fraction

from openpyxl import load_workbook

import config
from bounds import certify_forced_distinct, counting_oracle, measured_sizes
from families import FamilySpec
from forest import QueryKind
from writer import writer_excel, writer_text


def fn_certificate():
    return certify_forced_distinct(FamilySpec("Fn", 10), {QueryKind.ADJACENCY})


def missing_certificate():
    return certify_forced_distinct(FamilySpec("Fn", 5), {QueryKind.CONNECTIVITY})


def test_format_fraction():
    assert writer_text.format_fraction(Fraction(4)) == "4"
    assert writer_text.format_fraction(Fraction(29, 6)) == "29/6"


def test_certificate_lines_with_note():
    lines = writer_text.certificate_lines([fn_certificate()]).splitlines()
    assert lines[0] == "family=Fn n=10 params=all certified=46 implied_bits=6 theory=n+(n-2)(n-1)/2=46"
    assert lines[1].startswith("# note: literal proof sum")
    assert writer_text.certificate_lines([]) == ""


def test_counting_lines():
    text = writer_text.counting_lines(counting_oracle("Warmup", 9))
    assert text == (
        "Warmup a=1 b=1 new_labels>=9 closed_form=9/2\n"
        "Warmup a=3 b=1 new_labels>=6 closed_form=9/2\n"
        "Warmup a=9 b=1 new_labels>=5 closed_form=9/2\n"
        "Warmup n=9 forests=3 total>=20\n"
    )


def test_size_table_layout():
    rows = [
        {"scheme": "adj-sib-kannan", "n": 16, "measured_bits": 8, "size_function": 8},
        {"scheme": "dyn-conn", "n": 16, "measured_bits": 8, "size_function": None},
        {"scheme": "adj-sib-kannan", "n": 256, "measured_bits": 16, "size_function": 16},
    ]
    lines = writer_text.size_table(rows).splitlines()
    assert lines[0].split() == ["scheme", "n=16", "n=256"]
    assert set(lines[1]) == {"-"}
    assert lines[2].split() == ["adj-sib-kannan", "8", "16"]
    assert lines[3].split() == ["dyn-conn", "8", "-"]


def test_json_document_is_stable():
    certs = [fn_certificate()]
    counting = [counting_oracle("Thm6", 27)]
    first = writer_text.json_document(certs, counting)
    assert first == writer_text.json_document(certs, counting)
    document = json.loads(first)
    assert document["certificates"][0]["certified"] == 46
    assert document["certificates"][0]["theory"] == {"expr": "n+(n-2)(n-1)/2", "value": "46"}
    assert document["counting"][0]["total"] == "74"
    assert document["yao"] == []


def test_missing_pairs_in_record():
    record = writer_text.certificate_record(missing_certificate())
    assert record["missing_pairs"]
    assert record["witness_stats"]["missing"] == len(record["missing_pairs"])


def test_excel_report(tmp_path):
    rows = measured_sizes(["adj-sib-kannan", "dyn-triple"], [16, 64], seed=0)
    path = writer_excel.salva_report_excel(str(tmp_path / "report.xlsx"), [fn_certificate(), missing_certificate()], rows)
    wb = load_workbook(path)
    assert wb.sheetnames == ["Certificates", "Label sizes"]

    certs = wb["Certificates"]
    assert [c.value for c in certs[1]] == [
        "Family", "n", "Params", "Queries", "Certified", "Implied bits", "Theory", "Missing pairs",
    ]
    assert certs["E2"].value == 46
    assert certs["A2"].fill.start_color.rgb != writer_excel.MISSING_FILL.start_color.rgb
    assert certs["A3"].fill.start_color.rgb == writer_excel.MISSING_FILL.start_color.rgb

    sizes = wb["Label sizes"]
    assert [c.value for c in sizes[1]] == ["scheme", "n=16", "n=64"]
    assert [c.value for c in sizes[2]] == ["adj-sib-kannan", 8, 12]
    assert [c.value for c in sizes[3]] == ["dyn-triple", 12, 18]


def test_excel_relative_path_goes_to_report_dir(tmp_path, monkeypatch):
    monkeypatch.setattr(config, "REPORT_DIR", str(tmp_path))
    path = writer_excel.salva_report_excel("only-certs.xlsx", [fn_certificate()])
    assert path == str(tmp_path / "only-certs.xlsx")
    assert load_workbook(path)["Label sizes"]["A1"].value == "scheme"
