# writer/writer_excel.py
# Salva i risultati del comando `bounds` in un file Excel formattato: un foglio
# con i certificati e un foglio con la tabella delle dimensioni misurate,
# pivotata con pandas (schema sulle righe, n sulle colonne).

import logging
import os

import pandas as pd
from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter
from openpyxl.utils.dataframe import dataframe_to_rows

import config
from writer.writer_text import format_fraction

logger = logging.getLogger(__name__)

HEADER_FONT = Font(bold=True, color="FFFFFF")
HEADER_FILL = PatternFill(start_color="4F81BD", end_color="4F81BD", fill_type="solid")
# Righe con coppie senza testimone (rosso chiaro)
MISSING_FILL = PatternFill(start_color="FFC7CE", end_color="FFC7CE", fill_type="solid")
THIN_BORDER = Border(left=Side(style="thin"), right=Side(style="thin"), top=Side(style="thin"), bottom=Side(style="thin"))


def certificates_frame(certs) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "Family": c.family.kind,
                "n": c.family.n,
                "Params": c.family.params_text(),
                "Queries": ",".join(c.queries),
                "Certified": c.certified_count,
                "Implied bits": c.implied_bits,
                "Theory": f"{c.theory_expr}={format_fraction(c.theory_value)}",
                "Missing pairs": len(c.missing_pairs),
            }
            for c in certs
        ],
        columns=["Family", "n", "Params", "Queries", "Certified", "Implied bits", "Theory", "Missing pairs"],
    )


def sizes_frame(rows) -> pd.DataFrame:
    """Measured bits pivoted to one row per scheme and one column per n."""
    if not rows:
        return pd.DataFrame(columns=["scheme"])
    df = pd.DataFrame(rows)
    table = df.pivot_table(index="scheme", columns="n", values="measured_bits", aggfunc="max", sort=False)
    table.columns = [f"n={n}" for n in table.columns]
    return table.reset_index()


def _write_sheet(ws, df: pd.DataFrame, widths: dict, highlight_col: str | None = None):
    for r in dataframe_to_rows(df, index=False, header=True):
        ws.append(r)

    for cell in ws[1]:
        cell.font = HEADER_FONT
        cell.fill = HEADER_FILL
        cell.alignment = Alignment(horizontal="center", vertical="center", wrap_text=True)
        cell.border = THIN_BORDER

    highlight_idx = list(df.columns).index(highlight_col) + 1 if highlight_col in df.columns else -1
    for row_index, row in enumerate(ws.iter_rows(min_row=2, max_row=ws.max_row), 2):
        for cell in row:
            cell.alignment = Alignment(wrap_text=True, vertical="top")
            cell.border = THIN_BORDER
        if highlight_idx != -1 and ws.cell(row=row_index, column=highlight_idx).value:
            for cell in row:
                cell.fill = MISSING_FILL

    for idx in range(1, len(df.columns) + 1):
        letter = get_column_letter(idx)
        ws.column_dimensions[letter].width = widths.get(letter, 14)


def salva_report_excel(file_path: str, certs=(), size_rows=()) -> str:
    """Scrive il report e restituisce il percorso effettivo del file."""
    if not os.path.isabs(file_path):
        file_path = os.path.join(config.REPORT_DIR, file_path)

    wb = Workbook()
    ws = wb.active
    ws.title = "Certificates"
    _write_sheet(ws, certificates_frame(certs), {"A": 12, "C": 20, "D": 30, "G": 40}, highlight_col="Missing pairs")

    ws_sizes = wb.create_sheet("Label sizes")
    _write_sheet(ws_sizes, sizes_frame(list(size_rows)), {"A": 28})

    wb.save(file_path)
    logger.info("report saved to %s", file_path)
    return file_path
