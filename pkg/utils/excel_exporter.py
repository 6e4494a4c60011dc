"""
Excel Exporter
Styled run report: a summary sheet plus one sheet per metrics table
"""

from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd
from loguru import logger
from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.utils.dataframe import dataframe_to_rows

HEADER_FILL = PatternFill(start_color="4472C4", end_color="4472C4", fill_type="solid")
MAX_SHEET_NAME = 31


class ExcelExporter:
    """Export run results to Excel format"""

    def __init__(self, output_dir: str = "./outputs"):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def export_run_report(
        self,
        summary: Dict[str, Any],
        tables: Dict[str, pd.DataFrame],
        filename: str = "run_report.xlsx",
        title: str = "Merge Run Report",
    ) -> str:
        output_path = self.output_dir / filename
        logger.info(f"Exporting run report to {output_path}")

        wb = Workbook()
        wb.remove(wb.active)

        self._create_summary_sheet(wb, summary, title)
        for name, frame in tables.items():
            if frame is None or frame.empty:
                continue
            self._create_table_sheet(wb, name, frame)

        wb.save(output_path)
        logger.info(f"Run report exported successfully: {output_path}")
        return str(output_path)

    def _create_summary_sheet(self, wb: Workbook, summary: Dict[str, Any], title: str):
        ws = wb.create_sheet("Summary")
        ws["A1"] = title
        ws["A1"].font = Font(size=16, bold=True)

        row = 3
        for key, value in summary.items():
            ws[f"A{row}"] = str(key).replace("_", " ").title()
            ws[f"B{row}"] = value if isinstance(value, (int, float)) else str(value)
            ws[f"A{row}"].font = Font(bold=True)
            row += 1

        ws.column_dimensions["A"].width = 30
        ws.column_dimensions["B"].width = 50

    def _create_table_sheet(self, wb: Workbook, name: str, frame: pd.DataFrame):
        ws = wb.create_sheet(name[:MAX_SHEET_NAME])

        for r_idx, row in enumerate(dataframe_to_rows(frame, index=False, header=True), 1):
            for c_idx, value in enumerate(row, 1):
                cell = ws.cell(row=r_idx, column=c_idx, value=None if pd.isna(value) else value)
                if r_idx == 1:
                    cell.fill = HEADER_FILL
                    cell.font = Font(bold=True, color="FFFFFF")
                    cell.alignment = Alignment(horizontal="center")

        self._auto_width(ws)

    @staticmethod
    def _auto_width(ws, limit: int = 50):
        for column in ws.columns:
            longest = max((len(str(cell.value)) for cell in column if cell.value is not None), default=0)
            ws.column_dimensions[column[0].column_letter].width = min(longest + 2, limit)
