"""
결과 보고서 출력 유틸리티 (CSV / JSON / Excel)
"""
import csv
import io
import json
import logging
import math
from typing import Any, Dict, List, Optional

from models.sweep_report import SweepReport

try:
    from openpyxl import Workbook
    from openpyxl.styles import Alignment, Font, PatternFill
    EXCEL_SUPPORT = True
except ImportError:
    EXCEL_SUPPORT = False

logger = logging.getLogger(__name__)


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        return ''
    # 17 유효숫자: 64비트 실수 왕복 정확
    return format(value, '.17g')


def format_cell(value: Any) -> str:
    """CSV 셀 문자열 ('.' 소수점, 천 단위 구분자 없음)"""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, (list, tuple)):
        return ';'.join(format_cell(v) for v in value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def to_csv_text(report: SweepReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([format_cell(row[column]) for column in report.columns])
    return buffer.getvalue()


def to_json_text(report: SweepReport) -> str:
    rows: List[Dict[str, Any]] = [
        {column: _json_value(row[column]) for column in report.columns} for row in report.rows
    ]
    return json.dumps(rows, ensure_ascii=False, indent=2) + '\n'


def write_xlsx(report: SweepReport, filename: str):
    """보고서를 Excel 시트로 저장 (굵은 회색 머리글, 열 너비 자동 조정)"""
    if not EXCEL_SUPPORT:
        raise ImportError("Excel 출력을 위해 openpyxl을 설치해주세요: pip install openpyxl")

    wb = Workbook()
    ws = wb.active
    ws.title = report.command

    for col, header in enumerate(report.columns, 1):
        cell = ws.cell(row=1, column=col, value=header)
        cell.font = Font(bold=True)
        cell.fill = PatternFill(start_color='CCCCCC', end_color='CCCCCC', fill_type='solid')
        cell.alignment = Alignment(horizontal='center')

    for row_idx, row in enumerate(report.rows, 2):
        for col, column in enumerate(report.columns, 1):
            value = row[column]
            if isinstance(value, (list, tuple)):
                value = format_cell(value)
            elif isinstance(value, float) and not math.isfinite(value):
                value = None
            ws.cell(row=row_idx, column=col, value=value)

    for column in ws.columns:
        max_length = 0
        column_letter = column[0].column_letter
        for cell in column:
            if cell.value is not None:
                max_length = max(max_length, len(str(cell.value)))
        ws.column_dimensions[column_letter].width = min(max_length + 2, 50)

    wb.save(filename)


def write_report(report: SweepReport, fmt: str, path: Optional[str] = None) -> Optional[str]:
    """
    보고서 출력

    Args:
        report: 결과 보고서
        fmt: 'csv' | 'json' | 'xlsx'
        path: 저장 경로 (없으면 텍스트를 반환)

    Returns:
        Optional[str]: path 가 없을 때의 출력 텍스트
    """
    if fmt == 'xlsx':
        if not path:
            raise ValueError("xlsx 출력에는 --out 경로가 필요합니다")
        write_xlsx(report, path)
        logger.info(f"Excel 보고서 저장 완료: {path}")
        return None

    if fmt == 'csv':
        text = to_csv_text(report)
    elif fmt == 'json':
        text = to_json_text(report)
    else:
        raise ValueError(f"지원하지 않는 출력 형식입니다: {fmt}")

    if path is None:
        return text
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    logger.info(f"{fmt.upper()} 보고서 저장 완료: {path} ({len(report)} 행)")
    return None
