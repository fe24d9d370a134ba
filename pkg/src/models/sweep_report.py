"""
명령 결과 표 (SweepReport)
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List

OUTAGE_COLUMNS = ['snr_db', 'k', 'p_out_mc', 'p_out_mc_stderr', 'p_out_asy', 'runtime_ms']
LTAT_COLUMNS = ['snr_db', 'k', 'p_out_asy', 'ltat_asy', 'ltat_mc', 'runtime_ms']
OPTIMIZE_COLUMNS = ['snr_db', 'epsilon', 'feasible', 'ltat_variable', 'ltat_fixed', 'ltat_grid',
                    'rates', 'rates_fixed', 'outage', 'outer_iterations', 'runtime_ms']
SELFTEST_COLUMNS = ['suite', 'passed', 'detail']


@dataclass
class SweepReport:
    """명령별로 고정된 열 집합을 갖는 결과 행 목록"""
    command: str
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)

    def add_row(self, **values: Any) -> Dict[str, Any]:
        unknown = set(values) - set(self.columns)
        if unknown:
            raise KeyError(f"{self.command} 보고서에 없는 열입니다: {sorted(unknown)}")
        row = {column: values.get(column) for column in self.columns}
        self.rows.append(row)
        return row

    def column(self, name: str) -> List[Any]:
        return [row[name] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)
