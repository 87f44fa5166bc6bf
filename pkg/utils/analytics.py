import pandas as pd
from typing import Dict, List


class CheckReport:
    COLUMNS = ["check", "subject", "passed", "detail"]

    def __init__(self, title: str = "checks"):
        """
        Collect pass/fail rows from property and universal-property checks

        Args:
            title: heading printed above the text table
        """
        self.title = title
        self.rows: List[Dict] = []

    def add(self, check: str, subject: str, passed: bool, detail: str = "") -> bool:
        self.rows.append({'check': check, 'subject': subject, 'passed': bool(passed), 'detail': detail})
        return bool(passed)

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=self.COLUMNS)

    def summary(self) -> pd.DataFrame:
        """Passed and total counts per check"""
        df = self.frame()
        if df.empty:
            return pd.DataFrame(columns=['check', 'passed', 'total'])
        grouped = df.groupby('check', sort=True)['passed']
        return pd.DataFrame({'passed': grouped.sum().astype(int),
                             'total': grouped.count()}).reset_index()

    @property
    def all_passed(self) -> bool:
        return all(row['passed'] for row in self.rows)

    def to_text(self) -> str:
        if not self.rows:
            return f"{self.title}: no checks"
        table = self.frame().to_string(index=False)
        failed = sum(not row['passed'] for row in self.rows)
        return f"{self.title}\n{table}\n{len(self.rows) - failed} passed, {failed} failed"

    def to_json(self) -> str:
        return self.frame().to_json(orient='records')
