import hashlib
import json
import logging
import sqlite3
from typing import List, Optional

from harness import ExperimentReport

logger = logging.getLogger(__name__)


def report_id(report: ExperimentReport) -> str:
    """由配置决定的稳定主键"""
    payload = json.dumps(report.config.model_dump(), sort_keys=True)
    return hashlib.sha1(payload.encode("utf-8")).hexdigest()


class SQLiteReportStore:
    def __init__(self, db_path: str = "reports.db"):
        self.db_path = db_path
        self.init_database()

    def init_database(self):
        """初始化数据库"""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute('''
            CREATE TABLE IF NOT EXISTS reports (
                id TEXT PRIMARY KEY,
                position INTEGER NOT NULL,
                problem TEXT NOT NULL,
                dims INTEGER NOT NULL,
                scheme TEXT NOT NULL,
                topology TEXT NOT NULL,
                payload TEXT NOT NULL,
                created_at TEXT DEFAULT CURRENT_TIMESTAMP
            )
        ''')

        conn.commit()
        conn.close()
        logger.debug("报告库已初始化: %s", self.db_path)

    def add_report(self, report: ExperimentReport) -> str:
        """保存报告 (同一配置再次保存时覆盖, 保留原来的顺序)"""
        rid = report_id(report)
        cfg = report.config
        conn = sqlite3.connect(self.db_path)
        try:
            cursor = conn.cursor()
            cursor.execute('SELECT position FROM reports WHERE id = ?', (rid,))
            row = cursor.fetchone()
            if row is None:
                cursor.execute('SELECT COALESCE(MAX(position), -1) + 1 FROM reports')
                position = cursor.fetchone()[0]
            else:
                position = row[0]

            cursor.execute('''
                INSERT OR REPLACE INTO reports
                (id, position, problem, dims, scheme, topology, payload)
                VALUES (?, ?, ?, ?, ?, ?, ?)
            ''', (
                rid, position, cfg.problem, cfg.dims, cfg.scheme, cfg.topology,
                json.dumps(report.to_dict()),
            ))
            conn.commit()
        finally:
            conn.close()

        logger.debug("报告已保存: %s %dD %s", cfg.problem, cfg.dims, cfg.label)
        return rid

    def list_reports(self, problem: Optional[str] = None, dims: Optional[int] = None) -> List[ExperimentReport]:
        """按保存顺序列出报告, 可按测试函数和维数筛选"""
        query = 'SELECT id, payload FROM reports'
        clauses, params = [], []
        if problem is not None:
            clauses.append('problem = ?')
            params.append(problem)
        if dims is not None:
            clauses.append('dims = ?')
            params.append(dims)
        if clauses:
            query += ' WHERE ' + ' AND '.join(clauses)
        query += ' ORDER BY position'

        conn = sqlite3.connect(self.db_path)
        try:
            rows = conn.execute(query, params).fetchall()
        finally:
            conn.close()

        reports = []
        for rid, payload in rows:
            try:
                reports.append(ExperimentReport.from_dict(json.loads(payload)))
            except Exception as e:
                logger.error("解析报告失败 %s: %s", rid, e)
        logger.debug("查询到 %d 个报告", len(reports))
        return reports
