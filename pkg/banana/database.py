"""SQLite run history: one row per `run` invocation and one per check result."""
import json
import logging
import sqlite3
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

logger = logging.getLogger('banana')

HISTORY_FILENAME = 'history.db'


class RunHistory:
    """Run and result records under <cache dir>/history.db."""

    def __init__(self, db_path: Path):
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self._init_db()

    def _init_db(self):
        with sqlite3.connect(str(self.db_path), timeout=30.0) as conn:
            conn.execute('PRAGMA journal_mode=WAL')
            conn.execute('PRAGMA busy_timeout=30000')
            conn.execute('''
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                started_at TEXT,
                finished_at TEXT,
                digits INTEGER,
                jobs INTEGER,
                check_ids TEXT,
                total INTEGER DEFAULT 0,
                passed INTEGER DEFAULT 0,
                failed INTEGER DEFAULT 0,
                skipped INTEGER DEFAULT 0,
                exit_code INTEGER
            )
            ''')
            conn.execute('''
            CREATE TABLE IF NOT EXISTS results (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                run_id INTEGER NOT NULL REFERENCES runs(id),
                check_id TEXT NOT NULL,
                status TEXT NOT NULL,
                digits_matched INTEGER,
                threshold INTEGER,
                runtime_ms INTEGER,
                error TEXT
            )
            ''')
            conn.execute('CREATE INDEX IF NOT EXISTS idx_results_run ON results(run_id)')
            conn.commit()

    @contextmanager
    def get_connection(self):
        """Context manager for database connections with proper cleanup."""
        conn = sqlite3.connect(str(self.db_path), timeout=30.0)
        try:
            conn.execute('PRAGMA journal_mode=WAL')
            conn.row_factory = sqlite3.Row
            yield conn
            conn.commit()
        except Exception:
            conn.rollback()
            raise
        finally:
            conn.close()

    def start_run(self, digits: int, jobs: int, check_ids: List[str]) -> int:
        with self.get_connection() as conn:
            cursor = conn.execute(
                'INSERT INTO runs (started_at, digits, jobs, check_ids) VALUES (?, ?, ?, ?)',
                (datetime.now().isoformat(), digits, jobs, json.dumps(check_ids))
            )
            run_id = cursor.lastrowid
        logger.info(f"Started run #{run_id}: {len(check_ids)} checks at {digits} digits")
        return run_id

    def record_result(self, run_id: int, result: Dict):
        with self.get_connection() as conn:
            conn.execute('''
                INSERT INTO results (run_id, check_id, status, digits_matched, threshold, runtime_ms, error)
                VALUES (?, ?, ?, ?, ?, ?, ?)
            ''', (run_id, result['check_id'], result['status'], result.get('digits_matched'),
                  result.get('threshold'), result.get('runtime_ms'), result.get('error')))

    def finish_run(self, run_id: int, summary: Dict, exit_code: int):
        with self.get_connection() as conn:
            conn.execute('''
                UPDATE runs SET finished_at = ?, total = ?, passed = ?, failed = ?, skipped = ?, exit_code = ?
                WHERE id = ?
            ''', (datetime.now().isoformat(), summary['total'], summary['passed'],
                  summary['failed'], summary['skipped'], exit_code, run_id))

    def recent_runs(self, limit: int = 10) -> List[Dict]:
        with self.get_connection() as conn:
            cursor = conn.execute('SELECT * FROM runs ORDER BY id DESC LIMIT ?', (limit,))
            return [dict(row) for row in cursor.fetchall()]

    def get_run(self, run_id: int) -> Optional[Dict]:
        with self.get_connection() as conn:
            row = conn.execute('SELECT * FROM runs WHERE id = ?', (run_id,)).fetchone()
            return dict(row) if row else None

    def results_for(self, run_id: int) -> List[Dict]:
        with self.get_connection() as conn:
            cursor = conn.execute('SELECT * FROM results WHERE run_id = ? ORDER BY check_id', (run_id,))
            return [dict(row) for row in cursor.fetchall()]
