"""Tests for the SQLite run history."""
import shutil
import sqlite3
import tempfile
import unittest
from pathlib import Path

from banana.database import HISTORY_FILENAME, RunHistory


class TestRunHistory(unittest.TestCase):

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()
        self.db = RunHistory(Path(self.test_dir) / 'nested' / HISTORY_FILENAME)

    def tearDown(self):
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def test_creates_parent_directory(self):
        self.assertTrue(self.db.db_path.exists())

    def test_wal_mode(self):
        with self.db.get_connection() as conn:
            mode = conn.execute('PRAGMA journal_mode').fetchone()[0]
        self.assertEqual(mode, 'wal')

    def test_run_lifecycle(self):
        run_id = self.db.start_run(100, 4, ['thm1.1', 'rwz.f15'])
        self.db.record_result(run_id, {'check_id': 'thm1.1', 'status': 'pass',
                                       'digits_matched': 100, 'threshold': 90, 'runtime_ms': 12})
        self.db.record_result(run_id, {'check_id': 'rwz.f15', 'status': 'fail',
                                       'digits_matched': 3, 'threshold': 90, 'runtime_ms': 5,
                                       'error': 'boom'})
        self.db.finish_run(run_id, {'total': 2, 'passed': 1, 'failed': 1, 'skipped': 0}, 1)

        run = self.db.get_run(run_id)
        self.assertEqual(run['digits'], 100)
        self.assertEqual(run['failed'], 1)
        self.assertEqual(run['exit_code'], 1)
        self.assertIsNotNone(run['finished_at'])

        results = self.db.results_for(run_id)
        self.assertEqual([r['check_id'] for r in results], ['rwz.f15', 'thm1.1'])
        self.assertEqual(results[0]['error'], 'boom')

    def test_recent_runs_newest_first(self):
        first = self.db.start_run(30, 1, [])
        second = self.db.start_run(60, 1, [])
        runs = self.db.recent_runs(limit=1)
        self.assertEqual(len(runs), 1)
        self.assertEqual(runs[0]['id'], second)
        self.assertNotEqual(first, second)

    def test_missing_run(self):
        self.assertIsNone(self.db.get_run(12345))

    def test_failed_transaction_rolls_back(self):
        with self.assertRaises(sqlite3.Error):
            with self.db.get_connection() as conn:
                conn.execute("INSERT INTO runs (digits) VALUES (30)")
                conn.execute("INSERT INTO nowhere VALUES (1)")
        self.assertEqual(self.db.recent_runs(), [])


if __name__ == '__main__':
    unittest.main()
