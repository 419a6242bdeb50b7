"""
Database Module for the tree search suite
Records command runs and computed search numbers in SQLite
"""

import sqlite3
import logging
from typing import List, Dict, Optional
from datetime import datetime
from pathlib import Path

logger = logging.getLogger(__name__)


class ResultStore:
    """Result ledger for command runs and solutions"""

    def __init__(self, db_path: str = "data/results.db"):
        """
        Initialize database connection

        Args:
            db_path: Path to SQLite database file (":memory:" for tests)
        """
        self.db_path = db_path
        self.conn = None
        self.cursor = None
        self._connect()
        self._create_tables()

    def _connect(self):
        """Establish database connection"""
        try:
            if self.db_path != ":memory:":
                Path(self.db_path).parent.mkdir(parents=True, exist_ok=True)
            self.conn = sqlite3.connect(self.db_path)
            self.cursor = self.conn.cursor()
            self.cursor.execute("PRAGMA foreign_keys = ON")
            logger.info(f"Connected to database: {self.db_path}")
        except Exception as e:
            logger.error(f"Error connecting to database: {e}")
            raise

    def _create_tables(self):
        """Create database tables if they don't exist"""
        try:
            self.cursor.execute("""
                CREATE TABLE IF NOT EXISTS runs (
                    run_id INTEGER PRIMARY KEY AUTOINCREMENT,
                    command TEXT,
                    start_time TEXT,
                    end_time TEXT,
                    status TEXT,
                    exit_code INTEGER,
                    error_message TEXT
                )
            """)

            self.cursor.execute("""
                CREATE TABLE IF NOT EXISTS solutions (
                    solution_id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER,
                    instance_hash TEXT,
                    root INTEGER,
                    k INTEGER,
                    method TEXT,
                    seconds REAL,
                    recorded_at TEXT,
                    FOREIGN KEY (run_id) REFERENCES runs(run_id)
                )
            """)

            self.cursor.execute("""
                CREATE INDEX IF NOT EXISTS idx_solutions_instance
                ON solutions(instance_hash)
            """)

            self.conn.commit()
            logger.debug("Database tables created/verified")

        except Exception as e:
            logger.error(f"Error creating tables: {e}")
            raise

    def start_run(self, command: str) -> int:
        """
        Start a new command run and return its ID

        Returns:
            Run ID, or -1 on failure
        """
        try:
            self.cursor.execute("""
                INSERT INTO runs (command, start_time, status)
                VALUES (?, ?, ?)
            """, (command, datetime.utcnow().isoformat(), 'running'))

            self.conn.commit()
            return self.cursor.lastrowid

        except Exception as e:
            logger.error(f"Error starting run: {e}")
            return -1

    def end_run(self, run_id: int, exit_code: int, error_message: Optional[str] = None):
        """
        Mark a run as finished

        Args:
            run_id: Run ID
            exit_code: Command exit code (0 means completed)
            error_message: Diagnostic for failed runs
        """
        try:
            self.cursor.execute("""
                UPDATE runs SET
                    end_time = ?,
                    status = ?,
                    exit_code = ?,
                    error_message = ?
                WHERE run_id = ?
            """, (
                datetime.utcnow().isoformat(),
                'completed' if exit_code == 0 else 'failed',
                exit_code,
                error_message,
                run_id
            ))

            self.conn.commit()
            logger.info(f"Run {run_id} finished with exit code {exit_code}")

        except Exception as e:
            logger.error(f"Error ending run: {e}")

    def record_solution(self, run_id: int, instance_hash: str, root: int, k: int,
                        method: str, seconds: float) -> bool:
        """
        Store a computed search number

        Returns:
            True if successful, False otherwise
        """
        try:
            self.cursor.execute("""
                INSERT INTO solutions (run_id, instance_hash, root, k, method, seconds, recorded_at)
                VALUES (?, ?, ?, ?, ?, ?, ?)
            """, (run_id, instance_hash, root, k, method, seconds, datetime.utcnow().isoformat()))
            self.conn.commit()
            return True

        except Exception as e:
            logger.error(f"Error recording solution: {e}")
            self.conn.rollback()
            return False

    def get_solutions(self, instance_hash: Optional[str] = None, limit: int = 100) -> List[Dict]:
        """Solutions, newest first, optionally for one instance"""
        try:
            if instance_hash is None:
                self.cursor.execute("""
                    SELECT * FROM solutions ORDER BY solution_id DESC LIMIT ?
                """, (limit,))
            else:
                self.cursor.execute("""
                    SELECT * FROM solutions WHERE instance_hash = ?
                    ORDER BY solution_id DESC LIMIT ?
                """, (instance_hash, limit))

            columns = [desc[0] for desc in self.cursor.description]
            return [dict(zip(columns, row)) for row in self.cursor.fetchall()]

        except Exception as e:
            logger.error(f"Error getting solutions: {e}")
            return []

    def get_runs(self, limit: int = 100) -> List[Dict]:
        """Runs, newest first"""
        try:
            self.cursor.execute("""
                SELECT * FROM runs ORDER BY run_id DESC LIMIT ?
            """, (limit,))
            columns = [desc[0] for desc in self.cursor.description]
            return [dict(zip(columns, row)) for row in self.cursor.fetchall()]

        except Exception as e:
            logger.error(f"Error getting runs: {e}")
            return []

    def close(self):
        """Close database connection"""
        if self.conn:
            self.conn.close()
            logger.info("Database connection closed")
