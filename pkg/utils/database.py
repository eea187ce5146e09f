import json
import sqlite3
from datetime import datetime
from pathlib import Path

import pandas as pd
from loguru import logger


class RunRegistry:
    """sqlite index of CLI runs and their artifacts"""

    def __init__(self, db_path="speclab_runs.db"):
        Path(db_path).parent.mkdir(parents=True, exist_ok=True)
        self.db_path = str(db_path)
        self.init_database()

    def init_database(self):
        """Initialize database with required tables"""
        with sqlite3.connect(self.db_path) as conn:
            conn.execute("""
            CREATE TABLE IF NOT EXISTS run_metadata (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                subcommand TEXT,
                seed INTEGER,
                workers INTEGER,
                out_dir TEXT,
                config TEXT,
                started TEXT,
                duration REAL,
                exit_code INTEGER,
                error_message TEXT
            )
            """)
            conn.execute("""
            CREATE TABLE IF NOT EXISTS artifact_index (
                run_id INTEGER,
                name TEXT,
                sha256 TEXT,
                PRIMARY KEY (run_id, name)
            )
            """)
            conn.commit()

    def record_run(self, subcommand, seed, workers, out_dir, config, started, duration,
                   exit_code, artifacts=None, error_message=None):
        """Store one run with its artifact checksums; returns the run id"""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.execute("""
                INSERT INTO run_metadata
                (subcommand, seed, workers, out_dir, config, started, duration, exit_code, error_message)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)
                """, (subcommand, int(seed) & ((1 << 63) - 1), workers, str(out_dir),
                      json.dumps(config, sort_keys=True), started.isoformat(), duration,
                      exit_code, error_message))
                run_id = cursor.lastrowid
                for name, digest in (artifacts or {}).items():
                    conn.execute("INSERT OR REPLACE INTO artifact_index VALUES (?, ?, ?)",
                                 (run_id, name, digest))
                conn.commit()
            return run_id
        except sqlite3.Error as e:
            self.log_error("record_run", str(e))
            return None

    def list_runs(self, subcommand=None, limit=50):
        query = "SELECT id, subcommand, seed, workers, out_dir, started, duration, exit_code FROM run_metadata"
        params = ()
        if subcommand:
            query += " WHERE subcommand = ?"
            params = (subcommand,)
        query += " ORDER BY id DESC LIMIT ?"
        params = params + (int(limit),)
        with sqlite3.connect(self.db_path) as conn:
            return pd.read_sql_query(query, conn, params=params)

    def get_artifacts(self, run_id):
        with sqlite3.connect(self.db_path) as conn:
            return pd.read_sql_query(
                "SELECT name, sha256 FROM artifact_index WHERE run_id = ? ORDER BY name",
                conn, params=(int(run_id),))

    def get_config(self, run_id):
        with sqlite3.connect(self.db_path) as conn:
            row = conn.execute("SELECT config FROM run_metadata WHERE id = ?", (int(run_id),)).fetchone()
        return json.loads(row[0]) if row else None

    def log_error(self, operation, error_message):
        """Log errors for debugging"""
        logger.error(f"{datetime.now().isoformat()} - {operation}: {error_message}")
