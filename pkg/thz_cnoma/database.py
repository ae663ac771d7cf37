"""
Run history: a small SQLite ledger of simulator invocations.
"""
import json
import logging
import os
from datetime import datetime
from typing import Any, Dict, List, Optional

from sqlalchemy import Column, DateTime, Float, Integer, String, Text, create_engine
from sqlalchemy.orm import declarative_base, scoped_session, sessionmaker

from .errors import SimulationError

logger = logging.getLogger(__name__)

DB_ENV = "THZ_SIM_DB"

Base = declarative_base()


def _seed_text(config: Optional[Dict[str, Any]]) -> Optional[str]:
    seed = (config or {}).get("master_seed")
    return None if seed is None else str(seed)


class RunRecord(Base):
    """One CLI command execution."""

    __tablename__ = "runs"

    id = Column(Integer, primary_key=True)
    timestamp = Column(DateTime, default=datetime.now)
    command = Column(String, nullable=False)
    axis = Column(String, nullable=True)
    master_seed = Column(String)  # u64 does not fit a signed SQLite integer
    num_realizations = Column(Integer)
    status = Column(String, nullable=False)
    duration_s = Column(Float)
    output_path = Column(String, nullable=True)
    config_json = Column(Text, nullable=True)
    error_message = Column(Text, nullable=True)

    @property
    def config(self) -> Dict[str, Any]:
        """Decoded config snapshot, empty when none was stored."""
        return json.loads(self.config_json) if self.config_json else {}

    def __repr__(self):
        return f"<RunRecord(id={self.id}, command={self.command}, status={self.status})>"


class RunHistory:
    """Database manager for recorded runs."""

    def __init__(self, db_path: str = "thz_runs.db"):
        """Open (creating if needed) the SQLite file at ``db_path``."""
        self.db_path = db_path
        logger.info(f"Initializing run history at: {self.db_path}")
        self._ensure_db_directory()
        try:
            self.engine = create_engine(f"sqlite:///{self.db_path}")
            self.Session = scoped_session(sessionmaker(bind=self.engine, expire_on_commit=False))
            Base.metadata.create_all(self.engine)
        except Exception as e:
            logger.error(f"Run history initialization failed: {e}")
            raise SimulationError(f"Cannot open run history {self.db_path}: {e}") from e

    def _ensure_db_directory(self) -> None:
        """Create the database file's parent directory."""
        db_dir = os.path.dirname(self.db_path)
        if db_dir:
            os.makedirs(db_dir, exist_ok=True)
            if not os.access(db_dir, os.W_OK):
                raise SimulationError(f"Run history directory is not writable: {db_dir}")

    def add_run(
        self,
        command: str,
        status: str,
        duration_s: float,
        config: Optional[Dict[str, Any]] = None,
        axis: Optional[str] = None,
        output_path: Optional[str] = None,
        error_message: Optional[str] = None,
    ) -> RunRecord:
        session = self.Session()
        try:
            record = RunRecord(
                command=command,
                axis=axis,
                master_seed=_seed_text(config),
                num_realizations=(config or {}).get("num_realizations"),
                status=status,
                duration_s=duration_s,
                output_path=output_path,
                config_json=json.dumps(config, sort_keys=True) if config is not None else None,
                error_message=error_message,
            )
            session.add(record)
            session.commit()
            logger.info(f"Recorded run: {command} ({status})")
            return record
        except Exception as e:
            session.rollback()
            logger.error(f"Error recording run: {e}")
            raise
        finally:
            session.close()

    def get_runs(self, limit: Optional[int] = None) -> List[RunRecord]:
        """Most recent first."""
        session = self.Session()
        try:
            query = session.query(RunRecord).order_by(RunRecord.id.desc())
            if limit:
                query = query.limit(limit)
            return query.all()
        finally:
            session.close()

    def get_run(self, run_id: int) -> Optional[RunRecord]:
        """Fetch one run by id, or None."""
        session = self.Session()
        try:
            return session.get(RunRecord, run_id)
        finally:
            session.close()

    def get_runs_by_command(self, command: str) -> List[RunRecord]:
        """All runs of one subcommand, newest first."""
        session = self.Session()
        try:
            return (
                session.query(RunRecord)
                .filter_by(command=command)
                .order_by(RunRecord.id.desc())
                .all()
            )
        finally:
            session.close()

    def clear_runs(self) -> None:
        """Delete every recorded run."""
        session = self.Session()
        try:
            session.query(RunRecord).delete()
            session.commit()
            logger.info("Cleared run history")
        except Exception as e:
            session.rollback()
            logger.error(f"Error clearing run history: {e}")
            raise
        finally:
            session.close()

    def close(self) -> None:
        """Release the session and dispose of the engine."""
        self.Session.remove()
        self.engine.dispose()


def history_from_env(db_path: Optional[str] = None) -> Optional[RunHistory]:
    """RunHistory at ``db_path`` or ``$THZ_SIM_DB``; None when neither is set."""
    path = db_path or os.environ.get(DB_ENV)
    return RunHistory(path) if path else None
