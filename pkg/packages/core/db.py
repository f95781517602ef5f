"""
Persistencia SQLite con SQLAlchemy ORM para maxker.

Modelos:
- Run(id, command, field, params JSON, summary JSON, created_at)
- Witness(id, run_id FK, poly, kernel_dim)

APIs:
- init_db(db_url): crea tablas
- get_session(db_url): devuelve una sesión de SQLAlchemy
- save_run(...): guarda una ejecución con sus testigos
"""

from __future__ import annotations

import logging
from datetime import datetime, timezone
from typing import Iterable, Optional

from sqlalchemy import (
    JSON,
    Column,
    DateTime,
    ForeignKey,
    Integer,
    String,
    create_engine,
)
from sqlalchemy.engine import Engine
from sqlalchemy.orm import declarative_base, relationship, sessionmaker, Session

from settings import DEFAULT_DB_URL


logger = logging.getLogger("maxker.db")

Base = declarative_base()


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class Run(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    command = Column(String, nullable=False)
    field = Column(String, nullable=False)
    params = Column(JSON, nullable=True)
    summary = Column(JSON, nullable=True)
    created_at = Column(DateTime, nullable=False, default=_utcnow)

    witnesses = relationship("Witness", back_populates="run", cascade="all, delete-orphan")


class Witness(Base):
    __tablename__ = "witnesses"

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("runs.id", ondelete="CASCADE"), nullable=False)
    poly = Column(String, nullable=False)
    kernel_dim = Column(Integer, nullable=True)

    run = relationship("Run", back_populates="witnesses")


# Un engine y un sessionmaker por URL: los tests usan bases temporales distintas
_engines: dict[str, Engine] = {}
_sessionmakers: dict[str, sessionmaker] = {}


def _key(db_url: Optional[str]) -> str:
    return db_url or DEFAULT_DB_URL


def _get_engine(db_url: Optional[str] = None) -> Engine:
    url = _key(db_url)
    if url in _engines:
        return _engines[url]
    connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}
    engine = create_engine(url, connect_args=connect_args)
    _engines[url] = engine
    return engine


def init_db(db_url: Optional[str] = None) -> Engine:
    """Inicializa la base de datos creando las tablas si no existen."""
    engine = _get_engine(db_url)
    Base.metadata.create_all(engine)
    return engine


def get_session(db_url: Optional[str] = None) -> Session:
    engine = _get_engine(db_url)
    key = _key(db_url)
    if key not in _sessionmakers:
        _sessionmakers[key] = sessionmaker(
            bind=engine,
            autoflush=False,
            autocommit=False,
            expire_on_commit=False,
        )
    return _sessionmakers[key]()


def save_run(
    command: str,
    field: str,
    params: dict,
    summary: dict,
    witnesses: Iterable[tuple[str, Optional[int]]] = (),
    db_url: Optional[str] = None,
) -> int:
    """Guarda la ejecución y sus testigos; devuelve el id de la ejecución."""
    init_db(db_url)
    session = get_session(db_url)
    try:
        run = Run(command=command, field=field, params=params, summary=summary)
        session.add(run)
        session.commit()
        stored = 0
        for poly, dim in witnesses:
            try:
                session.add(Witness(run_id=run.id, poly=poly, kernel_dim=dim))
                session.commit()
                stored += 1
            except Exception as exc:  # noqa: BLE001
                session.rollback()
                logger.error("No se pudo guardar el testigo %s: %s", poly, exc)
        logger.debug("Ejecución %d guardada con %d testigos", run.id, stored)
        return int(run.id)
    finally:
        session.close()


__all__ = [
    "Run",
    "Witness",
    "init_db",
    "get_session",
    "save_run",
]
