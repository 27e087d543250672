from alpp.model_types import Counters
from config import Config
from sqlalchemy import (
    Column,
    String,
    Boolean,
    Integer,
    Float,
    DateTime,
    Uuid,
    create_engine,
)
from sqlalchemy.sql import func
from sqlalchemy.orm import sessionmaker, declarative_base
import logging
import os
import uuid

logger = logging.getLogger(__name__)

Base = declarative_base()


class BenchRun(Base):
    """One (instance, algorithm, repetition) measurement from `alpp bench`."""

    __tablename__ = "bench_run"

    uuid = Column(
        Uuid(as_uuid=True), primary_key=True, index=True, unique=True, default=lambda: uuid.uuid4()
    )
    created_at = Column(DateTime(timezone=True), server_default=func.now())
    corpus = Column(String(512), nullable=False)
    instance = Column(String(512), nullable=False)
    digest = Column(String(64), index=True, nullable=False)
    algorithm = Column(String(32), nullable=False)
    decision = Column(Boolean, nullable=False)
    maximum = Column(Integer, nullable=True)  # None for decision-only solvers
    seconds = Column(Float, nullable=False)
    repetition = Column(Integer, nullable=False, default=0)
    stats = Column(Counters, nullable=True)

    def __repr__(self):
        return "<BenchRun {}>".format(self.uuid)

    @property
    def serialize(self):
        return {
            "uuid": str(self.uuid),
            "corpus": self.corpus,
            "instance": self.instance,
            "digest": self.digest,
            "algorithm": self.algorithm,
            "decision": self.decision,
            "maximum": self.maximum,
            "seconds": self.seconds,
            "repetition": self.repetition,
            "stats": self.stats or {},
        }


def open_session(uri=None):
    """Session on `uri` (default Config.DATABASE_URI), creating tables as needed."""
    uri = uri or Config.DATABASE_URI
    if uri.startswith("sqlite:///") and uri != "sqlite:///:memory:":
        folder = os.path.dirname(uri[len("sqlite:///") :])
        if folder:
            os.makedirs(folder, exist_ok=True)
    engine = create_engine(uri)
    Base.metadata.create_all(engine)
    logger.debug(f"bench history at {uri}")
    return sessionmaker(bind=engine)()
