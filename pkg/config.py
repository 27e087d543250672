import os

basedir = os.path.abspath(os.path.dirname(__file__))


class Config(object):
    LOG_LEVEL = os.environ.get("ALPP_LOG_LEVEL", "WARNING").upper()

    # Exhaustive oracle budget
    ORACLE_MAX_VERTICES = int(os.environ.get("ORACLE_MAX_VERTICES", 16))
    ORACLE_MAX_NODES = int(os.environ.get("ORACLE_MAX_NODES", 5_000_000))
    ORACLE_TIME_LIMIT = float(os.environ.get("ORACLE_TIME_LIMIT", 60.0))  # seconds
    WEIGHTED_ORACLE_MAX_TRIPLES = int(os.environ.get("WEIGHTED_ORACLE_MAX_TRIPLES", 6))

    # Subset DPs are exponential in n
    PATHWIDTH_MAX_VERTICES = int(os.environ.get("PATHWIDTH_MAX_VERTICES", 12))
    TREEWIDTH_MAX_VERTICES = int(os.environ.get("TREEWIDTH_MAX_VERTICES", 12))

    # Colour coding
    CC_MAX_COLORS = int(os.environ.get("CC_MAX_COLORS", 24))
    CC_MAX_TRIALS = int(os.environ.get("CC_MAX_TRIALS", 2_000_000))
    CC_EPSILON = float(os.environ.get("CC_EPSILON", 1e-3))

    # Weighted -> unweighted reduction input caps
    REDUCTION_MAX_WEIGHT = int(os.environ.get("REDUCTION_MAX_WEIGHT", 8))
    REDUCTION_MAX_VERTICES = int(os.environ.get("REDUCTION_MAX_VERTICES", 6))

    DEFAULT_SEED = int(os.environ.get("ALPP_SEED", 0))

    # Bench history
    DATABASE_URI = os.environ.get("DATABASE_URI") or "sqlite:///" + os.path.join(
        basedir + "/config", "bench.db"
    )
