from sqlalchemy.types import TypeDecorator, Text
import json


class Counters(TypeDecorator):
    """Solver counters (name -> int) stored as a sorted JSON object.

    Counter values are coerced to int on the way in; a NULL column reads
    back as an empty map.
    """

    impl = Text
    cache_ok = True

    def process_bind_param(self, value, dialect):
        if value is None:
            return value
        return json.dumps({str(k): int(v) for k, v in value.items()}, sort_keys=True)

    def process_result_value(self, value, dialect):
        if value is None:
            return {}
        return json.loads(value)
