# The store mapping locations to expressions, values or error sentinels.
import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .ast import Expr, Loc

logger = logging.getLogger(__name__)


class SentinelTag(str, Enum):
    CYCLE = "cycle"
    CONSTRAINT = "constraint"


@dataclass(frozen=True)
class HeapExpr:
    expr: Expr


@dataclass(frozen=True)
class HeapValue:
    value: object


@dataclass(frozen=True)
class ErrorSentinel:
    tag: SentinelTag


class Heap:
    def __init__(self):
        self.store = {}
        self.next_index = 0
        # Rule-level counters used by the memoization property checks
        self.force_counts = Counter()

    def __contains__(self, loc):
        return loc in self.store

    def __len__(self):
        return len(self.store)

    def alloc(self, obj):
        loc = Loc(self.next_index)
        self.next_index += 1
        self.store[loc] = obj
        return loc

    def read(self, loc):
        return self.store[loc]

    def put(self, loc, obj):
        # Initialize or restore a cell; a memoized value is never replaced
        if isinstance(self.store.get(loc), HeapValue):
            raise ValueError(f"{loc} already holds a value")
        self.store[loc] = obj

    def blackhole(self, loc, tag):
        previous = self.store[loc]
        self.store[loc] = ErrorSentinel(SentinelTag(tag))
        return previous

    def memoize(self, loc, value):
        if isinstance(self.store[loc], HeapValue):
            raise ValueError(f"{loc} already holds a value")
        self.store[loc] = HeapValue(value)

    def dump(self):
        lines = []
        for loc in sorted(self.store):
            obj = self.store[loc]
            if isinstance(obj, HeapValue):
                kind = "VALUE"
            elif isinstance(obj, ErrorSentinel):
                kind = f"ERROR({obj.tag.value})"
            else:
                kind = "EXPR"
            lines.append(f"{loc}: {kind}")
        return lines
