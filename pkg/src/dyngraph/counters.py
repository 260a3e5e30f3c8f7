"""Operation counters shared between a structure and its sub-engines."""
from __future__ import annotations

from dataclasses import asdict, dataclass

FIELDS = ("engine_queries", "rank1_updates", "rebuilds", "detector_queries")


@dataclass
class Counters:
    engine_queries: int = 0
    rank1_updates: int = 0
    rebuilds: int = 0
    detector_queries: int = 0

    def snapshot(self) -> dict:
        return asdict(self)

    def since(self, before: dict) -> dict:
        now = asdict(self)
        return {k: now[k] - before[k] for k in FIELDS}
