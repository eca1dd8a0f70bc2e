"""
Solution pool for the iterative solver
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

RAW = "raw"
REFINED = "refined"


@dataclass(frozen=True)
class PoolEntry:
    """One distinct bitstring with the exact objective value and provenance"""

    bitstring: str
    energy: float
    iteration: int
    source: str

    @property
    def rank_key(self):
        return (self.energy, self.bitstring)


class SolutionPool:
    """Deduplicated candidates keyed by bitstring; first provenance wins"""

    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        self.entries: Dict[str, PoolEntry] = {}
        self.records: List = []

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, bitstring: str) -> bool:
        return bitstring in self.entries

    def add(self, entry: PoolEntry) -> bool:
        """Insert unless the bitstring is already pooled"""
        if entry.bitstring in self.entries:
            return False
        self.entries[entry.bitstring] = entry
        return True

    def merge(self, entries: Iterable[PoolEntry]) -> int:
        return sum(1 for e in entries if self.add(e))

    @property
    def best(self) -> Optional[PoolEntry]:
        if not self.entries:
            return None
        return min(self.entries.values(), key=lambda e: e.rank_key)

    def ranked(self) -> List[PoolEntry]:
        """All entries by (energy, bitstring)"""
        return sorted(self.entries.values(), key=lambda e: e.rank_key)

    def top(self, k: int) -> List[PoolEntry]:
        return self.ranked()[:k]
