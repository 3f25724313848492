"""Depth-first initialization of voter records over the delegate forest.

One traversal assigns every voter a preorder index, the maximal index of
its subtree (endpoint), its two bracket positions (entry and exit of the
tour), and its aggregated voting power. Both counters start at -1 so the
virtual root consumes index 0 and bracket position 0, leaving voters with
indices 1..n and bracket positions 1..2n. Siblings are visited in
ascending address order so every participant derives the same table.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .delegation import VIRTUAL_ROOT, DelegateForest, Snapshot, parse_address
from .errors import IndexOutOfRange, ScenarioError


@dataclass(frozen=True)
class VoterRecord:
    """One voter's initialization data.

    Subtree containment is equivalent to index nesting
    (u.index < v.index <= u.endpoint) and to bracket nesting
    (u.left < v.left < v.right < u.right).
    """

    address: bytes
    stake: int
    index: int
    endpoint: int
    left: int
    right: int
    power: int


@dataclass(frozen=True)
class InitTable:
    """All voter records, ordered by preorder index (virtual root at 0)."""

    n: int
    records: tuple[VoterRecord, ...]
    child_order: str = "ascending-address"

    def record(self, index: int) -> VoterRecord:
        if not 0 <= index <= self.n:
            raise IndexOutOfRange(f"index {index} not in 0..{self.n}")
        return self.records[index]

    def by_address(self) -> dict[bytes, VoterRecord]:
        return {r.address: r for r in self.records[1:]}


def run_preorder(forest: DelegateForest, snap: Snapshot) -> InitTable:
    """Traverse the forest from the virtual root and build the init table."""
    index: dict[bytes, int] = {}
    endpoint: dict[bytes, int] = {}
    left: dict[bytes, int] = {}
    right: dict[bytes, int] = {}
    power: dict[bytes, int] = {}
    n = -1
    n0 = -1
    stack: list[tuple[bytes, bool]] = [(VIRTUAL_ROOT, False)]
    while stack:
        node, exiting = stack.pop()
        if exiting:
            endpoint[node] = n
            for child in forest.children.get(node, ()):
                power[node] += power[child]
            n0 += 1
            right[node] = n0
        else:
            n += 1
            n0 += 1
            index[node] = n
            left[node] = n0
            power[node] = 0 if node == VIRTUAL_ROOT else snap.stakes[node]
            stack.append((node, True))
            for child in reversed(forest.children.get(node, ())):
                stack.append((child, False))
    by_index = sorted(index, key=index.get)
    records = tuple(
        VoterRecord(
            address=node,
            stake=0 if node == VIRTUAL_ROOT else snap.stakes[node],
            index=index[node],
            endpoint=endpoint[node],
            left=left[node],
            right=right[node],
            power=power[node],
        )
        for node in by_index
    )
    return InitTable(n=n, records=records)


# --- table export: address stake power index endpoint left right ----------


def dump_table(table: InitTable) -> str:
    lines = [
        f"{r.address.hex()} {r.stake} {r.power} {r.index} {r.endpoint} {r.left} {r.right}"
        for r in table.records
    ]
    return "\n".join(lines) + "\n"


def save_table(table: InitTable, path: str | Path) -> None:
    Path(path).write_text(dump_table(table))


def load_table(path: str | Path) -> InitTable:
    records = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 7:
            raise ScenarioError(f"{path}:{lineno}: expected 7 fields, got {len(parts)}")
        try:
            records.append(
                VoterRecord(
                    address=parse_address(parts[0]),
                    stake=int(parts[1]),
                    power=int(parts[2]),
                    index=int(parts[3]),
                    endpoint=int(parts[4]),
                    left=int(parts[5]),
                    right=int(parts[6]),
                )
            )
        except ValueError as exc:
            raise ScenarioError(f"{path}:{lineno}: bad record") from exc
    records.sort(key=lambda r: r.index)
    if not records or records[0].index != 0 or [r.index for r in records] != list(range(len(records))):
        raise ScenarioError(f"{path}: records must cover indices 0..n")
    return InitTable(n=len(records) - 1, records=tuple(records))
