"""Delegation event log, snapshots, and acyclic delegate-forest construction.

Every voter holds at most one outgoing delegate edge. Events are totally
ordered by (block_height, timestamp, sequence); a snapshot keeps each
voter's latest edge at or before the cut-off. The snapshot graph is
functional (out-degree at most one), so its cycles are vertex-disjoint;
the forest builder repeatedly deletes the newest edge of every cycle and
finally parents every edge-less node under the virtual root.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping, NamedTuple, Optional

from .errors import MissingStake, OutOfOrderEvent, ScenarioError, SelfDelegation

ADDRESS_LEN = 20
VIRTUAL_ROOT = b"\x00" * ADDRESS_LEN


def address_from_int(value: int) -> bytes:
    """Build a 20-byte address from a small integer (test/scenario helper)."""
    if not 0 < value < 1 << 160:
        raise ValueError(f"address integer out of range: {value}")
    return value.to_bytes(ADDRESS_LEN, "big")


def address_to_hex(address: bytes) -> str:
    return address.hex()


def parse_address(text: str) -> bytes:
    raw = text[2:] if text.startswith(("0x", "0X")) else text
    if len(raw) != 2 * ADDRESS_LEN:
        raise ScenarioError(f"address must be {2 * ADDRESS_LEN} hex chars: {text!r}")
    try:
        return bytes.fromhex(raw)
    except ValueError as exc:
        raise ScenarioError(f"bad address {text!r}") from exc


class OrderKey(NamedTuple):
    """Total order over delegation events; sequence breaks height/time ties."""

    block_height: int
    timestamp: int
    sequence: int


@dataclass(frozen=True)
class DelegationEvent:
    voter: bytes
    delegate: Optional[bytes]  # None = undelegate
    order_key: OrderKey


@dataclass(frozen=True)
class Edge:
    delegate: bytes
    order_key: OrderKey


class DelegationEventLog:
    """Append-only, totally ordered delegation history (single writer)."""

    def __init__(self, events=()):
        self._events: list[DelegationEvent] = []
        for event in events:
            self.ingest(event)

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self) -> Iterator[DelegationEvent]:
        return iter(self._events)

    @property
    def events(self) -> tuple[DelegationEvent, ...]:
        return tuple(self._events)

    def ingest(self, event: DelegationEvent) -> "DelegationEventLog":
        """Append one event; keys must be strictly increasing."""
        if event.voter == VIRTUAL_ROOT:
            raise ScenarioError("the zero address is reserved for the virtual root")
        if event.delegate is not None and event.voter == event.delegate:
            raise SelfDelegation(f"voter {event.voter.hex()} delegating to itself")
        if self._events and event.order_key <= self._events[-1].order_key:
            raise OutOfOrderEvent(
                f"order key {event.order_key} not past {self._events[-1].order_key}"
            )
        self._events.append(event)
        return self

    def delegate_targets(self, cut_off: Optional[OrderKey] = None) -> dict[bytes, bytes]:
        """Current voter -> delegate map (latest event wins, undelegate clears)."""
        return {voter: edge.delegate for voter, edge in self.latest_edges(cut_off).items()}

    def latest_edges(self, cut_off: Optional[OrderKey] = None) -> dict[bytes, Edge]:
        edges: dict[bytes, Edge] = {}
        for event in self._events:
            if cut_off is not None and event.order_key > cut_off:
                break
            if event.delegate is None or event.delegate == VIRTUAL_ROOT:
                edges.pop(event.voter, None)
            else:
                edges[event.voter] = Edge(event.delegate, event.order_key)
        return edges

    def participants(self, cut_off: Optional[OrderKey] = None) -> set[bytes]:
        """Addresses appearing as voter or delegate at or before the cut-off."""
        seen: set[bytes] = set()
        for event in self._events:
            if cut_off is not None and event.order_key > cut_off:
                break
            seen.add(event.voter)
            if event.delegate is not None and event.delegate != VIRTUAL_ROOT:
                seen.add(event.delegate)
        return seen


@dataclass(frozen=True)
class Snapshot:
    """Per-voter latest edge plus stakes, frozen at a cut-off key.

    Every stake holder is a node of the delegate graph; holders without an
    edge become direct children of the virtual root.
    """

    edges: Mapping[bytes, Edge]
    stakes: Mapping[bytes, int]
    cut_off: OrderKey

    @property
    def voters(self) -> tuple[bytes, ...]:
        return tuple(sorted(self.stakes))


def snapshot_at(
    log: DelegationEventLog,
    cut_off: OrderKey,
    stakes: Mapping[bytes, int],
) -> Snapshot:
    """Freeze the log at ``cut_off``: one optional edge per voter, plus stakes."""
    for address, stake in stakes.items():
        if address == VIRTUAL_ROOT:
            raise ScenarioError("the zero address cannot hold stake")
        if stake < 0:
            raise ScenarioError(f"negative stake for {address.hex()}")
    missing = log.participants(cut_off) - set(stakes)
    if missing:
        names = ", ".join(sorted(a.hex() for a in missing))
        raise MissingStake(f"no stake entry for: {names}")
    return Snapshot(edges=log.latest_edges(cut_off), stakes=dict(stakes), cut_off=cut_off)


@dataclass(frozen=True)
class DelegateForest:
    """Acyclic delegate graph rooted at the virtual root (zero address)."""

    parents: Mapping[bytes, bytes]  # voter -> parent, VIRTUAL_ROOT for top-level
    children: Mapping[bytes, tuple[bytes, ...]]  # parent -> kids, ascending address
    deleted_edges: tuple[tuple[bytes, bytes, OrderKey], ...]

    @property
    def size(self) -> int:
        return len(self.parents)


def _find_cycles(edges: Mapping[bytes, Edge]) -> list[list[bytes]]:
    """All cycles of a functional graph, as voter lists, deterministic order."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[bytes, int] = {}
    cycles: list[list[bytes]] = []
    for start in sorted(edges):
        if color.get(start, WHITE) != WHITE:
            continue
        path: list[bytes] = []
        node = start
        while node in edges and color.get(node, WHITE) == WHITE:
            color[node] = GRAY
            path.append(node)
            node = edges[node].delegate
        if color.get(node, WHITE) == GRAY:
            cycles.append(path[path.index(node) :])
        for visited in path:
            color[visited] = BLACK
    return cycles


def build_forest(snap: Snapshot) -> DelegateForest:
    """Resolve the snapshot into a forest under the virtual root.

    For every cycle the edge with the maximal order key is deleted; since
    deleting edges cannot create cycles the loop settles after one sweep,
    but it re-checks until the graph is clean.
    """
    edges = dict(snap.edges)
    deleted: list[tuple[bytes, bytes, OrderKey]] = []
    while True:
        cycles = _find_cycles(edges)
        if not cycles:
            break
        for cycle in cycles:
            voter = max(cycle, key=lambda v: edges[v].order_key)
            edge = edges.pop(voter)
            deleted.append((voter, edge.delegate, edge.order_key))
    parents = {
        voter: (edges[voter].delegate if voter in edges else VIRTUAL_ROOT)
        for voter in snap.stakes
    }
    children: dict[bytes, list[bytes]] = {}
    for voter, parent in parents.items():
        children.setdefault(parent, []).append(voter)
    return DelegateForest(
        parents=parents,
        children={p: tuple(sorted(kids)) for p, kids in children.items()},
        deleted_edges=tuple(sorted(deleted, key=lambda d: d[2])),
    )


def would_create_cycle(targets: Mapping[bytes, bytes], voter: bytes, delegate: bytes) -> bool:
    """Advisory client-side check: would voter -> delegate close a cycle?

    ``targets`` is the current voter -> delegate map; the voter's own old
    edge is irrelevant because the walk stops as soon as it reaches him.
    """
    if voter == delegate:
        return True
    seen: set[bytes] = set()
    node = delegate
    while node != VIRTUAL_ROOT and node in targets:
        if node == voter:
            return True
        if node in seen:
            return False  # ran into a pre-existing cycle elsewhere
        seen.add(node)
        node = targets[node]
    return node == voter


# --- file formats ---------------------------------------------------------
# events:  voter_hex  delegate_hex|-  block_height  timestamp  sequence
# stakes:  voter_hex  stake


def load_events(path: str | Path) -> DelegationEventLog:
    log = DelegationEventLog()
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ScenarioError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
        voter = parse_address(parts[0])
        delegate = None if parts[1] == "-" else parse_address(parts[1])
        try:
            key = OrderKey(int(parts[2]), int(parts[3]), int(parts[4]))
        except ValueError as exc:
            raise ScenarioError(f"{path}:{lineno}: bad order key") from exc
        log.ingest(DelegationEvent(voter, delegate, key))
    return log


def save_events(log: DelegationEventLog, path: str | Path) -> None:
    lines = []
    for event in log:
        target = "-" if event.delegate is None else event.delegate.hex()
        k = event.order_key
        lines.append(f"{event.voter.hex()} {target} {k.block_height} {k.timestamp} {k.sequence}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_stakes(path: str | Path) -> dict[bytes, int]:
    stakes: dict[bytes, int] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ScenarioError(f"{path}:{lineno}: expected 2 fields, got {len(parts)}")
        address = parse_address(parts[0])
        if address in stakes:
            raise ScenarioError(f"{path}:{lineno}: duplicate stake entry")
        try:
            stakes[address] = int(parts[1])
        except ValueError as exc:
            raise ScenarioError(f"{path}:{lineno}: bad stake") from exc
    return stakes


def save_stakes(stakes: Mapping[bytes, int], path: str | Path) -> None:
    lines = [f"{addr.hex()} {stake}" for addr, stake in sorted(stakes.items())]
    Path(path).write_text("\n".join(lines) + "\n")
