"""Storage-operation accounting in the style of EVM gas pricing.

Only storage traffic is modeled: the first write to a key over the
contract lifetime is priced as a fresh write, later writes as rewrites,
and every load as a read. Computation and hashing are modeled at zero
cost. Sparse maps read unassigned keys as a default without allocating,
matching contract mapping semantics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Hashable, Optional

from .errors import ScenarioError


@dataclass
class GasLedger:
    """Counts of storage operations, reset between votes."""

    reads: int = 0
    fresh_writes: int = 0
    rewrites: int = 0

    def reset(self) -> None:
        self.reads = 0
        self.fresh_writes = 0
        self.rewrites = 0

    def total_writes(self) -> int:
        return self.fresh_writes + self.rewrites


def record_op(ledger: GasLedger, kind: str) -> None:
    """Increment one counter; kind is read, fresh_write, or rewrite."""
    if kind == "read":
        ledger.reads += 1
    elif kind == "fresh_write":
        ledger.fresh_writes += 1
    elif kind == "rewrite":
        ledger.rewrites += 1
    else:
        raise ValueError(f"unknown op kind: {kind}")


@dataclass(frozen=True)
class GasSchedule:
    """Per-operation prices and the block ceiling."""

    cost_fresh_write: int = 20000
    cost_rewrite: int = 5000
    cost_read: int = 200
    block_gas_limit: int = 6_750_000

    @classmethod
    def from_json(cls, path: str | Path) -> "GasSchedule":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"bad gas schedule file {path}: {exc}") from exc
        unknown = set(raw) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ScenarioError(f"unknown gas schedule keys: {sorted(unknown)}")
        return cls(**raw)


def gas_of(ledger: GasLedger, schedule: GasSchedule) -> int:
    return (
        ledger.fresh_writes * schedule.cost_fresh_write
        + ledger.rewrites * schedule.cost_rewrite
        + ledger.reads * schedule.cost_read
    )


class StorageMap:
    """Sparse key-value store with first-write tracking and optional metering.

    Unset keys read as ``default``. The set of ever-written keys survives
    ledger swaps, so fresh-versus-rewrite classification spans the whole
    contract lifetime even when individual votes are metered separately.
    ``peek`` bypasses metering for inspection.
    """

    __slots__ = ("name", "default", "ledger", "_data", "_written")

    def __init__(self, name: str, default: Any = 0):
        self.name = name
        self.default = default
        self.ledger: Optional[GasLedger] = None
        self._data: dict[Hashable, Any] = {}
        self._written: set[Hashable] = set()

    def read(self, key: Hashable) -> Any:
        ledger = self.ledger
        if ledger is not None:
            ledger.reads += 1
        return self._data.get(key, self.default)

    def write(self, key: Hashable, value: Any) -> None:
        ledger = self.ledger
        if ledger is not None:
            if key in self._written:
                ledger.rewrites += 1
            else:
                ledger.fresh_writes += 1
        self._written.add(key)
        self._data[key] = value

    def peek(self, key: Hashable) -> Any:
        return self._data.get(key, self.default)

    def snapshot(self) -> dict:
        return dict(self._data)

    def __len__(self) -> int:
        return len(self._data)
