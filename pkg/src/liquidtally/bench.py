"""Chain-topology benchmark: modeled per-vote gas for both algorithms.

The delegate graph is an n-chain (voter i delegates to voter i-1), the
adversarial shape for naive tallying. One vote is cast at the head (the
top of the chain, preorder index 1) or the tail (index n) and its storage
traffic is converted to gas. Merkle verification enters the model as
reads, with hashing itself priced at zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .delegation import (
    DelegateForest,
    DelegationEvent,
    DelegationEventLog,
    OrderKey,
    Snapshot,
    address_from_int,
    snapshot_at,
    build_forest,
)
from .engine import TallySession, VoteMessage
from .gas import GasLedger, GasSchedule, gas_of
from .merkle import MerkleTree
from .oracle import OracleState, oracle_vote
from .preorder import InitTable, run_preorder

POSITIONS = ("head", "tail")
ALGOS = ("fast", "traversal")


@dataclass(frozen=True)
class BenchResult:
    n: int
    position: str
    algo: str
    reads: int
    fresh_writes: int
    rewrites: int
    gas: int
    visits: int  # interval-tree node visits (fast) or walked nodes (traversal)


def build_chain(n: int) -> tuple[Snapshot, DelegateForest, InitTable]:
    """n-chain with unit stakes, run through the regular pipeline."""
    if n < 2:
        raise ValueError("chain needs at least two voters")
    log = DelegationEventLog()
    for i in range(2, n + 1):
        log.ingest(
            DelegationEvent(address_from_int(i), address_from_int(i - 1), OrderKey(i, 0, 0))
        )
    stakes = {address_from_int(i): 1 for i in range(1, n + 1)}
    snap = snapshot_at(log, OrderKey(n + 1, 0, 0), stakes)
    forest = build_forest(snap)
    return snap, forest, run_preorder(forest, snap)


def bench_chain(
    n: int,
    position: str = "head",
    algo: str = "fast",
    schedule: GasSchedule = GasSchedule(),
) -> BenchResult:
    """Model the gas of a single vote on a fresh n-chain session."""
    if position not in POSITIONS:
        raise ValueError(f"position must be one of {POSITIONS}")
    if algo not in ALGOS:
        raise ValueError(f"algo must be one of {ALGOS}")
    snap, forest, table = build_chain(n)
    voter_index = 1 if position == "head" else n
    voter = table.record(voter_index).address
    ledger = GasLedger()
    if algo == "fast":
        tree = MerkleTree.from_table(table)
        session = TallySession(table.n, tree.root)
        msg = VoteMessage(
            sender=voter,
            claimed=table.record(voter_index),
            proof=tree.prove_leaf(voter_index - 1),
            candidate="A",
        )
        session.attach_ledger(ledger)
        session.process_vote(msg)
        visits = session.tree_visits
    else:
        state = OracleState(forest, snap)
        state.attach_ledger(ledger)
        oracle_vote(state, voter, "A")
        visits = state.walk_visits
    return BenchResult(
        n=n,
        position=position,
        algo=algo,
        reads=ledger.reads,
        fresh_writes=ledger.fresh_writes,
        rewrites=ledger.rewrites,
        gas=gas_of(ledger, schedule),
        visits=visits,
    )


def bench_grid(
    n_list: Iterable[int],
    positions: Iterable[str] = POSITIONS,
    algos: Iterable[str] = ALGOS,
    schedule: GasSchedule = GasSchedule(),
) -> list[BenchResult]:
    return [
        bench_chain(n, position, algo, schedule)
        for position in positions
        for algo in algos
        for n in n_list
    ]


def format_bench_table(results: Iterable[BenchResult]) -> str:
    header = f"{'n':>8} {'position':>8} {'algo':>9} {'reads':>8} {'fresh_writes':>12} {'rewrites':>8} {'modeled_gas':>12}"
    lines = [header]
    for r in results:
        lines.append(
            f"{r.n:>8} {r.position:>8} {r.algo:>9} {r.reads:>8} {r.fresh_writes:>12} {r.rewrites:>8} {r.gas:>12}"
        )
    return "\n".join(lines)


def plot_data(results: Iterable[BenchResult], position: str) -> str:
    """Per-position curve file: one line per n, traversal and fast columns."""
    by_n: dict[int, dict[str, int]] = {}
    for r in results:
        if r.position == position:
            by_n.setdefault(r.n, {})[r.algo] = r.gas
    lines = ["# n traversal fast"]
    for n in sorted(by_n):
        row = by_n[n]
        lines.append(f"{n} {row.get('traversal', '-')} {row.get('fast', '-')}")
    return "\n".join(lines) + "\n"
