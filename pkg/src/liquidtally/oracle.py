"""Brute-force tally reference built on explicit graph walks.

Written against the semantic definition only: a voter's power lands with
the candidate chosen by its nearest voted ancestor-or-self. Nothing here
touches preorder indices, brackets, or interval trees, which is what makes
the differential comparison against the engine meaningful.

As a modeled naive contract it stores the adjacency, stakes, voted flags,
chosen candidates, tallies, and one eagerly maintained nearest-voted
pointer per node. A vote sweeps the voter's subtree (stopping at voters
who already cast a ballot) to sum the uncommitted stakes, rewrites the
pointer of every swept descendant, then moves that sum between candidate
tallies. The sweep touches every live descendant, so a vote near the root
of a chain costs a linear number of storage writes, the behavior the
interval-tree engine exists to avoid.
"""

from __future__ import annotations

from typing import Optional

from .delegation import VIRTUAL_ROOT, DelegateForest, Snapshot
from .errors import AlreadyVoted
from .gas import GasLedger, StorageMap


class OracleState:
    """Naive tally state over the same snapshot and forest as the engine."""

    def __init__(self, forest: DelegateForest, snap: Snapshot):
        self.parents = StorageMap("parent")
        self.children = StorageMap("children", ())
        self.stakes = StorageMap("stake", 0)
        self.voted = StorageMap("voted", 0)
        self.candidate_of = StorageMap("candidate", None)
        self.nearest_voted = StorageMap("nearest_voted", VIRTUAL_ROOT)
        self.tallies = StorageMap("tallies", 0)
        for voter, parent in forest.parents.items():
            self.parents.write(voter, parent)
            self.stakes.write(voter, snap.stakes[voter])
        for parent, kids in forest.children.items():
            self.children.write(parent, kids)
        self._maps = (
            self.parents,
            self.children,
            self.stakes,
            self.voted,
            self.candidate_of,
            self.nearest_voted,
            self.tallies,
        )
        self.ledger: Optional[GasLedger] = None
        self.walk_visits = 0

    def attach_ledger(self, ledger: Optional[GasLedger]) -> None:
        self.ledger = ledger
        for m in self._maps:
            m.ledger = ledger

    def clone(self) -> "OracleState":
        other = object.__new__(OracleState)
        for name in ("parents", "children", "stakes", "voted", "candidate_of",
                     "nearest_voted", "tallies"):
            src: StorageMap = getattr(self, name)
            dst = StorageMap(src.name, src.default)
            dst._data = dict(src._data)
            dst._written = set(src._written)
            setattr(other, name, dst)
        other._maps = (other.parents, other.children, other.stakes, other.voted,
                       other.candidate_of, other.nearest_voted, other.tallies)
        other.ledger = None
        other.walk_visits = self.walk_visits
        return other

    def tally(self) -> dict[str, int]:
        return {c: v for c, v in self.tallies.snapshot().items() if c is not None}


def oracle_vote(state: OracleState, voter: bytes, candidate: str) -> dict[str, int]:
    """Apply one direct vote by walking the delegate graph."""
    if state.voted.read(voter):
        raise AlreadyVoted(f"{voter.hex()} has already voted")
    ledger = state.ledger
    # sweep the subtree, stopping at voters who already cast a ballot
    total = 0
    stack = [voter]
    while stack:
        node = stack.pop()
        state.walk_visits += 1
        total += state.stakes.read(node)
        kids = state.children.read(node)
        if ledger is not None:
            ledger.reads += len(kids)  # one slot per adjacency entry
        for child in kids:
            if not state.voted.read(child):
                stack.append(child)
        if node != voter:
            state.nearest_voted.write(node, voter)
    anchor = state.nearest_voted.read(voter)
    anchor_candidate = None if anchor == VIRTUAL_ROOT else state.candidate_of.read(anchor)
    state.tallies.write(candidate, state.tallies.read(candidate) + total)
    state.tallies.write(anchor_candidate, state.tallies.read(anchor_candidate) - total)
    state.voted.write(voter, 1)
    state.candidate_of.write(voter, candidate)
    return state.tally()


def recompute_tallies(state: OracleState) -> dict[str, int]:
    """Closed-form cross-check: rebuild every tally from scratch.

    For each voter, walk up to the first voted node (or-self); its stake
    belongs to that node's candidate, or to nobody when the walk reaches
    the virtual root.
    """
    totals: dict[str, int] = {}
    for voter in state.stakes.snapshot():
        node = voter
        while node != VIRTUAL_ROOT and not state.voted.peek(node):
            node = state.parents.peek(node)
        if node != VIRTUAL_ROOT:
            chosen = state.candidate_of.peek(node)
            totals[chosen] = totals.get(chosen, 0) + state.stakes.peek(voter)
    return totals
