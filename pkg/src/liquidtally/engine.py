"""Realtime self-tally vote processing in O(log n) storage operations.

The session keeps two sparse lazy interval trees:

* a max-lazy tree over the preorder domain [1, n]; a voter's point query
  materializes ``nearestparent[index]``, the preorder index of its deepest
  voted ancestor (0, the virtual root, when none), because deeper
  ancestors always carry larger preorder indices;
* an additive-lazy tree over the bracket domain [1, 2n]; path updates add
  the cast power to the score of every position in the bracket interval
  [ancestor.left, voter.left], where path nodes occur exactly once (their
  entry bracket) and off-path nodes zero or two times, so a voter's lost
  power is ``s[left] - s[right]``.

A vote then: verifies the claimed record against the Merkle root, computes
actual power ``t = power - s[left] + s[right]``, credits its candidate,
debits the nearest voted ancestor's candidate (the virtual root's sink
when none), re-tags the subtree [index+1, endpoint] with the voter's
index, and adds ``t`` over the path's bracket interval. Rejected messages
leave the session untouched: all guards run before the first write.

Tree nodes are indexed heap-style (root 1, children 2k and 2k+1) inside
sparse maps, so storage is allocated only for slots actually assigned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

from .delegation import VIRTUAL_ROOT, parse_address
from .errors import (
    AlreadyVoted,
    ProofInvalid,
    ScenarioError,
    SenderMismatch,
    UnknownSession,
)
from .gas import GasLedger, StorageMap
from .merkle import (
    DIGEST_LEN,
    MerkleProof,
    proof_from_bytes,
    proof_to_bytes,
    verify,
)
from .preorder import VoterRecord

# Tally key for power that falls back to the virtual root.
NO_CANDIDATE = None


class Ballot(NamedTuple):
    """What the session remembers about a cast vote."""

    candidate: Optional[str]
    record: VoterRecord


@dataclass(frozen=True)
class VoteMessage:
    """A direct vote: claimed initialization data plus membership proof."""

    sender: bytes
    claimed: VoterRecord
    proof: MerkleProof
    candidate: str

    def __post_init__(self):
        if not self.candidate:
            raise ValueError("candidate must be a non-empty identifier")


def _root_record(n: int) -> VoterRecord:
    return VoterRecord(
        address=VIRTUAL_ROOT, stake=0, index=0, endpoint=n, left=0, right=2 * n + 1, power=0
    )


class TallySession:
    """Mutable voting state for one session; votes apply strictly in order."""

    def __init__(self, n: int, merkle_root: bytes):
        self.n = n
        self.merkle_root = merkle_root
        self.lazy1 = StorageMap("lazy1", 0)
        self.lazy2 = StorageMap("lazy2", 0)
        self.nearestparent = StorageMap("nearestparent", 0)
        self.scores = StorageMap("s", 0)
        self.ballots = StorageMap("b", None)
        self.tallies = StorageMap("tallies", 0)
        self.voted = StorageMap("voted", 0)
        self._maps = (
            self.lazy1,
            self.lazy2,
            self.nearestparent,
            self.scores,
            self.ballots,
            self.tallies,
            self.voted,
        )
        self.ledger: Optional[GasLedger] = None
        self.tree_visits = 0
        self.hash_ops = 0
        if n >= 1:
            self.ballots.write(0, Ballot(NO_CANDIDATE, _root_record(n)))

    def attach_ledger(self, ledger: Optional[GasLedger]) -> None:
        """Meter subsequent storage traffic (None detaches)."""
        self.ledger = ledger
        for m in self._maps:
            m.ledger = ledger

    # --- interval trees ----------------------------------------------------

    def update1(self, L: int, R: int, l: int, r: int, k: int, v: int) -> None:
        """Max-update [L, R] with v on the nearest-voted-parent tree.

        Pushdown keeps the parent tag: max tags are idempotent, so a parent
        may be re-pushed later without harm. A point update (L == R)
        materializes the leaf into ``nearestparent``.
        """
        if L > R:
            raise ValueError(f"empty interval [{L}, {R}]")
        if not (l <= L and R <= r):
            raise ValueError(f"[{L}, {R}] outside tree node [{l}, {r}]")
        self.tree_visits += 1
        lazy1 = self.lazy1
        if L == l and R == r:
            tag = lazy1.read(k)
            if v > tag:
                lazy1.write(k, v)
                tag = v
            if L == R:
                self.nearestparent.write(L, tag)
            return
        m = (l + r) // 2
        tag = lazy1.read(k)
        if lazy1.read(2 * k) < tag:
            lazy1.write(2 * k, tag)
        if lazy1.read(2 * k + 1) < tag:
            lazy1.write(2 * k + 1, tag)
        if L <= m:
            self.update1(L, min(m, R), l, m, 2 * k, v)
        if R > m:
            self.update1(max(m + 1, L), R, m + 1, r, 2 * k + 1, v)

    def update2(self, L: int, R: int, l: int, r: int, k: int, v: int) -> None:
        """Add v over [L, R] on the bracket-score tree.

        Pushdown is additive and clears the parent tag. A point update
        materializes the leaf into ``scores``.
        """
        if L > R:
            raise ValueError(f"empty interval [{L}, {R}]")
        if not (l <= L and R <= r):
            raise ValueError(f"[{L}, {R}] outside tree node [{l}, {r}]")
        self.tree_visits += 1
        lazy2 = self.lazy2
        if L == l and R == r:
            tag = lazy2.read(k) + v
            lazy2.write(k, tag)
            if L == R:
                self.scores.write(L, tag)
            return
        m = (l + r) // 2
        tag = lazy2.read(k)
        lazy2.write(2 * k, lazy2.read(2 * k) + tag)
        lazy2.write(2 * k + 1, lazy2.read(2 * k + 1) + tag)
        lazy2.write(k, 0)
        if L <= m:
            self.update2(L, min(m, R), l, m, 2 * k, v)
        if R > m:
            self.update2(max(m + 1, L), R, m + 1, r, 2 * k + 1, v)

    # --- vote processing ----------------------------------------------------

    def process_vote(self, msg: VoteMessage) -> dict[str, int]:
        """Apply one voting message and return the updated tallies.

        Order of operations: guards (sender match, Merkle proof, duplicate
        vote) first, then record the ballot, materialize both bracket
        scores, move ``t`` between candidates, re-tag the subtree's nearest
        voted parent, and add ``t`` over the path's bracket interval.
        """
        if self.n < 1 or len(self.merkle_root) != DIGEST_LEN:
            raise UnknownSession("session lacks a voter count or Merkle root")
        rec = msg.claimed
        if msg.sender != rec.address:
            raise SenderMismatch(
                f"sender {msg.sender.hex()} claims record of {rec.address.hex()}"
            )
        ledger = self.ledger
        if ledger is not None:
            # root slot plus one sibling load per proof level
            ledger.reads += len(msg.proof.siblings) + 1
        self.hash_ops += len(msg.proof.siblings) + 1
        if not verify(self.merkle_root, msg.proof, rec):
            raise ProofInvalid(f"proof for index {rec.index} does not match the root")
        idx = rec.index
        if self.voted.read(idx):
            raise AlreadyVoted(f"index {idx} has already voted")

        n, n2 = self.n, 2 * self.n
        self.ballots.write(idx, Ballot(msg.candidate, rec))
        self.update2(rec.left, rec.left, 1, n2, 1, 0)
        self.update2(rec.right, rec.right, 1, n2, 1, 0)
        t = rec.power - self.scores.read(rec.left) + self.scores.read(rec.right)
        self.tallies.write(msg.candidate, self.tallies.read(msg.candidate) + t)
        self.update1(idx, idx, 1, n, 1, 0)
        parent_index = self.nearestparent.read(idx)
        parent: Ballot = self.ballots.read(parent_index)
        self.tallies.write(parent.candidate, self.tallies.read(parent.candidate) - t)
        if idx < rec.endpoint:
            self.update1(idx + 1, rec.endpoint, 1, n, 1, idx)
        self.update2(max(1, parent.record.left), rec.left, 1, n2, 1, t)
        self.voted.write(idx, 1)
        return self.current_tally()

    def current_tally(self) -> dict[str, int]:
        """Read-only candidate totals; the virtual-root sink is hidden."""
        return {
            cand: total
            for cand, total in self.tallies.snapshot().items()
            if cand is not NO_CANDIDATE
        }


# --- vote-message file format ----------------------------------------------
# line: sender_hex power index endpoint left right candidate proof_hex
# output per message: "candidate:total" pairs sorted by candidate id


def format_message_line(msg: VoteMessage) -> str:
    r = msg.claimed
    return " ".join(
        [
            msg.sender.hex(),
            str(r.power),
            str(r.index),
            str(r.endpoint),
            str(r.left),
            str(r.right),
            msg.candidate,
            proof_to_bytes(msg.proof).hex(),
        ]
    )


def parse_message_line(line: str) -> VoteMessage:
    parts = line.split()
    if len(parts) != 8:
        raise ScenarioError(f"expected 8 message fields, got {len(parts)}")
    sender = parse_address(parts[0])
    try:
        power, index, endpoint, left, right = (int(p) for p in parts[1:6])
        proof = proof_from_bytes(bytes.fromhex(parts[7]))
    except ValueError as exc:
        raise ScenarioError(f"bad message line: {line!r}") from exc
    claimed = VoterRecord(
        address=sender,
        stake=0,
        index=index,
        endpoint=endpoint,
        left=left,
        right=right,
        power=power,
    )
    return VoteMessage(sender=sender, claimed=claimed, proof=proof, candidate=parts[6])


def format_tally_line(tallies: dict[str, int]) -> str:
    return " ".join(f"{cand}:{tallies[cand]}" for cand in sorted(tallies))


def replay_message_lines(session: TallySession, lines: Iterable[str]) -> Iterator[str]:
    """Process a message file; yields one tally line per message."""
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        yield format_tally_line(session.process_vote(parse_message_line(line)))
