"""Merkle commitment over the init table and per-voter membership proofs.

Leaves are Keccak-256 digests of the fixed 180-byte record encoding,
ordered by preorder index (virtual root excluded), zero-digest padded to
a power of two. An internal node hashes the concatenation of its two
children. Proofs carry the leaf position, so sibling direction bits are
derived rather than stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyTable, IndexOutOfRange, ScenarioError
from .keccak import keccak256
from .preorder import InitTable, VoterRecord

DIGEST_LEN = 32
ZERO_DIGEST = b"\x00" * DIGEST_LEN
LEAF_ENCODING_LEN = 20 + 5 * 32

_FIELD_LIMIT = 1 << 256


def encode_leaf(record: VoterRecord) -> bytes:
    """180-byte leaf payload: address then power, index, endpoint, left, right.

    Each numeric field is a 32-byte big-endian unsigned integer. Stake is
    deliberately absent: only aggregated power is committed.
    """
    fields = (record.power, record.index, record.endpoint, record.left, record.right)
    if any(not 0 <= f < _FIELD_LIMIT for f in fields):
        raise ValueError("record field out of 256-bit range")
    return record.address + b"".join(f.to_bytes(32, "big") for f in fields)


@dataclass(frozen=True)
class MerkleCommitment:
    root: bytes
    leaf_count: int
    padded_count: int


@dataclass(frozen=True)
class MerkleProof:
    leaf_index: int  # 0-based: voter.index - 1
    siblings: tuple[bytes, ...]  # leaf level first


class MerkleTree:
    """Materialized hash tree; keeps all levels so proving is O(log n)."""

    def __init__(self, leaf_digests: list[bytes]):
        if not leaf_digests:
            raise EmptyTable("cannot commit to zero leaves")
        padded = 1
        while padded < len(leaf_digests):
            padded *= 2
        level = list(leaf_digests) + [ZERO_DIGEST] * (padded - len(leaf_digests))
        self.leaf_count = len(leaf_digests)
        self.levels = [level]
        while len(level) > 1:
            level = [
                keccak256(level[i] + level[i + 1]) for i in range(0, len(level), 2)
            ]
            self.levels.append(level)

    @classmethod
    def from_table(cls, table: InitTable) -> "MerkleTree":
        return cls([keccak256(encode_leaf(r)) for r in table.records[1:]])

    @property
    def root(self) -> bytes:
        return self.levels[-1][0]

    @property
    def padded_count(self) -> int:
        return len(self.levels[0])

    def commitment(self) -> MerkleCommitment:
        return MerkleCommitment(self.root, self.leaf_count, self.padded_count)

    def prove_leaf(self, leaf_index: int) -> MerkleProof:
        if not 0 <= leaf_index < self.leaf_count:
            raise IndexOutOfRange(f"leaf {leaf_index} not in 0..{self.leaf_count - 1}")
        siblings = []
        pos = leaf_index
        for level in self.levels[:-1]:
            siblings.append(level[pos ^ 1])
            pos //= 2
        return MerkleProof(leaf_index, tuple(siblings))


def build_commitment(table: InitTable) -> MerkleCommitment:
    return MerkleTree.from_table(table).commitment()


def prove(table: InitTable, voter_index: int) -> MerkleProof:
    """Membership proof for the voter at preorder index 1..n."""
    if not 1 <= voter_index <= table.n:
        raise IndexOutOfRange(f"voter index {voter_index} not in 1..{table.n}")
    return MerkleTree.from_table(table).prove_leaf(voter_index - 1)


def verify(root: bytes, proof: MerkleProof, claimed: VoterRecord) -> bool:
    """Recompute the root from the claimed record and compare digests."""
    if proof.leaf_index < 0:
        return False
    node = keccak256(encode_leaf(claimed))
    pos = proof.leaf_index
    for sibling in proof.siblings:
        if pos & 1:
            node = keccak256(sibling + node)
        else:
            node = keccak256(node + sibling)
        pos //= 2
    return pos == 0 and node == root


# --- proof serialization ---------------------------------------------------
# text: first line leaf_index, then one sibling digest per line (hex)
# blob: 4-byte big-endian leaf_index followed by concatenated digests


def dump_proof(proof: MerkleProof) -> str:
    return "\n".join([str(proof.leaf_index), *(s.hex() for s in proof.siblings)]) + "\n"


def save_proof(proof: MerkleProof, path: str | Path) -> None:
    Path(path).write_text(dump_proof(proof))


def load_proof(path: str | Path) -> MerkleProof:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ScenarioError(f"{path}: empty proof file")
    try:
        leaf_index = int(lines[0])
        siblings = tuple(bytes.fromhex(ln) for ln in lines[1:])
    except ValueError as exc:
        raise ScenarioError(f"{path}: bad proof file") from exc
    if any(len(s) != DIGEST_LEN for s in siblings):
        raise ScenarioError(f"{path}: sibling digest must be {DIGEST_LEN} bytes")
    return MerkleProof(leaf_index, siblings)


def proof_to_bytes(proof: MerkleProof) -> bytes:
    return proof.leaf_index.to_bytes(4, "big") + b"".join(proof.siblings)


def proof_from_bytes(blob: bytes) -> MerkleProof:
    if len(blob) < 4 or (len(blob) - 4) % DIGEST_LEN:
        raise ScenarioError("bad proof blob length")
    leaf_index = int.from_bytes(blob[:4], "big")
    siblings = tuple(
        blob[off : off + DIGEST_LEN] for off in range(4, len(blob), DIGEST_LEN)
    )
    return MerkleProof(leaf_index, siblings)
