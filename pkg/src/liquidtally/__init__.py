"""Off-chain liquid-democracy harness.

Pipeline: ingest delegation events, snapshot them at a cut-off, resolve
the delegate forest, derive per-voter initialization records, commit them
into a Merkle root, then process votes in O(log n) storage operations
with a differential brute-force oracle and an EVM-style gas model.
"""

from .delegation import (
    VIRTUAL_ROOT,
    DelegateForest,
    DelegationEvent,
    DelegationEventLog,
    Edge,
    OrderKey,
    Snapshot,
    address_from_int,
    build_forest,
    parse_address,
    snapshot_at,
    would_create_cycle,
)
from .engine import (
    NO_CANDIDATE,
    TallySession,
    VoteMessage,
    format_message_line,
    format_tally_line,
    parse_message_line,
    replay_message_lines,
)
from .errors import (
    AlreadyVoted,
    EmptyTable,
    IndexOutOfRange,
    LiquidTallyError,
    MissingStake,
    OutOfOrderEvent,
    ProofInvalid,
    ScenarioError,
    SelfDelegation,
    SenderMismatch,
    UnknownSession,
)
from .gas import GasLedger, GasSchedule, StorageMap, gas_of, record_op
from .keccak import keccak256
from .merkle import (
    MerkleCommitment,
    MerkleProof,
    MerkleTree,
    build_commitment,
    encode_leaf,
    prove,
    verify,
)
from .oracle import OracleState, oracle_vote, recompute_tallies
from .preorder import InitTable, VoterRecord, run_preorder
from .bench import BenchResult, bench_chain, bench_grid, build_chain

__all__ = [name for name in dir() if not name.startswith("_")]
