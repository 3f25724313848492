"""Exception taxonomy shared across the voting pipeline."""


class LiquidTallyError(Exception):
    """Base class for all library errors."""


class ScenarioError(LiquidTallyError):
    """An input file (events, stakes, scenario, artifact) is malformed or missing."""


class OutOfOrderEvent(LiquidTallyError):
    """Event order key is not strictly greater than the log's last key."""


class SelfDelegation(LiquidTallyError):
    """A voter attempted to delegate to itself."""


class MissingStake(LiquidTallyError):
    """An address referenced by the event log has no stake entry."""


class EmptyTable(LiquidTallyError):
    """A Merkle commitment was requested for a table with no voters."""


class IndexOutOfRange(LiquidTallyError):
    """Voter index outside 1..n."""


class SenderMismatch(LiquidTallyError):
    """Message sender differs from the address in the claimed record."""


class ProofInvalid(LiquidTallyError):
    """Merkle proof does not recompute the committed root."""


class AlreadyVoted(LiquidTallyError):
    """The voter's preorder index is already marked as voted."""


class UnknownSession(LiquidTallyError):
    """A vote was submitted to a session that was never initialized."""


# Errors that reject a single voting message while leaving the session intact.
REJECTION_ERRORS = (SenderMismatch, ProofInvalid, AlreadyVoted)
