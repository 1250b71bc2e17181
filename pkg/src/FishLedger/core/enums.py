# src/FishLedger/core/enums.py

from enum import Enum, IntEnum


class Role(Enum):
    """Roles an MSP can admit."""

    PEER = "peer"
    ORDERER = "orderer"
    CLIENT = "client"
    ADMIN = "admin"


class ValidationCode(Enum):
    """Per-transaction verdict recorded in a block."""

    VALID = "VALID"
    MVCC_CONFLICT = "MVCC_CONFLICT"
    ENDORSEMENT_FAILURE = "ENDORSEMENT_FAILURE"
    BAD_SIGNATURE = "BAD_SIGNATURE"
    DUPLICATE_TXID = "DUPLICATE_TXID"


class EnvelopeKind(Enum):
    ENDORSER = "endorser"
    CONFIG = "config"


class RaftRole(Enum):
    FOLLOWER = "Follower"
    CANDIDATE = "Candidate"
    LEADER = "Leader"


class SubmitStatus(Enum):
    ACK = "ack"
    REDIRECT = "redirect"
    UNAVAILABLE = "unavailable"
    REJECTED = "rejected"


class FrameType(Enum):
    """Message kinds carried by the network."""

    PROPOSAL = "Proposal"
    PROPOSAL_RESPONSE = "ProposalResponse"
    PRIVATE_PLAINTEXT = "PrivatePlaintext"
    PRIVATE_ACK = "PrivateAck"
    SUBMIT = "Submit"
    SUBMIT_RESPONSE = "SubmitResponse"
    REQUEST_VOTE = "RequestVote"
    REQUEST_VOTE_RESPONSE = "RequestVoteResponse"
    APPEND_ENTRIES = "AppendEntries"
    APPEND_ENTRIES_RESPONSE = "AppendEntriesResponse"
    DELIVER = "Deliver"
    DELIVER_REQUEST = "DeliverRequest"
    WATCH_TX = "WatchTx"
    TX_STATUS = "TxStatus"


class ExitCode(IntEnum):
    """Stable CLI exit codes (see docs/CLI.md)."""

    OK = 0
    ERROR = 1
    CONFIG = 2
    PERMISSION_DENIED = 3
    NOT_FOUND = 4
    POLICY_UNSATISFIED = 5
    ALREADY_EXISTS = 6
    VALIDATION_FAILED = 7
    ORDERING_UNAVAILABLE = 8
    TX_INVALID = 9
    NETWORK_DOWN = 10
    IDENTITY_REJECTED = 11
    CHAIN_BROKEN = 12
