"""``fishledger`` command-line tool.

Every command prints a JSON document under ``--json``; exit codes are listed
in docs/CLI.md and ``core.enums.ExitCode``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Callable, Dict, Optional, Sequence

import yaml

from .bench.report import BenchReport, report_table
from .chaincode.records import PRIVATE_FIELDS, PUBLIC_FIELDS
from .core.base import (
    AlreadyExists,
    BadRange,
    BadTopology,
    ChaincodeError,
    ChainIntegrityError,
    ConfigError,
    IdentityRejected,
    LedgerError,
    MspValidationError,
    NetworkDown,
    NotFound,
    OrderingUnavailable,
    PermissionDenied,
    PolicyError,
    PolicyUnsatisfied,
    TransactionInvalid,
    ValidationFailed,
)
from .core.enums import ExitCode
from .core.fish_ledger import FishLedger
from .utils.common import to_json

# Most specific first; the first matching class wins.
EXIT_CODES = (
    (ConfigError, ExitCode.CONFIG),
    (BadRange, ExitCode.CONFIG),
    (BadTopology, ExitCode.CONFIG),
    (PermissionDenied, ExitCode.PERMISSION_DENIED),
    (NotFound, ExitCode.NOT_FOUND),
    (PolicyUnsatisfied, ExitCode.POLICY_UNSATISFIED),
    (AlreadyExists, ExitCode.ALREADY_EXISTS),
    (ValidationFailed, ExitCode.VALIDATION_FAILED),
    (ChaincodeError, ExitCode.VALIDATION_FAILED),
    (PolicyError, ExitCode.CONFIG),
    (OrderingUnavailable, ExitCode.ORDERING_UNAVAILABLE),
    (TransactionInvalid, ExitCode.TX_INVALID),
    (NetworkDown, ExitCode.NETWORK_DOWN),
    (IdentityRejected, ExitCode.IDENTITY_REJECTED),
    (MspValidationError, ExitCode.IDENTITY_REJECTED),
    (ChainIntegrityError, ExitCode.CHAIN_BROKEN),
)


def exit_code_for(error: BaseException) -> ExitCode:
    for cls, code in EXIT_CODES:
        if isinstance(error, cls):
            return code
    return ExitCode.ERROR


def _parse_range(text: str):
    """``ph=6:9`` -> ("ph", (6.0, 9.0))."""
    try:
        name, bounds = text.split("=", 1)
        lo, hi = bounds.split(":", 1)
        return name.strip(), (float(lo), float(hi))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"range must look like field=min:max, got {text!r}") from e


def _parse_seed(text: str) -> int:
    """Unsigned seed, up to 2**64 - 1."""
    try:
        seed = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from e
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fishledger", description="Permissioned fish-farm ledger network"
    )
    parser.add_argument("--home", help="Data directory (default: $FISHLEDGER_HOME or ./.fishledger)")
    parser.add_argument("--config", help="Network configuration file (default: $FISHLEDGER_CONFIG)")
    parser.add_argument("--json", action="store_true", help="Print machine-readable JSON")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="Log to stdout")
    parser.add_argument(
        "--transport", choices=["simulated", "loopback"], help="Message transport for this run"
    )
    groups = parser.add_subparsers(dest="group", required=True)

    net = groups.add_parser("net", help="Network lifecycle").add_subparsers(dest="command", required=True)
    net.add_parser("up", help="Bring the network up")
    down = net.add_parser("down", help="Stop the network")
    down.add_argument("--purge", action="store_true", help="Delete the data directory")
    net.add_parser("status", help="Per-node heights, leader and policy version")

    tx = groups.add_parser("tx", help="Fish-farm transactions").add_subparsers(dest="command", required=True)
    create = tx.add_parser("create", help="Create a record")
    create.add_argument("--identity", required=True)
    create.add_argument("--name", required=True)
    for field in PUBLIC_FIELDS + PRIVATE_FIELDS:
        create.add_argument(f"--{field}", required=True)
    for command in ("read", "readprivate"):
        read = tx.add_parser(command, help=f"{command} a record")
        read.add_argument("--identity", required=True)
        read.add_argument("--name", required=True)
        read.add_argument("--peer", help="Peer to query (default: the identity's own peer)")

    bench = groups.add_parser("bench", help="Benchmarks").add_subparsers(dest="command", required=True)
    bench_write = bench.add_parser("write", help="Create synthetic records")
    bench_write.add_argument("--count", type=int, required=True)
    bench_write.add_argument("--seed", type=_parse_seed, default=0)
    bench_write.add_argument("--identity", default="admin.fishfarm.org")
    bench_read = bench.add_parser("read", help="Read records back")
    bench_read.add_argument("--count", type=int, required=True)
    bench_read.add_argument("--identity", default="admin.fishfarm.org")
    bench_read.add_argument("--peer")

    verify = groups.add_parser("verify", help="Integrity checks").add_subparsers(dest="command", required=True)
    chain = verify.add_parser("chain", help="Verify every peer's block log")
    chain.add_argument("--peer")
    chain.add_argument("--repair", action="store_true", help="Truncate at the first break and catch up")

    tamper = groups.add_parser("tamper", help="Flip one byte of a stored block (testing only)")
    tamper.add_argument("--block", type=int, required=True)
    tamper.add_argument("--byte", type=int, required=True)
    tamper.add_argument("--peer")

    policy = groups.add_parser("policy", help="Network policy").add_subparsers(dest="command", required=True)
    policy.add_parser("show", help="Print the policy in force")
    update = policy.add_parser("update", help="Order a policy update")
    update.add_argument("--chaincode-policy")
    update.add_argument("--channel-policy")
    update.add_argument(
        "--approve", action="append", default=[], required=True, help="Approving admin (repeatable)"
    )

    identity = groups.add_parser("identity", help="Identity administration").add_subparsers(
        dest="command", required=True
    )
    revoke = identity.add_parser("revoke", help="Revoke an identity's certificate")
    revoke.add_argument("--identity", required=True)

    datagen = groups.add_parser("datagen", help="Write synthetic records as JSON lines")
    datagen.add_argument("--seed", type=_parse_seed, default=0)
    datagen.add_argument("--count", type=int, required=True)
    datagen.add_argument("--out", required=True)
    datagen.add_argument("--range", type=_parse_range, action="append", default=[], dest="ranges")
    return parser


def _net(args, fl: FishLedger) -> Any:
    if args.command == "up":
        return fl.up()
    if args.command == "down":
        return fl.down(purge=args.purge)
    return fl.status()


def _tx(args, fl: FishLedger) -> Any:
    if args.command == "create":
        record = {"name": args.name}
        record.update({f: getattr(args, f) for f in PUBLIC_FIELDS + PRIVATE_FIELDS})
        return fl.create_record(args.identity, record)
    if args.command == "read":
        return fl.read_record(args.identity, args.name, args.peer)
    return fl.read_private(args.identity, args.name, args.peer)


def _bench(args, fl: FishLedger) -> BenchReport:
    if args.command == "write":
        return fl.bench_write(args.count, args.seed, args.identity)
    return fl.bench_read(args.count, args.identity, args.peer)


def _verify(args, fl: FishLedger) -> Any:
    return fl.verify_chain(args.peer, args.repair)


def _tamper(args, fl: FishLedger) -> Any:
    return fl.tamper(args.block, args.byte, args.peer)


def _policy(args, fl: FishLedger) -> Any:
    if args.command == "show":
        return fl.policy_show()
    return fl.policy_update(args.approve, args.chaincode_policy, args.channel_policy)


def _identity(args, fl: FishLedger) -> Any:
    return fl.revoke(args.identity)


def _datagen(args, fl: FishLedger) -> Any:
    return fl.generate_data(args.seed, args.count, args.out, dict(args.ranges))


COMMANDS: Dict[str, Callable[[argparse.Namespace, FishLedger], Any]] = {
    "net": _net,
    "tx": _tx,
    "bench": _bench,
    "verify": _verify,
    "tamper": _tamper,
    "policy": _policy,
    "identity": _identity,
    "datagen": _datagen,
}


def _render(result: Any, as_json: bool) -> str:
    if isinstance(result, BenchReport):
        return to_json(result.to_dict()) if as_json else report_table(result)
    if as_json:
        return to_json(result)
    return yaml.safe_dump(yaml.safe_load(to_json(result)), sort_keys=False).rstrip()


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_arg_parser().parse_args(argv)
    log_level = {0: logging.CRITICAL, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    try:
        with FishLedger(
            home=args.home,
            config_file=args.config if args.group == "net" else None,
            log_level=log_level,
            transport=args.transport,
        ) as fl:
            result = COMMANDS[args.group](args, fl)
    except LedgerError as e:
        code = exit_code_for(e)
        payload: Dict[str, Any] = {"error": type(e).__name__, "message": str(e), "exit_code": int(code)}
        line = getattr(e, "line", None)
        if line is not None:
            payload["line"] = line
        if args.json:
            print(to_json(payload))
        else:
            print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return int(code)

    print(_render(result, args.json))
    if args.group == "verify" and not result["ok"] and not args.repair:
        return int(ExitCode.CHAIN_BROKEN)
    return int(ExitCode.OK)


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
