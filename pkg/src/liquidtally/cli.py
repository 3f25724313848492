"""Batch front-end: init, commit, vote, bench, compare, check-cycle.

Exit codes: 0 success, 1 a voting message was rejected, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .bench import ALGOS, POSITIONS, bench_grid, format_bench_table, plot_data
from .delegation import (
    DelegateForest,
    DelegationEventLog,
    OrderKey,
    Snapshot,
    build_forest,
    load_events,
    load_stakes,
    parse_address,
    snapshot_at,
    would_create_cycle,
)
from .engine import TallySession, VoteMessage
from .errors import REJECTION_ERRORS, LiquidTallyError, ScenarioError
from .gas import GasSchedule
from .merkle import MerkleTree, load_proof, save_proof
from .oracle import OracleState, oracle_vote
from .preorder import InitTable, load_table, run_preorder, save_table

PAPER_GRID = tuple(range(10, 101, 10)) + tuple(range(200, 1001, 100)) + (2000, 3000)


@dataclass(frozen=True)
class Scenario:
    events_path: Path
    stakes_path: Path
    cut_off: OrderKey
    votes: tuple[tuple[bytes, str], ...]


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    try:
        cut = raw["cut_off"]
        votes = tuple((parse_address(v), str(c)) for v, c in raw["votes"])
        scenario = Scenario(
            events_path=path.parent / raw["events"],
            stakes_path=path.parent / raw["stakes"],
            cut_off=OrderKey(int(cut[0]), int(cut[1]), int(cut[2])),
            votes=votes,
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ScenarioError(f"malformed scenario {path}: {exc}") from exc
    for _, candidate in scenario.votes:
        if not candidate:
            raise ScenarioError(f"{path}: empty candidate id")
    return scenario


def prepare(scenario: Scenario) -> tuple[DelegationEventLog, Snapshot, DelegateForest, InitTable]:
    log = load_events(scenario.events_path)
    stakes = load_stakes(scenario.stakes_path)
    snap = snapshot_at(log, scenario.cut_off, stakes)
    forest = build_forest(snap)
    return log, snap, forest, run_preorder(forest, snap)


def _proof_path(out: Path, index: int) -> Path:
    return out / "proofs" / f"proof_{index:06d}.txt"


def _write_artifacts(table: InitTable, out: Path) -> str:
    out.mkdir(parents=True, exist_ok=True)
    (out / "proofs").mkdir(exist_ok=True)
    tree = MerkleTree.from_table(table)
    save_table(table, out / "inittable.txt")
    root_hex = "0x" + tree.root.hex()
    (out / "root.txt").write_text(root_hex + "\n")
    for index in range(1, table.n + 1):
        save_proof(tree.prove_leaf(index - 1), _proof_path(out, index))
    return root_hex


def cmd_init(args) -> int:
    scenario = load_scenario(args.scenario)
    _, _, _, table = prepare(scenario)
    root_hex = _write_artifacts(table, Path(args.out))
    print(f"n={table.n} root={root_hex}")
    return 0


def cmd_commit(args) -> int:
    table = load_table(args.table)
    root_hex = _write_artifacts(table, Path(args.out))
    print(f"n={table.n} root={root_hex}")
    return 0


def _goal_line(order: tuple[str, ...], tallies: dict[str, int]) -> str:
    return " ".join(f"{cand} {tallies.get(cand, 0)}" for cand in order)


def _candidate_order(scenario: Scenario) -> tuple[str, ...]:
    order: list[str] = []
    for _, candidate in scenario.votes:
        if candidate not in order:
            order.append(candidate)
    return tuple(order)


def cmd_vote(args) -> int:
    scenario = load_scenario(args.scenario)
    out = Path(args.out)
    table_path = out / "inittable.txt"
    root_path = out / "root.txt"
    if not table_path.exists() or not root_path.exists():
        raise ScenarioError(f"init artifacts missing under {out}, run init first")
    order = _candidate_order(scenario)
    if args.oracle:
        _, snap, forest, _ = prepare(scenario)
        state = OracleState(forest, snap)
        for voter, candidate in scenario.votes:
            try:
                tallies = oracle_vote(state, voter, candidate)
            except REJECTION_ERRORS as exc:
                print(f"rejected {voter.hex()}: {type(exc).__name__}", file=sys.stderr)
                if not args.keep_going:
                    return 1
                tallies = state.tally()
            print(_goal_line(order, tallies))
        return 0
    table = load_table(table_path)
    root_hex = root_path.read_text().strip()
    root = bytes.fromhex(root_hex[2:] if root_hex.startswith("0x") else root_hex)
    by_address = table.by_address()
    session = TallySession(table.n, root)
    for voter, candidate in scenario.votes:
        record = by_address.get(voter)
        if record is None:
            raise ScenarioError(f"voter {voter.hex()} not in the init table")
        proof = load_proof(_proof_path(out, record.index))
        msg = VoteMessage(sender=voter, claimed=record, proof=proof, candidate=candidate)
        try:
            tallies = session.process_vote(msg)
        except REJECTION_ERRORS as exc:
            print(f"rejected {voter.hex()}: {type(exc).__name__}", file=sys.stderr)
            if not args.keep_going:
                return 1
            tallies = session.current_tally()
        print(_goal_line(order, tallies))
    return 0


def cmd_compare(args) -> int:
    scenario = load_scenario(args.scenario)
    _, snap, forest, table = prepare(scenario)
    tree = MerkleTree.from_table(table)
    session = TallySession(table.n, tree.root)
    state = OracleState(forest, snap)
    by_address = table.by_address()
    order = _candidate_order(scenario)
    for step, (voter, candidate) in enumerate(scenario.votes, start=1):
        record = by_address.get(voter)
        if record is None:
            raise ScenarioError(f"voter {voter.hex()} not in the init table")
        msg = VoteMessage(
            sender=voter,
            claimed=record,
            proof=tree.prove_leaf(record.index - 1),
            candidate=candidate,
        )
        engine_tallies = session.process_vote(msg)
        oracle_tallies = oracle_vote(state, voter, candidate)
        engine_clean = {c: v for c, v in engine_tallies.items() if v}
        oracle_clean = {c: v for c, v in oracle_tallies.items() if v}
        if engine_clean != oracle_clean:
            print(f"step {step}: DIVERGED engine={engine_clean} oracle={oracle_clean}")
            return 1
        print(f"step {step}: OK {_goal_line(order, engine_tallies)}")
    return 0


def cmd_bench(args) -> int:
    schedule = GasSchedule.from_json(args.gas_schedule) if args.gas_schedule else GasSchedule()
    try:
        n_list = tuple(int(x) for x in args.n_list.split(","))
        positions = tuple(args.positions.split(","))
    except ValueError as exc:
        raise ScenarioError(f"bad bench grid: {exc}") from exc
    for position in positions:
        if position not in POSITIONS:
            raise ScenarioError(f"unknown position {position!r}")
    results = bench_grid(n_list, positions, ALGOS, schedule)
    print(format_bench_table(results))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for position in positions:
            (out / f"bench_{position}.dat").write_text(plot_data(results, position))
    return 0


def cmd_check_cycle(args) -> int:
    scenario = load_scenario(args.scenario)
    log = load_events(scenario.events_path)
    voter = parse_address(args.voter)
    delegate = parse_address(args.delegate)
    cycles = would_create_cycle(log.delegate_targets(), voter, delegate)
    print("cycle" if cycles else "ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liquidtally",
        description="Liquid-democracy voting pipeline: initialize, commit, tally, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="build snapshot, forest, init table, root, and proofs")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="artifact directory")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("commit", help="recompute root and proofs from an exported init table")
    p.add_argument("--table", required=True, help="init table file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_commit)

    p = sub.add_parser("vote", help="replay the scenario's votes, one tally line each")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="artifact directory written by init")
    p.add_argument("--oracle", action="store_true", help="use the traversal reference")
    p.add_argument(
        "--continue", dest="keep_going", action="store_true",
        help="keep processing after a rejected message",
    )
    p.set_defaults(func=cmd_vote)

    p = sub.add_parser("compare", help="run engine and oracle side by side, diff each step")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="model per-vote gas on delegate chains")
    p.add_argument("--n-list", default=",".join(str(n) for n in PAPER_GRID))
    p.add_argument("--positions", default=",".join(POSITIONS))
    p.add_argument("--gas-schedule", default=None, help="JSON cost overrides")
    p.add_argument("--out", default=None, help="also write per-position plot data")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("check-cycle", help="advisory check: would this edge close a cycle?")
    p.add_argument("--scenario", required=True)
    p.add_argument("voter")
    p.add_argument("delegate")
    p.set_defaults(func=cmd_check_cycle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except REJECTION_ERRORS as exc:
        print(f"rejected: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (LiquidTallyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
