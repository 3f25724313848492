#!/usr/bin/env python3
"""Open-ended differential fuzzing: engine vs walk oracle vs full recompute.

Generates random forests, stakes, and vote orders, checks all three tally
computations after every single vote, and reports throughput. Exits
nonzero on the first divergence with enough context to reproduce it.
"""

import argparse
import random
import sys
import time

from liquidtally.delegation import address_from_int
from liquidtally.engine import TallySession, VoteMessage
from liquidtally.merkle import MerkleTree
from liquidtally.oracle import OracleState, oracle_vote, recompute_tallies


def random_parents(rng, n, chainy):
    parents = {1: 0}
    for i in range(2, n + 1):
        roll = rng.random()
        if roll < 0.12:
            parents[i] = 0
        elif roll < 0.12 + chainy:
            parents[i] = i - 1
        else:
            parents[i] = rng.randint(1, i - 1)
    return parents


def build_pipeline(parents, stakes):
    from liquidtally.delegation import (
        DelegationEvent,
        DelegationEventLog,
        OrderKey,
        build_forest,
        snapshot_at,
    )
    from liquidtally.preorder import run_preorder

    log = DelegationEventLog()
    height = 0
    for voter, parent in sorted(parents.items()):
        if parent == 0:
            continue
        height += 1
        log.ingest(
            DelegationEvent(
                address_from_int(voter), address_from_int(parent), OrderKey(height, 0, 0)
            )
        )
    stake_map = {address_from_int(v): s for v, s in stakes.items()}
    snap = snapshot_at(log, OrderKey(1 << 30, 0, 0), stake_map)
    forest = build_forest(snap)
    return snap, forest, run_preorder(forest, snap)


def run_trial(rng, trial, max_n, check_recompute):
    n = rng.randint(2, max_n)
    parents = random_parents(rng, n, chainy=rng.choice((0.1, 0.3, 0.6)))
    stakes = {i: rng.randint(0, 10**6) for i in range(1, n + 1)}
    snap, forest, table = build_pipeline(parents, stakes)
    tree = MerkleTree.from_table(table)
    session = TallySession(table.n, tree.root)
    state = OracleState(forest, snap)
    by_address = table.by_address()
    voters = list(range(1, n + 1))
    rng.shuffle(voters)
    count = n if rng.random() < 0.5 else rng.randint(1, n)
    checked = 0
    for vid in voters[:count]:
        record = by_address[address_from_int(vid)]
        candidate = rng.choice("ABCDE")
        msg = VoteMessage(
            sender=record.address,
            claimed=record,
            proof=tree.prove_leaf(record.index - 1),
            candidate=candidate,
        )
        engine_tallies = session.process_vote(msg)
        oracle_tallies = oracle_vote(state, record.address, candidate)
        if engine_tallies != oracle_tallies:
            print(f"DIVERGED trial={trial} n={n} voter={vid}:")
            print(f"  engine: {engine_tallies}")
            print(f"  oracle: {oracle_tallies}")
            return None
        if check_recompute:
            full = recompute_tallies(state)
            pruned = {c: v for c, v in oracle_tallies.items() if v}
            if pruned != full:
                print(f"DIVERGED (recompute) trial={trial} n={n} voter={vid}")
                return None
        checked += 1
    return checked


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--max-n", type=int, default=500)
    parser.add_argument(
        "--recompute", action="store_true",
        help="also cross-check the closed-form recomputation (slower)",
    )
    args = parser.parse_args()
    seed = args.seed if args.seed is not None else random.randrange(1 << 32)
    print(f"seed={seed} trials={args.trials} max_n={args.max_n}")
    rng = random.Random(seed)
    start = time.perf_counter()
    total = 0
    for trial in range(args.trials):
        checked = run_trial(rng, trial, args.max_n, args.recompute)
        if checked is None:
            return 1
        total += checked
    elapsed = time.perf_counter() - start
    print(f"OK: {total} votes verified in {elapsed:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
