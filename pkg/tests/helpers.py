"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import random

from liquidtally.delegation import (
    VIRTUAL_ROOT,
    DelegationEvent,
    DelegationEventLog,
    Edge,
    OrderKey,
    Snapshot,
    address_from_int,
    build_forest,
    snapshot_at,
)
from liquidtally.engine import TallySession, VoteMessage
from liquidtally.merkle import MerkleTree
from liquidtally.preorder import run_preorder

# The worked example: 12 voters, stake(i) = i, tree rooted at voter 1.
EXAMPLE12_PARENTS = {2: 1, 3: 2, 4: 3, 5: 4, 6: 5, 7: 3, 8: 7, 9: 1, 10: 9, 11: 9, 12: 9}
EXAMPLE12_BRACKETS = [1, 2, 3, 4, 5, 6, 6, 5, 4, 7, 8, 8, 7, 3, 2, 9, 10, 10, 11, 11, 12, 12, 9, 1]
EXAMPLE12_STAKES = {i: i for i in range(1, 13)}

addr = address_from_int


def log_from_parents(parents, addr_of=addr, order=None):
    """Event log delegating each child to its parent (0 means no event)."""
    log = DelegationEventLog()
    voters = order if order is not None else sorted(parents)
    height = 0
    for voter in voters:
        parent = parents[voter]
        if parent == 0:
            continue
        height += 1
        log.ingest(DelegationEvent(addr_of(voter), addr_of(parent), OrderKey(height, 0, 0)))
    return log


def pipeline_from_parents(parents, stakes, addr_of=addr):
    """(snapshot, forest, table) for an integer-labeled parent map."""
    log = log_from_parents(parents, addr_of)
    stake_map = {addr_of(v): s for v, s in stakes.items()}
    snap = snapshot_at(log, OrderKey(1 << 30, 0, 0), stake_map)
    forest = build_forest(snap)
    return snap, forest, run_preorder(forest, snap)


def example12_pipeline():
    return pipeline_from_parents(EXAMPLE12_PARENTS, EXAMPLE12_STAKES)


def session_from_table(table):
    tree = MerkleTree.from_table(table)
    return TallySession(table.n, tree.root), tree


def vote_message(table, tree, voter_index, candidate, sender=None):
    record = table.record(voter_index)
    return VoteMessage(
        sender=sender if sender is not None else record.address,
        claimed=record,
        proof=tree.prove_leaf(voter_index - 1),
        candidate=candidate,
    )


def random_parents(rng: random.Random, n: int, chainy: float = 0.3) -> dict[int, int]:
    """Random forest over ids 1..n, mixing bushy and chain-like segments."""
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


def shuffled_addr_of(rng: random.Random, n: int):
    """Random unique addresses so sibling order is unrelated to ids."""
    values = rng.sample(range(1, 1 << 48), n)
    mapping = {i + 1: address_from_int(values[i]) for i in range(n)}
    return lambda i: mapping[i]


def normalize(tallies: dict) -> dict:
    return {cand: total for cand, total in tallies.items() if total != 0}


def brute_force_ancestors(parents: dict[int, int], voter: int) -> list[int]:
    chain = []
    node = parents.get(voter, 0)
    while node != 0:
        chain.append(node)
        node = parents.get(node, 0)
    return chain


def random_event_list(rng, voters, count, undelegate_rate=0.1):
    """Strictly ordered random delegate/undelegate events over ids 1..voters."""
    events = []
    height = 0
    for _ in range(count):
        height += 1
        voter = rng.randint(1, voters)
        if rng.random() < undelegate_rate:
            target = None
        else:
            target = rng.randint(1, voters)
            while target == voter:
                target = rng.randint(1, voters)
        events.append(
            DelegationEvent(addr(voter), None if target is None else addr(target), OrderKey(height, 0, 0))
        )
    return events


def snapshot_with_cycle_injection(rnd, voters, count=50):
    """(snap_with, snap_without, injected_cycle_edges) or None if no spot found.

    Builds a random snapshot, picks an edge-less voter that some chain leads
    to, and injects the cycle-closing edge with a random order key.
    """
    from liquidtally.delegation import would_create_cycle

    events = random_event_list(rnd, voters=voters, count=count)
    stakes = {addr(i): 1 for i in range(1, voters + 1)}
    log = DelegationEventLog(events)
    targets = log.delegate_targets()
    edgeless = [i for i in range(1, voters + 1) if addr(i) not in targets]
    rnd.shuffle(edgeless)
    late = OrderKey(1 << 30, 0, 0)
    for source in edgeless:
        ancestors = [u for u in targets if would_create_cycle(targets, addr(source), u)]
        if not ancestors:
            continue
        target = rnd.choice(sorted(ancestors))
        key = OrderKey(1 << 20, 0, rnd.randint(0, 10**6))
        snap_without = snapshot_at(log, late, stakes)
        injected = dict(snap_without.edges)
        injected[addr(source)] = Edge(target, key)
        snap_with = Snapshot(edges=injected, stakes=snap_without.stakes, cut_off=late)
        cycle_edges = set()
        node = addr(source)
        while True:
            edge = injected[node]
            cycle_edges.add((node, edge.delegate, edge.order_key))
            node = edge.delegate
            if node == addr(source):
                break
        return snap_with, snap_without, cycle_edges
    return None


def honest_keys_of(events):
    """Order keys of edges that closed no cycle against the log state at arrival."""
    from liquidtally.delegation import would_create_cycle

    honest = set()
    targets = {}
    for event in events:
        if event.delegate is not None:
            check = dict(targets)
            check.pop(event.voter, None)
            if not would_create_cycle(check, event.voter, event.delegate):
                honest.add(event.order_key)
            targets[event.voter] = event.delegate
        else:
            targets.pop(event.voter, None)
    return honest


def resolve_cycles_by_rule(edges: dict[bytes, Edge]):
    """Independent statement of the cycle rule for differential checks.

    Walks every voter to find a cycle through it (quadratic), deletes the
    cycle's newest edge, and repeats until no cycle survives. Returns the
    deleted set and the surviving edges.
    """
    edges = dict(edges)
    deleted = set()
    while True:
        cycle = None
        for start in sorted(edges):
            path = [start]
            node = edges[start].delegate
            for _ in range(len(edges) + 1):
                if node == start:
                    cycle = path
                    break
                if node not in edges:
                    break
                path.append(node)
                node = edges[node].delegate
            if cycle:
                break
        if not cycle:
            return deleted, edges
        voter = max(cycle, key=lambda u: edges[u].order_key)
        edge = edges.pop(voter)
        deleted.add((voter, edge.delegate, edge.order_key))
