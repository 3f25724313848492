import math

import pytest

from liquidtally.bench import bench_chain, bench_grid, build_chain, format_bench_table, plot_data
from liquidtally.errors import ScenarioError
from liquidtally.gas import GasLedger, GasSchedule, StorageMap, gas_of, record_op


class TestLedger:
    def test_read_increments(self):
        ledger = GasLedger()
        record_op(ledger, "read")
        assert (ledger.reads, ledger.fresh_writes, ledger.rewrites) == (1, 0, 0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            record_op(GasLedger(), "refund")

    def test_reset(self):
        ledger = GasLedger(reads=3, fresh_writes=2, rewrites=1)
        ledger.reset()
        assert gas_of(ledger, GasSchedule()) == 0


class TestStorageMap:
    def test_same_key_twice_is_fresh_then_rewrite(self):
        ledger = GasLedger()
        store = StorageMap("x")
        store.ledger = ledger
        store.write("k", 1)
        store.write("k", 2)
        assert (ledger.fresh_writes, ledger.rewrites) == (1, 1)

    def test_distinct_keys_are_both_fresh(self):
        ledger = GasLedger()
        store = StorageMap("x")
        store.ledger = ledger
        store.write("k1", 1)
        store.write("k2", 1)
        assert ledger.fresh_writes == 2

    def test_unset_key_reads_default(self):
        ledger = GasLedger()
        store = StorageMap("x", default=0)
        store.ledger = ledger
        assert store.read("nope") == 0
        assert ledger.reads == 1

    def test_first_write_memory_survives_ledger_swap(self):
        store = StorageMap("x")
        store.write("k", 1)  # unmetered setup write
        ledger = GasLedger()
        store.ledger = ledger
        store.write("k", 2)
        assert (ledger.fresh_writes, ledger.rewrites) == (0, 1)

    def test_peek_is_unmetered(self):
        ledger = GasLedger()
        store = StorageMap("x")
        store.ledger = ledger
        store.write("k", 5)
        assert store.peek("k") == 5
        assert ledger.reads == 0


class TestGasOf:
    def test_empty_ledger(self):
        assert gas_of(GasLedger(), GasSchedule()) == 0

    def test_footnote_costs(self):
        ledger = GasLedger(fresh_writes=1, rewrites=1)
        assert gas_of(ledger, GasSchedule()) == 25000

    def test_ten_reads(self):
        assert gas_of(GasLedger(reads=10), GasSchedule()) == 2000

    def test_schedule_from_json(self, tmp_path):
        path = tmp_path / "sched.json"
        path.write_text('{"cost_read": 100}')
        schedule = GasSchedule.from_json(path)
        assert schedule.cost_read == 100
        assert schedule.cost_fresh_write == 20000

    def test_schedule_unknown_key(self, tmp_path):
        path = tmp_path / "sched.json"
        path.write_text('{"cost_sload": 1}')
        with pytest.raises(ScenarioError):
            GasSchedule.from_json(path)


class TestBenchChain:
    def test_chain_pipeline_shape(self):
        snap, forest, table = build_chain(5)
        assert table.n == 5
        assert table.record(1).power == 5
        assert table.record(5).endpoint == 5

    def test_traversal_head_write_floor(self):
        # the sweep must rewrite every live descendant's nearest-voted pointer
        for n in (10, 100, 400):
            result = bench_chain(n, "head", "traversal")
            assert result.fresh_writes + result.rewrites >= n - 1

    def test_traversal_head_is_linear(self):
        gas_200 = bench_chain(200, "head", "traversal").gas
        gas_400 = bench_chain(400, "head", "traversal").gas
        assert 1.8 <= gas_400 / gas_200 <= 2.2

    def test_fast_grows_by_at_most_one_level(self):
        # between n=2 and n=4 both tree domains gain one level; bound the
        # added work analytically: at most 5 fresh writes, 6 rewrites, and
        # 16 reads per added level pair
        schedule = GasSchedule()
        gas_2 = bench_chain(2, "head", "fast", schedule).gas
        gas_4 = bench_chain(4, "head", "fast", schedule).gas
        level_cost = (
            5 * schedule.cost_fresh_write
            + 6 * schedule.cost_rewrite
            + 16 * schedule.cost_read
        )
        assert 0 <= gas_4 - gas_2 <= level_cost

    def test_crossover_below_two_hundred(self):
        cheaper_small = bench_chain(10, "head", "traversal").gas < bench_chain(10, "head", "fast").gas
        cheaper_large = bench_chain(200, "head", "traversal").gas > bench_chain(200, "head", "fast").gas
        assert cheaper_small and cheaper_large

    def test_fast_visit_counts_within_theorem_slope(self):
        for n in (64, 512, 4096):
            for position in ("head", "tail"):
                result = bench_chain(n, position, "fast")
                assert result.visits <= 8 * math.ceil(math.log2(2 * n)) + 20

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            bench_chain(100, "middle", "fast")
        with pytest.raises(ValueError):
            bench_chain(100, "head", "quantum")
        with pytest.raises(ValueError):
            bench_chain(1)


def test_grid_and_table_format():
    results = bench_grid([4, 8], positions=("head",))
    table = format_bench_table(results)
    lines = table.splitlines()
    assert lines[0].split() == ["n", "position", "algo", "reads", "fresh_writes", "rewrites", "modeled_gas"]
    assert len(lines) == 1 + len(results)
    data = plot_data(results, "head")
    assert data.startswith("# n traversal fast\n")
    assert len(data.strip().splitlines()) == 3
