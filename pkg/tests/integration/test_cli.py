"""
Integration tests for the command line interface
Commands run in-process on instance files written to a temporary directory
"""
import json

import pandas as pd
import pytest

from src import formats
from src.cli import EXIT_CAP, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, main
from src.database import ResultStore
from src.scheduling import ThreePartitionInstance, simulate
from src.search_semantics import SearchStrategy
from src.tree_core import WeightedRootedTree
from tests.instances import REDUCTION_INSTANCES, unit_star


@pytest.fixture
def cli(temp_dir, capsys):
    """Run the CLI with built-in defaults; returns (exit code, stdout lines)."""
    def _run(*argv, config=None):
        config = config or temp_dir / "absent.yaml"
        code = main(["--config", str(config), *[str(a) for a in argv]])
        return code, capsys.readouterr().out.splitlines()
    return _run


@pytest.fixture
def write_tds(temp_dir):
    def _write(inst, name="tds.json"):
        path = temp_dir / name
        formats.write_instance_file(path, "tds", formats.tds_payload(inst))
        return path
    return _write


@pytest.fixture
def write_strategy(temp_dir):
    def _write(strategy, k=None, name="strategy.json"):
        path = temp_dir / name
        formats.write_instance_file(path, "strategy", formats.strategy_payload(strategy, k))
        return path
    return _write


# ============================================
# Solving
# ============================================

@pytest.mark.integration
class TestSolveCommands:

    def test_solve_unrooted(self, cli, star3, write_tree):
        code, out = cli("solve", write_tree(star3))
        assert code == EXIT_OK
        assert out[:3] == ["k=2", "root=0", "moves=3"]

    def test_solve_rooted(self, cli, unit_path5, write_tree):
        code, out = cli("solve-rooted", write_tree(unit_path5.reroot(2)))
        assert code == EXIT_OK
        assert out[:2] == ["k=2", "root=2"]

    def test_explicit_root(self, cli, unit_path5, write_tree):
        code, out = cli("solve", write_tree(unit_path5), "--root", 4)
        assert out[:2] == ["k=1", "root=4"]

    def test_trace(self, cli, star3, write_tree):
        code, out = cli("--trace", "solve", write_tree(star3))
        assert code == EXIT_OK
        assert out[3:] == ["1:1+1", "2:1+1", "3:1+0"]

    def test_solution_verifies(self, cli, mixed_tree, write_tree, temp_dir):
        tree_file = write_tree(mixed_tree)
        strategy_file = temp_dir / "out" / "strategy.json"
        code, _ = cli("solve-rooted", tree_file, "--output", strategy_file)
        assert code == EXIT_OK
        code, out = cli("verify", tree_file, strategy_file)
        assert code == EXIT_OK
        assert out[0] == "ok=true"

    def test_unrooted_solution_on_edge_weighted_tree_verifies(self, cli, write_tree, temp_dir):
        tree = WeightedRootedTree.from_edges([3, 2, 1, 3], [(0, 1, 1), (1, 2, 3), (1, 3, 3)], 0)
        tree_file = write_tree(tree)
        strategy_file = temp_dir / "strategy.json"
        code, out = cli("solve", tree_file, "--output", strategy_file)
        assert code == EXIT_OK
        assert out[:2] == ["k=3", "root=2"]
        code, out = cli("verify", tree_file, strategy_file)
        assert code == EXIT_OK
        assert out[:2] == ["ok=true", "searchers_used=3"]

    def test_output_is_deterministic(self, cli, mixed_tree, write_tree, temp_dir):
        tree_file = write_tree(mixed_tree)
        cli("solve", tree_file, "--output", temp_dir / "a.json")
        cli("solve", tree_file, "--output", temp_dir / "b.json")
        assert (temp_dir / "a.json").read_bytes() == (temp_dir / "b.json").read_bytes()

    def test_degree_cap(self, cli, write_tree):
        code, out = cli("solve", write_tree(unit_star(9)))
        assert code == EXIT_CAP
        assert "exceeds cap 8" in out[0]

    def test_degree_cap_flag(self, cli, write_tree):
        code, out = cli("solve-rooted", write_tree(unit_star(9)), "--max-degree-cap", 9, "--dedup")
        assert code == EXIT_OK
        assert out[0] == "k=2"

    def test_unknown_root(self, cli, star3, write_tree):
        code, _ = cli("solve", write_tree(star3), "--root", 17)
        assert code == EXIT_INPUT

    def test_malformed_file(self, cli, temp_dir):
        path = temp_dir / "broken.json"
        path.write_text('{"version": 1, "kind": "tree", "root": 0,')
        code, out = cli("solve", path)
        assert code == EXIT_INPUT
        assert out[0].startswith("Error: line")

    def test_missing_file(self, cli, temp_dir):
        code, _ = cli("solve", temp_dir / "absent.json")
        assert code == EXIT_INPUT

    def test_oracle(self, cli, star3, write_tree):
        code, out = cli("oracle", write_tree(star3))
        assert code == EXIT_OK
        assert out[:2] == ["k=2", "root=0"]

    def test_oracle_unrooted(self, cli, unit_path5, write_tree):
        code, out = cli("oracle", write_tree(unit_path5.reroot(2)), "--unrooted")
        assert out[:2] == ["k=1", "root=0"]

    def test_oracle_cap(self, cli, star3, write_tree):
        code, _ = cli("oracle", write_tree(star3), "--max-edges", 2)
        assert code == EXIT_CAP


# ============================================
# Verification
# ============================================

@pytest.mark.integration
class TestVerifyCommand:

    STAR_ORDER = SearchStrategy(0, ((0, 1), (0, 2), (0, 3)))

    def test_accepts(self, cli, star3, write_tree, write_strategy):
        code, out = cli("verify", write_tree(star3), write_strategy(self.STAR_ORDER, 2))
        assert code == EXIT_OK
        assert out == ["ok=true", "searchers_used=2"]

    def test_rejects_with_diagnostic(self, cli, star3, write_tree, write_strategy):
        code, out = cli("verify", write_tree(star3), write_strategy(self.STAR_ORDER), "--k", 1)
        assert code == EXIT_NEGATIVE
        assert out[0] == "ok=false"
        assert out[2].endswith("(move 1)")

    def test_budget_required(self, cli, star3, write_tree, write_strategy):
        code, _ = cli("verify", write_tree(star3), write_strategy(self.STAR_ORDER))
        assert code == EXIT_INPUT

    def test_json_report(self, cli, star3, write_tree, write_strategy):
        code, out = cli("verify", write_tree(star3), write_strategy(self.STAR_ORDER, 2), "--json")
        report = json.loads("\n".join(out))
        assert report['ok'] is True
        assert report['k'] == 2
        assert report['translated'] is False
        assert [m['cost'] for m in report['per_move']] == [2, 2, 1]

    def test_edge_weighted_tree_is_translated(self, cli, heavy_edge, write_tree, write_strategy):
        code, out = cli("verify", write_tree(heavy_edge),
                        write_strategy(SearchStrategy(0, ((0, 1),)), 3), "--json")
        report = json.loads("\n".join(out))
        assert code == EXIT_OK
        assert report['translated'] is True
        assert report['searchers_used'] == 3


# ============================================
# Reductions
# ============================================

@pytest.mark.integration
class TestReductionCommands:

    @pytest.fixture
    def partition_file(self, temp_dir):
        path = temp_dir / "tp.json"
        formats.write_instance_file(path, "three_partition",
                                    formats.three_partition_payload(ThreePartitionInstance(12, (4, 4, 4))))
        return path

    def test_three_partition_chain(self, cli, partition_file, temp_dir):
        tds_file = temp_dir / "gadget.json"
        code, out = cli("gen", "3p-to-tds", partition_file, "--output", tds_file)
        assert code == EXIT_OK
        assert out == ["tasks=4", "horizon=1740"]
        code, out = cli("schedule", tds_file, "--brute")
        assert code == EXIT_OK
        assert out[0] == "feasible=true"
        assert out[-1] == "structural_violations=0"

    def test_schedule_window_table(self, cli, partition_file, temp_dir):
        tds_file = temp_dir / "gadget.json"
        cli("gen", "3p-to-tds", partition_file, "--output", tds_file)
        code, out = cli("schedule", tds_file, "--order", "G1,J1,J2,J3")
        assert code == EXIT_OK
        assert out[:2] == ["feasible=true", "makespan=1740"]
        assert any("1728" in line and "1740" in line for line in out)

    def test_tds_to_tree(self, cli, write_tds, temp_dir):
        inst, _ = REDUCTION_INSTANCES['two_unit_tasks']
        tree_file = temp_dir / "reduction.json"
        code, out = cli("gen", "tds-to-tree", write_tds(inst), "--output", tree_file)
        assert out == ["vertices=15", "k=8"]
        metadata = json.loads(tree_file.read_text())["metadata"]
        assert metadata == {"k": 8, "horizon": 2, "task_ids": ["J1", "J2"], "latest_starts": [1, 1]}
        code, out = cli("solve-rooted", tree_file)
        assert out[0] == "k=8"

    def test_gen_is_deterministic(self, cli, write_tds, temp_dir):
        inst, _ = REDUCTION_INSTANCES['growing_durations']
        tds_file = write_tds(inst)
        cli("gen", "tds-to-tree", tds_file, "--output", temp_dir / "a.json")
        cli("gen", "tds-to-tree", tds_file, "--output", temp_dir / "b.json")
        assert (temp_dir / "a.json").read_bytes() == (temp_dir / "b.json").read_bytes()

    @pytest.mark.parametrize("extra", [["--k", "1"], []])
    def test_gadget(self, cli, single_edge, write_tree, temp_dir, extra):
        code, out = cli("gen", "gadget-unrooted", write_tree(single_edge),
                        "--output", temp_dir / "gadget.json", *extra)
        assert code == EXIT_OK
        assert out == ["vertices=7", "claimed_cs=3"]

    def test_schedule_order(self, cli, write_tds):
        inst, _ = REDUCTION_INSTANCES['two_unit_tasks']
        code, out = cli("schedule", write_tds(inst), "--order", "J2,J1")
        assert code == EXIT_OK
        assert out == ["feasible=true", "makespan=2"]

    def test_infeasible_order(self, cli, write_tds):
        inst, _ = REDUCTION_INSTANCES['two_tasks_same_slot']
        code, out = cli("schedule", write_tds(inst))
        assert code == EXIT_NEGATIVE
        assert out[0] == "feasible=false"
        assert out[2].startswith("diagnostic=")

    def test_brute_force_infeasible(self, cli, write_tds):
        inst, _ = REDUCTION_INSTANCES['two_long_tasks']
        code, out = cli("schedule", write_tds(inst), "--brute")
        assert code == EXIT_OK
        assert out == ["feasible=false", "feasible_orders=0"]

    def test_translate_round_trip(self, cli, write_tds, temp_dir):
        inst, _ = REDUCTION_INSTANCES['two_unit_tasks']
        tds_file = write_tds(inst)
        schedule_file = temp_dir / "schedule.json"
        formats.write_instance_file(schedule_file, "schedule",
                                    formats.schedule_payload(simulate(inst, ["J2", "J1"])))
        strategy_file = temp_dir / "strategy.json"
        code, out = cli("translate", "schedule-to-strategy", tds_file, schedule_file,
                        "--output", strategy_file)
        assert code == EXIT_OK
        assert out == ["ok=true", "searchers_used=8"]
        code, out = cli("translate", "strategy-to-schedule", tds_file, strategy_file)
        assert code == EXIT_OK
        assert out == ["feasible=true", "order=J2,J1"]

    def test_translate_infeasible_schedule(self, cli, write_tds, temp_dir):
        inst, _ = REDUCTION_INSTANCES['two_tasks_same_slot']
        schedule_file = temp_dir / "schedule.json"
        formats.write_instance_file(schedule_file, "schedule",
                                    formats.schedule_payload(simulate(inst, ["J1", "J2"])))
        code, _ = cli("translate", "schedule-to-strategy", write_tds(inst), schedule_file)
        assert code == EXIT_NEGATIVE


# ============================================
# Benchmark and ledger
# ============================================

@pytest.mark.integration
class TestBenchAndLedger:

    def test_bench_summary(self, cli, mocker, temp_dir):
        timings = pd.DataFrame({'n': [10, 20], 'repeat': [0, 0], 'k': [2, 3], 'seconds': [1.0, 4.0]})
        runner = mocker.patch('src.cli.runtime_shape', return_value=timings)
        csv_file = temp_dir / "bench" / "timings.csv"
        code, out = cli("bench", "--sizes", 10, 20, "--output", csv_file)
        assert code == EXIT_OK
        assert out[-1] == "loglog_slope=2.000"
        assert runner.call_args.args[0] == [10, 20]
        assert pd.read_csv(csv_file)['seconds'].tolist() == [1.0, 4.0]

    @pytest.mark.database
    def test_runs_are_recorded(self, cli, star3, write_tree, test_config_file, temp_dir):
        tree_file = write_tree(star3)
        cli("solve", tree_file, config=test_config_file)
        cli("oracle", tree_file, "--max-edges", 2, config=test_config_file)
        store = ResultStore(str(temp_dir / "results.db"))
        runs = store.get_runs()
        solutions = store.get_solutions()
        store.close()
        assert [(r['command'], r['status'], r['exit_code']) for r in runs] == [
            ("oracle", "failed", EXIT_CAP), ("solve", "completed", EXIT_OK)]
        assert len(solutions) == 1
        assert (solutions[0]['k'], solutions[0]['method']) == (2, "solver-unrooted")

    def test_bad_config(self, cli, star3, write_tree, temp_dir):
        config = temp_dir / "bad.yaml"
        config.write_text("- not\n- a mapping\n")
        code, _ = cli("solve", write_tree(star3), config=config)
        assert code == EXIT_INPUT
