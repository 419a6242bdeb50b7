"""
Command line interface for the tree search suite

Exit codes: 0 success, 1 semantic negative (invalid strategy, infeasible
schedule), 2 input error, 3 resource cap exceeded.
"""

import argparse
import json
import logging
import time
from pathlib import Path
from typing import List, Optional

from tabulate import tabulate

from src.benchmark import DEFAULT_SIZES, runtime_shape, summarize
from src.database import ResultStore
from src.exceptions import (
    InfeasibleScheduleError,
    InstanceFormatError,
    InvalidInstanceError,
    InvalidStrategyError,
    InvalidTreeError,
    ReductionInvariantError,
    ResourceCapError,
    TreeSearchError,
    UnknownVertexError,
    WeightOverflowError,
)
from src import formats
from src.oracle import oracle_cs, oracle_cs_unrooted
from src.scheduling import (
    all_feasible_orders,
    check_structural_lemmas,
    schedule_to_strategy,
    simulate,
    strategy_to_schedule,
    tds_to_tree,
    three_partition_to_tds,
)
from src.search_semantics import replay, verify
from src.solver import SolverOptions, solve_rooted, solve_unrooted
from src.transform import strategy_to_subdivided, to_node_weighted, unrooted_hardness_gadget
from src.utils.helpers import format_trace, instance_hash, load_config, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_CAP = 3

INPUT_ERRORS = (InstanceFormatError, InvalidTreeError, InvalidInstanceError,
                UnknownVertexError, WeightOverflowError, ValueError)
NEGATIVE_ERRORS = (InvalidStrategyError, InfeasibleScheduleError, ReductionInvariantError)


class CommandContext:
    """Configuration, result ledger and output settings shared by every command"""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = load_config(args.config)
        output = self.config.get('output', {})
        self.trace = args.trace or output.get('trace', False)
        self.store: Optional[ResultStore] = None
        self.run_id = -1
        database = self.config.get('database', {})
        if database.get('enabled', False):
            self.store = ResultStore(database.get('sqlite_path', 'data/results.db'))
            self.run_id = self.store.start_run(args.command)

    def solver_options(self) -> SolverOptions:
        solver = self.config.get('solver', {})
        return SolverOptions(
            max_degree_cap=(self.args.max_degree_cap if getattr(self.args, 'max_degree_cap', None)
                            else solver.get('max_degree_cap', 8)),
            naive_k=getattr(self.args, 'naive_k', False) or solver.get('naive_k', False),
            dedup_permutations=(getattr(self.args, 'dedup', False)
                                or solver.get('dedup_permutations', False)),
            trace=self.trace,
        )

    def record(self, path: str, root: int, k: int, method: str, seconds: float):
        if self.store is not None:
            digest = instance_hash(Path(path).read_text(encoding='utf-8'))
            self.store.record_solution(self.run_id, digest, root, k, method, seconds)

    def finish(self, exit_code: int, error: Optional[str] = None):
        if self.store is not None:
            self.store.end_run(self.run_id, exit_code, error)
            self.store.close()


def _print_trace(t, strategy) -> None:
    report = replay(t, strategy)
    print(format_trace(report.per_move))


# ======================================================================
# Commands
# ======================================================================

def cmd_solve(ctx: CommandContext) -> int:
    args = ctx.args
    tree = formats.load_tree(args.tree)
    options = ctx.solver_options()
    began = time.perf_counter()
    if args.rooted or args.root is not None:
        root = tree.root if args.root is None else args.root
        solution = solve_rooted(tree.reroot(root), options)
        method = 'solver-rooted'
    else:
        solution = solve_unrooted(tree, options, parallel_hint=args.jobs > 1)
        method = 'solver-unrooted'
    seconds = time.perf_counter() - began
    ctx.record(args.tree, solution.root, solution.k, method, seconds)

    print(f"k={solution.k}")
    print(f"root={solution.root}")
    print(f"moves={len(solution.strategy.moves)}")
    if ctx.trace:
        _print_trace(tree.reroot(solution.root), solution.strategy)
    if args.output:
        formats.write_instance_file(args.output, "strategy",
                                    formats.strategy_payload(solution.strategy, solution.k))
    return EXIT_OK


def cmd_oracle(ctx: CommandContext) -> int:
    args = ctx.args
    tree = formats.load_tree(args.tree)
    max_edges = args.max_edges or ctx.config.get('oracle', {}).get('max_edges', 20)
    began = time.perf_counter()
    if args.unrooted:
        root, k, strategy = oracle_cs_unrooted(tree, max_edges)
    else:
        root = tree.root if args.root is None else args.root
        k, strategy = oracle_cs(tree, root, max_edges)
    ctx.record(args.tree, root, k, 'oracle', time.perf_counter() - began)

    print(f"k={k}")
    print(f"root={root}")
    if ctx.trace:
        _print_trace(tree, strategy)
    if args.output:
        formats.write_instance_file(args.output, "strategy", formats.strategy_payload(strategy, k))
    return EXIT_OK


def cmd_verify(ctx: CommandContext) -> int:
    args = ctx.args
    tree = formats.load_tree(args.tree)
    strategy, claimed = formats.load_strategy(args.strategy)
    k = args.k if args.k is not None else claimed
    if k is None:
        raise InstanceFormatError("no budget given and the strategy file has no 'k'", field="k")

    translated = False
    if not tree.has_unit_edges:
        # Edge lifting is oriented away from the start vertex.
        tree = tree.reroot(strategy.start)
        prepared = to_node_weighted(tree)
        strategy = strategy_to_subdivided(tree, prepared, strategy)
        tree = prepared
        translated = True
    report = verify(tree, strategy, k)

    result = report.to_dict()
    result['k'] = k
    result['translated'] = translated
    if args.json:
        print(json.dumps(result, indent=2))
    else:
        print(f"ok={str(report.ok).lower()}")
        print(f"searchers_used={report.searchers_used}")
        if report.failure_reason:
            print(f"failure={report.failure_reason} (move {report.failed_move})")
        if ctx.trace:
            print(format_trace(report.per_move))
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_gen(ctx: CommandContext) -> int:
    args = ctx.args
    if args.kind == '3p-to-tds':
        tp = formats.load_three_partition(args.input)
        inst = three_partition_to_tds(tp)
        formats.write_instance_file(args.output, "tds", formats.tds_payload(inst))
        print(f"tasks={len(inst.tasks)}")
        print(f"horizon={inst.horizon}")
    elif args.kind == 'tds-to-tree':
        inst = formats.load_tds(args.input)
        rt = tds_to_tree(inst)
        metadata = {'k': rt.k, 'horizon': rt.horizon, 'task_ids': list(rt.task_ids),
                    'latest_starts': list(rt.latest_starts)}
        formats.write_instance_file(args.output, "tree", formats.tree_payload(rt.tree, metadata))
        print(f"vertices={rt.tree.n}")
        print(f"k={rt.k}")
    else:
        tree = formats.load_tree(args.input)
        k = args.k
        if k is None:
            k = solve_rooted(tree, ctx.solver_options()).k
        gadget = unrooted_hardness_gadget(tree, k)
        formats.write_instance_file(args.output, "tree",
                                    formats.tree_payload(gadget, {'k': k, 'claimed_cs': 2 * k + 1}))
        print(f"vertices={gadget.n}")
        print(f"claimed_cs={2 * k + 1}")
    return EXIT_OK


def cmd_schedule(ctx: CommandContext) -> int:
    args = ctx.args
    inst = formats.load_tds(args.tds)
    max_tasks = ctx.config.get('scheduling', {}).get('brute_max_tasks', 9)

    if args.brute:
        orders = all_feasible_orders(inst, jobs=args.jobs, max_tasks=max_tasks)
        print(f"feasible={str(bool(orders)).lower()}")
        print(f"feasible_orders={len(orders)}")
        if orders:
            print(f"first_order={','.join(orders[0])}")
        if orders and inst.partition is not None:
            violations = 0
            for order in orders:
                violations += len(check_structural_lemmas(inst, simulate(inst, order)).violations)
            print(f"structural_violations={violations}")
        if orders and args.output:
            formats.write_instance_file(args.output, "schedule",
                                        formats.schedule_payload(simulate(inst, orders[0])))
        return EXIT_OK

    order = args.order.split(',') if args.order else inst.task_ids
    schedule = simulate(inst, order)
    print(f"feasible={str(schedule.feasible).lower()}")
    print(f"makespan={schedule.makespan}")
    if schedule.diagnostic:
        print(f"diagnostic={schedule.diagnostic}")
    if schedule.feasible and inst.partition is not None:
        report = check_structural_lemmas(inst, schedule)
        print(tabulate(report.rows(),
                       headers=['Window', 'Start', 'End', 'Contained', 'Length', 'Expected'],
                       tablefmt='grid'))
        print(f"structural_violations={len(report.violations)}")
    if args.output:
        formats.write_instance_file(args.output, "schedule", formats.schedule_payload(schedule))
    return EXIT_OK if schedule.feasible else EXIT_NEGATIVE


def cmd_translate(ctx: CommandContext) -> int:
    args = ctx.args
    inst = formats.load_tds(args.tds)
    rt = tds_to_tree(inst)
    if args.direction == 'schedule-to-strategy':
        schedule = simulate(inst, formats.load_schedule_order(args.input))
        strategy = schedule_to_strategy(inst, schedule, rt)
        report = verify(rt.tree, strategy, rt.k)
        print(f"ok={str(report.ok).lower()}")
        print(f"searchers_used={report.searchers_used}")
        if not report.ok:
            logger.error(f"Translated strategy failed verification: {report.failure_reason}")
            return EXIT_NEGATIVE
        if args.output:
            formats.write_instance_file(args.output, "strategy",
                                        formats.strategy_payload(strategy, rt.k))
        return EXIT_OK

    strategy, _ = formats.load_strategy(args.input)
    schedule = strategy_to_schedule(inst, rt, strategy)
    check = simulate(inst, schedule.order)
    print(f"feasible={str(check.feasible).lower()}")
    print(f"order={','.join(schedule.order)}")
    if not check.feasible:
        return EXIT_NEGATIVE
    if args.output:
        formats.write_instance_file(args.output, "schedule", formats.schedule_payload(schedule))
    return EXIT_OK


def cmd_bench(ctx: CommandContext) -> int:
    args = ctx.args
    results = runtime_shape(args.sizes, seed=args.seed, repeats=args.repeats,
                            options=ctx.solver_options())
    summary = summarize(results)
    print(tabulate(summary['table'], headers='keys', tablefmt='grid', showindex=False))
    print(f"loglog_slope={summary['slope']:.3f}")
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        results.to_csv(args.output, index=False)
    return EXIT_OK


COMMANDS = {
    'solve': cmd_solve,
    'solve-rooted': cmd_solve,
    'oracle': cmd_oracle,
    'verify': cmd_verify,
    'gen': cmd_gen,
    'schedule': cmd_schedule,
    'translate': cmd_translate,
    'bench': cmd_bench,
}


# ======================================================================
# Argument parsing
# ======================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='treesearch',
        description='Connected search of weighted trees and the scheduling reductions',
    )
    parser.add_argument('--config', default='config/config.yaml', help='Path to config file')
    parser.add_argument('--log-level', default=None, help='Override logging level')
    parser.add_argument('--trace', action='store_true', help='Print the per-move i:c+g ledger')
    sub = parser.add_subparsers(dest='command', required=True)

    def solver_flags(p):
        p.add_argument('tree', help='Tree file')
        p.add_argument('--root', type=int, default=None, help='Root vertex (implies rooted)')
        p.add_argument('--naive-k', action='store_true', help='Increase k by one instead of jumping')
        p.add_argument('--dedup', action='store_true', help='Skip orders of identical siblings')
        p.add_argument('--max-degree-cap', type=int, default=None, help='Largest allowed degree')
        p.add_argument('--jobs', type=int, default=1, help='Processes for multi-root solving')
        p.add_argument('--output', help='Strategy file to write')

    p = sub.add_parser('solve', help='Connected search number and strategy')
    solver_flags(p)
    p.add_argument('--rooted', action='store_true', help='Start at the root only')
    p.set_defaults(rooted=False)

    p = sub.add_parser('solve-rooted', help='Connected search number from the root')
    solver_flags(p)
    p.set_defaults(rooted=True)

    p = sub.add_parser('oracle', help='Exhaustive search number (small trees)')
    p.add_argument('tree', help='Tree file')
    p.add_argument('--root', type=int, default=None, help='Start vertex (default: tree root)')
    p.add_argument('--unrooted', action='store_true', help='Minimize over all starts')
    p.add_argument('--max-edges', type=int, default=None, help='Edge cap')
    p.add_argument('--output', help='Witness strategy file to write')

    p = sub.add_parser('verify', help='Check a strategy against a budget')
    p.add_argument('tree', help='Tree file')
    p.add_argument('strategy', help='Strategy file')
    p.add_argument('--k', type=int, default=None, help='Budget (default: k in the strategy file)')
    p.add_argument('--json', action='store_true', help='Machine-readable report')

    p = sub.add_parser('gen', help='Generate reduction instances')
    p.add_argument('kind', choices=['3p-to-tds', 'tds-to-tree', 'gadget-unrooted'])
    p.add_argument('input', help='Input instance file')
    p.add_argument('--output', required=True, help='Output instance file')
    p.add_argument('--k', type=int, default=None, help='Rooted search number for gadget-unrooted')

    p = sub.add_parser('schedule', help='Simulate or brute-force a scheduling instance')
    p.add_argument('tds', help='Scheduling instance file')
    p.add_argument('--order', default=None, help='Comma separated task ids')
    p.add_argument('--brute', action='store_true', help='Enumerate all feasible orders')
    p.add_argument('--jobs', type=int, default=1, help='Processes for brute force')
    p.add_argument('--output', help='Schedule file to write')

    p = sub.add_parser('translate', help='Translate between schedules and tree searches')
    p.add_argument('direction', choices=['schedule-to-strategy', 'strategy-to-schedule'])
    p.add_argument('tds', help='Scheduling instance file')
    p.add_argument('input', help='Schedule or strategy file')
    p.add_argument('--output', help='Output file')

    p = sub.add_parser('bench', help='Solver runtime on random trees')
    p.add_argument('--sizes', type=int, nargs='+', default=list(DEFAULT_SIZES))
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--repeats', type=int, default=1)
    p.add_argument('--output', help='CSV file for the raw timings')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        ctx = CommandContext(args)
    except (OSError, ValueError) as e:
        print(f"Error: cannot load configuration: {e}")
        return EXIT_INPUT

    log_config = ctx.config.get('logging', {})
    setup_logging(args.log_level or log_config.get('level', 'WARNING'), log_config.get('log_file'))

    exit_code = EXIT_OK
    error = None
    try:
        exit_code = COMMANDS[args.command](ctx)
    except ResourceCapError as e:
        logger.error(str(e))
        print(f"Error: {e}")
        exit_code, error = EXIT_CAP, str(e)
    except INPUT_ERRORS as e:
        logger.error(str(e))
        print(f"Error: {e}")
        exit_code, error = EXIT_INPUT, str(e)
    except NEGATIVE_ERRORS as e:
        logger.error(str(e))
        print(f"Rejected: {e}")
        exit_code, error = EXIT_NEGATIVE, str(e)
    except TreeSearchError as e:
        logger.error(str(e))
        print(f"Error: {e}")
        exit_code, error = EXIT_INPUT, str(e)
    finally:
        ctx.finish(exit_code, error)
    return exit_code
