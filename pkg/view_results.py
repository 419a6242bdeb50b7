"""
Simple viewer for the recorded search numbers and command runs
"""

import argparse
import sys
from pathlib import Path

from tabulate import tabulate

from src.database import ResultStore


def open_store(db_path: str) -> ResultStore:
    """Open the result ledger"""
    if not Path(db_path).exists():
        print(f"Error: Database not found at {db_path}")
        sys.exit(1)
    return ResultStore(db_path)


def view_solutions(store: ResultStore, instance_hash=None, limit=10):
    """View recorded solutions"""
    rows = store.get_solutions(instance_hash, limit)
    headers = ['Run', 'Instance', 'Root', 'k', 'Method', 'Seconds', 'Recorded']

    print(f"\n{'='*80}")
    if instance_hash:
        print(f"Solutions for instance {instance_hash}")
    else:
        print(f"Latest {limit} Solutions")
    print(f"{'='*80}")

    formatted_rows = [
        [r['run_id'], r['instance_hash'], r['root'], r['k'], r['method'],
         f"{r['seconds']:.3f}", (r['recorded_at'] or '')[:19]]
        for r in rows
    ]
    print(tabulate(formatted_rows, headers=headers, tablefmt='grid'))


def view_runs(store: ResultStore, limit=10):
    """View recent command runs"""
    rows = store.get_runs(limit)
    headers = ['Run ID', 'Command', 'Started', 'Status', 'Exit', 'Error']

    print(f"\n{'='*80}")
    print("Recent Runs")
    print(f"{'='*80}")

    formatted_rows = []
    for r in rows:
        error = r['error_message'] or ''
        error = error[:50] + '...' if len(error) > 50 else error
        formatted_rows.append([r['run_id'], r['command'], (r['start_time'] or 'Unknown')[:19],
                               r['status'], r['exit_code'], error])
    print(tabulate(formatted_rows, headers=headers, tablefmt='grid'))


def main():
    parser = argparse.ArgumentParser(description='View recorded search numbers')
    parser.add_argument('--db', type=str, default='data/results.db',
                        help='Path to database file')
    parser.add_argument('--runs', type=int, metavar='N', help='Show the last N runs')
    parser.add_argument('--solutions', type=int, metavar='N', help='Show the last N solutions')
    parser.add_argument('--instance', type=str, help='Filter solutions by instance hash')

    args = parser.parse_args()
    store = open_store(args.db)

    try:
        if not any([args.runs, args.solutions]):
            view_runs(store)
            view_solutions(store, args.instance)
        else:
            if args.runs:
                view_runs(store, args.runs)
            if args.solutions:
                view_solutions(store, args.instance, args.solutions)
    finally:
        store.close()


if __name__ == "__main__":
    main()
