"""
Benchmark Module
Runtime shape of the rooted solver on random bounded-degree trees
"""

import logging
import random
import time
from typing import Dict, Sequence

import numpy as np
import pandas as pd

from src.solver import SolverOptions, solve_rooted
from src.tree_core import WeightedRootedTree

logger = logging.getLogger(__name__)

DEFAULT_SIZES = (50, 100, 200)


def random_tree(n: int, rng: random.Random, max_degree: int = 3,
                max_weight: int = 1) -> WeightedRootedTree:
    """Random attachment tree on n vertices, degrees capped, rooted at 0, unit edges"""
    degree = [0] * n
    edges = []
    for v in range(1, n):
        candidates = [u for u in range(v) if degree[u] < max_degree]
        u = rng.choice(candidates)
        degree[u] += 1
        degree[v] += 1
        edges.append((u, v, 1))
    weights = [rng.randint(1, max_weight) for _ in range(n)]
    return WeightedRootedTree.from_edges(weights, edges, 0)


def runtime_shape(sizes: Sequence[int] = DEFAULT_SIZES, seed: int = 0, repeats: int = 1,
                  options: SolverOptions = SolverOptions()) -> pd.DataFrame:
    """
    Time solve_rooted on random max-degree-3 unit trees.

    Returns:
        One row per run with columns n, repeat, k, seconds
    """
    rng = random.Random(seed)
    rows = []
    for n in sizes:
        for repeat in range(repeats):
            tree = random_tree(n, rng)
            began = time.perf_counter()
            solution = solve_rooted(tree, options)
            seconds = time.perf_counter() - began
            logger.info(f"n={n} repeat={repeat}: k={solution.k} in {seconds:.3f}s")
            rows.append({'n': n, 'repeat': repeat, 'k': solution.k, 'seconds': seconds})
    return pd.DataFrame(rows, columns=['n', 'repeat', 'k', 'seconds'])


def loglog_slope(results: pd.DataFrame) -> float:
    """Least-squares slope of log(mean seconds) against log(n)"""
    means = results.groupby('n')['seconds'].mean()
    if len(means) < 2:
        return float('nan')
    seconds = np.maximum(means.to_numpy(dtype=float), 1e-9)
    slope, _ = np.polyfit(np.log(means.index.to_numpy(dtype=float)), np.log(seconds), 1)
    return float(slope)


def summarize(results: pd.DataFrame) -> Dict:
    summary = results.groupby('n').agg(k=('k', 'max'), seconds=('seconds', 'mean')).reset_index()
    return {
        'table': summary,
        'slope': loglog_slope(results),
        'max_seconds': float(results['seconds'].max()) if len(results) else 0.0,
    }
