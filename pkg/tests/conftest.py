"""
Pytest configuration and shared fixtures
"""
import pytest
import tempfile
import sys
from pathlib import Path

import networkx as nx

# Add the project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src import formats
from src.database import ResultStore
from src.tree_core import WeightedRootedTree
from tests.instances import REDUCTION_INSTANCES


# ============================================
# Tree Fixtures
# ============================================

@pytest.fixture
def single_edge():
    """Two unit vertices joined by a unit edge, rooted at 0."""
    return WeightedRootedTree.from_networkx(nx.path_graph(2), root=0)


@pytest.fixture
def unit_path5():
    """Path of 5 unit vertices rooted at an end."""
    return WeightedRootedTree.from_networkx(nx.path_graph(5), root=0)


@pytest.fixture
def star3():
    """Three-leaf unit star rooted at its center 0."""
    return WeightedRootedTree.from_networkx(nx.star_graph(3), root=0)


@pytest.fixture
def heavy_middle_path():
    """Path r(1) - a(5) - b(1) with unit edges."""
    return WeightedRootedTree.from_edges([1, 5, 1], [(0, 1, 1), (1, 2, 1)], root=0)


@pytest.fixture
def heavy_edge():
    """Single edge r(2) - v(1) of weight 3."""
    return WeightedRootedTree.from_edges([2, 1], [(0, 1, 3)], root=0)


@pytest.fixture
def mixed_tree():
    """Edge-weighted tree with internal vertices of different weights."""
    return WeightedRootedTree.from_edges(
        [2, 3, 1, 2, 1, 1],
        [(0, 1, 2), (0, 2, 1), (1, 3, 1), (1, 4, 3), (3, 5, 2)],
        root=0,
    )


# ============================================
# Scheduling Fixtures
# ============================================

@pytest.fixture
def two_unit_tasks():
    """Two tasks with deadline 2 and unit durations."""
    return REDUCTION_INSTANCES['two_unit_tasks'][0]


# ============================================
# Database Fixtures
# ============================================

@pytest.fixture
def in_memory_store():
    """Provide an in-memory result store for testing."""
    store = ResultStore(db_path=":memory:")
    yield store
    store.close()


# ============================================
# File System Fixtures
# ============================================

@pytest.fixture
def temp_dir():
    """Provide a temporary directory."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def write_tree(temp_dir):
    """Write a tree file into temp_dir and return its path."""
    def _write(tree, name="tree.json", metadata=None):
        path = temp_dir / name
        formats.write_instance_file(path, "tree", formats.tree_payload(tree, metadata))
        return path
    return _write


@pytest.fixture
def test_config_file(temp_dir):
    """Create a test configuration file with the ledger enabled."""
    config_path = temp_dir / "test_config.yaml"
    db_path = temp_dir / "results.db"

    config_content = f"""
solver:
  max_degree_cap: 6

logging:
  level: "WARNING"

database:
  enabled: true
  sqlite_path: "{db_path.as_posix()}"
"""

    config_path.write_text(config_content)
    yield config_path


# ============================================
# Pytest Configuration
# ============================================

def pytest_collection_modifyitems(config, items):
    """Modify test collection to add markers automatically."""
    for item in items:
        if "/unit/" in item.nodeid:
            item.add_marker(pytest.mark.unit)
        if "/integration/" in item.nodeid:
            item.add_marker(pytest.mark.integration)
        # Add 'slow' marker to e2e tests
        if "e2e" in item.nodeid:
            item.add_marker(pytest.mark.e2e)
            item.add_marker(pytest.mark.slow)
