"""
Utilities for the tree search suite
"""

import copy
import hashlib
import logging
from pathlib import Path
from typing import Dict, Optional

import yaml

logger = logging.getLogger(__name__)

DEFAULT_CONFIG: Dict = {
    'solver': {
        'max_degree_cap': 8,
        'naive_k': False,
        'dedup_permutations': False,
    },
    'oracle': {
        'max_edges': 20,
    },
    'scheduling': {
        'brute_max_tasks': 9,
    },
    'logging': {
        'level': 'WARNING',
        'log_file': None,
    },
    'database': {
        'enabled': False,
        'sqlite_path': 'data/results.db',
    },
    'output': {
        'trace': False,
    },
}


def _merge(base: Dict, override: Dict) -> Dict:
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: Optional[str] = None) -> Dict:
    """
    Load YAML configuration on top of the built-in defaults

    Args:
        config_path: Path to a YAML file; missing files yield the defaults

    Returns:
        Configuration dictionary
    """
    if not config_path or not Path(config_path).exists():
        if config_path:
            logger.debug(f"Config file {config_path} not found, using defaults")
        return copy.deepcopy(DEFAULT_CONFIG)

    with open(config_path, 'r', encoding='utf-8') as f:
        loaded = yaml.safe_load(f) or {}
    if not isinstance(loaded, dict):
        raise ValueError(f"Config file {config_path} must contain a mapping")
    return _merge(DEFAULT_CONFIG, loaded)


def setup_logging(log_level: str = 'INFO', log_file: Optional[str] = None):
    """
    Setup logging configuration

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional path to log file
    """
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, log_level.upper()))
    for handler in list(root_logger.handlers):
        if getattr(handler, '_treesearch', False):
            root_logger.removeHandler(handler)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler._treesearch = True
    root_logger.addHandler(console_handler)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        file_handler._treesearch = True
        root_logger.addHandler(file_handler)

    logger.debug(f"Logging initialized at {log_level} level")


def instance_hash(text: str) -> str:
    """Short stable fingerprint of an instance file's contents"""
    return hashlib.sha256(text.encode('utf-8')).hexdigest()[:16]


def format_trace(records) -> str:
    """Per-move ledger lines 'i:c+g' (clearing + guarding searchers)"""
    return "\n".join(f"{i}:{r.clearing}+{r.guarding}" for i, r in enumerate(records, start=1))
