#!/usr/bin/env python3
"""
Connected search of weighted trees

Usage:
    python treesearch.py solve tree.json --output strategy.json
    python treesearch.py verify tree.json strategy.json
    python treesearch.py gen tds-to-tree tasks.json --output tree.json
"""

import os
import sys

script_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, script_dir)

from src.cli import main


if __name__ == "__main__":
    sys.exit(main())
