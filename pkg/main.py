#!/usr/bin/env python3
"""
qpart - Hybrid quantum-classical graph partitioning
Balanced bipartitions and nested dissection orderings from a coarsen, solve, lift loop.
"""

import os
import sys

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from qpart.main import main


if __name__ == "__main__":
    sys.exit(main())
