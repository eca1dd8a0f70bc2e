"""
qpart - hybrid quantum-classical graph partitioning and fill-reducing ordering
"""

__version__ = "1.0.0"
