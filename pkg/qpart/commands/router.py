"""
Main command router
"""

from qpart.commands import coarsen, oracle, order, partition, sweep
from qpart.core.cli import CommandRouter

cli_router = CommandRouter()

# Include all command routers
cli_router.include_router(partition.router)
cli_router.include_router(order.router)
cli_router.include_router(sweep.router)
cli_router.include_router(oracle.router)
cli_router.include_router(coarsen.router)
