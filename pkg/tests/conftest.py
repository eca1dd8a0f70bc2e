"""
Shared fixtures
"""

from pathlib import Path

import pytest

from qpart.main import main
from qpart.models.graph import WeightedGraph
from qpart.services import graph_service

DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture
def pinned_graph() -> WeightedGraph:
    return graph_service.read_metis_graph(DATA_DIR / "pinned_12.graph")


@pytest.fixture
def single_edge() -> WeightedGraph:
    return graph_service.path_graph(2)


@pytest.fixture
def c4() -> WeightedGraph:
    return graph_service.cycle_graph(4)


@pytest.fixture
def write_graph(tmp_path):
    """Write a graph (or raw METIS text) to a file and return its path"""

    def write(g, name: str = "input.graph") -> str:
        path = tmp_path / name
        path.write_text(g if isinstance(g, str) else graph_service.write_metis_graph(g))
        return str(path)

    return write


@pytest.fixture
def run_cli(capsys):
    """Run the command line in-process; returns (exit code, stdout)"""

    def run(*argv: str):
        code = main([str(a) for a in argv])
        return code, capsys.readouterr().out

    return run
