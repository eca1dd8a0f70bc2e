"""
Hypothesis strategies for small weighted graphs
"""

from hypothesis import strategies as st

from qpart.models.graph import WeightedGraph

weights = st.integers(min_value=1, max_value=9).map(float)


@st.composite
def small_graphs(draw, min_vertices: int = 1, max_vertices: int = 6, weighted: bool = True):
    n = draw(st.integers(min_value=min_vertices, max_value=max_vertices))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    if weighted:
        edges = [(i, j, draw(weights)) for i, j in chosen]
        vertex_weights = draw(st.lists(weights, min_size=n, max_size=n))
    else:
        edges = chosen
        vertex_weights = None
    return WeightedGraph.from_edges(n, edges, vertex_weights)


@st.composite
def assignments(draw, g: WeightedGraph):
    return draw(st.lists(st.integers(0, 1), min_size=g.n_vertices, max_size=g.n_vertices))
