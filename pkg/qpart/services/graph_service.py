"""
Graph ingestion, serialization and structural utilities
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from qpart.core import rng
from qpart.core.errors import GraphFormatError, InputError
from qpart.models.graph import WeightedGraph

logger = logging.getLogger(__name__)


def _content_lines(text: str) -> List[Tuple[int, str]]:
    """(line number, content) for every line that is not a '%' comment"""
    return [
        (no, line)
        for no, line in enumerate(text.splitlines(), start=1)
        if not line.lstrip().startswith("%")
    ]


def _number(token: str, line_no: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise GraphFormatError(f"line {line_no}: {what} '{token}' is not a number")
    if not np.isfinite(value) or value < 0:
        raise GraphFormatError(f"line {line_no}: {what} must be finite and non-negative")
    return value


def _index(token: str, line_no: int, n: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise GraphFormatError(f"line {line_no}: vertex index '{token}' is not an integer")
    if not 1 <= value <= n:
        raise GraphFormatError(f"line {line_no}: vertex index {value} out of range 1..{n}")
    return value - 1


def parse_metis_graph(text: str) -> WeightedGraph:
    """Parse a METIS/Chaco graph file into a 0-based WeightedGraph"""
    lines = _content_lines(text)

    # Header is the first non-blank content line
    while lines and not lines[0][1].strip():
        lines.pop(0)
    if not lines:
        raise GraphFormatError("missing header line")
    header_no, header = lines.pop(0)
    fields = header.split()
    if len(fields) < 2 or len(fields) > 4:
        raise GraphFormatError(f"line {header_no}: header must be 'n m [fmt [ncon]]'")
    try:
        n, m = int(fields[0]), int(fields[1])
    except ValueError:
        raise GraphFormatError(f"line {header_no}: vertex and edge counts must be integers")
    if n < 0 or m < 0:
        raise GraphFormatError(f"line {header_no}: counts must be non-negative")

    fmt = fields[2] if len(fields) > 2 else "0"
    if not fmt.isdigit() or len(fmt) > 3 or set(fmt) - {"0", "1"}:
        raise GraphFormatError(f"line {header_no}: invalid fmt '{fmt}'")
    fmt = fmt.zfill(3)
    has_sizes, has_vweights, has_eweights = (c == "1" for c in fmt)

    ncon = 1
    if len(fields) > 3:
        try:
            ncon = int(fields[3])
        except ValueError:
            raise GraphFormatError(f"line {header_no}: ncon must be an integer")
    if ncon != 1:
        raise GraphFormatError(
            f"line {header_no}: multi-constraint vertex weights (ncon={ncon}) are not supported"
        )

    if len(lines) < n:
        raise GraphFormatError(f"expected {n} vertex lines, found {len(lines)}")
    extra = [no for no, line in lines[n:] if line.strip()]
    if extra:
        raise GraphFormatError(f"line {extra[0]}: content after the last vertex line")

    vertex_weights = np.ones(n, dtype=np.float64)
    # key (i, j), i < j -> [weight listed by i, weight listed by j]
    listings: Dict[Tuple[int, int], List] = {}

    for u, (line_no, line) in enumerate(lines[:n]):
        tokens = line.split()
        pos = 0
        if has_sizes:
            if not tokens:
                raise GraphFormatError(f"line {line_no}: missing vertex size")
            pos += 1
        if has_vweights:
            if len(tokens) <= pos:
                raise GraphFormatError(f"line {line_no}: missing vertex weight")
            vertex_weights[u] = _number(tokens[pos], line_no, "vertex weight")
            pos += 1

        rest = tokens[pos:]
        step = 2 if has_eweights else 1
        if len(rest) % step:
            raise GraphFormatError(f"line {line_no}: neighbor without edge weight")
        for t in range(0, len(rest), step):
            v = _index(rest[t], line_no, n)
            w = _number(rest[t + 1], line_no, "edge weight") if has_eweights else 1.0
            if v == u:
                raise GraphFormatError(f"line {line_no}: self-loop on vertex {u + 1}")
            key = (min(u, v), max(u, v))
            slot = 0 if u < v else 1
            entry = listings.setdefault(key, [None, None])
            if entry[slot] is not None:
                raise GraphFormatError(
                    f"line {line_no}: duplicate edge ({key[0] + 1}, {key[1] + 1})"
                )
            entry[slot] = w

    edges = []
    for (i, j), (w_ij, w_ji) in sorted(listings.items()):
        if w_ij is None or w_ji is None:
            raise GraphFormatError(
                f"edge ({i + 1}, {j + 1}) is listed by only one endpoint"
            )
        if w_ij != w_ji:
            raise GraphFormatError(
                f"edge ({i + 1}, {j + 1}) has inconsistent weights {w_ij} and {w_ji}"
            )
        edges.append((i, j, w_ij))

    if len(edges) != m:
        raise GraphFormatError(f"header declares {m} edges, file lists {len(edges)}")

    graph = WeightedGraph.from_edges(n, edges, vertex_weights)
    logger.debug("Parsed graph: %d vertices, %d edges", graph.n_vertices, graph.n_edges)
    return graph


def read_metis_graph(path: Union[str, Path]) -> WeightedGraph:
    """Read a METIS graph file"""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read graph file {path}: {e}")
    return parse_metis_graph(text)


def _format_number(value: float) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() and abs(value) < 1e15 else repr(value)


def write_metis_graph(g: WeightedGraph) -> str:
    """Serialize to METIS format; weight flags are written only when needed"""
    vweights = not np.all(g.vertex_weights == 1.0)
    eweights = not np.all(g.edge_weights == 1.0)
    header = f"{g.n_vertices} {g.n_edges}"
    if vweights or eweights:
        header += " " + ("1" if vweights else "0") + ("1" if eweights else "0")

    adj = g.adjacency
    out = [header]
    for u in range(g.n_vertices):
        tokens = []
        if vweights:
            tokens.append(_format_number(g.vertex_weights[u]))
        lo, hi = adj.indptr[u], adj.indptr[u + 1]
        for v, w in zip(adj.indices[lo:hi], adj.data[lo:hi]):
            tokens.append(str(int(v) + 1))
            if eweights:
                tokens.append(_format_number(w))
        out.append(" ".join(tokens))
    return "\n".join(out) + "\n"


def laplacian(g: WeightedGraph) -> sp.csr_matrix:
    """L = D - W"""
    return sp.csr_matrix(csgraph.laplacian(g.adjacency.astype(np.float64)))


def adjacency_pattern(g: WeightedGraph) -> sp.csr_matrix:
    """Unit-valued adjacency structure"""
    adj = g.adjacency
    return sp.csr_matrix(
        (np.ones(adj.nnz), adj.indices, adj.indptr), shape=adj.shape
    )


def connected_components(g: WeightedGraph) -> np.ndarray:
    """Component label per vertex, numbered by first occurrence"""
    if g.n_vertices == 0:
        return np.zeros(0, dtype=np.int64)
    _, labels = csgraph.connected_components(adjacency_pattern(g), directed=False)
    return relabel_by_first_occurrence(labels)


def relabel_by_first_occurrence(labels: np.ndarray) -> np.ndarray:
    """Renumber labels 0, 1, ... in order of first appearance"""
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    mapping = np.empty(first.shape[0], dtype=np.int64)
    mapping[np.argsort(first)] = np.arange(first.shape[0])
    return mapping[inverse.ravel()]


def subgraph_by_index(g: WeightedGraph, keep: np.ndarray) -> WeightedGraph:
    """Induced subgraph on the sorted vertex array `keep` (new index t = keep[t])"""
    local = np.full(g.n_vertices, -1, dtype=np.int64)
    local[keep] = np.arange(keep.shape[0])
    if g.n_edges:
        a = local[g.edge_index[:, 0]]
        b = local[g.edge_index[:, 1]]
        inside = (a >= 0) & (b >= 0)
        index = np.stack((a[inside], b[inside]), axis=1)
        weights = g.edge_weights[inside].copy()
    else:
        index = np.zeros((0, 2), dtype=np.int64)
        weights = np.zeros(0)
    # keep is sorted, so the relabeled edges stay sorted with i < j
    return WeightedGraph(
        int(keep.shape[0]), g.vertex_weights[keep].copy(), index, weights
    )


def induced_subgraph(g: WeightedGraph, keep: Iterable[int]) -> Tuple[WeightedGraph, Dict[int, int]]:
    """Subgraph on `keep` plus the old -> new index map"""
    keep_arr = np.unique(np.fromiter((int(v) for v in keep), dtype=np.int64))
    if keep_arr.size == 0:
        raise InputError("induced subgraph needs a nonempty vertex set")
    if keep_arr[0] < 0 or keep_arr[-1] >= g.n_vertices:
        raise InputError("vertex index out of range")
    sub = subgraph_by_index(g, keep_arr)
    return sub, {int(old): new for new, old in enumerate(keep_arr)}


def normalize_weights(g: WeightedGraph) -> WeightedGraph:
    """Divide vertex weights by their maximum and edge weights by theirs"""
    if g.n_vertices == 0:
        raise InputError("cannot normalize an empty graph")
    vmax = float(np.max(g.vertex_weights))
    if vmax <= 0:
        raise InputError("all vertex weights are zero")
    weights = g.edge_weights.copy()
    if g.n_edges:
        wmax = float(np.max(weights))
        if wmax > 0:
            weights = weights / wmax
    return WeightedGraph(
        g.n_vertices, g.vertex_weights / vmax, g.edge_index.copy(), weights
    )


def read_partition(path: Union[str, Path], n: int) -> np.ndarray:
    """Read a partition file (one 0/1 per line)"""
    try:
        tokens = Path(path).read_text().split()
    except OSError as e:
        raise InputError(f"cannot read partition file {path}: {e}")
    if len(tokens) != n or set(tokens) - {"0", "1"}:
        raise InputError(f"partition file must hold {n} entries of 0 or 1")
    return np.array([int(t) for t in tokens], dtype=np.int8)


def write_partition(bits: Sequence[int]) -> str:
    return "".join(f"{int(b)}\n" for b in bits)


# Deterministic generators for tests and demos

def path_graph(n: int) -> WeightedGraph:
    return WeightedGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> WeightedGraph:
    return WeightedGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> WeightedGraph:
    return WeightedGraph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def grid_graph(rows: int, cols: int) -> WeightedGraph:
    """rows x cols lattice, vertex r * cols + c"""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return WeightedGraph.from_edges(rows * cols, edges)


def two_cliques(size: int, bridge_weight: float = 1.0) -> WeightedGraph:
    """Two complete graphs on `size` vertices joined by one edge"""
    edges = []
    for base in (0, size):
        edges.extend(
            (base + i, base + j) for i in range(size) for j in range(i + 1, size)
        )
    edges.append((size - 1, size, bridge_weight))
    return WeightedGraph.from_edges(2 * size, edges)


def random_graph(
    n: int,
    edge_probability: float,
    seed: int,
    weighted: bool = False,
    connected: bool = False,
) -> WeightedGraph:
    """Erdos-Renyi graph; `connected` threads a random spanning path first"""
    gen = rng.stream(seed, "graph.random", n)
    chosen = set()
    if connected and n > 1:
        order = gen.permutation(n)
        chosen.update(
            (min(a, b), max(a, b)) for a, b in zip(order[:-1].tolist(), order[1:].tolist())
        )
    upper = np.triu_indices(n, k=1)
    mask = gen.random(upper[0].shape[0]) < edge_probability
    chosen.update(zip(upper[0][mask].tolist(), upper[1][mask].tolist()))
    pairs = sorted(chosen)
    if weighted:
        ew = gen.integers(1, 10, size=len(pairs)).astype(np.float64)
        vw = gen.integers(1, 5, size=n).astype(np.float64)
    else:
        ew = np.ones(len(pairs))
        vw = np.ones(n)
    return WeightedGraph.from_edges(
        n, [(i, j, w) for (i, j), w in zip(pairs, ew)], vw
    )
