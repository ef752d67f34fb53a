"""Undirected graph core: ingestion, transition matrix, BFS distances, conductance.

Graphs are simple (no self-loops, 0/1 adjacency) and stored in CSR form with
both edge orientations, so ``degrees`` and ``volume`` fall out of the index
structure directly.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

log = logging.getLogger(__name__)


class EdgeListError(ValueError):
    """Malformed edge-list or label input."""


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph in CSR form.

    ``indptr``/``indices`` hold both orientations of every edge, so row ``u``
    of the CSR structure lists the neighbors of ``u``. ``node_names`` keeps
    the original ids from the input file (internal ids are dense 0..n-1 in
    first-seen order); it is None for synthetic graphs.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    node_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.indptr.shape != (self.n + 1,):
            raise ValueError("indptr must have length n+1")
        if self.indices.size != self.indptr[-1]:
            raise ValueError("indices inconsistent with indptr")

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def volume(self) -> int:
        """Sum of all adjacency entries (= 2m for a simple undirected graph)."""
        return int(self.indices.size)

    @property
    def num_edges(self) -> int:
        return self.volume // 2

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def edge_set(self) -> frozenset[tuple[int, int]]:
        """Canonical undirected edge set as (min, max) pairs."""
        return frozenset(
            (int(min(u, v)), int(max(u, v)))
            for u in range(self.n)
            for v in self.neighbors(u)
            if u < v
        )

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (float64)."""
        a = np.zeros((self.n, self.n))
        for u in range(self.n):
            a[u, self.neighbors(u)] = 1.0
        return a

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges,
        node_names: tuple[str, ...] | None = None,
    ) -> "Graph":
        """Build a graph from undirected (u, v) pairs.

        Duplicate pairs and both-orientation listings collapse; self-loops
        are rejected. Nodes without incident edges are allowed (degree 0).
        """
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop ({u},{u}) not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) outside node range 0..{n - 1}")
            canon.add((min(u, v), max(u, v)))
        counts = np.zeros(n, dtype=np.int64)
        for u, v in canon:
            counts[u] += 1
            counts[v] += 1
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = np.zeros(indptr[-1], dtype=np.int64)
        cursor = indptr[:-1].copy()
        for u, v in sorted(canon):
            indices[cursor[u]] = v
            cursor[u] += 1
            indices[cursor[v]] = u
            cursor[v] += 1
        return cls(n=n, indptr=indptr, indices=indices, node_names=node_names)


@dataclass(frozen=True)
class CommunityAssignment:
    """Per-node community labels plus label -> node-set map.

    ``communities`` is ordered by descending size; ties break toward the
    smaller label (numeric when both labels parse as integers).
    """

    labels: tuple[str, ...]
    communities: tuple[tuple[str, frozenset[int]], ...] = field(repr=False)

    def top(self, k: int) -> tuple[tuple[str, frozenset[int]], ...]:
        return self.communities[:k]


def _label_sort_key(label: str):
    try:
        return (0, int(label), "")
    except ValueError:
        return (1, 0, label)


def _read_lines(text) -> list[str]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    elif isinstance(text, io.IOBase) or hasattr(text, "read"):
        text = text.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    return text.splitlines()


def parse_edge_list(text) -> Graph:
    """Parse whitespace-separated edge pairs into a Graph.

    Accepts str, bytes, or a file-like object. Lines starting with '#' and
    blank lines are ignored. Node ids (arbitrary tokens) are remapped to
    dense 0..n-1 in first-seen order. Duplicate edges collapse silently;
    self-loops are dropped with a logged count. A node appearing only in
    dropped self-loops would be isolated and is rejected.
    """
    ids: dict[str, int] = {}
    edges: set[tuple[int, int]] = set()
    loop_nodes: list[str] = []
    n_loops = 0
    for lineno, line in enumerate(_read_lines(text), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise EdgeListError(
                f"line {lineno}: expected two node ids, got {len(tokens)} tokens"
            )
        u = ids.setdefault(tokens[0], len(ids))
        v = ids.setdefault(tokens[1], len(ids))
        if u == v:
            n_loops += 1
            loop_nodes.append(tokens[0])
            continue
        edges.add((min(u, v), max(u, v)))
    if not ids:
        raise EdgeListError("empty edge list")
    if n_loops:
        log.warning("dropped %d self-loop(s)", n_loops)
    n = len(ids)
    g = Graph.from_edges(n, edges, node_names=tuple(ids))
    isolated = np.flatnonzero(g.degrees == 0)
    if isolated.size:
        names = ", ".join(g.node_names[i] for i in isolated[:5])
        raise EdgeListError(
            f"isolated node(s) after ingestion ({names}); prune them from the input"
        )
    return g


def serialize_edge_list(g: Graph) -> str:
    """Write the canonical edge set, one 'u v' line per edge, sorted.

    Uses original node names when the graph carries them. Isolated nodes do
    not appear (an edge list cannot represent them).
    """
    names = g.node_names or tuple(str(i) for i in range(g.n))
    lines = [f"{names[u]} {names[v]}" for u, v in sorted(g.edge_set())]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_labels(text, g: Graph) -> CommunityAssignment:
    """Parse 'node label' lines into a CommunityAssignment for g.

    Every node of g must receive exactly one label; unknown node ids are an
    error. Node ids are matched against g's original names when present,
    else against the stringified internal index.
    """
    if g.node_names is not None:
        lookup = {name: i for i, name in enumerate(g.node_names)}
    else:
        lookup = {str(i): i for i in range(g.n)}
    labels: dict[int, str] = {}
    for lineno, line in enumerate(_read_lines(text), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise EdgeListError(
                f"line {lineno}: expected 'node label', got {len(tokens)} tokens"
            )
        node, label = tokens
        if node not in lookup:
            raise EdgeListError(f"line {lineno}: unknown node id {node!r}")
        labels[lookup[node]] = label
    missing = [i for i in range(g.n) if i not in labels]
    if missing:
        names = g.node_names or tuple(str(i) for i in range(g.n))
        shown = ", ".join(names[i] for i in missing[:10])
        raise EdgeListError(f"{len(missing)} node(s) missing a label: {shown}")
    members: dict[str, set[int]] = {}
    for node, label in labels.items():
        members.setdefault(label, set()).add(node)
    ordered = sorted(
        members.items(), key=lambda kv: (-len(kv[1]), _label_sort_key(kv[0]))
    )
    return CommunityAssignment(
        labels=tuple(labels[i] for i in range(g.n)),
        communities=tuple((lab, frozenset(nodes)) for lab, nodes in ordered),
    )


def transition_matrix(g: Graph) -> np.ndarray:
    """Row-stochastic random-walk matrix: uniform 1/deg(u) over u's neighbors."""
    deg = g.degrees
    if np.any(deg == 0):
        u = int(np.flatnonzero(deg == 0)[0])
        raise ValueError(f"node {u} is isolated; transition matrix undefined")
    p = np.zeros((g.n, g.n))
    for u in range(g.n):
        p[u, g.neighbors(u)] = 1.0 / deg[u]
    return p


def all_pairs_distances(g: Graph) -> np.ndarray:
    """BFS hop distances for all ordered pairs; inf marks unreachable pairs."""
    if g.volume == 0:
        d = np.full((g.n, g.n), np.inf)
        np.fill_diagonal(d, 0.0)
        return d
    data = np.ones(g.indices.size)
    adj = csr_matrix((data, g.indices, g.indptr), shape=(g.n, g.n))
    return shortest_path(adj, method="D", directed=False, unweighted=True)


def conductance(g: Graph, s) -> float:
    """Cut edges between s and its complement over the smaller side's volume."""
    mask = np.zeros(g.n, dtype=bool)
    s = list(s)
    mask[s] = True
    size = int(mask.sum())
    if size == 0 or size == g.n:
        raise ValueError("community must be a nonempty proper subset of the nodes")
    cut = sum(int(np.count_nonzero(~mask[g.neighbors(u)])) for u in np.flatnonzero(mask))
    vol_s = int(g.degrees[mask].sum())
    denom = min(vol_s, g.volume - vol_s)
    if denom == 0:
        raise ValueError("smaller side of the cut has zero volume")
    return cut / denom
