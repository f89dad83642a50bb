"""Weighted undirected graphs: edge-list ingestion, BFS neighborhoods, egonets.

Graphs are stored in CSR form (``indptr``, ``indices``, ``weights``) with
every neighbor list sorted by node index. Both orientations of each edge are
stored, so ``indices[indptr[i]:indptr[i + 1]]`` is the full neighborhood of
``i``.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp

COMMENT_CHARS = "#%"
# Pragma written by write_edge_list so node order and isolated nodes survive a
# round trip; other tools see an ordinary comment.
NODES_PRAGMA = "#! nodes:"


class GraphFormatError(ValueError):
    """Raised for edge-list input that cannot be turned into a valid Graph."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable weighted undirected graph without self-loops."""

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    labels: tuple[str, ...]
    duplicate_warnings: int = field(default=0, compare=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, float]],
        labels: Iterable[str] | None = None,
    ) -> "Graph":
        """Build a graph on nodes ``0..n-1`` from ``(u, v, w)`` triples.

        Each undirected edge may be listed once in either orientation.
        Repeating an edge with the same weight is tolerated and counted in
        ``duplicate_warnings``; a conflicting weight raises.
        """
        if n < 1:
            raise GraphFormatError("graph must have at least one node")
        seen: dict[tuple[int, int], float] = {}
        dups = 0
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphFormatError(f"self-loop on node {u}")
            _check_weight(w)
            key = (u, v) if u < v else (v, u)
            prev = seen.get(key)
            if prev is None:
                seen[key] = w
            elif prev == w:
                dups += 1
            else:
                raise GraphFormatError(f"edge {key} repeated with conflicting weights {prev!r} and {w!r}")
        lab = tuple(str(x) for x in labels) if labels is not None else tuple(str(i) for i in range(n))
        if len(lab) != n:
            raise GraphFormatError(f"expected {n} labels, got {len(lab)}")
        return cls._from_pairs(n, seen, lab, dups)

    @classmethod
    def _from_pairs(cls, n, pairs: dict[tuple[int, int], float], labels, dups=0) -> "Graph":
        m = len(pairs)
        if m:
            uv = np.fromiter((x for key in pairs for x in key), dtype=np.int64, count=2 * m).reshape(m, 2)
            w = np.fromiter(pairs.values(), dtype=np.float64, count=m)
        else:
            uv = np.empty((0, 2), dtype=np.int64)
            w = np.empty(0, dtype=np.float64)
        rows = np.concatenate([uv[:, 0], uv[:, 1]])
        cols = np.concatenate([uv[:, 1], uv[:, 0]])
        ww = np.concatenate([w, w])
        order = np.lexsort((cols, rows))
        rows, cols, ww = rows[order], cols[order], ww[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(
            _readonly(indptr),
            _readonly(np.ascontiguousarray(cols, dtype=np.int64)),
            _readonly(np.ascontiguousarray(ww, dtype=np.float64)),
            tuple(labels),
            dups,
        )

    @classmethod
    def from_dense(cls, a: np.ndarray, labels: Iterable[str] | None = None) -> "Graph":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise GraphFormatError("adjacency matrix must be square")
        if not np.array_equal(a, a.T):
            raise GraphFormatError("adjacency matrix must be symmetric")
        if np.any(np.diag(a) != 0):
            raise GraphFormatError("adjacency matrix has self-loops")
        iu, ju = np.nonzero(np.triu(a, 1))
        return cls.from_edges(a.shape[0], zip(iu, ju, a[iu, ju]), labels)

    # -- basic queries -------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    @cached_property
    def node_labels(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def has_negative_weights(self) -> bool:
        return bool(np.any(self.weights < 0))

    @cached_property
    def is_unweighted(self) -> bool:
        return bool(np.all(self.weights == 1.0))

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        self._check_node(i)
        s, e = self.indptr[i], self.indptr[i + 1]
        return self.indices[s:e], self.weights[s:e]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def weighted_degrees(self) -> np.ndarray:
        """Row sums of the adjacency matrix (equal to degrees when unweighted)."""
        return np.asarray(self.csr.sum(axis=1)).ravel()

    def edges(self) -> Iterable[tuple[int, int, float]]:
        """Yield each undirected edge once as ``(i, j, w)`` with ``i < j``."""
        for i in range(self.n):
            s, e = self.indptr[i], self.indptr[i + 1]
            for j, w in zip(self.indices[s:e], self.weights[s:e]):
                if j > i:
                    yield i, int(j), float(w)

    @cached_property
    def csr(self) -> sp.csr_matrix:
        m = sp.csr_matrix((self.weights, self.indices, self.indptr), shape=(self.n, self.n))
        m.has_sorted_indices = True
        return m

    def to_dense(self) -> np.ndarray:
        return self.csr.toarray()

    def _check_node(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"node index {i} out of range for graph with n={self.n}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.labels == other.labels
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None  # type: ignore[assignment]

    def summary(self) -> dict:
        w = self.weights
        return {
            "n": self.n,
            "edges": self.num_edges,
            "weighted": not self.is_unweighted,
            "has_negative_weights": self.has_negative_weights,
            "min_weight": float(w.min()) if len(w) else None,
            "max_weight": float(w.max()) if len(w) else None,
            "duplicate_warnings": self.duplicate_warnings,
        }


def _check_weight(w: float) -> None:
    if w == 0.0:
        raise GraphFormatError("zero edge weight")
    if not math.isfinite(w):
        raise GraphFormatError(f"non-finite edge weight {w!r}")


# -- edge-list I/O -----------------------------------------------------------


def parse_edge_list(source: str | TextIO, *, comment_chars: str = COMMENT_CHARS) -> Graph:
    """Parse ``u v`` / ``u v w`` lines into a Graph.

    Labels are arbitrary tokens, mapped to dense indices in order of first
    appearance. A missing weight means 1.0.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    index: dict[str, int] = {}
    pairs: dict[tuple[int, int], float] = {}
    dups = 0

    def node(tok: str) -> int:
        i = index.get(tok)
        if i is None:
            i = index[tok] = len(index)
        return i

    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(NODES_PRAGMA):
            for tok in line[len(NODES_PRAGMA):].split():
                node(tok)
            continue
        if line[0] in comment_chars:
            continue
        toks = line.split()
        if len(toks) not in (2, 3):
            raise GraphFormatError(f"expected 'u v' or 'u v w', got {len(toks)} tokens", lineno)
        if toks[0] == toks[1]:
            raise GraphFormatError(f"self-loop on node {toks[0]!r}", lineno)
        w = 1.0
        if len(toks) == 3:
            try:
                w = float(toks[2])
            except ValueError:
                raise GraphFormatError(f"malformed weight {toks[2]!r}", lineno) from None
            try:
                _check_weight(w)
            except GraphFormatError as exc:
                raise GraphFormatError(str(exc), lineno) from None
        u, v = node(toks[0]), node(toks[1])
        key = (u, v) if u < v else (v, u)
        prev = pairs.get(key)
        if prev is None:
            pairs[key] = w
        elif prev == w:
            dups += 1
        else:
            raise GraphFormatError(
                f"edge {toks[0]}-{toks[1]} repeated with conflicting weights {prev!r} and {w!r}", lineno
            )
    if not index:
        raise GraphFormatError("no edges found")
    return Graph._from_pairs(len(index), pairs, tuple(index), dups)


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh)


def write_edge_list(g: Graph) -> str:
    """Serialize ``g`` so that ``parse_edge_list`` reproduces it exactly."""
    out = [NODES_PRAGMA + " " + " ".join(g.labels)]
    weighted = not g.is_unweighted
    for i, j, w in g.edges():
        if weighted:
            out.append(f"{g.labels[i]} {g.labels[j]} {w!r}")
        else:
            out.append(f"{g.labels[i]} {g.labels[j]}")
    return "\n".join(out) + "\n"


# -- neighborhoods -------------------------------------------------------------


def bfs_levels(g: Graph, i: int, r: int) -> list[np.ndarray]:
    """Hop-distance shells around ``i``: ``levels[d]`` holds nodes at distance d, sorted."""
    g._check_node(i)
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    seen = np.zeros(g.n, dtype=bool)
    seen[i] = True
    levels = [np.array([i], dtype=np.int64)]
    frontier = levels[0]
    for _ in range(r):
        if not len(frontier):
            break
        nxt = np.concatenate([g.indices[g.indptr[u]:g.indptr[u + 1]] for u in frontier])
        nxt = np.unique(nxt[~seen[nxt]])
        if not len(nxt):
            break
        seen[nxt] = True
        levels.append(nxt)
        frontier = nxt
    return levels


def bfs_neighborhood(g: Graph, i: int, r: int) -> np.ndarray:
    """Nodes within ``r`` hops of ``i``: ego first, then by (distance, index)."""
    return np.concatenate(bfs_levels(g, i, r))


@dataclass(frozen=True, eq=False)
class Egonet:
    ego: int
    radius: int
    nodes: np.ndarray
    matrix: np.ndarray

    @property
    def size(self) -> int:
        return len(self.nodes)


def extract_egonet(g: Graph, i: int, r: int) -> Egonet:
    """Dense weighted adjacency of the radius-``r`` egonet of ``i`` (ego at index 0)."""
    nodes = _readonly(bfs_neighborhood(g, i, r))
    sub = g.csr[nodes][:, nodes].toarray()
    return Egonet(i, r, nodes, _readonly(sub))


def induced_subgraph(g: Graph, nodes: np.ndarray) -> Graph:
    """Induced subgraph relabeled so that ``nodes[k]`` becomes node ``k``."""
    nodes = np.asarray(nodes, dtype=np.int64)
    local = np.full(g.n, -1, dtype=np.int64)
    local[nodes] = np.arange(len(nodes))
    pairs: dict[tuple[int, int], float] = {}
    for a, u in enumerate(nodes):
        s, e = g.indptr[u], g.indptr[u + 1]
        for v, w in zip(g.indices[s:e], g.weights[s:e]):
            b = local[v]
            if b > a:
                pairs[(a, int(b))] = float(w)
    return Graph._from_pairs(len(nodes), pairs, tuple(g.labels[u] for u in nodes))


def bfs_subgraph_sample(g: Graph, seed: int, depth: int) -> Graph:
    """Subgraph induced by every node within ``depth`` hops of ``seed``."""
    if depth < 0:
        raise ValueError(f"depth must be nonnegative, got {depth}")
    return induced_subgraph(g, bfs_neighborhood(g, seed, depth))
