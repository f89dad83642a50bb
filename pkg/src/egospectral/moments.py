"""Spectral moments ``m_k = (1/n) trace(A^k)`` of weighted graphs.

The production route sums closed-walk weights ``[A_{i,r}^k]_00`` over the
radius-``r`` egonets of every node, which is exact for ``k <= 2r + 1``. The
trace, walk-enumeration and edge/triangle-count routes are independent checks.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .graph import Egonet, Graph

SOURCES = ("egonet", "trace", "counts", "external")


@dataclass(frozen=True)
class MomentSequence:
    """Truncated spectral moments ``(m_0, ..., m_K)`` with ``m_0 = 1``.

    ``n`` is the node count of the source graph (needed for upper bounds).
    ``nonnegative`` records whether the source graph had only positive
    weights; ``None`` means unknown, as for user-supplied sequences.
    """

    values: tuple[float, ...]
    n: int | None = None
    source: str = "external"
    r: int | None = None
    nonnegative: bool | None = None

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ValueError("moment sequence is empty")
        if vals[0] != 1.0:
            raise ValueError(f"m_0 must equal 1, got {vals[0]!r}")
        if any(not math.isfinite(v) for v in vals):
            raise ValueError("moments must be finite")
        if self.source not in SOURCES:
            raise ValueError(f"unknown moment source {self.source!r}")
        if self.n is not None and self.n < 1:
            raise ValueError(f"node count must be positive, got {self.n}")
        # externally supplied sequences may be infeasible; that is for
        # check_feasibility to report, not a construction error
        if self.source != "external" and any(v < 0 for v in vals[2::2]):
            raise ValueError("even moments must be nonnegative")
        if self.source == "egonet" and (self.r is None or len(vals) != 2 * self.r + 2):
            raise ValueError("egonet moments must run exactly to order 2r+1")

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def truncated(self, order: int) -> "MomentSequence":
        if order > self.order:
            raise ValueError(f"need moments up to order {order}, have {self.order}")
        src = "external" if self.source == "egonet" else self.source
        return MomentSequence(self.values[: order + 1], self.n, src, None, self.nonnegative)

    def to_dict(self) -> dict:
        d = {"n": self.n, "r": self.r, "moments": list(self.values), "source": self.source}
        if self.nonnegative is not None:
            d["nonnegative_weights"] = self.nonnegative
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "MomentSequence":
        return cls(
            tuple(d["moments"]),
            d.get("n"),
            d.get("source", "external"),
            d.get("r"),
            d.get("nonnegative_weights"),
        )

    @classmethod
    def from_json(cls, text: str) -> "MomentSequence":
        return cls.from_dict(json.loads(text))


def _as_moments(m) -> MomentSequence:
    return m if isinstance(m, MomentSequence) else MomentSequence(tuple(m))


# -- egonet route --------------------------------------------------------------


def egonet_walk_sum(e: Egonet, k: int) -> float:
    """``[A_{i,r}^k]_00`` by ``k - 1`` matrix-vector products from the ego's unit vector."""
    if not 1 <= k <= 2 * e.radius + 1:
        raise ValueError(
            f"egonet radius insufficient for moment order k={k} (radius {e.radius} allows k <= {2 * e.radius + 1})"
        )
    x = np.zeros(e.size)
    x[0] = 1.0
    for _ in range(k - 1):
        x = e.matrix @ x
    return float(e.matrix[0] @ x)


def egonet_walk_table(
    g: Graph, r: int, *, kmax: int | None = None, workers: int = 1, backend: str | None = None
) -> np.ndarray:
    """Per-node closed-walk sums: row ``i`` holds ``[A_{i,r}^k]_00`` for ``k = 0..kmax``.

    Nodes are split into contiguous blocks processed concurrently; every row
    is computed by the same sequential kernel whatever the block layout.
    """
    kmax = 2 * r + 1 if kmax is None else kmax
    if r < 1:
        raise ValueError(f"radius must be at least 1, got {r}")
    if not 1 <= kmax <= 2 * r + 1:
        raise ValueError(f"egonet radius insufficient for moment order k={kmax}")
    kern = _backend.get(backend)
    n = g.n
    workers = max(1, int(workers))
    if workers == 1 or n < 2 * workers:
        return kern.egonet_walk_sums(g.indptr, g.indices, g.weights, r, kmax, 0, n)
    bounds = np.linspace(0, n, 4 * workers + 1).astype(np.int64)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(
            lambda ab: kern.egonet_walk_sums(g.indptr, g.indices, g.weights, r, kmax, int(ab[0]), int(ab[1])),
            zip(bounds[:-1], bounds[1:]),
        )
        return np.vstack(list(parts))


def spectral_moments_from_egonets(
    g: Graph, r: int, *, workers: int = 1, backend: str | None = None
) -> MomentSequence:
    """``m_k = (1/n) sum_i [A_{i,r}^k]_00`` for ``k = 0..2r+1``."""
    table = egonet_walk_table(g, r, workers=workers, backend=backend)
    vals = [1.0] + [math.fsum(table[:, k]) / g.n for k in range(1, 2 * r + 2)]
    return MomentSequence(tuple(vals), g.n, "egonet", r, not g.has_negative_weights)


# -- oracles ----------------------------------------------------------------------


def moments_exact_trace(g: Graph, K: int, *, cap: int = 5000) -> MomentSequence:
    """``(1/n) trace(A^k)`` for ``k = 0..K`` by repeated sparse-dense products."""
    if g.n > cap:
        raise ValueError(f"n={g.n} exceeds dense cap {cap}; use the egonet route")
    a = g.csr
    p = np.eye(g.n)
    vals = [1.0]
    for _ in range(K):
        p = a @ p
        vals.append(math.fsum(np.diag(p)) / g.n)
    return MomentSequence(tuple(vals), g.n, "trace", None, not g.has_negative_weights)


def closed_walk_oracle(g: Graph, i: int, k: int) -> float:
    """Total weight of closed walks of length ``k`` from ``i``, by explicit enumeration."""
    if k > 8 or g.n > 30:
        raise ValueError("closed_walk_oracle is limited to k <= 8 and n <= 30")
    if k < 0:
        raise ValueError("walk length must be nonnegative")
    g._check_node(i)
    if k == 0:
        return 1.0
    adj = [dict(zip(g.neighbors(u)[0].tolist(), g.neighbors(u)[1].tolist())) for u in range(g.n)]
    total = []

    def walk(u: int, steps: int, weight: float) -> None:
        if steps == k - 1:
            w = adj[u].get(i)
            if w is not None:
                total.append(weight * w)
            return
        for v, w in adj[u].items():
            walk(v, steps + 1, weight * w)

    walk(i, 0, 1.0)
    return math.fsum(total)


def triangle_count(g: Graph, *, backend: str | None = None) -> int:
    return int(_backend.get(backend).triangle_count(g.indptr, g.indices))


def edge_triangle_moments(g: Graph, *, backend: str | None = None) -> tuple[int, int, MomentSequence]:
    """Edge count, triangle count and ``(1, 0, 2e/n, 6*triangles/n)`` for a simple graph."""
    if not g.is_unweighted:
        raise ValueError("edge/triangle moment formulas apply to simple (unweighted) graphs")
    e = g.num_edges
    tri = triangle_count(g, backend=backend)
    m = MomentSequence((1.0, 0.0, 2.0 * e / g.n, 6.0 * tri / g.n), g.n, "counts", None, True)
    return e, tri, m


def scale_moments(values: Sequence[float], s: float) -> tuple[float, ...]:
    """Moments of the measure pushed forward by ``x -> x / s``."""
    return tuple(v / s**k for k, v in enumerate(values))
