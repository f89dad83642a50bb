"""Desk-scale experiment harness: BFS-sampled subgraphs, bounds vs exact lambda_1.

Each sample is the depth-``bfs_depth`` BFS ball around a randomly drawn seed
node. For every sample the bound interval is computed from egonet moments and
checked against the exact largest eigenvalue.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import networkx as nx
import numpy as np

from .bounds import BoundReport, beta1_closed_form, chung_lu_estimate, compute_bounds, threshold_verdict
from .graph import Graph, bfs_subgraph_sample, read_edge_list
from .linalg import lambda1_exact
from .moments import edge_triangle_moments, spectral_moments_from_egonets

log = logging.getLogger(__name__)

CSV_HEADER = (
    "seed", "n", "e", "lambda1", "beta", "delta", "beta_closed_form",
    "chung_lu", "ms_moments", "ms_bounds", "error",
)
# bisection, PSD slack and power-iteration error together stay far below this
SANDWICH_RTOL = 1e-7


def generate_synthetic(spec: dict, rng_seed: int) -> Graph:
    """Seeded synthetic graph.

    ``spec`` is ``{"kind": "erdos_renyi", "n": .., "p": ..}`` or
    ``{"kind": "preferential_attachment", "n": .., "edges_per_node": ..}``.
    """
    kind = spec.get("kind")
    n = int(spec.get("n", 0))
    if n < 2:
        raise ValueError(f"synthetic graph needs n >= 2, got {n}")
    if kind == "erdos_renyi":
        p = float(spec["p"])
        if not 0.0 < p <= 1.0:
            raise ValueError(f"erdos_renyi needs 0 < p <= 1, got {p}")
        if p < 0.05:
            G = nx.fast_gnp_random_graph(n, p, seed=rng_seed)
        else:
            G = nx.gnp_random_graph(n, p, seed=rng_seed)
    elif kind == "preferential_attachment":
        k = int(spec["edges_per_node"])
        if not 1 <= k < n:
            raise ValueError(f"preferential_attachment needs 1 <= edges_per_node < n, got {k}")
        G = nx.barabasi_albert_graph(n, k, seed=rng_seed)
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    return Graph.from_edges(n, ((u, v, 1.0) for u, v in G.edges()))


@dataclass
class ExperimentConfig:
    input_path: str | None = None
    generator: dict | None = None
    num_samples: int = 100
    bfs_depth: int = 2
    r: int = 2
    rng_seed: int = 0
    tau: float | None = None
    output_csv: str | None = None
    output_json: str | None = None
    workers: int = 1
    record_timings: bool = False
    scan_steps: int = 2000

    def __post_init__(self):
        if (self.input_path is None) == (self.generator is None):
            raise ValueError("config needs exactly one of input_path / generator")
        if self.num_samples < 1 or self.bfs_depth < 1 or self.r < 1:
            raise ValueError("num_samples, bfs_depth and r must all be >= 1")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if base_dir is not None:
            for key in ("input_path", "output_csv", "output_json"):
                if d.get(key) is not None and not Path(d[key]).is_absolute():
                    d[key] = str(base_dir / d[key])
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), base_dir=path.parent)

    def load_graph(self) -> Graph:
        if self.input_path is not None:
            return read_edge_list(self.input_path)
        return generate_synthetic(self.generator, self.generator.get("seed", self.rng_seed))


@dataclass
class ScatterRow:
    seed: str
    n: int | None = None
    e: int | None = None
    lambda1: float | None = None
    beta: float | None = None
    delta: float | None = None
    beta_closed_form: float | None = None
    chung_lu: float | None = None
    ms_moments: float | None = None
    ms_bounds: float | None = None
    error: str | None = None

    def sandwich_ok(self, rtol: float = SANDWICH_RTOL) -> bool:
        """beta <= lambda1 <= delta up to ``rtol * max(1, lambda1)``; rows with errors fail."""
        if self.error is not None or self.lambda1 is None or self.beta is None:
            return False
        slack = rtol * max(1.0, abs(self.lambda1))
        if self.beta > self.lambda1 + slack:
            return False
        return self.delta is None or self.lambda1 <= self.delta + slack


def select_seeds(g: Graph, num_samples: int, rng_seed: int) -> np.ndarray:
    """Distinct seed nodes drawn uniformly from the non-isolated nodes."""
    candidates = np.flatnonzero(g.degrees() > 0)
    if num_samples > len(candidates):
        raise ValueError(f"asked for {num_samples} seeds but only {len(candidates)} non-isolated nodes exist")
    rng = np.random.default_rng(np.random.SeedSequence(rng_seed))
    return rng.choice(candidates, size=num_samples, replace=False)


def run_sample(g: Graph, seed: int, cfg: ExperimentConfig) -> ScatterRow:
    row = ScatterRow(seed=g.labels[seed])
    try:
        sub = bfs_subgraph_sample(g, seed, cfg.bfs_depth)
        row.n, row.e = sub.n, sub.num_edges
        t0 = time.perf_counter()
        m = spectral_moments_from_egonets(sub, cfg.r)
        t1 = time.perf_counter()
        report = compute_bounds(m, cfg.r, scan_steps=cfg.scan_steps)
        t2 = time.perf_counter()
        row.beta, row.delta = report.beta, report.delta
        if sub.is_unweighted:
            _, tri, _ = edge_triangle_moments(sub)
            row.beta_closed_form = beta1_closed_form(sub.n, sub.num_edges, tri)
        row.chung_lu = chung_lu_estimate(sub.weighted_degrees())
        row.lambda1 = lambda1_exact(sub)
        if cfg.record_timings:
            row.ms_moments = (t1 - t0) * 1e3
            row.ms_bounds = (t2 - t1) * 1e3
    except Exception as exc:  # noqa: BLE001 - recorded per row, batch continues
        log.warning("sample at seed %s failed: %s", row.seed, exc)
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def run_experiment(cfg: ExperimentConfig, graph: Graph | None = None) -> list[ScatterRow]:
    """One row per seed, in draw order."""
    g = cfg.load_graph() if graph is None else graph
    seeds = select_seeds(g, cfg.num_samples, cfg.rng_seed)
    if cfg.workers <= 1:
        return [run_sample(g, int(s), cfg) for s in seeds]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(lambda s: run_sample(g, int(s), cfg), seeds))


def summarize(rows: list[ScatterRow], tau: float | None = None) -> dict:
    ok = [r for r in rows if r.error is None]
    widths = [(r.delta - r.beta) / r.lambda1 for r in ok if r.delta is not None and r.lambda1]
    out = {
        "rows": len(rows),
        "errors": len(rows) - len(ok),
        "violations": sum(1 for r in ok if not r.sandwich_ok()),
        "all_pass": all(r.sandwich_ok() for r in rows),
        "median_relative_width": statistics.median(widths) if widths else None,
    }
    if tau is not None:
        counts: dict[str, int] = {}
        for r in ok:
            v = threshold_verdict(BoundReport(r=0, beta=r.beta, delta=r.delta), tau).value
            counts[v] = counts.get(v, 0) + 1
        out["verdicts"] = counts
    return out


# -- output --------------------------------------------------------------------------


def format_number(x) -> str:
    """10 significant digits, trailing zeros kept; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):#.10g}".replace(".e", "e").rstrip(".")


def _round10(x):
    if x is None or isinstance(x, (int, str)):
        return x
    return float(f"{float(x):.10g}")


def scatter_csv(rows: list[ScatterRow]) -> str:
    if not rows:
        raise ValueError("nothing to emit")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        d = asdict(r)
        w.writerow([d["seed"]] + [format_number(d[k]) for k in CSV_HEADER[1:-1]] + [d["error"] or ""])
    return buf.getvalue()


def scatter_json(rows: list[ScatterRow]) -> str:
    if not rows:
        raise ValueError("nothing to emit")
    return json.dumps([{k: _round10(v) for k, v in asdict(r).items()} for r in rows], indent=1) + "\n"


def emit_scatter(rows: list[ScatterRow], path, fmt: str = "csv") -> None:
    if fmt == "csv":
        text = scatter_csv(rows)
    elif fmt == "json":
        text = scatter_json(rows)
    else:
        raise ValueError(f"unknown scatter format {fmt!r}")
    Path(path).write_text(text, encoding="utf-8")


def read_scatter_json(path) -> list[ScatterRow]:
    return [ScatterRow(**d) for d in json.loads(Path(path).read_text(encoding="utf-8"))]


def read_scatter_csv(path) -> list[ScatterRow]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for d in csv.DictReader(fh):
            row = ScatterRow(seed=d["seed"], error=d["error"] or None)
            for k in CSV_HEADER[1:-1]:
                if d[k]:
                    setattr(row, k, int(d[k]) if k in ("n", "e") else float(d[k]))
            rows.append(row)
    return rows
