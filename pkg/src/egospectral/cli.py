"""Command-line entry point: ``egospectral <subcommand> ...``.

Machine-readable results go to stdout as JSON; diagnostics go to stderr.
Exit status: 0 on success, 1 on computational failure or a failed check,
2 on usage errors (bad flags, unreadable input files).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import _backend
from .bounds import DEFAULT_BISECT_TOL, DEFAULT_SCAN_STEPS, chung_lu_condition, chung_lu_estimate, compute_bounds
from .fixtures import FIXTURES, run_fixture
from .graph import GraphFormatError, read_edge_list
from .harness import ExperimentConfig, emit_scatter, run_experiment, summarize
from .linalg import default_psd_tol
from .moments import MomentSequence, moments_exact_trace, spectral_moments_from_egonets

log = logging.getLogger("egospectral")


class UsageError(Exception):
    pass


def _load_graph(path: str):
    if not Path(path).is_file():
        raise UsageError(f"no such file: {path}")
    try:
        return read_edge_list(path)
    except GraphFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def parse_moments_arg(text: str, n: int | None) -> MomentSequence:
    """Moments from a JSON file, a JSON literal, or a comma-separated list."""
    if Path(text).is_file():
        text = Path(text).read_text(encoding="utf-8")
    text = text.strip()
    try:
        if text.startswith("{"):
            m = MomentSequence.from_json(text)
        elif text.startswith("["):
            m = MomentSequence(tuple(json.loads(text)))
        else:
            m = MomentSequence(tuple(float(t) for t in text.split(",")))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read moments: {exc}") from None
    if n is not None:
        m = MomentSequence(m.values, n, m.source, m.r, m.nonnegative)
    return m


def _emit(obj) -> None:
    json.dump(obj, sys.stdout)
    sys.stdout.write("\n")


def cmd_ingest(args) -> int:
    _emit(_load_graph(args.edgelist).summary())
    return 0


def cmd_moments(args) -> int:
    g = _load_graph(args.edgelist)
    m = spectral_moments_from_egonets(g, args.radius, workers=args.workers, backend=args.backend)
    out = m.to_dict()
    status = 0
    if args.verify:
        if g.n > args.cap:
            log.warning("n=%d exceeds dense cap %d; skipping trace verification", g.n, args.cap)
        else:
            ref = moments_exact_trace(g, 2 * args.radius + 1, cap=args.cap)
            diffs = [abs(a - b) / max(1.0, abs(b)) for a, b in zip(m.values, ref.values)]
            ok = max(diffs) <= 1e-9
            out["verify"] = {"trace_moments": list(ref.values), "max_rel_diff": max(diffs), "ok": ok}
            status = 0 if ok else 1
    _emit(out)
    return status


def cmd_bounds(args) -> int:
    m = parse_moments_arg(args.moments, args.n)
    report = compute_bounds(
        m,
        args.radius,
        tau=args.tau,
        tol=args.tol,
        scan_steps=args.scan_steps,
        psd_tol=args.psd_tol,
        allow_negative=args.allow_negative,
    )
    _emit(report.to_dict())
    return 0


def cmd_estimate(args) -> int:
    g = _load_graph(args.edgelist)
    w = g.weighted_degrees()
    _emit({"n": g.n, "chung_lu": chung_lu_estimate(w), "asymptotic_condition": chung_lu_condition(w)})
    return 0


def cmd_experiment(args) -> int:
    if not Path(args.config).is_file():
        raise UsageError(f"no such file: {args.config}")
    try:
        cfg = ExperimentConfig.load(args.config)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad config: {exc}") from None
    if args.csv:
        cfg.output_csv = args.csv
    if args.json:
        cfg.output_json = args.json
    rows = run_experiment(cfg)
    if cfg.output_csv:
        emit_scatter(rows, cfg.output_csv, "csv")
    if cfg.output_json:
        emit_scatter(rows, cfg.output_json, "json")
    summary = summarize(rows, cfg.tau)
    _emit(summary)
    if not summary["all_pass"]:
        log.error("%d row(s) failed the enclosure check (%d errors)", summary["violations"], summary["errors"])
        return 1
    return 0


def cmd_fixtures(args) -> int:
    results = [run_fixture(fx) for fx in FIXTURES]
    ok = all(r["pass"] for r in results)
    _emit({"fixtures": results, "all_pass": ok})
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="egospectral", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="validate an edge list and print a summary")
    s.add_argument("edgelist")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("moments", help="spectral moments from radius-r egonets")
    s.add_argument("edgelist")
    s.add_argument("--radius", "-r", type=int, default=2)
    s.add_argument("--verify", action="store_true", help="compare against dense trace moments")
    s.add_argument("--cap", type=int, default=5000, help="largest n for --verify")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--backend", choices=sorted(_backend.BACKENDS), default=None)
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("bounds", help="eigenvalue interval from a moment sequence")
    s.add_argument("--moments", required=True, help="JSON file, JSON literal, or comma-separated values")
    s.add_argument("--n", type=int, default=None, help="node count (enables the upper bound)")
    s.add_argument("--radius", "-r", type=int, default=None, help="order r (default: largest supported)")
    s.add_argument("--tau", type=float, default=None, help="epidemic threshold for a verdict")
    s.add_argument("--tol", type=float, default=DEFAULT_BISECT_TOL)
    s.add_argument("--scan-steps", type=int, default=DEFAULT_SCAN_STEPS)
    s.add_argument("--psd-tol", type=float, default=None)
    s.add_argument("--allow-negative", action="store_true",
                   help="compute the upper bound even for graphs with negative weights")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("estimate", help="Chung-Lu estimate from the degree sequence")
    s.add_argument("edgelist")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("experiment", help="run the BFS-sample experiment from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--csv", default=None)
    s.add_argument("--json", default=None)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("fixtures", help="check the built-in published moment fixtures")
    s.set_defaults(func=cmd_fixtures)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s: %(message)s")
    try:
        try:
            default_psd_tol()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if getattr(args, "radius", 1) is not None and getattr(args, "radius", 1) < 1:
            raise UsageError("radius must be at least 1")
        if getattr(args, "tau", None) is not None and not (args.tau > 0 and math.isfinite(args.tau)):
            raise UsageError("tau must be a positive number")
        return args.func(args)
    except UsageError as exc:
        print(f"egospectral: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"egospectral: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
