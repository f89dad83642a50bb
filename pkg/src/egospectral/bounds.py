"""Certified bounds on the largest eigenvalue from truncated spectral moments.

Lower bound: the smallest ``x`` with ``x*H_even - H_odd`` PSD, where the
``H`` are Hankel moment matrices. The feasible set is upward closed whenever
``H_even`` is PSD, so bisection finds it exactly.

Upper bound: the largest ``y`` for which the moments of the spectrum with
``y`` removed (the "bulk") are feasible on ``[-y, y]``. That program is not
convex in ``y``; it is solved by a descending grid scan from a closed-form cap,
refinement of local maxima of the PSD margin, and upward bisection.

All returned values sit on the feasible side of their program, so the
reported interval encloses the program optimum up to the bisection tolerance.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .linalg import default_psd_tol, min_scaled_eigenvalues, psd_check
from .moments import MomentSequence, _as_moments, scale_moments

DEFAULT_BISECT_TOL = 1e-10
DEFAULT_SCAN_STEPS = 2000


class InfeasibleMomentsError(ValueError):
    """The sequence has no representing measure (``H_even`` is not PSD)."""


class NoFeasibleBoundError(RuntimeError):
    pass


class PremiseError(ValueError):
    """Upper bound requested for a graph whose weights break its proof."""


class Verdict(str, Enum):
    GUARANTEED_DIE_OUT = "GuaranteedDieOut"
    GUARANTEED_ABOVE_THRESHOLD = "GuaranteedAboveThreshold"
    INDETERMINATE = "Indeterminate"


# -- Hankel matrices -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HankelPair:
    r: int
    even: np.ndarray
    odd: np.ndarray


@dataclass(frozen=True, eq=False)
class BulkHankelPair:
    r: int
    y: float
    even: np.ndarray
    odd: np.ndarray


def _values(m, r: int) -> tuple[float, ...]:
    vals = _as_moments(m).values
    if r < 0:
        raise ValueError(f"order r must be nonnegative, got {r}")
    if len(vals) < 2 * r + 2:
        raise ValueError(f"order r={r} needs moments m_0..m_{2 * r + 1}; got only up to m_{len(vals) - 1}")
    return vals[: 2 * r + 2]


def _hankel(seq: Sequence[float] | np.ndarray, r: int, shift: int) -> np.ndarray:
    idx = np.add.outer(np.arange(r + 1), np.arange(r + 1)) + shift
    return np.asarray(seq, dtype=np.float64)[idx]


def build_hankel_pair(m, r: int) -> HankelPair:
    """``even[i][j] = m[i+j]``, ``odd[i][j] = m[i+j+1]`` (0-based)."""
    vals = _values(m, r)
    return HankelPair(r, _hankel(vals, r, 0), _hankel(vals, r, 1))


def _node_count(m) -> int:
    n = m.n if isinstance(m, MomentSequence) else None
    if n is None or n < 2:
        raise ValueError("upper bound requires node count n >= 2")
    return n


def bulk_moments(values: Sequence[float], n: int, y) -> np.ndarray:
    """``(n*m_k - y^k)/(n-1)``: moments of the spectrum with one eigenvalue ``y`` removed.

    ``y`` may be an array; the result then has one row per entry.
    """
    vals = np.asarray(values, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    powers = y[..., None] ** np.arange(len(vals))
    return (n * vals - powers) / (n - 1)


def build_bulk_hankel_pair(m, r: int, y: float) -> BulkHankelPair:
    n = _node_count(m)
    bulk = bulk_moments(_values(m, r), n, y)
    return BulkHankelPair(r, float(y), _hankel(bulk, r, 0), _hankel(bulk, r, 1))


def check_feasibility(m, r: int, *, at_least: float | None = None, at_most: float | None = None,
                      psd_tol: float | None = None) -> bool:
    """Whether ``m_0..m_{2r+1}`` are moments of a measure on R, ``[a, inf)`` or ``(-inf, b]``."""
    if at_least is not None and at_most is not None:
        raise ValueError("give at most one of at_least / at_most")
    h = build_hankel_pair(m, r)
    if not psd_check(h.even, psd_tol):
        return False
    if at_least is not None:
        return psd_check(h.odd - at_least * h.even, psd_tol)
    if at_most is not None:
        return psd_check(at_most * h.even - h.odd, psd_tol)
    return True


def prescale_factor(values: Sequence[float]) -> float:
    """``max(1, sqrt(m_2))``; dividing ``m_k`` by ``s**k`` keeps Hankel entries O(1)."""
    if len(values) < 3 or not values[2] > 0:
        return 1.0
    return max(1.0, math.sqrt(values[2]))


# -- lower bound -------------------------------------------------------------------


def lower_bound_beta(m, r: int, tol: float = DEFAULT_BISECT_TOL, *, psd_tol: float | None = None,
                     prescale: bool = True) -> float:
    """Smallest ``x`` with ``x*H_even - H_odd`` PSD; a lower bound on the top eigenvalue."""
    vals = _values(m, r)
    s = prescale_factor(vals) if prescale else 1.0
    h = build_hankel_pair(scale_moments(vals, s), r)
    psd_tol = default_psd_tol() if psd_tol is None else psd_tol
    if not psd_check(h.even, psd_tol):
        raise InfeasibleMomentsError("input moments infeasible: Hankel moment matrix is not PSD")

    def feasible(x: float) -> bool:
        return psd_check(x * h.even - h.odd, psd_tol)

    # the (0,0) entry x - m_1 forces x >= m_1
    lo = float(h.odd[0, 0])
    if feasible(lo):
        return lo * s
    hi = max(1.0, 2 * abs(lo), float(h.even[1, 1]))
    for _ in range(200):
        if feasible(hi):
            break
        lo, hi = hi, 2 * hi
    else:
        raise NoFeasibleBoundError("no feasible lower bound found after 200 doublings")
    hi = _bisect_down(feasible, lo, hi, tol)
    return _tighten(lambda x: psd_check(x * h.even - h.odd, 0.0), hi, tol, psd_tol) * s


def _bisect_down(feasible, lo: float, hi: float, tol: float) -> float:
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _tighten(strict, x: float, tol: float, psd_tol: float) -> float:
    # The slack admits points up to ~psd_tol below the true boundary. Where the
    # boundary has a strictly feasible side nearby, re-bisect without slack.
    # Few doublings: a singular boundary makes the strict test noisy, so cap the drift.
    step = psd_tol * max(1.0, abs(x))
    for _ in range(6):
        if strict(x + step):
            return _bisect_down(strict, x, x + step, tol)
        step *= 2.0
    return x


def beta1_closed_form(n: int, e: int, triangles: int) -> float:
    """``(3T + sqrt(9T^2 + 8e^3/n)) / (2e)`` for a simple graph with e edges and T triangles."""
    if e < 1:
        raise ValueError("closed-form bound needs at least one edge (an edgeless graph has lambda_1 = 0)")
    if n < 1 or triangles < 0:
        raise ValueError("need n >= 1 and a nonnegative triangle count")
    return (3 * triangles + math.sqrt(9 * triangles**2 + 8 * e**3 / n)) / (2 * e)


def beta1_from_moments(values: Sequence[float]) -> float | None:
    """Closed-form three-moment bound for sequences with ``m_1 = 0``; None otherwise.

    Same value as :func:`beta1_closed_form` with ``m_2 = 2e/n``, ``m_3 = 6T/n``.
    """
    if len(values) < 4 or values[1] != 0.0 or not values[2] > 0:
        return None
    m2, m3 = values[2], values[3]
    return (m3 + math.sqrt(m3 * m3 + 4 * m2**3)) / (2 * m2)


# -- upper bound -------------------------------------------------------------------


def _bulk_stacks(sv: Sequence[float], r: int, n: int, ys: np.ndarray) -> tuple[np.ndarray, ...]:
    bulk = bulk_moments(sv, n, ys)
    idx = np.add.outer(np.arange(r + 1), np.arange(r + 1))
    te = bulk[:, idx]
    to = bulk[:, idx + 1]
    yy = ys[:, None, None]
    return te, yy * te - to, to + yy * te


def _delta_margins(sv, r, n, ys) -> np.ndarray:
    return np.min([min_scaled_eigenvalues(s) for s in _bulk_stacks(sv, r, n, np.atleast_1d(ys))], axis=0)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a: float, b: float, iters: int = 90) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``f`` on ``[a, b]``.

    Brent-type solvers stop near ``sqrt(eps)*|x|``; a kink where the margin
    just touches zero needs the bracket shrunk to rounding level.
    """
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a <= 4 * np.finfo(float).eps * max(1.0, abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def upper_bound_delta(m, r: int, tol: float = DEFAULT_BISECT_TOL, scan_steps: int = DEFAULT_SCAN_STEPS, *,
                      psd_tol: float | None = None, prescale: bool = True, allow_negative: bool = False) -> float:
    """Largest ``y`` whose bulk moments are feasible on ``[-y, y]``; an upper bound on the top eigenvalue.

    Needs ``m.n``. The argument assumes every other eigenvalue is at most
    ``y`` in absolute value, which holds for nonnegative weights; sequences
    flagged with negative weights are refused unless ``allow_negative``.
    """
    n = _node_count(m)
    if isinstance(m, MomentSequence) and m.nonnegative is False and not allow_negative:
        raise PremiseError("upper bound assumes nonnegative weights; pass allow_negative to override")
    if scan_steps < 2:
        raise ValueError("scan_steps must be at least 2")
    vals = _values(m, r)
    psd_tol = default_psd_tol() if psd_tol is None else psd_tol
    s = prescale_factor(vals) if prescale else 1.0
    sv = scale_moments(vals, s)
    if sv[2 * r] < 0:
        raise InfeasibleMomentsError(f"m_{2 * r} is negative")
    # the last diagonal entry of T_even, (n*m_2r - y^2r)/(n-1), must stay >= 0
    cap = (n * sv[2 * r]) ** (1.0 / (2 * r)) if r > 0 else 0.0

    def certified(y: float) -> bool:
        return all(psd_check(stack[0], psd_tol) for stack in _bulk_stacks(sv, r, n, np.array([y])))

    def raise_to_boundary(lo: float, hi: float) -> float:
        while hi - lo > tol * max(1.0, cap):
            mid = 0.5 * (lo + hi)
            if certified(mid):
                lo = mid
            else:
                hi = mid
        return lo

    if cap == 0.0:
        if certified(0.0):
            return 0.0
        raise NoFeasibleBoundError("no feasible upper bound: moments vanish but bulk matrices are not PSD")

    ys = np.linspace(cap, 0.0, scan_steps)
    margins = _delta_margins(sv, r, n, ys)
    for k in range(scan_steps):
        # a feasible set pinched to a point can hide between grid samples;
        # look for it around every sampled local maximum of the margin
        left = margins[k - 1] if k > 0 else -np.inf
        right = margins[k + 1] if k + 1 < scan_steps else -np.inf
        if margins[k] < -psd_tol and margins[k] >= left and margins[k] >= right:
            a = float(ys[k + 1] if k + 1 < scan_steps else ys[k])
            b = float(ys[k - 1] if k > 0 else ys[k])
            y_star, peak = _golden_max(lambda y: float(_delta_margins(sv, r, n, y)[0]), a, b)
            if peak >= -psd_tol and certified(y_star):
                return float(raise_to_boundary(y_star, b) if b > y_star else y_star) * s
        if margins[k] >= -psd_tol and certified(float(ys[k])):
            if k == 0:
                return float(ys[0]) * s
            return raise_to_boundary(float(ys[k]), float(ys[k - 1])) * s
    raise NoFeasibleBoundError("no feasible upper bound - refine scan_steps or check moments")


# -- estimator and verdict ---------------------------------------------------------


def chung_lu_estimate(weights: Sequence[float]) -> float:
    """``sum w_i^2 / sum w_i`` over an expected-degree sequence."""
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0 or np.any(w < 0):
        raise ValueError("need a nonempty nonnegative degree sequence")
    total = math.fsum(w)
    if total <= 0:
        raise ValueError("degree sequence sums to zero")
    return math.fsum(w * w) / total


def chung_lu_condition(weights: Sequence[float]) -> bool:
    """Whether ``sum w^2 / sum w > sqrt(max w) * log n``, the regime where the estimate is asymptotically exact."""
    w = np.asarray(weights, dtype=np.float64)
    return bool(chung_lu_estimate(w) > math.sqrt(float(w.max())) * math.log(len(w)))


@dataclass
class BoundReport:
    r: int
    beta: float
    delta: float | None = None
    beta_closed_form: float | None = None
    lambda1: float | None = None
    chung_lu: float | None = None
    tau: float | None = None
    verdict: Verdict | None = None
    tolerances: dict = field(default_factory=dict)
    prescale: float = 1.0
    premise: str = "nonnegative"

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "beta": self.beta,
            "delta": self.delta,
            "beta_closed_form": self.beta_closed_form,
            "lambda1": self.lambda1,
            "chung_lu": self.chung_lu,
            "tau": self.tau,
            "verdict": self.verdict.value if self.verdict is not None else None,
            "tolerances": dict(self.tolerances),
            "prescale": self.prescale,
            "premise": self.premise,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        d = dict(d)
        if d.get("verdict") is not None:
            d["verdict"] = Verdict(d["verdict"])
        return cls(**d)


def threshold_verdict(report: BoundReport, tau: float) -> Verdict:
    """Classify the epidemic threshold ``tau`` against the certified interval."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    if report.delta is not None and report.delta < tau:
        return Verdict.GUARANTEED_DIE_OUT
    if report.beta > tau:
        return Verdict.GUARANTEED_ABOVE_THRESHOLD
    return Verdict.INDETERMINATE


def compute_bounds(
    m,
    r: int | None = None,
    *,
    tau: float | None = None,
    lambda1: float | None = None,
    chung_lu: float | None = None,
    tol: float = DEFAULT_BISECT_TOL,
    scan_steps: int = DEFAULT_SCAN_STEPS,
    psd_tol: float | None = None,
    prescale: bool = True,
    allow_negative: bool = False,
) -> BoundReport:
    """Run both bound programs on ``m`` and assemble a report.

    ``r`` defaults to the largest order the sequence supports. The upper
    bound is skipped (``delta=None``) when ``n`` is unknown, or when the
    source graph has negative weights and ``allow_negative`` is off.
    """
    m = _as_moments(m)
    if r is None:
        r = (len(m) - 2) // 2
    if r < 1:
        raise ValueError("need at least four moments (r >= 1)")
    psd_tol = default_psd_tol() if psd_tol is None else psd_tol
    vals = _values(m, r)
    beta = lower_bound_beta(m, r, tol, psd_tol=psd_tol, prescale=prescale)

    delta = None
    if m.nonnegative is True:
        premise = "nonnegative"
    elif m.nonnegative is None:
        premise = "assumed"
    else:
        premise = "unverified premise" if allow_negative else "withheld"
    if m.n is not None and m.n >= 2 and premise != "withheld":
        delta = upper_bound_delta(m, r, tol, scan_steps, psd_tol=psd_tol, prescale=prescale,
                                  allow_negative=allow_negative)

    s = prescale_factor(vals) if prescale else 1.0
    report = BoundReport(
        r=r,
        beta=beta,
        delta=delta,
        beta_closed_form=beta1_from_moments(vals),
        lambda1=lambda1,
        chung_lu=chung_lu,
        tau=tau,
        tolerances={
            "psd": psd_tol,
            "bisection": tol,
            "beta_abs": tol * max(1.0, abs(beta / s)) * s,
            "scan_steps": scan_steps,
        },
        prescale=s,
        premise=premise,
    )
    if tau is not None:
        report.verdict = threshold_verdict(report, tau)
    return report
