import json
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from egospectral.bounds import (
    BoundReport,
    InfeasibleMomentsError,
    NoFeasibleBoundError,
    PremiseError,
    Verdict,
    beta1_closed_form,
    beta1_from_moments,
    build_bulk_hankel_pair,
    build_hankel_pair,
    check_feasibility,
    chung_lu_condition,
    chung_lu_estimate,
    compute_bounds,
    lower_bound_beta,
    threshold_verdict,
    upper_bound_delta,
)
from egospectral.graph import Graph
from egospectral.linalg import psd_check, sym_eigenvalues
from egospectral.moments import MomentSequence, edge_triangle_moments, spectral_moments_from_egonets

from conftest import graph_from_nx, random_weighted_graph

K3 = MomentSequence((1, 0, 2, 2), 3)
P3 = MomentSequence((1, 0, 4 / 3, 0, 8 / 3, 0), 3)
ENRON = MomentSequence((1, 0, 22.47, 394.7, 33491, 2603200), 3215)
SQRT2 = math.sqrt(2)


def measure_moments(atoms, weights, K):
    atoms, weights = np.asarray(atoms, float), np.asarray(weights, float)
    weights = weights / weights.sum()
    return (1.0,) + tuple(float(np.sum(weights * atoms**k)) for k in range(1, K + 1))


class TestHankel:
    def test_k3(self):
        h = build_hankel_pair(K3, 1)
        np.testing.assert_array_equal(h.even, [[1, 0], [0, 2]])
        np.testing.assert_array_equal(h.odd, [[0, 2], [2, 2]])

    def test_p3_order2(self):
        h = build_hankel_pair(P3, 2)
        np.testing.assert_allclose(h.even, [[1, 0, 4 / 3], [0, 4 / 3, 0], [4 / 3, 0, 8 / 3]])

    def test_point_mass_at_zero(self):
        np.testing.assert_array_equal(build_hankel_pair((1, 0, 0, 0), 1).even, [[1, 0], [0, 0]])

    def test_hankel_structure(self):
        vals = tuple(range(1, 9))
        h = build_hankel_pair((1.0,) + vals[1:], 3)
        for mat in (h.even, h.odd):
            for i in range(3):
                for j in range(3):
                    assert mat[i, j + 1] == mat[i + 1, j]

    def test_too_short(self):
        with pytest.raises(ValueError, match="m_0..m_5"):
            build_hankel_pair(K3, 2)


class TestFeasibility:
    def test_k3_all_reals(self):
        assert check_feasibility(K3, 1)

    def test_negative_variance(self):
        assert not check_feasibility((1, 0, -1, 0), 1)

    def test_k3_upper_support(self):
        # det condition 2b^2 - 2b - 4 >= 0 forces b >= 2
        assert check_feasibility(K3, 1, at_most=2)
        assert not check_feasibility(K3, 1, at_most=1.9)

    def test_k3_lower_support(self):
        assert check_feasibility(K3, 1, at_least=-1)
        assert not check_feasibility(K3, 1, at_least=-0.9)

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.floats(-5, 5), min_size=1, max_size=5),
        st.lists(st.floats(0.1, 1), min_size=5, max_size=5),
        st.floats(-6, 6),
        st.integers(1, 2),
    )
    def test_reflection_symmetry(self, atoms, weights, a, r):
        vals = measure_moments(atoms, weights[: len(atoms)], 2 * r + 1)
        flipped = tuple((-1) ** k * v for k, v in enumerate(vals))
        assert check_feasibility(vals, r, at_least=a) == check_feasibility(flipped, r, at_most=-a)

    def test_discrete_support(self, rng):
        for _ in range(30):
            atoms = rng.uniform(-3, 3, size=3)
            vals = measure_moments(atoms, rng.uniform(0.2, 1, size=3), 5)
            assert check_feasibility(vals, 2, at_least=atoms.min() - 1e-6)
            assert check_feasibility(vals, 2, at_most=atoms.max() + 1e-6)
            # three atoms are pinned by six moments; shrinking the interval breaks feasibility
            assert not check_feasibility(vals, 2, at_most=atoms.max() - 1e-2)


class TestLowerBound:
    def test_k3(self):
        assert lower_bound_beta(K3, 1) == pytest.approx(2.0, abs=1e-8)

    def test_p3_order2(self, p3):
        lam1 = float(sym_eigenvalues(p3.to_dense())[0])
        assert lam1 == pytest.approx(SQRT2, abs=1e-14)
        assert lower_bound_beta(P3, 2) == pytest.approx(lam1, abs=1e-8)

    def test_enron(self):
        assert lower_bound_beta(ENRON, 2) == pytest.approx(78.53, rel=0.01)

    def test_infeasible(self):
        with pytest.raises(InfeasibleMomentsError, match="infeasible"):
            lower_bound_beta((1, 0, -1, 0), 1)

    def test_point_mass(self):
        assert lower_bound_beta((1, 0.5, 0.25, 0.125), 1) == pytest.approx(0.5)

    def test_prescale_invariant(self):
        assert lower_bound_beta(ENRON, 2, prescale=False) == pytest.approx(lower_bound_beta(ENRON, 2), rel=1e-6)

    def test_measure_top_atom(self, rng):
        # beta_r is at most the top of the support
        for _ in range(30):
            atoms = rng.normal(size=6)
            vals = measure_moments(atoms, rng.uniform(0.1, 1, size=6), 5)
            for r in (1, 2):
                assert lower_bound_beta(vals, r) <= atoms.max() + 1e-7


class TestClosedForm:
    def test_k3(self):
        assert beta1_closed_form(3, 3, 1) == 2.0

    def test_star(self):
        assert beta1_closed_form(4, 3, 0) == pytest.approx(math.sqrt(6) / 2, abs=1e-15)

    def test_p3(self):
        assert beta1_closed_form(3, 2, 0) == pytest.approx(2 / math.sqrt(3), abs=1e-15)

    def test_edgeless(self):
        with pytest.raises(ValueError, match="edge"):
            beta1_closed_form(3, 0, 0)

    def test_matches_sdp(self):
        for seed in range(20):
            G = nx.gnp_random_graph(25, 0.2 + 0.02 * seed, seed=seed)
            g = graph_from_nx(G)
            if g.num_edges == 0:
                continue
            e, tri, m = edge_triangle_moments(g)
            cf = beta1_closed_form(g.n, e, tri)
            assert lower_bound_beta(m, 1) == pytest.approx(cf, abs=1e-7)
            assert beta1_from_moments(m.values) == pytest.approx(cf, rel=1e-13)


class TestBulkHankel:
    def test_k3_at_two(self):
        b = build_bulk_hankel_pair(K3, 1, 2.0)
        np.testing.assert_array_equal(b.even, [[1, -1], [-1, 1]])
        np.testing.assert_array_equal(b.odd, [[-1, 1], [1, -1]])
        # moments of the bulk {-1, -1}
        np.testing.assert_array_equal(b.even, build_hankel_pair((1, -1, 1, -1), 1).even)

    def test_origin(self, rng):
        vals = (1.0, 0.0) + tuple(rng.uniform(1, 5, size=4))
        assert build_bulk_hankel_pair(MomentSequence(vals, 7), 2, 0.0).even[0, 0] == 1.0

    def test_needs_n(self):
        with pytest.raises(ValueError, match="node count"):
            build_bulk_hankel_pair(MomentSequence((1, 0, 2, 2)), 1, 2.0)
        with pytest.raises(ValueError, match="node count"):
            build_bulk_hankel_pair(MomentSequence((1, 0, 2, 2), 1), 1, 2.0)

    def test_equals_hankel_of_bulk_moments(self, rng):
        for _ in range(20):
            g = random_weighted_graph(rng, int(rng.integers(3, 25)), p=0.3)
            lam = np.sort(np.linalg.eigvalsh(g.to_dense()))[::-1]
            m = spectral_moments_from_egonets(g, 2)
            bulk = [float(np.mean(lam[1:] ** k)) for k in range(6)]
            got = build_bulk_hankel_pair(m, 2, lam[0])
            want = build_hankel_pair(bulk, 2)
            scale = max(1.0, np.abs(want.odd).max())
            np.testing.assert_allclose(got.even, want.even, atol=1e-9 * scale)
            np.testing.assert_allclose(got.odd, want.odd, atol=1e-9 * scale)


def delta_feasible(m, r, y):
    b = build_bulk_hankel_pair(m, r, y)
    return psd_check(b.even) and psd_check(y * b.even - b.odd) and psd_check(b.odd + y * b.even)


class TestUpperBound:
    def test_k3(self):
        assert upper_bound_delta(K3, 1) == pytest.approx(2.0, abs=1e-8)

    def test_k3_isolated_point_found_on_coarse_grid(self):
        assert upper_bound_delta(K3, 1, scan_steps=7) == pytest.approx(2.0, abs=1e-8)

    def test_p3(self):
        assert upper_bound_delta(MomentSequence(P3.values[:4], 3), 1) == pytest.approx(SQRT2, abs=1e-8)

    def test_p3_feasible_interval(self):
        m = MomentSequence(P3.values[:4], 3)
        lo = 2 / math.sqrt(3)
        for y in np.linspace(lo + 1e-6, SQRT2 - 1e-6, 25):
            assert delta_feasible(m, 1, y)
        for y in (0.0, 0.5, lo - 1e-3, SQRT2 + 1e-3, 1.9):
            assert not delta_feasible(m, 1, y)

    def test_enron(self):
        assert upper_bound_delta(ENRON, 2) == pytest.approx(98.74, rel=0.01)

    def test_needs_n(self):
        with pytest.raises(ValueError, match="node count"):
            upper_bound_delta(MomentSequence((1, 0, 2, 2)), 1)

    def test_negative_weights_gated(self):
        # signed path: spectrum still symmetric, so the premise happens to hold
        m = MomentSequence(P3.values[:4], 3, "trace", None, nonnegative=False)
        with pytest.raises(PremiseError):
            upper_bound_delta(m, 1)
        assert upper_bound_delta(m, 1, allow_negative=True) == pytest.approx(SQRT2, abs=1e-8)

    def test_negative_triangle_breaks_premise(self):
        # all -1 triangle: spectrum {1, 1, -2}, so no y bounds the bulk in absolute value
        m = MomentSequence((1, 0, 2, -2), 3, "trace", None, nonnegative=False)
        with pytest.raises(NoFeasibleBoundError):
            upper_bound_delta(m, 1, allow_negative=True)

    def test_prescale_invariant(self):
        assert upper_bound_delta(ENRON, 2, prescale=False) == pytest.approx(upper_bound_delta(ENRON, 2), rel=1e-6)

    def test_no_feasible_point(self):
        # m_2 = 0 with m_3 != 0 has no representing measure at all
        with pytest.raises(NoFeasibleBoundError):
            upper_bound_delta(MomentSequence((1, 0, 1e-3, 5.0), 10), 1, scan_steps=50)


class TestSandwich:
    """A smaller copy of the acceptance sweep, with exact spectra from LAPACK."""

    def test_random_graphs(self, rng):
        for _ in range(30):
            g = random_weighted_graph(rng, int(rng.integers(5, 40)), p=0.25)
            lam1 = float(np.linalg.eigvalsh(g.to_dense())[-1])
            m = spectral_moments_from_egonets(g, 2)
            prev = None
            for r in (1, 2):
                beta, delta = lower_bound_beta(m, r), upper_bound_delta(m, r)
                assert beta - 1e-7 <= lam1 <= delta + 1e-7
                if prev:
                    assert beta >= prev[0] - 1e-7
                    assert delta <= prev[1] + 1e-7
                prev = (beta, delta)

    @pytest.mark.parametrize("c", [0.5, 3.0])
    def test_scaling(self, rng, c):
        g = random_weighted_graph(rng, 20, p=0.3)
        gs = Graph.from_edges(g.n, [(i, j, c * w) for i, j, w in g.edges()])
        m, ms = spectral_moments_from_egonets(g, 2), spectral_moments_from_egonets(gs, 2)
        assert lower_bound_beta(ms, 2) == pytest.approx(c * lower_bound_beta(m, 2), rel=1e-6)
        assert upper_bound_delta(ms, 2) == pytest.approx(c * upper_bound_delta(m, 2), rel=1e-6)

    def test_signed_graph_lower_bound(self, rng):
        for _ in range(10):
            g = random_weighted_graph(rng, 20, p=0.3, signed=True)
            lam1 = float(np.linalg.eigvalsh(g.to_dense())[-1])
            assert lower_bound_beta(spectral_moments_from_egonets(g, 2), 2) <= lam1 + 1e-7


class TestChungLu:
    def test_regular(self):
        assert chung_lu_estimate([4] * 10) == 4.0

    def test_triangle(self):
        assert chung_lu_estimate([2, 2, 2]) == 2.0

    def test_star_overestimates(self):
        assert chung_lu_estimate([3, 1, 1, 1]) == 2.0

    def test_zero_sum(self):
        with pytest.raises(ValueError):
            chung_lu_estimate([0, 0])
        with pytest.raises(ValueError):
            chung_lu_estimate([])

    def test_condition(self):
        assert chung_lu_condition([50.0] * 100)
        assert not chung_lu_condition([1.0] * 100)


class TestVerdict:
    REPORT = BoundReport(r=2, beta=78.53, delta=98.74)

    @pytest.mark.parametrize("tau,verdict", [
        (120, Verdict.GUARANTEED_DIE_OUT),
        (50, Verdict.GUARANTEED_ABOVE_THRESHOLD),
        (90, Verdict.INDETERMINATE),
    ])
    def test_enron_interval(self, tau, verdict):
        assert threshold_verdict(self.REPORT, tau) is verdict

    def test_without_upper_bound(self):
        assert threshold_verdict(BoundReport(r=2, beta=78.53), 1000) is Verdict.INDETERMINATE

    def test_bad_tau(self):
        with pytest.raises(ValueError):
            threshold_verdict(self.REPORT, 0)


class TestReport:
    def test_schema(self):
        d = json.loads(compute_bounds(ENRON, tau=120).to_json())
        assert set(d) >= {"r", "beta", "delta", "beta_closed_form", "lambda1", "chung_lu", "tau", "verdict",
                          "tolerances", "prescale"}
        assert d["r"] == 2
        assert d["verdict"] == "GuaranteedDieOut"
        assert d["prescale"] == pytest.approx(math.sqrt(22.47))
        assert d["beta"] <= d["delta"]

    def test_round_trip(self):
        rep = compute_bounds(K3, tau=3)
        back = BoundReport.from_dict(json.loads(rep.to_json()))
        assert back == rep

    def test_without_n(self):
        rep = compute_bounds(MomentSequence((1, 0, 2, 2)))
        assert rep.delta is None and rep.beta == pytest.approx(2.0, abs=1e-8)

    def test_negative_weights_withheld(self):
        m = MomentSequence(P3.values[:4], 3, "trace", None, nonnegative=False)
        assert compute_bounds(m).delta is None
        assert compute_bounds(m).premise == "withheld"
        rep = compute_bounds(m, allow_negative=True)
        assert rep.delta is not None and rep.premise == "unverified premise"

    def test_needs_four_moments(self):
        with pytest.raises(ValueError):
            compute_bounds(MomentSequence((1, 0, 2)))
