import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import spectral_hull as sh
from spectral_hull.errors import NumericalFailure, ValidationError
from spectral_hull.linalg import kahan_sum
from spectral_hull.measure import embed, unembed
from spectral_hull.resolution import (
    IntervalSet,
    eigenvalue_partition,
    identity_staircase_partition,
    integrate_step_function,
    mask_multiply,
    one_projection_residual,
    pvm_algebra_check,
    pvm_project,
    signed_measure,
    staircase_series,
    surjectivity_diagnostic,
)


class TestIntervalSet:
    def test_normalization_merges(self):
        s = IntervalSet.from_pairs([(0.0, 1.0), (0.5, 2.0), (3.0, 4.0)])
        assert s.intervals == ((0.0, 2.0), (3.0, 4.0))

    def test_membership(self):
        s = IntervalSet.from_pairs([(0.0, 1.0)])
        assert bool(s.contains(0.0))
        assert not bool(s.contains(1.0))  # half-open right end

    def test_complement_round_trip(self):
        s = IntervalSet.from_pairs([(0.0, 1.0), (2.0, 3.0)])
        assert s.complement().complement().intervals == s.intervals

    @given(
        st.lists(
            st.tuples(st.integers(-20, 20), st.integers(-20, 20)),
            min_size=1, max_size=6,
        ),
        st.lists(
            st.tuples(st.integers(-20, 20), st.integers(-20, 20)),
            min_size=1, max_size=6,
        ),
    )
    @settings(max_examples=60, deadline=None)
    def test_algebra_matches_membership(self, pairs1, pairs2):
        s1 = IntervalSet.from_pairs([(a, b) for a, b in pairs1])
        s2 = IntervalSet.from_pairs([(a, b) for a, b in pairs2])
        xs = np.linspace(-21.0, 21.0, 253)
        m1, m2 = s1.contains(xs), s2.contains(xs)
        assert np.array_equal(s1.union(s2).contains(xs), m1 | m2)
        assert np.array_equal(s1.intersection(s2).contains(xs), m1 & m2)
        assert np.array_equal(s1.complement().contains(xs), ~m1)


class TestPVMProject:
    def test_full_line_is_identity(self, shift17):
        sampling, _, measure = shift17
        p = pvm_project(IntervalSet.real_line(), sampling, measure)
        assert float(np.max(np.abs(p.matrix.entries - np.eye(17)))) <= 1e-10

    def test_empty_is_zero(self, shift17):
        sampling, _, measure = shift17
        p = pvm_project(IntervalSet.empty(), sampling, measure)
        assert float(np.max(np.abs(p.matrix.entries))) == 0.0

    def test_rank_one_at_top_eigenvalue(self, shift5):
        # only lambda = 1 (k = 0) lies in [0.9, 1.1)
        sampling, _, measure = shift5
        p = pvm_project([(0.9, 1.1)], sampling, measure)
        assert p.rank == 1
        f0 = sampling.atoms[0]
        assert np.allclose(p.matrix.entries @ f0, f0, atol=1e-12)

    def test_matches_embedded_mask_route(self, shift17):
        sampling, _, measure = shift17
        v = [(0.2, 0.9)]
        p = pvm_project(v, sampling, measure)
        rng = np.random.default_rng(4)
        x = rng.standard_normal(17) + 1j * rng.standard_normal(17)
        via_mask = unembed(mask_multiply(v, embed(x, measure), sampling))
        assert np.allclose(p.matrix.entries @ x, via_mask, atol=1e-10)

    def test_commutes_with_operator(self, shift17):
        sampling, _, measure = shift17
        rng = np.random.default_rng(9)
        a = sampling.operator.entries
        for _ in range(5):
            lo, hi = np.sort(rng.uniform(-1.2, 1.2, size=2))
            p = pvm_project([(lo, hi)], sampling, measure).matrix.entries
            assert float(np.max(np.abs(p @ a - a @ p))) <= 1e-10

    def test_reduction_identity(self, shift17):
        # mask multiplication commutes with proj onto the embedded image,
        # computed numerically as embed(unembed(.))
        sampling, _, measure = shift17
        rng = np.random.default_rng(14)
        u = sh.EmbeddedVec(rng.standard_normal(17) + 1j * rng.standard_normal(17), measure)
        v = [(0.0, 1.5)]
        lhs = mask_multiply(v, embed(unembed(u), measure), sampling).values
        rhs = embed(unembed(mask_multiply(v, u, sampling)), measure).values
        assert np.allclose(lhs, rhs, atol=1e-10)


class TestAlgebraCheck:
    def test_disjoint_product_vanishes(self, shift17):
        sampling, _, measure = shift17
        p1 = pvm_project([(-1.5, 0.0)], sampling, measure).matrix.entries
        p2 = pvm_project([(0.0, 1.5)], sampling, measure).matrix.entries
        assert float(np.max(np.abs(p1 @ p2))) <= 1e-10

    def test_same_interval_reduces_to_idempotence(self, shift17):
        sampling, _, measure = shift17
        report = pvm_algebra_check([(0.0, 1.0)], [(0.0, 1.0)], sampling, measure)
        assert report["multiplicativity"] <= 1e-10
        assert report["idempotence"] <= 1e-10

    def test_random_interval_pairs(self, shift17):
        sampling, _, measure = shift17
        rng = np.random.default_rng(21)
        for _ in range(5):
            a1, b1 = np.sort(rng.uniform(-1.5, 1.5, 2))
            a2, b2 = np.sort(rng.uniform(-1.5, 1.5, 2))
            report = pvm_algebra_check([(a1, b1)], [(a2, b2)], sampling, measure)
            assert max(report.values()) <= 1e-10


class TestIntegrateStepFunction:
    def test_constant_one_is_identity(self, shift17):
        sampling, _, measure = shift17
        lam = sampling.eigenvalues
        part = [(float(lam.min()) - 1.0, float(lam.max()) + 1.0)]
        out = integrate_step_function(part, [1.0], sampling, measure)
        assert float(np.max(np.abs(out.entries - np.eye(17)))) <= 1e-10

    def test_eigenvalue_partition_reproduces_operator(self, shift17, diff12):
        for sampling, _, measure in (shift17, diff12):
            part, vals = eigenvalue_partition(sampling)
            out = integrate_step_function(part, vals, sampling, measure)
            defect = float(np.max(np.abs(out.entries - sampling.operator.entries)))
            assert defect <= 1e-10

    def test_identity_staircase_bound(self, diff12):
        sampling, _, measure = diff12
        for mesh in (4, 8):
            part, vals = identity_staircase_partition(sampling, mesh)
            out = integrate_step_function(part, vals, sampling, measure)
            defect = float(np.max(np.abs(out.entries - sampling.operator.entries)))
            assert defect <= 1.0 / mesh + 1e-10

    def test_staircase_refinement_halves(self, diff12):
        sampling, _, measure = diff12
        defects = []
        for mesh in (4, 8, 16):
            part, vals = identity_staircase_partition(sampling, mesh)
            out = integrate_step_function(part, vals, sampling, measure)
            defects.append(float(np.max(np.abs(out.entries - sampling.operator.entries))))
        for a, b in zip(defects, defects[1:]):
            assert 0.4 <= b / a <= 0.6

    def test_non_covering_rejected(self, shift17):
        sampling, _, measure = shift17
        with pytest.raises(ValidationError):
            integrate_step_function([(-0.5, 0.5)], [1.0], sampling, measure)
        with pytest.raises(ValidationError):
            integrate_step_function(
                [(-2.0, 0.0), (0.5, 2.0)], [1.0, 1.0], sampling, measure
            )


class TestSignedMeasure:
    def test_orthogonal_vanishes(self, shift5):
        sampling, _, measure = shift5
        x = sampling.atoms[2]  # eigenvalue outside [0.9, 1.1)
        sm = signed_measure(x, x, [(0.9, 1.1)], sampling, measure)
        assert abs(sm.total) <= 1e-12

    def test_atom_gives_one(self, shift5):
        sampling, _, measure = shift5
        lam = sampling.eigenvalues[1]
        sm = signed_measure(
            sampling.atoms[1], sampling.atoms[1],
            [(lam - 1e-6, lam + 1e-6)], sampling, measure,
        )
        assert sm.total == pytest.approx(1.0, abs=1e-10)

    def test_partition_sums_to_norm(self, shift17):
        sampling, _, measure = shift17
        rng = np.random.default_rng(31)
        x = rng.standard_normal(17) + 1j * rng.standard_normal(17)
        edges = np.linspace(-1.5, 1.5, 7)
        total = 0.0
        for lo, hi in zip(edges, edges[1:]):
            total += signed_measure(x, x, [(lo, hi)], sampling, measure).total.real
        assert total == pytest.approx(float(np.vdot(x, x).real), abs=1e-10)

    def test_diagonal_nonnegative(self, shift17):
        sampling, _, measure = shift17
        rng = np.random.default_rng(32)
        x = rng.standard_normal(17) + 1j * rng.standard_normal(17)
        sm = signed_measure(x, x, [(-0.3, 0.8)], sampling, measure)
        diag = sm.contributions.real
        assert np.all(diag >= -1e-12)
        assert sm.total.real <= float(np.vdot(x, x).real) + 1e-10


class TestSpectralMoment:
    def test_quadratic_form_matches_eigen_sum(self, shift17):
        sampling, _, measure = shift17
        part, vals = eigenvalue_partition(sampling)
        op = integrate_step_function(part, vals, sampling, measure).entries
        rng = np.random.default_rng(41)
        for _ in range(10):
            x = rng.standard_normal(17) + 1j * rng.standard_normal(17)
            lhs = float(np.vdot(x, op @ x).real)
            coeff = sampling.atoms.conj() @ x
            rhs = kahan_sum(sampling.eigenvalues * np.abs(coeff) ** 2)
            assert lhs == pytest.approx(rhs, abs=1e-10 * max(1.0, abs(rhs)))


class TestStaircaseSeries:
    def test_constant_one_is_exact(self):
        series = staircase_series(np.ones(4), np.full(4, 0.25), 16)
        assert np.all(series == 0.0)

    def test_half_closed_form(self):
        # X = 1/2: defect 0 for even n, 1/(n+1) for odd n
        mu = np.array([1.0])
        series = staircase_series(np.array([0.5]), mu, 10)
        expected = [1.0 / (n + 1) if n % 2 else 0.0 for n in range(1, 11)]
        assert np.allclose(series, expected, atol=1e-15)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_bounds_hold_for_random_x(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.uniform(0.05, 1.0, size=6)
        mu = rng.uniform(0.1, 1.0, size=6)
        mu /= mu.sum()
        series = staircase_series(x, mu, 32)  # raises on violated bounds
        assert series[31] <= series[0] + 1e-12


class TestSurjectivity:
    def test_series_decays_and_is_dyadically_monotone(self, pvm4):
        sampling, scale, measure = pvm4
        series = surjectivity_diagnostic(measure, scale, 64)
        assert series[63] <= series[0] / 5.0
        chain = [series[n - 1] for n in (1, 2, 4, 8, 16, 32, 64)]
        assert all(b <= a + 1e-12 for a, b in zip(chain, chain[1:]))

    def test_single_atom_demo_realizes_half_staircase(self):
        from spectral_hull.cli import build_demo_pvm

        sampling, scale = build_demo_pvm(1, 1)
        measure = sh.atom_measure(sampling, scale)
        series = surjectivity_diagnostic(measure, scale, 8)
        # one probe makes X = (c_1/2) U_1 = 1/2 exactly, so the series is
        # the X = 1/2 closed form: 0 for even n, 1/(n+1) for odd n
        expected = [1.0 / (n + 1) if n % 2 else 0.0 for n in range(1, 9)]
        assert np.allclose(series, expected, atol=1e-12)

    def test_rejects_non_pvm_provenance(self, shift5):
        sampling, scale, measure = shift5
        with pytest.raises(ValidationError):
            surjectivity_diagnostic(measure, scale, 8)

    def test_one_projection_residual_full_span(self, pvm4):
        sampling, scale, measure = pvm4
        assert one_projection_residual(measure, scale) <= 1e-10

    def test_one_projection_residual_partial_span(self, shift17):
        sampling, scale, measure = shift17
        # restrict to the first two scale vectors: constant 1 not in span
        partial = sh.Scale(
            scale.vectors[:2],
            np.array([0.5, 0.25]) / np.array([0.5, 0.25]).sum() * np.array([1.0, 1.0]),
            standard_prefix_len=2,
        )
        # weights chosen to satisfy sum c ||e||^2 = 1 on unit vectors
        resid = one_projection_residual(measure, partial)
        assert 0.0 < resid <= 1.0
