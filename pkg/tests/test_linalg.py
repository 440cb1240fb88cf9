import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_hull.errors import ValidationError
from spectral_hull.linalg import (
    COMPLEX,
    REAL,
    DenseOp,
    Vec,
    eigh_self_adjoint,
    inner,
    kahan_sum,
    orthonormalize,
    project_onto_span,
)


def unit(i, n, field=COMPLEX):
    v = np.zeros(n, dtype=np.complex128 if field == COMPLEX else np.float64)
    v[i] = 1.0
    return Vec(v, field)


class TestInner:
    def test_orthonormality(self):
        assert inner(unit(0, 3), unit(0, 3)) == 1.0
        assert inner(unit(0, 3), unit(1, 3)) == 0.0

    def test_hand_expanded_sesquilinear(self):
        # 1*conj(i) + i*conj(1) = -i + i = 0
        x = Vec([1.0, 1j])
        y = Vec([1j, 1.0])
        assert inner(x, y) == 0.0

    def test_conjugate_linear_in_second_argument(self):
        x = Vec([1.0 + 2j, 0.5])
        y = Vec([0.25, -1j])
        assert inner(x, y) == pytest.approx(np.conj(inner(y, x)))

    def test_real_field_returns_float(self):
        x = Vec([1.0, 2.0], REAL)
        y = Vec([3.0, -1.0], REAL)
        assert inner(x, y) == 1.0
        assert isinstance(inner(x, y), float)

    def test_mismatch_errors(self):
        with pytest.raises(ValidationError):
            inner(Vec([1.0, 0.0]), Vec([1.0, 0.0, 0.0]))
        with pytest.raises(ValidationError):
            inner(Vec([1.0, 0.0]), Vec([1.0, 0.0], REAL))

    @given(st.integers(2, 8), st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_positivity(self, n, seed):
        rng = np.random.default_rng(seed)
        x = Vec(rng.standard_normal(n) + 1j * rng.standard_normal(n))
        val = inner(x, x)
        assert abs(val.imag) < 1e-12
        assert val.real >= 0.0


class TestEigh:
    def test_two_by_two_hand_oracle(self):
        # char poly lambda^2 - 1/4: eigenvalues -1/2, +1/2
        op = DenseOp(np.array([[0.0, 0.5], [0.5, 0.0]]), REAL, symmetric=True)
        eigvals, eigvecs = eigh_self_adjoint(op)
        assert eigvals == pytest.approx([-0.5, 0.5], abs=1e-14)
        assert len(eigvecs) == 2

    def test_identity(self):
        op = DenseOp(np.eye(6), REAL, symmetric=True)
        eigvals, _ = eigh_self_adjoint(op)
        assert np.allclose(eigvals, 1.0, atol=1e-14)

    def test_circulant_five(self):
        # cyclic (L+R)/2: eigenvalues cos(2 pi k / 5) as a multiset
        a = np.zeros((5, 5))
        for i in range(5):
            a[i, (i + 1) % 5] += 0.5
            a[i, (i - 1) % 5] += 0.5
        op = DenseOp(a, REAL, symmetric=True)
        eigvals, _ = eigh_self_adjoint(op)
        expected = np.sort(np.cos(2.0 * np.pi * np.arange(5) / 5))
        assert np.allclose(eigvals, expected, atol=1e-12)

    def test_requires_symmetric_flag(self):
        op = DenseOp(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(ValidationError):
            eigh_self_adjoint(op)

    def test_reconstruction_property(self):
        rng = np.random.default_rng(11)
        raw = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
        herm = 0.5 * (raw + raw.conj().T)
        op = DenseOp(herm, COMPLEX, symmetric=True)
        eigvals, eigvecs = eigh_self_adjoint(op)
        recon = sum(
            lam * np.outer(v.coords, v.coords.conj())
            for lam, v in zip(eigvals, eigvecs)
        )
        bound = 1e-9 * (1.0 + float(np.max(np.abs(eigvals))))
        assert float(np.max(np.abs(recon - herm))) <= bound

    def test_parseval_on_eigenbasis(self):
        rng = np.random.default_rng(5)
        raw = rng.standard_normal((9, 9))
        op = DenseOp(0.5 * (raw + raw.T), REAL, symmetric=True)
        _, eigvecs = eigh_self_adjoint(op)
        for _ in range(20):
            x = Vec(rng.standard_normal(9), REAL)
            total = kahan_sum([abs(inner(x, v)) ** 2 for v in eigvecs])
            norm_sq = kahan_sum(x.coords**2)
            assert abs(total - norm_sq) <= 1e-10 * norm_sq


class TestProjection:
    def test_idempotence_in_span(self):
        basis = [unit(0, 4), unit(2, 4)]
        x = Vec([2.0 + 1j, 0.0, -3.0, 0.0])
        out = project_onto_span(x, basis)
        assert np.allclose(out.coords, x.coords, atol=1e-15)

    def test_orthogonal_kernel(self):
        basis = [unit(0, 3)]
        x = Vec([0.0, 1.0, 2.0])
        assert np.allclose(project_onto_span(x, basis).coords, 0.0)

    def test_coordinate_projection(self):
        basis = [unit(0, 3)]
        x = Vec([1.0, 1.0, 1.0])
        assert np.allclose(project_onto_span(x, basis).coords, [1.0, 0.0, 0.0])

    def test_rejects_non_orthonormal_basis(self):
        bad = [Vec([1.0, 1.0, 0.0]), Vec([0.0, 1.0, 0.0])]
        with pytest.raises(ValidationError):
            project_onto_span(Vec([1.0, 0.0, 0.0]), bad)

    def test_minimizes_distance_on_sampled_points(self):
        rng = np.random.default_rng(3)
        basis_mat = orthonormalize(rng.standard_normal((2, 5)), REAL)
        basis = [Vec(b, REAL) for b in basis_mat]
        x = Vec(rng.standard_normal(5), REAL)
        out = project_onto_span(x, basis)
        best = np.linalg.norm(x.coords - out.coords)
        for _ in range(50):
            y = sum(c * b.coords for c, b in zip(rng.standard_normal(2), basis))
            assert best <= np.linalg.norm(x.coords - y) + 1e-12

    def test_idempotent_and_nonexpanding_100_inputs(self):
        rng = np.random.default_rng(0xA11CE)
        basis_mat = orthonormalize(
            rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6)), COMPLEX
        )
        basis = [Vec(b) for b in basis_mat]
        for _ in range(100):
            x = Vec(rng.standard_normal(6) + 1j * rng.standard_normal(6))
            once = project_onto_span(x, basis)
            twice = project_onto_span(once, basis)
            assert np.allclose(once.coords, twice.coords, atol=1e-12)
            assert once.norm() <= x.norm() + 1e-12


class TestOrthonormalize:
    def test_rank_deficient_raises(self):
        rows = np.array([[1.0, 0.0], [2.0, 0.0]])
        with pytest.raises(ValidationError):
            orthonormalize(rows, REAL)

    def test_produces_orthonormal_rows(self):
        rng = np.random.default_rng(8)
        q = orthonormalize(rng.standard_normal((4, 7)), REAL)
        assert np.allclose(q @ q.T, np.eye(4), atol=1e-12)


def test_kahan_sum_compensates():
    vals = np.array([1e16, 1.0, -1e16, 1.0])
    assert kahan_sum(vals) == 2.0


def test_dense_op_symmetry_validation():
    with pytest.raises(ValidationError):
        DenseOp(np.array([[0.0, 1.0], [0.5, 0.0]]), REAL, symmetric=True)
