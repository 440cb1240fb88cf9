"""Field-generic dense vectors, operators and the self-adjoint eigencontract.

Every space carries a runtime field tag ("real" or "complex"); conjugation
and real part are the identity on real spaces. All reductions run in a
fixed index-ascending order so results do not depend on thread count.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, ValidationError

REAL = "real"
COMPLEX = "complex"

SYM_TOL = 1e-12
ORTHO_TOL = 1e-10


def _dtype_for(field_tag):
    if field_tag == REAL:
        return np.float64
    if field_tag == COMPLEX:
        return np.complex128
    raise ValidationError(f"unknown field tag {field_tag!r}")


def as_coords(values, field_tag):
    arr = np.asarray(values)
    if field_tag == REAL and np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise ValidationError("complex coordinates in a real space")
        arr = arr.real
    return np.ascontiguousarray(arr, dtype=_dtype_for(field_tag))


@dataclass(frozen=True)
class Vec:
    """Dense vector with ambient coordinates and a field tag."""

    coords: np.ndarray
    field: str = COMPLEX

    def __post_init__(self):
        object.__setattr__(self, "coords", as_coords(self.coords, self.field))
        if self.coords.ndim != 1:
            raise ValidationError("Vec coordinates must be one-dimensional")

    @property
    def dim(self):
        return self.coords.shape[0]

    def norm(self):
        return float(np.linalg.norm(self.coords))


@dataclass(frozen=True)
class DenseOp:
    """Dense square operator; symmetric flag asserts A = A* within sym_tol."""

    entries: np.ndarray
    field: str = COMPLEX
    symmetric: bool = False
    sym_tol: float = SYM_TOL

    def __post_init__(self):
        ent = as_coords(np.asarray(self.entries).ravel(), self.field).reshape(
            np.asarray(self.entries).shape
        )
        object.__setattr__(self, "entries", ent)
        if ent.ndim != 2 or ent.shape[0] != ent.shape[1]:
            raise ValidationError("DenseOp entries must be square")
        if self.symmetric:
            defect = symmetry_defect(ent)
            scale = 1.0 + float(np.max(np.abs(ent)))
            if defect > self.sym_tol * scale:
                raise ValidationError(
                    f"symmetry defect {defect:.3e} exceeds sym_tol on a flagged operator"
                )

    @property
    def dim(self):
        return self.entries.shape[0]

    def apply(self, x):
        return self.entries @ x


def symmetry_defect(entries):
    return float(np.max(np.abs(entries - entries.conj().T))) if entries.size else 0.0


def kahan_sum(values):
    """Neumaier-compensated sum in index order; deterministic and accurate."""
    s = 0.0
    c = 0.0
    for v in np.asarray(values, dtype=np.float64):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def _check_pair(x, y):
    if x.field != y.field:
        raise ValidationError(f"field mismatch: {x.field} vs {y.field}")
    if x.dim != y.dim:
        raise ValidationError(f"dimension mismatch: {x.dim} vs {y.dim}")


def inner(x, y):
    """Inner product, conjugate-linear in the second argument."""
    _check_pair(x, y)
    value = np.vdot(y.coords, x.coords)  # vdot conjugates its first argument
    if x.field == REAL:
        return float(value.real) if np.iscomplexobj(value) else float(value)
    return complex(value)


def eigh_self_adjoint(op, tol=1e-9):
    """Eigendecomposition of a symmetric DenseOp.

    Backed by LAPACK (numpy.linalg.eigh); the contract is the postcondition:
    real ascending eigenvalues, orthonormal eigenvectors, and residuals
    ||A v - lam v|| <= tol * (1 + |lam|) * ||A||.
    """
    if not op.symmetric:
        raise ValidationError("eigh_self_adjoint requires the symmetric flag")
    herm = 0.5 * (op.entries + op.entries.conj().T)
    try:
        eigvals, eigvecs = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
    op_scale = float(np.linalg.norm(herm, ord=np.inf)) or 1.0
    residual = herm @ eigvecs - eigvecs * eigvals[None, :]
    resid_norms = np.linalg.norm(residual, axis=0)
    bounds = tol * (1.0 + np.abs(eigvals)) * op_scale
    if np.any(resid_norms > bounds):
        raise NumericalFailure("eigenpair residual above tolerance")
    gram = eigvecs.conj().T @ eigvecs
    if float(np.max(np.abs(gram - np.eye(op.dim)))) > max(tol, ORTHO_TOL):
        raise NumericalFailure("eigenvector set not orthonormal within tolerance")
    vecs = [Vec(eigvecs[:, k], op.field) for k in range(op.dim)]
    return np.real(eigvals).copy(), vecs


def check_orthonormal(vectors, tol=ORTHO_TOL):
    """Max Gram defect of a list of Vec (or a stacked row matrix)."""
    if isinstance(vectors, np.ndarray):
        mat = vectors
    else:
        mat = np.stack([v.coords for v in vectors])
    gram = mat @ mat.conj().T
    defect = float(np.max(np.abs(gram - np.eye(mat.shape[0]))))
    if defect > tol:
        raise ValidationError(f"basis not orthonormal: Gram defect {defect:.3e}")
    return defect


def project_onto_span(x, basis, tol=ORTHO_TOL):
    """Orthogonal projection of x onto the span of an orthonormal basis."""
    for b in basis:
        _check_pair(x, b)
    check_orthonormal(basis, tol)
    out = np.zeros_like(x.coords)
    for b in basis:
        out = out + inner(x, b) * b.coords
    return Vec(out, x.field)


def orthonormalize(vectors, field_tag, rank_tol=1e-10):
    """Modified Gram-Schmidt; raises on rank deficiency.

    Returns the orthonormal row matrix spanning the same space, in the
    order the input vectors were given.
    """
    mat = np.stack([as_coords(v, field_tag) for v in vectors])
    scale = float(np.max(np.abs(mat))) or 1.0
    rows = []
    for raw in mat:
        v = raw.astype(_dtype_for(field_tag), copy=True)
        for q in rows:
            v -= np.vdot(q, v) * q
        # second pass for numerical orthogonality
        for q in rows:
            v -= np.vdot(q, v) * q
        nrm = np.linalg.norm(v)
        if nrm <= rank_tol * scale * max(1.0, np.linalg.norm(raw)):
            raise ValidationError("span is rank deficient")
        rows.append(v / nrm)
    return np.stack(rows)
