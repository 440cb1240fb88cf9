"""Atom measure, L2 embedding and the multiplication operator.

At finite scale the Loeb-space propositions collapse to exact identities:
the embedding is an isometry on the sampled subspace and intertwines the
operator with multiplication by the eigenvalue function. mu-weighted norms
use compensated summation in fixed index order for reproducibility.
"""

import base64
import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, ValidationError
from .linalg import Vec, kahan_sum
from .sampling import MU_MIN, atom_weights

TOTAL_TOL = 1e-10


@dataclass(frozen=True)
class SpectralAtomMeasure:
    """Strictly positive atom weights mu_k summing to 1 over the eigenbasis."""

    atoms: np.ndarray
    sampling: object

    def __post_init__(self):
        object.__setattr__(self, "atoms", np.asarray(self.atoms, dtype=np.float64))
        if self.atoms.shape != (self.sampling.dim,):
            raise ValidationError("one weight per atom required")

    @property
    def dim(self):
        return self.atoms.shape[0]

    @property
    def sqrt(self):
        cached = getattr(self, "_sqrt", None)
        if cached is None:
            cached = np.sqrt(self.atoms)
            object.__setattr__(self, "_sqrt", cached)
        return cached

    def total(self):
        return kahan_sum(self.atoms)


@dataclass(frozen=True)
class EmbeddedVec:
    """Coordinates over the atoms with the mu-weighted inner product."""

    values: np.ndarray
    measure: SpectralAtomMeasure

    def norm_sq(self):
        return kahan_sum(np.abs(self.values) ** 2 * self.measure.atoms)

    def norm(self):
        return math.sqrt(max(self.norm_sq(), 0.0))


@dataclass(frozen=True)
class MultiplierFn:
    """Real eigenvalue function on the atoms (the diagonal model of A)."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(vals)):
            raise ValidationError("multiplier values must be real and finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def of_sampling(cls, sampling):
        return cls(sampling.eigenvalues)


def atom_measure(sampling, scale, mu_min=MU_MIN):
    """mu_k = sum_j c_j |<e_j, f_k>|^2; errors on any atom below mu_min."""
    if scale.vectors.shape[1] != sampling.dim:
        raise ValidationError("scale not in sampling coordinates")
    mu = atom_weights(sampling, scale)
    if float(np.min(mu)) < mu_min:
        k = int(np.argmin(mu))
        raise ValidationError(
            f"atom {k} has measure {mu[k]:.3e} < mu_min "
            "(scale compatibility condition 10)"
        )
    total = kahan_sum(mu)
    if abs(total - 1.0) > TOTAL_TOL:
        raise NumericalFailure(f"atom measure totals {total!r}, expected 1")
    return SpectralAtomMeasure(mu, sampling)


def embed(x, measure):
    """U x = (<x, f_k> / sqrt(mu_k))_k; ambient vectors are projected first."""
    sampling = measure.sampling
    coords = x.coords if isinstance(x, Vec) else np.asarray(x)
    if coords.shape[0] != sampling.dim:
        coords = sampling.to_internal(coords)
    ips = sampling.atoms.conj() @ coords
    return EmbeddedVec(ips / measure.sqrt, measure)


def unembed(u):
    """U* for the mu-weighted inner product: sum_k u_k sqrt(mu_k) f_k."""
    sampling = u.measure.sampling
    return sampling.atoms.T @ (u.values * u.measure.sqrt)


def multiply(u, m):
    """(T u)_k = m_k u_k."""
    if m.values.shape != u.values.shape:
        raise ValidationError("multiplier and vector live on different atom sets")
    return EmbeddedVec(m.values * u.values, u.measure)


def mu_inner(u, v):
    """<u, v>_mu with compensated real/imaginary accumulation."""
    prod = u.values * np.conj(v.values) * u.measure.atoms
    if np.iscomplexobj(prod):
        return complex(kahan_sum(prod.real), kahan_sum(prod.imag))
    return kahan_sum(prod)


def mu_distance(u, v):
    diff = EmbeddedVec(u.values - v.values, u.measure)
    return diff.norm()


def intertwining_defect(x, ax, sampling, measure):
    """|| m . U(x) - U(A x) ||_mu for a caller-supplied ground-truth pair."""
    ux = embed(x, measure)
    uax = embed(ax, measure)
    tux = multiply(ux, MultiplierFn.of_sampling(sampling))
    return mu_distance(tux, uax)


def measure_of(measure, atom_subset):
    """Measure of an atom-index subset; exactly additive over disjoint unions."""
    idx = np.asarray(list(atom_subset), dtype=np.int64)
    if idx.size == 0:
        return 0.0
    if idx.min() < 0 or idx.max() >= measure.dim:
        raise ValidationError("atom index out of range")
    return kahan_sum(measure.atoms[idx])


# ---------------------------------------------------------------------------
# reports

def measure_report_doc(measure, multiplier, vectors=None):
    doc = {
        "mu": [float(v) for v in measure.atoms],
        "m": [float(v) for v in multiplier.values],
        "vectors": {},
    }
    for label, u in (vectors or {}).items():
        vals = np.asarray(u.values)
        if np.iscomplexobj(vals):
            doc["vectors"][label] = [[float(z.real), float(z.imag)] for z in vals]
        else:
            doc["vectors"][label] = [float(v) for v in vals]
    return doc


def write_measure_json(path, measure, multiplier, vectors=None):
    with open(path, "w") as fh:
        json.dump(measure_report_doc(measure, multiplier, vectors), fh)


def write_measure_csv(path, measure, multiplier, vectors=None):
    vectors = vectors or {}
    header = ["k", "mu_k", "m_k"]
    for label in vectors:
        header.extend([f"{label}_re", f"{label}_im"])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(measure.dim):
            row = [k, f"{measure.atoms[k]:.17g}", f"{multiplier.values[k]:.17g}"]
            for label in vectors:
                z = complex(vectors[label].values[k])
                row.extend([f"{z.real:.17g}", f"{z.imag:.17g}"])
            writer.writerow(row)


def grid_values_b64(values):
    arr = np.ascontiguousarray(values)
    return {
        "dtype": arr.dtype.str,
        "b64": base64.b64encode(arr.tobytes()).decode("ascii"),
    }


def grid_values_from_b64(doc):
    return np.frombuffer(base64.b64decode(doc["b64"]), dtype=np.dtype(doc["dtype"])).copy()
