"""Spectral resolution algebra: projectors, step-function calculus, X_n.

Borel sets are finite unions of half-open intervals; every projector
factors through eigenvalue membership, P(V) x = sum_{lam_k in V} <x, f_k> f_k,
which is the pullback U* P_hat(V) U of mask multiplication on the measure
side. All identities are exact at finite scale up to rounding.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, ValidationError
from .linalg import DenseOp, kahan_sum
from .measure import EmbeddedVec, embed

PROJ_TOL = 1e-10


@dataclass(frozen=True)
class IntervalSet:
    """Sorted disjoint half-open intervals [a, b); closed under set algebra."""

    intervals: tuple

    @classmethod
    def from_pairs(cls, pairs):
        cleaned = []
        for a, b in pairs:
            a, b = float(a), float(b)
            if math.isnan(a) or math.isnan(b):
                raise ValidationError("interval endpoints must not be NaN")
            if a < b:
                cleaned.append((a, b))
        cleaned.sort()
        merged = []
        for a, b in cleaned:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return cls(tuple(merged))

    @classmethod
    def real_line(cls):
        return cls.from_pairs([(-math.inf, math.inf)])

    @classmethod
    def empty(cls):
        return cls(())

    def contains(self, x):
        x = np.asarray(x, dtype=np.float64)
        mask = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            mask |= (x >= a) & (x < b)
        return mask

    def union(self, other):
        return IntervalSet.from_pairs(list(self.intervals) + list(other.intervals))

    def intersection(self, other):
        out = []
        for a1, b1 in self.intervals:
            for a2, b2 in other.intervals:
                lo, hi = max(a1, a2), min(b1, b2)
                if lo < hi:
                    out.append((lo, hi))
        return IntervalSet.from_pairs(out)

    def complement(self):
        out = []
        prev = -math.inf
        for a, b in self.intervals:
            if prev < a:
                out.append((prev, a))
            prev = b
        if prev < math.inf:
            out.append((prev, math.inf))
        return IntervalSet.from_pairs(out)

    def to_json(self):
        return [[a, b] for a, b in self.intervals]


def _as_interval_set(v):
    if isinstance(v, IntervalSet):
        return v
    return IntervalSet.from_pairs(v)


@dataclass(frozen=True)
class SpectralProjector:
    """P(V) on the sampling space; self-adjoint idempotent within 1e-10."""

    matrix: DenseOp
    intervals: IntervalSet
    atom_mask: np.ndarray

    def __post_init__(self):
        ent = self.matrix.entries
        sa = float(np.max(np.abs(ent - ent.conj().T)))
        idem = float(np.max(np.abs(ent @ ent - ent)))
        if sa > PROJ_TOL or idem > PROJ_TOL:
            raise NumericalFailure(
                f"projector defects exceed tolerance (sa={sa:.3e}, idem={idem:.3e})"
            )

    @property
    def rank(self):
        return int(np.sum(self.atom_mask))


def pvm_project(v, sampling, measure):
    """P(V) = U* (mask multiplication) U = sum over atoms with lam in V."""
    vset = _as_interval_set(v)
    mask = vset.contains(sampling.eigenvalues)
    sel = sampling.atoms[mask]
    ent = sel.T @ sel.conj()
    op = DenseOp(ent, sampling.field, symmetric=True, sym_tol=1e-10)
    return SpectralProjector(op, vset, mask)


def mask_multiply(v, u, sampling):
    """Measure-side P_hat(V): indicator of m^{-1}(V) times an embedded vector."""
    vset = _as_interval_set(v)
    mask = vset.contains(sampling.eigenvalues).astype(np.float64)
    return EmbeddedVec(mask * u.values, u.measure)


def pvm_algebra_check(v1, v2, sampling, measure, seed=0):
    """Defect report for multiplicativity, idempotence, self-adjointness,
    and additivity over a seeded finite partition of the spectrum."""
    v1 = _as_interval_set(v1)
    v2 = _as_interval_set(v2)
    p1 = pvm_project(v1, sampling, measure).matrix.entries
    p2 = pvm_project(v2, sampling, measure).matrix.entries
    pboth = pvm_project(v1.intersection(v2), sampling, measure).matrix.entries
    report = {
        "multiplicativity": float(np.max(np.abs(p1 @ p2 - pboth))),
        "idempotence": max(
            float(np.max(np.abs(p1 @ p1 - p1))),
            float(np.max(np.abs(p2 @ p2 - p2))),
        ),
        "self_adjointness": max(
            float(np.max(np.abs(p1 - p1.conj().T))),
            float(np.max(np.abs(p2 - p2.conj().T))),
        ),
    }
    lam = sampling.eigenvalues
    lo, hi = float(lam.min()) - 1.0, float(lam.max()) + 1.0
    rng = np.random.default_rng(seed)
    cuts = np.sort(rng.uniform(lo, hi, size=4))
    edges = np.concatenate([[lo], cuts, [hi]])
    total = np.zeros_like(p1)
    for i in range(len(edges) - 1):
        total = total + pvm_project([(edges[i], edges[i + 1])], sampling, measure).matrix.entries
    report["additivity"] = float(np.max(np.abs(total - np.eye(sampling.dim))))
    return report


def integrate_step_function(partition, values, sampling, measure):
    """sum_i value_i P(V_i) for a covering partition of the spectrum range."""
    ivs = [(float(a), float(b)) for a, b in partition]
    vals = [float(v) for v in values]
    if len(ivs) != len(vals):
        raise ValidationError("one value per partition interval required")
    ivs_sorted = sorted(range(len(ivs)), key=lambda i: ivs[i])
    lam = sampling.eigenvalues
    lo, hi = float(lam.min()) - 1.0, float(lam.max()) + 1.0
    prev = None
    for i in ivs_sorted:
        a, b = ivs[i]
        if a >= b:
            raise ValidationError("empty partition interval")
        if prev is not None and a != prev:
            raise ValidationError("non-covering partition (gap or overlap)")
        prev = b
    if ivs[ivs_sorted[0]][0] > lo or ivs[ivs_sorted[-1]][1] < hi:
        raise ValidationError("non-covering partition (range too small)")

    step = np.empty(sampling.dim)
    assigned = np.zeros(sampling.dim, dtype=bool)
    for i, (a, b) in enumerate(ivs):
        mask = (lam >= a) & (lam < b)
        step[mask] = vals[i]
        assigned |= mask
    if not np.all(assigned):
        raise ValidationError("non-covering partition (eigenvalue missed)")
    ent = sampling.atoms.T @ (step[:, None] * sampling.atoms.conj())
    return DenseOp(ent, sampling.field, symmetric=True, sym_tol=1e-10)


def identity_staircase_partition(sampling, mesh):
    """Mesh-1/M staircase of the identity covering the spectrum range."""
    lam = sampling.eigenvalues
    lo = math.floor((float(lam.min()) - 1.0) * mesh)
    hi = math.ceil((float(lam.max()) + 1.0) * mesh)
    partition = [(l / mesh, (l + 1) / mesh) for l in range(lo, hi)]
    values = [l / mesh for l in range(lo, hi)]
    return partition, values


def eigenvalue_partition(sampling):
    """Partition separating distinct eigenvalues, valued at those eigenvalues."""
    lam = np.unique(sampling.eigenvalues)
    edges = [float(lam[0]) - 1.0]
    for i in range(len(lam) - 1):
        edges.append(float(0.5 * (lam[i] + lam[i + 1])))
    edges.append(float(lam[-1]) + 1.0)
    partition = [(edges[i], edges[i + 1]) for i in range(len(lam))]
    return partition, [float(v) for v in lam]


@dataclass(frozen=True)
class SignedAtomMeasure:
    """Per-atom contributions realizing mu_{x,y}(V) = <P(V) x, y>."""

    contributions: np.ndarray
    mask: np.ndarray

    @property
    def total(self):
        vals = self.contributions[self.mask]
        if np.iscomplexobj(vals):
            return complex(kahan_sum(vals.real), kahan_sum(vals.imag))
        return kahan_sum(vals)


def _atom_coefficients(x, sampling):
    coords = np.asarray(x.coords if hasattr(x, "coords") else x)
    if coords.shape[0] != sampling.dim:
        coords = sampling.to_internal(coords)
    return sampling.atoms.conj() @ coords


def signed_measure(x, y, v, sampling, measure):
    """mu_{x,y}(V) = <P(V) x, y>; positive and additive when x = y."""
    vset = _as_interval_set(v)
    mask = vset.contains(sampling.eigenvalues)
    cx = _atom_coefficients(x, sampling)
    cy = _atom_coefficients(y, sampling)
    contributions = cx * np.conj(cy)
    return SignedAtomMeasure(contributions, mask)


def staircase_series(x_fn, mu, n_max):
    """||1 - X_n||_mu for X_n = n X / ceil(n X), with its bounds verified.

    The pointwise bound |1 - X_n| <= 1 / (n X) is checked where X > 1/n;
    the doubling monotonicity ||1 - X_{2n}|| <= ||1 - X_n|| holds pointwise
    (ceil(2y) <= 2 ceil(y)) and is asserted here. Monotonicity in single
    steps n -> n + 1 is false in general (X = 1/2 oscillates).
    """
    x_fn = np.asarray(x_fn, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    series = []
    for n in range(1, n_max + 1):
        with np.errstate(invalid="ignore", divide="ignore"):
            xn = np.where(x_fn > 0.0, n * x_fn / np.ceil(n * x_fn), 0.0)
        series.append(math.sqrt(max(kahan_sum(mu * (1.0 - xn) ** 2), 0.0)))
        live = x_fn > 1.0 / n
        if np.any(live):
            lhs = math.sqrt(max(kahan_sum(mu[live] * (1.0 - xn[live]) ** 2), 0.0))
            rhs = math.sqrt(max(kahan_sum(mu[live] / x_fn[live] ** 2), 0.0)) / n
            if lhs > rhs + 1e-12:
                raise NumericalFailure("staircase bound ||1 - X_n|| <= ||1/X||/n failed")
    series = np.asarray(series)
    for n in range(1, n_max // 2 + 1):
        if series[2 * n - 1] > series[n - 1] + 1e-12:
            raise NumericalFailure("doubling monotonicity of ||1 - X_n|| failed")
    return series


def surjectivity_diagnostic(measure, scale, n_max, j0=16):
    """Staircase renormalization series ||1 - X_n||_mu for PVM samplings.

    X = sum_{j <= j0} (c_j / 2^j) U(e_j) lands in [0, 1] on PVM-built
    samplings, where the scale coordinates are nonnegative reals.
    """
    sampling = measure.sampling
    if sampling.provenance.get("builder") != "pvm":
        raise ValidationError(
            "surjectivity diagnostic is defined for PVM-built samplings; "
            "see one_projection_residual for arbitrary samplings"
        )
    j_eff = min(j0, scale.count)
    coords = (scale.vectors[:j_eff] @ sampling.atoms.conj().T) / measure.sqrt[None, :]
    factors = scale.weights[:j_eff] * np.exp2(-np.arange(1, j_eff + 1, dtype=np.float64))
    x_fn = (factors[:, None] * coords).sum(axis=0)
    if float(np.max(np.abs(x_fn.imag))) > 1e-10:
        raise NumericalFailure("X is not real on the atoms")
    x_fn = x_fn.real
    if float(x_fn.min()) <= 0.0:
        raise ValidationError("X <= 0 on an atom with positive measure")
    if float(x_fn.max()) > 1.0 + 1e-12:
        raise NumericalFailure("X exceeded its upper bound 1")
    x_fn = np.minimum(x_fn, 1.0)
    return staircase_series(x_fn, measure.atoms, n_max)


def one_projection_residual(measure, scale):
    """||1 - proj_{span U(e_j)} 1||_mu, reported without interpretation."""
    sampling = measure.sampling
    rows = [embed(scale.vectors[j], measure).values for j in range(scale.count)]
    mu = measure.atoms
    basis = []
    for r in rows:
        q = r.astype(np.complex128, copy=True)
        for u in basis:
            q -= np.vdot(u * mu, q) * u
        nrm = math.sqrt(max(kahan_sum(mu * np.abs(q) ** 2), 0.0))
        if nrm > 1e-12:
            basis.append(q / nrm)
    ones = np.ones(sampling.dim, dtype=np.complex128)
    resid = ones.copy()
    for u in basis:
        resid -= np.vdot(u * mu, resid) * u
    return math.sqrt(max(kahan_sum(mu * np.abs(resid) ** 2), 0.0))
