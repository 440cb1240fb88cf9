"""Finite-scale samplings and standard-biased scales.

A sampling is a finite-dimensional space with a symmetric operator and an
orthonormal eigenbasis (the atoms); a scale is a weighted spanning family
(e_j, c_j) with sum c_j ||e_j||^2 = 1 whose mass concentrates on a standard
prefix. Builders cover the generic projection compression, the circulant
shift example, the central-difference example with a Gaussian-translated
scale, and the PVM-driven construction. Infinite scale parameters become
explicit finite truncation parameters; convergence is asserted by sweeps.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NumericalFailure, ValidationError
from .linalg import (
    COMPLEX,
    REAL,
    DenseOp,
    Vec,
    as_coords,
    eigh_self_adjoint,
    orthonormalize,
)

ORTHO_TOL = 1e-10
EIG_RESID_TOL = 1e-9
MU_MIN = 1e-14

# full Gram / dense-matrix verification limit; larger samplings are
# spot-checked on a deterministic atom subset to keep builds at seconds
FULL_CHECK_DIM = 600

# scale terms with c_j ||e_j||^2 below this bound cannot move any double
# near or above MU_MIN and are skipped in measure accumulations
ATOM_TERM_CUTOFF = 1e-40


def _unit_phases(numer, modulus, sign=1.0):
    """exp(sign * 2 pi i * numer / modulus) with exact integer phase reduction.

    Raw angles grow like dim^2 and argument reduction in exp would lose
    ~1e-4 radians at dim ~ 4000; reducing numer mod modulus first keeps
    every phase in [0, 2 pi).
    """
    reduced = np.mod(numer, modulus).astype(np.float64)
    return np.exp((sign * 2j * np.pi / modulus) * reduced)


class Sampling:
    """Finite sampling: atoms (rows), eigenvalues, operator, ambient map."""

    def __init__(self, eigenvalues, atoms, field, op_apply=None, op_entries=None,
                 ambient_basis=None, provenance=None, check=True):
        self.eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
        self.atoms = as_coords(np.asarray(atoms).ravel(), field).reshape(np.asarray(atoms).shape)
        self.field = field
        self.ambient_basis = ambient_basis
        self.provenance = provenance or {"builder": "unknown", "params": {}}
        self._op_entries = op_entries
        self._op_apply = op_apply
        if self.atoms.ndim != 2 or self.atoms.shape[0] != self.atoms.shape[1]:
            raise ValidationError("atom matrix must be square (rows = atoms)")
        if self.eigenvalues.shape != (self.atoms.shape[0],):
            raise ValidationError("one eigenvalue per atom required")
        if op_apply is None and op_entries is None:
            raise ValidationError("operator action required")
        if check:
            self._verify()

    @property
    def dim(self):
        return self.atoms.shape[0]

    @property
    def ambient_dim(self):
        return self.dim if self.ambient_basis is None else self.ambient_basis.shape[1]

    @property
    def operator(self):
        """Dense operator on the sampling space, built on first access."""
        if self._op_entries is None:
            ident = np.eye(self.dim, dtype=self.atoms.dtype)
            self._op_entries = self.apply_op(ident)
        sym = 0.5 * (self._op_entries + self._op_entries.conj().T)
        return DenseOp(sym, self.field, symmetric=True)

    def apply_op(self, x):
        """Operator action on sampling-coordinate vectors (or column stacks)."""
        if self._op_apply is not None:
            return self._op_apply(np.asarray(x))
        return self._op_entries @ np.asarray(x)

    def atom(self, k):
        return Vec(self.atoms[k], self.field)

    def to_internal(self, x_ambient):
        """Ambient coordinates -> sampling coordinates (projects first)."""
        x = np.asarray(x_ambient)
        if self.ambient_basis is None:
            if x.shape[0] != self.dim:
                raise ValidationError("ambient dimension mismatch")
            return as_coords(x, self.field)
        if x.shape[0] != self.ambient_basis.shape[1]:
            raise ValidationError("ambient dimension mismatch")
        return self.ambient_basis.conj() @ as_coords(x, self.field)

    def to_ambient(self, coords):
        coords = np.asarray(coords)
        if self.ambient_basis is None:
            return coords
        return self.ambient_basis.T @ coords

    def _check_indices(self):
        """Deterministic atom subset for large-dim spot checks."""
        if self.dim <= FULL_CHECK_DIM:
            return np.arange(self.dim)
        rng = np.random.default_rng(0x5EED)
        picks = rng.choice(self.dim, size=96, replace=False)
        edges = np.arange(0, self.dim, max(1, self.dim // 32))
        return np.unique(np.concatenate([picks, edges, [self.dim - 1]]))

    def _verify(self):
        norms = np.linalg.norm(self.atoms, axis=1)
        if float(np.max(np.abs(norms - 1.0))) > ORTHO_TOL:
            raise NumericalFailure("atom norms deviate from 1")
        idx = self._check_indices()
        sub = self.atoms[idx]
        gram = sub @ sub.conj().T
        if float(np.max(np.abs(gram - np.eye(len(idx))))) > ORTHO_TOL:
            raise NumericalFailure("atoms not orthonormal within tolerance")
        cols = self.atoms[idx].T
        resid = self.apply_op(cols) - cols * self.eigenvalues[idx][None, :]
        bounds = EIG_RESID_TOL * (1.0 + np.abs(self.eigenvalues[idx]))
        if np.any(np.linalg.norm(resid, axis=0) > bounds):
            raise NumericalFailure("eigenpair residual above tolerance")
        if self.dim <= FULL_CHECK_DIM:
            ent = self.apply_op(np.eye(self.dim, dtype=self.atoms.dtype))
            defect = float(np.max(np.abs(ent - ent.conj().T)))
            if defect > 1e-12 * (1.0 + float(np.max(np.abs(ent)))):
                raise NumericalFailure("operator not symmetric within sym_tol")
            if self._op_entries is None:
                self._op_entries = ent


@dataclass(frozen=True)
class Scale:
    """Weighted family (e_j, c_j) biasing measure toward the standard prefix."""

    vectors: np.ndarray        # (count, dim) rows, sampling coordinates
    weights: np.ndarray        # (count,) nonnegative
    standard_prefix_len: int

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))
        if np.any(self.weights < 0):
            raise ValidationError("scale weights must be nonnegative")
        j0 = self.standard_prefix_len
        tail = self.weights[max(j0, 1):]
        if tail.size and np.any(np.diff(tail) > 0):
            raise ValidationError("weights must be non-increasing beyond the standard prefix")
        total = float(np.sum(self.weights * self.norms_sq))
        if abs(total - 1.0) > 1e-10:
            raise ValidationError(f"sum c_j ||e_j||^2 = {total!r}, expected 1")

    @property
    def count(self):
        return self.vectors.shape[0]

    @property
    def norms_sq(self):
        cached = getattr(self, "_norms_sq", None)
        if cached is None:
            cached = np.einsum("ji,ji->j", self.vectors.conj(), self.vectors).real
            object.__setattr__(self, "_norms_sq", cached)
        return cached

    def tail_mass(self, j0):
        """sum_{j>j0} c_j ||e_j||^2, the finite avatar of the bias condition."""
        return float(np.sum((self.weights * self.norms_sq)[j0:]))


@dataclass(frozen=True)
class GraphDefectReport:
    """Per-vector ||A_tilde proj(x) - proj(A x)||; shrinks as dim grows."""

    defects: np.ndarray

    @property
    def max(self):
        return float(np.max(self.defects)) if self.defects.size else 0.0

    @property
    def mean(self):
        return float(np.mean(self.defects)) if self.defects.size else 0.0


class PVMOracle:
    """Interval-indexed projection oracle P([a, b)) acting on ambient vectors."""

    def __init__(self, apply_fn, dim, field=COMPLEX):
        self._apply = apply_fn
        self.dim = dim
        self.field = field

    def apply(self, a, b, x):
        if b <= a:
            return np.zeros_like(np.asarray(x))
        return self._apply(a, b, np.asarray(x))

    def matrix(self, a, b):
        return self.apply(a, b, np.eye(self.dim, dtype=np.complex128 if self.field == COMPLEX else np.float64))

    def validate(self, window=1.0, tol=1e-10):
        """Idempotence and monotone multiplicativity on nested intervals."""
        w = float(window)
        pairs = [(-w, w), (-w, 0.0), (0.0, w), (-w / 2, w / 2), (0.25 * w, 0.75 * w)]
        mats = {iv: self.matrix(*iv) for iv in pairs}
        for iv, p in mats.items():
            if float(np.max(np.abs(p @ p - p))) > tol:
                raise ValidationError(f"PVM not idempotent on {iv}")
        for (a1, b1) in pairs:
            for (a2, b2) in pairs:
                lo, hi = max(a1, a2), min(b1, b2)
                inter = self.matrix(lo, hi) if hi > lo else np.zeros_like(mats[(a1, b1)])
                prod = mats[(a1, b1)] @ mats[(a2, b2)]
                if float(np.max(np.abs(prod - inter))) > tol:
                    raise ValidationError("PVM not multiplicative on interval intersections")
        return True

    @classmethod
    def from_eigensystem(cls, eigvals, eigvecs=None, field=COMPLEX):
        """Oracle for a diagonal (or given-basis) self-adjoint operator."""
        lam = np.asarray(eigvals, dtype=np.float64)
        dim = lam.shape[0]
        if eigvecs is None:
            vecs = np.eye(dim, dtype=np.complex128 if field == COMPLEX else np.float64)
        else:
            vecs = np.asarray(eigvecs)

        def apply_fn(a, b, x):
            mask = ((lam >= a) & (lam < b)).astype(np.float64)
            coeff = vecs.conj().T @ np.asarray(x)
            scaled = mask[:, None] * coeff if coeff.ndim == 2 else mask * coeff
            return vecs @ scaled

        return cls(apply_fn, dim, field)


def _dyadic_weights(count, norms_sq):
    j = np.arange(1, count + 1, dtype=np.float64)
    with np.errstate(under="ignore"):
        pow2 = np.exp2(-j)
    denom = 1.0 - 2.0 ** (-count) if count < 54 else 1.0
    return pow2 / (denom * norms_sq)


def dyadic_scale(sampling, standard_prefix, assume_spanning=False):
    """Scale with weights c_j = 1 / (2^j (1 - 2^-J) ||e_j||^2).

    The prefix is extended to a spanning family by appending coordinate
    basis vectors whose residual against the current span is nonzero.
    Builders whose family spans by construction pass assume_spanning to
    skip the cubic-cost span bookkeeping.
    """
    dim = sampling.dim
    dtype = np.complex128 if sampling.field == COMPLEX else np.float64
    rows = []
    for v in standard_prefix:
        coords = v.coords if isinstance(v, Vec) else as_coords(v, sampling.field)
        if coords.shape[0] != dim:
            raise ValidationError("prefix vector not in sampling coordinates")
        if np.linalg.norm(coords) == 0.0:
            raise ValidationError("zero vector in prefix")
        rows.append(coords.astype(dtype))
    prefix_len = len(rows)

    if not assume_spanning:
        q = np.zeros((0, dim), dtype=dtype)

        def try_extend(vec):
            nonlocal q
            r = vec - q.T @ (q.conj() @ vec)
            r -= q.T @ (q.conj() @ r)
            nrm = np.linalg.norm(r)
            if nrm > 1e-10:
                q = np.vstack([q, r[None, :] / nrm])
                return True
            return False

        for r in rows:
            try_extend(r)
        for i in range(dim):
            if q.shape[0] == dim:
                break
            cand = np.zeros(dim, dtype=dtype)
            cand[i] = 1.0
            if try_extend(cand):
                rows.append(cand)

    mat = np.stack(rows)
    norms_sq = np.einsum("ji,ji->j", mat.conj(), mat).real
    weights = _dyadic_weights(len(rows), norms_sq)
    scale = Scale(mat, weights, standard_prefix_len=prefix_len)

    mu = atom_weights(sampling, scale)
    if float(np.min(mu)) < MU_MIN:
        raise ValidationError(
            "atom with zero measure after weighting (scale compatibility condition 10)"
        )
    return scale


def atom_weights(sampling, scale):
    """mu_k = sum_j c_j |<e_j, f_k>|^2 as a raw array (no normalization check)."""
    active = scale.weights * scale.norms_sq > ATOM_TERM_CUTOFF
    vecs = scale.vectors[active]
    ips = vecs @ sampling.atoms.conj().T  # (J_active, dim): <e_j, f_k>
    return (scale.weights[active][:, None] * np.abs(ips) ** 2).sum(axis=0)


def build_projection_sampling(op_action, span, tol=1e-9):
    """Compress an ambient operator onto an explicit span and diagonalize."""
    if not span:
        raise ValidationError("empty span")
    field = span[0].field if isinstance(span[0], Vec) else COMPLEX
    coords = [v.coords if isinstance(v, Vec) else as_coords(v, field) for v in span]
    basis = orthonormalize(coords, field)
    images = np.stack([as_coords(op_action(b), field) for b in basis])  # rows A b_i
    compressed = basis.conj() @ images.T  # M[i, j] = <A b_j, b_i>
    sym = 0.5 * (compressed + compressed.conj().T)
    op = DenseOp(sym, field, symmetric=True, sym_tol=1e-6)
    eigvals, eigvecs = eigh_self_adjoint(op, tol=tol)
    atoms = np.stack([v.coords for v in eigvecs])
    return Sampling(
        eigvals,
        atoms,
        field,
        op_entries=sym,
        ambient_basis=basis,
        provenance={"builder": "projection", "params": {"dim": len(span)}},
    )


def build_shift_sampling(N):
    """Circulant (L + R)/2 on the odd-size cyclic truncation of l2(Z).

    Atoms are the DFT vectors with eigenvalue cos(2 pi k / N); the scale is
    the dyadic one over the interleaved basis order g_0, g_1, g_-1, ...
    """
    if N < 3:
        raise ValidationError("N must be >= 3")
    if N % 2 == 0:
        raise ValidationError("N must be odd")
    M = (N - 1) // 2
    k = np.arange(N, dtype=np.int64)
    l = np.arange(-M, M + 1, dtype=np.int64)
    atoms = _unit_phases(np.outer(k, l), N, sign=-1.0) / math.sqrt(N)
    eigvals = np.cos(2.0 * np.pi * k.astype(np.float64) / N)

    def op_apply(x):
        return 0.5 * (np.roll(x, -1, axis=0) + np.roll(x, 1, axis=0))

    sampling = Sampling(
        eigvals, atoms, COMPLEX, op_apply=op_apply,
        provenance={"builder": "shift", "params": {"N": N}},
    )
    order = interleaved_positions(M)
    prefix = np.zeros((N, N), dtype=np.complex128)
    prefix[np.arange(N), order + M] = 1.0
    # the interleave enumerates the whole canonical basis, so it spans
    scale = dyadic_scale(sampling, list(prefix), assume_spanning=True)
    return sampling, scale


def interleaved_positions(M):
    """0, 1, -1, 2, -2, ..., M, -M."""
    out = [0]
    for m in range(1, M + 1):
        out.extend([m, -m])
    return np.array(out, dtype=np.int64)


def rational_shift_sequence(count):
    """0, 1, -1, 1/2, -1/2, 2, -2, 1/3, -1/3, 3, -3, ... truncated."""
    seq = [Fraction(0)]
    m = 1
    while len(seq) < count:
        if m == 1:
            block = [Fraction(1), Fraction(-1)]
        else:
            block = [Fraction(1, m), Fraction(-1, m), Fraction(m), Fraction(-m)]
        seq.extend(block)
        m += 1
    return seq[:count]


def _icbrt(n):
    r = round(n ** (1.0 / 3.0))
    while r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def build_diff_sampling(N, J, rationals=None):
    """Central-difference operator -i(L - R)/(2/N) on the [-N, N) grid.

    Grid cells s_k = [k/N, (k+1)/N) carry ||1_{s_k}||^2 = 1/N; atoms are the
    DFT vectors with eigenvalue N sin(pi k / N^2). The scale translates a
    sampled Gaussian (plus an i/N bump pinning every inner product away
    from zero) by the rational shifts q_j.
    """
    if N < 2:
        raise ValidationError("N must be >= 2")
    if J < 1:
        raise ValidationError("J must be >= 1")
    if rationals is None:
        rationals = rational_shift_sequence(J)
    qs = [Fraction(q) for q in rationals][:J]
    if len(qs) < J:
        raise ValidationError("need at least J rationals")
    if qs[0] != 0:
        raise ValidationError("first rational shift must be 0")
    denom_lcm = math.lcm(*[q.denominator for q in qs])
    if N % denom_lcm != 0:
        raise ValidationError(
            f"N must be divisible by lcm of shift denominators ({denom_lcm})"
        )
    max_q = max(abs(q) for q in qs)
    n1 = min(_icbrt(N**5), N * N - int(N * max_q) - 2)
    if n1 < N:
        raise ValidationError("Gaussian window does not fit: N1 < N")
    # finite analog of the window inequality sqrt(N) < N1/N + q < N,
    # enforced only for the configured shifts
    for q in qs:
        val = Fraction(n1, N) + q
        if not (val * val > N and val < N):
            raise ValidationError(
                f"window inequality sqrt(N) < N1/N + q < N fails for q = {q}"
            )

    dim = 2 * N * N
    ks = np.arange(-N * N, N * N, dtype=np.int64)
    atoms = _unit_phases(np.outer(ks, ks), dim, sign=1.0) / math.sqrt(dim)
    eigvals = N * np.sin(np.pi * ks.astype(np.float64) / (N * N))

    half = N / 2.0

    def op_apply(x):
        return -1j * half * (np.roll(x, -1, axis=0) - np.roll(x, 1, axis=0))

    sampling = Sampling(
        eigvals, atoms, COMPLEX, op_apply=op_apply,
        provenance={
            "builder": "diff",
            "params": {"N": N, "J": J, "N1": n1,
                       "rationals": [str(q) for q in qs]},
        },
    )

    base = np.zeros(dim, dtype=np.complex128)
    cells = np.arange(-n1, n1 + 1)
    base[cells + N * N] = (2.0 / np.pi) ** 0.25 * np.exp(-((cells / N) ** 2)) / math.sqrt(N)
    base[N * N] += 1j / (N * math.sqrt(N))
    base_norm_sq = float(np.vdot(base, base).real)

    vectors = np.zeros((J, dim), dtype=np.complex128)
    for j, q in enumerate(qs):
        kj = int(N * q)
        vectors[j] = np.roll(base, kj)
    weights = _dyadic_weights(J, np.full(J, base_norm_sq))
    scale = Scale(vectors, weights, standard_prefix_len=J)
    if float(np.min(atom_weights(sampling, scale))) < MU_MIN:
        raise ValidationError(
            "atom with zero measure after weighting (scale compatibility condition 10)"
        )
    return sampling, scale


def _dyadic_probe_intervals(window, mesh):
    """Dyadic endpoint grids from the whole window down, refined only while
    probe intervals still decompose into mesh cells (the finite analog of
    truncating the probe count where cell partitions exist)."""
    two_w = 2.0 * window
    if window <= 0 or abs(two_w - round(two_w)) > 0:
        raise ValidationError("window must be a positive multiple of 1/2")
    level = 0
    while True:
        step = two_w / (2**level)
        if (mesh * step) != int(mesh * step):
            return
        count = int(round(two_w / step))
        points = [-window + i * step for i in range(count + 1)]
        for ai in range(len(points)):
            for bi in range(ai + 1, len(points)):
                yield level, points[ai], points[bi]
        level += 1


def build_pvm_sampling(pvm, g, window, mesh, probe_count):
    """Sampling driven by a projection-valued measure.

    Splits the spanning candidates into spectral pieces P(s) g_k over the
    mesh cells, keeps the pairs some probe overlaps, and uses the probes
    P([a, b)) g_k as the scale with the min-normalized dyadic weights.
    """
    if window <= 0:
        raise ValidationError("window must be positive")
    if mesh < 1:
        raise ValidationError("mesh must be >= 1")
    pvm.validate(window=window)
    field = pvm.field
    candidates = [v.coords if isinstance(v, Vec) else as_coords(v, field) for v in g]
    if not candidates:
        raise ValidationError("degenerate g family: no spanning candidates")

    n_cells = int(math.ceil(window * mesh))
    cell_ls = list(range(-n_cells, n_cells))

    pieces = {}      # (k, l) -> unnormalized P(s) g_k
    ortho = []       # accumulated orthonormal basis of the processed H_k
    gs = []
    for ki, cand in enumerate(candidates):
        gk = cand.astype(np.complex128 if field == COMPLEX else np.float64, copy=True)
        for u in ortho:
            gk -= np.vdot(u, gk) * u
        gs.append(gk)
        scale_norm = np.linalg.norm(cand) or 1.0
        for l in cell_ls:
            piece = pvm.apply(l / mesh, (l + 1) / mesh, gk)
            nrm = np.linalg.norm(piece)
            if nrm > 1e-12 * scale_norm:
                pieces[(ki, l)] = piece
                ortho.append(piece / nrm)

    if not pieces:
        raise ValidationError("degenerate g family: no spectral mass in the window")

    probes = []
    probe_meta = []
    for level, a, b in _dyadic_probe_intervals(window, mesh):
        if len(probes) >= probe_count:
            break
        for ki, gk in enumerate(gs):
            if len(probes) >= probe_count:
                break
            e = pvm.apply(a, b, gk)
            nrm = np.linalg.norm(e)
            if nrm <= 1e-12 * (np.linalg.norm(gk) or 1.0):
                continue
            if any(np.linalg.norm(e - p) <= 1e-12 * nrm for p in probes):
                continue
            probes.append(e)
            probe_meta.append({"k": ki, "a": a, "b": b, "level": level})
    if not probes:
        raise ValidationError("no nonzero probes: degenerate g family")

    kept = []
    for (ki, l), piece in sorted(pieces.items()):
        if any(abs(np.vdot(piece, p)) > 1e-12 for p in probes):
            kept.append((ki, l))
    if not kept:
        raise ValidationError("all probes vanish on every cell (compatibility condition 10)")
    for (ki, l) in sorted(pieces):
        if (ki, l) not in kept:
            pieces.pop((ki, l))

    amb = np.stack([pieces[key] / np.linalg.norm(pieces[key]) for key in kept])
    eigvals = np.array([l / mesh for (_, l) in kept], dtype=np.float64)
    dim = len(kept)
    atoms = np.eye(dim, dtype=amb.dtype)

    def op_apply(x):
        return eigvals[:, None] * x if np.asarray(x).ndim == 2 else eigvals * x

    sampling = Sampling(
        eigvals, atoms, field, op_apply=op_apply, ambient_basis=amb,
        provenance={
            "builder": "pvm",
            "params": {"window": window, "mesh": mesh,
                       "probe_count": len(probes),
                       "pairs": [[int(k), int(l)] for (k, l) in kept],
                       "probes": probe_meta},
        },
    )

    internal = np.stack([sampling.to_internal(p) for p in probes])
    recon = np.stack([sampling.to_ambient(row) for row in internal])
    if float(np.max(np.abs(recon - np.stack(probes)))) > 1e-10:
        raise NumericalFailure("probe does not decompose over kept atoms")

    norms_sq = np.einsum("ji,ji->j", internal.conj(), internal).real
    j = np.arange(1, len(probes) + 1, dtype=np.float64)
    with np.errstate(under="ignore"):
        raw = np.exp2(-j) * np.minimum(1.0, 1.0 / norms_sq)
    weights = raw / float(np.sum(raw * norms_sq))
    scale = Scale(internal, weights, standard_prefix_len=len(probes))

    mu = atom_weights(sampling, scale)
    if float(np.min(mu)) < MU_MIN:
        raise ValidationError(
            "atom with zero measure after weighting (scale compatibility condition 10)"
        )
    return sampling, scale


def graph_defect(sampling, op_action, test_vectors):
    """||A_tilde proj(x) - proj(A x)|| for caller-supplied ambient vectors."""
    defects = []
    for v in test_vectors:
        x = v.coords if isinstance(v, Vec) else as_coords(v, sampling.field)
        xi = sampling.to_internal(x)
        axi = sampling.to_internal(as_coords(op_action(x), sampling.field))
        defects.append(float(np.linalg.norm(sampling.apply_op(xi) - axi)))
    return GraphDefectReport(np.asarray(defects))


# ---------------------------------------------------------------------------
# JSON serialization (bit-faithful via hex floats)

def _scalar_to_str(z, field):
    if field == REAL:
        return float(z).hex()
    z = complex(z)
    return float(z.real).hex() + ";" + float(z.imag).hex()


def _scalar_from_str(s, field):
    if field == REAL:
        return float.fromhex(s)
    re, im = s.split(";")
    return complex(float.fromhex(re), float.fromhex(im))


def _array_to_json(arr, field):
    if arr.ndim == 1:
        return [_scalar_to_str(z, field) for z in arr]
    return [[_scalar_to_str(z, field) for z in row] for row in arr]


def _array_from_json(data, field):
    dtype = np.complex128 if field == COMPLEX else np.float64
    if data and isinstance(data[0], list):
        return np.array([[_scalar_from_str(s, field) for s in row] for row in data], dtype=dtype)
    return np.array([_scalar_from_str(s, field) for s in data], dtype=dtype)


def sampling_to_doc(sampling, scale):
    return {
        "field": sampling.field,
        "dim": sampling.dim,
        "eigenvalues": _array_to_json(sampling.eigenvalues, REAL),
        "eigenvectors": _array_to_json(sampling.atoms, sampling.field),
        "scale": {
            "weights": _array_to_json(scale.weights, REAL),
            "vectors": _array_to_json(scale.vectors, sampling.field),
            "standard_prefix_len": scale.standard_prefix_len,
        },
        "provenance": sampling.provenance,
    }


def sampling_from_doc(doc):
    field = doc["field"]
    eigvals = _array_from_json(doc["eigenvalues"], REAL)
    atoms = _array_from_json(doc["eigenvectors"], field)
    lam = eigvals.astype(np.float64)

    def op_apply(x):
        # spectral synthesis: the document does not carry operator entries
        coeff = atoms.conj() @ np.asarray(x)
        return atoms.T @ (lam[:, None] * coeff if coeff.ndim == 2 else lam * coeff)

    sampling = Sampling(eigvals, atoms, field, op_apply=op_apply,
                        provenance=doc.get("provenance"), check=False)
    sc = doc["scale"]
    scale = Scale(
        _array_from_json(sc["vectors"], field),
        _array_from_json(sc["weights"], REAL),
        standard_prefix_len=int(sc["standard_prefix_len"]),
    )
    return sampling, scale


def save_sampling(path, sampling, scale):
    with open(path, "w") as fh:
        json.dump(sampling_to_doc(sampling, scale), fh)


def load_sampling(path):
    with open(path) as fh:
        return sampling_from_doc(json.load(fh))
