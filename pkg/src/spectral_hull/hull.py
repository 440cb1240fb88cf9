"""Pseudometric on the atoms and the epsilon-quotient hull space.

d(f, g) = sum_j c_j^{3/2} ||e_j||^2 |U(e_j)(f) - U(e_j)(g)| is bounded by 2;
quotienting the atoms by the d < epsilon graph (single-linkage components)
gives the hull with pushed-forward weight, multiplier and chart coordinates.
"""

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, ValidationError
from .kernels import dist_row, pairwise_block
from .linalg import kahan_sum
from .measure import embed

# terms with c_j ||e_j||^2 below this cutoff contribute less than ~1e-29
# to any distance (|delta_j| <= 2 / sqrt(c_j)), invisible at double precision
TERM_CUTOFF = 1e-33

TERM_BOUND_TOL = 1e-12
DMAX_TOL = 1e-12


class PseudoMetric:
    """Evaluate-by-pair pseudometric with an optional cached dense matrix."""

    def __init__(self, weights, coords, active_j):
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        self.coords = np.ascontiguousarray(coords, dtype=np.complex128)
        self.active_j = np.asarray(active_j, dtype=np.int64)
        self._matrix = None

    @property
    def n_atoms(self):
        return self.coords.shape[0]

    def evaluate(self, a, b):
        """Single-pair distance; arithmetic matches the kernels bit for bit."""
        acc = 0.0
        va, vb = self.coords[a], self.coords[b]
        for j in range(self.weights.shape[0]):
            d = va[j] - vb[j]
            acc += self.weights[j] * math.sqrt(d.real * d.real + d.imag * d.imag)
        return acc

    def block(self, a0, a1):
        return pairwise_block(self.weights, self.coords, a0, a1)

    def row(self, k):
        return dist_row(self.weights, self.coords, k)

    def matrix(self):
        if self._matrix is None:
            self._matrix = self.block(0, self.n_atoms)
        return self._matrix

    def coord_column(self, j):
        """U(e_j) values over the atoms for an original scale index j."""
        pos = np.flatnonzero(self.active_j == j)
        if pos.size == 0:
            raise ValidationError(f"scale index {j} dropped by the term cutoff")
        return self.coords[:, pos[0]]


def pseudometric(sampling, scale, measure):
    """Build the pseudometric from scale coordinates U(e_j)(f_k)."""
    if measure.sampling is not sampling:
        raise ValidationError("measure was built from a different sampling")
    w_full = scale.weights ** 1.5 * scale.norms_sq
    active = scale.weights * scale.norms_sq > TERM_CUTOFF
    idx = np.flatnonzero(active)
    coords = (scale.vectors[idx] @ sampling.atoms.conj().T) / measure.sqrt[None, :]
    bound = scale.weights[idx, None] * np.abs(coords) ** 2
    worst = float(np.max(bound)) if bound.size else 0.0
    if worst > 1.0 + TERM_BOUND_TOL:
        raise NumericalFailure(
            f"per-term bound c_j |U(e_j)|^2 <= 1 violated: {worst!r}"
        )
    return PseudoMetric(w_full[idx], coords.T, idx)


class _UnionFind:
    def __init__(self, n):
        self.parent = np.arange(n, dtype=np.int64)

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass(frozen=True)
class ChartPoint:
    label: str          # "circle" | "line"
    coordinate: float   # t in [0, 1) or omega in R


class HullSpace:
    """Disjoint atom clusters with weight, multiplier and coordinates."""

    def __init__(self, clusters, weights, multipliers, coords, epsilon,
                 measure, degenerate):
        self.clusters = clusters
        self.weights = np.asarray(weights, dtype=np.float64)
        self.multipliers = np.asarray(multipliers, dtype=np.float64)
        self.coords = coords
        self.epsilon = float(epsilon)
        self.measure = measure
        self.degenerate = np.asarray(degenerate, dtype=bool)
        covered = sum(len(c) for c in clusters)
        if covered != measure.dim:
            raise NumericalFailure("clusters do not cover the atoms")
        total = kahan_sum(self.weights)
        if abs(total - 1.0) > 1e-10:
            raise NumericalFailure(f"hull weights total {total!r}, expected 1")

    @property
    def n_clusters(self):
        return len(self.clusters)

    @property
    def j0(self):
        return self.coords.shape[1]

    def representatives(self):
        return np.array([c[0] for c in self.clusters], dtype=np.int64)

    def cluster_of_atom(self):
        out = np.empty(self.measure.dim, dtype=np.int64)
        for ci, members in enumerate(self.clusters):
            out[members] = ci
        return out


def build_hull(metric, measure, multiplier, epsilon, j0=16):
    """Quotient by connected components of the d < epsilon graph.

    Thresholding an equivalence is not transitive; single-linkage components
    are the canonical closure. Coordinates are mu-weighted means of the
    first j0 scale coordinates U(e_j).
    """
    if epsilon <= 0:
        raise ValidationError("epsilon must be positive")
    n = metric.n_atoms
    uf = _UnionFind(n)
    block = max(1, min(n, 4_000_000 // max(n, 1)))
    for a0 in range(0, n, block):
        a1 = min(n, a0 + block)
        dmat = metric.block(a0, a1)
        if float(dmat.max(initial=0.0)) > 2.0 + DMAX_TOL:
            raise NumericalFailure("pseudometric exceeded its bound d <= 2")
        rows, cols = np.nonzero(dmat < epsilon)
        for r, c in zip(rows, cols):
            a = a0 + int(r)
            if a < c:
                uf.union(a, int(c))

    roots = np.array([uf.find(a) for a in range(n)], dtype=np.int64)
    order = {}
    clusters = []
    for a in range(n):
        r = int(roots[a])
        if r not in order:
            order[r] = len(clusters)
            clusters.append([])
        clusters[order[r]].append(a)
    clusters = [np.asarray(c, dtype=np.int64) for c in clusters]

    mu = measure.atoms
    j_eff = min(j0, metric.coords.shape[1])
    weights = np.empty(len(clusters))
    mults = np.empty(len(clusters))
    coords = np.empty((len(clusters), j_eff), dtype=np.complex128)
    for ci, members in enumerate(clusters):
        wsum = kahan_sum(mu[members])
        weights[ci] = wsum
        mults[ci] = kahan_sum(mu[members] * multiplier.values[members]) / wsum
        coords[ci] = (mu[members][:, None] * metric.coords[members, :j_eff]).sum(axis=0) / wsum
    degenerate = np.all(np.abs(coords) <= 1e-12, axis=1)
    return HullSpace(clusters, weights, mults, coords, epsilon, measure, degenerate)


def hull_coordinate_functions(hull, measure, scale, j):
    """Cluster values of the j-th coordinate function (0-based index)."""
    if not 0 <= j < hull.j0:
        raise ValidationError(f"coordinate index {j} out of range (j0 = {hull.j0})")
    return hull.coords[:, j]


def coordinate_lipschitz_defect(hull, metric, scale, j, max_pairs=2000):
    """Worst violation of the relaxed Lipschitz bound for coordinate j.

    |U_j(p) - U_j(q)| <= (d(rep_p, rep_q) + 2 eps) / (c_j^{3/2} ||e_j||^2),
    checked on representatives over at most max_pairs deterministic pairs.
    """
    reps = hull.representatives()
    vals = hull.coords[:, j]
    const = scale.weights[j] ** 1.5 * float(scale.norms_sq[j])
    if const == 0.0:
        raise ValidationError("coordinate has zero weight")
    pairs = []
    nc = hull.n_clusters
    for p in range(nc):
        for q in range(p + 1, nc):
            pairs.append((p, q))
        if len(pairs) > max_pairs:
            break
    if len(pairs) > max_pairs:
        rng = np.random.default_rng(0xC0C0)
        sel = rng.choice(len(pairs), size=max_pairs, replace=False)
        pairs = [pairs[i] for i in sel]
    worst = -np.inf
    for p, q in pairs:
        lhs = abs(vals[p] - vals[q])
        rhs = (metric.evaluate(int(reps[p]), int(reps[q])) + 2.0 * hull.epsilon) / const
        worst = max(worst, lhs - rhs)
    return worst if pairs else 0.0


def pushforward_multiplier_via_partition(hull, measure, scale, sampling):
    """Alternative multiplier via the first-nonzero-coordinate partition.

    On the cluster class C_j (first j with U_j != 0) the value is
    Re( U(A e_j) / U_j ), the quotient form of the pushforward.
    """
    j_eff = hull.j0
    images = np.empty((j_eff, sampling.dim), dtype=np.complex128)
    for j in range(j_eff):
        images[j] = embed(sampling.apply_op(scale.vectors[j]), measure).values
    mu = measure.atoms
    out = np.empty(hull.n_clusters)
    for ci, members in enumerate(hull.clusters):
        pick = None
        for j in range(j_eff):
            if abs(hull.coords[ci, j]) > 1e-12:
                pick = j
                break
        if pick is None:
            raise ValidationError(
                f"cluster {ci} not covered by any nonzero coordinate function"
            )
        wsum = hull.weights[ci]
        num = (mu[members] * images[pick][members]).sum() / wsum
        out[ci] = (num / hull.coords[ci, pick]).real
    return out


def partition_multiplier_tolerance(hull, scale, max_abs_lambda):
    """epsilon-dependent agreement tolerance between the two multipliers."""
    j_eff = hull.j0
    consts = scale.weights[:j_eff] ** 1.5 * scale.norms_sq[:j_eff]
    if np.any(consts <= 0):
        raise ValidationError("zero-weight coordinate inside j0")
    return hull.epsilon * float(np.max(1.0 / consts)) * (1.0 + max_abs_lambda)


def chart_circle(hull, scale):
    """t = arg(U at the g_1 scale position) / 2 pi, mod 1."""
    prov = hull.measure.sampling.provenance
    if prov.get("builder") != "shift":
        raise ValidationError("circle chart requires a shift sampling")
    if hull.j0 < 2:
        raise ValidationError("circle chart needs the g_1 coordinate (j0 >= 2)")
    if bool(np.any(hull.degenerate)):
        raise ValidationError("degenerate cluster has no chart point")
    vals = hull.coords[:, 1]
    mods = np.abs(vals)
    if float(np.max(np.abs(mods - 1.0))) > 1e-6:
        raise NumericalFailure("chart coordinate left the unit circle")
    ts = np.angle(vals) / (2.0 * np.pi)
    ts = np.mod(ts, 1.0)
    return [ChartPoint("circle", float(t)) for t in ts]


def chart_line(hull, sampling, coherence_tol=1e-9):
    """omega = mu-weighted mean of member frequencies k / N."""
    prov = sampling.provenance
    if prov.get("builder") != "diff":
        raise ValidationError("line chart requires a diff sampling")
    n = prov["params"]["N"]
    freqs = (np.arange(sampling.dim) - sampling.dim // 2) / n
    mu = hull.measure.atoms
    points = []
    for ci, members in enumerate(hull.clusters):
        f = freqs[members]
        if f.size > 1 and float(f.max() - f.min()) > coherence_tol:
            raise ValidationError(f"cluster {ci} is not chart-coherent")
        omega = float((mu[members] * f).sum() / hull.weights[ci])
        points.append(ChartPoint("line", omega))
    return points


def covering_number(metric, epsilon):
    """Greedy epsilon-net size in atom order; plateaus across N for fixed eps."""
    if epsilon <= 0:
        raise ValidationError("epsilon must be positive")
    n = metric.n_atoms
    mindist = np.full(n, np.inf)
    centers = 0
    for k in range(n):
        if mindist[k] >= epsilon:
            centers += 1
            np.minimum(mindist, metric.row(k), out=mindist)
    return centers


# ---------------------------------------------------------------------------
# reports

def hull_report_doc(hull, charts=None):
    clusters = []
    for ci, members in enumerate(hull.clusters):
        entry = {
            "members": [int(m) for m in members],
            "weight": float(hull.weights[ci]),
            "m": float(hull.multipliers[ci]),
            "coords": [[float(z.real), float(z.imag)] for z in hull.coords[ci]],
            "degenerate": bool(hull.degenerate[ci]),
        }
        if charts is not None:
            key = "t" if charts[ci].label == "circle" else "omega"
            entry["chart"] = {"label": charts[ci].label, key: charts[ci].coordinate}
        clusters.append(entry)
    return {"epsilon": hull.epsilon, "clusters": clusters}


def write_hull_json(path, hull, charts=None):
    with open(path, "w") as fh:
        json.dump(hull_report_doc(hull, charts), fh)


def write_hull_csv(path, hull, charts=None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cluster", "size", "weight", "m", "chart_label", "chart_coord"])
        for ci in range(hull.n_clusters):
            label = charts[ci].label if charts else ""
            coord = f"{charts[ci].coordinate:.17g}" if charts else ""
            writer.writerow([
                ci, len(hull.clusters[ci]),
                f"{hull.weights[ci]:.17g}", f"{hull.multipliers[ci]:.17g}",
                label, coord,
            ])
